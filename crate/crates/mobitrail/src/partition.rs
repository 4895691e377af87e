//! Region partitions: deterministic mappings from coordinates to discrete
//! region IDs.
//!
//! Two kinds are supported. A [`GridPartition`] tiles the whole globe with
//! fixed-size cells anchored at (0, 0) and needs no data files. A
//! [`LookupPartition`] is loaded from a JSONL file of named regions
//! (bounding boxes and/or polygon rings) and carries country metadata, so it
//! is the one to use for country-level analyses.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::error::{self, Error, Result};
use crate::geo::GeoPoint;

#[derive(Clone, Debug)]
pub enum RegionPartition {
    Grid(GridPartition),
    Lookup(LookupPartition),
}

impl RegionPartition {
    /// Region containing the point, or `None` when the point is outside the
    /// partition's coverage. Pure: same point, same answer.
    pub fn assign(&self, pt: GeoPoint<f64>) -> Option<u64> {
        match self {
            RegionPartition::Grid(g) => Some(g.cell_id(pt)),
            RegionPartition::Lookup(l) => l.assign(pt),
        }
    }

    /// ISO-3166 alpha-2 country of a region, where known. Grid cells carry
    /// no country metadata, so country-level rules require a lookup
    /// partition.
    pub fn country_of(&self, region_id: u64) -> Option<&str> {
        match self {
            RegionPartition::Grid(_) => None,
            RegionPartition::Lookup(l) => l.country_of(region_id),
        }
    }

    pub fn region_name(&self, region_id: u64) -> Option<&str> {
        match self {
            RegionPartition::Grid(_) => None,
            RegionPartition::Lookup(l) => l.region_name(region_id),
        }
    }

    /// Parses a partition spec of the form `grid:SIZE` (cell size in
    /// degrees) or `lookup:PATH` (JSONL region file).
    pub fn from_spec(spec: &str) -> Result<Self> {
        if let Some(size) = spec.strip_prefix("grid:") {
            let cell: f64 = size.parse().map_err(|_| {
                Error::InvalidArgument(format!("bad grid cell size {size:?} in partition spec"))
            })?;
            Ok(RegionPartition::Grid(GridPartition::new(cell)?))
        } else if let Some(path) = spec.strip_prefix("lookup:") {
            Ok(RegionPartition::Lookup(LookupPartition::load(
                Path::new(path),
            )?))
        } else {
            Err(Error::InvalidArgument(format!(
                "partition spec {spec:?} must be grid:SIZE or lookup:FILE"
            )))
        }
    }
}

/// Global grid of `cell_size_deg` × `cell_size_deg` cells anchored at
/// (0, 0). Cell indices come from floor division, so cells own their
/// lower/left edges; the north pole is clamped into the top row.
#[derive(Clone, Copy, Debug)]
pub struct GridPartition {
    cell_size_deg: f64,
    /// Lowest row/column index and row width, fixed by the cell size.
    row_min: i64,
    col_min: i64,
    n_cols: u64,
    row_max: i64,
}

impl GridPartition {
    pub fn new(cell_size_deg: f64) -> Result<Self> {
        if !(cell_size_deg.is_finite() && cell_size_deg > 0.0 && cell_size_deg <= 360.0) {
            return Err(Error::InvalidConfig(format!(
                "grid cell size must be in (0, 360], got {cell_size_deg}"
            )));
        }
        let rows_per_hemisphere = (90.0 / cell_size_deg).ceil() as i64;
        let cols_per_hemisphere = (180.0 / cell_size_deg).ceil() as i64;
        Ok(GridPartition {
            cell_size_deg,
            row_min: -rows_per_hemisphere,
            col_min: -cols_per_hemisphere,
            n_cols: (2 * cols_per_hemisphere) as u64,
            row_max: rows_per_hemisphere - 1,
        })
    }

    pub fn cell_size_deg(&self) -> f64 {
        self.cell_size_deg
    }

    pub fn cell_id(&self, pt: GeoPoint<f64>) -> u64 {
        // lat = +90 would land one row past the top (that row contains only
        // the pole itself); fold it into the last real row.
        let row = ((pt.lat_deg() / self.cell_size_deg).floor() as i64).min(self.row_max);
        let col = (pt.lon_deg() / self.cell_size_deg).floor() as i64;
        (row - self.row_min) as u64 * self.n_cols + (col - self.col_min) as u64
    }

    /// Center point of a cell, for tests and diagnostics. Round-trips:
    /// `cell_id(cell_center(id)) == id` for any id produced by `cell_id`.
    pub fn cell_center(&self, id: u64) -> GeoPoint<f64> {
        let row = (id / self.n_cols) as i64 + self.row_min;
        let col = (id % self.n_cols) as i64 + self.col_min;
        // Cells on the outer edge can extend past the coordinate domain when
        // the cell size does not divide 90/180 evenly; their nominal center
        // may then fall outside it. Clamping into the domain keeps the point
        // inside the same cell (wrapping instead would jump to the far side
        // of the globe).
        let lat = ((row as f64 + 0.5) * self.cell_size_deg).clamp(-90.0, 90.0);
        let lon = ((col as f64 + 0.5) * self.cell_size_deg).clamp(-180.0, 180f64.next_down());
        GeoPoint::wrapped(lat, lon)
    }
}

#[derive(Clone, Debug)]
struct LookupRegion {
    region_id: u64,
    name: String,
    country_code: String,
    /// lat_min, lon_min, lat_max, lon_max — always present (derived from
    /// the polygon when the file gives only a ring), tested first.
    bbox: [f64; 4],
    /// Polygon ring as (lat, lon) vertices; membership by the even-odd
    /// rule. Absent means the bbox itself is the region.
    polygon: Option<Vec<[f64; 2]>>,
}

impl LookupRegion {
    fn contains(&self, pt: GeoPoint<f64>) -> bool {
        let (lat, lon) = (pt.lat_deg(), pt.lon_deg());
        let [lat_min, lon_min, lat_max, lon_max] = self.bbox;
        if lat < lat_min || lat > lat_max || lon < lon_min || lon > lon_max {
            return false;
        }
        match &self.polygon {
            None => true,
            Some(ring) => even_odd_contains(ring, lat, lon),
        }
    }
}

/// Even-odd point-in-polygon: cast a ray along increasing longitude and
/// count edge crossings.
fn even_odd_contains(ring: &[[f64; 2]], lat: f64, lon: f64) -> bool {
    let mut inside = false;
    let n = ring.len();
    let mut j = n - 1;
    for i in 0..n {
        let [lat_i, lon_i] = ring[i];
        let [lat_j, lon_j] = ring[j];
        if (lat_i > lat) != (lat_j > lat) {
            let cross = (lon_j - lon_i) * (lat - lat_i) / (lat_j - lat_i) + lon_i;
            if lon < cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Partition defined by an explicit region list. Points are matched in file
/// order and the first containing region wins, so overlaps resolve
/// deterministically; points matching no region are outside coverage.
#[derive(Clone, Debug)]
pub struct LookupPartition {
    regions: Vec<LookupRegion>,
}

#[derive(Deserialize)]
struct RawLookupRegion {
    region_id: u64,
    name: String,
    country_code: String,
    #[serde(default)]
    bbox: Option<[f64; 4]>,
    #[serde(default)]
    polygon: Option<Vec<[f64; 2]>>,
}

impl LookupPartition {
    /// Loads a JSONL file with one region object per line:
    /// `{"region_id": …, "name": …, "country_code": …, "bbox": [lat_min,
    /// lon_min, lat_max, lon_max], "polygon": [[lat, lon], …]}` where at
    /// least one of `bbox`/`polygon` is present.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| error::io(path, e))?;
        let mut regions = Vec::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let raw: RawLookupRegion =
                serde_json::from_str(&line).map_err(|e| Error::Malformed {
                    path: path.to_path_buf(),
                    line: idx as u64 + 1,
                    message: e.to_string(),
                })?;
            regions.push(Self::build_region(raw, path, idx as u64 + 1)?);
        }
        if regions.is_empty() {
            return Err(Error::EmptyInput("lookup partition file"));
        }
        let mut ids: Vec<u64> = regions.iter().map(|r| r.region_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(format!(
                "duplicate region_id in {}",
                path.display()
            )));
        }
        Ok(LookupPartition { regions })
    }

    fn build_region(raw: RawLookupRegion, path: &Path, line: u64) -> Result<LookupRegion> {
        let malformed = |message: String| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        if let Some(ring) = &raw.polygon {
            if ring.len() < 3 {
                return Err(malformed(format!(
                    "polygon for region {} needs at least 3 vertices",
                    raw.region_id
                )));
            }
        }
        let bbox = match (raw.bbox, &raw.polygon) {
            (Some(b), _) => b,
            (None, Some(ring)) => {
                let mut b = [f64::MAX, f64::MAX, f64::MIN, f64::MIN];
                for [lat, lon] in ring {
                    b[0] = b[0].min(*lat);
                    b[1] = b[1].min(*lon);
                    b[2] = b[2].max(*lat);
                    b[3] = b[3].max(*lon);
                }
                b
            }
            (None, None) => {
                return Err(malformed(format!(
                    "region {} has neither bbox nor polygon",
                    raw.region_id
                )))
            }
        };
        if bbox[0] > bbox[2] || bbox[1] > bbox[3] || bbox.iter().any(|v| !v.is_finite()) {
            return Err(malformed(format!(
                "region {} has an invalid bbox {:?}",
                raw.region_id, bbox
            )));
        }
        Ok(LookupRegion {
            region_id: raw.region_id,
            name: raw.name,
            country_code: raw.country_code,
            bbox,
            polygon: raw.polygon,
        })
    }

    pub fn assign(&self, pt: GeoPoint<f64>) -> Option<u64> {
        self.regions
            .iter()
            .find(|r| r.contains(pt))
            .map(|r| r.region_id)
    }

    fn meta(&self, region_id: u64) -> Option<&LookupRegion> {
        self.regions.iter().find(|r| r.region_id == region_id)
    }

    pub fn country_of(&self, region_id: u64) -> Option<&str> {
        self.meta(region_id).map(|r| r.country_code.as_str())
    }

    pub fn region_name(&self, region_id: u64) -> Option<&str> {
        self.meta(region_id).map(|r| r.name.as_str())
    }
}
