//! Geographic primitives: points on the sphere, great-circle distance and
//! spherical centroids.
//!
//! All distances use a spherical Earth with radius [`EARTH_RADIUS_KM`].

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Mean Earth radius in kilometres, shared by every distance computation.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// A point on the sphere in decimal degrees.
///
/// Invariants: `lat_deg` in `[-90, +90]`, `lon_deg` in `[-180, +180)`.
/// A longitude of exactly `+180` is normalized to `-180` on construction.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GeoPoint<T: Real> {
    lat_deg: T,
    lon_deg: T,
}

impl<T: Real> GeoPoint<T> {
    pub fn new(lat_deg: T, lon_deg: T) -> Result<Self> {
        let lon_deg = if lon_deg == real::<T>(180.0) {
            real::<T>(-180.0)
        } else {
            lon_deg
        };
        let lat_ok = lat_deg >= real::<T>(-90.0) && lat_deg <= real::<T>(90.0);
        let lon_ok = lon_deg >= real::<T>(-180.0) && lon_deg < real::<T>(180.0);
        if lat_ok && lon_ok {
            Ok(GeoPoint { lat_deg, lon_deg })
        } else {
            Err(Error::InvalidCoordinate {
                lat: lat_deg.as_f64(),
                lon: lon_deg.as_f64(),
            })
        }
    }

    /// Builds a point from possibly out-of-range math results, clamping
    /// latitude and wrapping longitude into the valid domain. In-range
    /// longitudes pass through bit-exactly; out-of-range ones wrap with a
    /// single modulo (not repeated subtraction), so arbitrarily large
    /// inputs cost the same as small ones.
    pub(crate) fn wrapped(lat_deg: T, lon_deg: T) -> Self {
        let lat = lat_deg.max(real(-90.0)).min(real(90.0));
        let full = real::<T>(360.0);
        let half = real::<T>(180.0);
        let lon = if -half <= lon_deg && lon_deg < half {
            lon_deg
        } else {
            let mut rem = (lon_deg + half) % full;
            if rem < T::zero() {
                rem = rem + full;
            }
            // The shift by 180 can round the remainder onto the wrap point
            // itself; fold that back to the canonical -180 edge.
            let wrapped = rem - half;
            if wrapped >= half { -half } else { wrapped }
        };
        GeoPoint {
            lat_deg: lat,
            lon_deg: lon,
        }
    }

    pub fn lat_deg(&self) -> T {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> T {
        self.lon_deg
    }
}

/// Great-circle distance in kilometres (haversine formula).
///
/// Symmetric bit-for-bit in its arguments; zero for identical points; never
/// exceeds `PI * EARTH_RADIUS_KM`.
pub fn haversine_km<T: Real>(a: GeoPoint<T>, b: GeoPoint<T>) -> T {
    let two = real::<T>(2.0);
    let lat1 = a.lat_deg.to_radians();
    let lat2 = b.lat_deg.to_radians();
    // Absolute differences keep the expression symmetric regardless of how
    // the platform libm treats signed zero.
    let dlat = (a.lat_deg - b.lat_deg).abs().to_radians();
    let dlon = (a.lon_deg - b.lon_deg).abs().to_radians();

    let sin_dlat = (dlat / two).sin();
    let sin_dlon = (dlon / two).sin();
    let h = sin_dlat * sin_dlat + lat1.cos() * lat2.cos() * sin_dlon * sin_dlon;
    let h = h.max(T::zero()).min(T::one());
    let central = two * h.sqrt().atan2((T::one() - h).sqrt());
    real::<T>(EARTH_RADIUS_KM) * central
}

/// Cartesian unit vector of a point (x toward lon 0, z toward the north pole).
pub(crate) fn unit_vector<T: Real>(p: GeoPoint<T>) -> [T; 3] {
    let lat = p.lat_deg.to_radians();
    let lon = p.lon_deg.to_radians();
    [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()]
}

/// Outcome of a spherical centroid computation.
pub(crate) struct Centroid<T: Real> {
    pub point: GeoPoint<T>,
    /// True when the Cartesian mean had norm < 1e-12 (antipodal mass); the
    /// returned point is then the first input point.
    pub degenerate: bool,
}

/// Spherical centroid of a set of points with equal per-point weights:
/// the normalized mean of their unit vectors, which minimizes the sum of
/// squared chord distances. A single point is returned unchanged.
pub(crate) fn spherical_centroid<T: Real>(points: &[GeoPoint<T>]) -> Centroid<T> {
    assert!(!points.is_empty(), "centroid of empty point set");
    if points.len() == 1 {
        return Centroid {
            point: points[0],
            degenerate: false,
        };
    }
    let n = real::<T>(points.len() as f64);
    let x = pairwise_sum_by(points, |p| unit_vector(*p)[0]) / n;
    let y = pairwise_sum_by(points, |p| unit_vector(*p)[1]) / n;
    let z = pairwise_sum_by(points, |p| unit_vector(*p)[2]) / n;
    let norm = (x * x + y * y + z * z).sqrt();
    if norm < real(1e-12) {
        return Centroid {
            point: points[0],
            degenerate: true,
        };
    }
    let lat = z.atan2((x * x + y * y).sqrt()).to_degrees();
    let lon = y.atan2(x).to_degrees();
    Centroid {
        point: GeoPoint::wrapped(lat, lon),
        degenerate: false,
    }
}

/// Deterministic pairwise (tree) summation of `f(item)` over a slice.
/// Error grows O(log n) instead of O(n) and the result depends only on the
/// slice order, so canonically sorted inputs reproduce bit-for-bit.
pub(crate) fn pairwise_sum_by<E, T, F>(items: &[E], f: F) -> T
where
    T: Real,
    F: Fn(&E) -> T + Copy,
{
    if items.len() <= 16 {
        return items.iter().fold(T::zero(), |acc, e| acc + f(e));
    }
    let mid = items.len() / 2;
    pairwise_sum_by(&items[..mid], f) + pairwise_sum_by(&items[mid..], f)
}
