//! Per-user mobility spread: center of mass and radius of gyration, plus
//! the distribution summary emitted alongside per-user results.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geo::{self, GeoPoint};
use crate::stats::{self, BoxplotStats, EcdfSeries};
use crate::trace::{UserId, UserTrace};

#[derive(Clone, Debug, PartialEq)]
pub struct GyrationResult {
    pub user_id: UserId,
    pub center_of_mass: GeoPoint<f64>,
    pub r_g_km: f64,
    pub n_events: u64,
}

/// Mean position of the trace: spherical centroid of per-event unit
/// vectors, so every event weighs equally. A single-event trace returns its
/// point exactly. The (vanishingly rare) antipodal case where the vector
/// mean collapses to zero falls back to the first event's point and logs.
pub fn center_of_mass(trace: &UserTrace) -> GeoPoint<f64> {
    let points: Vec<GeoPoint<f64>> = trace.events().iter().map(|e| e.point).collect();
    let centroid = geo::spherical_centroid(&points);
    if centroid.degenerate {
        log::warn!(
            "degenerate center of mass for user {}: antipodal mass, using first event",
            trace.user_id()
        );
    }
    centroid.point
}

/// Root-mean-square great-circle distance of the trace's events from its
/// center of mass, in km. Zero iff every event sits on one point.
pub fn radius_of_gyration(trace: &UserTrace) -> f64 {
    r_g_about(trace, center_of_mass(trace))
}

/// Computes both quantities with a single centroid pass.
pub fn gyration_result(trace: &UserTrace) -> GyrationResult {
    let com = center_of_mass(trace);
    GyrationResult {
        user_id: trace.user_id().clone(),
        center_of_mass: com,
        r_g_km: r_g_about(trace, com),
        n_events: trace.len() as u64,
    }
}

fn r_g_about(trace: &UserTrace, com: GeoPoint<f64>) -> f64 {
    if trace.len() == 1 {
        return 0.0;
    }
    let mean_sq = geo::pairwise_sum_by(trace.events(), |e| {
        let d = geo::haversine_km(e.point, com);
        d * d
    }) / trace.len() as f64;
    mean_sq.sqrt()
}

/// Distribution payload for a batch of values (radii, activity counts, …):
/// the full ECDF plus boxplot stats, mean and median.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub n: u64,
    pub mean: f64,
    pub median: f64,
    pub boxplot: BoxplotStats<f64>,
    pub ecdf: EcdfSeries<f64>,
}

pub fn summarize(values: &[f64]) -> Result<DistributionSummary> {
    Ok(DistributionSummary {
        n: values.len() as u64,
        mean: stats::mean(values)?,
        median: stats::median(values)?,
        boxplot: stats::boxplot_stats(values)?,
        ecdf: stats::ecdf(values)?,
    })
}

/// Per-user results as CSV: `user_id,com_lat,com_lon,r_g_km,n_events`.
pub fn write_results_csv<W: Write + ?Sized>(w: &mut W, results: &[GyrationResult]) -> io::Result<()> {
    writeln!(w, "user_id,com_lat,com_lon,r_g_km,n_events")?;
    let mut buf = String::new();
    for r in results {
        writeln!(
            w,
            "{},{},{},{},{}",
            crate::ingest::csv_escape(r.user_id.as_str(), &mut buf),
            r.center_of_mass.lat_deg(),
            r.center_of_mass.lon_deg(),
            r.r_g_km,
            r.n_events
        )?;
    }
    Ok(())
}
