//! Distribution summaries: ECDF, quartile boxplot statistics, mean and
//! median.
//!
//! Everything here works on plain value slices so it applies equally to
//! radii of gyration, activity counts, or anything else downstream wants to
//! summarize.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Right-continuous empirical CDF over the distinct values of a sample:
/// `cumulative_fraction[i]` is the fraction of observations ≤
/// `sorted_values[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcdfSeries<T> {
    pub sorted_values: Vec<T>,
    pub cumulative_fraction: Vec<T>,
}

pub fn ecdf<T: Real>(values: &[T]) -> Result<EcdfSeries<T>> {
    let sorted = sorted_copy(values, "ecdf input")?;
    let n = real::<T>(sorted.len() as f64);
    let mut sorted_values = Vec::new();
    let mut cumulative_fraction = Vec::new();
    for (i, &v) in sorted.iter().enumerate() {
        // Last occurrence of each distinct value carries its cumulative count.
        if i + 1 == sorted.len() || sorted[i + 1] > v {
            sorted_values.push(v);
            cumulative_fraction.push(real::<T>((i + 1) as f64) / n);
        }
    }
    Ok(EcdfSeries {
        sorted_values,
        cumulative_fraction,
    })
}

/// Five-number boxplot summary plus the arithmetic mean.
///
/// Quartiles interpolate linearly between order statistics (position
/// `h = (n−1)·p`). Whiskers sit on the most extreme data within 1.5·IQR of
/// the box, and are pulled back to the box edge if no data falls beyond it,
/// so `whisker_low ≤ q1` and `q3 ≤ whisker_high` always hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats<T> {
    pub whisker_low: T,
    pub q1: T,
    pub median: T,
    pub q3: T,
    pub whisker_high: T,
    pub mean: T,
}

pub fn boxplot_stats<T: Real>(values: &[T]) -> Result<BoxplotStats<T>> {
    let sorted = sorted_copy(values, "boxplot input")?;
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let reach = real::<T>(1.5) * (q3 - q1);
    let lo_fence = q1 - reach;
    let hi_fence = q3 + reach;
    let whisker_low = sorted
        .iter()
        .copied()
        .find(|&v| v >= lo_fence)
        .map(|v| v.min(q1))
        .unwrap_or(q1);
    let whisker_high = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= hi_fence)
        .map(|v| v.max(q3))
        .unwrap_or(q3);
    Ok(BoxplotStats {
        whisker_low,
        q1,
        median,
        q3,
        whisker_high,
        mean: mean(values)?,
    })
}

pub fn mean<T: Real>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyInput("mean input"));
    }
    reject_nan(values)?;
    let total = crate::geo::pairwise_sum_by(values, |v| *v);
    Ok(total / real::<T>(values.len() as f64))
}

pub fn median<T: Real>(values: &[T]) -> Result<T> {
    let sorted = sorted_copy(values, "median input")?;
    Ok(quantile_sorted(&sorted, 0.5))
}

/// Linear-interpolation quantile on an ascending slice: `h = (n−1)·p`,
/// value = `v[⌊h⌋] + (h − ⌊h⌋)·(v[⌊h⌋+1] − v[⌊h⌋])`.
fn quantile_sorted<T: Real>(sorted: &[T], p: f64) -> T {
    let h = (sorted.len() as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let frac = real::<T>(h - h.floor());
    if lo + 1 >= sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

fn sorted_copy<T: Real>(values: &[T], what: &'static str) -> Result<Vec<T>> {
    if values.is_empty() {
        return Err(Error::EmptyInput(what));
    }
    reject_nan(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN rejected above"));
    Ok(sorted)
}

fn reject_nan<T: Real>(values: &[T]) -> Result<()> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in statistics input".into()));
    }
    Ok(())
}
