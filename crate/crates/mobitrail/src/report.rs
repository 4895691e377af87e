//! Two-cohort comparison: generate, analyze, and check the directional
//! contrasts between an everyday-activity cohort and a travel-biased one.
//!
//! Both cohorts run from the same master seed, so feeding the same profile
//! twice produces byte-identical cohorts — and an honest FAIL on the
//! strict-inequality claims.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agreement::{self, AgreementReport};
use crate::error::Result;
use crate::gyration::{self, DistributionSummary};
use crate::home::{detect_all, HomeAssignment, NightWindow};
use crate::ingest;
use crate::partition::RegionPartition;
use crate::synth::{self, ProfileConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub label: String,
    pub n_users: u64,
    pub n_events: u64,
    /// Radius of gyration, km.
    pub r_g: DistributionSummary,
    /// Events per user.
    pub activity: DistributionSummary,
    pub agreement: AgreementReport,
    pub disagreement_min: f64,
    pub disagreement_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub claim: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub users_per_cohort: u64,
    pub cohorts: Vec<CohortSummary>,
    pub claims: Vec<ClaimResult>,
}

fn analyze_cohort(
    label: &str,
    profile: &ProfileConfig,
    n_users: u64,
    partition: &RegionPartition,
    night: &NightWindow,
    seed: u64,
) -> Result<CohortSummary> {
    let (events, _truth) = synth::generate(profile, n_users, partition, seed, false)?;
    let (assigned, _) = ingest::prune(events, partition);
    let n_events = assigned.len() as u64;
    let traces = ingest::group_traces(assigned);

    let radii: Vec<f64> = traces
        .par_iter()
        .map(gyration::radius_of_gyration)
        .collect();
    let activity: Vec<f64> = traces.iter().map(|t| t.len() as f64).collect();
    let per_user: Vec<[HomeAssignment; 5]> =
        traces.par_iter().map(|t| detect_all(t, night)).collect();
    let matrix = agreement::pairwise_matrix(&per_user)?;
    let agreement = AgreementReport::from_matrix(&matrix);
    let disagreement_min = agreement
        .pairs
        .iter()
        .map(|p| p.disagreement)
        .fold(f64::INFINITY, f64::min);
    let disagreement_max = agreement
        .pairs
        .iter()
        .map(|p| p.disagreement)
        .fold(0.0f64, f64::max);

    Ok(CohortSummary {
        label: label.to_string(),
        n_users: traces.len() as u64,
        n_events,
        r_g: gyration::summarize(&radii)?,
        activity: gyration::summarize(&activity)?,
        agreement,
        disagreement_min,
        disagreement_max,
    })
}

/// Runs both cohorts and evaluates the two directional claims: the second
/// (travel-biased) cohort should spread wider, and the first should agree
/// more tightly across methods.
pub fn run_comparison(
    label_a: &str,
    profile_a: &ProfileConfig,
    label_b: &str,
    profile_b: &ProfileConfig,
    n_users: u64,
    partition: &RegionPartition,
    night: &NightWindow,
    seed: u64,
) -> Result<ComparisonReport> {
    let a = analyze_cohort(label_a, profile_a, n_users, partition, night, seed)?;
    let b = analyze_cohort(label_b, profile_b, n_users, partition, night, seed)?;

    let min_smc = |c: &CohortSummary| {
        c.agreement
            .pairs
            .iter()
            .map(|p| p.smc)
            .fold(f64::INFINITY, f64::min)
    };

    let claims = vec![
        ClaimResult {
            claim: format!("mean r_g [{label_b}] > mean r_g [{label_a}]"),
            pass: b.r_g.mean > a.r_g.mean,
            detail: format!(
                "{label_b} {:.3} km vs {label_a} {:.3} km",
                b.r_g.mean, a.r_g.mean
            ),
        },
        ClaimResult {
            claim: format!("min pairwise SMC [{label_a}] > min pairwise SMC [{label_b}]"),
            pass: min_smc(&a) > min_smc(&b),
            detail: format!("{label_a} {:.4} vs {label_b} {:.4}", min_smc(&a), min_smc(&b)),
        },
    ];

    Ok(ComparisonReport {
        seed,
        users_per_cohort: n_users,
        cohorts: vec![a, b],
        claims,
    })
}

/// Human-readable twin of the JSON report.
pub fn render_markdown(report: &ComparisonReport) -> String {
    use std::fmt::Write;
    let mut md = String::new();
    let _ = writeln!(md, "# Cohort comparison\n");
    let _ = writeln!(
        md,
        "Seed {}, {} users per cohort.\n",
        report.seed, report.users_per_cohort
    );
    for c in &report.cohorts {
        let _ = writeln!(md, "## Cohort `{}`\n", c.label);
        let _ = writeln!(
            md,
            "- users analyzed: {} ({} events)",
            c.n_users, c.n_events
        );
        let _ = writeln!(
            md,
            "- events per user: mean {:.2}, median {:.1}",
            c.activity.mean, c.activity.median
        );
        let _ = writeln!(
            md,
            "- radius of gyration (km): mean {:.3}, median {:.3}, q1 {:.3}, q3 {:.3}",
            c.r_g.mean, c.r_g.median, c.r_g.boxplot.q1, c.r_g.boxplot.q3
        );
        let _ = writeln!(
            md,
            "- method agreement over {} users: disagreement {:.2}%–{:.2}%\n",
            c.agreement.n_users,
            100.0 * c.disagreement_min,
            100.0 * c.disagreement_max
        );
        let _ = writeln!(md, "| pair | SMC | disagreement |");
        let _ = writeln!(md, "|------|-----|--------------|");
        for p in &c.agreement.pairs {
            let _ = writeln!(md, "| {} | {:.4} | {:.4} |", p.pair, p.smc, p.disagreement);
        }
        let _ = writeln!(md);
    }
    let _ = writeln!(md, "## Directional claims\n");
    for claim in &report.claims {
        let _ = writeln!(
            md,
            "- {}: {} ({})",
            if claim.pass { "PASS" } else { "FAIL" },
            claim.claim,
            claim.detail
        );
    }
    md
}
