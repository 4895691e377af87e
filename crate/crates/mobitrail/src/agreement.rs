//! Inter-method agreement: the Simple Matching Coefficient between home
//! assignments and the 5×5 pairwise matrix.
//!
//! The comparison population is the intersection: users holding a region
//! under all five methods. That keeps a single `n` across all ten pairs.
//! Tie-broken winners count like any other result; the `tied` flag is
//! reported elsewhere.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::home::{HomeAssignment, MethodId};
use crate::trace::UserId;

/// One method's region per user, over some common user set.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentVector {
    pub method: MethodId,
    pub entries: BTreeMap<UserId, u64>,
}

/// Fraction of users assigned the same region by both methods.
pub fn smc(x: &AssignmentVector, y: &AssignmentVector) -> Result<f64> {
    if x.entries.is_empty() {
        return Err(Error::EmptyInput("assignment vectors"));
    }
    if x.entries.len() != y.entries.len()
        || !x.entries.keys().eq(y.entries.keys())
    {
        return Err(Error::UserSetMismatch);
    }
    let matches = x
        .entries
        .iter()
        .zip(y.entries.values())
        .filter(|((_, rx), ry)| rx == ry)
        .count();
    Ok(matches as f64 / x.entries.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    /// `smc[i][j]` compares method i+1 with method j+1: symmetric, unit
    /// diagonal, entries in [0, 1].
    pub smc: [[f64; 5]; 5],
    pub n_users: u64,
}

impl AgreementMatrix {
    /// Smallest agreement between two distinct methods.
    pub fn min_off_diagonal(&self) -> f64 {
        self.off_diagonal().fold(f64::INFINITY, f64::min)
    }

    /// Largest disagreement rate (1 − SMC) between two distinct methods.
    pub fn max_disagreement(&self) -> f64 {
        self.off_diagonal().map(|v| 1.0 - v).fold(0.0, f64::max)
    }

    fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..5).flat_map(move |i| ((i + 1)..5).map(move |j| self.smc[i][j]))
    }
}

/// Builds the pairwise matrix from each user's five assignments. Users
/// missing any method's region drop out; an empty remainder is an error.
pub fn pairwise_matrix(per_user: &[[HomeAssignment; 5]]) -> Result<AgreementMatrix> {
    let vectors = assignment_vectors(per_user);
    let n = vectors[0].entries.len();
    if n == 0 {
        return Err(Error::EmptyInput("no user has results under all five methods"));
    }
    let mut smc_matrix = [[1.0f64; 5]; 5];
    for i in 0..5 {
        for j in (i + 1)..5 {
            let value = smc(&vectors[i], &vectors[j])?;
            smc_matrix[i][j] = value;
            smc_matrix[j][i] = value;
        }
    }
    Ok(AgreementMatrix {
        smc: smc_matrix,
        n_users: n as u64,
    })
}

/// Splits complete per-user assignments into five per-method vectors over
/// the common (all-methods-resolved) user set.
pub fn assignment_vectors(per_user: &[[HomeAssignment; 5]]) -> [AssignmentVector; 5] {
    let mut vectors = MethodId::ALL.map(|m| AssignmentVector {
        method: m,
        entries: BTreeMap::new(),
    });
    for assignments in per_user {
        if assignments.iter().any(|a| a.region_id.is_none()) {
            continue;
        }
        for a in assignments {
            vectors[a.method.index()]
                .entries
                .insert(a.user_id.clone(), a.region_id.expect("checked above"));
        }
    }
    vectors
}

/// The ten method pairs in fixed radar order with their SMC values.
pub fn radar_export(m: &AgreementMatrix) -> Vec<(String, f64)> {
    let mut out = Vec::with_capacity(10);
    for i in 0..5 {
        for j in (i + 1)..5 {
            out.push((format!("{}-{}", i + 1, j + 1), m.smc[i][j]));
        }
    }
    out
}

/// JSON payload: the matrix plus per-pair agreement and disagreement rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n_users: u64,
    pub matrix: [[f64; 5]; 5],
    pub pairs: Vec<PairAgreement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairAgreement {
    pub pair: String,
    pub smc: f64,
    pub disagreement: f64,
}

impl AgreementReport {
    pub fn from_matrix(m: &AgreementMatrix) -> Self {
        AgreementReport {
            n_users: m.n_users,
            matrix: m.smc,
            pairs: radar_export(m)
                .into_iter()
                .map(|(pair, smc)| PairAgreement {
                    pair,
                    smc,
                    disagreement: 1.0 - smc,
                })
                .collect(),
        }
    }
}

/// Radar CSV: `pair,value` rows in fixed pair order, value = SMC.
pub fn write_radar_csv<W: Write + ?Sized>(w: &mut W, m: &AgreementMatrix) -> io::Result<()> {
    writeln!(w, "pair,value")?;
    for (pair, value) in radar_export(m) {
        writeln!(w, "{pair},{value}")?;
    }
    Ok(())
}
