//! Numerical tolerances shared by every pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every tolerance used anywhere in the crate, passed by reference through
/// each operation so a single value controls a whole experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceProfile {
    /// Max-entry Hermiticity defect accepted by the eigensolver, relative to `1 + max|A|`.
    pub herm_tol: f64,
    /// Residual tolerance for eigendecompositions.
    pub eig_tol: f64,
    /// Singular values at or below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Eigenvalues this close to a spectral cut are placed on the upper side.
    pub tie_tol: f64,
    /// Allowed negativity when checking operator order.
    pub psd_tol: f64,
    /// Allowed negativity of the Gram spectrum in the positive-definiteness test.
    pub pd_tol: f64,
    /// Relative threshold on the Gram spectrum for the dilation rank.
    pub dilation_rank_tol: f64,
    /// Admissible unitarity / contractivity defect of input maps.
    pub map_tol: f64,
    /// Relative slack used when evaluating ledger bounds: `1e-7 * (1 + bound)`.
    pub ledger_slack: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            herm_tol: 1e-10,
            eig_tol: 1e-9,
            rank_tol: 1e-8,
            tie_tol: 1e-9,
            psd_tol: 1e-9,
            pd_tol: 1e-9,
            dilation_rank_tol: 1e-10,
            map_tol: 1e-9,
            ledger_slack: 1e-7,
        }
    }
}

impl ToleranceProfile {
    pub fn strict() -> Self {
        Self {
            herm_tol: 1e-12,
            eig_tol: 1e-11,
            ledger_slack: 1e-9,
            ..Self::default()
        }
    }

    pub fn loose() -> Self {
        Self {
            herm_tol: 1e-8,
            eig_tol: 1e-7,
            psd_tol: 1e-7,
            pd_tol: 1e-7,
            map_tol: 1e-7,
            ledger_slack: 1e-5,
            ..Self::default()
        }
    }

    /// Looks up a named profile: `default`, `strict` or `loose`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(Self::default()),
            "strict" => Ok(Self::strict()),
            "loose" => Ok(Self::loose()),
            other => Err(Error::Parse(format!("unknown tolerance profile `{other}`"))),
        }
    }

    pub fn slack_for(&self, bound: f64) -> f64 {
        self.ledger_slack * (1.0 + bound.abs())
    }
}
