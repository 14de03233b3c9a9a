use std::fmt;

use thiserror::Error;

/// Evaluation path used by the Mittag-Leffler evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Closed form (exponential, cosine) or the value at the origin.
    Closed,
    /// Power series around the origin.
    Series,
    /// Inverse Laplace transform collapsed onto the negative real axis plus pole residues.
    BranchCut,
    /// Large-argument expansion: pole residues plus the algebraic tail.
    Asymptotic,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Regime::Closed => "closed-form",
            Regime::Series => "series",
            Regime::BranchCut => "branch-cut integral",
            Regime::Asymptotic => "asymptotic",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("Mittag-Leffler evaluation failed in {regime} regime: {reason}")]
    Evaluation { regime: Regime, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("nonlinearity evaluation failed at t = {t}: {reason}")]
    Nonlinearity { t: f64, reason: String },

    #[error("fixed-point iteration did not converge after {} iterations (last residual {:e})", residuals.len(), residuals.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { residuals: Vec<f64> },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("refused: {0}")]
    Refused(String),
}

impl Error {
    /// True for failures caused by an iteration that ran out of budget.
    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Evaluation { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
