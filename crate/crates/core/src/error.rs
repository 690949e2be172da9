use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("grid under-resolves the comb teeth: need at least {required_n} samples")]
    Resolution { required_n: usize },
    #[error("frequency {omega} lies outside the comb band |ω| < 1/2")]
    OutOfBand { omega: f64 },
    #[error("frequency {omega} sits on a side-line pole")]
    Pole { omega: f64 },
    #[error("argument outside the function domain: {0}")]
    Domain(String),
    #[error("signal energy outside the grid is {outside:.3e} (more than 1%)")]
    Coverage { outside: f64 },
    #[error("sampling contract violated: {0}")]
    Sampling(String),
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),
    #[error("no convergence after {iterations} iterations (best objective {best_objective:.3e} at {best:?})")]
    Convergence {
        iterations: usize,
        best: Vec<f64>,
        best_objective: f64,
    },
    #[error("time step too large for stable integration: {0}")]
    Stability(String),
    #[error("retrieval protocol error: {0}")]
    Protocol(String),
}

/// Non-fatal conditions attached to results. The CLI can escalate these with `--strict`.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `b/δ` or `δ/Δ_in` exceeds the 0.2 separation threshold.
    CombRatio { name: &'static str, ratio: f64 },
    /// The profile does not decay to 1e-6 of its peak at the grid edges.
    EdgeTruncation { edge_ratio: f64 },
    /// Side-line absorption at the comb center is not negligible.
    ResidualAbsorption { ratio: f64 },
    /// Side lines are too broad compared with their distance to the band edge.
    SideLineWidth { omega: f64, gap: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::CombRatio { name, ratio } => {
                write!(f, "comb ratio {name} = {ratio:.3} exceeds 0.2")
            }
            Warning::EdgeTruncation { edge_ratio } => {
                write!(f, "profile at grid edge is {edge_ratio:.3e} of its peak (> 1e-6)")
            }
            Warning::ResidualAbsorption { ratio } => {
                write!(f, "residual side-line absorption ratio {ratio:.4} exceeds 0.1")
            }
            Warning::SideLineWidth { omega, gap } => {
                write!(f, "side-line half width {omega} is not small against Δ_o − Δ_in = {gap:.4}")
            }
        }
    }
}
