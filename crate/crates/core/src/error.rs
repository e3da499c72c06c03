use thiserror::Error;

use crate::solve::SolveReport;

/// Every failure the library reports.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("beta = {beta} must lie in (alpha+1, alpha+2] = ({lo}, {hi}]")]
    BetaOutOfRange { beta: f64, lo: f64, hi: f64 },
    #[error("alpha = {0} must exceed -1")]
    AlphaOutOfRange(f64),
    #[error("ellipticity constants must satisfy 0 < a <= A (a = {a}, A = {big_a})")]
    BadEllipticity { a: f64, big_a: f64 },
    #[error("lambda = {0} must be nonnegative")]
    NegativeLambda(f64),
    #[error("trace operator needs a = A (a = {a}, A = {big_a})")]
    TraceNeedsEqualConstants { a: f64, big_a: f64 },
    #[error("gradient vanishes where alpha < 0 and F != 0")]
    SingularGradient,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid forcing: {0}")]
    InvalidForcing(String),
    #[error("point {0} lies outside the domain")]
    OutsideDomain(f64),
    #[error("barrier prefactor is not set")]
    UnsetPrefactor,
    #[error("invalid barrier parameters: {0}")]
    InvalidBarrier(String),
    #[error("check region contains no grid points")]
    RegionEmpty,
    #[error("grid needs at least 16 nodes, got {0}")]
    GridTooCoarse(usize),
    #[error("singular forcing evaluated on the boundary at x = {0}")]
    SingularForcingAtNode(f64),
    #[error("boundary record disagrees with nodal values")]
    BoundaryMismatch,
    #[error("solver did not converge: {0}")]
    NotConverged(Box<SolveReport>),
    #[error("non-finite value encountered in the solver")]
    NaNDetected,
    #[error("R ladder did not settle after {rungs} rungs (last interior change {last_delta:e})")]
    LadderNotSettled { rungs: usize, last_delta: f64 },
    #[error("lambda ladder is unstable: {0}")]
    LadderUnstable(String),
    #[error("this path requires {0}")]
    Precondition(String),
    #[error("fit window holds {0} nodes, need at least 4")]
    WindowTooNarrow(usize),
    #[error("comparison hypotheses not met: {0}")]
    HypothesisUnmet(String),
}

pub type Result<T> = std::result::Result<T, Error>;
