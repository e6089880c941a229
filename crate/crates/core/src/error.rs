use thiserror::Error;

use crate::model::ValidationError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Invalid(#[from] ValidationError),

    #[error("center weight of {0} is zero, cannot normalize")]
    ZeroCenterWeight(&'static str),

    #[error("operation requires the nearest-neighbor offset set {{-1, 0, 1}}")]
    NotNearestNeighbor,

    #[error("mode {m}: both roots are real and distinct, branch labeling undefined")]
    DegenerateBranches { m: i64 },

    #[error("series constant a = {a} is not positive")]
    NonpositiveA { a: f64 },

    #[error("first position moment I_x1 = {i_x1} is nonzero, eigenvalues are not analytic in m*theta")]
    NonzeroFirstMoment { i_x1: f64 },

    #[error("point set is empty")]
    EmptySet,

    #[error("dense eigensolve of N = {n} exceeds the cap N <= {max}")]
    TooLarge { n: usize, max: usize },

    #[error("mode index m = 0 is not allowed here")]
    ZeroMode,

    #[error("mode index {m} is outside the symmetric range for N = {n}")]
    ModeOutOfRange { m: i64, n: usize },

    #[error("parameters pass the stability gate, no instability witness exists")]
    GateWouldPass,

    #[error("parameters are not asymptotically stable for all N")]
    UnstableParams,

    #[error("parameters are not normalized (rho_x[0] = {rho_x0}, rho_v[0] = {rho_v0})")]
    NotNormalized { rho_x0: f64, rho_v0: f64 },

    #[error("mode {m}: the two branches coincide, modal decomposition needs a Jordan basis")]
    DegenerateMode { m: i64 },

    #[error("bad exponents: {0}")]
    BadExponents(String),

    #[error("all modal coefficients vanish, no decay bound can be fitted")]
    NoDecayFit,

    #[error("time windows [N/|c_-|, K N/|c_-|] and [N/c_+, K N/c_+] do not intersect")]
    EmptyTimeWindow,

    #[error("sample time {t} lies outside the admissible window [{lo}, {hi}]")]
    TimeOutsideWindow { t: f64, lo: f64, hi: f64 },

    #[error("expected an array of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("time step {dt} exceeds the explicit-scheme limit {max}")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("state became non-finite at t = {t}")]
    NonfiniteState { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
