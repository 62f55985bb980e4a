use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Each variant names the invariant or precondition that was violated so the
/// command-line front end can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: entry ({row},{col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },

    #[error("form is not positive definite: leading principal minor of order {minor} is not positive")]
    NotPositiveDefinite { minor: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("could not parse number {0:?}")]
    Parse(String),

    #[error("covering radius tolerance not reached within budget: bounds [{lower}, {upper}]")]
    ToleranceNotReached { lower: f64, upper: f64 },

    #[error("singular matrix")]
    Singular,

    #[error("not a symplectic matrix")]
    NotSymplectic,

    #[error("non-convergent entry {what}: exponent {exponent} is positive")]
    NonConvergent { what: String, exponent: String },

    #[error("Siegel ordering violated at index {index}: {detail}")]
    OrderingViolated { index: usize, detail: String },

    #[error("no subsequence classified: {0}")]
    NotClassified(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("tropical Jacobian of a tree is a point")]
    TreeGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("no collapse: the central fiber is smooth and the limit is a Riemann surface")]
    NoCollapse,

    #[error("nontrivial Raynaud extension is not supported; only the trivial extension is handled")]
    NontrivialRaynaud,

    #[error("limit is a nontrivial product: maximal divergence exponent {0} is attained by several blocks")]
    TiedDivergence(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("path does not approach the boundary: all exponents vanish")]
    NotOnBoundary,

    #[error("support {0:?} is not a stratum")]
    NotAStratum(Vec<usize>),

    #[error("invalid incidence data: {0}")]
    InvalidIncidence(String),

    #[error("permutation {0:?} does not preserve the strata")]
    NotStrataPreserving(Vec<usize>),

    #[error("source divisor {0} lies in the support but its column of the monomial matrix vanishes")]
    ZeroColumn(usize),

    #[error("zero coordinate in point {0}")]
    ZeroCoordinate(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
