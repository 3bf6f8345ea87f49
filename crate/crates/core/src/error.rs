use thiserror::Error;

/// Errors raised by the exact-arithmetic pipeline.
///
/// Variants are grouped by the layer that produces them; the CLI maps each
/// group onto its own exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // number fields and embeddings
    #[error("inverse of zero (or of a zero divisor) requested")]
    ZeroInverse,
    #[error("could not certify an enclosure at {0} digits")]
    PrecisionUnreachable(u32),
    #[error("invalid number field: {0}")]
    InvalidField(String),
    #[error("root index {index} out of range for a field of degree {degree}")]
    RootIndex { index: usize, degree: usize },

    // Laurent polynomials and matrices
    #[error("evaluation of a Laurent polynomial with negative exponents at zero")]
    ZeroBase,
    #[error("supplied roots do not account for the denominator")]
    IncompleteFactorization,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    // Neumann-Zagier data
    #[error("invalid Neumann-Zagier data: {0}")]
    InvalidNzData(String),
    #[error("determinant is not divisible by (t - 1)")]
    NotDivisible,
    #[error("propagator is singular at the requested point")]
    SingularAtRoot,

    // Feynman diagrams
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("no vertex factor for degree {degree}, tetrahedron {index}")]
    MissingVertexFactor { degree: usize, index: usize },
    #[error("no component of hbar degree {0}")]
    GradeMismatch(i32),

    // roots of unity sums
    #[error("denominator vanishes at an {0}-th root of unity")]
    RootOfUnityPole(u64),
    #[error("torus sum has a pole at n = {0}")]
    PoleOnTorus(u64),
    #[error("root is resonant (lambda^2 = 1)")]
    ResonantRoot,

    // generalized power sums and reconstruction
    #[error("sequence violates its recursion at index {0}")]
    RecursionMismatch(usize),
    #[error("reconstruction system is singular")]
    SingularSystem,
    #[error("root lies on the unit circle (within {0} digits)")]
    UnitCircleRoot(u32),
    #[error("not enough values: need {needed}, got {got}")]
    NotEnoughValues { needed: usize, got: usize },

    // fixtures
    #[error("fixture {0} has no {1}")]
    MissingFixtureData(String, String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
