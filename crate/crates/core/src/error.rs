use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("unsupported dimension {0} (kernel supports 1..=8)")]
    UnsupportedDimension(usize),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("derivative is not traceless (trace {0:e})")]
    NotTraceless(f64),

    #[error("operation needs a mixed model")]
    NotMixed,

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("Bloch vector outside the unit ball (norm {0})")]
    BlochOutOfBall(f64),

    #[error("weight w(theta) = {0} outside (0,1) or equal to 1/2")]
    WeightOutOfRange(f64),

    #[error("pure part is stationary at theta (I1 = {0:e})")]
    StationaryModel(f64),

    #[error("state is not pure (second eigenvalue {0:e})")]
    NotPure(f64),

    #[error("derivative has a component of norm {0:e} on the kernel of rho; the SLD equation has no solution")]
    UnsupportedOnKernel(f64),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("axis is not a unit vector (norm {0})")]
    NotUnitAxis(f64),

    #[error("POVM normalizer is singular after {0} attempts")]
    SingularNormalizer(usize),

    #[error("outcome probability {0:e} is too small")]
    ZeroProbability(f64),

    #[error("degenerate denominator ({0:e}) in proportionality constant")]
    DegenerateDenominator(f64),

    #[error("theta grid needs at least {needed} distinct points, got {got}")]
    GridTooSmall { needed: usize, got: usize },

    #[error("likelihood is flat over the search interval (range {0:e})")]
    FlatLikelihood(f64),

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),
}

impl Error {
    /// Stable variant name, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::NonFinite => "NonFinite",
            Error::NotHermitian(_) => "NotHermitian",
            Error::NotPsd(_) => "NotPsd",
            Error::NotTraceless(_) => "NotTraceless",
            Error::NotMixed => "NotMixed",
            Error::NotDensityMatrix(_) => "NotDensityMatrix",
            Error::BlochOutOfBall(_) => "BlochOutOfBall",
            Error::WeightOutOfRange(_) => "WeightOutOfRange",
            Error::StationaryModel(_) => "StationaryModel",
            Error::NotPure(_) => "NotPure",
            Error::UnsupportedOnKernel(_) => "UnsupportedOnKernel",
            Error::InvalidPovm(_) => "InvalidPovm",
            Error::NotUnitAxis(_) => "NotUnitAxis",
            Error::SingularNormalizer(_) => "SingularNormalizer",
            Error::ZeroProbability(_) => "ZeroProbability",
            Error::DegenerateDenominator(_) => "DegenerateDenominator",
            Error::GridTooSmall { .. } => "GridTooSmall",
            Error::FlatLikelihood(_) => "FlatLikelihood",
            Error::InvalidExperiment(_) => "InvalidExperiment",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
