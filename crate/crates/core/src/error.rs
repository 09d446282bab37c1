use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is at the origin, where the fields are singular")]
    ZeroPoint,
    #[error("radius must be positive")]
    ZeroRadius,
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("operator evaluated too close to the polar axis (sin phi = {sin_phi:e})")]
    AxisSingularity { sin_phi: f64 },
    #[error("finite-difference stencil of step {step:e} reaches the origin from |x| = {radius:e}")]
    StencilHitsOrigin { radius: f64, step: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("field triple has no pressure")]
    MissingPressure,
    #[error("quadrature rule radius {rule} does not match requested radius {requested}")]
    QuadratureMismatch { rule: f64, requested: f64 },
    #[error("test field is not divergence-free (max |div| = {max_div:e})")]
    TestFieldNotDivergenceFree { max_div: f64 },
    #[error("linear solver failure: {0}")]
    SolverFailure(String),
    #[error("iteration is not contracting: ratio >= 1 for {consecutive} consecutive steps (last ratio {last_ratio:.4})")]
    NotContracting { consecutive: usize, last_ratio: f64 },
    #[error("evaluation at |x| = {radius} lies outside the source domain of radius {domain}")]
    DomainExceeded { radius: f64, domain: f64 },
    #[error("field vanishes identically on the sphere of radius {radius}")]
    NonPositiveValues { radius: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
