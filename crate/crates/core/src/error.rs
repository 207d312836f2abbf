use num_complex::Complex64;
use thiserror::Error;

/// Location of an eigenpair inside a graded spectrum: `(degree, index in that degree)`.
pub type PairLocation = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spectrum: {field}: {reason}")]
    InvalidSpectrum { field: String, reason: String },

    #[error("invalid scenario: {field}: {reason}")]
    InvalidScenario { field: String, reason: String },

    #[error("sigma = {sigma} outside the domain of convergence ({requirement})")]
    Domain { sigma: Complex64, requirement: String },

    #[error("{what} = {value} outside the domain ({requirement})")]
    DomainValue { what: String, value: f64, requirement: String },

    #[error("pole: factor vanishes at degree {}, pair {}", .location.0, .location.1)]
    Pole { location: PairLocation },

    #[error("branch cut: base {base} lies on the non-positive real axis at degree {}, pair {}", .location.0, .location.1)]
    Branch { location: PairLocation, base: Complex64 },

    #[error("branch cut: {what} = {value} lies on the non-positive real axis")]
    BranchValue { what: String, value: Complex64 },

    #[error("spectrum is not acyclic: {} eigenpair(s) with mu_T = 1 (first at degree {}, pair {})", .offenders.len(), .offenders[0].0, .offenders[0].1)]
    NotAcyclic { offenders: Vec<PairLocation> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate fixed point of g^-1 T^{n}: {detail}")]
    Degenerate { n: i64, detail: String },

    #[error("point {point} is not periodic under T")]
    Aperiodic { point: String },

    #[error("unknown point id {0}")]
    UnknownPoint(String),

    #[error("unsupported cutoff profile for this scenario: {0}")]
    UnsupportedCutoff(String),

    #[error("scenario kind {kind} does not support {operation}")]
    WrongKind { kind: &'static str, operation: &'static str },

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds {limit:e} ({detail})")]
    Accuracy { estimate: f64, limit: f64, detail: String },

    #[error("{0}")]
    Parse(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
