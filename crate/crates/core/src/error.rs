use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A documented precondition of an operation was not met.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An exponential factor left the representable range of `f64`.
    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    /// The requested point lies (numerically) on the spectrum, where the
    /// resolvent kernel is undefined.
    #[error("z = {z} is a zero of the characteristic function (|Phi| = {phi_abs:e})")]
    SpectralPoint {
        z: Complex64,
        phi_abs: f64,
        nearest: Option<Complex64>,
    },

    /// Scattering data evaluated at a point where `sin(zeta) = 0`.
    #[error("zeta = {0} is a pole of the scattering coefficients (sin zeta = 0)")]
    Pole(f64),

    /// `lambda = +-2`, where `dz/dlambda` is singular.
    #[error("lambda = {0} is a branch point of z(lambda); use z-domain derivatives")]
    BranchPoint(Complex64),

    /// The root finder could not stabilise a winding number or a Newton iterate.
    #[error("root finding failed: {0}")]
    RootFinding(String),

    /// A least-squares system was too degenerate to trust.
    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    /// Requested multiplicity exceeds the measured winding number.
    #[error("multiplicity mismatch: requested {requested}, measured winding {measured}")]
    Multiplicity { requested: usize, measured: i64 },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
