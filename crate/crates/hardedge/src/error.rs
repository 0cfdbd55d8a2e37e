use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Gamma evaluated at a non-positive integer.
    Pole(f64),
    /// Argument outside the documented domain.
    Domain(&'static str),
    /// Series ran out of terms before meeting its tolerance.
    NonConvergence { what: &'static str, terms: usize },
    /// LU pivot vanished to working precision.
    Singular,
    /// `M = 2` kernel requested with `nu2 - nu1` (near) integer.
    NonGeneric(f64),
    /// Adaptive integrator could not make progress.
    StepUnderflow { s: f64 },
    /// Integration exceeded its step budget.
    TooManySteps { s: f64 },
    /// A monitored first integral blew past its threshold.
    IntegralDrift { index: usize, value: f64 },
    /// Negative value under the radical `F`.
    NegativeRadicand(f64),
    /// Least-squares design matrix is rank deficient.
    Degenerate,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Pole(x) => write!(f, "gamma pole at {x}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::NonConvergence { what, terms } => {
                write!(f, "{what} did not converge in {terms} terms")
            }
            Error::Singular => write!(f, "matrix singular to working precision"),
            Error::NonGeneric(d) => write!(f, "nu2 - nu1 = {d} is (near) an integer"),
            Error::StepUnderflow { s } => write!(f, "step size underflow at s = {s}"),
            Error::TooManySteps { s } => write!(f, "step budget exhausted at s = {s}"),
            Error::IntegralDrift { index, value } => {
                write!(f, "first integral #{index} drifted to {value:e}")
            }
            Error::NegativeRadicand(v) => write!(f, "F^2 = {v:e} is negative"),
            Error::Degenerate => write!(f, "degenerate design matrix"),
        }
    }
}

impl core::error::Error for Error {}
