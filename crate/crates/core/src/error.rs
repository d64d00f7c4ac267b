//! Crate-wide error type.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the documented domain.
    Domain(&'static str),
    /// A time argument fell outside the configured horizon.
    Horizon { t: f64, horizon: f64 },
    /// Adaptive quadrature stopped above the requested tolerance.
    QuadratureNonConvergence { achieved: f64, requested: f64 },
    /// Index function violated its range on the probe grid.
    IndexRange { t: f64, value: f64 },
    /// Thinning majorant was exceeded by the true intensity.
    MajorantExceeded { t: f64, intensity: f64, majorant: f64 },
    /// Intensity unbounded (or non-finite) on a thinning sub-interval.
    UnboundedIntensity { sub_start: f64, sub_end: f64 },
    /// A sampled path never crossed the requested level.
    HorizonExhausted { level: f64, reached: f64 },
    /// Vector/grid dimensions do not match.
    DimensionMismatch { expected: usize, got: usize },
    /// Time-step too large for the stability bound.
    CflViolation { dt: f64, dt_max: f64 },
    /// Mass lost through the outflow boundary exceeded the declared budget.
    MassLoss { escaped: f64, budget: f64 },
    /// No usable tail bound for a custom family.
    NoTailBound,
    /// Probe evidence was inconclusive (e.g. oscillating limits).
    Inconclusive(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Horizon { t, horizon } => {
                write!(f, "time {t} outside configured horizon [0, {horizon}]")
            }
            Error::QuadratureNonConvergence { achieved, requested } => write!(
                f,
                "quadrature did not converge: achieved {achieved:e}, requested {requested:e}"
            ),
            Error::IndexRange { t, value } => {
                write!(f, "index out of (0,1): value {value} at t = {t}")
            }
            Error::MajorantExceeded { t, intensity, majorant } => write!(
                f,
                "thinning majorant exceeded at t = {t}: intensity {intensity} > majorant {majorant}"
            ),
            Error::UnboundedIntensity { sub_start, sub_end } => write!(
                f,
                "intensity unbounded on sub-interval [{sub_start}, {sub_end}]"
            ),
            Error::HorizonExhausted { level, reached } => write!(
                f,
                "path horizon exhausted before crossing level {level} (reached {reached})"
            ),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::CflViolation { dt, dt_max } => {
                write!(f, "CFL violation: dt = {dt:e} exceeds stability bound {dt_max:e}")
            }
            Error::MassLoss { escaped, budget } => {
                write!(f, "outflow mass {escaped} exceeded declared budget {budget}")
            }
            Error::NoTailBound => write!(f, "no tail bound available for custom family"),
            Error::Inconclusive(msg) => write!(f, "inconclusive: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
