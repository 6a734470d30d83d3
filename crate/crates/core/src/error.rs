use thiserror::Error;

use crate::emden::OrbitClass;
use crate::ode::OdeError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context}: {source}")]
    Ode {
        context: &'static str,
        #[source]
        source: OdeError,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("orbit is not periodic (classified {0:?})")]
    NotPeriodic(OrbitClass),
    #[error("{what} = {value} outside solved range [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("profile has no first zero and r/a = {s} exceeds the solved grid")]
    NoCompactSupport { s: f64 },
    #[error("negative base {0} raised to a non-integer power")]
    NonRealPower(f64),
    #[error("point (t = {t}, r = {r}) is outside the region of validity")]
    OutsideRegion { t: f64, r: f64 },
    #[error("stencil around (t = {t}, x = {x}, y = {y}) leaves the field domain: {reason}")]
    StencilOutOfDomain {
        t: f64,
        x: f64,
        y: f64,
        reason: String,
    },
    #[error("isothermal momentum residual needs the radial gravity, but the field provides none")]
    MissingGravity,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) trait OdeContext<T> {
    fn context(self, context: &'static str) -> Result<T>;
}

impl<T> OdeContext<T> for std::result::Result<T, OdeError> {
    fn context(self, context: &'static str) -> Result<T> {
        self.map_err(|source| Error::Ode { context, source })
    }
}
