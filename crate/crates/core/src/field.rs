//! Black-box spacetime fields, the only interface between the solution
//! families and the residual verifier.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl SamplePoint {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        SamplePoint { t, x, y }
    }

    pub fn r(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Density, velocity and (for self-gravitating families) the radial
/// derivative of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub rho: f64,
    pub u1: f64,
    pub u2: f64,
    pub phi_r: Option<f64>,
}

pub trait Field {
    fn sample(&self, p: SamplePoint) -> Result<FieldSample>;
}

impl<F> Field for F
where
    F: Fn(SamplePoint) -> Result<FieldSample>,
{
    fn sample(&self, p: SamplePoint) -> Result<FieldSample> {
        self(p)
    }
}
