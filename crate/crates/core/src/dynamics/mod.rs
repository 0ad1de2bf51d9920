//! Linear propagator, time stepping, Duhamel iteration and the continuation
//! scheduler.

pub mod continuation;
pub mod integrator;
pub mod picard;
pub mod propagator;

use serde::{Deserialize, Serialize};

pub use continuation::{
    continuation_run, ContinuationConfig, ContinuationRun, ContinuationStatus, SchedulePoint,
};
pub use integrator::{integrate, step, IntegratorConfig, Stepper, Trajectory};
pub use picard::{picard_solve, PicardSolution};
pub use propagator::{linear_propagate, nonlinear_term};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifespanParams {
    pub c0: f64,
    pub a: f64,
    pub sigma: f64,
    pub s: f64,
}

impl LifespanParams {
    pub fn new(c0: f64, a: f64, sigma: f64, s: f64) -> Result<Self> {
        if !(c0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c0 = {c0} must be positive"
            )));
        }
        if !(a > 1.0) {
            return Err(Error::InvalidParameter(format!("a = {a} must exceed 1")));
        }
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {sigma} must be nonnegative"
            )));
        }
        Ok(Self { c0, a, sigma, s })
    }
}

impl Default for LifespanParams {
    fn default() -> Self {
        Self {
            c0: 0.1,
            a: 3.0,
            sigma: 0.0,
            s: 0.0,
        }
    }
}

/// Guaranteed local existence time `c0 / (1 + ‖u0‖²)^a`.
pub fn lifespan(norm_g: f64, p: &LifespanParams) -> f64 {
    p.c0 / (1.0 + norm_g * norm_g).powf(p.a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifespan_examples() {
        let p = LifespanParams::default();
        assert_eq!(lifespan(0.0, &p), 0.1);
        assert!((lifespan(1.0, &p) - 0.0125).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let t = lifespan(i as f64 * 0.1, &p);
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn params_validated() {
        assert!(LifespanParams::new(0.0, 3.0, 0.0, 0.0).is_err());
        assert!(LifespanParams::new(0.1, 1.0, 0.0, 0.0).is_err());
        assert!(LifespanParams::new(0.1, 3.0, -1.0, 0.0).is_err());
        assert!(LifespanParams::new(0.1, 3.0, 0.2, 1.0).is_ok());
    }
}
