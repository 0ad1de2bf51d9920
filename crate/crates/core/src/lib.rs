//! Spectral tools for tracking the analyticity radius of dispersive waves:
//! periodic Fourier fields and Gevrey norms, an integrating-factor RK4
//! solver for mKdV and third-order NLS, almost-conserved functionals,
//! radius estimation, inequality checks and an experiment driver.

pub mod diagnostics;
pub mod dynamics;
pub mod equation;
pub mod error;
pub mod estimates;
pub mod experiments;
pub mod spectral;

pub use equation::{phase_symbol, EquationSpec};
pub use error::{Error, Result};
