//! Periodic grid, transforms, Fourier multipliers and norms.

pub mod fft;
pub mod field;
pub mod grid;
pub mod norms;
pub mod spacetime;

pub use field::{
    apply_derivative, apply_gevrey, dealias, to_physical, to_spectral, SpectralField, EXPONENT_CAP,
};
pub use grid::{make_grid, GridSpec};
pub use norms::{
    bracket, gevrey_norm, gevrey_norm_sq, l2_norm_sq, lp_norm, sobolev_norm, trust, GevreyParams,
    TrustReport,
};
pub use spacetime::{xsb_norm, SpaceTimeField, TimeWindow};
