//! Sampled checks of the standalone inequalities: the exponential lemma,
//! the ξ_med bound, the bilinear kernel integral, and trilinear/Strichartz
//! ratio studies.

pub mod inequalities;
pub mod kernel;
pub mod ratio;
pub mod rng;

pub use inequalities::{
    check_exp_lemma, check_min_pair, check_ximed, exp_lemma_ratio, ximed_sides, CheckReport,
};
pub use kernel::{kernel_i, kernel_sweep, kernel_value, KernelParams, McConfig, McEstimate};
pub use ratio::{
    product_ratio, ratio_trials, refinement_study, strichartz_ratio, trilinear_ratio, BumpField,
    FrequencyLattice, RatioForm, RatioStats, RefinementReport,
};
