//! Conserved and almost-conserved functionals, radius estimation and drift
//! sweeps.

pub mod drift;
pub mod functionals;
pub mod radius;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use drift::{
    bound_factor, default_exponent, drift_sweep, drift_sweep_with, DriftReport, DriftRow,
};
pub use functionals::{
    almost_conserved, commutator_residual, conserved_anchor, energy_mkdv, energy_quadratic,
    gevrey_energy, gevrey_mass, mass, tnls_mass, tnls_momentum,
};
pub use radius::{estimate_radius, RadiusFit, NOISE_FLOOR};

use crate::dynamics::Trajectory;
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm, trust, SpectralField};

/// Which functionals to evaluate per sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSchedule {
    pub sigmas: Vec<f64>,
    pub sobolev: Vec<f64>,
    pub noise_floor: f64,
}

impl Default for DiagnosticsSchedule {
    fn default() -> Self {
        Self {
            sigmas: vec![0.0],
            sobolev: vec![1.0],
            noise_floor: NOISE_FLOOR,
        }
    }
}

/// Snapshot of every tracked functional at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    /// mKdV energy; 0 for tNLS.
    pub energy: f64,
    /// `∫ v conj(v_x)` for tNLS; 0 for mKdV.
    pub momentum: Complex64,
    /// `(σ, E_σ or M_σ)`; NaN when σ overflows the grid.
    pub gevrey: Vec<(f64, f64)>,
    /// NaN when the radius is unresolved.
    pub sigma_hat: f64,
    pub hs_norms: Vec<(f64, f64)>,
    pub trust: Vec<(f64, bool)>,
}

pub fn compute_record(
    f: &SpectralField,
    t: f64,
    eq: &EquationSpec,
    sched: &DiagnosticsSchedule,
) -> Result<DiagnosticsRecord> {
    let (energy, momentum) = match *eq {
        EquationSpec::Mkdv { mu } => (energy_mkdv(f, mu)?, Complex64::default()),
        EquationSpec::Tnls { .. } => (0.0, tnls_momentum(f)),
    };
    let mut gevrey = Vec::with_capacity(sched.sigmas.len());
    let mut flags = Vec::with_capacity(sched.sigmas.len());
    for &s in &sched.sigmas {
        match trust(f, s) {
            Ok(rep) => {
                gevrey.push((s, almost_conserved(f, s, eq)?));
                flags.push((s, rep.trusted));
            }
            Err(Error::Overflow { .. }) => {
                gevrey.push((s, f64::NAN));
                flags.push((s, false));
            }
            Err(e) => return Err(e),
        }
    }
    let sigma_hat = match estimate_radius(f, sched.noise_floor) {
        Ok(fit) => fit.sigma_hat,
        Err(Error::UnresolvedRadius { .. }) => f64::NAN,
        Err(e) => return Err(e),
    };
    Ok(DiagnosticsRecord {
        t,
        mass: mass(f),
        energy,
        momentum,
        gevrey,
        sigma_hat,
        hs_norms: sched
            .sobolev
            .iter()
            .map(|&s| (s, sobolev_norm(f, s)))
            .collect(),
        trust: flags,
    })
}

/// Fill `traj.records`, one per stored state.
pub fn attach_records(traj: &mut Trajectory, sched: &DiagnosticsSchedule) -> Result<()> {
    let eq = traj.equation;
    let compute = |(t, f): (&f64, &SpectralField)| compute_record(f, *t, &eq, sched);
    #[cfg(feature = "parallel")]
    let records = {
        use rayon::prelude::*;
        traj.times
            .par_iter()
            .zip(traj.states.par_iter())
            .map(compute)
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let records = traj
        .times
        .iter()
        .zip(traj.states.iter())
        .map(compute)
        .collect::<Result<Vec<_>>>()?;
    traj.records = records;
    Ok(())
}

/// Largest relative deviation `|q(t) − q(0)| / |q(0)|` of a series.
pub fn relative_drift(series: impl IntoIterator<Item = f64>) -> f64 {
    let mut it = series.into_iter();
    let Some(q0) = it.next() else { return 0.0 };
    let scale = q0.abs().max(f64::MIN_POSITIVE);
    it.map(|q| (q - q0).abs() / scale).fold(0.0, f64::max)
}
