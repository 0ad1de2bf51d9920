use serde::{Deserialize, Serialize};

use super::functionals::almost_conserved;
use crate::dynamics::Trajectory;
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::trust;

/// Drift exponent used for mKdV.
pub const MKDV_EXPONENT: f64 = 0.75;
/// Working drift exponent for tNLS (any value below 1/4 is admissible).
pub const TNLS_EXPONENT: f64 = 0.24;

pub fn default_exponent(eq: &EquationSpec) -> f64 {
    if eq.is_mkdv() {
        MKDV_EXPONENT
    } else {
        TNLS_EXPONENT
    }
}

/// Data-size factor of the drift bound: `Q²(1+Q)` for mKdV, `Q²` for tNLS.
pub fn bound_factor(eq: &EquationSpec, q0: f64) -> f64 {
    if eq.is_mkdv() {
        q0 * q0 * (1.0 + q0)
    } else {
        q0 * q0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub sigma: f64,
    /// `Q_σ(0)`.
    pub q0: f64,
    /// `sup_t Q_σ(t) − Q_σ(0)`, unclamped.
    pub raw: f64,
    /// `raw` clamped at 0.
    pub drift: f64,
    pub clamped: bool,
    pub trusted: bool,
    /// `D / (σ^ℓ · bound_factor)`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub exponent: f64,
    pub rows: Vec<DriftRow>,
    /// Fitted slope of log D vs log σ over trusted, unclamped rows.
    pub fitted_exponent: Option<f64>,
    /// Smallest constant making the bound hold on every trusted row.
    pub constant: f64,
}

impl DriftReport {
    /// Whether `D(σ) ≤ C σ^ℓ · bound_factor` holds on every trusted row.
    pub fn bound_holds(&self, c: f64) -> bool {
        self.rows
            .iter()
            .filter(|r| r.trusted)
            .all(|r| r.normalized <= c * (1.0 + 1e-12))
    }

    /// Constant calibrated at a single σ.
    pub fn constant_at(&self, sigma: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.sigma == sigma)
            .map(|r| r.normalized)
    }

    /// `D` nondecreasing in σ over trusted rows, in sweep order sorted by σ.
    pub fn monotone(&self) -> bool {
        let mut rows: Vec<&DriftRow> = self.rows.iter().filter(|r| r.trusted).collect();
        rows.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
        rows.windows(2).all(|w| w[1].drift >= w[0].drift)
    }
}

/// Sweep of the drift `D(σ) = sup_t Q_σ(t) − Q_σ(0)` over the stored
/// samples, with `Q = E_σ` (mKdV) or `M_σ` (tNLS) and exponent
/// [`default_exponent`].
pub fn drift_sweep(traj: &Trajectory, sigmas: &[f64], eq: &EquationSpec) -> Result<DriftReport> {
    drift_sweep_with(traj, sigmas, eq, default_exponent(eq))
}

/// Round-off scale below which a drift is treated as zero.
const CLAMP_RELATIVE: f64 = 1e-13;

pub fn drift_sweep_with(
    traj: &Trajectory,
    sigmas: &[f64],
    eq: &EquationSpec,
    exponent: f64,
) -> Result<DriftReport> {
    if traj.states.is_empty() {
        return Err(Error::InvalidParameter("empty trajectory".into()));
    }
    if let Some(&s) = sigmas.iter().find(|&&s| !(s > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "sweep sigma {s} must be positive"
        )));
    }
    let row = |&sigma: &f64| -> Result<DriftRow> {
        let mut trusted = true;
        let mut q0 = 0.0;
        let mut sup = f64::NEG_INFINITY;
        for (i, st) in traj.states.iter().enumerate() {
            match trust(st, sigma) {
                Ok(t) => trusted &= t.trusted,
                Err(Error::Overflow { .. }) => {
                    trusted = false;
                    break;
                }
                Err(e) => return Err(e),
            }
            let q = almost_conserved(st, sigma, eq)?;
            if i == 0 {
                q0 = q;
            }
            sup = sup.max(q);
        }
        if !trusted {
            return Ok(DriftRow {
                sigma,
                q0,
                raw: f64::NAN,
                drift: f64::NAN,
                clamped: false,
                trusted,
                normalized: f64::NAN,
            });
        }
        let raw = sup - q0;
        let clamped = raw <= CLAMP_RELATIVE * q0.abs().max(f64::MIN_POSITIVE);
        let drift = if clamped { 0.0 } else { raw };
        let denom = sigma.powf(exponent) * bound_factor(eq, q0);
        let normalized = if drift == 0.0 { 0.0 } else { drift / denom };
        Ok(DriftRow {
            sigma,
            q0,
            raw,
            drift,
            clamped,
            trusted,
            normalized,
        })
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<DriftRow> = {
        use rayon::prelude::*;
        sigmas.par_iter().map(row).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<DriftRow> = sigmas.iter().map(row).collect::<Result<Vec<_>>>()?;

    let fit_pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.trusted && !r.clamped)
        .map(|r| (r.sigma.ln(), r.drift.ln()))
        .collect();
    let fitted_exponent = (fit_pts.len() >= 2).then(|| {
        let n = fit_pts.len() as f64;
        let mx = fit_pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = fit_pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = fit_pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = fit_pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    let constant = rows
        .iter()
        .filter(|r| r.trusted)
        .map(|r| r.normalized)
        .fold(0.0, f64::max);
    Ok(DriftReport {
        exponent,
        rows,
        fitted_exponent,
        constant,
    })
}
