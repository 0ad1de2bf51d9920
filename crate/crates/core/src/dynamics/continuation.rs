use serde::{Deserialize, Serialize};

use super::integrator::{integrate, IntegratorConfig, Stepper, Trajectory};
use crate::diagnostics::{almost_conserved, default_exponent, drift_sweep_with};
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    pub integrator: IntegratorConfig,
    pub c0: f64,
    pub a: f64,
    /// Drift constant; calibrated from a short σ-sweep when absent.
    pub constant: Option<f64>,
    /// `ℓ` (mKdV) or `θ` (tNLS); the equation default when absent.
    pub exponent: Option<f64>,
    /// Spacing of stored states; 0 stores only window boundaries where
    /// the schedule changes plus the endpoints.
    pub sample_spacing: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default(),
            c0: 0.1,
            a: 3.0,
            constant: None,
            exponent: None,
            sample_spacing: 0.0,
        }
    }
}

/// `σ` in force from time `t` on, after `windows` windows of length ρ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePoint {
    pub t: f64,
    pub sigma: f64,
    pub windows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ContinuationStatus {
    Completed,
    /// σ fell below the smallest strip width the grid can resolve.
    ResolutionFloor {
        t: f64,
        sigma: f64,
        floor: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationRun {
    pub trajectory: Trajectory,
    pub schedule: Vec<SchedulePoint>,
    pub rho: f64,
    pub q0: f64,
    pub constant: f64,
    pub exponent: f64,
    /// `K` in the budget test `n K σ^ℓ ≤ 1`.
    pub budget: f64,
    pub status: ContinuationStatus,
}

/// Window length `c0 / (1 + 2 Q0)^a`.
pub fn window_length(q0: f64, c0: f64, a: f64) -> f64 {
    c0 / (1.0 + 2.0 * q0).powf(a)
}

/// Per-window budget constant: `8 C Q0 (1+Q0)` for mKdV, `4 C Q0` for tNLS.
pub fn budget_constant(eq: &EquationSpec, c: f64, q0: f64) -> f64 {
    if eq.is_mkdv() {
        8.0 * c * q0 * (1.0 + q0)
    } else {
        4.0 * c * q0
    }
}

/// Calibrate the drift constant on `[0, ρ]` with σ ∈ {σ0/8, σ0/4, σ0/2, σ0}.
pub fn calibrate_constant(
    u0: &SpectralField,
    eq: &EquationSpec,
    sigma0: f64,
    rho: f64,
    exponent: f64,
    integrator: &IntegratorConfig,
) -> Result<f64> {
    let mut cfg = *integrator;
    cfg.dt = cfg.dt.min(rho / 20.0);
    let traj = integrate(u0, eq, &cfg, rho, rho / 20.0)?;
    let sigmas = [sigma0 / 8.0, sigma0 / 4.0, sigma0 / 2.0, sigma0];
    Ok(drift_sweep_with(&traj, &sigmas, eq, exponent)?.constant)
}

/// Advance in windows of length ρ, shrinking σ whenever the accumulated
/// drift budget `n K σ^ℓ` would exceed 1.
pub fn continuation_run(
    u0: &SpectralField,
    eq: &EquationSpec,
    sigma0: f64,
    t_final: f64,
    cfg: &ContinuationConfig,
) -> Result<ContinuationRun> {
    if let EquationSpec::Mkdv { mu } = *eq {
        if mu > 0.0 {
            return Err(Error::Unsupported {
                what: "continuation for focusing mKdV",
                value: "mu = +1".into(),
            });
        }
    }
    if !(sigma0 > 0.0) || !(t_final > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need sigma0 > 0 and T > 0, got {sigma0} and {t_final}"
        )));
    }
    if !(cfg.c0 > 0.0) || !(cfg.a > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "c0 = {}, a = {}",
            cfg.c0, cfg.a
        )));
    }
    cfg.integrator.validate()?;
    let exponent = cfg.exponent.unwrap_or_else(|| default_exponent(eq));
    let q0 = almost_conserved(u0, sigma0, eq)?;
    let rho = window_length(q0, cfg.c0, cfg.a);
    let constant = match cfg.constant {
        Some(c) if c >= 0.0 => c,
        Some(c) => {
            return Err(Error::InvalidParameter(format!(
                "drift constant {c} is negative"
            )))
        }
        None => calibrate_constant(u0, eq, sigma0, rho, exponent, &cfg.integrator)?,
    };
    let budget = budget_constant(eq, constant, q0);

    let grid = *u0.grid();
    let floor = grid.resolution_floor();
    let windows = (t_final / rho - 1e-9).ceil().max(1.0);
    if windows > cfg.integrator.max_steps as f64 {
        return Err(Error::InvalidParameter(format!(
            "window length {rho:e} needs {windows:e} windows to reach T = {t_final}, max_steps = {}",
            cfg.integrator.max_steps
        )));
    }
    let windows = windows as usize;
    let mut stepper = Stepper::new(grid, *eq, cfg.integrator)?;
    let mut traj = Trajectory::new(*eq);
    traj.push(0.0, u0.clone());
    let mut schedule = Vec::new();
    let mut sigma = sigma0;
    let mut state = u0.clone();
    let mut status = ContinuationStatus::Completed;
    let mut last_sample = 0.0;

    for n in 1..windows {
        let t = n as f64 * rho;
        state = stepper.advance_by(&state, rho)?;
        let exhausted = n as f64 * budget * sigma.powf(exponent) > 1.0;
        if exhausted {
            sigma = (n as f64 * budget).powf(-1.0 / exponent);
            schedule.push(SchedulePoint {
                t,
                sigma,
                windows: n,
            });
        }
        let due = if cfg.sample_spacing > 0.0 {
            t - last_sample >= cfg.sample_spacing * (1.0 - 1e-9)
        } else {
            exhausted
        };
        if due {
            traj.push(t, state.clone());
            last_sample = t;
        }
        if sigma < floor {
            status = ContinuationStatus::ResolutionFloor { t, sigma, floor };
            if !due {
                traj.push(t, state.clone());
            }
            break;
        }
    }
    if status == ContinuationStatus::Completed {
        let t_last = (windows - 1) as f64 * rho;
        state = stepper.advance_by(&state, t_final - t_last)?;
        traj.push(t_final, state);
        schedule.push(SchedulePoint {
            t: t_final,
            sigma,
            windows,
        });
    }
    Ok(ContinuationRun {
        trajectory: traj,
        schedule,
        rho,
        q0,
        constant,
        exponent,
        budget,
        status,
    })
}
