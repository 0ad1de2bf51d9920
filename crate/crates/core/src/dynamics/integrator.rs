use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::propagator::NonlinearWork;
use crate::diagnostics::DiagnosticsRecord;
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub dealias: bool,
    pub reality_projection: bool,
    pub max_steps: usize,
    /// Switch off the nonlinear term entirely (linear-limit checks).
    pub nonlinear: bool,
}

impl IntegratorConfig {
    pub fn new(dt: f64) -> Result<Self> {
        let cfg = Self {
            dt,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        if self.max_steps < 1 {
            return Err(Error::InvalidParameter(
                "max_steps must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            dealias: true,
            reality_projection: true,
            max_steps: 100_000_000,
            nonlinear: true,
        }
    }
}

/// Time samples and states of one run, with the diagnostics computed on them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub equation: EquationSpec,
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub records: Vec<DiagnosticsRecord>,
}

impl Trajectory {
    pub fn new(equation: EquationSpec) -> Self {
        Self {
            equation,
            times: Vec::new(),
            states: Vec::new(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, state: SpectralField) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last));
        self.times.push(t);
        self.states.push(state);
    }

    pub fn last(&self) -> Option<&SpectralField> {
        self.states.last()
    }
}

/// Integrating-factor RK4 stepper with the exponentials cached for a fixed
/// step size.
pub struct Stepper {
    eq: EquationSpec,
    grid: GridSpec,
    dt: f64,
    cfg: IntegratorConfig,
    e_full: Vec<Complex64>,
    e_half: Vec<Complex64>,
    work: NonlinearWork,
    k: [Vec<Complex64>; 4],
    stage: Vec<Complex64>,
    steps_taken: usize,
}

impl Stepper {
    pub fn new(grid: GridSpec, eq: EquationSpec, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let n = grid.n();
        let mut s = Self {
            eq,
            grid,
            dt: 0.0,
            cfg,
            e_full: vec![Complex64::default(); n],
            e_half: vec![Complex64::default(); n],
            work: NonlinearWork::new(n),
            k: std::array::from_fn(|_| vec![Complex64::default(); n]),
            stage: vec![Complex64::default(); n],
            steps_taken: 0,
        };
        s.set_dt(cfg.dt);
        Ok(s)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn set_dt(&mut self, dt: f64) {
        if dt == self.dt {
            return;
        }
        self.dt = dt;
        for j in 0..self.grid.n() {
            let w = self.eq.phase(self.grid.wavenumber(j));
            self.e_full[j] = Complex64::from_polar(1.0, dt * w);
            self.e_half[j] = Complex64::from_polar(1.0, 0.5 * dt * w);
        }
        if self.eq.real_valued() {
            let u = self.grid.unpaired_index();
            self.e_full[u] = Complex64::default();
            self.e_half[u] = Complex64::default();
        }
    }

    fn rhs(&mut self, input_is_stage: bool, slot: usize, state: &[Complex64]) {
        let Self {
            work,
            k,
            stage,
            grid,
            eq,
            cfg,
            ..
        } = self;
        let input: &[Complex64] = if input_is_stage { stage } else { state };
        if cfg.nonlinear {
            work.evaluate(input, grid, eq, cfg.dealias, &mut k[slot]);
        } else {
            k[slot].iter_mut().for_each(|c| *c = Complex64::default());
        }
    }

    /// Advance `coeffs` by one step in place.
    pub fn step_in_place(&mut self, coeffs: &mut [Complex64]) -> Result<()> {
        let n = self.grid.n();
        let h = self.dt;
        self.rhs(false, 0, coeffs);
        for j in 0..n {
            self.stage[j] = self.e_half[j] * (coeffs[j] + 0.5 * h * self.k[0][j]);
        }
        self.rhs(true, 1, coeffs);
        for j in 0..n {
            self.stage[j] = self.e_half[j] * coeffs[j] + 0.5 * h * self.k[1][j];
        }
        self.rhs(true, 2, coeffs);
        for j in 0..n {
            self.stage[j] = self.e_full[j] * coeffs[j] + h * self.e_half[j] * self.k[2][j];
        }
        self.rhs(true, 3, coeffs);
        for j in 0..n {
            coeffs[j] = self.e_full[j] * coeffs[j]
                + (h / 6.0)
                    * (self.e_full[j] * self.k[0][j]
                        + 2.0 * self.e_half[j] * (self.k[1][j] + self.k[2][j])
                        + self.k[3][j]);
        }
        if self.cfg.dealias {
            let cut = self.grid.dealias_cutoff();
            for (j, c) in coeffs.iter_mut().enumerate() {
                if self.grid.mode(j).abs() > cut {
                    *c = Complex64::default();
                }
            }
        }
        self.steps_taken += 1;
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::BlowUp {
                step: self.steps_taken,
            });
        }
        Ok(())
    }

    /// One step on a field, returning the new field.
    pub fn advance(&mut self, f: &SpectralField) -> Result<SpectralField> {
        let mut c = f.coeffs().to_vec();
        self.step_in_place(&mut c)?;
        let real = f.is_real() && self.eq.real_valued();
        let mut out = SpectralField::from_coeffs(self.grid, c, real)?;
        if real && self.cfg.reality_projection {
            out.symmetrize();
        }
        Ok(out)
    }

    /// Advance by `duration` using `ceil(duration/dt)` equal steps.
    pub fn advance_by(&mut self, f: &SpectralField, duration: f64) -> Result<SpectralField> {
        if duration <= 0.0 {
            return Ok(f.clone());
        }
        let base = self.cfg.dt;
        let steps = (duration / base - 1e-9).ceil().max(1.0) as usize;
        self.set_dt(duration / steps as f64);
        let real = f.is_real() && self.eq.real_valued();
        let mut c = f.coeffs().to_vec();
        for _ in 0..steps {
            self.step_in_place(&mut c)?;
            if real && self.cfg.reality_projection {
                project_hermitian(&mut c);
            }
        }
        SpectralField::from_coeffs(self.grid, c, real)
    }
}

fn project_hermitian(c: &mut [Complex64]) {
    let n = c.len();
    c[0].im = 0.0;
    for j in 1..n / 2 {
        let m = 0.5 * (c[j] + c[n - j].conj());
        c[j] = m;
        c[n - j] = m.conj();
    }
    c[n / 2] = Complex64::default();
}

/// One integrating-factor RK4 step of size `cfg.dt`.
pub fn step(f: &SpectralField, eq: &EquationSpec, cfg: &IntegratorConfig) -> Result<SpectralField> {
    Stepper::new(*f.grid(), *eq, *cfg)?.advance(f)
}

/// Integrate to `t_final`, storing states every `sample_every` time units
/// (rounded to a whole number of steps). The step is shrunk so that both
/// divide evenly.
pub fn integrate(
    u0: &SpectralField,
    eq: &EquationSpec,
    cfg: &IntegratorConfig,
    t_final: f64,
    sample_every: f64,
) -> Result<Trajectory> {
    cfg.validate()?;
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_final = {t_final} must be nonnegative"
        )));
    }
    let mut traj = Trajectory::new(*eq);
    traj.push(0.0, u0.clone());
    if t_final == 0.0 {
        return Ok(traj);
    }
    let sample_every = if sample_every > 0.0 {
        sample_every.min(t_final)
    } else {
        t_final
    };
    let samples = (t_final / sample_every - 1e-9).ceil().max(1.0) as usize;
    let interval = t_final / samples as f64;
    let steps_per_sample = (interval / cfg.dt - 1e-9).ceil().max(1.0) as usize;
    if samples * steps_per_sample > cfg.max_steps {
        return Err(Error::InvalidParameter(format!(
            "{} steps requested, max_steps = {}",
            samples * steps_per_sample,
            cfg.max_steps
        )));
    }
    let mut stepper = Stepper::new(*u0.grid(), *eq, *cfg)?;
    stepper.set_dt(interval / steps_per_sample as f64);
    let real = u0.is_real() && eq.real_valued();
    let mut c = u0.coeffs().to_vec();
    for s in 1..=samples {
        for _ in 0..steps_per_sample {
            stepper.step_in_place(&mut c)?;
            if real && cfg.reality_projection {
                project_hermitian(&mut c);
            }
        }
        traj.push(
            s as f64 * interval,
            SpectralField::from_coeffs(*u0.grid(), c.clone(), real)?,
        );
    }
    Ok(traj)
}
