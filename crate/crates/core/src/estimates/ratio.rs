//! Ratio tests for the trilinear and Strichartz-type product estimates on a
//! discretized frequency lattice.
//!
//! Fields are given directly by their space-time Fourier transforms: sums
//! of smooth compactly supported bumps riding the characteristic
//! `τ = φ(ξ) + offset`, plus one bump away from it. Products become
//! convolutions, evaluated by FFT on a zero-padded lattice wide enough
//! that nothing wraps.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::KernelParams;
use super::rng::{chunk_rng, map_chunks};
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::fft;

/// Uniform `(ξ, τ)` lattice of `n × m` points, padded by a factor 3 for
/// triple products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyLattice {
    pub n: usize,
    pub m: usize,
    pub dxi: f64,
    pub dtau: f64,
}

const PAD: usize = 3;

impl FrequencyLattice {
    pub fn coarse() -> Self {
        Self {
            n: 64,
            m: 64,
            dxi: 0.25,
            dtau: 1.5,
        }
    }

    /// Twice the points in each direction over the same frequency window.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n,
            m: 2 * self.m,
            dxi: 0.5 * self.dxi,
            dtau: 0.5 * self.dtau,
        }
    }

    fn xi_half(&self) -> f64 {
        0.5 * self.n as f64 * self.dxi
    }

    fn tau_half(&self) -> f64 {
        0.5 * self.m as f64 * self.dtau
    }

    fn cols(&self) -> usize {
        PAD * self.n
    }

    fn rows(&self) -> usize {
        PAD * self.m
    }

    fn signed(i: usize, len: usize) -> i64 {
        if i < len / 2 {
            i as i64
        } else {
            i as i64 - len as i64
        }
    }

    fn xi(&self, col: usize) -> f64 {
        Self::signed(col, self.cols()) as f64 * self.dxi
    }

    fn tau(&self, row: usize) -> f64 {
        Self::signed(row, self.rows()) as f64 * self.dtau
    }
}

fn bump(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

/// `amp · B((ξ−ξ₀)/w_ξ) · B((τ − center(ξ))/w_τ)` with center `φ(ξ) + offset`
/// on the characteristic, or the constant `offset` off it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub xi0: f64,
    pub offset: f64,
    pub wxi: f64,
    pub wtau: f64,
    pub amp: Complex64,
    pub on_characteristic: bool,
}

impl Bump {
    fn eval(&self, xi: f64, tau: f64, eq: &EquationSpec) -> Complex64 {
        let bx = bump((xi - self.xi0) / self.wxi);
        if bx == 0.0 {
            return Complex64::default();
        }
        let center = if self.on_characteristic {
            eq.phase(xi) + self.offset
        } else {
            self.offset
        };
        self.amp * (bx * bump((tau - center) / self.wtau))
    }
}

/// A space-time field through its Fourier transform; `real` adds the
/// Hermitian mirror so the field is real in `(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpField {
    pub bumps: Vec<Bump>,
    pub real: bool,
}

impl BumpField {
    pub fn eval(&self, xi: f64, tau: f64, eq: &EquationSpec) -> Complex64 {
        let g = |x: f64, t: f64| {
            self.bumps
                .iter()
                .map(|b| b.eval(x, t, eq))
                .sum::<Complex64>()
        };
        if self.real {
            g(xi, tau) + g(-xi, -tau).conj()
        } else {
            g(xi, tau)
        }
    }

    /// Padded FFT-ordered samples (rows = τ, cols = ξ), zero outside the
    /// unpadded window.
    fn sample(&self, lat: &FrequencyLattice, eq: &EquationSpec) -> Vec<Complex64> {
        let (rows, cols) = (lat.rows(), lat.cols());
        let mut out = vec![Complex64::default(); rows * cols];
        for r in 0..rows {
            let tau = lat.tau(r);
            if tau < -lat.tau_half() || tau >= lat.tau_half() {
                continue;
            }
            for c in 0..cols {
                let xi = lat.xi(c);
                if xi >= -lat.xi_half() && xi < lat.xi_half() {
                    out[r * cols + c] = self.eval(xi, tau, eq);
                }
            }
        }
        out
    }

    /// A random field: one to three characteristic bumps and one
    /// off-characteristic bump of smaller amplitude.
    pub fn random(rng: &mut impl Rng, real: bool) -> Self {
        let count = rng.gen_range(1..=3);
        let mut bumps = Vec::with_capacity(count + 1);
        for _ in 0..count {
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            bumps.push(Bump {
                xi0: rng.gen_range(-1.5..1.5),
                offset: rng.gen_range(-4.0..4.0),
                wxi: rng.gen_range(0.5..1.0),
                wtau: rng.gen_range(4.0..8.0),
                amp: a,
                on_characteristic: true,
            });
        }
        let a = Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        bumps.push(Bump {
            xi0: rng.gen_range(-1.5..1.5),
            offset: rng.gen_range(-20.0..20.0),
            wxi: rng.gen_range(0.5..1.0),
            wtau: rng.gen_range(4.0..8.0),
            amp: a,
            on_characteristic: false,
        });
        Self { bumps, real }
    }

    pub fn single(xi0: f64, real: bool) -> Self {
        Self {
            bumps: vec![Bump {
                xi0,
                offset: 0.0,
                wxi: 0.75,
                wtau: 6.0,
                amp: Complex64::new(1.0, 0.0),
                on_characteristic: true,
            }],
            real,
        }
    }
}

/// Which product estimate a ratio probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum RatioForm {
    /// `‖∂ₓ(u₁u₂u₃)‖_{X^{s,b−1}} / Π‖uᵢ‖_{X^{s,b}}`, mKdV phase, real fields.
    MkdvTrilinear { s: f64, b: f64 },
    /// `‖v₁v₂v̄₃‖_{X^{s,b′}} / Π‖vᵢ‖_{X^{s,b}}`, tNLS phase.
    TnlsTrilinear { s: f64, b: f64, bp: f64 },
    /// `‖u₁u₂u₃‖_{L²} / Π‖uᵢ‖_{X^{0,b}}`, mKdV phase.
    Strichartz { b: f64 },
}

impl RatioForm {
    pub fn validate(&self, eq: &EquationSpec) -> Result<()> {
        match *self {
            RatioForm::MkdvTrilinear { b, .. } | RatioForm::Strichartz { b } => {
                if !eq.is_mkdv() {
                    return Err(Error::Unsupported {
                        what: "phase for this ratio",
                        value: eq.name().into(),
                    });
                }
                if !(b > 0.5 && b <= 0.6) {
                    return Err(Error::InvalidParameter(format!(
                        "b = {b} must lie in (1/2, 0.6]"
                    )));
                }
            }
            RatioForm::TnlsTrilinear { s, b, bp } => {
                if eq.is_mkdv() {
                    return Err(Error::Unsupported {
                        what: "phase for this ratio",
                        value: eq.name().into(),
                    });
                }
                KernelParams::new(s, b, bp)?;
            }
        }
        Ok(())
    }

    fn real_fields(&self) -> bool {
        !matches!(self, RatioForm::TnlsTrilinear { .. })
    }

    fn input_weights(&self) -> (f64, f64) {
        match *self {
            RatioForm::MkdvTrilinear { s, b } => (s, b),
            RatioForm::TnlsTrilinear { s, b, .. } => (s, b),
            RatioForm::Strichartz { b } => (0.0, b),
        }
    }

    fn output_weights(&self) -> (f64, f64) {
        match *self {
            RatioForm::MkdvTrilinear { s, b } => (s, b - 1.0),
            RatioForm::TnlsTrilinear { s, bp, .. } => (s, bp),
            RatioForm::Strichartz { .. } => (0.0, 0.0),
        }
    }
}

fn weighted_norm(
    a: &[Complex64],
    lat: &FrequencyLattice,
    eq: &EquationSpec,
    s: f64,
    b: f64,
    cell: f64,
) -> f64 {
    let cols = lat.cols();
    let mut acc = 0.0;
    for (i, v) in a.iter().enumerate() {
        let a2 = v.norm_sqr();
        if a2 == 0.0 {
            continue;
        }
        let xi = lat.xi(i % cols);
        let tau = lat.tau(i / cols);
        acc +=
            (1.0 + xi.abs()).powf(2.0 * s) * (1.0 + (tau - eq.phase(xi)).abs()).powf(2.0 * b) * a2;
    }
    (acc * cell).sqrt()
}

/// Ratio for one triple of fields; `None` when a factor vanishes.
pub fn product_ratio(
    fields: [&BumpField; 3],
    form: &RatioForm,
    eq: &EquationSpec,
    lat: &FrequencyLattice,
) -> Result<Option<f64>> {
    form.validate(eq)?;
    let (rows, cols) = (lat.rows(), lat.cols());
    let cell = lat.dxi * lat.dtau;
    let (s_in, b_in) = form.input_weights();
    let mut arrays: Vec<Vec<Complex64>> = fields.iter().map(|f| f.sample(lat, eq)).collect();
    let mut denom = 1.0;
    for a in &arrays {
        let nrm = weighted_norm(a, lat, eq, s_in, b_in, cell);
        if nrm == 0.0 {
            return Ok(None);
        }
        denom *= nrm;
    }
    if let RatioForm::TnlsTrilinear { .. } = form {
        // transform of the conjugate: conj(â(−ξ, −τ))
        let a = &arrays[2];
        let mut c = vec![Complex64::default(); rows * cols];
        for r in 0..rows {
            for k in 0..cols {
                c[r * cols + k] = a[((rows - r) % rows) * cols + (cols - k) % cols].conj();
            }
        }
        arrays[2] = c;
    }
    let mut prod = vec![Complex64::new(1.0, 0.0); rows * cols];
    for a in arrays.iter_mut() {
        fft::inverse_2d(a, rows, cols);
        prod.iter_mut().zip(a.iter()).for_each(|(p, v)| *p *= v);
    }
    fft::forward_2d(&mut prod, rows, cols);
    let scale = cell * cell;
    for (i, v) in prod.iter_mut().enumerate() {
        *v *= scale;
        if let RatioForm::MkdvTrilinear { .. } = form {
            *v *= Complex64::new(0.0, lat.xi(i % cols));
        }
    }
    let (s_out, b_out) = form.output_weights();
    Ok(Some(
        weighted_norm(&prod, lat, eq, s_out, b_out, cell) / denom,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub lattice: FrequencyLattice,
    pub trials: usize,
    pub skipped: usize,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
}

fn stats(lat: FrequencyLattice, mut values: Vec<f64>, skipped: usize) -> RatioStats {
    let trials = values.len();
    let max = values.iter().copied().fold(0.0, f64::max);
    let mean = if trials > 0 {
        values.iter().sum::<f64>() / trials as f64
    } else {
        0.0
    };
    values.sort_by(f64::total_cmp);
    let median = if trials > 0 { values[trials / 2] } else { 0.0 };
    RatioStats {
        lattice: lat,
        trials,
        skipped,
        max,
        mean,
        median,
    }
}

fn trial_fields(seed: u64, trial: u64, real: bool) -> [BumpField; 3] {
    let mut rng = chunk_rng(seed, trial);
    [
        BumpField::random(&mut rng, real),
        BumpField::random(&mut rng, real),
        BumpField::random(&mut rng, real),
    ]
}

/// Ratio statistics over `trials` random triples on one lattice.
pub fn ratio_trials(
    trials: usize,
    form: &RatioForm,
    eq: &EquationSpec,
    lat: &FrequencyLattice,
    seed: u64,
) -> Result<RatioStats> {
    form.validate(eq)?;
    let real = form.real_fields();
    let results = map_chunks(trials as u64, |t| {
        let f = trial_fields(seed, t, real);
        product_ratio([&f[0], &f[1], &f[2]], form, eq, lat)
    });
    let mut values = Vec::with_capacity(trials);
    let mut skipped = 0;
    for r in results {
        match r? {
            Some(v) => values.push(v),
            None => skipped += 1,
        }
    }
    Ok(stats(*lat, values, skipped))
}

/// Same random triples on a lattice and on its refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub label: String,
    pub form: RatioForm,
    pub seed: u64,
    pub coarse: RatioStats,
    pub fine: RatioStats,
    /// `fine.max / coarse.max − 1`.
    pub growth: f64,
}

impl RefinementReport {
    pub fn bounded(&self, limit: f64) -> bool {
        self.growth < limit
    }
}

pub fn refinement_study(
    trials: usize,
    form: &RatioForm,
    eq: &EquationSpec,
    lat: &FrequencyLattice,
    seed: u64,
) -> Result<RefinementReport> {
    let coarse = ratio_trials(trials, form, eq, lat, seed)?;
    let fine = ratio_trials(trials, form, eq, &lat.refined(), seed)?;
    let growth = fine.max / coarse.max - 1.0;
    Ok(RefinementReport {
        label: "empirical boundedness".into(),
        form: *form,
        seed,
        coarse,
        fine,
        growth,
    })
}

/// Trilinear ratio study at the standard parameters for the equation:
/// `s = 1/4, b = 0.51` (mKdV) or `s = −0.2, b = 0.6, b′ = −0.1` (tNLS).
pub fn trilinear_ratio(
    trials: usize,
    eq: &EquationSpec,
    lat: &FrequencyLattice,
    seed: u64,
) -> Result<RefinementReport> {
    let form = if eq.is_mkdv() {
        RatioForm::MkdvTrilinear { s: 0.25, b: 0.51 }
    } else {
        RatioForm::TnlsTrilinear {
            s: -0.2,
            b: 0.6,
            bp: -0.1,
        }
    };
    refinement_study(trials, &form, eq, lat, seed)
}

/// `‖u₁u₂u₃‖_{L²} / Π‖uᵢ‖_{X^{0,0.51}}` for the mKdV phase.
pub fn strichartz_ratio(
    trials: usize,
    lat: &FrequencyLattice,
    seed: u64,
) -> Result<RefinementReport> {
    refinement_study(
        trials,
        &RatioForm::Strichartz { b: 0.51 },
        &EquationSpec::defocusing_mkdv(),
        lat,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_factor_is_skipped() {
        let eq = EquationSpec::defocusing_mkdv();
        let zero = BumpField {
            bumps: vec![],
            real: true,
        };
        let one = BumpField::single(0.5, true);
        let form = RatioForm::Strichartz { b: 0.51 };
        let r =
            product_ratio([&one, &zero, &one], &form, &eq, &FrequencyLattice::coarse()).unwrap();
        assert_eq!(r, None);
    }

    #[test]
    fn single_mode_triples_are_finite() {
        let lat = FrequencyLattice::coarse();
        let m = EquationSpec::defocusing_mkdv();
        let f = BumpField::single(0.5, true);
        for form in [
            RatioForm::MkdvTrilinear { s: 0.25, b: 0.51 },
            RatioForm::Strichartz { b: 0.51 },
        ] {
            let r = product_ratio([&f, &f, &f], &form, &m, &lat)
                .unwrap()
                .unwrap();
            assert!(r.is_finite() && r > 0.0);
        }
        let t = EquationSpec::tnls(1.0, 1.0, 1.0).unwrap();
        let g = BumpField::single(0.5, false);
        let form = RatioForm::TnlsTrilinear {
            s: -0.2,
            b: 0.6,
            bp: -0.1,
        };
        let r = product_ratio([&g, &g, &g], &form, &t, &lat)
            .unwrap()
            .unwrap();
        assert!(r.is_finite() && r > 0.0);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        // tiny lattice so the O(N³) direct sum is cheap
        let lat = FrequencyLattice {
            n: 8,
            m: 8,
            dxi: 0.5,
            dtau: 2.0,
        };
        let eq = EquationSpec::tnls(1.0, 1.0, 1.0).unwrap();
        let f = BumpField {
            bumps: vec![Bump {
                xi0: 0.2,
                offset: 1.0,
                wxi: 1.2,
                wtau: 5.0,
                amp: Complex64::new(0.3, 0.7),
                on_characteristic: true,
            }],
            real: false,
        };
        let g = BumpField {
            bumps: vec![Bump {
                xi0: -0.4,
                offset: -1.0,
                wxi: 1.1,
                wtau: 6.0,
                amp: Complex64::new(1.0, -0.2),
                on_characteristic: false,
            }],
            real: false,
        };
        let form = RatioForm::TnlsTrilinear {
            s: -0.2,
            b: 0.6,
            bp: -0.1,
        };
        let got = product_ratio([&f, &g, &f], &form, &eq, &lat)
            .unwrap()
            .unwrap();

        let pts: Vec<(f64, f64)> = (-4..4)
            .flat_map(|i| (-4..4).map(move |j| (i as f64 * 0.5, j as f64 * 2.0)))
            .collect();
        let cell = 1.0;
        let w = |x: f64, t: f64, s: f64, b: f64| {
            (1.0 + x.abs()).powf(s) * (1.0 + (t - eq.phase(x)).abs()).powf(b)
        };
        let norm = |h: &BumpField| {
            pts.iter()
                .map(|&(x, t)| w(x, t, -0.4, 1.2) * h.eval(x, t, &eq).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let mut out = 0.0;
        for ox in -12..12 {
            for ot in -12..12 {
                let (x, t) = (ox as f64 * 0.5, ot as f64 * 2.0);
                let mut acc = Complex64::default();
                for &(x1, t1) in &pts {
                    for &(x2, t2) in &pts {
                        let (x3, t3) = (x1 + x2 - x, t1 + t2 - t);
                        acc += f.eval(x1, t1, &eq)
                            * g.eval(x2, t2, &eq)
                            * f.eval(x3, t3, &eq).conj()
                            * if (-2.0..2.0).contains(&x3) && (-8.0..8.0).contains(&t3) {
                                1.0
                            } else {
                                0.0
                            };
                    }
                }
                out += w(x, t, -0.4, -0.2) * (acc * cell * cell).norm_sqr();
            }
        }
        let expect = out.sqrt() / (norm(&f) * norm(&g) * norm(&f));
        assert!((got - expect).abs() < 1e-10 * expect, "{got} {expect}");
    }

    #[test]
    fn form_validation() {
        let m = EquationSpec::defocusing_mkdv();
        let t = EquationSpec::tnls(1.0, 1.0, 1.0).unwrap();
        assert!(RatioForm::MkdvTrilinear { s: 0.25, b: 0.7 }
            .validate(&m)
            .is_err());
        assert!(RatioForm::Strichartz { b: 0.51 }.validate(&t).is_err());
        assert!(RatioForm::TnlsTrilinear {
            s: -0.2,
            b: 0.6,
            bp: 0.0
        }
        .validate(&t)
        .is_err());
    }
}
