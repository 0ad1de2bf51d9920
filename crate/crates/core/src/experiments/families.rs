use num_complex::Complex64;
use rand::Rng;

use super::config::{ExperimentConfig, InitialData};
use crate::equation::EquationSpec;
use crate::error::Result;
use crate::estimates::rng::{chunk_rng, split_seed};
use crate::spectral::{GridSpec, SpectralField};

/// Offset of `x` from `center` on the periodic box, in `[−L/2, L/2)`.
fn periodic_offset(x: f64, center: f64, length: f64) -> f64 {
    (x - center + 0.5 * length).rem_euclid(length) - 0.5 * length
}

/// Focusing mKdV soliton `√(6c) sech(√c (x − x0 − ct))`.
pub fn soliton(grid: GridSpec, c: f64, x0: f64, t: f64) -> SpectralField {
    let len = grid.length();
    SpectralField::from_real_fn(grid, |x| {
        let d = periodic_offset(x, x0 + c * t, len);
        (6.0 * c).sqrt() / (c.sqrt() * d).cosh()
    })
}

/// Frequency of the tNLS plane wave `A e^{i(kx − ωt)}`.
pub fn plane_wave_omega(eq: &EquationSpec, amplitude: f64, k: f64) -> f64 {
    match *eq {
        EquationSpec::Tnls { alpha, beta, gamma } => {
            gamma * amplitude * amplitude - alpha * k * k - beta * k * k * k
        }
        EquationSpec::Mkdv { .. } => f64::NAN,
    }
}

pub fn plane_wave(
    grid: GridSpec,
    eq: &EquationSpec,
    amplitude: f64,
    k: f64,
    t: f64,
) -> SpectralField {
    let omega = plane_wave_omega(eq, amplitude, k);
    SpectralField::from_fn(grid, false, |x| {
        Complex64::from_polar(amplitude, k * x - omega * t)
    })
}

pub fn sech(grid: GridSpec, amplitude: f64, width: f64, real: bool) -> SpectralField {
    let len = grid.length();
    SpectralField::from_fn(grid, real, |x| {
        Complex64::new(
            amplitude / (periodic_offset(x, 0.5 * len, len) / width).cosh(),
            0.0,
        )
    })
}

/// Real field with coefficients exactly `e^{−σ0|ξ|}`; the unpaired mode is 0.
pub fn poisson_kernel(grid: GridSpec, sigma0: f64) -> SpectralField {
    let n = grid.n();
    let coeffs = (0..n)
        .map(|j| {
            if j == grid.unpaired_index() {
                Complex64::default()
            } else {
                Complex64::new((-sigma0 * grid.wavenumber(j).abs()).exp(), 0.0)
            }
        })
        .collect();
    SpectralField::from_coeffs(grid, coeffs, true).expect("length matches grid")
}

/// Random modes `1 ≤ |k| ≤ k_max` with a smooth taper, scaled so the sup
/// norm in physical space is `amplitude`.
pub fn random_band(
    grid: GridSpec,
    k_max: usize,
    amplitude: f64,
    seed: u64,
    real: bool,
) -> SpectralField {
    let n = grid.n();
    let mut rng = chunk_rng(seed, 0);
    let mut coeffs = vec![Complex64::default(); n];
    for k in 1..=k_max as i64 {
        let taper = (-2.0 * (k as f64 / k_max as f64).powi(2)).exp();
        for kk in [k, -k] {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * taper;
            let j = grid.index_of(kk).expect("band inside grid");
            coeffs[j] = z;
        }
    }
    let mut f = SpectralField::from_coeffs(grid, coeffs, real).expect("length matches grid");
    if real {
        f.symmetrize();
    }
    let peak = f.to_physical().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak > 0.0 {
        f = f.scale(Complex64::new(amplitude / peak, 0.0));
    }
    f
}

/// Initial state described by the config.
pub fn initial_state(cfg: &ExperimentConfig) -> Result<SpectralField> {
    let g = cfg.grid;
    let real = cfg.equation.real_valued();
    Ok(match cfg.initial {
        InitialData::Soliton { c } => soliton(g, c, 0.5 * g.length(), 0.0),
        InitialData::Sech { amplitude, width } => sech(g, amplitude, width, real),
        InitialData::PlaneWave { amplitude, k } => {
            if real {
                SpectralField::from_real_fn(g, |x| amplitude * (k * x).cos())
            } else {
                plane_wave(g, &cfg.equation, amplitude, k, 0.0)
            }
        }
        InitialData::PoissonKernel { sigma0 } => {
            let f = poisson_kernel(g, sigma0);
            if real {
                f
            } else {
                f.with_reality(false)
            }
        }
        InitialData::RandomBand {
            k_max,
            amplitude,
            seed,
        } => {
            let seed = seed.unwrap_or_else(|| split_seed(cfg.seed, 1));
            random_band(g, k_max, amplitude, seed, real)
        }
    })
}

/// Closed-form solution at time `t`, where one is known.
pub fn exact_state(cfg: &ExperimentConfig, t: f64) -> Option<SpectralField> {
    let g = cfg.grid;
    match (cfg.initial, cfg.equation) {
        (InitialData::Soliton { c }, EquationSpec::Mkdv { mu })
            if mu > 0.0 && cfg.integrator.nonlinear =>
        {
            Some(soliton(g, c, 0.5 * g.length(), t))
        }
        (InitialData::PlaneWave { amplitude, k }, EquationSpec::Tnls { .. })
            if cfg.integrator.nonlinear =>
        {
            Some(plane_wave(g, &cfg.equation, amplitude, k, t))
        }
        _ => None,
    }
}
