use serde::{Deserialize, Serialize};

use super::field::{check_exponent, SpectralField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// `(σ, s)` pair selecting a Gevrey norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevreyParams {
    pub sigma: f64,
    pub s: f64,
}

impl GevreyParams {
    pub fn new(sigma: f64, s: f64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {sigma} must be nonnegative"
            )));
        }
        Ok(Self { sigma, s })
    }
}

/// `⟨ξ⟩ = 1 + |ξ|`.
#[inline]
pub fn bracket(xi: f64) -> f64 {
    1.0 + xi.abs()
}

/// Squared Gevrey norm `L Σ_k ⟨ξ_k⟩^{2s} e^{2σ|ξ_k|} |c_k|²`.
pub fn gevrey_norm_sq(f: &SpectralField, p: GevreyParams) -> Result<f64> {
    check_exponent(f.grid(), p.sigma)?;
    let g = f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let xi = g.wavenumber(j);
            bracket(xi).powf(2.0 * p.s) * (2.0 * p.sigma * xi.abs()).exp() * c.norm_sqr()
        })
        .sum();
    Ok(g.length() * sum)
}

pub fn gevrey_norm(f: &SpectralField, p: GevreyParams) -> Result<f64> {
    gevrey_norm_sq(f, p).map(f64::sqrt)
}

/// `‖f‖_{H^s}` as the `σ = 0` Gevrey norm.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    gevrey_norm(f, GevreyParams { sigma: 0.0, s }).expect("sigma = 0 never overflows")
}

/// `∫|f|²` by Plancherel.
pub fn l2_norm_sq(f: &SpectralField) -> f64 {
    f.grid().length() * f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// Rectangle-rule quadrature of `|f|^p` over one period, to the power `1/p`.
pub fn lp_norm(f: &SpectralField, p: u32) -> Result<f64> {
    if !matches!(p, 2 | 4 | 6) {
        return Err(Error::Unsupported {
            what: "Lp exponent",
            value: p.to_string(),
        });
    }
    let g = f.grid();
    let s: f64 = f
        .to_physical()
        .iter()
        .map(|c| c.norm_sqr().powi(p as i32 / 2))
        .sum();
    Ok((g.dx() * s).powf(1.0 / p as f64))
}

/// Amplified round-off estimate for `e^{σ|D_x|}` applied to `f`, and whether it
/// stays below `1e-3` of the Gevrey norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrustReport {
    pub sigma: f64,
    pub amplified_roundoff: f64,
    pub norm: f64,
    pub trusted: bool,
}

pub const ROUNDOFF: f64 = 1e-16;
pub const TRUST_FRACTION: f64 = 1e-3;

pub fn trust(f: &SpectralField, sigma: f64) -> Result<TrustReport> {
    let g = f.grid();
    check_exponent(g, sigma)?;
    let xi_eff = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(j, _)| g.wavenumber(j).abs())
        .fold(0.0, f64::max);
    let amplified = ROUNDOFF * f.max_abs() * (sigma * xi_eff).exp() * g.length().sqrt();
    let norm = gevrey_norm(f, GevreyParams { sigma, s: 0.0 })?;
    Ok(TrustReport {
        sigma,
        amplified_roundoff: amplified,
        norm,
        trusted: amplified <= TRUST_FRACTION * norm || norm == 0.0,
    })
}

impl GridSpec {
    /// Largest σ for which round-off at the dealiasing cutoff, amplified by
    /// `e^{σ|ξ|}`, stays below `1e-3` of an order-one norm.
    pub fn trust_radius(&self) -> f64 {
        (TRUST_FRACTION / ROUNDOFF).ln() / (self.dxi() * self.dealias_cutoff() as f64)
    }

    /// Smallest σ whose decay `e^{-σξ}` is visible across the retained band.
    pub fn resolution_floor(&self) -> f64 {
        1.0 / (self.dxi() * self.dealias_cutoff() as f64)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::spectral::grid::make_grid;

    #[test]
    fn single_mode_norm() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let f = SpectralField::from_fn(g, false, |x| Complex64::from_polar(1.0, x));
        for &(sigma, s) in &[(0.0, 0.0), (0.3, 1.0), (1.0, -0.5), (0.2, 2.5)] {
            let got = gevrey_norm(&f, GevreyParams::new(sigma, s).unwrap()).unwrap();
            // box weight L contributes sqrt(2π)
            let expect = (2.0 * PI).sqrt() * 2f64.powf(s) * f64::exp(sigma);
            assert!((got - expect).abs() < 1e-12 * expect, "{sigma} {s}");
        }
    }

    #[test]
    fn parseval() {
        let g = make_grid(64, 5.0).unwrap();
        let f = SpectralField::from_real_fn(g, |x| {
            (-(x - 2.5f64).powi(2)).exp() + 0.1 * (x * 2.0 * PI / 5.0).sin()
        });
        let quad: f64 = f.to_physical().iter().map(|c| c.norm_sqr()).sum::<f64>() * g.dx();
        let n = gevrey_norm(&f, GevreyParams::new(0.0, 0.0).unwrap()).unwrap();
        assert!((n * n - quad).abs() < 1e-12 * quad);
        assert!((lp_norm(&f, 2).unwrap() - n).abs() < 1e-12 * n);
    }

    #[test]
    fn direct_summation_oracle() {
        let g = make_grid(128, 2.0 * PI).unwrap();
        let coeffs: Vec<Complex64> = (0..128)
            .map(|j| Complex64::new((-0.3 * g.wavenumber(j).abs()).exp(), 0.0))
            .collect();
        let f = SpectralField::from_coeffs(g, coeffs, true).unwrap();
        let got = gevrey_norm(&f, GevreyParams::new(0.2, 0.0).unwrap()).unwrap();
        // independent sum over integer modes -64..63 with L = 2π
        let mut s = 0.0;
        for k in -64i64..64 {
            let a = (-0.3 * (k as f64).abs()).exp();
            s += (0.4 * (k as f64).abs()).exp() * a * a;
        }
        let expect = (2.0 * PI * s).sqrt();
        assert!((got - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn lp_examples() {
        let g = make_grid(16, 2.0 * PI).unwrap();
        let one = SpectralField::from_real_fn(g, |_| 1.0);
        assert!((lp_norm(&one, 4).unwrap() - (2.0 * PI).powf(0.25)).abs() < 1e-13);
        let zero = SpectralField::zeros(g, true);
        assert_eq!(lp_norm(&zero, 6).unwrap(), 0.0);
        assert!(lp_norm(&one, 3).is_err());
    }

    #[test]
    fn lp_sech_matches_refined_quadrature() {
        // ∫ sech^4 over R = 4/3; the box is wide enough for the tails to vanish.
        let g = make_grid(512, 60.0).unwrap();
        let f = SpectralField::from_real_fn(g, |x| 1.0 / (x - 30.0).cosh());
        let got = lp_norm(&f, 4).unwrap();
        // refined oracle: composite Simpson on 2e5 panels over the same box
        let m = 200_000usize;
        let h = 60.0 / m as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let x = i as f64 * h;
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * (1.0 / (x - 30.0).cosh()).powi(4);
        }
        let oracle = (acc * h / 3.0).powf(0.25);
        assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
        assert!((oracle.powi(4) - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_negative_sigma_params() {
        assert!(GevreyParams::new(-0.1, 0.0).is_err());
    }

    #[test]
    fn trust_flags_noisy_amplification() {
        let g = make_grid(1024, 2.0 * PI).unwrap();
        let f = SpectralField::from_real_fn(g, |x| 1.0 / (1.2 - x.cos()));
        assert!(trust(&f, 0.05).unwrap().trusted);
        assert!(!trust(&f, 0.5).unwrap().trusted);
    }
}
