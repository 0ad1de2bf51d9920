use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Lowest |k| admitted into the slope fit.
pub const K_MIN: i64 = 4;
/// Default relative noise floor.
pub const NOISE_FLOOR: f64 = 1e-13;
/// Minimum number of modes for a fit.
pub const MIN_MODES: usize = 8;

/// Exponential-decay fit of the spectrum, `|c_k| ~ A e^{-σ̂ |ξ_k|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusFit {
    pub sigma_hat: f64,
    /// Smallest and largest |k| among the fitted modes.
    pub fit_range: (i64, i64),
    pub modes_used: usize,
    /// Weighted rms residual of `ln|c_k|` about the line.
    pub residual: f64,
    /// Absolute cutoff used.
    pub noise_floor: f64,
    /// The spectrum drops below the floor well before the fitted line does.
    pub super_exponential: bool,
}

/// Fit `ln|c_k|` against `|ξ_k|` over modes with `|k| ≥ K_MIN` and
/// `|c_k| > noise_floor · max|c|` (the unpaired mode is skipped). Weights are
/// `ln(|c_k|/floor)`, so modes near the floor count little.
pub fn estimate_radius(f: &SpectralField, noise_floor: f64) -> Result<RadiusFit> {
    if !(noise_floor > 0.0 && noise_floor < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "noise floor {noise_floor} must lie in (0, 1)"
        )));
    }
    let g = f.grid();
    let floor = noise_floor * f.max_abs();
    let unpaired = g.unpaired_index();
    let mut pts = Vec::new();
    let mut kmin = i64::MAX;
    let mut kmax = 0;
    for (j, c) in f.coeffs().iter().enumerate() {
        let k = g.mode(j);
        let a = c.norm();
        if j == unpaired || k.abs() < K_MIN || !(a > floor) {
            continue;
        }
        kmin = kmin.min(k.abs());
        kmax = kmax.max(k.abs());
        pts.push((g.wavenumber(j).abs(), a.ln(), (a / floor).ln()));
    }
    if pts.len() < MIN_MODES || floor == 0.0 {
        return Err(Error::UnresolvedRadius { modes: pts.len() });
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::UnresolvedRadius { modes: pts.len() });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / sw)
        .sqrt();

    let next = kmax + 1;
    let super_exponential = match (g.index_of(next), g.index_of(-next)) {
        (Some(a), Some(b)) if a != unpaired && b != unpaired => {
            let observed = f.coeffs()[a].norm().max(f.coeffs()[b].norm());
            let predicted = intercept + slope * g.dxi() * next as f64;
            !(observed > floor) && predicted > floor.ln() + 2.0
        }
        _ => false,
    };

    Ok(RadiusFit {
        sigma_hat: (-slope).max(0.0),
        fit_range: (kmin, kmax),
        modes_used: pts.len(),
        residual,
        noise_floor: floor,
        super_exponential,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn exact_exponential() {
        let g = make_grid(128, 2.0 * PI).unwrap();
        let coeffs: Vec<Complex64> = (0..128)
            .map(|j| Complex64::new((-0.5 * g.wavenumber(j).abs()).exp(), 0.0))
            .collect();
        let f = SpectralField::from_coeffs(g, coeffs, true).unwrap();
        let fit = estimate_radius(&f, NOISE_FLOOR).unwrap();
        assert!((fit.sigma_hat - 0.5).abs() < 1e-10);
        assert!(fit.residual < 1e-10);
        assert!(fit.modes_used >= MIN_MODES);
    }

    #[test]
    fn band_limited_is_unresolved_or_flagged() {
        let g = make_grid(128, 2.0 * PI).unwrap();
        let f = SpectralField::from_real_fn(g, |x| (3.0 * x).cos() + 0.2 * (7.0 * x).sin());
        assert!(matches!(
            estimate_radius(&f, NOISE_FLOOR),
            Err(Error::UnresolvedRadius { .. })
        ));

        let coeffs: Vec<Complex64> = (0..128)
            .map(|j| {
                let k = g.mode(j).abs();
                if k <= 20 {
                    Complex64::new(1.0 / (1.0 + k as f64), 0.0)
                } else {
                    Complex64::default()
                }
            })
            .collect();
        let f = SpectralField::from_coeffs(g, coeffs, true).unwrap();
        let fit = estimate_radius(&f, NOISE_FLOOR).unwrap();
        assert!(fit.super_exponential);
    }

    #[test]
    fn poisson_kernel() {
        let g = make_grid(256, 2.0 * PI).unwrap();
        let r = (-0.4f64).exp();
        let f =
            SpectralField::from_real_fn(g, |x| (1.0 - r * r) / (1.0 - 2.0 * r * x.cos() + r * r));
        let fit = estimate_radius(&f, NOISE_FLOOR).unwrap();
        assert!((fit.sigma_hat - 0.4).abs() < 0.02, "{fit:?}");
        assert!(!fit.super_exponential);
    }

    #[test]
    fn rejects_bad_floor() {
        let g = make_grid(16, 1.0).unwrap();
        assert!(estimate_radius(&SpectralField::zeros(g, true), 0.0).is_err());
        assert!(estimate_radius(&SpectralField::zeros(g, true), NOISE_FLOOR).is_err());
    }
}
