use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `σ ≈ coefficient · T^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub r_squared: f64,
    /// Smallest and largest T used.
    pub range: (f64, f64),
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Least squares of `ln σ` against `ln T` over points with `T > 0`, `σ > 0`
/// and `T` inside `range` (inclusive) when given.
pub fn fit_power_law(series: &[(f64, f64)], range: Option<(f64, f64)>) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(t, s)| t > 0.0 && s > 0.0 && t.is_finite() && s.is_finite())
        .filter(|&&(t, _)| range.map_or(true, |(lo, hi)| t >= lo && t <= hi))
        .map(|&(t, s)| (t.ln(), s.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all fit points share one T".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    // A flat series is fitted exactly by slope 0.
    let r_squared = if syy <= f64::EPSILON * f64::EPSILON * n {
        1.0
    } else {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    Ok(PowerLawFit {
        exponent: slope,
        coefficient: intercept.exp(),
        r_squared,
        range: (lo.exp(), hi.exp()),
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructed_power_law() {
        let s: Vec<(f64, f64)> = (1..=10)
            .map(|i| {
                let t = i as f64 * 3.0;
                (t, 2.0 * t.powf(-4.0 / 3.0))
            })
            .collect();
        let fit = fit_power_law(&s, None).unwrap();
        assert!((fit.exponent + 4.0 / 3.0).abs() < 1e-10);
        assert!((fit.coefficient - 2.0).abs() < 1e-10);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert_eq!(fit.points, 10);
    }

    #[test]
    fn constant_series() {
        let s: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 0.3)).collect();
        let fit = fit_power_law(&s, None).unwrap();
        assert_eq!(fit.exponent, 0.0);
        assert!((fit.coefficient - 0.3).abs() < 1e-15);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn too_few_points() {
        let s: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 1.0 / i as f64)).collect();
        assert!(matches!(
            fit_power_law(&s, Some((1.0, 4.0))),
            Err(Error::TooFewPoints(4))
        ));
        assert!(matches!(
            fit_power_law(&s[..3], None),
            Err(Error::TooFewPoints(3))
        ));
    }
}
