use num_complex::Complex64;

use super::propagator::NonlinearWork;
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::{fft, SpaceTimeField, SpectralField, TimeWindow};

/// Last Picard iterate on the sample lattice and the successive-iterate
/// distances (max over samples of the L² distance).
#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub field: SpaceTimeField,
    pub states: Vec<SpectralField>,
    pub distances: Vec<f64>,
}

/// Duhamel fixed-point iteration
/// `w_{j+1}(t) = W(t)u0 + ∫₀ᵗ W(t−t′) N(w_j(t′)) dt′`
/// on `m` uniform samples of `[0, T]`, with the time integral done by
/// cumulative Simpson quadrature in the interaction picture.
pub fn picard_solve(
    u0: &SpectralField,
    eq: &EquationSpec,
    t_final: f64,
    iterations: usize,
    m: usize,
) -> Result<PicardSolution> {
    if iterations < 1 {
        return Err(Error::InvalidParameter(
            "iterations must be at least 1".into(),
        ));
    }
    if m < 8 {
        return Err(Error::InvalidParameter(format!(
            "m = {m} time samples, need at least 8"
        )));
    }
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter("T must be positive".into()));
    }
    let grid = *u0.grid();
    let n = grid.n();
    let h = t_final / (m - 1) as f64;
    let times: Vec<f64> = (0..m).map(|i| i as f64 * h).collect();
    let phase: Vec<f64> = (0..n).map(|j| eq.phase(grid.wavenumber(j))).collect();
    let real = u0.is_real() && eq.real_valued();

    // Interaction-picture values: w(t_i) = W(t_i) a_i.
    let base: Vec<Complex64> = u0.coeffs().to_vec();
    let to_lab = |a: &[Complex64], t: f64| -> Vec<Complex64> {
        a.iter()
            .zip(&phase)
            .map(|(c, &w)| c * Complex64::from_polar(1.0, t * w))
            .collect()
    };
    let mut current: Vec<Vec<Complex64>> = times.iter().map(|&t| to_lab(&base, t)).collect();
    let norm0 = l2(&base, grid.length()).max(f64::MIN_POSITIVE);

    let mut work = NonlinearWork::new(n);
    let mut nl = vec![Complex64::default(); n];
    let mut distances = Vec::with_capacity(iterations);

    for it in 0..iterations {
        // g_i = W(-t_i) N(w(t_i))
        let g: Vec<Vec<Complex64>> = current
            .iter()
            .zip(&times)
            .map(|(w, &t)| {
                work.evaluate(w, &grid, eq, true, &mut nl);
                nl.iter()
                    .zip(&phase)
                    .map(|(c, &p)| c * Complex64::from_polar(1.0, -t * p))
                    .collect()
            })
            .collect();
        let integral = cumulative_simpson(&g, h);
        let next: Vec<Vec<Complex64>> = integral
            .iter()
            .zip(&times)
            .map(|(acc, &t)| {
                let a: Vec<Complex64> = base.iter().zip(acc).map(|(b, i)| b + i).collect();
                let mut w = to_lab(&a, t);
                if real {
                    hermitian(&mut w);
                }
                w
            })
            .collect();
        let mut dist: f64 = 0.0;
        let mut size: f64 = 0.0;
        for (a, b) in next.iter().zip(&current) {
            let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            dist = dist.max(l2(&d, grid.length()));
            size = size.max(l2(a, grid.length()));
        }
        if !size.is_finite() || size > 2.0 * norm0 {
            return Err(Error::Divergence { iteration: it + 1 });
        }
        distances.push(dist);
        current = next;
        if dist <= 1e-15 * norm0 {
            break;
        }
    }

    let states: Vec<SpectralField> = current
        .iter()
        .map(|c| SpectralField::from_coeffs(grid, c.clone(), real))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(m * n);
    for c in &current {
        let mut buf = c.clone();
        fft::inverse_in_place(&mut buf);
        if real {
            buf.iter_mut().for_each(|v| v.im = 0.0);
        }
        values.extend(buf);
    }
    let field = SpaceTimeField::new(grid, times, values, TimeWindow::Hann)?;
    Ok(PicardSolution {
        field,
        states,
        distances,
    })
}

fn l2(c: &[Complex64], length: f64) -> f64 {
    (length * c.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
}

fn hermitian(c: &mut [Complex64]) {
    let n = c.len();
    c[0].im = 0.0;
    for j in 1..n / 2 {
        let m = 0.5 * (c[j] + c[n - j].conj());
        c[j] = m;
        c[n - j] = m.conj();
    }
    c[n / 2] = Complex64::default();
}

/// `I_i = ∫₀^{t_i} g` on a uniform lattice, exact for cubics: Simpson on
/// even indices, the 3/8 rule over the last three intervals on odd
/// indices, and a four-point rule for the first interval. Needs `m ≥ 4`.
fn cumulative_simpson(g: &[Vec<Complex64>], h: f64) -> Vec<Vec<Complex64>> {
    let m = g.len();
    let n = g[0].len();
    let mut out = vec![vec![Complex64::default(); n]; m];
    for i in 1..m {
        for j in 0..n {
            out[i][j] = if i == 1 {
                h / 24.0 * (9.0 * g[0][j] + 19.0 * g[1][j] - 5.0 * g[2][j] + g[3][j])
            } else if i % 2 == 0 {
                out[i - 2][j] + h / 3.0 * (g[i - 2][j] + 4.0 * g[i - 1][j] + g[i][j])
            } else {
                out[i - 3][j]
                    + 3.0 * h / 8.0
                        * (g[i - 3][j] + 3.0 * g[i - 2][j] + 3.0 * g[i - 1][j] + g[i][j])
            };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_cubics_exactly() {
        let m = 9;
        let h = 0.1;
        let g: Vec<Vec<Complex64>> = (0..m)
            .map(|i| {
                let t = i as f64 * h;
                vec![Complex64::new(t * t * t - 2.0 * t + 1.0, t * t)]
            })
            .collect();
        let out = cumulative_simpson(&g, h);
        for (i, v) in out.iter().enumerate() {
            let t = i as f64 * h;
            let re = t.powi(4) / 4.0 - t * t + t;
            let im = t.powi(3) / 3.0;
            assert!((v[0].re - re).abs() < 1e-14, "{i}");
            assert!((v[0].im - im).abs() < 1e-14, "{i}");
        }
    }
}
