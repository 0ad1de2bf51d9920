use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::GridSpec;
use super::norms::bracket;
use crate::equation::EquationSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeWindow {
    /// Periodic raised cosine `sin²(π r / m)`.
    Hann,
    Boxcar,
}

impl TimeWindow {
    pub fn weights(&self, m: usize) -> Vec<f64> {
        match self {
            Self::Boxcar => vec![1.0; m],
            Self::Hann => (0..m)
                .map(|r| (std::f64::consts::PI * r as f64 / m as f64).sin().powi(2))
                .collect(),
        }
    }
}

/// Physical-space samples on a uniform `(t, x)` lattice, row-major with one
/// row per time instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeField {
    grid: GridSpec,
    times: Vec<f64>,
    values: Vec<Complex64>,
    window: Vec<f64>,
}

impl SpaceTimeField {
    pub fn new(
        grid: GridSpec,
        times: Vec<f64>,
        values: Vec<Complex64>,
        window: TimeWindow,
    ) -> Result<Self> {
        let m = times.len();
        if m < 8 {
            return Err(Error::InvalidParameter(format!(
                "degenerate time axis: {m} samples (need at least 8)"
            )));
        }
        if values.len() != m * grid.n() {
            return Err(Error::LengthMismatch {
                expected: m * grid.n(),
                got: values.len(),
            });
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(
                "times must be strictly increasing".into(),
            ));
        }
        for w in times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1.0) {
                return Err(Error::InvalidParameter(
                    "times must be uniformly spaced".into(),
                ));
            }
        }
        Ok(Self {
            grid,
            times,
            window: window.weights(m),
            values,
        })
    }

    pub fn from_fn(
        grid: GridSpec,
        times: Vec<f64>,
        window: TimeWindow,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let xs = grid.points();
        let values = times
            .iter()
            .flat_map(|&t| xs.iter().map(move |&x| (t, x)))
            .map(|(t, x)| f(t, x))
            .collect();
        Self::new(grid, times, values, window)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn window(&self) -> &[f64] {
        &self.window
    }

    pub fn m(&self) -> usize {
        self.times.len()
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// Row of physical samples at time index `r`.
    pub fn row(&self, r: usize) -> &[Complex64] {
        let n = self.grid.n();
        &self.values[r * n..(r + 1) * n]
    }

    /// Largest pointwise difference from another field on the same lattice.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid || self.times.len() != other.times.len() {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Windowed 2-D transform; entry `(q, j)` is the amplitude of
    /// `e^{i(ξ_j x + τ_q t)}` with `τ_q = 2π q / (m dt)` in FFT order.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let n = self.grid.n();
        let m = self.m();
        let mut data = self.values.clone();
        for (r, row) in data.chunks_exact_mut(n).enumerate() {
            let w = self.window[r];
            row.iter_mut().for_each(|c| *c *= w);
        }
        fft::forward_2d(&mut data, m, n);
        data
    }

    pub fn frequency(&self, q: usize) -> f64 {
        let m = self.m() as i64;
        let q = q as i64;
        let qq = if q < m / 2 { q } else { q - m };
        2.0 * std::f64::consts::PI * qq as f64 / (m as f64 * self.dt())
    }
}

/// Discrete `X^{s,b}` norm:
/// `( L·T Σ ⟨ξ⟩^{2s} ⟨τ − φ(ξ)⟩^{2b} |ĉ(ξ,τ)|² )^{1/2}` with `T = m·dt`.
pub fn xsb_norm(field: &SpaceTimeField, s: f64, b: f64, eq: &EquationSpec) -> Result<f64> {
    if !(b > -1.0 && b < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "b = {b} must lie in (-1, 1)"
        )));
    }
    let g = field.grid();
    let n = g.n();
    let m = field.m();
    let spec = field.spectrum();
    let mut sum = 0.0;
    for q in 0..m {
        let tau = field.frequency(q);
        for j in 0..n {
            let c = spec[q * n + j];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let xi = g.wavenumber(j);
            sum += bracket(xi).powf(2.0 * s)
                * bracket(tau - eq.phase(xi)).powf(2.0 * b)
                * c.norm_sqr();
        }
    }
    let span = m as f64 * field.dt();
    Ok((g.length() * span * sum).sqrt())
}
