use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Largest admissible `|σ| · ξ_max` for the Gevrey multiplier, in natural-log
/// units.
pub const EXPONENT_CAP: f64 = 600.0;

/// Fourier coefficients of a periodic field.
///
/// Coefficients follow the single-mode amplitude convention: the physical
/// field is `f(x) = Σ_k c_k e^{i ξ_k x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, real: bool) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n()],
            real,
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs, real })
    }

    /// Transform complex physical samples at the grid points.
    pub fn from_physical(grid: GridSpec, samples: &[Complex64], real: bool) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                got: samples.len(),
            });
        }
        let mut coeffs = samples.to_vec();
        fft::forward_in_place(&mut coeffs);
        let mut f = Self { grid, coeffs, real };
        if real {
            f.symmetrize();
        }
        Ok(f)
    }

    pub fn from_real_samples(grid: GridSpec, samples: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_physical(grid, &c, true)
    }

    /// Sample a closure at the grid points.
    pub fn from_fn(grid: GridSpec, real: bool, f: impl Fn(f64) -> Complex64) -> Self {
        let samples: Vec<Complex64> = grid.points().into_iter().map(f).collect();
        Self::from_physical(grid, &samples, real).expect("sample count matches grid")
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, true, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn with_reality(mut self, real: bool) -> Self {
        self.real = real;
        if real {
            self.symmetrize();
        }
        self
    }

    /// Coefficient of mode `k`, zero when `k` is off the grid.
    pub fn mode(&self, k: i64) -> Complex64 {
        self.grid
            .index_of(k)
            .map(|j| self.coeffs[j])
            .unwrap_or_default()
    }

    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        fft::inverse_in_place(&mut buf);
        buf
    }

    /// Real part of the physical samples.
    pub fn to_real_physical(&self) -> Vec<f64> {
        self.to_physical().into_iter().map(|c| c.re).collect()
    }

    /// Multiply each coefficient by a symbol evaluated at its wavenumber.
    pub fn map_symbol(&self, symbol: impl Fn(f64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * symbol(self.grid.wavenumber(j)))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
            real: self.real,
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            real: self.real && a.im == 0.0,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            real: self.real && other.real,
        })
    }

    /// Multiply mode `k` by `(iξ_k)^order`. The unpaired mode is zeroed.
    pub fn derivative(&self, order: u32) -> Result<Self> {
        if !(1..=3).contains(&order) {
            return Err(Error::Unsupported {
                what: "derivative order",
                value: order.to_string(),
            });
        }
        let mut out = self.map_symbol(|xi| Complex64::new(0.0, xi).powu(order));
        out.coeffs[self.grid.unpaired_index()] = Complex64::new(0.0, 0.0);
        Ok(out)
    }

    /// Multiply mode `k` by `e^{σ|ξ_k|}`; negative `σ` smooths.
    pub fn gevrey(&self, sigma: f64) -> Result<Self> {
        check_exponent(&self.grid, sigma)?;
        Ok(self.map_symbol(|xi| Complex64::new((sigma * xi.abs()).exp(), 0.0)))
    }

    /// Half-rule projection: keep `|k| <= n/4`.
    pub fn dealias(&self) -> Self {
        let cut = self.grid.dealias_cutoff();
        let mut out = self.clone();
        for (j, c) in out.coeffs.iter_mut().enumerate() {
            if self.grid.mode(j).abs() > cut {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Enforce `c_{-k} = conj(c_k)` and zero the unpaired mode.
    pub fn symmetrize(&mut self) {
        let n = self.grid.n();
        self.coeffs[0].im = 0.0;
        for j in 1..n / 2 {
            let a = self.coeffs[j];
            let b = self.coeffs[n - j].conj();
            let m = 0.5 * (a + b);
            self.coeffs[j] = m;
            self.coeffs[n - j] = m.conj();
        }
        self.coeffs[n / 2] = Complex64::new(0.0, 0.0);
    }

    /// Largest relative violation of Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = self.coeffs[0].im.abs();
        for j in 1..n / 2 {
            worst = worst.max((self.coeffs[j] - self.coeffs[n - j].conj()).norm());
        }
        worst / scale
    }

    /// Reflection `x -> -x`: `c_k -> c_{-k}`.
    pub fn reflect(&self) -> Self {
        let n = self.grid.n();
        let mut out = self.clone();
        for j in 1..n {
            out.coeffs[j] = self.coeffs[n - j];
        }
        out.coeffs[n / 2] = self.coeffs[n / 2];
        out
    }

    /// Translation `f(x) -> f(x - shift)`.
    pub fn translate(&self, shift: f64) -> Self {
        self.map_symbol(|xi| Complex64::from_polar(1.0, -xi * shift))
    }

    pub fn conj_physical(&self) -> Self {
        let n = self.grid.n();
        let mut out = self.clone();
        for j in 0..n {
            let mirror = (n - j) % n;
            out.coeffs[j] = self.coeffs[mirror].conj();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Max-norm distance between physical samples.
    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.to_physical().iter().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

pub(crate) fn check_exponent(grid: &GridSpec, sigma: f64) -> Result<()> {
    let exponent = sigma.abs() * grid.xi_max();
    if !sigma.is_finite() || exponent > EXPONENT_CAP {
        return Err(Error::Overflow {
            exponent,
            cap: EXPONENT_CAP,
        });
    }
    Ok(())
}

pub fn to_spectral(grid: GridSpec, samples: &[Complex64], real: bool) -> Result<SpectralField> {
    SpectralField::from_physical(grid, samples, real)
}

pub fn to_physical(f: &SpectralField) -> Vec<Complex64> {
    f.to_physical()
}

pub fn apply_derivative(f: &SpectralField, order: u32) -> Result<SpectralField> {
    f.derivative(order)
}

pub fn apply_gevrey(f: &SpectralField, sigma: f64) -> Result<SpectralField> {
    f.gevrey(sigma)
}

pub fn dealias(f: &SpectralField) -> SpectralField {
    f.dealias()
}
