use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, length)` with `n` collocation points.
///
/// Coefficient arrays are stored in FFT order: index `j < n/2` holds mode
/// `k = j`, index `j >= n/2` holds mode `k = j - n`. Index `n/2` is the
/// unpaired mode `-n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 8"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "length = {length} must be positive"
            )));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Wavenumber spacing `2π/L`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Integer mode number stored at array index `j`.
    pub fn mode(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Array index of mode `k`, if `k` is on the grid.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            return None;
        }
        Some(if k >= 0 {
            k as usize
        } else {
            (k + self.n as i64) as usize
        })
    }

    /// Physical wavenumber `ξ_j = 2π k_j / L`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.dxi() * self.mode(j) as f64
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// Largest |ξ| on the grid (the unpaired mode).
    pub fn xi_max(&self) -> f64 {
        self.dxi() * (self.n / 2) as f64
    }

    /// Index of the unpaired mode `-n/2`.
    pub fn unpaired_index(&self) -> usize {
        self.n / 2
    }

    pub fn x(&self, j: usize) -> f64 {
        self.dx() * j as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Highest retained mode under the half rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 4) as i64
    }
}

/// Convenience constructor matching the free-function style used by the CLI.
pub fn make_grid(n: usize, length: f64) -> Result<GridSpec> {
    GridSpec::new(n, length)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_box_wavenumbers() {
        let g = make_grid(8, 2.0 * PI).unwrap();
        let mut xi = g.wavenumbers();
        xi.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        for (a, b) in xi.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn spacing_half_on_double_box() {
        let g = make_grid(8, 4.0 * PI).unwrap();
        assert!((g.dxi() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(make_grid(7, 1.0), Err(Error::InvalidGrid(_))));
        assert!(make_grid(4, 1.0).is_err());
        assert!(make_grid(16, 0.0).is_err());
        assert!(make_grid(16, -1.0).is_err());
    }

    #[test]
    fn index_mode_roundtrip() {
        let g = make_grid(16, 1.0).unwrap();
        for j in 0..16 {
            assert_eq!(g.index_of(g.mode(j)), Some(j));
        }
        assert_eq!(g.mode(g.unpaired_index()), -8);
        assert_eq!(g.index_of(8), None);
    }
}
