use num_complex::Complex64;

use crate::equation::EquationSpec;
use crate::spectral::{fft, SpectralField};

/// Exact linear flow `W(t)`: mode `ξ` picks up `e^{i t φ(ξ)}`.
///
/// This is the group generated by the linear parts of both equations as
/// written (`u_t = -u_xxx`, `v_t = -iα v_xx - β v_xxx`).
pub fn linear_propagate(f: &SpectralField, eq: &EquationSpec, t: f64) -> SpectralField {
    let mut out = f.map_symbol(|xi| Complex64::from_polar(1.0, t * eq.phase(xi)));
    if f.is_real() && eq.real_valued() {
        out.symmetrize();
        out
    } else {
        out.with_reality(false)
    }
}

/// Pure nonlinear right-hand side, computed by physical-space products with
/// half-rule dealiasing.
///
/// mKdV: `-μ u² u_x = -(μ/3) ∂_x(u³)`; tNLS: `-iγ|v|²v`.
pub fn nonlinear_term(f: &SpectralField, eq: &EquationSpec) -> SpectralField {
    let mut out = vec![Complex64::default(); f.grid().n()];
    let mut work = NonlinearWork::new(f.grid().n());
    work.evaluate(f.coeffs(), f.grid(), eq, true, &mut out);
    SpectralField::from_coeffs(*f.grid(), out, f.is_real() && eq.real_valued()).expect("same grid")
}

/// Scratch buffers for repeated nonlinear evaluations.
pub(crate) struct NonlinearWork {
    phys: Vec<Complex64>,
}

impl NonlinearWork {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            phys: vec![Complex64::default(); n],
        }
    }

    pub(crate) fn evaluate(
        &mut self,
        input: &[Complex64],
        grid: &crate::spectral::GridSpec,
        eq: &EquationSpec,
        dealias: bool,
        out: &mut [Complex64],
    ) {
        let n = grid.n();
        let cut = grid.dealias_cutoff();
        self.phys.copy_from_slice(input);
        if dealias {
            for (j, c) in self.phys.iter_mut().enumerate() {
                if grid.mode(j).abs() > cut {
                    *c = Complex64::default();
                }
            }
        }
        fft::inverse_in_place(&mut self.phys);
        match *eq {
            EquationSpec::Mkdv { mu } => {
                for c in self.phys.iter_mut() {
                    let u = c.re;
                    *c = Complex64::new(u * u * u, 0.0);
                }
                fft::forward_in_place(&mut self.phys);
                for j in 0..n {
                    let xi = grid.wavenumber(j);
                    // -(μ/3) i ξ
                    out[j] = self.phys[j] * Complex64::new(0.0, -mu * xi / 3.0);
                }
            }
            EquationSpec::Tnls { gamma, .. } => {
                for c in self.phys.iter_mut() {
                    *c *= c.norm_sqr();
                }
                fft::forward_in_place(&mut self.phys);
                for j in 0..n {
                    out[j] = self.phys[j] * Complex64::new(0.0, -gamma);
                }
            }
        }
        out[grid.unpaired_index()] = Complex64::default();
        if dealias {
            for (j, c) in out.iter_mut().enumerate() {
                if grid.mode(j).abs() > cut {
                    *c = Complex64::default();
                }
            }
        }
    }
}
