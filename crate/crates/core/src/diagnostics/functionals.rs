//! Conserved and almost-conserved functionals.

use num_complex::Complex64;

use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::{l2_norm_sq, lp_norm, SpectralField};

/// `∫ u²` (real fields) by Plancherel.
pub fn mass(f: &SpectralField) -> f64 {
    l2_norm_sq(f)
}

/// `∫ |v|²`.
pub fn tnls_mass(f: &SpectralField) -> f64 {
    l2_norm_sq(f)
}

/// `∫ (u_x² − (μ/6) u⁴)`.
pub fn energy_mkdv(f: &SpectralField, mu: f64) -> Result<f64> {
    if !f.is_real() {
        return Err(Error::InvalidParameter(
            "mKdV energy needs a real field".into(),
        ));
    }
    let grad = l2_norm_sq(&f.derivative(1)?);
    let quartic = lp_norm(f, 4)?.powi(4);
    Ok(grad - mu / 6.0 * quartic)
}

/// `∫ v · conj(∂_x v)`; purely imaginary, `-i L Σ ξ_k |c_k|²`.
pub fn tnls_momentum(f: &SpectralField) -> Complex64 {
    let g = f.grid();
    let u = g.unpaired_index();
    let s: f64 = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != u)
        .map(|(j, c)| g.wavenumber(j) * c.norm_sqr())
        .sum();
    Complex64::new(0.0, -g.length() * s)
}

/// Quadratic part of `E_σ`: `∫ U² + ∫ U_x²` with `U = e^{σ|D_x|} f`.
///
/// The `1 + ξ²` weight makes `E_0` the sum of the mass and the energy, so the
/// `σ = 0` value is exactly conserved.
pub fn energy_quadratic(f: &SpectralField, sigma: f64) -> Result<f64> {
    let u = f.gevrey(sigma)?;
    Ok(mass(&u) + l2_norm_sq(&u.derivative(1)?))
}

/// `E_σ = ∫U² + ∫U_x² − (μ/6)∫U⁴` with `U = e^{σ|D_x|} f`.
pub fn gevrey_energy(f: &SpectralField, sigma: f64, mu: f64) -> Result<f64> {
    let u = f.gevrey(sigma)?;
    Ok(mass(&u) + energy_mkdv(&u, mu)?)
}

/// `M_σ = ∫ |e^{σ|D_x|} v|²`.
pub fn gevrey_mass(f: &SpectralField, sigma: f64) -> Result<f64> {
    Ok(tnls_mass(&f.gevrey(sigma)?))
}

/// The almost-conserved quantity tracked for an equation: `E_σ` for mKdV,
/// `M_σ` for tNLS.
pub fn almost_conserved(f: &SpectralField, sigma: f64, eq: &EquationSpec) -> Result<f64> {
    match *eq {
        EquationSpec::Mkdv { mu } => gevrey_energy(f, sigma, mu),
        EquationSpec::Tnls { .. } => gevrey_mass(f, sigma),
    }
}

/// The exactly conserved counterpart of [`almost_conserved`] at `σ = 0`.
pub fn conserved_anchor(f: &SpectralField, eq: &EquationSpec) -> Result<f64> {
    match *eq {
        EquationSpec::Mkdv { mu } => Ok(mass(f) + energy_mkdv(f, mu)?),
        EquationSpec::Tnls { .. } => Ok(tnls_mass(f)),
    }
}

/// Commutator defect between the Gevrey multiplier and the nonlinearity:
///
/// mKdV: `F(U) = (μ/3) ∂_x[U³ − e^{σ|D|}((e^{−σ|D|}U)³)]`
/// tNLS: `G(V) = −[|V|²V − e^{σ|D|}(|e^{−σ|D|}V|² e^{−σ|D|}V)]`
pub fn commutator_residual(
    f: &SpectralField,
    sigma: f64,
    eq: &EquationSpec,
) -> Result<SpectralField> {
    let grid = *f.grid();
    let u = f.dealias();
    let smooth = u.gevrey(-sigma)?;
    let cube = |g: &SpectralField| -> SpectralField {
        let phys = g.to_physical();
        let prod: Vec<Complex64> = match eq {
            EquationSpec::Mkdv { .. } => phys.iter().map(|c| c * c * c).collect(),
            EquationSpec::Tnls { .. } => phys.iter().map(|c| c * c.norm_sqr()).collect(),
        };
        SpectralField::from_physical(grid, &prod, f.is_real())
            .expect("grid length")
            .dealias()
    };
    let direct = cube(&u);
    let conjugated = cube(&smooth).gevrey(sigma)?;
    let diff = direct.sub(&conjugated)?;
    let mut out = match *eq {
        EquationSpec::Mkdv { mu } => diff.derivative(1)?.scale(Complex64::new(mu / 3.0, 0.0)),
        EquationSpec::Tnls { .. } => diff.scale(Complex64::new(-1.0, 0.0)),
    };
    out.coeffs_mut()[grid.unpaired_index()] = Complex64::default();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{make_grid, GridSpec};

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    /// Composite Simpson on `[a, b]` with `panels` (even) panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut acc = f(a) + f(b);
        for i in 1..panels {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    fn soliton_grid() -> GridSpec {
        make_grid(1024, 40.0 * PI).unwrap()
    }

    #[test]
    fn mass_examples() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        assert_eq!(mass(&SpectralField::zeros(g, true)), 0.0);
        let e = SpectralField::from_fn(g, false, |x| Complex64::from_polar(1.0, x));
        assert!((tnls_mass(&e) - 2.0 * PI).abs() < 1e-13);
        let sg = soliton_grid();
        let half = sg.length() / 2.0;
        let sol = SpectralField::from_real_fn(sg, |x| 6f64.sqrt() * sech(x - half));
        let oracle = simpson(|x| 6.0 * sech(x).powi(2), -half, half, 400_000);
        assert!((oracle - 12.0).abs() < 1e-9);
        assert!((mass(&sol) - oracle).abs() < 1e-8);
    }

    #[test]
    fn energy_examples() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        assert_eq!(
            energy_mkdv(&SpectralField::zeros(g, true), -1.0).unwrap(),
            0.0
        );
        let c = 1.3;
        let konst = SpectralField::from_real_fn(g, |_| c);
        let e = energy_mkdv(&konst, -1.0).unwrap();
        assert!((e - c.powi(4) / 6.0 * 2.0 * PI).abs() < 1e-12);

        let sg = soliton_grid();
        let half = sg.length() / 2.0;
        let sol = SpectralField::from_real_fn(sg, |x| 6f64.sqrt() * sech(x - half));
        let grad = simpson(|x| 6.0 * (sech(x) * x.tanh()).powi(2), -half, half, 400_000);
        let quart = simpson(|x| 36.0 * sech(x).powi(4) / 6.0, -half, half, 400_000);
        assert!((grad - 4.0).abs() < 1e-9 && (quart - 8.0).abs() < 1e-9);
        assert!((energy_mkdv(&sol, 1.0).unwrap() - (grad - quart)).abs() < 1e-6);

        let complex = SpectralField::zeros(g, false);
        assert!(energy_mkdv(&complex, 1.0).is_err());
    }

    #[test]
    fn momentum_examples() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let even = SpectralField::from_real_fn(g, |x| (x).cos() + 0.5 * (3.0 * x).cos());
        assert!(tnls_momentum(&even).norm() < 1e-13);
        let a = Complex64::new(0.7, 0.4);
        let k = 3.0;
        let w = SpectralField::from_fn(g, false, |x| a * Complex64::from_polar(1.0, k * x));
        let expect = Complex64::new(0.0, -k) * a.norm_sqr() * 2.0 * PI;
        assert!((tnls_momentum(&w) - expect).norm() < 1e-12);
    }

    #[test]
    fn momentum_matches_quadrature() {
        let g = make_grid(128, 10.0).unwrap();
        let f = SpectralField::from_fn(g, false, |x| {
            let y = x - 5.0;
            Complex64::new(
                (-y * y).exp(),
                0.4 * (-(y - 1.0).powi(2)).exp() * (2.0 * y).sin(),
            )
        });
        // quadrature oracle: finite-difference-free, derivative of the
        // closed form evaluated analytically
        let dv = |x: f64| {
            let y = x - 5.0;
            let re = -2.0 * y * (-y * y).exp();
            let e = (-(y - 1.0).powi(2)).exp();
            let im = 0.4 * (-2.0 * (y - 1.0) * e * (2.0 * y).sin() + e * 2.0 * (2.0 * y).cos());
            Complex64::new(re, im)
        };
        let v = |x: f64| {
            let y = x - 5.0;
            Complex64::new(
                (-y * y).exp(),
                0.4 * (-(y - 1.0).powi(2)).exp() * (2.0 * y).sin(),
            )
        };
        let m = 200_000;
        let h = 10.0 / m as f64;
        let mut acc = Complex64::default();
        for i in 0..m {
            let x = i as f64 * h;
            acc += v(x) * dv(x).conj();
        }
        acc *= h;
        assert!(
            (tnls_momentum(&f) - acc).norm() < 1e-10,
            "{} vs {}",
            tnls_momentum(&f),
            acc
        );
    }

    #[test]
    fn sigma_zero_reduction_is_bitwise() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let f = SpectralField::from_real_fn(g, |x| 0.3 * x.sin() + 0.5 * (2.0 * x).cos());
        let e0 = gevrey_energy(&f, 0.0, -1.0).unwrap();
        let anchor = mass(&f) + energy_mkdv(&f, -1.0).unwrap();
        assert_eq!(e0, anchor);
        let v = SpectralField::from_fn(g, false, |x| Complex64::new(x.sin(), (2.0 * x).cos()));
        assert_eq!(gevrey_mass(&v, 0.0).unwrap(), tnls_mass(&v));
        assert_eq!(
            gevrey_energy(&SpectralField::zeros(g, true), 0.3, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn defocusing_energy_dominates_quadratic_part() {
        let g = make_grid(64, 2.0 * PI).unwrap();
        let f = SpectralField::from_real_fn(g, |x| 1.0 / (1.5 - x.cos()));
        for &s in &[0.0, 0.1, 0.3] {
            assert!(gevrey_energy(&f, s, -1.0).unwrap() >= energy_quadratic(&f, s).unwrap());
        }
    }

    #[test]
    fn residual_vanishes_at_sigma_zero_and_single_mode() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let f = SpectralField::from_real_fn(g, |x| 0.3 * x.sin() + 0.5 * (2.0 * x).cos());
        let m = EquationSpec::defocusing_mkdv();
        let t = EquationSpec::tnls(1.0, 1.0, 1.0).unwrap();
        assert!(commutator_residual(&f, 0.0, &m).unwrap().max_abs() < 1e-15);
        assert!(commutator_residual(&f, 0.0, &t).unwrap().max_abs() < 1e-15);
        // (k, k, k) is the equality case of the exponent inequality; the
        // conjugated product (k, k, -k) is not
        let single = SpectralField::from_fn(g, false, |x| Complex64::from_polar(0.8, 2.0 * x));
        assert!(commutator_residual(&single, 0.4, &m).unwrap().max_abs() < 1e-14);
        assert!(commutator_residual(&single, 0.4, &t).unwrap().max_abs() > 1e-3);
    }

    /// Direct triple convolution of the residual over retained modes.
    fn residual_oracle(f: &SpectralField, sigma: f64, eq: &EquationSpec) -> Vec<(i64, Complex64)> {
        let g = f.grid();
        let cut = g.dealias_cutoff();
        let modes: Vec<(i64, Complex64)> = (0..g.n())
            .map(|j| (g.mode(j), f.coeffs()[j]))
            .filter(|(k, c)| k.abs() <= cut && c.norm() > 0.0)
            .collect();
        let xi = |k: i64| g.dxi() * k as f64;
        let mut out = Vec::new();
        for k in -cut..=cut {
            let mut acc = Complex64::default();
            for &(k1, c1) in &modes {
                for &(k2, c2) in &modes {
                    for &(k3, c3) in &modes {
                        let (target, prod, weight) = match eq {
                            EquationSpec::Mkdv { .. } => (
                                k1 + k2 + k3,
                                c1 * c2 * c3,
                                xi(k1).abs() + xi(k2).abs() + xi(k3).abs(),
                            ),
                            EquationSpec::Tnls { .. } => (
                                k1 + k2 - k3,
                                c1 * c2 * c3.conj(),
                                xi(k1).abs() + xi(k2).abs() + xi(k3).abs(),
                            ),
                        };
                        if target == k {
                            let factor = 1.0 - (sigma * (xi(k).abs() - weight)).exp();
                            acc += prod * factor;
                        }
                    }
                }
            }
            let val = match *eq {
                EquationSpec::Mkdv { mu } => Complex64::new(0.0, xi(k)) * acc * (mu / 3.0),
                EquationSpec::Tnls { .. } => -acc,
            };
            out.push((k, val));
        }
        out
    }

    #[test]
    fn two_mode_residual_matches_convolution_oracle() {
        let g = make_grid(32, 2.0 * PI).unwrap();
        let sigma = 0.35;
        let f = SpectralField::from_real_fn(g, |x| 0.7 * (3.0 * x).cos());
        for eq in [
            EquationSpec::defocusing_mkdv(),
            EquationSpec::tnls(1.0, 1.0, 1.0).unwrap(),
        ] {
            let got = commutator_residual(&f, sigma, &eq).unwrap();
            assert!(got.max_abs() > 1e-3);
            for (k, v) in residual_oracle(&f, sigma, &eq) {
                assert!(
                    (got.mode(k) - v).norm() < 1e-10,
                    "{k} {} {}",
                    got.mode(k),
                    v
                );
            }
        }
        let v = SpectralField::from_fn(g, false, |x| {
            Complex64::from_polar(0.5, 2.0 * x) + Complex64::from_polar(0.3, -5.0 * x + 1.0)
        });
        let eq = EquationSpec::tnls(1.0, 1.0, 1.0).unwrap();
        let got = commutator_residual(&v, sigma, &eq).unwrap();
        for (k, w) in residual_oracle(&v, sigma, &eq) {
            assert!((got.mode(k) - w).norm() < 1e-10);
        }
    }
}
