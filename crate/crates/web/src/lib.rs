//! Browser bindings: evolve sech data and watch the spectrum and the fitted
//! radius of analyticity.

use gevrey::diagnostics::{estimate_radius, NOISE_FLOOR};
use gevrey::dynamics::{integrate, IntegratorConfig, Trajectory};
use gevrey::experiments::sech;
use gevrey::spectral::{make_grid, SpectralField};
use gevrey::{EquationSpec, Result};
use wasm_bindgen::prelude::*;

fn equation(kind: &str) -> Result<EquationSpec> {
    match kind {
        "mkdv" => Ok(EquationSpec::defocusing_mkdv()),
        "mkdv_focusing" => Ok(EquationSpec::focusing_mkdv()),
        "tnls" => EquationSpec::tnls(1.0, 1.0, 1.0),
        other => Err(gevrey::Error::InvalidParameter(format!(
            "unknown equation '{other}'"
        ))),
    }
}

fn run(
    kind: &str,
    amplitude: f64,
    width: f64,
    n: usize,
    length: f64,
    t_final: f64,
    frames: usize,
) -> Result<Trajectory> {
    let eq = equation(kind)?;
    let grid = make_grid(n, length)?;
    let u0 = sech(grid, amplitude, width, eq.real_valued());
    let cfg = IntegratorConfig::new(1e-3)?;
    integrate(&u0, &eq, &cfg, t_final, t_final / frames.max(1) as f64)
}

fn js_err(e: gevrey::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Physical profiles, `frames + 1` rows of `n` values each (`u` for mKdV,
/// `|v|` for tNLS), flattened row by row.
#[wasm_bindgen]
pub fn evolve(
    kind: &str,
    amplitude: f64,
    width: f64,
    n: usize,
    length: f64,
    t_final: f64,
    frames: usize,
) -> std::result::Result<Vec<f64>, JsValue> {
    let traj = run(kind, amplitude, width, n, length, t_final, frames).map_err(js_err)?;
    Ok(traj
        .states
        .iter()
        .flat_map(|f| {
            f.to_physical()
                .into_iter()
                .map(|z| if f.is_real() { z.re } else { z.norm() })
        })
        .collect())
}

/// `(t, σ̂)` pairs, flattened; σ̂ is NaN where the fit is unresolved.
#[wasm_bindgen]
pub fn radius_series(
    kind: &str,
    amplitude: f64,
    width: f64,
    n: usize,
    length: f64,
    t_final: f64,
    frames: usize,
) -> std::result::Result<Vec<f64>, JsValue> {
    let traj = run(kind, amplitude, width, n, length, t_final, frames).map_err(js_err)?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .flat_map(|(&t, f)| {
            [
                t,
                estimate_radius(f, NOISE_FLOOR).map_or(f64::NAN, |r| r.sigma_hat),
            ]
        })
        .collect())
}

/// Spectrum of the state at `t`: `[σ̂, ξ_0, log10|c_0|, ξ_1, log10|c_1|, ...]`
/// over the nonnegative modes.
#[wasm_bindgen]
pub fn spectrum(
    kind: &str,
    amplitude: f64,
    width: f64,
    n: usize,
    length: f64,
    t: f64,
) -> std::result::Result<Vec<f64>, JsValue> {
    let f: SpectralField = if t > 0.0 {
        run(kind, amplitude, width, n, length, t, 1)
            .map_err(js_err)?
            .states
            .pop()
            .expect("final state")
    } else {
        let eq = equation(kind).map_err(js_err)?;
        sech(
            make_grid(n, length).map_err(js_err)?,
            amplitude,
            width,
            eq.real_valued(),
        )
    };
    let mut out = vec![estimate_radius(&f, NOISE_FLOOR).map_or(f64::NAN, |r| r.sigma_hat)];
    let g = *f.grid();
    for j in 0..n / 2 {
        out.push(g.wavenumber(j));
        out.push(f.coeffs()[j].norm().max(1e-300).log10());
    }
    Ok(out)
}
