//! Thin wrappers over `rustfft` with per-thread plan caches.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// In-place forward transform scaled by `1/n`, so a pure exponential
/// `e^{i ξ_k x}` maps to a unit coefficient at mode `k`.
pub fn forward_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    forward_plan(n).process(buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
}

/// In-place inverse transform (no scaling): evaluates the mode sum at the
/// collocation points.
pub fn inverse_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    inverse_plan(n).process(buf);
}

/// Forward 2-D transform of a row-major `rows x cols` array (rows = time,
/// cols = space), scaled by `1/(rows*cols)`.
pub fn forward_2d(data: &mut [Complex64], rows: usize, cols: usize) {
    assert_eq!(data.len(), rows * cols);
    for r in data.chunks_exact_mut(cols) {
        forward_in_place(r);
    }
    transform_columns(data, rows, cols, true);
}

/// Inverse of [`forward_2d`].
pub fn inverse_2d(data: &mut [Complex64], rows: usize, cols: usize) {
    assert_eq!(data.len(), rows * cols);
    for r in data.chunks_exact_mut(cols) {
        inverse_in_place(r);
    }
    transform_columns(data, rows, cols, false);
}

fn transform_columns(data: &mut [Complex64], rows: usize, cols: usize, forward: bool) {
    let mut col = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            col[r] = data[r * cols + c];
        }
        if forward {
            forward_in_place(&mut col);
        } else {
            inverse_in_place(&mut col);
        }
        for r in 0..rows {
            data[r * cols + c] = col[r];
        }
    }
}
