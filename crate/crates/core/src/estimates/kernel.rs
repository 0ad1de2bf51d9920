use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{chunk_rng, map_chunks};
use crate::equation::EquationSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    /// Half-width of the box in `(ξ_i, τ_i − φ(ξ_i))` reported as the
    /// truncated part; the remainder is reported as the tail.
    pub truncation: f64,
    /// Tail exponent of the Cauchy-like proposal factors; `None` uses `2b`.
    pub proposal_tail: Option<f64>,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Result<Self> {
        let c = Self {
            samples,
            seed,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 10_000 {
            return Err(Error::InvalidParameter(format!(
                "{} samples, need at least 10^4",
                self.samples
            )));
        }
        if !(self.truncation > 0.0) {
            return Err(Error::InvalidParameter(
                "truncation must be positive".into(),
            ));
        }
        if let Some(e) = self.proposal_tail {
            if !(e > 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "proposal tail {e} must exceed 1"
                )));
            }
        }
        Ok(())
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            seed: 42,
            truncation: 1e4,
            proposal_tail: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples_used: u64,
    pub seed: u64,
    /// Contribution from inside the truncation box.
    pub truncated: f64,
    /// Contribution from outside the box.
    pub tail: f64,
    /// `stderr / value > 0.2`.
    pub unconverged: bool,
}

/// Integrand parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub s: f64,
    pub b: f64,
    pub bp: f64,
}

impl KernelParams {
    /// Enforces `−1/4 < s ≤ 0`, `b > 7/12`, `b′ < s/3`.
    pub fn new(s: f64, b: f64, bp: f64) -> Result<Self> {
        if !(s > -0.25 && s <= 0.0) {
            return Err(Error::Hypothesis(format!(
                "need -1/4 < s <= 0, got s = {s}"
            )));
        }
        if !(b > 7.0 / 12.0) {
            return Err(Error::Hypothesis(format!("need b > 7/12, got b = {b}")));
        }
        if !(bp < s / 3.0) {
            return Err(Error::Hypothesis(format!(
                "need b' < s/3 = {}, got b' = {bp}",
                s / 3.0
            )));
        }
        Ok(Self { s, b, bp })
    }
}

fn br(x: f64) -> f64 {
    1.0 + x.abs()
}

fn tnls_coeffs(eq: &EquationSpec) -> Result<(f64, f64)> {
    match *eq {
        EquationSpec::Tnls { alpha, beta, .. } => Ok((alpha, beta)),
        _ => Err(Error::Unsupported {
            what: "kernel phase",
            value: eq.name().into(),
        }),
    }
}

/// `K(η, η₁, η₂)` at one point, with `⟨x⟩ = 1 + |x|`.
#[allow(clippy::too_many_arguments)]
pub fn kernel_value(
    xi: f64,
    tau: f64,
    xi1: f64,
    tau1: f64,
    xi2: f64,
    tau2: f64,
    p: &KernelParams,
    eq: &EquationSpec,
) -> f64 {
    let phi = |x: f64| eq.phase(x);
    let xi3 = xi + xi1 - xi2;
    let num = br(xi).powf(p.s) * (br(xi3) * br(xi2) * br(xi1)).powf(-p.s);
    let den = br(tau - phi(xi)).powf(-p.bp)
        * (br(tau + tau1 - tau2 - phi(xi3)) * br(tau1 - phi(xi1)) * br(tau2 - phi(xi2))).powf(p.b);
    num / den
}

/// Cauchy-like density `(e−1)/2 (1+|x|)^{−e}`.
fn dens(e: f64, x: f64) -> f64 {
    0.5 * (e - 1.0) * br(x).powf(-e)
}

fn draw(e: f64, rng: &mut impl Rng) -> f64 {
    let u = 1.0 - rng.gen::<f64>();
    let mag = u.powf(-1.0 / (e - 1.0)) - 1.0;
    if rng.gen::<bool>() {
        mag
    } else {
        -mag
    }
}

/// Coordinates beyond this are dropped (their share is far below the
/// statistical error).
const HARD_CUTOFF: f64 = 1e60;
const CHUNK: u64 = 1 << 15;

struct Geometry {
    xi: f64,
    c: f64,
    beta: f64,
    /// Root of `2α + 3β(ξ + ξ₁)`.
    xi1_star: f64,
    along: f64,
    tail: f64,
}

/// A point `(ξ₁, ξ₂)` together with its offsets from the three zero lines
/// of the resonance function. The offset drawn by a ridge component is kept
/// exactly, since `ξ₁ − ξ₂` etc. lose it to rounding when the ridge is
/// narrow.
#[derive(Debug, Clone, Copy)]
struct XiPoint {
    x1: f64,
    x2: f64,
    /// `ξ₁ − ξ₂`
    d1: f64,
    /// `ξ₂ − ξ`
    d2: f64,
    /// `ξ₁ − ξ₁*`
    d3: f64,
}

impl Geometry {
    fn point(&self, x1: f64, x2: f64) -> XiPoint {
        XiPoint {
            x1,
            x2,
            d1: x1 - x2,
            d2: x2 - self.xi,
            d3: x1 - self.xi1_star,
        }
    }

    /// `φ(ξ) + φ(ξ₁) − φ(ξ₂) − φ(ξ+ξ₁−ξ₂) = 3β d₁ d₂ d₃`.
    fn resonance(&self, p: &XiPoint) -> f64 {
        3.0 * self.beta * p.d1 * p.d2 * p.d3
    }

    fn width12(&self, t: f64) -> f64 {
        let slope = 3.0 * self.beta.abs() * ((self.xi - t) * (t - self.xi1_star)).abs();
        1.0 / slope.max(1.0)
    }

    fn width3(&self, t: f64) -> f64 {
        let slope = 3.0 * self.beta.abs() * ((self.xi - t) * (self.xi1_star - t)).abs();
        1.0 / slope.max(1.0)
    }

    /// Mixture: a product component around `(ξ, ξ)` and one component
    /// hugging each zero line of the resonance function.
    fn sample_xi(&self, rng: &mut impl Rng) -> XiPoint {
        match rng.gen_range(0..4) {
            0 => self.point(
                self.xi + draw(self.tail, rng),
                self.xi + draw(self.tail, rng),
            ),
            1 => {
                let t = self.xi + draw(self.along, rng);
                let d = self.width12(t) * draw(self.tail, rng);
                XiPoint {
                    d1: d,
                    ..self.point(t + d, t)
                }
            }
            2 => {
                let t = self.xi + draw(self.along, rng);
                let d = self.width12(t) * draw(self.tail, rng);
                XiPoint {
                    d2: d,
                    ..self.point(t, self.xi + d)
                }
            }
            _ => {
                let t = self.xi + draw(self.along, rng);
                let d = self.width3(t) * draw(self.tail, rng);
                XiPoint {
                    d3: d,
                    ..self.point(self.xi1_star + d, t)
                }
            }
        }
    }

    fn density_xi(&self, p: &XiPoint) -> f64 {
        let e = self.tail;
        let c0 = dens(e, p.x1 - self.xi) * dens(e, p.x2 - self.xi);
        let w1 = self.width12(p.x2);
        let c1 = dens(self.along, p.x2 - self.xi) * dens(e, p.d1 / w1) / w1;
        let w2 = self.width12(p.x1);
        let c2 = dens(self.along, p.x1 - self.xi) * dens(e, p.d2 / w2) / w2;
        let w3 = self.width3(p.x2);
        let c3 = dens(self.along, p.x2 - self.xi) * dens(e, p.d3 / w3) / w3;
        0.25 * (c0 + c1 + c2 + c3)
    }

    /// `(λ₁, λ₂, λ₃)` with `λ₃ = a + λ₁ − λ₂`; each component follows two of
    /// the three modulation ridges and keeps its own draws exact.
    fn sample_lambda(&self, a: f64, rng: &mut impl Rng) -> [f64; 3] {
        let e = self.tail;
        match rng.gen_range(0..3) {
            0 => {
                let (l1, l2) = (draw(e, rng), draw(e, rng));
                [l1, l2, a + l1 - l2]
            }
            1 => {
                let (l1, l3) = (draw(e, rng), draw(e, rng));
                [l1, a + l1 - l3, l3]
            }
            _ => {
                let (l2, l3) = (draw(e, rng), draw(e, rng));
                [l3 + l2 - a, l2, l3]
            }
        }
    }

    fn density_lambda(&self, l: &[f64; 3]) -> f64 {
        let e = self.tail;
        let (p1, p2, p3) = (dens(e, l[0]), dens(e, l[1]), dens(e, l[2]));
        (p1 * p2 + p1 * p3 + p2 * p3) / 3.0
    }
}

/// Importance-sampled estimate of `I(ξ, τ) = ∬ K(η, η₁, η₂)² dη₁ dη₂` for the
/// tNLS phase.
pub fn kernel_i(
    xi: f64,
    tau: f64,
    s: f64,
    b: f64,
    bp: f64,
    eq: &EquationSpec,
    mc: &McConfig,
) -> Result<McEstimate> {
    let p = KernelParams::new(s, b, bp)?;
    mc.validate()?;
    let (alpha, beta) = tnls_coeffs(eq)?;
    let c = tau - eq.phase(xi);
    let geo = Geometry {
        xi,
        c,
        beta,
        xi1_star: -xi - 2.0 * alpha / (3.0 * beta),
        along: 1.0 + (0.5 * (1.0 + 4.0 * s)).max(0.02),
        tail: mc.proposal_tail.unwrap_or(2.0 * b),
    };
    let pref = br(c).powf(2.0 * p.bp) * br(xi).powf(2.0 * p.s);
    let r = mc.truncation;

    let chunks = mc.samples.div_ceil(CHUNK);
    // (Σ w_in, Σ w_tail, Σ (w_in + w_tail)², Σ w_in², Σ w_tail²)
    let parts = map_chunks(chunks, |ci| {
        let mut rng = chunk_rng(mc.seed, ci);
        let count = CHUNK.min(mc.samples - ci * CHUNK);
        let mut acc = [0.0f64; 5];
        for _ in 0..count {
            let pt = geo.sample_xi(&mut rng);
            let (x1, x2) = (pt.x1, pt.x2);
            let h = geo.resonance(&pt);
            let a = geo.c + h;
            let lam = geo.sample_lambda(a, &mut rng);
            let [l1, l2, l3] = lam;
            let coords = [x1, x2, l1, l2];
            if !a.is_finite() || coords.iter().any(|v| !(v.abs() <= HARD_CUTOFF)) {
                continue;
            }
            let x3 = geo.xi + x1 - x2;
            let g = |v: f64, e: f64| br(v).powf(e);
            let f = pref
                * g(x1, -2.0 * p.s)
                * g(x2, -2.0 * p.s)
                * g(x3, -2.0 * p.s)
                * g(l1, -2.0 * p.b)
                * g(l2, -2.0 * p.b)
                * g(l3, -2.0 * p.b);
            let q = geo.density_xi(&pt) * geo.density_lambda(&lam);
            let w = f / q;
            if !w.is_finite() {
                continue;
            }
            if coords.iter().all(|v| v.abs() <= r) {
                acc[0] += w;
                acc[3] += w * w;
            } else {
                acc[1] += w;
                acc[4] += w * w;
            }
            acc[2] += w * w;
        }
        acc
    });
    let mut tot = [0.0f64; 5];
    for part in parts {
        for (t, v) in tot.iter_mut().zip(part) {
            *t += v;
        }
    }
    let n = mc.samples as f64;
    let truncated = tot[0] / n;
    let tail = tot[1] / n;
    let value = truncated + tail;
    let var = (tot[2] / n - value * value).max(0.0) * n / (n - 1.0);
    let stderr = (var / n).sqrt();
    Ok(McEstimate {
        value,
        stderr,
        samples_used: mc.samples,
        seed: mc.seed,
        truncated,
        tail,
        unconverged: !(stderr <= 0.2 * value),
    })
}

/// Estimates along `τ = φ(ξ)` for each ξ, and their max/min ratio.
pub fn kernel_sweep(
    xis: &[f64],
    p: &KernelParams,
    eq: &EquationSpec,
    mc: &McConfig,
) -> Result<(Vec<McEstimate>, f64)> {
    let est = xis
        .iter()
        .map(|&x| kernel_i(x, eq.phase(x), p.s, p.b, p.bp, eq, mc))
        .collect::<Result<Vec<_>>>()?;
    let max = est
        .iter()
        .map(|e| e.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = est.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
    Ok((est, max / min))
}
