use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{chunk_rng, map_chunks};

/// Outcome of a sampled inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub samples: u64,
    pub seed: u64,
    /// Largest observed LHS/RHS (or LHS/scale) over the samples.
    pub max_ratio: f64,
    /// Bound the ratio is checked against.
    pub bound: f64,
    pub violations: u64,
    /// Sample attaining `max_ratio`.
    pub worst: Vec<f64>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

const CHUNK: u64 = 1 << 16;
const TOL: f64 = 1e-12;

/// `(1 − e^{−δ}) / (2σ m)^θ` with `δ = σ(|α|+|β|+|γ| − |α+β+γ|)` and `m` the
/// smallest pair sum of `|α|, |β|, |γ|`: the ratio of the two sides of
/// `e^{σ|α|}e^{σ|β|}e^{σ|γ|} − e^{σ|α+β+γ|} ≤ (2σm)^θ e^{σ|α|}e^{σ|β|}e^{σ|γ|}`
/// after dividing by the triple product, so nothing overflows.
pub fn exp_lemma_ratio(alpha: f64, beta: f64, gamma: f64, sigma: f64, theta: f64) -> f64 {
    let (a, b, c) = (alpha.abs(), beta.abs(), gamma.abs());
    let delta = sigma * (a + b + c - (alpha + beta + gamma).abs());
    let lhs = -(-delta.max(0.0)).exp_m1();
    let m = (a + b).min(a + c).min(b + c);
    let rhs = (2.0 * sigma * m).powf(theta);
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Largest |ξ_i| value of the middle size.
pub fn xi_med(x1: f64, x2: f64, x3: f64) -> f64 {
    let mut v = [x1.abs(), x2.abs(), x3.abs()];
    v.sort_by(f64::total_cmp);
    v[1]
}

/// `(|ξ₁|+|ξ₂|+|ξ₃| − |ξ₁+ξ₂+ξ₃|, 12 ξ_med)`.
pub fn ximed_sides(x1: f64, x2: f64, x3: f64) -> (f64, f64) {
    (
        x1.abs() + x2.abs() + x3.abs() - (x1 + x2 + x3).abs(),
        12.0 * xi_med(x1, x2, x3),
    )
}

/// `min{|a|+|ξ₁|, |a|+|ξ₂|, |ξ₁|+|ξ₂|} / (3⟨a⟩⟨ξ₁⟩⟨ξ₂⟩/⟨ξ⟩)` with
/// `a = ξ − ξ₁ − ξ₂` and `⟨x⟩ = 1 + |x|`.
pub fn min_pair_ratio(xi: f64, x1: f64, x2: f64) -> f64 {
    let a = xi - x1 - x2;
    let br = |x: f64| 1.0 + x.abs();
    let lhs = (a.abs() + x1.abs())
        .min(a.abs() + x2.abs())
        .min(x1.abs() + x2.abs());
    lhs * br(xi) / (3.0 * br(a) * br(x1) * br(x2))
}

/// Frequencies spread over many scales, with exact zeros and
/// cancellations mixed in.
fn draw_frequency(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1..=4 => rng.gen_range(-10.0..10.0),
        _ => {
            let mag = 10f64.powf(rng.gen_range(-4.0..6.0));
            if rng.gen::<bool>() {
                mag
            } else {
                -mag
            }
        }
    }
}

struct Partial {
    max_ratio: f64,
    violations: u64,
    worst: Vec<f64>,
}

fn run_check(
    name: &str,
    samples: u64,
    seed: u64,
    bound: f64,
    sample: impl Fn(&mut rand_chacha::ChaCha8Rng) -> (f64, Vec<f64>) + Sync + Send,
) -> CheckReport {
    let chunks = samples.div_ceil(CHUNK);
    let parts = map_chunks(chunks, |ci| {
        let mut rng = chunk_rng(seed, ci);
        let count = CHUNK.min(samples - ci * CHUNK);
        let mut p = Partial {
            max_ratio: 0.0,
            violations: 0,
            worst: Vec::new(),
        };
        for _ in 0..count {
            let (r, point) = sample(&mut rng);
            if !(r <= bound * (1.0 + TOL)) {
                p.violations += 1;
            }
            if r > p.max_ratio || p.worst.is_empty() {
                p.max_ratio = p.max_ratio.max(r);
                p.worst = point;
            }
        }
        p
    });
    let mut report = CheckReport {
        check: name.into(),
        samples,
        seed,
        max_ratio: 0.0,
        bound,
        violations: 0,
        worst: Vec::new(),
    };
    for p in parts {
        report.violations += p.violations;
        if p.max_ratio > report.max_ratio || report.worst.is_empty() {
            report.max_ratio = report.max_ratio.max(p.max_ratio);
            report.worst = p.worst;
        }
    }
    report
}

/// Sample `(α, β, γ) ∈ [−50, 50]³`, `σ ∈ (0, 5]`, `θ ∈ [0, 1]` and check
/// [`exp_lemma_ratio`] ≤ 1.
pub fn check_exp_lemma(samples: u64, seed: u64) -> CheckReport {
    const R: f64 = 50.0;
    run_check("exp_lemma", samples, seed, 1.0, |rng| {
        let a = rng.gen_range(-R..=R);
        let b = rng.gen_range(-R..=R);
        let c = rng.gen_range(-R..=R);
        let sigma = 5.0 * (1.0 - rng.gen::<f64>());
        let theta = rng.gen_range(0.0..=1.0);
        (
            exp_lemma_ratio(a, b, c, sigma, theta),
            vec![a, b, c, sigma, theta],
        )
    })
}

/// Check `|ξ₁|+|ξ₂|+|ξ₃| − |ξ| ≤ 12 ξ_med`; the ratio reported is
/// LHS / ξ_med (0 when ξ_med = 0, where LHS is 0 too).
pub fn check_ximed(samples: u64, seed: u64) -> CheckReport {
    run_check("ximed", samples, seed, 12.0, |rng| {
        let x = [
            draw_frequency(rng),
            draw_frequency(rng),
            draw_frequency(rng),
        ];
        let x = match rng.gen_range(0..4) {
            0 => [x[0], -x[0], x[2]],
            1 => [x[0], x[1], -x[0] - x[1]],
            _ => x,
        };
        let (lhs, _) = ximed_sides(x[0], x[1], x[2]);
        let med = xi_med(x[0], x[1], x[2]);
        let r = if med == 0.0 {
            if lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            lhs / med
        };
        (r, x.to_vec())
    })
}

/// Companion check `min{…} ≤ 3⟨ξ−ξ₁−ξ₂⟩⟨ξ₁⟩⟨ξ₂⟩/⟨ξ⟩` on sampled triples.
pub fn check_min_pair(samples: u64, seed: u64) -> CheckReport {
    run_check("min_pair", samples, seed, 1.0, |rng| {
        let (xi, x1, x2) = (
            draw_frequency(rng),
            draw_frequency(rng),
            draw_frequency(rng),
        );
        (min_pair_ratio(xi, x1, x2), vec![xi, x1, x2])
    })
}
