use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::estimates::rng::split_seed;
use crate::estimates::{
    check_exp_lemma, check_min_pair, check_ximed, kernel_i, strichartz_ratio, trilinear_ratio,
    CheckReport, FrequencyLattice, McConfig, RefinementReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ExpLemma,
    Ximed,
    Kernel,
    Trilinear,
    Strichartz,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exp_lemma" => Self::ExpLemma,
            "ximed" => Self::Ximed,
            "kernel" => Self::Kernel,
            "trilinear" => Self::Trilinear,
            "strichartz" => Self::Strichartz,
            "all" => Self::All,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown suite '{s}' (exp_lemma, ximed, kernel, trilinear, strichartz, all)"
                )))
            }
        })
    }
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ExpLemma => "exp_lemma",
            Self::Ximed => "ximed",
            Self::Kernel => "kernel",
            Self::Trilinear => "trilinear",
            Self::Strichartz => "strichartz",
            Self::All => "all",
        }
    }
}

/// Sample sizes; the defaults are the full acceptance sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub samples: u64,
    pub kernel_samples: u64,
    pub trials: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 1_000_000,
            kernel_samples: 1_000_000,
            trials: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteItem {
    pub name: String,
    pub passed: bool,
    pub parameters: Value,
    pub result: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub items: Vec<SuiteItem>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Allowed growth of the ratio maxima under lattice refinement.
pub const REFINEMENT_GROWTH_LIMIT: f64 = 0.25;
/// Allowed `stderr / value` of a kernel estimate.
pub const KERNEL_REL_STDERR: f64 = 0.2;
/// Allowed gap between the two kernel estimates, in combined stderr.
pub const KERNEL_DOUBLING_SIGMAS: f64 = 3.0;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn check_item(r: CheckReport) -> SuiteItem {
    SuiteItem {
        name: r.check.clone(),
        passed: r.passed(),
        parameters: json!({ "samples": r.samples, "seed": r.seed, "bound": r.bound }),
        result: to_value(&r),
    }
}

fn refinement_item(name: &str, r: RefinementReport) -> SuiteItem {
    SuiteItem {
        name: name.into(),
        passed: r.bounded(REFINEMENT_GROWTH_LIMIT),
        parameters: json!({ "form": to_value(&r.form), "trials": r.coarse.trials, "seed": r.seed, "growth_limit": REFINEMENT_GROWTH_LIMIT }),
        result: to_value(&r),
    }
}

/// Kernel integral at `(ξ, τ) = (0, 0)` for tNLS with `(s, b, b′) = (−0.2, 0.6, −0.1)`,
/// estimated with `N` and, independently, `2N` samples.
pub fn kernel_item(seed: u64, samples: u64) -> Result<SuiteItem> {
    let eq = EquationSpec::tnls(1.0, 1.0, 1.0)?;
    let (s, b, bp) = (-0.2, 0.6, -0.1);
    let first = McConfig {
        samples,
        seed,
        ..McConfig::default()
    };
    let doubled = McConfig {
        samples: 2 * samples,
        seed: split_seed(seed, 1),
        ..McConfig::default()
    };
    let a = kernel_i(0.0, 0.0, s, b, bp, &eq, &first)?;
    let c = kernel_i(0.0, 0.0, s, b, bp, &eq, &doubled)?;
    let combined = (a.stderr * a.stderr + c.stderr * c.stderr).sqrt();
    let gap = (a.value - c.value).abs() / combined;
    let passed = !a.unconverged && !c.unconverged && gap <= KERNEL_DOUBLING_SIGMAS;
    Ok(SuiteItem {
        name: "kernel".into(),
        passed,
        parameters: json!({
            "equation": to_value(&eq), "xi": 0.0, "tau": 0.0, "s": s, "b": b, "bp": bp,
            "samples": samples, "seed": seed, "truncation": first.truncation,
        }),
        result: json!({ "first": to_value(&a), "doubled": to_value(&c), "gap_in_stderr": gap }),
    })
}

pub fn run_verify(suite: Suite, seed: u64, opts: &VerifyOptions) -> Result<VerifyReport> {
    let lat = FrequencyLattice::coarse();
    let mut items = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::ExpLemma {
        items.push(check_item(check_exp_lemma(opts.samples, seed)));
    }
    if all || suite == Suite::Ximed {
        items.push(check_item(check_ximed(opts.samples, seed)));
        items.push(check_item(check_min_pair(opts.samples, seed)));
    }
    if all || suite == Suite::Kernel {
        items.push(kernel_item(seed, opts.kernel_samples)?);
    }
    if all || suite == Suite::Trilinear {
        let mkdv = EquationSpec::defocusing_mkdv();
        let tnls = EquationSpec::tnls(1.0, 1.0, 1.0)?;
        items.push(refinement_item(
            "trilinear_mkdv",
            trilinear_ratio(opts.trials, &mkdv, &lat, seed)?,
        ));
        items.push(refinement_item(
            "trilinear_tnls",
            trilinear_ratio(opts.trials, &tnls, &lat, seed)?,
        ));
    }
    if all || suite == Suite::Strichartz {
        items.push(refinement_item(
            "strichartz",
            strichartz_ratio(opts.trials, &lat, seed)?,
        ));
    }
    Ok(VerifyReport {
        suite: suite.name().into(),
        seed,
        passed: items.iter().all(|i| i.passed),
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in [
            "exp_lemma",
            "ximed",
            "kernel",
            "trilinear",
            "strichartz",
            "all",
        ] {
            assert_eq!(s.parse::<Suite>().unwrap().name(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn small_ximed_suite_passes() {
        let opts = VerifyOptions {
            samples: 20_000,
            ..Default::default()
        };
        let r = run_verify(Suite::Ximed, 5, &opts).unwrap();
        assert!(r.passed);
        assert_eq!(r.items.len(), 2);
    }
}
