use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, RunMode};
use super::families::{exact_state, initial_state};
use super::fit::{fit_power_law, PowerLawFit};
use crate::diagnostics::{attach_records, relative_drift, DiagnosticsRecord, DiagnosticsSchedule};
use crate::dynamics::{continuation_run, integrate, ContinuationStatus, SchedulePoint, Trajectory};
use crate::equation::EquationSpec;
use crate::error::{Error, Result};
use crate::spectral::{l2_norm_sq, sobolev_norm};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SCHEDULE_FILE: &str = "schedule.csv";
pub const CONFIG_FILE: &str = "config.txt";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalNorms {
    pub mass: f64,
    pub energy: f64,
    pub momentum_re: f64,
    pub momentum_im: f64,
    pub l2: f64,
    pub h1: f64,
}

/// Largest relative drift of each conserved quantity over the stored samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationDrift {
    pub mass: f64,
    pub energy: Option<f64>,
    pub momentum: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContinuationSummary {
    pub sigma0: f64,
    pub rho: f64,
    pub q0: f64,
    pub constant: f64,
    pub exponent: f64,
    pub budget: f64,
    pub status: ContinuationStatus,
    pub schedule_points: usize,
    pub first_reduction: Option<SchedulePoint>,
    pub fit: Option<PowerLawFit>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub equation: EquationSpec,
    pub n: usize,
    pub length: f64,
    pub family: String,
    pub t_final: f64,
    pub samples: usize,
    pub final_norms: FinalNorms,
    pub conservation: ConservationDrift,
    /// `(t, σ̂)`; null where the radius is unresolved.
    pub radius_series: Vec<(f64, Option<f64>)>,
    /// Max pointwise distance to the closed-form solution, when one exists.
    pub shape_error: Option<f64>,
    pub continuation: Option<ContinuationSummary>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub summary: RunSummary,
}

fn schedule_for(cfg: &ExperimentConfig) -> DiagnosticsSchedule {
    DiagnosticsSchedule {
        sigmas: cfg.diagnostics.sigmas.clone(),
        sobolev: vec![1.0],
        noise_floor: cfg.diagnostics.noise_floor,
    }
}

/// Column names of the diagnostics CSV.
pub fn diagnostics_header(eq: &EquationSpec, sigmas: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = [
        "t",
        "mass",
        "energy",
        "momentum_re",
        "momentum_im",
        "sigma_hat",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let q = if eq.is_mkdv() { "E_sigma" } else { "M_sigma" };
    h.extend(sigmas.iter().map(|s| format!("{q}_{s}")));
    h.extend(sigmas.iter().map(|s| format!("trust_{s}")));
    h
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn record_row(r: &DiagnosticsRecord) -> Vec<String> {
    let mut row = vec![
        fmt_num(r.t),
        fmt_num(r.mass),
        fmt_num(r.energy),
        fmt_num(r.momentum.re),
        fmt_num(r.momentum.im),
        fmt_num(r.sigma_hat),
    ];
    row.extend(r.gevrey.iter().map(|&(_, q)| fmt_num(q)));
    row.extend(
        r.trust
            .iter()
            .map(|&(_, ok)| if ok { "1".to_string() } else { "0".to_string() }),
    );
    row
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_diagnostics_csv(path: &Path, traj: &Trajectory, sigmas: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(diagnostics_header(&traj.equation, sigmas))
        .map_err(csv_err)?;
    for r in &traj.records {
        w.write_record(record_row(r)).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_schedule_csv(path: &Path, schedule: &[SchedulePoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["t", "sigma", "budget_counter"])
        .map_err(csv_err)?;
    for p in schedule {
        w.write_record([fmt_num(p.t), fmt_num(p.sigma), p.windows.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// `(t, σ)` pairs from a schedule CSV.
pub fn read_schedule_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config {
                line: 1,
                message: format!("no '{name}' column"),
            })
    };
    let (it, is) = (col("t")?, col("sigma")?);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let parse = |j: usize| {
            rec.get(j)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Config {
                    line: i + 2,
                    message: format!("unreadable value in column {}", j + 1),
                })
        };
        out.push((parse(it)?, parse(is)?));
    }
    Ok(out)
}

fn summarize(cfg: &ExperimentConfig, traj: &Trajectory) -> Result<RunSummary> {
    let last = traj
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let rec = traj
        .records
        .last()
        .ok_or_else(|| Error::InvalidParameter("no diagnostics".into()))?;
    let recs = &traj.records;
    let conservation = ConservationDrift {
        mass: relative_drift(recs.iter().map(|r| r.mass)),
        energy: cfg
            .equation
            .is_mkdv()
            .then(|| relative_drift(recs.iter().map(|r| r.energy))),
        momentum: (!cfg.equation.is_mkdv())
            .then(|| relative_drift(recs.iter().map(|r| r.momentum.im))),
    };
    let shape_error = match exact_state(cfg, *traj.times.last().unwrap_or(&0.0)) {
        Some(exact) => Some(last.max_distance(&exact)?),
        None => None,
    };
    Ok(RunSummary {
        name: cfg.name.clone(),
        equation: cfg.equation,
        n: cfg.grid.n(),
        length: cfg.grid.length(),
        family: cfg.initial.family().into(),
        t_final: *traj.times.last().unwrap_or(&0.0),
        samples: traj.times.len(),
        final_norms: FinalNorms {
            mass: rec.mass,
            energy: rec.energy,
            momentum_re: rec.momentum.re,
            momentum_im: rec.momentum.im,
            l2: l2_norm_sq(last).sqrt(),
            h1: sobolev_norm(last, 1.0),
        },
        conservation,
        radius_series: recs
            .iter()
            .map(|r| (r.t, r.sigma_hat.is_finite().then_some(r.sigma_hat)))
            .collect(),
        shape_error,
        continuation: None,
    })
}

/// Integrate the configured experiment and compute its diagnostics, without
/// touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> Result<(Trajectory, RunSummary)> {
    cfg.validate()?;
    let u0 = initial_state(cfg)?;
    let mut traj = integrate(
        &u0,
        &cfg.equation,
        &cfg.integrator,
        cfg.t_final,
        cfg.diagnostics.sample_spacing,
    )?;
    attach_records(&mut traj, &schedule_for(cfg))?;
    let summary = summarize(cfg, &traj)?;
    Ok((traj, summary))
}

fn prepare_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join(CONFIG_FILE), cfg.to_text())?;
    Ok(dir)
}

fn write_summary(dir: &Path, summary: &RunSummary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join(SUMMARY_FILE), text + "\n")?;
    Ok(())
}

/// Run directory with `config.txt`, `diagnostics.csv` and `summary.json`.
pub fn run_simulate(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let (traj, summary) = simulate(cfg)?;
    let dir = prepare_dir(cfg)?;
    write_diagnostics_csv(&dir.join(DIAGNOSTICS_FILE), &traj, &cfg.diagnostics.sigmas)?;
    write_summary(&dir, &summary)?;
    Ok(RunOutput { dir, summary })
}

/// As [`run_simulate`], advancing by the continuation scheduler and adding
/// `schedule.csv` with columns `t, sigma, budget_counter`.
pub fn run_continuation(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let u0 = initial_state(cfg)?;
    let sigma0 = cfg.continuation.sigma0;
    let run = continuation_run(
        &u0,
        &cfg.equation,
        sigma0,
        cfg.t_final,
        &cfg.continuation_config(),
    )?;
    let mut traj = run.trajectory;
    attach_records(&mut traj, &schedule_for(cfg))?;
    let series: Vec<(f64, f64)> = run.schedule.iter().map(|p| (p.t, p.sigma)).collect();
    let mut summary = summarize(cfg, &traj)?;
    summary.continuation = Some(ContinuationSummary {
        sigma0,
        rho: run.rho,
        q0: run.q0,
        constant: run.constant,
        exponent: run.exponent,
        budget: run.budget,
        status: run.status,
        schedule_points: run.schedule.len(),
        first_reduction: run.schedule.iter().find(|p| p.sigma < sigma0).copied(),
        fit: fit_power_law(&series, None).ok(),
    });
    let dir = prepare_dir(cfg)?;
    write_diagnostics_csv(&dir.join(DIAGNOSTICS_FILE), &traj, &cfg.diagnostics.sigmas)?;
    write_schedule_csv(&dir.join(SCHEDULE_FILE), &run.schedule)?;
    write_summary(&dir, &summary)?;
    Ok(RunOutput { dir, summary })
}

/// Dispatch on `run.mode`.
pub fn run_config(cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cfg.mode {
        RunMode::Simulate => run_simulate(cfg),
        RunMode::Continue => run_continuation(cfg),
    }
}

/// Independent runs, in parallel when the `parallel` feature is on. Fails up
/// front if two configs share an output directory.
pub fn sweep(configs: &[ExperimentConfig]) -> Result<Vec<Result<RunOutput>>> {
    for (i, a) in configs.iter().enumerate() {
        if configs[..i].iter().any(|b| b.output_dir == a.output_dir) {
            return Err(Error::InvalidParameter(format!(
                "output directory {} used by more than one config",
                a.output_dir.display()
            )));
        }
    }
    #[cfg(feature = "parallel")]
    let out = {
        use rayon::prelude::*;
        configs.par_iter().map(run_config).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let out = configs.iter().map(run_config).collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = diagnostics_header(&EquationSpec::defocusing_mkdv(), &[0.0, 0.05]);
        assert_eq!(
            h.join(","),
            "t,mass,energy,momentum_re,momentum_im,sigma_hat,E_sigma_0,E_sigma_0.05,trust_0,trust_0.05"
        );
        let eq = EquationSpec::tnls(1.0, 1.0, 1.0).unwrap();
        assert_eq!(diagnostics_header(&eq, &[0.1])[6], "M_sigma_0.1");
    }

    #[test]
    fn number_format_has_17_significant_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(f64::NAN), "NaN");
    }
}
