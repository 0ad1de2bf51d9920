use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gevrey::experiments::{
    fit_power_law, read_schedule_csv, run_continuation, run_simulate, run_verify, sweep,
    ExperimentConfig, Suite, VerifyOptions,
};
use gevrey::Error;

#[derive(Parser)]
#[command(
    name = "gevrey",
    version,
    about = "mKdV / tNLS runs with Gevrey-norm diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate one config; writes config.txt, diagnostics.csv, summary.json.
    Simulate {
        config: PathBuf,
        /// Override output.dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the continuation scheduler; also writes schedule.csv.
    Continue {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an inequality suite and print a JSON report.
    Verify {
        /// exp_lemma, ximed, kernel, trilinear, strichartz or all.
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1_000_000)]
        kernel_samples: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power-law fit of a schedule CSV.
    Fit {
        schedule: PathBuf,
        /// `lo:hi` range of T.
        #[arg(long)]
        range: Option<String>,
    },
    /// Run every config matching a glob, in parallel.
    Sweep { pattern: String },
}

enum Failure {
    Validation(String),
    Numerical(String),
    Acceptance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BlowUp { .. }
            | Error::Divergence { .. }
            | Error::Overflow { .. }
            | Error::UnresolvedRadius { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn load(path: &PathBuf, out: Option<PathBuf>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::from_file(path)
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    Ok(cfg)
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Validation(format!("range '{s}' must look like lo:hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Simulate { config, out } => {
            let cfg = load(&config, out)?;
            let res = run_simulate(&cfg)?;
            println!("{}", res.dir.display());
        }
        Cmd::Continue { config, out } => {
            let cfg = load(&config, out)?;
            let res = run_continuation(&cfg)?;
            println!("{}", res.dir.display());
        }
        Cmd::Verify {
            suite,
            seed,
            samples,
            kernel_samples,
            trials,
            out,
        } => {
            let suite: Suite = suite.parse()?;
            let opts = VerifyOptions {
                samples,
                kernel_samples,
                trials,
            };
            let report = run_verify(suite, seed, &opts)?;
            let text = report.to_json();
            print!("{text}");
            if let Some(p) = out {
                std::fs::write(&p, &text)
                    .map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?;
            }
            if !report.passed {
                let failed: Vec<_> = report
                    .items
                    .iter()
                    .filter(|i| !i.passed)
                    .map(|i| i.name.as_str())
                    .collect();
                return Err(Failure::Acceptance(format!(
                    "failed checks: {}",
                    failed.join(", ")
                )));
            }
        }
        Cmd::Fit { schedule, range } => {
            let series = read_schedule_csv(&schedule)?;
            let range = range.as_deref().map(parse_range).transpose()?;
            println!("{}", json(&fit_power_law(&series, range)?));
        }
        Cmd::Sweep { pattern } => {
            let paths: Vec<PathBuf> = glob::glob(&pattern)
                .map_err(|e| Failure::Validation(format!("bad pattern: {e}")))?
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Validation(e.to_string()))?;
            if paths.is_empty() {
                return Err(Failure::Validation(format!(
                    "no config matches '{pattern}'"
                )));
            }
            let configs = paths
                .iter()
                .map(|p| load(p, None))
                .collect::<Result<Vec<_>, _>>()?;
            let mut worst: Option<Failure> = None;
            for (p, r) in paths.iter().zip(sweep(&configs)?) {
                match r {
                    Ok(o) => println!("{}\t{}", p.display(), o.dir.display()),
                    Err(e) => {
                        eprintln!("{}\terror: {e}", p.display());
                        let f = Failure::from(e);
                        if worst.is_none() || matches!(f, Failure::Numerical(_)) {
                            worst = Some(f);
                        }
                    }
                }
            }
            if let Some(f) = worst {
                return Err(f);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance(m)) => {
            eprintln!("acceptance failure: {m}");
            ExitCode::from(3)
        }
    }
}
