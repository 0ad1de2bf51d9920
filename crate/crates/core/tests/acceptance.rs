//! The ten acceptance criteria, each printing one PASS/FAIL line.
//! Run with `cargo test --release -p gevrey --test acceptance -- --nocapture`.

use std::path::{Path, PathBuf};
use std::thread;

use gevrey::diagnostics::{
    almost_conserved, attach_records, conserved_anchor, drift_sweep, estimate_radius,
    DiagnosticsSchedule, NOISE_FLOOR,
};
use gevrey::dynamics::ContinuationStatus;
use gevrey::dynamics::{
    integrate, lifespan, linear_propagate, picard_solve, IntegratorConfig, LifespanParams,
};
use gevrey::experiments::{
    fit_power_law, poisson_kernel, random_band, run_continuation, run_simulate, run_verify, sech,
    simulate, ExperimentConfig, Suite, VerifyOptions,
};
use gevrey::spectral::{gevrey_norm, make_grid, GevreyParams, SpectralField};
use gevrey::{EquationSpec, Result};

type Outcome = Result<(bool, String)>;

fn config(name: &str) -> ExperimentConfig {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    ExperimentConfig::from_file(&p).unwrap()
}

fn final_state(u0: &SpectralField, eq: &EquationSpec, dt: f64, t: f64) -> Result<SpectralField> {
    Ok(integrate(u0, eq, &IntegratorConfig::new(dt)?, t, t)?
        .states
        .pop()
        .unwrap())
}

fn exact_solutions() -> Outcome {
    let (_, pw) = simulate(&config("plane_wave_tnls.cfg"))?;
    let (_, sol) = simulate(&config("soliton_mkdv.cfg"))?;
    let (a, b) = (pw.shape_error.unwrap(), sol.shape_error.unwrap());
    Ok((
        a < 1e-8 && b < 1e-6,
        format!("plane wave {a:.2e} (< 1e-8), soliton {b:.2e} (< 1e-6)"),
    ))
}

fn conservation() -> Outcome {
    let mkdv = config("random_band_mkdv.cfg");
    let mut tnls = mkdv.clone();
    tnls.equation = EquationSpec::tnls(1.0, 1.0, 1.0)?;
    let (_, a) = simulate(&mkdv)?;
    let (_, b) = simulate(&tnls)?;
    let worst = [
        a.conservation.mass,
        a.conservation.energy.unwrap(),
        b.conservation.mass,
        b.conservation.momentum.unwrap(),
    ];
    Ok((
        worst.iter().all(|d| *d <= 1e-8),
        format!(
            "mKdV mass {:.1e} energy {:.1e}; tNLS mass {:.1e} momentum {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

fn sigma_zero_anchor() -> Outcome {
    let g = make_grid(512, 60.0)?;
    let mut worst = 0.0f64;
    for eq in [
        EquationSpec::defocusing_mkdv(),
        EquationSpec::tnls(1.0, 1.0, 1.0)?,
    ] {
        let u0 = random_band(g, 40, 1.0, 77, eq.real_valued());
        let traj = integrate(&u0, &eq, &IntegratorConfig::new(1e-3)?, 2.0, 0.1)?;
        let q0 = almost_conserved(&traj.states[0], 0.0, &eq)?;
        let c0 = conserved_anchor(&traj.states[0], &eq)?;
        for f in &traj.states {
            let dq = almost_conserved(f, 0.0, &eq)? - q0;
            let dc = conserved_anchor(f, &eq)? - c0;
            worst = worst.max((dq - dc).abs());
        }
    }
    Ok((
        worst <= 1e-12,
        format!("largest drift discrepancy {worst:e}"),
    ))
}

fn lifespan_trajectory(
    eq: &EquationSpec,
    u0: &SpectralField,
) -> Result<(f64, gevrey::dynamics::Trajectory)> {
    let s = if eq.is_mkdv() { 1.0 } else { 0.0 };
    let t0 = lifespan(
        gevrey_norm(u0, GevreyParams::new(0.05, s)?)?,
        &LifespanParams::default(),
    );
    let cfg = IntegratorConfig {
        dt: (t0 / 50.0).min(1e-3),
        ..Default::default()
    };
    Ok((t0, integrate(u0, eq, &cfg, t0, t0 / 20.0)?))
}

fn almost_conservation() -> Outcome {
    let g = make_grid(1024, 40.0 * std::f64::consts::PI)?;
    let sigmas = [0.05, 0.1, 0.2, 0.4];
    let mut ok = true;
    let mut detail = Vec::new();
    let cases = [
        (EquationSpec::defocusing_mkdv(), 1.0, 1.0),
        (EquationSpec::tnls(1.0, 1.0, 1.0)?, 1.5, 1.0),
    ];
    for (eq, amp, width) in cases {
        let u0 = sech(g, amp, width, eq.real_valued()).translate(0.5 * g.length());
        let (t0, traj) = lifespan_trajectory(&eq, &u0)?;
        let report = drift_sweep(&traj, &sigmas, &eq)?;
        let c = report.constant_at(0.05).unwrap_or(f64::NAN);
        let holds = report.bound_holds(c);
        let monotone = report.monotone();
        ok &= holds && monotone;
        let drifts: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("{:.2e}", r.drift))
            .collect();
        let ratios: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("{:.2}", r.normalized / c))
            .collect();
        detail.push(format!(
            "{} T0={t0:.2e} D=[{}] D/bound(C@0.05)=[{}] slope={:?} bound {} monotone {}",
            eq.name(),
            drifts.join(" "),
            ratios.join(" "),
            report.fitted_exponent.map(|e| (e * 100.0).round() / 100.0),
            if holds { "holds" } else { "violated" },
            monotone
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn radius_accuracy() -> Outcome {
    let g = make_grid(256, 2.0 * std::f64::consts::PI)?;
    let eq = EquationSpec::tnls(1.0, 1.0, 1.0)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for s0 in [0.2, 0.4, 0.8] {
        let f = poisson_kernel(g, s0);
        let a = estimate_radius(&f, NOISE_FLOOR)?;
        let b = estimate_radius(&linear_propagate(&f, &eq, 3.7), NOISE_FLOOR)?;
        let rel = (a.sigma_hat / s0 - 1.0).abs();
        let shift = (a.sigma_hat - b.sigma_hat).abs();
        ok &= rel < 0.05 && shift <= a.residual + 1e-12;
        detail.push(format!(
            "σ0={s0}: σ̂={:.6} rel {rel:.1e}, flow shift {shift:.1e}",
            a.sigma_hat
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn radius_persistence() -> Outcome {
    let g = make_grid(1024, 40.0 * std::f64::consts::PI)?;
    let mut ok = true;
    let mut detail = Vec::new();
    for eq in [
        EquationSpec::defocusing_mkdv(),
        EquationSpec::tnls(1.0, 1.0, 1.0)?,
    ] {
        let u0 = sech(g, 1.0, 1.0, eq.real_valued()).translate(0.5 * g.length());
        let (t0, mut traj) = lifespan_trajectory(&eq, &u0)?;
        attach_records(
            &mut traj,
            &DiagnosticsSchedule {
                sigmas: vec![0.0],
                sobolev: vec![1.0],
                noise_floor: NOISE_FLOOR,
            },
        )?;
        let s0 = traj.records[0].sigma_hat;
        let min = traj
            .records
            .iter()
            .map(|r| r.sigma_hat)
            .fold(f64::INFINITY, f64::min);
        ok &= s0.is_finite() && min >= 0.95 * s0;
        detail.push(format!(
            "{} T0={t0:.2e} σ̂(0)={s0:.4} min σ̂={min:.4}",
            eq.name()
        ));
    }
    Ok((ok, detail.join("; ")))
}

fn decay_law(dir: PathBuf) -> Outcome {
    let mut cfg = config("sech_continuation.cfg");
    cfg.output_dir = dir;
    let out = run_continuation(&cfg)?;
    let sched = gevrey::experiments::read_schedule_csv(&out.dir.join("schedule.csv"))?;
    let cont = out.summary.continuation.unwrap();
    let first = match cont.first_reduction {
        Some(p) => p,
        None => return Ok((false, "σ never reduced before T".into())),
    };
    let c = first.sigma * first.t.powf(4.0 / 3.0);
    let below = sched
        .iter()
        .filter(|(t, s)| *s < c * t.powf(-4.0 / 3.0) * (1.0 - 1e-12))
        .count();
    let fit = fit_power_law(&sched, None)?;
    let completed = cont.status == ContinuationStatus::Completed;
    Ok((
        completed && fit.exponent >= -4.0 / 3.0 - 0.05 && below == 0,
        format!(
            "{} points, first reduction t={:.3}, slope {:.4} (≥ {:.4}), c={c:.4}, points below c·T^(-4/3): {below}, status {:?}",
            sched.len(),
            first.t,
            fit.exponent,
            -4.0 / 3.0 - 0.05,
            cont.status
        ),
    ))
}

fn inequality_suites() -> Outcome {
    let r = run_verify(Suite::All, 42, &VerifyOptions::default())?;
    let items: Vec<String> = r
        .items
        .iter()
        .map(|i| format!("{} {}", i.name, if i.passed { "ok" } else { "FAILED" }))
        .collect();
    Ok((r.passed, items.join(", ")))
}

fn oracle_equivalence() -> Outcome {
    let g = make_grid(128, 30.0)?;
    let eq = EquationSpec::defocusing_mkdv();
    let u0 = sech(g, 1.0, 1.0, true).dealias();
    let picard = picard_solve(&u0, &eq, 0.1, 12, 81)?;
    let gap = picard
        .states
        .last()
        .unwrap()
        .max_distance(&final_state(&u0, &eq, 1e-3, 0.1)?)?;

    let v0 = sech(make_grid(128, 40.0)?, 1.0, 1.0, true);
    let (t, dt) = (1.0, 0.02);
    let reference = final_state(&v0, &EquationSpec::focusing_mkdv(), dt / 8.0, t)?;
    let e1 = final_state(&v0, &EquationSpec::focusing_mkdv(), dt, t)?.max_distance(&reference)?;
    let e2 =
        final_state(&v0, &EquationSpec::focusing_mkdv(), dt / 2.0, t)?.max_distance(&reference)?;
    let ratio = e1 / e2;
    Ok((
        gap < 1e-6 && (12.0..=20.0).contains(&ratio),
        format!("Picard gap {gap:.2e} (< 1e-6), order ratio {ratio:.2}"),
    ))
}

fn determinism(dir: PathBuf) -> Outcome {
    let mut cfg = config("random_band_mkdv.cfg");
    cfg.t_final = 1.0;
    let mut bytes = Vec::new();
    for k in 0..2 {
        cfg.output_dir = dir.join(format!("run{k}"));
        let out = run_simulate(&cfg)?;
        bytes.push((
            std::fs::read(out.dir.join("diagnostics.csv"))?,
            std::fs::read(out.dir.join("summary.json"))?,
        ));
    }
    let opts = VerifyOptions {
        samples: 50_000,
        kernel_samples: 50_000,
        trials: 10,
    };
    let v1 = run_verify(Suite::All, 7, &opts)?.to_json();
    let v2 = run_verify(Suite::All, 7, &opts)?.to_json();
    let sim = bytes[0] == bytes[1];
    Ok((
        sim && v1 == v2,
        format!("simulate identical: {sim}, verify identical: {}", v1 == v2),
    ))
}

#[test]
fn acceptance_criteria() {
    let tmp = tempfile::tempdir().unwrap();
    let (d7, d10) = (tmp.path().join("decay"), tmp.path().join("determinism"));
    let results: Vec<(usize, &str, Outcome)> = thread::scope(|s| {
        let jobs: Vec<(usize, &str, thread::ScopedJoinHandle<Outcome>)> = vec![
            (1, "exact-solution regression", s.spawn(exact_solutions)),
            (2, "conservation", s.spawn(conservation)),
            (3, "sigma = 0 anchor", s.spawn(sigma_zero_anchor)),
            (
                4,
                "almost-conservation inequality",
                s.spawn(almost_conservation),
            ),
            (5, "radius estimator accuracy", s.spawn(radius_accuracy)),
            (
                6,
                "local persistence of radius",
                s.spawn(radius_persistence),
            ),
            (7, "decay-law consistency", s.spawn(move || decay_law(d7))),
            (8, "inequality suites", s.spawn(inequality_suites)),
            (9, "oracle equivalence", s.spawn(oracle_equivalence)),
            (10, "determinism", s.spawn(move || determinism(d10))),
        ];
        jobs.into_iter()
            .map(|(i, name, h)| (i, name, h.join().expect("criterion panicked")))
            .collect()
    });
    let mut failed = Vec::new();
    for (i, name, outcome) in results {
        let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        println!(
            "[{}] {i:>2} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failed.push(i);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
