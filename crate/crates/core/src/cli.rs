//! Command-line orchestration. Exit-code contract: 0 all checks pass,
//! 1 configuration or I/O error, 2 mathematical check failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::conefit::{fit_sgh_cone, ConeFitOutcome};
use crate::config::{render_report, ExperimentConfig, Resolved};
use crate::error::{Error, Result};
use crate::hybrid::{check_membership, validate_conditions};
use crate::iteration::{
    fejer_check, iterate, residual_decay_check, validate_schedule, ScheduleRole, Scheme,
    StopReason,
};
use crate::modulus::{estimate_g, ModulusPlan};
use crate::properties::{check_quasi_nonexpansive, Verdict};
use crate::sampling::sample_pairs;
use crate::space;
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "sgh", version, about = "Hybrid-mapping classification and fixed-point iteration experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate parameter conditions, check class membership, and (when
    /// fixed points are declared) quasi-nonexpansiveness.
    CheckClass {
        #[arg(long)]
        config: PathBuf,
        /// Directory for the JSON report (also printed to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's sampling seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit class parameters to a mapping by linear feasibility; emits a
    /// feasible quadruple or an infeasibility certificate.
    FitCone {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run an iteration scheme, write the trace CSV, and report convergence
    /// diagnostics.
    Iterate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for trace.csv and the JSON report (default:
        /// current directory).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the built-in verification suites over the mapping zoo and print
    /// a suite-by-suite pass/fail matrix.
    VerifyTheorems {
        /// One of the suite names, or "all".
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::CheckClass { config, out, seed } => cmd_check_class(&config, out.as_deref(), seed),
        Command::FitCone { config, out, seed } => cmd_fit_cone(&config, out.as_deref(), seed),
        Command::Iterate { config, out, seed } => cmd_iterate(&config, out.as_deref(), seed),
        Command::VerifyTheorems { suite, seed, out } => {
            cmd_verify_theorems(suite.as_deref(), seed, out.as_deref())
        }
    };
    match outcome {
        Ok(all_pass) => {
            if all_pass {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load(config_path: &Path, seed_override: Option<u64>) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(config_path)?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = seed_override {
        config.sampling.seed = seed;
    }
    Ok(config)
}

fn emit(report: &serde_json::Value, out: Option<&Path>, file_name: &str) -> Result<()> {
    let rendered = render_report(report);
    print!("{rendered}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(file_name), rendered)?;
    }
    Ok(())
}

/// Build the check-class report for an already-parsed config.
pub fn check_class_report(config: &ExperimentConfig) -> Result<(serde_json::Value, bool)> {
    let resolved = config.resolve()?;
    let params = resolved
        .params
        .ok_or_else(|| Error::Config("check-class requires a params block".into()))?;

    let conditions = validate_conditions(params);
    let membership = check_membership(&resolved.mapping, params, &resolved.pair_plan, resolved.tolerance)?;
    let quasi = if resolved.mapping.fixed_points().is_empty() {
        None
    } else {
        Some(check_quasi_nonexpansive(
            &resolved.mapping,
            resolved.mapping.fixed_points(),
            &resolved.point_plan,
            resolved.tolerance,
        )?)
    };

    let all_pass = membership.member
        && quasi.as_ref().map_or(true, |q| q.verdict == Verdict::Pass);
    let report = json!({
        "command": "check-class",
        "config": serde_json::to_value(config)?,
        "params": serde_json::to_value(params)?,
        "conditions": serde_json::to_value(conditions)?,
        "membership": serde_json::to_value(&membership)?,
        "quasi_nonexpansive": serde_json::to_value(&quasi)?,
        "all_pass": all_pass,
    });
    Ok((report, all_pass))
}

fn cmd_check_class(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<bool> {
    let config = load(config_path, seed)?;
    let (report, all_pass) = check_class_report(&config)?;
    emit(&report, out, "check-class-report.json")?;
    Ok(all_pass)
}

/// Build the fit-cone report for an already-parsed config.
pub fn fit_cone_report(config: &ExperimentConfig) -> Result<(serde_json::Value, bool)> {
    let resolved = config.resolve()?;
    let samples = sample_pairs(resolved.mapping.domain(), &resolved.pair_plan)?;
    let outcome = fit_sgh_cone(&resolved.mapping, &samples, &resolved.fit)?;

    let (outcome_value, recheck) = match &outcome {
        ConeFitOutcome::Feasible { params, radius } => {
            let mem = check_membership(&resolved.mapping, *params, &resolved.pair_plan, resolved.tolerance)?;
            (
                json!({
                    "feasible": true,
                    "params": serde_json::to_value(*params)?,
                    "chebyshev_radius": radius,
                }),
                Some(mem),
            )
        }
        ConeFitOutcome::Infeasible => (
            json!({
                "feasible": false,
                "certificate": "no parameter point satisfies all sampled residual constraints on the normalization slice",
            }),
            None,
        ),
    };

    let report = json!({
        "command": "fit-cone",
        "config": serde_json::to_value(config)?,
        "outcome": outcome_value,
        "membership_recheck": serde_json::to_value(&recheck)?,
    });
    // both a feasible point and an infeasibility certificate are successful
    // mathematical outcomes; the recheck gate catches fit inconsistencies
    Ok((report, recheck.map_or(true, |m| m.member)))
}

fn cmd_fit_cone(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<bool> {
    let config = load(config_path, seed)?;
    let (report, all_pass) = fit_cone_report(&config)?;
    emit(&report, out, "fit-cone-report.json")?;
    Ok(all_pass)
}

/// Build the iterate report for an already-parsed config. The trace CSV is
/// written only when a directory is supplied.
pub fn iterate_report(
    config: &ExperimentConfig,
    csv_dir: Option<&Path>,
) -> Result<(serde_json::Value, bool)> {
    let resolved = config.resolve()?;
    let scheme = resolved
        .scheme
        .ok_or_else(|| Error::Config("iterate requires a scheme".into()))?;
    let x0 = resolved
        .x0
        .clone()
        .ok_or_else(|| Error::Config("iterate requires a starting point x0".into()))?;

    // analytic hypothesis flags, reported before the run
    let mut schedule_verdicts = serde_json::Map::new();
    if let Some(a) = &resolved.schedules.alpha {
        schedule_verdicts.insert(
            "alpha".into(),
            serde_json::to_value(validate_schedule(a, ScheduleRole::Gamma))?,
        );
    }
    if let Some(l) = &resolved.schedules.lambda {
        schedule_verdicts.insert(
            "lambda".into(),
            serde_json::to_value(validate_schedule(l, ScheduleRole::Lambda))?,
        );
    }
    if let Some(g) = &resolved.schedules.gamma {
        schedule_verdicts.insert(
            "gamma".into(),
            serde_json::to_value(validate_schedule(g, ScheduleRole::Gamma))?,
        );
    }

    let trace = iterate(&resolved.mapping, &x0, scheme, &resolved.schedules, resolved.stop)?;

    let csv_path = match csv_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join("trace.csv");
            let mut csv = Vec::new();
            trace.write_csv(&mut csv)?;
            fs::write(&path, csv)?;
            Some(path)
        }
        None => None,
    };

    let hypotheses_ok = scheme != Scheme::Ishikawa
        || (resolved
            .schedules
            .lambda
            .as_ref()
            .map_or(false, |l| validate_schedule(l, ScheduleRole::Lambda).ok_for_role)
            && resolved
                .schedules
                .gamma
                .as_ref()
                .map_or(false, |g| validate_schedule(g, ScheduleRole::Gamma).ok_for_role));

    let mut fejer_reports = Vec::new();
    let mut decay_reports = Vec::new();
    let mut checks_pass = true;
    for q in resolved.mapping.fixed_points() {
        let slack = 1e-12 * (1.0 + space::dist(&x0, q)?);
        let fejer = fejer_check(&trace, q, slack)?;
        checks_pass &= fejer.pass;
        fejer_reports.push(fejer);

        if scheme == Scheme::Ishikawa && hypotheses_ok {
            let a = resolved
                .schedules
                .gamma
                .as_ref()
                .map(|g| g.infimum())
                .unwrap_or(0.0);
            let space_spec = resolved.space;
            let decay = if space_spec.p == 2.0 {
                residual_decay_check(&trace, q, a, |s| s * s, 1e-9)?
            } else {
                // fit a modulus on a ball that covers the recorded orbit
                let mut r: f64 = 0.0;
                for (n, x) in trace.iterates.iter().enumerate() {
                    r = r.max(space::dist(x, q)? + trace.residuals[n]);
                }
                let g = estimate_g(
                    space_spec,
                    (r * 1.05).max(1e-6),
                    &ModulusPlan {
                        seed: config.sampling.seed ^ 0x6d0d,
                        ..Default::default()
                    },
                )?;
                residual_decay_check(&trace, q, a, |s| g.eval(s), 1e-9)?
            };
            checks_pass &= decay.pass;
            decay_reports.push(decay);
        }
    }

    let domain_exit = trace.stop_reason == StopReason::DomainExit;
    let all_pass = !domain_exit && checks_pass;
    let report = json!({
        "command": "iterate",
        "config": serde_json::to_value(config)?,
        "schedule_verdicts": serde_json::Value::Object(schedule_verdicts),
        "hypotheses_satisfied": hypotheses_ok,
        "iterations": trace.steps(),
        "final_residual": trace.final_residual(),
        "final_iterate": serde_json::to_value(trace.final_iterate())?,
        "stop_reason": serde_json::to_value(trace.stop_reason)?,
        "fejer": serde_json::to_value(&fejer_reports)?,
        "residual_decay": serde_json::to_value(&decay_reports)?,
        "files": { "trace_csv": csv_path.as_ref().map(|p| p.to_string_lossy()) },
        "all_pass": all_pass,
    });
    Ok((report, all_pass))
}

fn cmd_iterate(config_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<bool> {
    let config = load(config_path, seed)?;
    let out_dir = out.unwrap_or(Path::new("."));
    let (report, all_pass) = iterate_report(&config, Some(out_dir))?;
    emit(&report, out, "iterate-report.json")?;
    Ok(all_pass)
}

fn cmd_verify_theorems(suite: Option<&str>, seed: u64, out: Option<&Path>) -> Result<bool> {
    let aggregate = verify::run_suites(suite, seed)?;
    for s in &aggregate.suites {
        let passed = s.checks.iter().filter(|c| c.pass).count();
        println!(
            "{:24} {}  ({passed}/{} checks)",
            s.suite,
            if s.pass { "PASS" } else { "FAIL" },
            s.checks.len()
        );
        for c in s.checks.iter().filter(|c| !c.pass) {
            println!("    FAIL {} (measure {:e})", c.name, c.measure);
        }
    }
    println!(
        "{}",
        if aggregate.all_pass {
            "all suites passed"
        } else {
            "some suites failed"
        }
    );
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        let value = serde_json::to_value(&aggregate)?;
        fs::write(dir.join("verify-report.json"), render_report(&value))?;
    }
    Ok(aggregate.all_pass)
}
