mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cumruin::mc::{estimate_events, McConfig, RuinEvent, Surplus};
use cumruin::validate::{self, OracleBudget, Report, Suite};
use cumruin::{
    classical_ruin_prob_cl, cum_parisian_prob_bm, cum_parisian_prob_cl, exp_parisian_prob_bm,
    exp_parisian_prob_cl, ruin_prob_bm, Error, ModelParams,
};
use serde::Serialize;

use config::{ConfigError, Format, Method, RuinKind, RunArgs, RunConfig};

const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "cumruin",
    version,
    about = "Finite-time cumulative Parisian and classical ruin probabilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form probabilities, optionally swept over one parameter.
    Compute(RunArgs),
    /// Monte Carlo estimates with standard errors.
    Simulate(RunArgs),
    /// Run a validation suite and report every check.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Identities,
    Transform,
    Oracle,
    All,
}

#[derive(clap::Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "all")]
    suite: SuiteArg,
    /// Path budget for every Monte Carlo check (default: the acceptance budgets).
    #[arg(long)]
    paths: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Euler step for the Brownian oracle.
    #[arg(long)]
    dt: Option<f64>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Numerical(String),
    Validation,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Domain(_) | Error::NetProfit => {
                Failure::Config(e.to_string())
            }
            Error::Quadrature { .. } | Error::Truncation(_) | Error::Normalization(_) => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Row {
    sweep_var: String,
    value: Option<f64>,
    probability: f64,
    std_error: Option<f64>,
    method: &'static str,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct RunOutput<'a> {
    schema_version: &'static str,
    config: &'a RunConfig,
    rows: &'a [Row],
}

fn formula(cfg: &RunConfig) -> Result<f64, Failure> {
    let p = match (cfg.model_params()?, cfg.ruin) {
        (_, RuinKind::Parisian) => {
            return Err(Failure::Config(
                "parisian ruin has no closed form here; use --method simulate".into(),
            ))
        }
        (ModelParams::CramerLundberg(m), RuinKind::Classical) => {
            classical_ruin_prob_cl(&m, cfg.x, cfg.t)?
        }
        (ModelParams::CramerLundberg(m), RuinKind::Cumulative) => {
            cum_parisian_prob_cl(&m, cfg.x, cfg.r, cfg.t)?
        }
        (ModelParams::CramerLundberg(m), RuinKind::Exponential) => {
            exp_parisian_prob_cl(&m, cfg.x, cfg.q, cfg.t)?
        }
        (ModelParams::Brownian(b), RuinKind::Classical) => ruin_prob_bm(&b, cfg.x, cfg.t)?,
        (ModelParams::Brownian(b), RuinKind::Cumulative) => {
            cum_parisian_prob_bm(&b, cfg.x, cfg.r, cfg.t)?
        }
        (ModelParams::Brownian(b), RuinKind::Exponential) => {
            exp_parisian_prob_bm(&b, cfg.x, cfg.q, cfg.t)?
        }
    };
    Ok(p)
}

fn simulate(cfg: &RunConfig) -> Result<cumruin::mc::Estimate, Failure> {
    let sim = match cfg.model_params()? {
        ModelParams::CramerLundberg(m) => Surplus::CramerLundberg(m),
        ModelParams::Brownian(b) => Surplus::Brownian {
            params: b,
            dt: cfg.dt,
        },
    };
    let event = match cfg.ruin {
        RuinKind::Classical => RuinEvent::Classical,
        RuinKind::Cumulative => RuinEvent::Cumulative { r: cfg.r },
        RuinKind::Exponential => RuinEvent::ExponentialParisian { q: cfg.q },
        RuinKind::Parisian => RuinEvent::Parisian { r: cfg.r },
    };
    let mc = McConfig::new(cfg.paths, cfg.seed)?;
    Ok(estimate_events(&sim, cfg.x, cfg.t, &[event], mc)?.remove(0))
}

fn rows_for(cfg: &RunConfig, sweep_var: &str, value: Option<f64>) -> Result<Vec<Row>, Failure> {
    let mut rows = Vec::new();
    if matches!(cfg.method, Method::Formula | Method::Both) {
        let probability = formula(cfg)?;
        rows.push(Row {
            sweep_var: sweep_var.into(),
            value,
            probability,
            std_error: None,
            method: "formula",
            seed: None,
        });
    }
    if matches!(cfg.method, Method::Simulate | Method::Both) {
        let e = simulate(cfg)?;
        rows.push(Row {
            sweep_var: sweep_var.into(),
            value,
            probability: e.probability,
            std_error: Some(e.std_error),
            method: "simulate",
            seed: Some(e.seed),
        });
    }
    Ok(rows)
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn render(cfg: &RunConfig, rows: &[Row]) -> String {
    match cfg.format {
        Format::Csv => {
            let mut s = String::from("sweep_var,value,probability,std_error,method,seed\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.sweep_var,
                    fmt_opt(r.value),
                    r.probability,
                    fmt_opt(r.std_error),
                    r.method,
                    fmt_opt(r.seed)
                );
            }
            s
        }
        Format::Json => {
            let out = RunOutput {
                schema_version: SCHEMA_VERSION,
                config: cfg,
                rows,
            };
            serde_json::to_string_pretty(&out).expect("rows serialize") + "\n"
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn run(args: &RunArgs, default_method: Method) -> Result<(), Failure> {
    let cfg = args.resolve(default_method)?;
    let rows = match cfg.sweep {
        None => rows_for(&cfg, "none", None)?,
        Some(sweep) => {
            let mut rows = Vec::new();
            for v in sweep.values() {
                rows.extend(rows_for(&cfg.at(sweep.var, v)?, sweep.var.name(), Some(v))?);
            }
            rows
        }
    };
    emit(&render(&cfg, &rows), cfg.out.as_ref())
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    schema_version: &'static str,
    suite: &'static str,
    passed: bool,
    budget: OracleBudget,
    checks: &'a [validate::Check],
}

fn run_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let (suite, name) = match args.suite {
        SuiteArg::Identities => (Suite::Identities, "identities"),
        SuiteArg::Transform => (Suite::Transform, "transform"),
        SuiteArg::Oracle => (Suite::Oracle, "oracle"),
        SuiteArg::All => (Suite::All, "all"),
    };
    let mut budget = match args.paths {
        Some(0) => return Err(Failure::Config("paths must be >= 1".into())),
        Some(n) => OracleBudget::uniform(n),
        None => OracleBudget::default(),
    };
    if let Some(seed) = args.seed {
        budget.seed = seed;
    }
    if let Some(dt) = args.dt {
        if !(dt > 0.0 && dt <= 1.0) {
            return Err(Failure::Config(format!("dt must be in (0, 1], got {dt}")));
        }
        budget.dt = dt;
    }
    let report: Report = validate::run(suite, &budget)?;
    let json = serde_json::to_string_pretty(&ValidateOutput {
        schema_version: SCHEMA_VERSION,
        suite: name,
        passed: report.passed(),
        budget,
        checks: &report.checks,
    })
    .expect("report serializes")
        + "\n";
    if let Some(p) = &args.out {
        std::fs::write(p, &json)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display())))?;
    }
    if args.format == Some(Format::Json) {
        emit(&json, None)?;
    } else {
        let mut text = String::new();
        for c in &report.checks {
            let _ = writeln!(
                text,
                "{} [criterion {}] {}: observed {:.3e}, tolerance {:.3e}",
                if c.passed { "ok  " } else { "FAIL" },
                c.criterion,
                c.name,
                c.observed,
                c.tolerance
            );
        }
        let failures = report.failures().count();
        let _ = writeln!(text, "{} checks, {} failed", report.checks.len(), failures);
        emit(&text, None)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(a) => run(a, Method::Formula),
        Command::Simulate(a) => run(a, Method::Simulate),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
