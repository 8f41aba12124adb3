//! Command-line front end.
//!
//! ```text
//! nilharm [run] <task> [--group NAME | --group-file PATH] [task flags] [--out PATH] [--seed N]
//! nilharm [run] experiment <file.toml> [--out PATH] [--seed N]
//! ```
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on input
//! errors.

pub mod config;
pub mod report;
pub mod tasks;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use config::{Defaults, ExperimentSpec, GroupSource, PsiSide, TaskKind, TaskParams, TermInput};
pub use report::{Check, Report};

use crate::error::{NilError, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "nilharm", version, about = "Harmonic analysis checks on two-step nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Builtin group: heisenberg-<n> or free2step-<m>.
    #[arg(long, conflicts_with = "group_file")]
    group: Option<String>,
    /// Group-definition file.
    #[arg(long)]
    group_file: Option<PathBuf>,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TermArgs {
    /// Chain term `λ;..|α;..|re,im`, or all numbers `;`-separated.
    #[arg(long = "term", allow_hyphen_values = true)]
    terms: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group axioms on random triples.
    VerifyGroup {
        #[command(flatten)]
        common: Common,
    },
    /// Frame residuals and homogeneity.
    Symplectic {
        #[command(flatten)]
        common: Common,
        /// `;`-separated central functional; random samples if absent.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Eigenfunction identities for one `(λ, α)`.
    Eigen {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Sup-norm behaviour and the chain relation.
    Chain {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        terms: TermArgs,
    },
    /// Windowed spectral concentration probe.
    Probe {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        terms: TermArgs,
        /// Bump `center;..|radius[|order]` for the aggregate.
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        /// Bump `center;..|radius[|order]` for the test function.
        #[arg(long, allow_hyphen_values = true)]
        psi: Option<String>,
        #[arg(long, value_parser = ["covering", "off-sphere"])]
        psi_side: Option<String>,
    },
    /// Embedding into an MW group and the lifted chain.
    Embed {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        terms: TermArgs,
    },
    /// Run an experiment file.
    Experiment {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn from_common(common: Common, task: TaskKind, params: TaskParams) -> ExperimentSpec {
    let group = match (common.group, common.group_file) {
        (_, Some(path)) => GroupSource::File(path),
        (Some(name), None) => GroupSource::Builtin(name),
        (None, None) => GroupSource::Builtin(
            if task == TaskKind::Embed { "free2step-3" } else { "heisenberg-1" }.to_string(),
        ),
    };
    ExperimentSpec {
        group,
        task,
        params,
        defaults: Defaults::default(),
        seed: common.seed,
        out: common.out,
    }
}

fn terms(t: TermArgs) -> Vec<TermInput> {
    t.terms.into_iter().map(TermInput::Text).collect()
}

fn spec_from_command(cmd: Command) -> Result<ExperimentSpec> {
    Ok(match cmd {
        Command::VerifyGroup { common } => from_common(common, TaskKind::VerifyGroup, TaskParams::default()),
        Command::Symplectic { common, lambda } => {
            let params = TaskParams {
                lambda: lambda.map(|l| config::parse_list(&l, "lambda")).transpose()?,
                ..TaskParams::default()
            };
            from_common(common, TaskKind::Symplectic, params)
        }
        Command::Eigen { common, lambda, alpha } => {
            let params = TaskParams {
                lambda: Some(config::parse_list(&lambda, "lambda")?),
                alpha: alpha.map(|a| config::parse_list(&a, "alpha")).transpose()?,
                ..TaskParams::default()
            };
            from_common(common, TaskKind::Eigen, params)
        }
        Command::Chain { common, terms: t } => {
            let params = TaskParams {
                terms: terms(t),
                ..TaskParams::default()
            };
            from_common(common, TaskKind::Chain, params)
        }
        Command::Probe {
            common,
            terms: t,
            phi,
            psi,
            psi_side,
        } => {
            let params = TaskParams {
                terms: terms(t),
                phi: phi.as_deref().map(config::parse_bump).transpose()?,
                psi: psi.as_deref().map(config::parse_bump).transpose()?,
                psi_side: psi_side.map(|s| {
                    if s == "covering" {
                        PsiSide::Covering
                    } else {
                        PsiSide::OffSphere
                    }
                }),
                ..TaskParams::default()
            };
            from_common(common, TaskKind::Probe, params)
        }
        Command::Embed { common, terms: t } => {
            let params = TaskParams {
                terms: terms(t),
                ..TaskParams::default()
            };
            from_common(common, TaskKind::Embed, params)
        }
        Command::Experiment { file, out, seed } => {
            let mut spec = ExperimentSpec::load(&file)?;
            if out.is_some() {
                spec.out = out;
            }
            if let Some(s) = seed {
                spec.seed = s;
            }
            spec
        }
    })
}

/// Runs one experiment. Input errors are returned; numerical-domain errors
/// are recorded as failed checks.
pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let start = Instant::now();
    let a = spec.group.load()?;
    let outcome = tasks::run_task(spec, &a)?;
    let pass = outcome.checks.iter().all(|c| c.pass);

    let mut parameters = BTreeMap::new();
    let params = serde_json::to_value(&spec.params).expect("serializable");
    if let serde_json::Value::Object(map) = params {
        for (k, v) in map {
            if !v.is_null() && v != serde_json::Value::Array(Vec::new()) {
                parameters.insert(k, v);
            }
        }
    }
    let mut environment = BTreeMap::new();
    environment.insert("seed".to_string(), spec.seed.into());
    environment.insert("version".to_string(), env!("CARGO_PKG_VERSION").into());
    environment.insert("group_dims".to_string(), serde_json::json!({ "m": a.m(), "k": a.k() }));
    environment.insert("defaults".to_string(), tasks::defaults_json(&spec.defaults));
    environment.insert("resolutions".to_string(), serde_json::Value::Object(outcome.resolutions));

    Ok(Report {
        task: spec.task.name().to_string(),
        group: spec.group.label(),
        parameters,
        checks: outcome.checks,
        environment,
        pass,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Parses arguments, runs, prints and writes the report; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if args.get(1).is_some_and(|a| a == "run") {
        args.remove(1);
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = spec_from_command(cli.command).and_then(|spec| {
        let report = run(&spec)?;
        let json = report.to_json();
        if let Some(path) = &spec.out {
            std::fs::write(path, format!("{json}\n")).map_err(NilError::from)?;
        }
        Ok((report.pass, json))
    });
    match outcome {
        Ok((pass, json)) => {
            println!("{json}");
            if pass {
                EXIT_PASS
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT_ERROR
        }
    }
}
