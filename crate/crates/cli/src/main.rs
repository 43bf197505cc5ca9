use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use repstab::experiment::{run, ExperimentConfig, ExperimentError, Pipeline, Report, DEFAULT_SUITE_SEED};
use repstab::recovery::Variant;
use repstab::seminorms::run_catalogue;
use repstab::{Seminorm, ToleranceProfile};

#[derive(Parser)]
#[command(name = "repstab", version, about = "Certified recovery of representations from approximate ones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its JSON report and CSV.
    Run(RunArgs),
    /// Randomized check of the seminorm inequality catalogue.
    VerifySeminorms(VerifyArgs),
    /// Run the full acceptance matrix.
    Suite(SuiteArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory for reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the kernels (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance profile: default, strict or loose.
    #[arg(long)]
    tol_profile: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance spec, e.g. `perturb:d=0.01@regular@dihedral:4?seed=42`.
    #[arg(long)]
    instance: Option<String>,
    /// `op`, `S1`, `S2`, `S2:ref=4`, ...
    #[arg(long)]
    seminorm: Option<String>,
    /// defects, u2, dilate, recover, trace99, trace_c, trace_c(C), stabilize, snap, adjust, suite.
    #[arg(long)]
    pipeline: Option<String>,
    /// Constant for trace_c (shorthand for `--pipeline 'trace_c(C)'`).
    #[arg(long)]
    c: Option<f64>,
    /// full or early (recover only).
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    id: Option<String>,
    /// Include matrices in the JSON report.
    #[arg(long)]
    emit_matrices: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Largest matrix dimension sampled.
    #[arg(long, default_value_t = 8)]
    max_dim: usize,
    /// Seminorms to check (repeatable).
    #[arg(long = "seminorm", default_values_t = ["op".to_string(), "S1:ref=4".to_string(), "S2:ref=4".to_string()])]
    seminorms: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SuiteArgs {
    #[command(flatten)]
    common: Common,
}

fn config_error(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

fn build_config(a: &RunArgs) -> Result<ExperimentConfig, ExperimentError> {
    let mut config = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        None => {
            let p = a
                .pipeline
                .as_deref()
                .ok_or_else(|| config_error("either --config or --pipeline is required"))?;
            ExperimentConfig::new(p.parse().map_err(|e| config_error(format!("{e}")))?)
        }
    };
    if let Some(p) = &a.pipeline {
        config.pipeline = p.parse().map_err(|e| config_error(format!("{e}")))?;
    }
    if let Some(c) = a.c {
        match config.pipeline {
            Pipeline::TraceC(_) => config.pipeline = Pipeline::TraceC(Some(c)),
            other => return Err(config_error(format!("--c only applies to trace_c, not `{other}`"))),
        }
    }
    if let Some(i) = &a.instance {
        config.instance = Some(i.parse().map_err(|e| config_error(format!("{e}")))?);
    }
    if let Some(s) = &a.seminorm {
        config.seminorm = Some(s.clone());
    }
    if let Some(v) = &a.variant {
        config.variant = Some(match v.as_str() {
            "full" => Variant::Full,
            "early" => Variant::Early,
            _ => return Err(config_error(format!("unknown variant `{v}`"))),
        });
    }
    if let Some(id) = &a.id {
        config.id = Some(id.clone());
    }
    if a.emit_matrices {
        config.emit_matrices = Some(true);
    }
    apply_common(&mut config, &a.common);
    Ok(config)
}

fn apply_common(config: &mut ExperimentConfig, c: &Common) {
    if let Some(w) = c.workers {
        config.workers = Some(w);
    }
    if let Some(s) = c.seed {
        config.seed = Some(s);
    }
    if let Some(p) = &c.tol_profile {
        config.tolerance.profile = Some(p.clone());
    }
    if let Some(o) = &c.out {
        config.output.dir = Some(o.clone());
    }
}

fn finish(report: &Report) -> ExitCode {
    match report.write(None) {
        Ok((json, csv)) => {
            for e in report.ledger.failures() {
                println!("FAIL {} value={:e} bound={:e}", e.name, e.value, e.bound);
            }
            if let Some(rows) = &report.suite {
                for r in rows {
                    println!("{}", r.line());
                }
            }
            println!(
                "{}: {:?}, {} entries, {} failing; wrote {} and {}",
                report.experiment_id,
                report.status,
                report.entries,
                report.failures,
                json.display(),
                csv.display()
            );
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{}", config_error(format!("cannot write reports: {e}")).diagnostic());
            ExitCode::from(2)
        }
    }
}

fn fail(e: ExperimentError) -> ExitCode {
    eprintln!("{}", e.diagnostic());
    ExitCode::from(e.exit_code() as u8)
}

fn verify_seminorms(a: &VerifyArgs) -> Result<ExitCode, ExperimentError> {
    if a.trials == 0 {
        return Err(config_error("--trials must be at least 1"));
    }
    let tol = ToleranceProfile::named(a.common.tol_profile.as_deref().unwrap_or("default"))
        .map_err(|e| config_error(e.to_string()))?;
    let seed = a.common.seed.unwrap_or(0);
    let mut rows = Vec::new();
    for s in &a.seminorms {
        let s: Seminorm = s.parse().map_err(|e| config_error(format!("{e}")))?;
        rows.extend(run_catalogue(&s, a.trials, a.max_dim, seed, &tol)?);
    }
    let mut failures = 0;
    let mut csv = String::from("seminorm,tag,symbol,trials,failures,worst_slack\n");
    for r in &rows {
        failures += r.failures;
        println!(
            "{:<10} {:<8} trials={} failures={} worst_slack={:e}",
            r.seminorm.to_string(),
            r.tag.name(),
            r.trials,
            r.failures,
            r.worst_slack
        );
        csv += &format!(
            "{},{},{},{},{},{}\n",
            r.seminorm,
            r.tag.name(),
            r.tag.symbol(),
            r.trials,
            r.failures,
            r.worst_slack
        );
    }
    if let Some(dir) = &a.common.out {
        let write = || -> std::io::Result<()> {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("seminorms.csv"), &csv)?;
            let json = serde_json::to_string_pretty(&rows).expect("rows serialize");
            std::fs::write(dir.join("seminorms.json"), json + "\n")
        };
        write().map_err(|e| config_error(format!("cannot write reports: {e}")))?;
    }
    Ok(ExitCode::from(if failures == 0 { 0 } else { 1 }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(a) => match build_config(&a).and_then(|c| run(&c)) {
            Ok(r) => finish(&r),
            Err(e) => fail(e),
        },
        Command::VerifySeminorms(a) => verify_seminorms(&a).unwrap_or_else(fail),
        Command::Suite(a) => {
            let mut config = ExperimentConfig::new(Pipeline::Suite);
            config.seed = Some(DEFAULT_SUITE_SEED);
            apply_common(&mut config, &a.common);
            match run(&config) {
                Ok(r) => finish(&r),
                Err(e) => fail(e),
            }
        }
    }
}
