use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pli_lab::experiment::{self, Experiment, ExperimentConfig, ExperimentError};

/// Run one experiment and write CSV, SVG and manifest.json to the output directory.
///
/// Extra parameters are given as `--key value` or `key=value`.
#[derive(Parser, Debug)]
#[command(name = "pli-lab", version)]
struct Cli {
    /// scalar-profile, flow, high-gain, dt-sweep, pli-diagnose or prox
    experiment: String,
    /// JSON object with parameters
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: out)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, hide = true)]
    rest: Vec<String>,
}

fn pairs(rest: &[String]) -> Result<Vec<(String, String)>, ExperimentError> {
    let mut out = Vec::new();
    let mut it = rest.iter();
    while let Some(arg) = it.next() {
        if let Some(key) = arg.strip_prefix("--") {
            if let Some((k, v)) = key.split_once('=') {
                out.push((k.to_string(), v.to_string()));
            } else {
                let v = it
                    .next()
                    .ok_or_else(|| ExperimentError::Config(format!("missing value for --{key}")))?;
                out.push((key.to_string(), v.clone()));
            }
        } else if let Some((k, v)) = arg.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            return Err(ExperimentError::Config(format!("unexpected argument '{arg}'")));
        }
    }
    Ok(out)
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, ExperimentError> {
    let exp: Experiment = cli.experiment.parse()?;
    let file = cli.config.as_deref().map(experiment::read_config_file).transpose()?;
    let env_seed = std::env::var(experiment::SEED_ENV).ok();
    ExperimentConfig::resolve(
        exp,
        file.as_ref(),
        &pairs(&cli.rest)?,
        env_seed.as_deref(),
        cli.out.clone(),
    )
}

fn fail(e: &ExperimentError, out: Option<&std::path::Path>) -> ExitCode {
    let body = serde_json::to_string(&e.to_json()).unwrap_or_default();
    eprintln!("{body}");
    if let Some(dir) = out {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = experiment::write_atomic(dir, "error.json", body.as_bytes());
        }
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e, cli.out.as_deref()),
    };
    match experiment::run(&cfg) {
        Ok(summary) => {
            for o in &summary.outputs {
                println!("{}  {}", o.sha256, cfg.out_dir.join(&o.path).display());
            }
            println!("manifest: {}", summary.manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, Some(&cfg.out_dir)),
    }
}
