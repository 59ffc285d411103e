//! `hilbert-teich`: desk-scale experiments on the once-punctured torus.

mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use hilbert_teich::Slope;

#[derive(Parser)]
#[command(name = "hilbert-teich", version, about = "Hilbert metric on Teichmüller space: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Overrides,
    /// JSON file with the same fields as the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Cone metric property suite on random polyhedral cones.
    Axioms,
    /// Reparametrized earthquake ray: trajectory and almost-geodesic defect.
    Ray,
    /// Length-defect and derivative sweeps along an earthquake.
    Bounds,
    /// Flip inequalities on random quadrilaterals and the flip comparison sweep.
    Flip,
    /// Radial comparison along an earthquake.
    Radial,
    /// Dehn-twist distortion, orbit distances and a non-isometry witness.
    Mcg,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Axioms => "axioms",
            Command::Ray => "ray",
            Command::Bounds => "bounds",
            Command::Flip => "flip",
            Command::Radial => "radial",
            Command::Mcg => "mcg",
        }
    }
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct Overrides {
    /// Truncation height.
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho0: Option<f64>,
    /// Earthquake or twist curve as p/q.
    #[arg(long, global = true, allow_hyphen_values = true)]
    slope: Option<String>,
    /// Weight of the curve.
    #[arg(long, global = true, allow_negative_numbers = true)]
    weight: Option<f64>,
    /// Largest amplitude of the sweep.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tmax: Option<f64>,
    /// Number of grid points (orbit length for `mcg`).
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Seed for the sampled experiments.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

impl Overrides {
    fn or(self, other: Overrides) -> Overrides {
        Overrides {
            rho0: self.rho0.or(other.rho0),
            slope: self.slope.or(other.slope),
            weight: self.weight.or(other.weight),
            tmax: self.tmax.or(other.tmax),
            steps: self.steps.or(other.steps),
            seed: self.seed.or(other.seed),
            out: self.out.or(other.out),
            format: self.format.or(other.format),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Config {
    pub rho0: f64,
    pub slope: Slope,
    pub weight: f64,
    pub tmax: f64,
    pub steps: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

fn resolve(flags: Overrides, file: Option<PathBuf>) -> Result<Config, String> {
    let from_file = match file {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Overrides::default(),
    };
    let o = flags.or(from_file);
    let slope: Slope = o.slope.as_deref().unwrap_or("1/0").parse().map_err(|e| format!("{e}"))?;
    let cfg = Config {
        rho0: o.rho0.unwrap_or(2.0),
        slope,
        weight: o.weight.unwrap_or(1.0),
        tmax: o.tmax.unwrap_or(200.0),
        steps: o.steps.unwrap_or(64),
        seed: o.seed.unwrap_or(0),
        out: o.out.unwrap_or_else(|| PathBuf::from("hilbert-teich-out")),
        format: o.format.unwrap_or(Format::Csv),
    };
    if !(cfg.rho0 > 0.0) {
        return Err(format!("rho0 must be positive, got {}", cfg.rho0));
    }
    if !(cfg.weight > 0.0) {
        return Err(format!("weight must be positive, got {}", cfg.weight));
    }
    if !(cfg.tmax > 0.0) {
        return Err(format!("tmax must be positive, got {}", cfg.tmax));
    }
    if cfg.steps < 2 {
        return Err(format!("steps must be at least 2, got {}", cfg.steps));
    }
    Ok(cfg)
}

fn init_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var("HILBERT_TEICH_THREADS") {
        let n: usize = v.parse().map_err(|_| format!("HILBERT_TEICH_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            return Err("HILBERT_TEICH_THREADS must be a positive integer, got 0".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match init_threads().and_then(|_| resolve(cli.flags, cli.config)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match cli.command {
        Command::Axioms => experiments::axioms(&cfg),
        Command::Ray => experiments::ray(&cfg),
        Command::Bounds => experiments::bounds(&cfg),
        Command::Flip => experiments::flip(&cfg),
        Command::Radial => experiments::radial(&cfg),
        Command::Mcg => experiments::mcg(&cfg),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let summary = match output::write(&cfg, cli.command.name(), &report) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    println!("{summary}");
    let failed: Vec<_> = report.claims.iter().filter(|c| !c.pass).collect();
    for c in &failed {
        eprintln!(
            "violation: {} (worst {:e} > bound {:e})",
            c.claim, c.worst_observed, c.bound
        );
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
