use std::path::PathBuf;
use std::process::ExitCode;

use burden::config::{AnalysisConfig, SimulationConfig};
use burden::pipeline::{run_analysis, run_simulation, write_bundle, write_simulation};
use burden::{ingest_csv, Error};
use clap::{Args, Parser, Subcommand};

/// Output directory override, used when `--out` is absent.
const OUT_ENV: &str = "BURDEN_OUT_DIR";

#[derive(Parser)]
#[command(name = "burden", version, about = "Cumulative disease burden analysis for multistate trials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured analysis and write tables, curves and summary.json.
    Analyze {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Simulate a trial and write data.csv, truth.json and tallies.json.
    Simulate {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Check a wide CSV file and report per-arm counts.
    Validate { csv: PathBuf },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Bootstrap replicates.
    #[arg(long)]
    boot: Option<usize>,
    /// Bootstrap seed for `analyze`, scenario seed for `simulate`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn output_dir(&self, configured: PathBuf) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or(configured)
    }
}

fn analyze(path: PathBuf, o: Overrides) -> Result<bool, Error> {
    let mut cfg = AnalysisConfig::load(&path)?;
    if let Some(t) = o.tau {
        cfg.tau = t;
    }
    if let Some(a) = o.alpha {
        cfg.alpha = a;
    }
    if let Some(b) = o.boot {
        cfg.bootstrap.replicates = b;
    }
    if let Some(s) = o.seed {
        cfg.bootstrap.seed = s;
    }
    cfg.output_dir = o.output_dir(cfg.output_dir.clone());
    cfg.validate()?;
    let data = ingest_csv(&cfg.input)?;
    let bundle = run_analysis(&cfg, &data)?;
    write_bundle(&bundle, &cfg.output_dir)?;
    for (row, subset) in bundle.sensitivity.iter().zip(&bundle.subsets) {
        if subset.failed() {
            eprintln!("subset {:?} failed; see summary.json", row.endpoints);
        }
    }
    println!("wrote {}", cfg.output_dir.display());
    Ok(!bundle.failed())
}

fn simulate(path: PathBuf, o: Overrides) -> Result<bool, Error> {
    let mut cfg = SimulationConfig::load(&path)?;
    if let Some(t) = o.tau {
        cfg.tau = t;
    }
    if let Some(s) = o.seed {
        cfg.scenario.seed = s;
    }
    if o.alpha.is_some() || o.boot.is_some() {
        return Err(Error::Config("--alpha and --boot do not apply to simulate".into()));
    }
    cfg.output_dir = o.output_dir(cfg.output_dir.clone());
    let out = run_simulation(&cfg)?;
    write_simulation(&out, &cfg.output_dir)?;
    println!("wrote {}", cfg.output_dir.display());
    Ok(true)
}

fn validate(path: PathBuf) -> Result<bool, Error> {
    let data = ingest_csv(&path)?;
    println!(
        "ok: {} treated, {} control, endpoints {}",
        data.treated.len(),
        data.control.len(),
        data.treated.state_space().labels().join(", ")
    );
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { config, overrides } => analyze(config, overrides),
        Command::Simulate { config, overrides } => simulate(config, overrides),
        Command::Validate { csv } => validate(csv),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
