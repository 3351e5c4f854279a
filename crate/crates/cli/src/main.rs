use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use latgeo::domains::qmc;
use latgeo::experiment::{self, ExperimentConfig, Outcome};
use latgeo::numberfield::norms::GoodPositionMode;
use latgeo::spectral;
use latgeo::{Error, Result};

#[derive(Parser)]
#[command(name = "latgeo", version, about = "Lattice point counts in anisotropically expanding domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for counting.
    #[arg(long)]
    workers: Option<usize>,
    /// Boundary tolerance, overrides the config.
    #[arg(long)]
    tol: Option<f64>,
    /// QMC seed (decimal or 0x-hex), overrides the config.
    #[arg(long)]
    seed: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Count lattice points for each epsilon of the scan.
    Count(Common),
    /// Leading term for each epsilon of the scan.
    Leading(Common),
    /// Count, fit the remainder and report a verdict.
    Scan(Common),
    /// Refit an existing scan table.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Scan CSV; defaults to `<out>/<name>_scan.csv`.
        #[arg(long)]
        scan: Option<PathBuf>,
    },
    /// Eigenvalue counting function of a flat torus.
    Spectrum(Common),
    /// Partial density of states at radius rho.
    Pdos {
        #[arg(long)]
        rho: f64,
        /// Ambient dimension d.
        #[arg(long)]
        d: usize,
        /// Shift vector, comma separated; its length is k.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<f64>,
    },
    /// Print the decomposition of the lattice along the subspace.
    LatticeInfo(Common),
    /// Build and describe an algebraic lattice.
    Field(Common),
    /// Check whether the lattice is in good position.
    GoodPosition {
        #[command(flatten)]
        common: Common,
        /// Search for a small-norm point instead of certifying.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 8.0)]
        radius: f64,
    },
}

fn load(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    if let Some(t) = c.tol {
        if !(t >= 0.0) {
            return Err(Error::Config { field: "tol".into(), message: "must be nonnegative".into() });
        }
        cfg.tol = t;
    }
    if let Some(s) = &c.seed {
        cfg.seed = experiment::parse_seed(s).map_err(|m| Error::Config { field: "seed".into(), message: m })?;
    }
    if c.workers.is_some() {
        cfg.workers = c.workers;
    }
    qmc::set_seed(cfg.seed);
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Error::Config { field: "workers".into(), message: e.to_string() })?;
    }
    Ok(cfg)
}

fn report(o: Outcome) -> ExitCode {
    print!("{}", o.summary);
    for f in &o.files {
        println!("wrote {}", f.display());
    }
    match o.verdict {
        Some(false) => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    Ok(match cmd {
        Command::Count(c) => report(experiment::run_count(&load(&c)?, &c.out)?),
        Command::Leading(c) => report(experiment::run_leading(&load(&c)?, &c.out)?),
        Command::Scan(c) => report(experiment::run_scan(&load(&c)?, &c.out)?),
        Command::Fit { common, scan } => {
            let cfg = load(&common)?;
            let path = scan.unwrap_or_else(|| Path::new(&common.out).join(format!("{}_scan.csv", cfg.name)));
            report(experiment::run_fit(&cfg, &path, &common.out)?)
        }
        Command::Spectrum(c) => report(experiment::run_spectrum(&load(&c)?, &c.out)?),
        Command::Pdos { rho, d, k } => {
            println!("{:.12e}", spectral::partial_density_of_states(rho, &k, d, k.len())?);
            ExitCode::SUCCESS
        }
        Command::LatticeInfo(c) => {
            print!("{}", experiment::lattice_info(&load(&c)?)?);
            ExitCode::SUCCESS
        }
        Command::Field(c) => {
            print!("{}", experiment::field_info(&load(&c)?)?);
            ExitCode::SUCCESS
        }
        Command::GoodPosition { common, search, radius } => {
            let mode = if search { GoodPositionMode::Search } else { GoodPositionMode::Certified };
            let (text, ok) = experiment::good_position(&load(&common)?, mode, radius)?;
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
