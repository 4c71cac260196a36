use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdcnot::config::Execution;
use qdcnot::{
    average_fidelity, cavity_coeffs, load_config, run_sweep, write_csv, CavityParams, Error, Target,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_ANCHOR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qdcnot",
    version,
    about = "Imperfect quantum-dot photonic CNOT simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average fidelity of one configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate the configured grid and write it as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the `output` key of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named reproduction target (fig3a, fig3b, fig4a, fig4b, table_anchors).
    Reproduce {
        target: String,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Evaluate grid points on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Print the cavity coefficients t1, r1, t0, r0 at resonance. Rates are in units of kappa.
    Cavity {
        #[arg(long)]
        g: f64,
        #[arg(long)]
        ks: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
    },
}

enum Failure {
    Lib(Error),
    Anchor,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn simulate(config: &Path) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let report = average_fidelity(
        cfg.circuit,
        &cfg.cavity()?,
        &cfg.errors,
        &cfg.input_ensemble()?,
    )?;
    print!("{report}");
    Ok(())
}

fn sweep(config: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load_config(config)?;
    let out = out.or_else(|| cfg.output.clone()).ok_or_else(|| {
        Failure::Usage("no output path: pass --out or set `output` in the config".into())
    })?;
    let table = run_sweep(&cfg)?;
    write_csv(&table, &out)?;
    let failed = table.rows.iter().filter(|r| !r.is_ok()).count();
    println!("wrote {} rows to {}", table.rows.len(), out.display());
    if failed > 0 {
        eprintln!("{failed} grid points failed; see the status column");
    }
    Ok(())
}

fn reproduce(target: &str, out_dir: &Path, serial: bool) -> Result<(), Failure> {
    let target: Target = target.parse()?;
    let execution = if serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let report = qdcnot::reproduce(target, out_dir, execution)?;
    print!("{}", report.summary());
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Anchor)
    }
}

fn cavity(g: f64, ks: f64, gamma: f64) -> Result<(), Failure> {
    let k = cavity_coeffs(&CavityParams::from_ratios(g, ks, gamma)?)?;
    println!("t1 = {:.10}", k.t1);
    println!("r1 = {:.10}", k.r1);
    println!("t0 = {:.10}", k.t0);
    println!("r0 = {:.10}", k.r0);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Simulate { config } => simulate(&config),
        Command::Sweep { config, out } => sweep(&config, out),
        Command::Reproduce {
            target,
            out_dir,
            serial,
        } => reproduce(&target, &out_dir, serial),
        Command::Cavity { g, ks, gamma } => cavity(g, ks, gamma),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { EXIT_IO } else { EXIT_CONFIG })
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Anchor) => {
            eprintln!("anchor check failed");
            ExitCode::from(EXIT_ANCHOR)
        }
    }
}
