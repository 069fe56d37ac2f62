use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ptcool::acceptance;
use ptcool::config::{load_or_default, Config, CONFIG_ENV};
use ptcool::oracle::mean_phonon_ode;
use ptcool::spectra::cooling_rates;
use ptcool::sweep::{discrepancy_report, run_figure, run_sweep, FigureId, SweepSpec};
use ptcool::Error;

#[derive(Parser)]
#[command(name = "ptcool", version, about = "Gain-assisted optomechanical cooling: figures, sweeps and checks")]
struct Cli {
    /// JSON config file; falls back to $PTCOOL_CONFIG, then the reference set.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Output directory for datasets.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Include mechanical back-action in the total susceptibility.
    #[arg(long, global = true)]
    backaction: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write the mean-phonon relaxation from n_th for the configured
    /// parameters to this CSV.
    #[arg(long, global = true, value_name = "CSV")]
    trajectory: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one figure dataset (or `all`).
    Figure { id: String },
    /// Run a sweep described by a JSON spec file.
    Sweep { spec: PathBuf },
    /// Run the acceptance checks.
    Check,
    /// Run figures and write the discrepancy ledger.
    Ledger {
        /// Figures to include (default: all).
        figures: Vec<String>,
    },
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) | Error::Io(_) | Error::InvalidParameter { .. } => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn figure_ids(names: &[String]) -> ptcool::Result<Vec<FigureId>> {
    if names.is_empty() || names.iter().any(|n| n == "all") {
        return Ok(FigureId::ALL.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

fn write_trajectory(path: &Path, config: &Config) -> ptcool::Result<()> {
    let p = &config.params;
    let rates = cooling_rates(p, config.backaction)?;
    let total = p.gamma_m + rates.gamma_opt;
    let t_end = 10.0 / if total > 0.0 { total } else { p.gamma_m };
    let traj = mean_phonon_ode(&rates, p.gamma_m, config.thermal.n_th, config.thermal.n_th, t_end);
    traj.write_csv(BufWriter::new(File::create(path)?))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let mut config = load_or_default(cli.config.as_deref())?;
    if cli.backaction {
        config.backaction = true;
        config.raw.insert("backaction".into(), true.into());
    }
    let code = match &cli.command {
        Command::Figure { id } => {
            for f in figure_ids(std::slice::from_ref(id))? {
                let d = run_figure(f, &config)?;
                let (csv, _) = d.write_to(&cli.out)?;
                println!("{} ({} rows, {} flagged)", csv.display(), d.rows.len(), d.flagged_rows());
            }
            ExitCode::SUCCESS
        }
        Command::Sweep { spec } => {
            let text = std::fs::read_to_string(spec)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", spec.display())))?;
            let d = run_sweep(&SweepSpec::from_json(&text)?, &config)?;
            let (csv, _) = d.write_to(&cli.out)?;
            println!("{} ({} rows, {} flagged)", csv.display(), d.rows.len(), d.flagged_rows());
            ExitCode::SUCCESS
        }
        Command::Check => {
            let outcomes = acceptance::run_all();
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            println!("{} passed, {failed} failed", outcomes.len() - failed);
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Command::Ledger { figures } => {
            let ids = figure_ids(figures)?;
            for f in &ids {
                run_figure(*f, &config)?.write_to(&cli.out)?;
            }
            let ledger = discrepancy_report(&ids, &config);
            let md = ledger.to_markdown();
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("ledger.md");
            std::fs::write(&path, &md)?;
            print!("{md}");
            eprintln!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
    };
    if let Some(path) = &cli.trajectory {
        write_trajectory(path, &config)?;
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
