use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stschmidt::cli;
use stschmidt::config::RunConfig;
use stschmidt::export::{export, ExportWhat};
use stschmidt::{Error, Result};

#[derive(Parser)]
#[command(name = "stschmidt", version, about = "Spatiotemporal Schmidt decomposition of SPDC biphotons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML run configuration
    #[arg(short, long)]
    config: PathBuf,
    /// Override a key, e.g. `--set pump.w_p=2e-5` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; defaults to `output.dir` from the config
    #[arg(short, long)]
    out: Option<PathBuf>,
}

impl ConfigArgs {
    fn load(&self) -> Result<(RunConfig, PathBuf)> {
        let cfg = RunConfig::load(&self.config, &self.overrides)?;
        let out = self.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
        init_threads(cfg.workers)?;
        Ok((cfg, out))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose the configured state and write run artifacts
    Decompose(ConfigArgs),
    /// Compare against the dense oracle (small grids only)
    Validate {
        #[command(flatten)]
        args: ConfigArgs,
        #[arg(long, hide = true)]
        corrupt_weights: bool,
    },
    /// Evaluate K along the configured parameter ramp
    Sweep(ConfigArgs),
    /// Extract spectrum, intensity, sweep or mode:L,M from a run directory
    Export {
        /// Run directory written by `decompose` or `sweep`
        #[arg(short, long)]
        run: PathBuf,
        #[arg(short, long)]
        what: ExportWhat,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Time the reduced pipeline against the dense oracle
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "8,12,16")]
        sizes: Vec<usize>,
        /// Minimum seconds to repeat the reduced path for
        #[arg(long, default_value_t = 0.3)]
        min_time: f64,
        /// Also write the table as CSV
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn init_threads(workers: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    match cli.command {
        Command::Decompose(a) => {
            let (cfg, out) = a.load()?;
            let o = cli::decompose(&cfg, &out)?;
            for w in &o.warnings {
                eprintln!("warning: {w}");
            }
            println!("K = {:.10}  (from G1: {:.10})  modes = {}", o.summary.schmidt_number, o.summary.schmidt_number_g1, o.summary.retained_modes);
            println!("{}", o.report);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            if !o.report.all_pass() {
                let names: Vec<&str> = o.report.failures().iter().map(|c| c.name).collect();
                return Err(Error::Invariant(names.join(", ")));
            }
        }
        Command::Validate { args, corrupt_weights } => {
            let (cfg, out) = args.load()?;
            let rep = cli::validate(&cfg, corrupt_weights)?;
            println!("{rep}");
            std::fs::create_dir_all(&out)?;
            let json = serde_json::to_string_pretty(&rep).expect("report serializes");
            std::fs::write(out.join("validation.json"), json + "\n")?;
            if !rep.pass {
                return Err(Error::Invariant("reduced spectrum disagrees with the dense oracle".into()));
            }
        }
        Command::Sweep(a) => {
            let (cfg, out) = a.load()?;
            let (table, files) = cli::sweep(&cfg, &out)?;
            println!("{:>14} {:>16} {:>12}", table.axis.name(), "K", "side");
            for r in &table.rows {
                println!("{:>14.6e} {:>16.8} {:>12.4e}", r.value, r.k, r.side);
            }
            println!("trend: {:?}", table.trend);
            for f in &files {
                println!("wrote {}", f.display());
            }
        }
        Command::Export { run, what, out } => {
            export(&run, what, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Bench { sizes, min_time, out } => {
            init_threads(0)?;
            let rows = cli::bench(&sizes, min_time)?;
            let table = cli::bench_table(&rows);
            print!("{table}");
            if let Some(path) = out {
                std::fs::write(&path, table)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
