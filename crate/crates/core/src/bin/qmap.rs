//! Command-line front end. Exit codes: 0 ok, 1 usage, 2 parse, 3 capacity,
//! 4 verification or deadlock, 5 oracle guard.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qmap::circuit::QftOptions;
use qmap::mapper::PlacementStrategy;
use qmap::pipeline::{self, ArchSpec, GenSpec, MapRequest, PipelineError};

#[derive(Parser)]
#[command(
    name = "qmap",
    version,
    about = "Map quantum circuits onto multi-core processors and analyze their traffic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark circuit.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Map a circuit, verify it, and write mapped.qmap plus manifest.json.
    Map(MapArgs),
    /// Write traffic CSVs and report.json for a mapped file.
    Analyze {
        mapped: PathBuf,
        #[arg(long, default_value = "qmap-out")]
        out: PathBuf,
    },
    /// Compare heuristic routing cost with the exact optimum on a tiny instance.
    Oracle {
        circuit: PathBuf,
        #[command(flatten)]
        arch: ArchArgs,
        #[arg(long, default_value = "block")]
        placement: PlacementStrategy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Quantum Fourier transform.
    Qft {
        #[arg(long)]
        n: usize,
        /// Append the final qubit-reversal SWAPs.
        #[arg(long)]
        bit_reversal: bool,
        /// Measure every qubit at the end.
        #[arg(long)]
        measure: bool,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random one- and two-qubit gates.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gates: usize,
        /// Fraction of two-qubit gates.
        #[arg(long)]
        p2: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ArchArgs {
    /// Shorthand such as 8x8:alltoall/alltoall.
    #[arg(long)]
    arch: Option<String>,
    /// TOML architecture description.
    #[arg(long)]
    arch_file: Option<PathBuf>,
}

impl ArchArgs {
    fn spec(self) -> ArchSpec {
        match (self.arch, self.arch_file) {
            (Some(s), _) => ArchSpec::Shorthand(s),
            (None, Some(p)) => ArchSpec::File(p),
            (None, None) => unreachable!("clap requires one of --arch/--arch-file"),
        }
    }
}

#[derive(Args)]
struct MapArgs {
    circuit: PathBuf,
    #[command(flatten)]
    arch: ArchArgs,
    /// Allow fully occupied cores; enables the exchange primitive.
    #[arg(long)]
    allow_full: bool,
    #[arg(long, default_value = "block")]
    placement: PlacementStrategy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Teleport duration per core hop, in timesteps.
    #[arg(long)]
    dur_teleport: Option<u64>,
    /// Upcoming gates consulted when choosing an exchange victim.
    #[arg(long, default_value_t = 0)]
    lookahead: usize,
    #[arg(long, default_value = "qmap-out")]
    out: PathBuf,
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Gen(GenCommand::Qft {
            n,
            bit_reversal,
            measure,
            out,
        }) => {
            let spec = GenSpec::Qft {
                n,
                options: QftOptions {
                    bit_reversal,
                    measure,
                },
            };
            emit(pipeline::cmd_gen(&spec, out.as_deref())?, out.is_none());
        }
        Command::Gen(GenCommand::Random {
            n,
            gates,
            p2,
            seed,
            out,
        }) => {
            let spec = GenSpec::Random { n, gates, p2, seed };
            emit(pipeline::cmd_gen(&spec, out.as_deref())?, out.is_none());
        }
        Command::Map(a) => {
            let req = MapRequest {
                circuit: a.circuit,
                arch: a.arch.spec(),
                placement: a.placement,
                seed: a.seed,
                allow_full: a.allow_full,
                lookahead: a.lookahead,
                dur_teleport: a.dur_teleport,
                out_dir: a.out,
            };
            let done = pipeline::cmd_map(&req)?;
            let s = &done.manifest.summary;
            println!(
                "depth={} swaps={} teleports={} comm_ratio={:.6} -> {}",
                s.depth,
                s.swaps,
                s.teleports,
                s.comm_ratio,
                req.out_dir.join(pipeline::MAPPED_FILE).display()
            );
        }
        Command::Analyze { mapped, out } => {
            let done = pipeline::cmd_analyze(&mapped, &out)?;
            print!("{}", qmap::traffic::summary_csv(&done.report.summary));
            if done.report.energy.over_budget {
                log::warn!(
                    "vertical link energy {:e} J/bit exceeds the budget threshold",
                    done.report.energy.joules_per_bit
                );
            }
        }
        Command::Oracle {
            circuit,
            arch,
            placement,
            seed,
        } => {
            let c = pipeline::cmd_oracle(&circuit, &arch.spec(), placement, seed)?;
            println!("heuristic,optimal,ratio");
            println!("{},{},{:.4}", c.heuristic, c.optimal, c.ratio());
        }
    }
    Ok(())
}

fn emit(text: String, to_stdout: bool) {
    if to_stdout {
        print!("{text}");
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QMAP_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
