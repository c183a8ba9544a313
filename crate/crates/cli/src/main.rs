use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fixpoint_cli::commands::{self, Delay, Engine, RunOptions, Schedule};
use fixpoint_core::WriteMode;

#[derive(Parser)]
#[command(
    name = "fixpoint",
    version,
    about = "Least common fixed points under interleaved, parallel and distributed execution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an engine on an instance and report the result.
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Parallel)]
        engine: EngineArg,
        /// Write mode of the parallel engine.
        #[arg(long, value_enum, default_value_t = ModeArg::UpdateOnChange)]
        mode: ModeArg,
        /// Interleaved: round-robin or seeded. Parallel: seeded, synchronous or lost-update.
        #[arg(long, value_enum)]
        schedule: Option<ScheduleArg>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Distributed: bound T on view staleness, in rounds.
        #[arg(long, default_value_t = 0)]
        staleness: usize,
        #[arg(long, value_enum, default_value_t = DelayArg::Uniform)]
        delay: DelayArg,
        /// Interleaved: fairness window. Parallel: run seeded subsets of functions with this window.
        #[arg(long)]
        window: Option<usize>,
        /// Step or round limit.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Replay a trace file against its instance and check the invariants.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run a named counterexample scenario and its repaired twin.
    Counterexample {
        name: String,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Check monotonicity, inflationarity and locality of an instance's family.
    Audit {
        #[arg(long)]
        instance: PathBuf,
        /// Sampled states when the lattice is too large to enumerate.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the reference answer for an instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Interleaved,
    Parallel,
    Distributed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    UpdateOnChange,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    RoundRobin,
    Seeded,
    Synchronous,
    LostUpdate,
}

#[derive(Clone, Copy, ValueEnum)]
enum DelayArg {
    Uniform,
    MaxDelay,
}

fn dispatch(command: Command, out: &mut dyn Write) -> io::Result<u8> {
    match command {
        Command::Run {
            instance,
            engine,
            mode,
            schedule,
            seed,
            staleness,
            delay,
            window,
            limit,
            trace_out,
        } => {
            let opts = RunOptions {
                engine: match engine {
                    EngineArg::Interleaved => Engine::Interleaved,
                    EngineArg::Parallel => Engine::Parallel,
                    EngineArg::Distributed => Engine::Distributed,
                },
                mode: match mode {
                    ModeArg::UpdateOnChange => WriteMode::UpdateOnChange,
                    ModeArg::Naive => WriteMode::Naive,
                },
                schedule: schedule.map(|s| match s {
                    ScheduleArg::RoundRobin => Schedule::RoundRobin,
                    ScheduleArg::Seeded => Schedule::Seeded,
                    ScheduleArg::Synchronous => Schedule::Synchronous,
                    ScheduleArg::LostUpdate => Schedule::LostUpdate,
                }),
                seed,
                staleness,
                delay: match delay {
                    DelayArg::Uniform => Delay::Uniform,
                    DelayArg::MaxDelay => Delay::MaxDelay,
                },
                window,
                limit,
            };
            commands::cmd_run(out, &instance, &opts, trace_out.as_deref())
        }
        Command::Verify { trace, instance } => commands::cmd_verify(out, &trace, &instance),
        Command::Counterexample { name, trace_out } => commands::cmd_counterexample(out, &name, trace_out.as_deref()),
        Command::Audit {
            instance,
            samples,
            seed,
        } => commands::cmd_audit(out, &instance, samples, seed),
        Command::Oracle { instance } => commands::cmd_oracle(out, &instance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit::SCHEMA)
        }
    }
}
