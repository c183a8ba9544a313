//! Subcommand implementations. Each writes a textual report and returns the
//! process exit code.

use std::io::{self, Write};
use std::path::Path;

use fixpoint_core::engine::distributed::QuiescenceReport;
use fixpoint_core::oracles::lcfp_roundrobin;
use fixpoint_core::trace::{check_ascent, check_dominated, check_round_progress, InvariantFailure};
use fixpoint_core::tracefile::{parse_trace, write_trace, TraceHeader};
use fixpoint_core::{
    audit_family, run_counterexample, run_distributed, run_interleaved, run_parallel, run_repaired_twin, Error,
    ExecutionTrace, FairSchedule, FunctionFamily, IntraRoundPolicy, ParallelConfig, RoundPlan, SchedulePolicy,
    StalenessParams, TerminalStatus, Verdict, ViolationKind, WriteMode,
};

use crate::instance::Instance;

pub mod exit {
    pub const OK: u8 = 0;
    pub const SCHEMA: u8 = 2;
    pub const LIMIT: u8 = 3;
    pub const CONTRACT: u8 = 4;
    pub const DEVIATES: u8 = 5;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Interleaved,
    Parallel,
    Distributed,
}

impl Engine {
    fn as_str(self) -> &'static str {
        match self {
            Engine::Interleaved => "interleaved",
            Engine::Parallel => "parallel",
            Engine::Distributed => "distributed",
        }
    }
}

/// Read/write ordering inside a step or round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    RoundRobin,
    Seeded,
    Synchronous,
    LostUpdate,
}

impl Schedule {
    fn as_str(self) -> &'static str {
        match self {
            Schedule::RoundRobin => "round-robin",
            Schedule::Seeded => "seeded",
            Schedule::Synchronous => "synchronous",
            Schedule::LostUpdate => "lost-update",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delay {
    Uniform,
    MaxDelay,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub engine: Engine,
    pub mode: WriteMode,
    pub schedule: Option<Schedule>,
    pub seed: u64,
    pub staleness: usize,
    pub delay: Delay,
    pub window: Option<usize>,
    pub limit: Option<usize>,
}

impl RunOptions {
    /// Parameter line stored in trace headers. Only settings the engine
    /// actually uses are listed.
    fn params(&self) -> String {
        let mut p = format!("seed={}", self.seed);
        match self.engine {
            Engine::Interleaved => {}
            Engine::Parallel => {
                let mode = match self.mode {
                    WriteMode::UpdateOnChange => "update-on-change",
                    WriteMode::Naive => "naive",
                };
                p.push_str(&format!(" mode={mode}"));
            }
            Engine::Distributed => {
                let delay = match self.delay {
                    Delay::Uniform => "uniform",
                    Delay::MaxDelay => "max-delay",
                };
                p.push_str(&format!(" staleness={} delay={delay}", self.staleness));
            }
        }
        if let Some(s) = self.schedule {
            p.push_str(&format!(" schedule={}", s.as_str()));
        }
        if let Some(w) = self.window {
            p.push_str(&format!(" window={w}"));
        }
        if let Some(l) = self.limit {
            p.push_str(&format!(" limit={l}"));
        }
        p
    }
}

fn usage_error(out: &mut dyn Write, message: &str) -> io::Result<u8> {
    writeln!(out, "error: {message}")?;
    Ok(exit::SCHEMA)
}

fn engine_error(out: &mut dyn Write, e: &Error) -> io::Result<u8> {
    writeln!(out, "error: {e}")?;
    Ok(match e {
        Error::ContractViolation { .. } | Error::LocalityViolation { .. } | Error::OutOfBounds { .. } => exit::CONTRACT,
        Error::StepLimit { .. } => exit::LIMIT,
        _ => exit::SCHEMA,
    })
}

fn load(out: &mut dyn Write, path: &Path) -> io::Result<Result<(Instance, FunctionFamily), u8>> {
    let inst = match Instance::load(path) {
        Ok(i) => i,
        Err(e) => return usage_error(out, &e.to_string()).map(Err),
    };
    let family = inst.family().expect("validated on load");
    Ok(Ok((inst, family)))
}

fn execute(
    family: &FunctionFamily,
    opts: &RunOptions,
) -> Result<(ExecutionTrace, Option<QuiescenceReport>), Result<Error, String>> {
    match opts.engine {
        Engine::Interleaved => {
            let policy = match opts.schedule.unwrap_or(Schedule::Seeded) {
                Schedule::RoundRobin => SchedulePolicy::RoundRobin,
                Schedule::Seeded => SchedulePolicy::SeededRandom {
                    seed: opts.seed,
                    window: opts.window,
                },
                other => {
                    return Err(Err(format!(
                        "schedule {} does not apply to the interleaved engine",
                        other.as_str()
                    )))
                }
            };
            let schedule = FairSchedule {
                policy,
                step_limit: opts.limit,
            };
            run_interleaved(family, &schedule).map(|t| (t, None)).map_err(Ok)
        }
        Engine::Parallel => {
            let intra = match opts.schedule.unwrap_or(Schedule::Seeded) {
                Schedule::Seeded => IntraRoundPolicy::Seeded,
                Schedule::Synchronous => IntraRoundPolicy::Synchronous,
                Schedule::LostUpdate => IntraRoundPolicy::LostUpdate,
                Schedule::RoundRobin => {
                    return Err(Err("schedule round-robin does not apply to the parallel engine".into()))
                }
            };
            let mut config = ParallelConfig::seeded(opts.seed).with_mode(opts.mode).with_intra(intra);
            if let Some(window) = opts.window {
                config = config.with_plan(RoundPlan::SeededSubset {
                    seed: opts.seed,
                    window,
                });
            }
            if let Some(limit) = opts.limit {
                config = config.with_limit(limit);
            }
            run_parallel(family, &config).map(|t| (t, None)).map_err(Ok)
        }
        Engine::Distributed => {
            if opts.schedule.is_some() {
                return Err(Err(
                    "the distributed engine uses a fixed block round-robin schedule".into()
                ));
            }
            let params = match opts.delay {
                Delay::Uniform => StalenessParams::uniform(opts.staleness, opts.seed),
                Delay::MaxDelay => StalenessParams::max_delay(opts.staleness),
            };
            run_distributed(family, &params, opts.limit)
                .map(|(t, q)| (t, Some(q)))
                .map_err(Ok)
        }
    }
}

fn verdict(failure: &Option<InvariantFailure>) -> String {
    match failure {
        None => "PASS".into(),
        Some(f) => match f.coord {
            Some(c) => format!("FAIL at round {} coordinate {c}: {}", f.step, f.detail),
            None => format!("FAIL at round {}: {}", f.step, f.detail),
        },
    }
}

/// Prints the invariant checks on `trace`; returns whether all hold.
fn invariant_lines(out: &mut dyn Write, family: &FunctionFamily, trace: &ExecutionTrace) -> io::Result<bool> {
    let progress = check_round_progress(&family.bounds, trace);
    let ascent = check_ascent(&family.bounds, trace);
    writeln!(
        out,
        "check writes-at-least-start {}",
        verdict(&progress.writes_at_least_start)
    )?;
    writeln!(out, "check round-ascent {}", verdict(&progress.ascent))?;
    writeln!(
        out,
        "check unchanged-iff-unwritten {}",
        verdict(&progress.unchanged_iff_unwritten)
    )?;
    writeln!(out, "check chain-ascent {}", verdict(&ascent))?;
    let dominance = match lcfp_roundrobin(family) {
        Ok(lcfp) => {
            let d = check_dominated(&family.bounds, trace, &lcfp);
            writeln!(out, "check below-least-fixed-point {}", verdict(&d))?;
            d.is_none()
        }
        Err(e) => {
            writeln!(out, "check below-least-fixed-point SKIPPED ({e})")?;
            true
        }
    };
    Ok(progress.all_hold() && ascent.is_none() && dominance)
}

pub fn cmd_run(out: &mut dyn Write, instance: &Path, opts: &RunOptions, trace_out: Option<&Path>) -> io::Result<u8> {
    let (inst, family) = match load(out, instance)? {
        Ok(x) => x,
        Err(code) => return Ok(code),
    };
    let (trace, quiescence) = match execute(&family, opts) {
        Ok(x) => x,
        Err(Ok(e)) => return engine_error(out, &e),
        Err(Err(msg)) => return usage_error(out, &msg),
    };
    let fingerprint = inst.fingerprint();
    writeln!(out, "family {} fingerprint {fingerprint}", family.name)?;
    writeln!(out, "engine {} {}", opts.engine.as_str(), opts.params())?;
    writeln!(out, "status {}", trace.status.as_str())?;
    let unit = if opts.engine == Engine::Interleaved {
        "steps"
    } else {
        "rounds"
    };
    writeln!(out, "{unit} {}", trace.len())?;
    if let Some(q) = &quiescence {
        writeln!(
            out,
            "staleness T={} max-lag {} stabilized-at-round {} tau {}",
            opts.staleness, q.max_lag, q.stabilization_round, q.tau
        )?;
    }
    let decoded = family.decode(trace.terminal());
    match &decoded {
        Ok(a) => writeln!(out, "answer {a}")?,
        Err(e) => writeln!(out, "answer error: {e}")?,
    }
    let oracle = inst.oracle();
    let agrees = match &oracle {
        Ok(o) => {
            let agrees = o.agrees(&decoded);
            if agrees {
                writeln!(out, "oracle MATCH")?;
            } else {
                writeln!(out, "oracle MISMATCH, reference answer {o}")?;
            }
            agrees
        }
        Err(e) => {
            writeln!(out, "oracle unavailable: {e}")?;
            true
        }
    };
    invariant_lines(out, &family, &trace)?;
    if trace.status != TerminalStatus::Converged {
        writeln!(out, "stuck state {}", trace.terminal())?;
    }
    if let Some(path) = trace_out {
        let header = TraceHeader {
            family: family.name.clone(),
            fingerprint,
            params: opts.params(),
        };
        std::fs::write(path, write_trace(&header, &trace))?;
        writeln!(out, "trace written to {}", path.display())?;
    }
    Ok(match trace.status {
        TerminalStatus::Converged if agrees => exit::OK,
        TerminalStatus::Converged => exit::CONTRACT,
        _ => exit::LIMIT,
    })
}

pub fn cmd_verify(out: &mut dyn Write, trace_path: &Path, instance: &Path) -> io::Result<u8> {
    let (inst, family) = match load(out, instance)? {
        Ok(x) => x,
        Err(code) => return Ok(code),
    };
    let text = match std::fs::read_to_string(trace_path) {
        Ok(t) => t,
        Err(e) => return usage_error(out, &format!("{}: {e}", trace_path.display())),
    };
    let (header, trace) = match parse_trace(&text) {
        Ok(x) => x,
        Err(e) => return usage_error(out, &format!("{}: {e}", trace_path.display())),
    };
    if header.fingerprint != inst.fingerprint() {
        return usage_error(
            out,
            &format!(
                "fingerprint mismatch: trace {} was recorded for another instance than {}",
                header.fingerprint,
                inst.fingerprint()
            ),
        );
    }
    if let Some((t, e)) = trace
        .states
        .iter()
        .enumerate()
        .find_map(|(t, s)| family.bounds.check(s).err().map(|e| (t, e)))
    {
        return usage_error(out, &format!("committed state {t} does not fit the instance: {e}"));
    }
    writeln!(out, "trace {} rounds, status {}", trace.len(), trace.status.as_str())?;
    let initial_ok = trace.states[0] == family.initial;
    writeln!(
        out,
        "check initial-state {}",
        if initial_ok {
            "PASS".to_string()
        } else {
            format!("FAIL: trace starts at {}", trace.states[0])
        }
    )?;
    let all = invariant_lines(out, &family, &trace)? && initial_ok;
    writeln!(out, "verdict {}", if all { "PASS" } else { "FAIL" })?;
    Ok(if all { exit::OK } else { exit::CONTRACT })
}

pub fn cmd_counterexample(out: &mut dyn Write, name: &str, trace_out: Option<&Path>) -> io::Result<u8> {
    let outcome = match run_counterexample(name) {
        Ok(o) => o,
        Err(e) => {
            let names = fixpoint_core::SCENARIOS.join(", ");
            return usage_error(out, &format!("{e}; known scenarios: {names}"));
        }
    };
    writeln!(out, "scenario {}", outcome.name)?;
    writeln!(out, "setup {}", outcome.setup)?;
    writeln!(out, "expected {}", outcome.expected)?;
    writeln!(out, "observed {}", outcome.observed)?;
    writeln!(out, "verdict {}", outcome.verdict)?;
    let twin = run_repaired_twin(name).expect("every scenario has a twin");
    writeln!(
        out,
        "repaired twin ({}) reached {} (least fixed point {}): {}",
        twin.repair,
        twin.trace.terminal(),
        twin.oracle,
        if twin.converged_to_oracle {
            "CONVERGED"
        } else {
            "DID NOT CONVERGE"
        }
    )?;
    if let Some(path) = trace_out {
        let header = TraceHeader {
            family: outcome.name.to_string(),
            fingerprint: "-".into(),
            params: format!("scenario={}", outcome.name),
        };
        std::fs::write(path, write_trace(&header, &outcome.trace))?;
    }
    Ok(
        if outcome.verdict == Verdict::MatchesPaper && twin.converged_to_oracle {
            exit::OK
        } else {
            exit::DEVIATES
        },
    )
}

pub fn cmd_audit(out: &mut dyn Write, instance: &Path, samples: usize, seed: u64) -> io::Result<u8> {
    let (_, family) = match load(out, instance)? {
        Ok(x) => x,
        Err(code) => return Ok(code),
    };
    let report = audit_family(&family, samples, seed);
    writeln!(
        out,
        "audit {} ({}): {} states, {} pairs",
        family.name,
        if report.exhaustive { "exhaustive" } else { "sampled" },
        report.states_checked,
        report.pairs_checked
    )?;
    for kind in [
        ViolationKind::Inflationary,
        ViolationKind::Monotone,
        ViolationKind::Locality,
        ViolationKind::Bounds,
        ViolationKind::DomainClosure,
    ] {
        write!(out, "violations {kind:?} {}", report.count(kind))?;
        match report.first(kind) {
            Some(v) => writeln!(out, " (first: function {} at {})", v.function, v.state)?,
            None => writeln!(out)?,
        }
    }
    Ok(if report.is_clean() { exit::OK } else { exit::CONTRACT })
}

pub fn cmd_oracle(out: &mut dyn Write, instance: &Path) -> io::Result<u8> {
    let (inst, _) = match load(out, instance)? {
        Ok(x) => x,
        Err(code) => return Ok(code),
    };
    writeln!(out, "fingerprint {}", inst.fingerprint())?;
    match inst.oracle() {
        Ok(a) => {
            writeln!(out, "answer {a}")?;
            Ok(exit::OK)
        }
        Err(e) => engine_error(out, &e),
    }
}
