//! Runnable failure constructions. Each scenario drops exactly one
//! assumption of the convergence theorems and checks that the execution
//! fails the way the construction predicts. Its repaired twin restores the
//! assumption on the same instance and must reach the least common fixed
//! point.

use std::fmt;

use crate::engine::distributed::{run_distributed, StalenessParams};
use crate::engine::interleaved::{run_interleaved, run_with_unfair_schedule, FairSchedule};
use crate::engine::parallel::{enumerate_round_outcomes, run_parallel, IntraRoundPolicy, ParallelConfig, WriteMode};
use crate::error::{Error, Result};
use crate::family::{FunctionFamily, Properties, ReadSet, StateView, UpdateFunction, Write};
use crate::lattice::{Bounds, FieldSpec, StateVector};
use crate::oracles::{common_fixed_points, lcfp_exhaustive, lcfp_roundrobin};
use crate::trace::{ExecutionTrace, TerminalStatus};

/// Stable scenario identifiers, in registry order.
pub const SCENARIOS: [&str; 7] = [
    "INFINITE_LATTICE",
    "UNFAIR",
    "NONBOTTOM_START",
    "NONMONOTONE",
    "NONINFLATIONARY",
    "NAIVE_PARALLEL",
    "UNBOUNDED_STALENESS",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    MatchesPaper,
    Deviates,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MatchesPaper => "MATCHES_PAPER",
            Verdict::Deviates => "DEVIATES",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub name: &'static str,
    /// How the scenario is executed.
    pub setup: &'static str,
    /// What the construction predicts.
    pub expected: &'static str,
    /// What was observed.
    pub observed: String,
    pub trace: ExecutionTrace,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct TwinOutcome {
    pub name: &'static str,
    pub repair: &'static str,
    pub trace: ExecutionTrace,
    pub oracle: StateVector,
    pub converged_to_oracle: bool,
}

fn scalar_family(name: &str, max: u64, tables: Vec<(Vec<u64>, Properties)>, initial: u64) -> FunctionFamily {
    let bounds = Bounds::uniform(1, vec![FieldSpec::ascending("x", max)]).expect("valid layout");
    let fs = tables
        .into_iter()
        .enumerate()
        .map(|(id, (table, props))| {
            UpdateFunction::new(id, ReadSet::All, vec![0], props, move |v: &dyn StateView| {
                let x = v.scalar(0);
                let y = table[x as usize];
                if y == x {
                    vec![]
                } else {
                    vec![Write::scalar(0, y)]
                }
            })
        })
        .collect();
    FunctionFamily::new(name, bounds, fs, StateVector::from_scalars(&[initial])).expect("valid family")
}

/// `f_1 = (1, x_2)` and `f_2 = (x_1, 1)` on `{0,1}^2`, from `(0,0)`.
pub fn two_bit_family() -> FunctionFamily {
    let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("bit", 1)]).expect("valid layout");
    let fs = (0..2)
        .map(|i| UpdateFunction::local(i, i, ReadSet::Coords(vec![i]), move |_| vec![Write::scalar(i, 1)]))
        .collect();
    FunctionFamily::new("two-bits", bounds, fs, StateVector::from_scalars(&[0, 0])).expect("valid family")
}

/// `f_1 = (1, x_2, x_3)`, `f_2 = (x_1, x_1 | x_2, x_3)`,
/// `f_3 = (x_1, x_2, x_2 | x_3)` on `{0,1}^3`, from `(0,0,0)`.
pub fn stale_chain_family() -> FunctionFamily {
    let bounds = Bounds::uniform(3, vec![FieldSpec::ascending("bit", 1)]).expect("valid layout");
    let fs = (0..3)
        .map(|i| {
            UpdateFunction::local(i, i, ReadSet::All, move |v| {
                let on = i == 0 || v.scalar(i - 1) == 1 || v.scalar(i) == 1;
                if on && v.scalar(i) == 0 {
                    vec![Write::scalar(i, 1)]
                } else {
                    vec![]
                }
            })
        })
        .collect();
    FunctionFamily::new("stale-chain", bounds, fs, StateVector::from_scalars(&[0, 0, 0])).expect("valid family")
}

const NOT_MONOTONE: Properties = Properties {
    monotone: false,
    inflationary: true,
    i_local: false,
};

const NOT_INFLATIONARY: Properties = Properties {
    monotone: true,
    inflationary: false,
    i_local: false,
};

const PLAIN: Properties = Properties {
    monotone: true,
    inflationary: true,
    i_local: false,
};

/// Cap standing in for an unbounded counter, and the steps we allow it.
const COUNTER_CAP: u64 = 1 << 40;
const COUNTER_STEPS: usize = 10_000;

fn counter_family(cap: u64) -> FunctionFamily {
    let bounds = Bounds::uniform(1, vec![FieldSpec::ascending("x", cap)]).expect("valid layout");
    let f = UpdateFunction::new(0, ReadSet::All, vec![0], PLAIN, move |v: &dyn StateView| {
        let x = v.scalar(0);
        if x < cap {
            vec![Write::scalar(0, x + 1)]
        } else {
            vec![]
        }
    });
    FunctionFamily::new("successor", bounds, vec![f], StateVector::from_scalars(&[0])).expect("valid family")
}

fn nonmonotone_family(repaired: bool) -> FunctionFamily {
    let f1 = if repaired { vec![1, 1, 2] } else { vec![2, 1, 2] };
    let props = if repaired { PLAIN } else { NOT_MONOTONE };
    scalar_family("three-chain", 2, vec![(f1, props), (vec![1, 1, 2], PLAIN)], 0)
}

fn noninflationary_family(repaired: bool) -> FunctionFamily {
    let (f1, props) = if repaired {
        (vec![0, 1], PLAIN)
    } else {
        (vec![0, 0], NOT_INFLATIONARY)
    };
    scalar_family("toggle", 1, vec![(f1, props), (vec![1, 1], PLAIN)], 0)
}

fn nonbottom_family(start: u64) -> FunctionFamily {
    scalar_family("raise-to-one", 2, vec![(vec![1, 1, 2], PLAIN)], start)
}

fn resolve(name: &str) -> Result<&'static str> {
    SCENARIOS
        .iter()
        .find(|s| s.eq_ignore_ascii_case(name))
        .copied()
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::MatchesPaper
    } else {
        Verdict::Deviates
    }
}

/// Runs the named scenario (case-insensitive) and checks its predicted failure.
pub fn run_counterexample(name: &str) -> Result<ScenarioOutcome> {
    let name = resolve(name)?;
    let (setup, expected, trace, ok, observed) = match name {
        "INFINITE_LATTICE" => {
            let fam = counter_family(COUNTER_CAP);
            let t = run_interleaved(&fam, &FairSchedule::round_robin().with_limit(COUNTER_STEPS))?;
            let ascending = t.states.windows(2).all(|w| w[1].scalar(0) == w[0].scalar(0) + 1);
            let ok = t.status == TerminalStatus::StepLimit && ascending;
            let observed = format!("{} after {} steps, every step moved up", t.status.as_str(), t.len());
            (
                "f(x) = x + 1 on a counter capped at 2^40, round-robin, 10000 steps",
                "no fixed point reached; the counter keeps climbing",
                t,
                ok,
                observed,
            )
        }
        "UNFAIR" => {
            let fam = two_bit_family();
            let t = run_with_unfair_schedule(&fam, 0, 100)?;
            let f2 = fam.apply(1, t.terminal())?;
            let ok = t.status == TerminalStatus::StuckNonFixpoint
                && t.terminal() == &StateVector::from_scalars(&[1, 0])
                && f2 != *t.terminal();
            let observed = format!("{} at {}; f_2 gives {f2}", t.status.as_str(), t.terminal());
            (
                "two-bit family, only f_1 is ever scheduled",
                "stable at (1,0), which f_2 does not fix",
                t,
                ok,
                observed,
            )
        }
        "NONBOTTOM_START" => {
            let fam = nonbottom_family(2);
            let t = run_interleaved(&fam, &FairSchedule::round_robin())?;
            let lcfp = lcfp_exhaustive(&fam)?;
            let one = StateVector::from_scalars(&[1]);
            let ok = t.converged() && t.terminal().scalar(0) == 2 && lcfp.as_ref() == Some(&one);
            let observed = format!("terminal {}; least common fixed point {}", t.terminal(), fmt_opt(&lcfp));
            (
                "f(x) = max(x, 1) on {0,1,2}, started at 2",
                "terminal 2, the least fixed point above the start, while the least overall is 1",
                t,
                ok,
                observed,
            )
        }
        "NONMONOTONE" => {
            let fam = nonmonotone_family(false);
            let t = run_interleaved(&fam, &FairSchedule::round_robin())?;
            let lcfp = lcfp_exhaustive(&fam)?;
            let ok = t.converged() && t.terminal().scalar(0) == 2 && lcfp == Some(StateVector::from_scalars(&[1]));
            let observed = format!("terminal {}; least common fixed point {}", t.terminal(), fmt_opt(&lcfp));
            (
                "f_1 = [2,1,2], f_2 = [1,1,2] on {0,1,2}, f_1 first",
                "terminal 2 although the least common fixed point is 1",
                t,
                ok,
                observed,
            )
        }
        "NONINFLATIONARY" => {
            let fam = noninflationary_family(false);
            let t = run_interleaved(&fam, &FairSchedule::round_robin().with_limit(100))?;
            let tail: Vec<u64> = t.states[2..].iter().map(|s| s.scalar(0)).collect();
            let toggles = tail.chunks(2).all(|c| c[0] == 1 && c.get(1).is_none_or(|&x| x == 0));
            let ok = t.status == TerminalStatus::StepLimit && toggles && common_fixed_points(&fam)?.is_empty();
            let observed = format!(
                "{} after {} steps, toggling between 0 and 1",
                t.status.as_str(),
                t.len()
            );
            (
                "f_1(x) = 0, f_2(x) = 1 on {0,1}, alternating",
                "endless toggle and no common fixed point",
                t,
                ok,
                observed,
            )
        }
        "NAIVE_PARALLEL" => {
            let fam = two_bit_family();
            let cfg = ParallelConfig::synchronous()
                .with_intra(IntraRoundPolicy::LostUpdate)
                .with_mode(WriteMode::Naive)
                .with_limit(50);
            let t = run_parallel(&fam, &cfg)?;
            let bottom = StateVector::from_scalars(&[0, 0]);
            let reachable = enumerate_round_outcomes(&bottom, &[0, 1], &fam, WriteMode::Naive)?;
            let ok = t.status == TerminalStatus::StepLimit
                && t.states.iter().all(|s| s == &bottom)
                && reachable.contains(&bottom);
            let observed = format!("{} after {} rounds at {}", t.status.as_str(), t.len(), t.terminal());
            (
                "two-bit family, both functions every round, naive writes, stale writes last",
                "stuck at (0,0)",
                t,
                ok,
                observed,
            )
        }
        "UNBOUNDED_STALENESS" => {
            let fam = stale_chain_family();
            let (t, _) = run_distributed(&fam, &StalenessParams::withhold(0, vec![1, 2]), Some(60))?;
            let stuck = StateVector::from_scalars(&[1, 0, 0]);
            let f2 = fam.apply(1, &stuck)?;
            let ok = t.status == TerminalStatus::StepLimit
                && t.terminal() == &stuck
                && f2 == StateVector::from_scalars(&[1, 1, 0]);
            let observed = format!("{} at {}; f_2 gives {f2}", t.status.as_str(), t.terminal());
            (
                "three-process chain, updates of coordinate 1 withheld from processes 2 and 3",
                "stuck at (1,0,0), which f_2 does not fix",
                t,
                ok,
                observed,
            )
        }
        _ => unreachable!("resolve returns registry names"),
    };
    Ok(ScenarioOutcome {
        name,
        setup,
        expected,
        observed,
        trace,
        verdict: verdict(ok),
    })
}

fn fmt_opt(s: &Option<StateVector>) -> String {
    s.as_ref().map_or_else(|| "none".into(), |s| s.to_string())
}

/// Runs the named scenario with the broken assumption restored.
pub fn run_repaired_twin(name: &str) -> Result<TwinOutcome> {
    let name = resolve(name)?;
    let (repair, fam, trace) = match name {
        "INFINITE_LATTICE" => {
            let fam = counter_family(5);
            let t = run_interleaved(&fam, &FairSchedule::round_robin())?;
            ("counter capped at 5", fam, t)
        }
        "UNFAIR" => {
            let fam = two_bit_family();
            let t = run_interleaved(&fam, &FairSchedule::round_robin())?;
            ("round-robin schedule", fam, t)
        }
        "NONBOTTOM_START" => {
            let fam = nonbottom_family(0);
            let t = run_interleaved(&fam, &FairSchedule::round_robin())?;
            ("start at the bottom element", fam, t)
        }
        "NONMONOTONE" => {
            let fam = nonmonotone_family(true);
            let t = run_interleaved(&fam, &FairSchedule::round_robin())?;
            ("monotone f_1 = [1,1,2]", fam, t)
        }
        "NONINFLATIONARY" => {
            let fam = noninflationary_family(true);
            let t = run_interleaved(&fam, &FairSchedule::round_robin())?;
            ("inflationary f_1(x) = x", fam, t)
        }
        "NAIVE_PARALLEL" => {
            let fam = two_bit_family();
            let cfg = ParallelConfig::synchronous()
                .with_intra(IntraRoundPolicy::LostUpdate)
                .with_limit(50);
            let t = run_parallel(&fam, &cfg)?;
            ("update-only-on-change writes", fam, t)
        }
        "UNBOUNDED_STALENESS" => {
            let fam = stale_chain_family();
            let (t, _) = run_distributed(&fam, &StalenessParams::uniform(2, 0), None)?;
            ("staleness bounded by T = 2", fam, t)
        }
        _ => unreachable!("resolve returns registry names"),
    };
    let oracle = match lcfp_exhaustive(&fam)? {
        Some(y) => y,
        None => lcfp_roundrobin(&fam)?,
    };
    let converged_to_oracle = trace.converged() && trace.terminal() == &oracle;
    Ok(TwinOutcome {
        name,
        repair,
        trace,
        oracle,
        converged_to_oracle,
    })
}
