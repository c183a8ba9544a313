//! Rounds of concurrently applied functions with overwrite semantics.
//!
//! A round starts from the committed state `G_t` and is simulated as an
//! interleaving of two kinds of events: *evaluate f* (f computes its writes
//! from what it reads) and *apply the next write of f*. Each read of
//! coordinate `j` returns the value after some prefix of the round's applied
//! writes to `j`, chosen independently per (function, coordinate); it never
//! returns anything older than `G_t[j]`. Writes of one function keep their
//! program order, writes of different functions interleave arbitrarily, and
//! the last write to a coordinate wins. A failed compare-and-set drops the
//! remaining writes of that evaluation; the function simply runs again in a
//! later round.
//!
//! [`WriteMode::UpdateOnChange`] issues a write only when the computed value
//! differs from the value the function read for that coordinate.
//! [`WriteMode::Naive`] writes every coordinate of the computed vector, which
//! lets stale values overwrite progress.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::{check_write, is_common_fixed_point, FunctionFamily, Protocol, StateView, Write};
use crate::lattice::{StateVector, Tuple};
use crate::trace::{EngineKind, ExecutionTrace, ReadEvent, StepRecord, TerminalStatus, WriteEvent};

pub mod threaded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WriteMode {
    UpdateOnChange,
    Naive,
}

/// Which functions take part in each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundPlan {
    All,
    /// Each index joins with probability 1/2 and is forced in when it has
    /// been absent for `window - 1` consecutive rounds.
    SeededSubset {
        seed: u64,
        window: usize,
    },
}

/// How reads and writes inside one round are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntraRoundSchedule {
    /// Every read sees `G_t`; writes apply in function order.
    Synchronous,
    /// Uniformly random interleaving and read placement.
    Seeded(u64),
    /// Reads see `G_t`; for every coordinate, writes that would leave it at
    /// its round-start value are applied after the writes that change it.
    LostUpdate,
}

/// Per-run intra-round policy; `Seeded` draws a fresh seed every round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntraRoundPolicy {
    Synchronous,
    Seeded,
    LostUpdate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelConfig {
    pub plan: RoundPlan,
    pub intra: IntraRoundPolicy,
    pub seed: u64,
    pub mode: WriteMode,
    /// `None` uses [`default_round_limit`].
    pub round_limit: Option<usize>,
}

impl ParallelConfig {
    pub fn seeded(seed: u64) -> Self {
        ParallelConfig {
            plan: RoundPlan::All,
            intra: IntraRoundPolicy::Seeded,
            seed,
            mode: WriteMode::UpdateOnChange,
            round_limit: None,
        }
    }

    pub fn synchronous() -> Self {
        ParallelConfig {
            intra: IntraRoundPolicy::Synchronous,
            ..ParallelConfig::seeded(0)
        }
    }

    pub fn with_mode(mut self, mode: WriteMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_plan(mut self, plan: RoundPlan) -> Self {
        self.plan = plan;
        self
    }

    pub fn with_intra(mut self, intra: IntraRoundPolicy) -> Self {
        self.intra = intra;
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.round_limit = Some(limit);
        self
    }
}

pub fn default_round_limit(family: &FunctionFamily, plan: &RoundPlan) -> usize {
    let window = match plan {
        RoundPlan::All => 1,
        RoundPlan::SeededSubset { window, .. } => (*window).max(1) as u128,
    };
    let height = family.bounds.height() + 1;
    (4 * height * window).min(usize::MAX as u128) as usize
}

/// Result of one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOutcome {
    pub next: StateVector,
    /// In application order.
    pub writes: Vec<WriteEvent>,
    pub reads: Vec<ReadEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Action {
    Evaluate(usize),
    Write(usize),
}

/// Source of every nondeterministic choice in a round.
trait Chooser {
    fn action(&mut self, actions: &[Action], round: &Round<'_>) -> usize;
    fn read(&mut self, options: usize) -> usize;
}

struct Pending {
    coord: usize,
    value: Tuple,
    protocol: Protocol,
    read_value: Option<Tuple>,
}

struct Round<'a> {
    family: &'a FunctionFamily,
    start: &'a StateVector,
    mode: WriteMode,
    memory: StateVector,
    /// Values applied to each coordinate so far, in order.
    versions: HashMap<usize, Vec<Tuple>>,
    to_evaluate: Vec<usize>,
    queues: BTreeMap<usize, VecDeque<Pending>>,
    failed: BTreeSet<usize>,
    writes: Vec<WriteEvent>,
    reads: Vec<ReadEvent>,
}

struct RoundView<'r, 'a, C: Chooser + ?Sized> {
    round: &'r Round<'a>,
    chooser: &'r RefCell<&'r mut C>,
    memo: RefCell<BTreeMap<usize, (Tuple, usize)>>,
}

impl<C: Chooser + ?Sized> StateView for RoundView<'_, '_, C> {
    fn len(&self) -> usize {
        self.round.start.len()
    }

    fn read(&self, coord: usize) -> Tuple {
        if let Some((v, _)) = self.memo.borrow().get(&coord) {
            return v.clone();
        }
        let versions = self.round.versions.get(&coord).map_or(&[][..], |v| &v[..]);
        let k = if versions.is_empty() {
            0
        } else {
            self.chooser.borrow_mut().read(versions.len() + 1)
        };
        let value: Tuple = if k == 0 {
            self.round.start.get(coord).into()
        } else {
            versions[k - 1].clone()
        };
        self.memo.borrow_mut().insert(coord, (value.clone(), k));
        value
    }
}

impl<'a> Round<'a> {
    fn new(family: &'a FunctionFamily, start: &'a StateVector, active: &[usize], mode: WriteMode) -> Self {
        Round {
            family,
            start,
            mode,
            memory: start.clone(),
            versions: HashMap::new(),
            to_evaluate: active.to_vec(),
            queues: BTreeMap::new(),
            failed: BTreeSet::new(),
            writes: Vec::new(),
            reads: Vec::new(),
        }
    }

    fn actions(&self) -> Vec<Action> {
        self.to_evaluate
            .iter()
            .map(|&f| Action::Evaluate(f))
            .chain(self.queues.keys().map(|&f| Action::Write(f)))
            .collect()
    }

    fn evaluate<C: Chooser + ?Sized>(&mut self, fid: usize, chooser: &mut C) -> Result<()> {
        self.to_evaluate.retain(|&f| f != fid);
        let f = &self.family.functions[fid];
        let chooser = RefCell::new(chooser);
        let (pending, memo) = {
            let view = RoundView {
                round: self,
                chooser: &chooser,
                memo: RefCell::new(BTreeMap::new()),
            };
            let intended = f.evaluate(&view);
            for w in &intended {
                check_write(&self.family.bounds, f, w)?;
            }
            let pending = match self.mode {
                WriteMode::UpdateOnChange => intended
                    .into_iter()
                    .filter_map(|w| {
                        let seen = view.read(w.coord);
                        (seen != w.value).then_some(Pending {
                            coord: w.coord,
                            value: w.value,
                            protocol: w.protocol,
                            read_value: Some(seen),
                        })
                    })
                    .collect::<Vec<_>>(),
                WriteMode::Naive => naive_writes(&view, intended),
            };
            (pending, view.memo.into_inner())
        };
        for (coord, (value, k)) in memo {
            if k > 0 {
                self.reads.push(ReadEvent {
                    function: fid,
                    coord,
                    value,
                });
            }
        }
        if !pending.is_empty() {
            self.queues.insert(fid, pending.into());
        }
        Ok(())
    }

    fn apply_next(&mut self, fid: usize) {
        let queue = self.queues.get_mut(&fid).expect("write action for a queued function");
        let p = queue.pop_front().expect("queues are never empty");
        if queue.is_empty() {
            self.queues.remove(&fid);
        }
        let applied = !self.failed.contains(&fid)
            && match p.protocol {
                Protocol::Plain => true,
                Protocol::Cas { field, expected } => self.memory.get(p.coord).get(field) == Some(&expected),
            };
        if applied {
            self.memory.set(p.coord, p.value.clone());
            self.versions.entry(p.coord).or_default().push(p.value.clone());
        } else {
            self.failed.insert(fid);
        }
        self.writes.push(WriteEvent {
            function: fid,
            coord: p.coord,
            value: p.value,
            protocol: p.protocol,
            read_value: p.read_value,
            applied,
        });
    }

    fn run<C: Chooser + ?Sized>(mut self, chooser: &mut C) -> Result<RoundOutcome> {
        loop {
            let actions = self.actions();
            if actions.is_empty() {
                break;
            }
            let k = if actions.len() == 1 {
                0
            } else {
                chooser.action(&actions, &self)
            };
            match actions[k] {
                Action::Evaluate(f) => self.evaluate(f, chooser)?,
                Action::Write(f) => self.apply_next(f),
            }
        }
        Ok(RoundOutcome {
            next: self.memory,
            writes: self.writes,
            reads: self.reads,
        })
    }

    fn head(&self, fid: usize) -> &Pending {
        &self.queues[&fid][0]
    }
}

/// Every coordinate of the computed vector, intended writes keeping their
/// protocol.
fn naive_writes(view: &dyn StateView, intended: Vec<Write>) -> Vec<Pending> {
    let mut computed: Vec<Option<Write>> = vec![None; view.len()];
    for w in intended {
        let c = w.coord;
        computed[c] = Some(w);
    }
    computed
        .into_iter()
        .enumerate()
        .map(|(coord, w)| {
            let seen = view.read(coord);
            match w {
                Some(w) => Pending {
                    coord,
                    value: w.value,
                    protocol: w.protocol,
                    read_value: Some(seen),
                },
                None => Pending {
                    coord,
                    value: seen.clone(),
                    protocol: Protocol::Plain,
                    read_value: Some(seen),
                },
            }
        })
        .collect()
}

struct FirstChooser;

impl Chooser for FirstChooser {
    fn action(&mut self, _: &[Action], _: &Round<'_>) -> usize {
        0
    }

    fn read(&mut self, _: usize) -> usize {
        0
    }
}

struct RandomChooser(ChaCha8Rng);

impl Chooser for RandomChooser {
    fn action(&mut self, actions: &[Action], _: &Round<'_>) -> usize {
        self.0.gen_range(0..actions.len())
    }

    fn read(&mut self, options: usize) -> usize {
        self.0.gen_range(0..options)
    }
}

struct LostUpdateChooser;

impl Chooser for LostUpdateChooser {
    fn action(&mut self, actions: &[Action], round: &Round<'_>) -> usize {
        if let Some(k) = actions.iter().position(|a| matches!(a, Action::Evaluate(_))) {
            return k;
        }
        let fresh = |fid: usize| {
            let p = round.head(fid);
            p.value[..] != *round.start.get(p.coord)
        };
        let fresh_pending = |coord: usize| {
            round
                .queues
                .values()
                .flatten()
                .any(|p| p.coord == coord && p.value[..] != *round.start.get(coord))
        };
        let writers: Vec<usize> = actions
            .iter()
            .map(|a| match a {
                Action::Write(f) => *f,
                Action::Evaluate(_) => unreachable!(),
            })
            .collect();
        writers
            .iter()
            .position(|&f| fresh(f))
            .or_else(|| writers.iter().position(|&f| !fresh_pending(round.head(f).coord)))
            .unwrap_or(0)
    }

    fn read(&mut self, _: usize) -> usize {
        0
    }
}

/// Executes one round from `start` with the functions in `active`.
pub fn execute_round(
    start: &StateVector,
    active: &[usize],
    family: &FunctionFamily,
    intra: &IntraRoundSchedule,
    mode: WriteMode,
) -> Result<RoundOutcome> {
    family.bounds.check(start)?;
    if let Some(&bad) = active.iter().find(|&&i| i >= family.len()) {
        return Err(Error::InvalidInstance(format!("active index {bad} out of range")));
    }
    let round = Round::new(family, start, active, mode);
    match intra {
        IntraRoundSchedule::Synchronous => round.run(&mut FirstChooser),
        IntraRoundSchedule::Seeded(seed) => round.run(&mut RandomChooser(ChaCha8Rng::seed_from_u64(*seed))),
        IntraRoundSchedule::LostUpdate => round.run(&mut LostUpdateChooser),
    }
}

struct Participation {
    plan: RoundPlan,
    rng: ChaCha8Rng,
    absent: Vec<usize>,
}

impl Participation {
    fn new(plan: RoundPlan, m: usize) -> Self {
        let seed = match plan {
            RoundPlan::All => 0,
            RoundPlan::SeededSubset { seed, .. } => seed,
        };
        Participation {
            plan,
            rng: ChaCha8Rng::seed_from_u64(seed),
            absent: vec![0; m],
        }
    }

    fn select(&mut self) -> Vec<usize> {
        match self.plan {
            RoundPlan::All => (0..self.absent.len()).collect(),
            RoundPlan::SeededSubset { window, .. } => {
                let window = window.max(1);
                let mut out = Vec::new();
                for i in 0..self.absent.len() {
                    let forced = self.absent[i] + 1 >= window;
                    if forced || self.rng.gen_bool(0.5) {
                        out.push(i);
                        self.absent[i] = 0;
                    } else {
                        self.absent[i] += 1;
                    }
                }
                out
            }
        }
    }
}

/// Iterates rounds until the committed state is a common fixed point or the
/// round limit is exhausted.
pub fn run_parallel(family: &FunctionFamily, config: &ParallelConfig) -> Result<ExecutionTrace> {
    let mut trace = ExecutionTrace::start(EngineKind::Parallel, family.initial.clone());
    let mut g = family.initial.clone();
    if is_common_fixed_point(&g, family) {
        trace.status = TerminalStatus::Converged;
        return Ok(trace);
    }
    let limit = config
        .round_limit
        .unwrap_or_else(|| default_round_limit(family, &config.plan));
    let mut plan = Participation::new(config.plan, family.len());
    let mut seeds = ChaCha8Rng::seed_from_u64(config.seed);
    for r in 0..limit {
        let active = plan.select();
        let intra = match config.intra {
            IntraRoundPolicy::Synchronous => IntraRoundSchedule::Synchronous,
            IntraRoundPolicy::Seeded => IntraRoundSchedule::Seeded(seeds.gen()),
            IntraRoundPolicy::LostUpdate => IntraRoundSchedule::LostUpdate,
        };
        let out = execute_round(&g, &active, family, &intra, config.mode)?;
        trace.push(
            StepRecord {
                index: r,
                active,
                reads: out.reads,
                writes: out.writes,
                ..StepRecord::default()
            },
            out.next.clone(),
        );
        g = out.next;
        if is_common_fixed_point(&g, family) {
            trace.status = TerminalStatus::Converged;
            return Ok(trace);
        }
    }
    trace.status = TerminalStatus::StepLimit;
    Ok(trace)
}

/// Upper bound on the schedules [`enumerate_round_outcomes`] explores.
pub const SCHEDULE_GUARD: u64 = 1_000_000;

/// Depth-first replay of every choice sequence.
struct Replay {
    prefix: Vec<usize>,
    trail: Vec<(usize, usize)>,
}

impl Replay {
    fn choose(&mut self, arity: usize) -> usize {
        if arity <= 1 {
            return 0;
        }
        let pos = self.trail.len();
        let c = self.prefix.get(pos).copied().unwrap_or(0);
        self.trail.push((c, arity));
        c
    }

    /// Prefix of the next unexplored branch, if any.
    fn advance(&self) -> Option<Vec<usize>> {
        let p = self.trail.iter().rposition(|&(c, a)| c + 1 < a)?;
        let mut next: Vec<usize> = self.trail[..p].iter().map(|&(c, _)| c).collect();
        next.push(self.trail[p].0 + 1);
        Some(next)
    }
}

impl Chooser for Replay {
    fn action(&mut self, actions: &[Action], _: &Round<'_>) -> usize {
        self.choose(actions.len())
    }

    fn read(&mut self, options: usize) -> usize {
        self.choose(options)
    }
}

/// `(k * m)! / (k!)^m`, saturating at `u64::MAX`.
fn interleavings(k: u64, m: u64) -> u64 {
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for _ in 0..m {
        for j in 1..=k as u128 {
            placed += 1;
            // multiply by C(placed, j) incrementally: total * placed / j
            total = match total.checked_mul(placed) {
                Some(t) => t / j,
                None => return u64::MAX,
            };
            if total > u64::MAX as u128 {
                return u64::MAX;
            }
        }
    }
    total as u64
}

/// The exact set of states reachable in one round over every intra-round
/// schedule. Refuses with [`Error::ExplosionGuard`] past [`SCHEDULE_GUARD`]
/// schedules.
pub fn enumerate_round_outcomes(
    start: &StateVector,
    active: &[usize],
    family: &FunctionFamily,
    mode: WriteMode,
) -> Result<BTreeSet<StateVector>> {
    family.bounds.check(start)?;
    if mode == WriteMode::Naive {
        // every naive evaluation writes all coordinates, so the write
        // interleavings alone already bound the schedule count from below
        let estimate = interleavings(start.len() as u64, active.len() as u64);
        if estimate > SCHEDULE_GUARD {
            return Err(Error::ExplosionGuard {
                explored: estimate,
                limit: SCHEDULE_GUARD,
            });
        }
    }
    let mut outcomes = BTreeSet::new();
    let mut prefix = Vec::new();
    let mut explored: u64 = 0;
    loop {
        explored += 1;
        if explored > SCHEDULE_GUARD {
            return Err(Error::ExplosionGuard {
                explored,
                limit: SCHEDULE_GUARD,
            });
        }
        let mut replay = Replay {
            prefix,
            trail: Vec::new(),
        };
        let out = Round::new(family, start, active, mode).run(&mut replay)?;
        outcomes.insert(out.next);
        match replay.advance() {
            Some(p) => prefix = p,
            None => return Ok(outcomes),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Properties, ReadSet, UpdateFunction};
    use crate::lattice::{Bounds, FieldSpec};

    fn two_bits() -> FunctionFamily {
        let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("bit", 1)]).unwrap();
        let fs = (0..2)
            .map(|i| UpdateFunction::local(i, i, ReadSet::Coords(vec![i]), move |_| vec![Write::scalar(i, 1)]))
            .collect();
        FunctionFamily::new("two-bits", bounds, fs, StateVector::from_scalars(&[0, 0])).unwrap()
    }

    fn s(v: &[u64]) -> StateVector {
        StateVector::from_scalars(v)
    }

    #[test]
    fn naive_lost_update_round_returns_to_bottom() {
        let fam = two_bits();
        let out = execute_round(
            &s(&[0, 0]),
            &[0, 1],
            &fam,
            &IntraRoundSchedule::LostUpdate,
            WriteMode::Naive,
        )
        .unwrap();
        assert_eq!(out.next, s(&[0, 0]));
        assert_eq!(out.writes.len(), 4);
        assert!(out.writes.iter().all(|w| w.applied));
        // the order from the textbook failure: f1.x1, f2.x1, f2.x2, f1.x2
        let order: Vec<(usize, usize)> = out.writes.iter().map(|w| (w.function, w.coord)).collect();
        assert_eq!(order, vec![(0, 0), (1, 0), (1, 1), (0, 1)]);
    }

    #[test]
    fn update_on_change_round_reaches_top() {
        let fam = two_bits();
        let out = execute_round(
            &s(&[0, 0]),
            &[0, 1],
            &fam,
            &IntraRoundSchedule::LostUpdate,
            WriteMode::UpdateOnChange,
        )
        .unwrap();
        assert_eq!(out.next, s(&[1, 1]));
        assert_eq!(out.writes.len(), 2);
    }

    #[test]
    fn cas_conflict_applies_exactly_one() {
        let bounds = Bounds::uniform(1, vec![FieldSpec::ascending("sum", 5)]).unwrap();
        let fs = (0..2)
            .map(|i| {
                UpdateFunction::new(i, ReadSet::All, vec![0], Properties::SHARED, |v: &dyn StateView| {
                    let temp = v.scalar(0);
                    vec![Write::cas(0, smallvec::smallvec![temp + 1], 0, temp)]
                })
            })
            .collect();
        let fam = FunctionFamily::new("cas", bounds, fs, s(&[0])).unwrap();
        let out = execute_round(
            &s(&[0]),
            &[0, 1],
            &fam,
            &IntraRoundSchedule::Synchronous,
            WriteMode::UpdateOnChange,
        )
        .unwrap();
        assert_eq!(out.next, s(&[1]));
        assert_eq!(out.writes.iter().filter(|w| w.applied).count(), 1);
        assert_eq!(out.writes.iter().filter(|w| !w.applied).count(), 1);
    }

    #[test]
    fn enumerate_two_bits() {
        let fam = two_bits();
        let naive = enumerate_round_outcomes(&s(&[0, 0]), &[0, 1], &fam, WriteMode::Naive).unwrap();
        let all: BTreeSet<_> = [s(&[0, 0]), s(&[1, 0]), s(&[0, 1]), s(&[1, 1])].into_iter().collect();
        assert_eq!(naive, all);
        let safe = enumerate_round_outcomes(&s(&[0, 0]), &[0, 1], &fam, WriteMode::UpdateOnChange).unwrap();
        assert_eq!(safe, [s(&[1, 1])].into_iter().collect());
        let single = enumerate_round_outcomes(&s(&[0, 0]), &[1], &fam, WriteMode::Naive).unwrap();
        assert_eq!(single, [s(&[0, 1])].into_iter().collect());
    }

    #[test]
    fn enumeration_guard_refuses_large_spaces() {
        let n = 8;
        let bounds = Bounds::uniform(n, vec![FieldSpec::ascending("bit", 1)]).unwrap();
        let fs = (0..n)
            .map(|i| UpdateFunction::local(i, i, ReadSet::All, move |_| vec![Write::scalar(i, 1)]))
            .collect();
        let fam = FunctionFamily::new("wide", bounds, fs, StateVector::from_scalars(&[0; 8])).unwrap();
        let active: Vec<usize> = (0..n).collect();
        let err = enumerate_round_outcomes(&fam.initial, &active, &fam, WriteMode::Naive).unwrap_err();
        assert!(matches!(err, Error::ExplosionGuard { .. }));
    }

    #[test]
    fn naive_run_stays_stuck_under_lost_updates() {
        let fam = two_bits();
        let cfg = ParallelConfig::synchronous()
            .with_intra(IntraRoundPolicy::LostUpdate)
            .with_mode(WriteMode::Naive)
            .with_limit(20);
        let t = run_parallel(&fam, &cfg).unwrap();
        assert_eq!(t.status, TerminalStatus::StepLimit);
        assert!(t.states.iter().all(|st| st == &s(&[0, 0])));
        assert_eq!(t.len(), 20);
    }

    #[test]
    fn subset_plan_respects_window() {
        let mut p = Participation::new(RoundPlan::SeededSubset { seed: 9, window: 3 }, 5);
        let rounds: Vec<Vec<usize>> = (0..60).map(|_| p.select()).collect();
        for i in 0..5 {
            for w in rounds.windows(3) {
                assert!(w.iter().any(|r| r.contains(&i)));
            }
        }
    }

    #[test]
    fn seeded_rounds_see_in_round_writes() {
        // f0 sets x0; f1 copies x0 into x1. A seeded schedule sometimes lets
        // f1 read f0's write within the same round.
        let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("bit", 1)]).unwrap();
        let f0 = UpdateFunction::local(0, 0, ReadSet::All, |_| vec![Write::scalar(0, 1)]);
        let f1 = UpdateFunction::local(1, 1, ReadSet::All, |v| {
            if v.scalar(0) == 1 {
                vec![Write::scalar(1, 1)]
            } else {
                vec![]
            }
        });
        let fam = FunctionFamily::new("copy", bounds, vec![f0, f1], s(&[0, 0])).unwrap();
        let outcomes: BTreeSet<_> = (0..64)
            .map(|seed| {
                execute_round(
                    &s(&[0, 0]),
                    &[0, 1],
                    &fam,
                    &IntraRoundSchedule::Seeded(seed),
                    WriteMode::UpdateOnChange,
                )
                .unwrap()
                .next
            })
            .collect();
        assert_eq!(outcomes, [s(&[1, 0]), s(&[1, 1])].into_iter().collect());
    }
}
