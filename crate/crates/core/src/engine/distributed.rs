//! Processes owning one coordinate each, computing on stale views.
//!
//! Process `i` holds a view of the whole state in which its own coordinate is
//! always current. Round `r` first delivers the messages due at `r`, then the
//! scheduled process evaluates `f_i` on its view and commits the result for
//! coordinate `i`. A changed value committed in round `r` is sent in round
//! `r + 1` and reaches each recipient after that recipient's delay, so with
//! delays in `[0, T]` every view is at most `T` rounds behind.
//!
//! Scheduling is block round-robin (`S_r = {r mod n}`), which makes every
//! window of `n` rounds contain every process. Termination is an omniscient
//! check: no message in flight, every view equal to the committed state, and
//! the committed state a common fixed point.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::{apply_atomically, is_common_fixed_point, FunctionFamily, Protocol};
use crate::lattice::{Bounds, StateVector, Tuple};
use crate::trace::{Delivery, EngineKind, ExecutionTrace, StepRecord, TerminalStatus, WriteEvent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelayPolicy {
    /// Independent delay per (message, recipient), uniform in `[0, T]`.
    Uniform { seed: u64 },
    /// Every message takes exactly `T` rounds.
    MaxDelay,
    /// Updates of `target` never reach `victims`; everything else is
    /// delivered immediately. Breaks bounded staleness on purpose.
    AdversarialWithhold { target: usize, victims: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StalenessParams {
    pub t: usize,
    pub delay: DelayPolicy,
}

impl StalenessParams {
    pub fn uniform(t: usize, seed: u64) -> Self {
        StalenessParams {
            t,
            delay: DelayPolicy::Uniform { seed },
        }
    }

    pub fn max_delay(t: usize) -> Self {
        StalenessParams {
            t,
            delay: DelayPolicy::MaxDelay,
        }
    }

    pub fn withhold(target: usize, victims: Vec<usize>) -> Self {
        StalenessParams {
            t: 0,
            delay: DelayPolicy::AdversarialWithhold { target, victims },
        }
    }

    /// Whether the policy promises views at most `t` rounds old.
    pub fn is_bounded(&self) -> bool {
        !matches!(self.delay, DelayPolicy::AdversarialWithhold { .. })
    }
}

/// An update of `coord` travelling to one recipient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub coord: usize,
    pub value: Tuple,
    pub send_round: usize,
    pub deliver_round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessState {
    pub id: usize,
    pub view: StateVector,
    pub inbox: Vec<Message>,
}

/// Moves every message due by `round` into its recipient's view, merging by
/// progress-order maximum so a view coordinate never moves backwards.
pub fn deliver_messages(processes: &mut [ProcessState], round: usize, bounds: &Bounds) -> Vec<Delivery> {
    let mut delivered = Vec::new();
    for p in processes.iter_mut() {
        let (due, later): (Vec<Message>, Vec<Message>) = p.inbox.drain(..).partition(|m| m.deliver_round <= round);
        p.inbox = later;
        for m in due {
            let merged = bounds.join_coord(m.coord, p.view.get(m.coord), &m.value);
            p.view.set(m.coord, merged);
            delivered.push(Delivery {
                recipient: p.id,
                coord: m.coord,
                value: m.value,
            });
        }
    }
    delivered
}

struct Courier {
    params: StalenessParams,
    rng: ChaCha8Rng,
}

impl Courier {
    fn new(params: &StalenessParams) -> Self {
        let seed = match params.delay {
            DelayPolicy::Uniform { seed } => seed,
            _ => 0,
        };
        Courier {
            params: params.clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Delay for one recipient, or `None` when the message is withheld.
    fn delay(&mut self, coord: usize, recipient: usize) -> Option<usize> {
        match &self.params.delay {
            DelayPolicy::Uniform { .. } => Some(self.rng.gen_range(0..=self.params.t)),
            DelayPolicy::MaxDelay => Some(self.params.t),
            DelayPolicy::AdversarialWithhold { target, victims } => {
                (coord != *target || !victims.contains(&recipient)).then_some(0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiescenceReport {
    pub terminal: StateVector,
    /// First round index from which the committed state never changed.
    pub stabilization_round: usize,
    /// `lag_histogram[i][lag]`: how often a remote coordinate in process
    /// `i`'s view was `lag` rounds behind, sampled after every delivery phase.
    pub lag_histogram: Vec<BTreeMap<usize, u64>>,
    pub max_lag: usize,
    /// Strong-fairness window of the block round-robin schedule.
    pub tau: usize,
}

/// When each value of each coordinate was first and last committed.
struct History {
    /// Per coordinate: `(first round holding the value, value)`.
    changes: Vec<Vec<(usize, Tuple)>>,
}

impl History {
    fn new(initial: &StateVector) -> Self {
        History {
            changes: initial.iter().map(|t| vec![(0, t.clone())]).collect(),
        }
    }

    fn record(&mut self, coord: usize, from_round: usize, value: Tuple) {
        self.changes[coord].push((from_round, value));
    }

    /// Rounds between `now` and the last committed state that held `value`.
    fn lag(&self, coord: usize, value: &[u64], now: usize) -> usize {
        let changes = &self.changes[coord];
        let Some(k) = changes.iter().rposition(|(_, v)| v[..] == *value) else {
            return now;
        };
        match changes.get(k + 1) {
            Some(&(next_start, _)) => now.saturating_sub(next_start - 1),
            None => 0,
        }
    }
}

pub fn default_round_limit(family: &FunctionFamily, params: &StalenessParams) -> usize {
    let n = family.bounds.len() as u128;
    let per_change = n + params.t as u128 + 2;
    let limit = (family.bounds.height() + 1) * per_change * 2 + 2 * n;
    limit.min(usize::MAX as u128) as usize
}

fn quiescent(g: &StateVector, processes: &[ProcessState], family: &FunctionFamily) -> bool {
    processes.iter().all(|p| p.inbox.is_empty() && &p.view == g) && is_common_fixed_point(g, family)
}

/// Runs the family under `params` until quiescence or `round_limit`
/// (`None` uses [`default_round_limit`]).
pub fn run_distributed(
    family: &FunctionFamily,
    params: &StalenessParams,
    round_limit: Option<usize>,
) -> Result<(ExecutionTrace, QuiescenceReport)> {
    if !family.is_local_family() {
        let function = family
            .functions
            .iter()
            .position(|f| f.home() != Some(f.id))
            .unwrap_or(family.len());
        return Err(Error::LocalityViolation {
            function,
            reason: "the distributed engine needs exactly one i-local function per coordinate".into(),
        });
    }
    let n = family.bounds.len();
    let limit = round_limit.unwrap_or_else(|| default_round_limit(family, params));
    let mut trace = ExecutionTrace::start(EngineKind::Distributed, family.initial.clone());
    let mut g = family.initial.clone();
    let mut processes: Vec<ProcessState> = (0..n)
        .map(|id| ProcessState {
            id,
            view: g.clone(),
            inbox: Vec::new(),
        })
        .collect();
    let mut courier = Courier::new(params);
    let mut history = History::new(&g);
    let mut lag_histogram = vec![BTreeMap::new(); n];
    let mut max_lag = 0;
    let mut stabilization_round = 0;

    if quiescent(&g, &processes, family) {
        trace.status = TerminalStatus::Converged;
    }
    let mut round = 0;
    while !trace.converged() && round < limit {
        let deliveries = deliver_messages(&mut processes, round, &family.bounds);
        for p in &processes {
            for j in (0..n).filter(|&j| j != p.id) {
                let lag = history.lag(j, p.view.get(j), round);
                max_lag = max_lag.max(lag);
                *lag_histogram[p.id].entry(lag).or_insert(0) += 1;
            }
        }

        let i = round % n;
        let f = &family.functions[i];
        let view = processes[i].view.clone();
        let intended = f.evaluate(&view);
        let mut computed = view.clone();
        apply_atomically(&family.bounds, f, &intended, &mut computed)?;
        let value: Tuple = computed.get(i).into();
        let mut writes = Vec::new();
        if value[..] != *g.get(i) {
            writes.push(WriteEvent {
                function: i,
                coord: i,
                value: value.clone(),
                protocol: Protocol::Plain,
                read_value: Some(view.get(i).into()),
                applied: true,
            });
            g.set(i, value.clone());
            processes[i].view.set(i, value.clone());
            history.record(i, round + 1, value.clone());
            stabilization_round = round + 1;
            for recipient in (0..n).filter(|&r| r != i) {
                if let Some(d) = courier.delay(i, recipient) {
                    processes[recipient].inbox.push(Message {
                        coord: i,
                        value: value.clone(),
                        send_round: round + 1,
                        deliver_round: round + 1 + d,
                    });
                }
            }
        }
        trace.push(
            StepRecord {
                index: round,
                active: vec![i],
                writes,
                deliveries,
                observed: vec![(i, view)],
                ..StepRecord::default()
            },
            g.clone(),
        );
        round += 1;
        if quiescent(&g, &processes, family) {
            trace.status = TerminalStatus::Converged;
        }
    }
    let report = QuiescenceReport {
        terminal: g,
        stabilization_round,
        lag_histogram,
        max_lag,
        tau: n,
    };
    Ok((trace, report))
}
