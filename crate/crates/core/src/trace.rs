//! Execution traces and the invariants checked over them.

use crate::family::{FunctionFamily, Protocol};
use crate::lattice::{Bounds, StateVector, Tuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Interleaved,
    Parallel,
    Distributed,
}

impl EngineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::Interleaved => "interleaved",
            EngineKind::Parallel => "parallel",
            EngineKind::Distributed => "distributed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminalStatus {
    Converged,
    StepLimit,
    /// Stable under the schedule but not a common fixed point.
    StuckNonFixpoint,
}

impl TerminalStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalStatus::Converged => "CONVERGED",
            TerminalStatus::StepLimit => "STEP_LIMIT",
            TerminalStatus::StuckNonFixpoint => "STUCK_NON_FIXPOINT",
        }
    }
}

/// A read that observed a value other than the round's starting value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadEvent {
    pub function: usize,
    pub coord: usize,
    pub value: Tuple,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WriteEvent {
    pub function: usize,
    pub coord: usize,
    pub value: Tuple,
    pub protocol: Protocol,
    /// The value the writer read for `coord`, when it read it.
    pub read_value: Option<Tuple>,
    pub applied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub recipient: usize,
    pub coord: usize,
    pub value: Tuple,
}

/// Everything that happened between `G_t` and `G_{t+1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepRecord {
    pub index: usize,
    pub active: Vec<usize>,
    pub reads: Vec<ReadEvent>,
    pub writes: Vec<WriteEvent>,
    pub deliveries: Vec<Delivery>,
    /// Distributed engine: the view each active process computed on.
    pub observed: Vec<(usize, StateVector)>,
}

/// Committed states `G_0..G_T` and the step records between them;
/// `states.len() == steps.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub engine: EngineKind,
    pub states: Vec<StateVector>,
    pub steps: Vec<StepRecord>,
    pub status: TerminalStatus,
}

impl ExecutionTrace {
    pub(crate) fn start(engine: EngineKind, initial: StateVector) -> Self {
        ExecutionTrace {
            engine,
            states: vec![initial],
            steps: Vec::new(),
            status: TerminalStatus::StepLimit,
        }
    }

    pub(crate) fn push(&mut self, step: StepRecord, next: StateVector) {
        self.steps.push(step);
        self.states.push(next);
    }

    pub fn terminal(&self) -> &StateVector {
        self.states.last().expect("trace holds at least the initial state")
    }

    pub fn converged(&self) -> bool {
        self.status == TerminalStatus::Converged
    }

    /// Number of steps (interleaved) or rounds (parallel, distributed).
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// First failing position of an invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFailure {
    pub step: usize,
    pub coord: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoundProgressReport {
    /// Every applied write carries a value at least `G_t[j]`.
    pub writes_at_least_start: Option<InvariantFailure>,
    /// `G_{t+1} >= G_t`.
    pub ascent: Option<InvariantFailure>,
    /// `G_{t+1}[j] = G_t[j]` exactly when no applied write touched `j`.
    pub unchanged_iff_unwritten: Option<InvariantFailure>,
}

impl RoundProgressReport {
    pub fn all_hold(&self) -> bool {
        self.writes_at_least_start.is_none() && self.ascent.is_none() && self.unchanged_iff_unwritten.is_none()
    }
}

/// Checks the three monotone-round-progress properties on every step.
pub fn check_round_progress(bounds: &Bounds, trace: &ExecutionTrace) -> RoundProgressReport {
    let mut report = RoundProgressReport::default();
    for (t, step) in trace.steps.iter().enumerate() {
        let (g, next) = (&trace.states[t], &trace.states[t + 1]);
        let mut written = vec![false; g.len()];
        for w in step.writes.iter().filter(|w| w.applied) {
            written[w.coord] = true;
            if report.writes_at_least_start.is_none() && !bounds.coord_le(w.coord, g.get(w.coord), &w.value) {
                report.writes_at_least_start = Some(InvariantFailure {
                    step: t,
                    coord: Some(w.coord),
                    detail: format!(
                        "function {} wrote {:?} below the round start value",
                        w.function,
                        &w.value[..]
                    ),
                });
            }
        }
        for (j, was_written) in written.iter().enumerate() {
            if report.ascent.is_none() && !bounds.coord_le(j, g.get(j), next.get(j)) {
                report.ascent = Some(InvariantFailure {
                    step: t,
                    coord: Some(j),
                    detail: "committed value decreased".into(),
                });
            }
            let unchanged = g.get(j) == next.get(j);
            if report.unchanged_iff_unwritten.is_none() && unchanged == *was_written {
                let detail = if unchanged {
                    "coordinate written yet unchanged"
                } else {
                    "coordinate changed without an applied write"
                };
                report.unchanged_iff_unwritten = Some(InvariantFailure {
                    step: t,
                    coord: Some(j),
                    detail: detail.into(),
                });
            }
        }
    }
    report
}

/// First step where the committed chain fails to ascend.
pub fn check_ascent(bounds: &Bounds, trace: &ExecutionTrace) -> Option<InvariantFailure> {
    trace.states.windows(2).enumerate().find_map(|(t, w)| {
        (!bounds.le(&w[0], &w[1])).then(|| InvariantFailure {
            step: t,
            coord: (0..w[0].len()).find(|&j| !bounds.coord_le(j, w[0].get(j), w[1].get(j))),
            detail: "committed state not above its predecessor".into(),
        })
    })
}

/// First committed state (or observed view) not below `bound`.
pub fn check_dominated(bounds: &Bounds, trace: &ExecutionTrace, bound: &StateVector) -> Option<InvariantFailure> {
    if let Some(t) = trace.states.iter().position(|s| !bounds.le(s, bound)) {
        return Some(InvariantFailure {
            step: t,
            coord: None,
            detail: format!("committed state {} exceeds {bound}", trace.states[t]),
        });
    }
    for (t, step) in trace.steps.iter().enumerate() {
        for (actor, view) in &step.observed {
            if !bounds.le(view, &trace.states[t]) {
                return Some(InvariantFailure {
                    step: t,
                    coord: None,
                    detail: format!("view of process {actor} is ahead of the committed state"),
                });
            }
        }
    }
    None
}

/// Convenience bundle used by the CLI and the acceptance suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceAudit {
    pub round_progress: RoundProgressReport,
    pub ascent: Option<InvariantFailure>,
    pub dominance: Option<InvariantFailure>,
}

impl TraceAudit {
    pub fn all_hold(&self) -> bool {
        self.round_progress.all_hold() && self.ascent.is_none() && self.dominance.is_none()
    }
}

pub fn audit_trace(family: &FunctionFamily, trace: &ExecutionTrace, lcfp: &StateVector) -> TraceAudit {
    TraceAudit {
        round_progress: check_round_progress(&family.bounds, trace),
        ascent: check_ascent(&family.bounds, trace),
        dominance: check_dominated(&family.bounds, trace, lcfp),
    }
}
