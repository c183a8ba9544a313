//! One atomic function application per step under a fair scheduler.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::{check_write, is_common_fixed_point, FunctionFamily, Protocol};
use crate::lattice::StateVector;
use crate::trace::{EngineKind, ExecutionTrace, StepRecord, TerminalStatus, WriteEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchedulePolicy {
    RoundRobin,
    /// Uniform choice, except that an index unselected for `window` steps
    /// is forced. `None` uses `4m`.
    SeededRandom {
        seed: u64,
        window: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FairSchedule {
    pub policy: SchedulePolicy,
    /// `None` uses [`default_step_limit`].
    pub step_limit: Option<usize>,
}

impl FairSchedule {
    pub fn round_robin() -> Self {
        FairSchedule {
            policy: SchedulePolicy::RoundRobin,
            step_limit: None,
        }
    }

    pub fn seeded(seed: u64) -> Self {
        FairSchedule {
            policy: SchedulePolicy::SeededRandom { seed, window: None },
            step_limit: None,
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.step_limit = Some(limit);
        self
    }
}

/// `4 * height * m`: the chain changes at most `height` times and the
/// factor covers no-op applications in between.
pub fn default_step_limit(family: &FunctionFamily) -> usize {
    let height = family.bounds.height().max(1);
    let m = family.len().max(1) as u128;
    (4 * height * m + m).min(usize::MAX as u128) as usize
}

struct Picker {
    policy: SchedulePolicy,
    m: usize,
    rng: ChaCha8Rng,
    last: Vec<usize>,
    window: usize,
}

impl Picker {
    fn new(policy: SchedulePolicy, m: usize) -> Self {
        let (seed, window) = match policy {
            SchedulePolicy::RoundRobin => (0, m),
            SchedulePolicy::SeededRandom { seed, window } => (seed, window.unwrap_or(4 * m).max(1)),
        };
        Picker {
            policy,
            m,
            rng: ChaCha8Rng::seed_from_u64(seed),
            last: vec![0; m],
            window,
        }
    }

    fn pick(&mut self, step: usize) -> usize {
        let i = match self.policy {
            SchedulePolicy::RoundRobin => step % self.m,
            SchedulePolicy::SeededRandom { .. } => {
                let overdue = (0..self.m)
                    .filter(|&i| step - self.last[i] >= self.window)
                    .min_by_key(|&i| self.last[i]);
                match overdue {
                    Some(i) => i,
                    None => self.rng.gen_range(0..self.m),
                }
            }
        };
        self.last[i] = step + 1;
        i
    }
}

/// Applies `f_i` atomically, recording each write.
fn step_once(family: &FunctionFamily, i: usize, g: &StateVector, index: usize) -> Result<(StepRecord, StateVector)> {
    let f = &family.functions[i];
    let writes = f.evaluate(g);
    let mut next = g.clone();
    let mut events = Vec::with_capacity(writes.len());
    let mut failed = false;
    for w in writes {
        check_write(&family.bounds, f, &w)?;
        let applies = !failed
            && match w.protocol {
                Protocol::Plain => true,
                Protocol::Cas { field, expected } => next.get(w.coord).get(field) == Some(&expected),
            };
        if applies {
            next.set(w.coord, w.value.clone());
        } else {
            failed = true;
        }
        events.push(WriteEvent {
            function: i,
            coord: w.coord,
            read_value: Some(g.get(w.coord).into()),
            value: w.value,
            protocol: w.protocol,
            applied: applies,
        });
    }
    let record = StepRecord {
        index,
        active: vec![i],
        writes: events,
        ..StepRecord::default()
    };
    Ok((record, next))
}

/// Runs `G_{t+1} = f_{i_t}(G_t)` under `schedule` from the family's initial
/// state. Terminates once every index has been applied since the last state
/// change, which makes the terminal state a common fixed point.
pub fn run_interleaved(family: &FunctionFamily, schedule: &FairSchedule) -> Result<ExecutionTrace> {
    let mut trace = ExecutionTrace::start(EngineKind::Interleaved, family.initial.clone());
    let m = family.len();
    if m == 0 {
        trace.status = TerminalStatus::Converged;
        return Ok(trace);
    }
    let limit = schedule.step_limit.unwrap_or_else(|| default_step_limit(family));
    let mut picker = Picker::new(schedule.policy, m);
    let mut idle = vec![false; m];
    let mut idle_count = 0;
    let mut g = family.initial.clone();

    for step in 0..limit {
        let i = picker.pick(step);
        let (record, next) = step_once(family, i, &g, step)?;
        if next == g {
            if !idle[i] {
                idle[i] = true;
                idle_count += 1;
            }
        } else {
            idle.iter_mut().for_each(|x| *x = false);
            idle_count = 0;
        }
        trace.push(record, next.clone());
        g = next;
        if idle_count == m {
            debug_assert!(is_common_fixed_point(&g, family));
            trace.status = TerminalStatus::Converged;
            return Ok(trace);
        }
    }
    trace.status = TerminalStatus::StepLimit;
    Ok(trace)
}

/// Applies only `f_{fixed_index}`, for at most `steps` steps.
pub fn run_with_unfair_schedule(family: &FunctionFamily, fixed_index: usize, steps: usize) -> Result<ExecutionTrace> {
    if fixed_index >= family.len() {
        return Err(Error::InvalidInstance(format!(
            "function index {fixed_index} out of range for {} functions",
            family.len()
        )));
    }
    let mut trace = ExecutionTrace::start(EngineKind::Interleaved, family.initial.clone());
    let mut g = family.initial.clone();
    for step in 0..steps {
        let (record, next) = step_once(family, fixed_index, &g, step)?;
        let stable = next == g;
        trace.push(record, next.clone());
        g = next;
        if stable {
            trace.status = if is_common_fixed_point(&g, family) {
                TerminalStatus::Converged
            } else {
                TerminalStatus::StuckNonFixpoint
            };
            return Ok(trace);
        }
    }
    trace.status = TerminalStatus::StepLimit;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ReadSet, UpdateFunction, Write};
    use crate::lattice::{Bounds, FieldSpec};

    fn two_bits() -> FunctionFamily {
        let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("bit", 1)]).unwrap();
        let fs = (0..2)
            .map(|i| UpdateFunction::local(i, i, ReadSet::Coords(vec![i]), move |_| vec![Write::scalar(i, 1)]))
            .collect();
        FunctionFamily::new("two-bits", bounds, fs, StateVector::from_scalars(&[0, 0])).unwrap()
    }

    #[test]
    fn round_robin_reaches_top_of_two_bits() {
        let t = run_interleaved(&two_bits(), &FairSchedule::round_robin()).unwrap();
        assert_eq!(t.status, TerminalStatus::Converged);
        assert_eq!(t.terminal(), &StateVector::from_scalars(&[1, 1]));
        assert_eq!(t.states.len(), t.steps.len() + 1);
    }

    #[test]
    fn zero_functions_converge_immediately() {
        let bounds = Bounds::uniform(1, vec![FieldSpec::ascending("x", 2)]).unwrap();
        let fam = FunctionFamily::new("none", bounds, vec![], StateVector::from_scalars(&[1])).unwrap();
        let t = run_interleaved(&fam, &FairSchedule::round_robin()).unwrap();
        assert_eq!(t.status, TerminalStatus::Converged);
        assert_eq!(t.terminal(), &fam.initial);
        assert!(t.is_empty());
    }

    #[test]
    fn unfair_schedule_gets_stuck() {
        let fam = two_bits();
        let t = run_with_unfair_schedule(&fam, 0, 100).unwrap();
        assert_eq!(t.status, TerminalStatus::StuckNonFixpoint);
        assert_eq!(t.terminal(), &StateVector::from_scalars(&[1, 0]));
        let t = run_with_unfair_schedule(&fam, 1, 100).unwrap();
        assert_eq!(t.terminal(), &StateVector::from_scalars(&[0, 1]));
        assert!(run_with_unfair_schedule(&fam, 2, 1).is_err());
    }

    #[test]
    fn single_function_is_vacuously_fair() {
        let bounds = Bounds::uniform(1, vec![FieldSpec::ascending("x", 5)]).unwrap();
        let f = UpdateFunction::local(0, 0, ReadSet::All, |v| {
            let x = v.scalar(0);
            if x < 3 {
                vec![Write::scalar(0, x + 1)]
            } else {
                vec![]
            }
        });
        let fam = FunctionFamily::new("to3", bounds, vec![f], StateVector::from_scalars(&[0])).unwrap();
        let t = run_with_unfair_schedule(&fam, 0, 100).unwrap();
        assert_eq!(t.status, TerminalStatus::Converged);
        assert_eq!(t.terminal().scalar(0), 3);
    }

    #[test]
    fn seeded_window_forces_every_index() {
        let mut p = Picker::new(
            SchedulePolicy::SeededRandom {
                seed: 3,
                window: Some(5),
            },
            4,
        );
        let picks: Vec<usize> = (0..200).map(|s| p.pick(s)).collect();
        for i in 0..4 {
            let positions: Vec<usize> = picks
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == i)
                .map(|(s, _)| s)
                .collect();
            assert!(positions[0] < 5 + 4);
            assert!(positions.windows(2).all(|w| w[1] - w[0] <= 5 + 4));
        }
    }
}
