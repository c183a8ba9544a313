//! Real shared-memory execution of the parallel model.
//!
//! Coordinates live in cells that each support atomic load, store and
//! compare-and-set of one tuple, with no atomicity across cells. Worker
//! threads evaluate their share of the functions every round, and a barrier
//! separates rounds so the main thread can check for a common fixed point.
//! Interleavings are chosen by the OS, so runs are not reproducible; the
//! terminal state of a well-formed family is.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Barrier, Mutex};

use crate::error::Result;
use crate::family::{check_write, is_common_fixed_point, FunctionFamily, Protocol, StateView};
use crate::lattice::{StateVector, Tuple};
use crate::trace::{EngineKind, ExecutionTrace, StepRecord, TerminalStatus};

use super::WriteMode;

struct Cells(Vec<Mutex<Tuple>>);

impl Cells {
    fn load(&self, coord: usize) -> Tuple {
        self.0[coord].lock().expect("cell lock poisoned").clone()
    }

    fn store(&self, coord: usize, value: Tuple) {
        *self.0[coord].lock().expect("cell lock poisoned") = value;
    }

    fn compare_and_set(&self, coord: usize, field: usize, expected: u64, value: Tuple) -> bool {
        let mut cell = self.0[coord].lock().expect("cell lock poisoned");
        if cell.get(field) == Some(&expected) {
            *cell = value;
            true
        } else {
            false
        }
    }

    fn snapshot(&self) -> StateVector {
        StateVector::new((0..self.0.len()).map(|c| self.load(c)).collect())
    }
}

/// Reads each coordinate at most once, at first use.
struct CellView<'a> {
    cells: &'a Cells,
    seen: std::cell::RefCell<Vec<Option<Tuple>>>,
}

impl StateView for CellView<'_> {
    fn len(&self) -> usize {
        self.cells.0.len()
    }

    fn read(&self, coord: usize) -> Tuple {
        let mut seen = self.seen.borrow_mut();
        seen[coord].get_or_insert_with(|| self.cells.load(coord)).clone()
    }
}

fn run_function(family: &FunctionFamily, fid: usize, cells: &Cells, mode: WriteMode) -> Result<()> {
    let f = &family.functions[fid];
    let view = CellView {
        cells,
        seen: std::cell::RefCell::new(vec![None; cells.0.len()]),
    };
    let intended = f.evaluate(&view);
    for w in &intended {
        check_write(&family.bounds, f, w)?;
    }
    let writes: Vec<(usize, Tuple, Protocol)> = match mode {
        WriteMode::UpdateOnChange => intended
            .into_iter()
            .filter(|w| view.read(w.coord) != w.value)
            .map(|w| (w.coord, w.value, w.protocol))
            .collect(),
        WriteMode::Naive => {
            let mut computed: Vec<(Tuple, Protocol)> =
                (0..view.len()).map(|c| (view.read(c), Protocol::Plain)).collect();
            for w in intended {
                computed[w.coord] = (w.value, w.protocol);
            }
            computed.into_iter().enumerate().map(|(c, (v, p))| (c, v, p)).collect()
        }
    };
    for (coord, value, protocol) in writes {
        match protocol {
            Protocol::Plain => cells.store(coord, value),
            Protocol::Cas { field, expected } => {
                if !cells.compare_and_set(coord, field, expected, value) {
                    break;
                }
            }
        }
    }
    Ok(())
}

/// Runs rounds of all functions on `workers` threads (at least one) until a
/// common fixed point or `round_limit`. The trace holds committed states
/// only; intra-round events are not observable here.
pub fn run_threaded(
    family: &FunctionFamily,
    mode: WriteMode,
    workers: usize,
    round_limit: usize,
) -> Result<ExecutionTrace> {
    let mut trace = ExecutionTrace::start(EngineKind::Parallel, family.initial.clone());
    if is_common_fixed_point(&family.initial, family) {
        trace.status = TerminalStatus::Converged;
        return Ok(trace);
    }
    let m = family.len();
    let workers = workers.clamp(1, m.max(1));
    let cells = Cells(family.initial.iter().map(|t| Mutex::new(t.clone())).collect());
    let barrier = Barrier::new(workers + 1);
    let stop = AtomicBool::new(false);
    let failure: Mutex<Option<crate::error::Error>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for w in 0..workers {
            let (cells, barrier, stop, failure) = (&cells, &barrier, &stop, &failure);
            scope.spawn(move || loop {
                barrier.wait();
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                for fid in (w..m).step_by(workers) {
                    if let Err(e) = run_function(family, fid, cells, mode) {
                        failure.lock().expect("failure lock poisoned").get_or_insert(e);
                    }
                }
                barrier.wait();
            });
        }
        for r in 0..round_limit {
            barrier.wait();
            barrier.wait();
            let g = cells.snapshot();
            trace.push(
                StepRecord {
                    index: r,
                    active: (0..m).collect(),
                    ..StepRecord::default()
                },
                g.clone(),
            );
            if failure.lock().expect("failure lock poisoned").is_some() {
                break;
            }
            if is_common_fixed_point(&g, family) {
                trace.status = TerminalStatus::Converged;
                break;
            }
        }
        stop.store(true, Ordering::SeqCst);
        barrier.wait();
    });
    if let Some(e) = failure.into_inner().expect("failure lock poisoned") {
        return Err(e);
    }
    Ok(trace)
}
