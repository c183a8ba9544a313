//! Least common fixed points of monotone, inflationary function families on
//! finite product lattices, computed under interleaved, parallel-round and
//! distributed bounded-staleness execution.
//!
//! ```
//! use fixpoint_core::problems::{transitive_closure_family, Digraph};
//! use fixpoint_core::{run_distributed, run_parallel, ParallelConfig, StalenessParams};
//!
//! let g = Digraph::unweighted(4, &[(0, 1), (1, 2), (2, 3)])?;
//! let family = transitive_closure_family(&g)?;
//!
//! let rounds = run_parallel(&family, &ParallelConfig::seeded(7))?;
//! let (trace, report) = run_distributed(&family, &StalenessParams::uniform(3, 7), None)?;
//! assert_eq!(rounds.terminal(), trace.terminal());
//! assert!(report.max_lag <= 3);
//! println!("{}", family.decode(trace.terminal())?);
//! # Ok::<(), fixpoint_core::Error>(())
//! ```

pub mod answer;
pub mod audit;
pub mod corpus;
pub mod counterexamples;
pub mod engine;
pub mod error;
pub mod family;
pub mod lattice;
pub mod oracles;
pub mod problems;
pub mod trace;
pub mod tracefile;

pub use answer::Answer;
pub use audit::{audit_family, AuditReport, Violation, ViolationKind};
pub use counterexamples::{run_counterexample, run_repaired_twin, Verdict, SCENARIOS};
pub use engine::distributed::{
    deliver_messages, run_distributed, DelayPolicy, ProcessState, QuiescenceReport, StalenessParams,
};
pub use engine::interleaved::{run_interleaved, run_with_unfair_schedule, FairSchedule, SchedulePolicy};
pub use engine::parallel::{
    enumerate_round_outcomes, execute_round, run_parallel, IntraRoundPolicy, IntraRoundSchedule, ParallelConfig,
    RoundOutcome, RoundPlan, WriteMode,
};
pub use error::{Error, Result};
pub use family::{
    dualize, is_common_fixed_point, FunctionFamily, Properties, Protocol, ReadSet, StateView, UpdateFunction, Write,
};
pub use lattice::{extremes, order_compare, Bounds, FieldSpec, OrderRelation, Orientation, StateVector, Tuple};
pub use trace::{audit_trace, EngineKind, ExecutionTrace, StepRecord, TerminalStatus, TraceAudit};
