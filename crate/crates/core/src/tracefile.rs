//! Line-oriented trace files.
//!
//! ```text
//! #fixpoint-trace v1
//! #family transitive-closure
//! #fingerprint 3f2a...
//! #engine parallel
//! #params mode=update-on-change seed=7
//! #status CONVERGED
//! - COMMIT - - 1;0;0;1
//! 0 DELIVER 2 0 1
//! 0 READ 1 3 1
//! 0 WRITE 0 1 1 applied plain
//! 0 CAS_FAIL 1 4 2 cas:0:1
//! 0 COMMIT - - 1;1;0;1
//! ```
//!
//! Record lines are `<round> <kind> <actor> <coord> <value> [extra...]`. The
//! first COMMIT (round `-`) is the initial state and each later COMMIT closes
//! the round named on its line. Tuples are comma-separated fields and states
//! are semicolon-separated tuples. WRITE carries `applied` or `dropped` and
//! its protocol (`plain` or `cas:<field>:<expected>`); a compare-and-set that
//! failed at application time is a CAS_FAIL line instead.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::family::Protocol;
use crate::lattice::{StateVector, Tuple};
use crate::trace::{Delivery, EngineKind, ExecutionTrace, ReadEvent, StepRecord, TerminalStatus, WriteEvent};

pub const MAGIC: &str = "#fixpoint-trace v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceHeader {
    pub family: String,
    pub fingerprint: String,
    /// Free-form `key=value` run parameters.
    pub params: String,
}

fn tuple_text(t: &[u64]) -> String {
    t.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

pub fn state_text(s: &StateVector) -> String {
    s.iter().map(|t| tuple_text(t)).collect::<Vec<_>>().join(";")
}

fn parse_tuple(text: &str, line: usize) -> Result<Tuple> {
    text.split(',')
        .map(|f| {
            f.parse::<u64>().map_err(|_| Error::TraceParse {
                line,
                message: format!("`{text}` is not a tuple of naturals"),
            })
        })
        .collect()
}

pub fn parse_state(text: &str, line: usize) -> Result<StateVector> {
    Ok(StateVector::new(
        text.split(';').map(|t| parse_tuple(t, line)).collect::<Result<_>>()?,
    ))
}

fn protocol_text(p: Protocol) -> String {
    match p {
        Protocol::Plain => "plain".into(),
        Protocol::Cas { field, expected } => format!("cas:{field}:{expected}"),
    }
}

fn parse_protocol(text: &str, line: usize) -> Result<Protocol> {
    if text == "plain" {
        return Ok(Protocol::Plain);
    }
    let bad = || Error::TraceParse {
        line,
        message: format!("bad protocol `{text}`"),
    };
    let mut parts = text.split(':');
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some("cas"), Some(f), Some(e), None) => Ok(Protocol::Cas {
            field: f.parse().map_err(|_| bad())?,
            expected: e.parse().map_err(|_| bad())?,
        }),
        _ => Err(bad()),
    }
}

fn engine_from(text: &str, line: usize) -> Result<EngineKind> {
    [EngineKind::Interleaved, EngineKind::Parallel, EngineKind::Distributed]
        .into_iter()
        .find(|e| e.as_str() == text)
        .ok_or_else(|| Error::TraceParse {
            line,
            message: format!("unknown engine `{text}`"),
        })
}

fn status_from(text: &str, line: usize) -> Result<TerminalStatus> {
    [
        TerminalStatus::Converged,
        TerminalStatus::StepLimit,
        TerminalStatus::StuckNonFixpoint,
    ]
    .into_iter()
    .find(|s| s.as_str() == text)
    .ok_or_else(|| Error::TraceParse {
        line,
        message: format!("unknown status `{text}`"),
    })
}

/// Serializes a trace. Output depends only on its arguments.
pub fn write_trace(header: &TraceHeader, trace: &ExecutionTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "#family {}", header.family);
    let _ = writeln!(out, "#fingerprint {}", header.fingerprint);
    let _ = writeln!(out, "#engine {}", trace.engine.as_str());
    let _ = writeln!(out, "#params {}", header.params);
    let _ = writeln!(out, "#status {}", trace.status.as_str());
    let _ = writeln!(out, "- COMMIT - - {}", state_text(&trace.states[0]));
    for (t, step) in trace.steps.iter().enumerate() {
        for d in &step.deliveries {
            let _ = writeln!(out, "{t} DELIVER {} {} {}", d.recipient, d.coord, tuple_text(&d.value));
        }
        for r in &step.reads {
            let _ = writeln!(out, "{t} READ {} {} {}", r.function, r.coord, tuple_text(&r.value));
        }
        for w in &step.writes {
            let value = tuple_text(&w.value);
            let protocol = protocol_text(w.protocol);
            let cas_failed = !w.applied && matches!(w.protocol, Protocol::Cas { .. });
            if cas_failed {
                let _ = writeln!(out, "{t} CAS_FAIL {} {} {value} {protocol}", w.function, w.coord);
            } else {
                let applied = if w.applied { "applied" } else { "dropped" };
                let _ = writeln!(out, "{t} WRITE {} {} {value} {applied} {protocol}", w.function, w.coord);
            }
        }
        let _ = writeln!(out, "{t} COMMIT - - {}", state_text(&trace.states[t + 1]));
    }
    out
}

/// Parses a trace written by [`write_trace`]. Step records keep deliveries,
/// reads and writes; active sets and observed views are not stored.
pub fn parse_trace(text: &str) -> Result<(TraceHeader, ExecutionTrace)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, first) = lines.next().ok_or(Error::TraceParse {
        line: 1,
        message: "empty trace".into(),
    })?;
    if first != MAGIC {
        return Err(Error::TraceParse {
            line: 1,
            message: format!("expected `{MAGIC}`"),
        });
    }
    let mut header = TraceHeader {
        family: String::new(),
        fingerprint: String::new(),
        params: String::new(),
    };
    let mut engine = None;
    let mut status = None;
    let mut states: Vec<StateVector> = Vec::new();
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut current = StepRecord::default();

    for (n, line) in lines {
        if let Some(rest) = line.strip_prefix('#') {
            let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
            match key {
                "family" => header.family = value.to_string(),
                "fingerprint" => header.fingerprint = value.to_string(),
                "params" => header.params = value.to_string(),
                "engine" => engine = Some(engine_from(value, n)?),
                "status" => status = Some(status_from(value, n)?),
                _ => {
                    return Err(Error::TraceParse {
                        line: n,
                        message: format!("unknown header `{key}`"),
                    })
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(' ').collect();
        if f.len() < 5 {
            return Err(Error::TraceParse {
                line: n,
                message: "a record needs at least five fields".into(),
            });
        }
        let field = |i: usize| -> Result<usize> {
            f[i].parse().map_err(|_| Error::TraceParse {
                line: n,
                message: format!("field {} `{}` is not an index", i + 1, f[i]),
            })
        };
        if f[0] == "-" {
            if f[1] != "COMMIT" || !states.is_empty() {
                return Err(Error::TraceParse {
                    line: n,
                    message: "only the first COMMIT may use round `-`".into(),
                });
            }
            states.push(parse_state(f[4], n)?);
            continue;
        }
        let round = field(0)?;
        if states.is_empty() || round != steps.len() {
            return Err(Error::TraceParse {
                line: n,
                message: format!("round {round} out of sequence"),
            });
        }
        match f[1] {
            "COMMIT" => {
                let mut step = std::mem::take(&mut current);
                step.index = round;
                steps.push(step);
                states.push(parse_state(f[4], n)?);
            }
            "DELIVER" => current.deliveries.push(Delivery {
                recipient: field(2)?,
                coord: field(3)?,
                value: parse_tuple(f[4], n)?,
            }),
            "READ" => current.reads.push(ReadEvent {
                function: field(2)?,
                coord: field(3)?,
                value: parse_tuple(f[4], n)?,
            }),
            "WRITE" | "CAS_FAIL" => {
                let cas_fail = f[1] == "CAS_FAIL";
                let (applied, protocol) = match (cas_fail, f.get(5), f.get(6)) {
                    (true, Some(p), None) => (false, parse_protocol(p, n)?),
                    (false, Some(&"applied"), Some(p)) => (true, parse_protocol(p, n)?),
                    (false, Some(&"dropped"), Some(p)) => (false, parse_protocol(p, n)?),
                    _ => {
                        return Err(Error::TraceParse {
                            line: n,
                            message: "malformed write record".into(),
                        })
                    }
                };
                current.writes.push(WriteEvent {
                    function: field(2)?,
                    coord: field(3)?,
                    value: parse_tuple(f[4], n)?,
                    protocol,
                    read_value: None,
                    applied,
                });
            }
            other => {
                return Err(Error::TraceParse {
                    line: n,
                    message: format!("unknown record kind `{other}`"),
                })
            }
        }
    }
    let missing = |what: &str| Error::TraceParse {
        line: 0,
        message: format!("missing {what}"),
    };
    if states.is_empty() {
        return Err(missing("initial COMMIT"));
    }
    if current != StepRecord::default() {
        return Err(missing("COMMIT closing the last round"));
    }
    Ok((
        header,
        ExecutionTrace {
            engine: engine.ok_or_else(|| missing("#engine header"))?,
            states,
            steps,
            status: status.ok_or_else(|| missing("#status header"))?,
        },
    ))
}
