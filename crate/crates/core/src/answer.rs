use std::fmt;

use crate::lattice::StateVector;

/// Problem-level reading of a terminal state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    /// The raw state, for families without a problem decoder.
    State(StateVector),
    /// Reachability matrix `closure[a][b]`.
    Closure(Vec<Vec<bool>>),
    /// `matching[man] = woman`.
    Matching(Vec<usize>),
    /// No stable matching satisfies the constraint.
    Infeasible,
    /// Single-source distances; `None` marks an unreachable vertex.
    Distances(Vec<Option<u64>>),
    /// All-pairs distances; `None` marks an unreachable pair.
    AllPairs(Vec<Vec<Option<u64>>>),
    /// Johnson potentials and the reweighted edge list `(from, to, weight)`.
    Reweighting {
        potentials: Vec<u64>,
        edges: Vec<(usize, usize, i64)>,
    },
    Count(u64),
    Payments(Vec<u64>),
}

fn fmt_dist(d: &Option<u64>) -> String {
    match d {
        Some(v) => v.to_string(),
        None => "UNREACHABLE".to_string(),
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::State(s) => write!(f, "state {s}"),
            Answer::Closure(m) => {
                writeln!(f, "closure")?;
                for row in m {
                    let line: String = row.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    writeln!(f, "  {line}")?;
                }
                Ok(())
            }
            Answer::Matching(m) => {
                write!(f, "matching")?;
                for (man, woman) in m.iter().enumerate() {
                    write!(f, " m{man}-w{woman}")?;
                }
                Ok(())
            }
            Answer::Infeasible => write!(f, "INFEASIBLE"),
            Answer::Distances(d) => {
                let parts: Vec<_> = d.iter().map(fmt_dist).collect();
                write!(f, "distances [{}]", parts.join(", "))
            }
            Answer::AllPairs(m) => {
                writeln!(f, "all-pairs distances")?;
                for row in m {
                    let parts: Vec<_> = row.iter().map(fmt_dist).collect();
                    writeln!(f, "  [{}]", parts.join(", "))?;
                }
                Ok(())
            }
            Answer::Reweighting { potentials, edges } => {
                write!(f, "potentials {potentials:?}; reweighted")?;
                for (a, b, w) in edges {
                    write!(f, " {a}->{b}:{w}")?;
                }
                Ok(())
            }
            Answer::Count(c) => write!(f, "count {c}"),
            Answer::Payments(p) => write!(f, "payments {p:?}"),
        }
    }
}
