//! Instance files: JSON objects tagged by `kind`.
//!
//! ```json
//! {"kind": "transitive-closure", "n": 3, "edges": [[0, 1], [1, 2]]}
//! {"kind": "stable-marriage", "men": [[0, 1], [1, 0]], "women": [[1, 0], [0, 1]], "constraint": [0, 1]}
//! {"kind": "shortest-paths", "algorithm": "bellman-ford", "n": 3, "edges": [[0, 1, 5], [1, 2, 2]]}
//! {"kind": "all-pairs", "n": 3, "edges": [[0, 1, 5]]}
//! {"kind": "johnson", "n": 2, "edges": [[0, 1, -3]]}
//! {"kind": "count-greater", "values": [4, 9, 1], "threshold": 3}
//! {"kind": "subsidy", "valuations": [[1, 3], [0, 2]]}
//! ```

use std::path::Path;

use fixpoint_core::oracles;
use fixpoint_core::problems::{
    bellman_ford_family, count_greater_family, edge_relaxation_family, floyd_warshall_family, johnson_family,
    stable_marriage_family, subsidy_family, transitive_closure_family, Digraph, PreferenceProfile, SubsidyInstance,
};
use fixpoint_core::{Answer, FunctionFamily};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Syntax or shape error; the message carries line and column.
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: field `{field}`: {message}")]
    Invalid {
        path: String,
        field: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathAlgorithm {
    EdgeRelaxation,
    BellmanFord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Instance {
    TransitiveClosure {
        n: usize,
        edges: Vec<(usize, usize)>,
    },
    StableMarriage {
        men: Vec<Vec<usize>>,
        women: Vec<Vec<usize>>,
        /// Forces man `constraint[0]` to marry woman `constraint[1]`.
        #[serde(skip_serializing_if = "Option::is_none")]
        constraint: Option<(usize, usize)>,
    },
    ShortestPaths {
        algorithm: PathAlgorithm,
        n: usize,
        edges: Vec<(usize, usize, i64)>,
    },
    AllPairs {
        n: usize,
        edges: Vec<(usize, usize, i64)>,
    },
    Johnson {
        n: usize,
        edges: Vec<(usize, usize, i64)>,
    },
    CountGreater {
        values: Vec<i64>,
        threshold: i64,
    },
    Subsidy {
        valuations: Vec<Vec<u64>>,
    },
}

/// Payload mirrors used for parsing. Deserializing the concrete payload
/// straight from the text keeps line and column information in errors,
/// which a buffered tagged enum would lose.
mod payload {
    use serde::de::IgnoredAny;
    use serde::Deserialize;

    use super::PathAlgorithm;

    #[derive(Deserialize)]
    pub struct Tag {
        pub kind: String,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Closure {
        #[allow(dead_code)]
        pub kind: IgnoredAny,
        pub n: usize,
        pub edges: Vec<(usize, usize)>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Marriage {
        #[allow(dead_code)]
        pub kind: IgnoredAny,
        pub men: Vec<Vec<usize>>,
        pub women: Vec<Vec<usize>>,
        #[serde(default)]
        pub constraint: Option<(usize, usize)>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Paths {
        #[allow(dead_code)]
        pub kind: IgnoredAny,
        pub algorithm: PathAlgorithm,
        pub n: usize,
        pub edges: Vec<(usize, usize, i64)>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Weighted {
        #[allow(dead_code)]
        pub kind: IgnoredAny,
        pub n: usize,
        pub edges: Vec<(usize, usize, i64)>,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Counting {
        #[allow(dead_code)]
        pub kind: IgnoredAny,
        pub values: Vec<i64>,
        pub threshold: i64,
    }

    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Subsidy {
        #[allow(dead_code)]
        pub kind: IgnoredAny,
        pub valuations: Vec<Vec<u64>>,
    }
}

pub const KINDS: [&str; 7] = [
    "transitive-closure",
    "stable-marriage",
    "shortest-paths",
    "all-pairs",
    "johnson",
    "count-greater",
    "subsidy",
];

fn from_payload(text: &str) -> serde_json::Result<Result<Instance, String>> {
    let tag: payload::Tag = serde_json::from_str(text)?;
    Ok(Ok(match tag.kind.as_str() {
        "transitive-closure" => {
            let p: payload::Closure = serde_json::from_str(text)?;
            Instance::TransitiveClosure { n: p.n, edges: p.edges }
        }
        "stable-marriage" => {
            let p: payload::Marriage = serde_json::from_str(text)?;
            Instance::StableMarriage {
                men: p.men,
                women: p.women,
                constraint: p.constraint,
            }
        }
        "shortest-paths" => {
            let p: payload::Paths = serde_json::from_str(text)?;
            Instance::ShortestPaths {
                algorithm: p.algorithm,
                n: p.n,
                edges: p.edges,
            }
        }
        "all-pairs" => {
            let p: payload::Weighted = serde_json::from_str(text)?;
            Instance::AllPairs { n: p.n, edges: p.edges }
        }
        "johnson" => {
            let p: payload::Weighted = serde_json::from_str(text)?;
            Instance::Johnson { n: p.n, edges: p.edges }
        }
        "count-greater" => {
            let p: payload::Counting = serde_json::from_str(text)?;
            Instance::CountGreater {
                values: p.values,
                threshold: p.threshold,
            }
        }
        "subsidy" => {
            let p: payload::Subsidy = serde_json::from_str(text)?;
            Instance::Subsidy {
                valuations: p.valuations,
            }
        }
        other => {
            return Ok(Err(format!(
                "unknown kind `{other}`, expected one of {}",
                KINDS.join(", ")
            )))
        }
    }))
}

impl Instance {
    pub fn parse(text: &str, path: &str) -> Result<Self, SchemaError> {
        let inst = from_payload(text)
            .map_err(|source| SchemaError::Json {
                path: path.to_string(),
                source,
            })?
            .map_err(|message| SchemaError::Invalid {
                path: path.to_string(),
                field: "kind",
                message,
            })?;
        inst.family().map_err(|e| SchemaError::Invalid {
            path: path.to_string(),
            field: inst.main_field(),
            message: e.to_string(),
        })?;
        Ok(inst)
    }

    pub fn load(path: &Path) -> Result<Self, SchemaError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
            path: name.clone(),
            source,
        })?;
        Self::parse(&text, &name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances always serialize")
    }

    /// SHA-256 of the canonical serialization, in hex.
    pub fn fingerprint(&self) -> String {
        Sha256::digest(self.to_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// The payload field a builder error is attributed to.
    fn main_field(&self) -> &'static str {
        match self {
            Instance::TransitiveClosure { .. }
            | Instance::ShortestPaths { .. }
            | Instance::AllPairs { .. }
            | Instance::Johnson { .. } => "edges",
            Instance::StableMarriage { .. } => "men/women",
            Instance::CountGreater { .. } => "values",
            Instance::Subsidy { .. } => "valuations",
        }
    }

    fn graph(n: usize, edges: &[(usize, usize, i64)]) -> fixpoint_core::Result<Digraph> {
        Digraph::new(n, edges.to_vec())
    }

    fn profile(men: &[Vec<usize>], women: &[Vec<usize>]) -> fixpoint_core::Result<PreferenceProfile> {
        PreferenceProfile::new(men.to_vec(), women.to_vec())
    }

    pub fn family(&self) -> fixpoint_core::Result<FunctionFamily> {
        match self {
            Instance::TransitiveClosure { n, edges } => transitive_closure_family(&Digraph::unweighted(*n, edges)?),
            Instance::StableMarriage { men, women, constraint } => {
                stable_marriage_family(&Self::profile(men, women)?, *constraint)
            }
            Instance::ShortestPaths { algorithm, n, edges } => {
                let g = Self::graph(*n, edges)?;
                match algorithm {
                    PathAlgorithm::EdgeRelaxation => edge_relaxation_family(&g),
                    PathAlgorithm::BellmanFord => bellman_ford_family(&g),
                }
            }
            Instance::AllPairs { n, edges } => floyd_warshall_family(&Self::graph(*n, edges)?),
            Instance::Johnson { n, edges } => johnson_family(&Self::graph(*n, edges)?),
            Instance::CountGreater { values, threshold } => count_greater_family(values, *threshold),
            Instance::Subsidy { valuations } => subsidy_family(&SubsidyInstance::new(valuations.clone())?),
        }
    }

    /// The answer of the problem's reference algorithm, computed without
    /// any function family. Johnson instances have no reference potentials;
    /// for them the oracle reports only whether a negative cycle exists.
    pub fn oracle(&self) -> fixpoint_core::Result<OracleAnswer> {
        let unsigned = |d: Vec<Option<i64>>| d.into_iter().map(|x| x.map(|v| v as u64)).collect();
        Ok(match self {
            Instance::TransitiveClosure { n, edges } => OracleAnswer::Exact(Answer::Closure(
                oracles::warshall_closure(&Digraph::unweighted(*n, edges)?),
            )),
            Instance::StableMarriage { men, women, constraint } => {
                let p = Self::profile(men, women)?;
                OracleAnswer::Exact(match constraint {
                    None => Answer::Matching(oracles::gale_shapley_sequential(&p)),
                    Some((m, w)) => match oracles::constrained_stable_matching(&p, *m, *w)? {
                        Some(matching) => Answer::Matching(matching),
                        None => Answer::Infeasible,
                    },
                })
            }
            Instance::ShortestPaths { n, edges, .. } => OracleAnswer::Exact(Answer::Distances(unsigned(
                oracles::shortest_paths_reference(&Self::graph(*n, edges)?, 0)?,
            ))),
            Instance::AllPairs { n, edges } => OracleAnswer::Exact(Answer::AllPairs(
                oracles::all_pairs_reference(&Self::graph(*n, edges)?)?
                    .into_iter()
                    .map(unsigned)
                    .collect(),
            )),
            Instance::Johnson { n, edges } => {
                OracleAnswer::NegativeCycle(oracles::has_negative_cycle(&Self::graph(*n, edges)?))
            }
            Instance::CountGreater { values, threshold } => {
                OracleAnswer::Exact(Answer::Count(oracles::count_greater_sequential(values, *threshold)))
            }
            Instance::Subsidy { valuations } => {
                let inst = SubsidyInstance::new(valuations.clone())?;
                OracleAnswer::Exact(Answer::Payments(oracles::min_subsidy_bruteforce(&inst, inst.cap())?))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Exact(Answer),
    /// Johnson: whether the graph has a negative-weight cycle.
    NegativeCycle(bool),
}

impl OracleAnswer {
    /// Whether a decoded engine result agrees with the oracle.
    pub fn agrees(&self, decoded: &fixpoint_core::Result<Answer>) -> bool {
        match (self, decoded) {
            (OracleAnswer::Exact(a), Ok(b)) => a == b,
            (OracleAnswer::NegativeCycle(true), Err(fixpoint_core::Error::NegativeCycle)) => true,
            (OracleAnswer::NegativeCycle(false), Ok(Answer::Reweighting { edges, .. })) => {
                edges.iter().all(|e| e.2 >= 0)
            }
            _ => false,
        }
    }
}

impl std::fmt::Display for OracleAnswer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleAnswer::Exact(a) => write!(f, "{a}"),
            OracleAnswer::NegativeCycle(true) => write!(f, "NEGATIVE_CYCLE"),
            OracleAnswer::NegativeCycle(false) => write!(f, "no negative cycle"),
        }
    }
}
