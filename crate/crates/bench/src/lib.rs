//! Fixed workloads shared by the engine benchmarks.

use fixpoint_core::corpus;
use fixpoint_core::problems::{floyd_warshall_family, stable_marriage_family, transitive_closure_family};
use fixpoint_core::FunctionFamily;

/// Transitive closure of the directed path on `n` vertices; the parallel
/// engine needs about `log2 n` rounds, the interleaved one far more steps.
pub fn path_closure(n: usize) -> FunctionFamily {
    transitive_closure_family(&corpus::path_graph(n)).expect("paths are valid graphs")
}

/// All-pairs distances on a seeded random weighted graph.
pub fn random_all_pairs(seed: u64, max_n: usize) -> FunctionFamily {
    floyd_warshall_family(&corpus::random_weighted_graph(seed, max_n, 9)).expect("corpus graphs are valid")
}

/// Stable marriage on a seeded random profile.
pub fn random_marriage(seed: u64, max_n: usize) -> FunctionFamily {
    stable_marriage_family(&corpus::random_profile(seed, max_n), None).expect("corpus profiles are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(path_closure(8).len(), 64);
        assert!(random_all_pairs(1, 6).len() <= 36);
        assert!(random_marriage(1, 6).len() <= 6);
    }
}
