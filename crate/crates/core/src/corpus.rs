//! Seeded random instances for tests, benchmarks and the CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::problems::{Digraph, PreferenceProfile, SubsidyInstance};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random digraph on `1..=max_n` vertices with edge density about 1/4.
pub fn random_digraph(seed: u64, max_n: usize) -> Digraph {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && r.gen_bool(0.25) {
                edges.push((a, b, 1));
            }
        }
    }
    Digraph { n, edges }
}

/// Random digraph with weights in `0..=max_w`.
pub fn random_weighted_graph(seed: u64, max_n: usize, max_w: i64) -> Digraph {
    let mut g = random_digraph(seed, max_n);
    let mut r = rng(seed ^ 0x5eed);
    for e in &mut g.edges {
        e.2 = r.gen_range(0..=max_w);
    }
    g
}

/// Directed path `0 -> 1 -> ... -> n-1`.
pub fn path_graph(n: usize) -> Digraph {
    Digraph {
        n,
        edges: (1..n).map(|i| (i - 1, i, 1)).collect(),
    }
}

/// Uniformly random preference lists for `1..=max_n` men and women.
pub fn random_profile(seed: u64, max_n: usize) -> PreferenceProfile {
    let mut r = rng(seed);
    let n = r.gen_range(1..=max_n);
    let mut lists = || -> Vec<Vec<usize>> {
        (0..n)
            .map(|_| {
                let mut l: Vec<usize> = (0..n).collect();
                l.shuffle(&mut r);
                l
            })
            .collect()
    };
    let men = lists();
    let women = lists();
    PreferenceProfile {
        men_prefs: men,
        women_prefs: women,
    }
}

/// Random envy-freeable instance with `2..=max_n` agents and values up to
/// `max_delta`, by rejection sampling.
pub fn random_subsidy(seed: u64, max_n: usize, max_delta: u64) -> SubsidyInstance {
    let mut r = rng(seed);
    loop {
        let n = r.gen_range(2..=max_n.max(2));
        let valuations = (0..n)
            .map(|_| (0..n).map(|_| r.gen_range(0..=max_delta)).collect())
            .collect();
        let inst = SubsidyInstance { valuations };
        if inst.is_envy_freeable() {
            return inst;
        }
    }
}

/// Graph with at least one negative edge and no negative cycle: weights are
/// non-negative base weights shifted by a random potential, which leaves
/// every cycle weight unchanged.
pub fn random_negative_graph(seed: u64, max_n: usize, max_w: i64) -> Digraph {
    let mut r = rng(seed);
    loop {
        let n = r.gen_range(2..=max_n.max(2));
        let h: Vec<i64> = (0..n).map(|_| r.gen_range(0..=max_w)).collect();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && r.gen_bool(0.3) {
                    edges.push((a, b, r.gen_range(0..=max_w) + h[a] - h[b]));
                }
            }
        }
        if edges.iter().any(|e| e.2 < 0) {
            return Digraph { n, edges };
        }
    }
}

/// Random graph containing a cycle of negative total weight.
pub fn planted_negative_cycle(seed: u64, max_n: usize, max_w: i64) -> Digraph {
    let mut r = rng(seed);
    let mut g = random_weighted_graph(seed, max_n, max_w);
    if g.n < 2 {
        g.n = 2;
    }
    let len = r.gen_range(2..=g.n);
    let mut cycle: Vec<usize> = (0..g.n).collect();
    cycle.shuffle(&mut r);
    cycle.truncate(len);
    let mut total = 0;
    for k in 0..len {
        let (a, b) = (cycle[k], cycle[(k + 1) % len]);
        let w = if k + 1 < len {
            r.gen_range(0..=max_w)
        } else {
            -(total + r.gen_range(1..=max_w.max(1)))
        };
        total += w;
        g.edges.push((a, b, w));
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::has_negative_cycle;

    #[test]
    fn generators_are_deterministic_and_valid() {
        for seed in 0..50 {
            assert_eq!(random_digraph(seed, 8), random_digraph(seed, 8));
            random_digraph(seed, 8).validate().unwrap();
            random_profile(seed, 6).validate().unwrap();
            let s = random_subsidy(seed, 3, 5);
            assert!(s.is_envy_freeable() && s.delta() <= 5);
            let g = random_negative_graph(seed, 8, 9);
            assert!(g.edges.iter().any(|e| e.2 < 0));
            assert!(!has_negative_cycle(&g));
            assert!(has_negative_cycle(&planted_negative_cycle(seed, 8, 9)));
        }
    }
}
