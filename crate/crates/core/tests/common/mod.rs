//! Corpus cases shared by the integration tests.

#![allow(dead_code)]

use fixpoint_core::corpus;
use fixpoint_core::oracles;
use fixpoint_core::problems::{
    bellman_ford_family, edge_relaxation_family, floyd_warshall_family, stable_marriage_family, subsidy_family,
    transitive_closure_family,
};
use fixpoint_core::{Answer, FunctionFamily};

/// A family together with the answer computed by its problem oracle.
pub struct Case {
    pub label: String,
    pub seed: u64,
    pub family: FunctionFamily,
    pub expected: Answer,
}

fn unsigned(d: Vec<Option<i64>>) -> Vec<Option<u64>> {
    d.into_iter().map(|x| x.map(|v| v as u64)).collect()
}

pub fn closure_cases(count: u64) -> Vec<Case> {
    (0..count)
        .map(|seed| {
            let g = corpus::random_digraph(seed, 8);
            Case {
                label: format!("closure#{seed}"),
                seed,
                family: transitive_closure_family(&g).unwrap(),
                expected: Answer::Closure(oracles::warshall_closure(&g)),
            }
        })
        .collect()
}

pub fn marriage_cases(count: u64) -> Vec<Case> {
    let mut out = Vec::new();
    for seed in 0..count {
        let p = corpus::random_profile(seed, 6);
        out.push(Case {
            label: format!("marriage#{seed}"),
            seed,
            family: stable_marriage_family(&p, None).unwrap(),
            expected: Answer::Matching(oracles::gale_shapley_sequential(&p)),
        });
        let w1 = seed as usize % p.n();
        let expected = match oracles::constrained_stable_matching(&p, 0, w1).unwrap() {
            Some(m) => Answer::Matching(m),
            None => Answer::Infeasible,
        };
        out.push(Case {
            label: format!("marriage-constrained#{seed}"),
            seed,
            family: stable_marriage_family(&p, Some((0, w1))).unwrap(),
            expected,
        });
    }
    out
}

pub fn path_cases(count: u64) -> Vec<Case> {
    let mut out = Vec::new();
    for seed in 0..count {
        let g = corpus::random_weighted_graph(seed, 8, 9);
        let single = Answer::Distances(unsigned(oracles::shortest_paths_reference(&g, 0).unwrap()));
        out.push(Case {
            label: format!("edge-relaxation#{seed}"),
            seed,
            family: edge_relaxation_family(&g).unwrap(),
            expected: single.clone(),
        });
        out.push(Case {
            label: format!("bellman-ford#{seed}"),
            seed,
            family: bellman_ford_family(&g).unwrap(),
            expected: single,
        });
        let all = oracles::all_pairs_reference(&g)
            .unwrap()
            .into_iter()
            .map(unsigned)
            .collect();
        out.push(Case {
            label: format!("floyd-warshall#{seed}"),
            seed,
            family: floyd_warshall_family(&g).unwrap(),
            expected: Answer::AllPairs(all),
        });
    }
    out
}

pub fn subsidy_cases(count: u64) -> Vec<Case> {
    (0..count)
        .map(|seed| {
            let inst = corpus::random_subsidy(seed, 3, 5);
            Case {
                label: format!("subsidy#{seed}"),
                seed,
                family: subsidy_family(&inst).unwrap(),
                expected: Answer::Payments(oracles::min_subsidy_bruteforce(&inst, inst.cap()).unwrap()),
            }
        })
        .collect()
}

/// The full cross-engine corpus: 100 digraphs, 100 profiles (each with a
/// constrained twin), 100 weighted graphs (three families each) and 50
/// subsidy instances.
pub fn full_corpus() -> Vec<Case> {
    let mut all = closure_cases(100);
    all.extend(marriage_cases(100));
    all.extend(path_cases(100));
    all.extend(subsidy_cases(50));
    all
}
