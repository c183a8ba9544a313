//! Sequential reference implementations and brute-force searches.
//!
//! The problem oracles here work from the raw instance data with textbook
//! algorithms and share nothing with the families or the engines, so an
//! agreement between the two is evidence rather than an echo.

use crate::audit::EXHAUSTIVE_LIMIT;
use crate::engine::interleaved::default_step_limit;
use crate::error::{Error, Result};
use crate::family::{is_common_fixed_point, FunctionFamily};
use crate::lattice::StateVector;
use crate::problems::{Digraph, PreferenceProfile, SubsidyInstance};

/// Upper bound on brute-force search spaces.
pub const SEARCH_LIMIT: u128 = 1_000_000;

/// Applies the functions in index order until a full pass changes nothing.
pub fn lcfp_roundrobin(family: &FunctionFamily) -> Result<StateVector> {
    let limit = default_step_limit(family);
    let mut g = family.initial.clone();
    let mut steps = 0;
    loop {
        let mut changed = false;
        for i in 0..family.len() {
            let next = family.apply(i, &g)?;
            changed |= next != g;
            g = next;
            steps += 1;
        }
        if !changed {
            return Ok(g);
        }
        if steps > limit {
            return Err(Error::StepLimit { steps });
        }
    }
}

/// Every common fixed point of the family, by scanning the whole lattice.
pub fn common_fixed_points(family: &FunctionFamily) -> Result<Vec<StateVector>> {
    let size = family.bounds.size().unwrap_or(u128::MAX);
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::SearchSpace {
            size,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    Ok(family
        .bounds
        .states()
        .filter(|s| is_common_fixed_point(s, family))
        .collect())
}

/// The common fixed point below every other one, if there is such a point.
pub fn lcfp_exhaustive(family: &FunctionFamily) -> Result<Option<StateVector>> {
    let all = common_fixed_points(family)?;
    Ok(all.iter().find(|y| all.iter().all(|z| family.bounds.le(y, z))).cloned())
}

/// Reflexive-transitive closure by the triple loop.
#[allow(clippy::needless_range_loop)]
pub fn warshall_closure(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n;
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b, _) in &g.edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Man-proposing deferred acceptance; `result[man] = woman`.
pub fn gale_shapley_sequential(p: &PreferenceProfile) -> Vec<usize> {
    let n = p.men_prefs.len();
    let mut rank = vec![vec![0; n]; n];
    for (w, list) in p.women_prefs.iter().enumerate() {
        for (k, &m) in list.iter().enumerate() {
            rank[w][m] = k;
        }
    }
    let mut next = vec![0; n];
    let mut husband: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<usize> = (0..n).rev().collect();
    while let Some(m) = free.pop() {
        let w = p.men_prefs[m][next[m]];
        next[m] += 1;
        match husband[w] {
            None => husband[w] = Some(m),
            Some(h) if rank[w][m] < rank[w][h] => {
                husband[w] = Some(m);
                free.push(h);
            }
            Some(_) => free.push(m),
        }
    }
    let mut wife = vec![0; n];
    for (w, h) in husband.iter().enumerate() {
        wife[h.expect("deferred acceptance matches everyone")] = w;
    }
    wife
}

/// No man and woman both prefer each other to their assigned partners.
pub fn is_stable(p: &PreferenceProfile, wife: &[usize]) -> bool {
    let n = wife.len();
    let mut husband = vec![0; n];
    for (m, &w) in wife.iter().enumerate() {
        husband[w] = m;
    }
    let pos = |list: &[usize], x: usize| list.iter().position(|&y| y == x).expect("permutation");
    (0..n).all(|m| {
        (0..n).all(|w| {
            let man_prefers = pos(&p.men_prefs[m], w) < pos(&p.men_prefs[m], wife[m]);
            let woman_prefers = pos(&p.women_prefs[w], m) < pos(&p.women_prefs[w], husband[w]);
            !(man_prefers && woman_prefers)
        })
    })
}

/// Every stable matching, by trying all `n!` perfect matchings.
pub fn all_stable_matchings(p: &PreferenceProfile) -> Result<Vec<Vec<usize>>> {
    let n = p.men_prefs.len();
    let size: u128 = (1..=n as u128).product();
    if size > SEARCH_LIMIT {
        return Err(Error::SearchSpace {
            size,
            limit: SEARCH_LIMIT,
        });
    }
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |wife| {
        if is_stable(p, wife) {
            out.push(wife.to_vec());
        }
    });
    Ok(out)
}

fn permutations(a: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == a.len() {
        visit(a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permutations(a, k + 1, visit);
        a.swap(k, i);
    }
}

/// The man-optimal stable matching marrying `m1` to `w1`, or `None` when no
/// stable matching does.
pub fn constrained_stable_matching(p: &PreferenceProfile, m1: usize, w1: usize) -> Result<Option<Vec<usize>>> {
    let candidates: Vec<Vec<usize>> = all_stable_matchings(p)?.into_iter().filter(|m| m[m1] == w1).collect();
    let pos = |m: usize, w: usize| p.men_prefs[m].iter().position(|&x| x == w).expect("permutation");
    Ok(candidates
        .iter()
        .find(|a| {
            candidates
                .iter()
                .all(|b| (0..a.len()).all(|m| pos(m, a[m]) <= pos(m, b[m])))
        })
        .cloned())
}

/// Single-source distances by repeated relaxation; `None` for unreachable.
/// Errors with [`Error::NegativeCycle`] when one is reachable from `source`.
pub fn shortest_paths_reference(g: &Digraph, source: usize) -> Result<Vec<Option<i64>>> {
    let mut d: Vec<Option<i64>> = vec![None; g.n];
    d[source] = Some(0);
    for round in 0..=g.n {
        let mut changed = false;
        for &(a, b, w) in &g.edges {
            if let Some(da) = d[a] {
                if d[b].is_none_or(|db| da + w < db) {
                    d[b] = Some(da + w);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(d);
        }
        if round == g.n {
            break;
        }
    }
    Err(Error::NegativeCycle)
}

/// All-pairs distances by Floyd-Warshall.
pub fn all_pairs_reference(g: &Digraph) -> Result<Vec<Vec<Option<i64>>>> {
    let n = g.n;
    let mut d: Vec<Vec<Option<i64>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for &(a, b, w) in &g.edges {
        if d[a][b].is_none_or(|x| w < x) {
            d[a][b] = Some(w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|z| x + y < z) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    if (0..n).any(|i| d[i][i].is_some_and(|x| x < 0)) {
        return Err(Error::NegativeCycle);
    }
    Ok(d)
}

/// True when any cycle of the graph has negative total weight.
pub fn has_negative_cycle(g: &Digraph) -> bool {
    all_pairs_reference(g).is_err()
}

/// Number of entries strictly greater than `c`.
pub fn count_greater_sequential(a: &[i64], c: i64) -> u64 {
    a.iter().filter(|&&x| x > c).count() as u64
}

/// `v_i(X_i) + p_i >= v_i(X_j) + p_j` for every pair of agents.
pub fn is_envy_eliminating(inst: &SubsidyInstance, p: &[u64]) -> bool {
    let v = &inst.valuations;
    (0..p.len()).all(|i| (0..p.len()).all(|j| v[i][i] + p[i] >= v[i][j] + p[j]))
}

/// Every envy-eliminating payment vector with entries at most `cap`.
pub fn envy_eliminating_vectors(inst: &SubsidyInstance, cap: u64) -> Result<Vec<Vec<u64>>> {
    let n = inst.valuations.len();
    let size = (cap as u128 + 1).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > SEARCH_LIMIT {
        return Err(Error::SearchSpace {
            size,
            limit: SEARCH_LIMIT,
        });
    }
    let mut out = Vec::new();
    let mut p = vec![0u64; n];
    loop {
        if is_envy_eliminating(inst, &p) {
            out.push(p.clone());
        }
        let Some(k) = (0..n).find(|&k| p[k] < cap) else {
            return Ok(out);
        };
        p[k] += 1;
        p[..k].iter_mut().for_each(|x| *x = 0);
    }
}

/// The componentwise-least envy-eliminating vector under `cap`.
pub fn min_subsidy_bruteforce(inst: &SubsidyInstance, cap: u64) -> Result<Vec<u64>> {
    let all = envy_eliminating_vectors(inst, cap)?;
    all.iter()
        .find(|a| all.iter().all(|b| a.iter().zip(b.iter()).all(|(x, y)| x <= y)))
        .cloned()
        .ok_or(Error::Infeasible { cap })
}
