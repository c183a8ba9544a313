//! Shortest-path families. Distances are descending fields, so each update
//! lowers a value and the least common fixed point in the progress order is
//! the vector of shortest distances.

use crate::answer::Answer;
use crate::error::{Error, Result};
use crate::family::{FunctionFamily, ReadSet, UpdateFunction, Write};
use crate::lattice::{Bounds, FieldSpec, StateVector, Tuple};

use super::Digraph;

/// `n * max(T, 1)` where `T` is the largest edge weight. Every simple path
/// weighs less than this, so the bound doubles as the "no path" marker.
pub fn shortest_path_bound(g: &Digraph) -> u64 {
    let t = g.edges.iter().map(|e| e.2.max(0) as u64).max().unwrap_or(0).max(1);
    g.n as u64 * t
}

/// Incoming edges per vertex, lightest weight per pair.
fn predecessors(g: &Digraph) -> Vec<Vec<(usize, u64)>> {
    let w = g.weight_matrix();
    (0..g.n)
        .map(|i| (0..g.n).filter_map(|k| w[k][i].map(|x| (k, x as u64))).collect())
        .collect()
}

fn source_row(g: &Digraph, bound: u64) -> Vec<u64> {
    let w = g.weight_matrix();
    (0..g.n)
        .map(|i| {
            if i == 0 {
                0
            } else {
                w[0][i].map_or(bound, |x| (x as u64).min(bound))
            }
        })
        .collect()
}

fn distances(values: impl Iterator<Item = u64>, bound: u64) -> Vec<Option<u64>> {
    values.map(|d| (d < bound).then_some(d)).collect()
}

/// Single-source distances from vertex 0 by plain edge relaxation.
pub fn edge_relaxation_family(g: &Digraph) -> Result<FunctionFamily> {
    g.validate()?;
    g.require_non_negative()?;
    let bound = shortest_path_bound(g);
    let bounds = Bounds::uniform(g.n, vec![FieldSpec::descending("dist", bound)])?;
    let functions = predecessors(g)
        .into_iter()
        .enumerate()
        .map(|(i, pre)| {
            let reads = pre.iter().map(|&(k, _)| k).chain([i]).collect();
            UpdateFunction::local(i, i, ReadSet::Coords(reads), move |v| {
                let best = pre.iter().map(|&(k, w)| v.scalar(k).saturating_add(w)).min();
                match best {
                    Some(d) if d < v.scalar(i) => vec![Write::scalar(i, d)],
                    _ => vec![],
                }
            })
        })
        .collect();
    let initial = StateVector::from_scalars(&source_row(g, bound));
    let family = FunctionFamily::new("edge-relaxation", bounds, functions, initial)?;
    Ok(family.with_decoder(move |s| Ok(Answer::Distances(distances(s.scalars().into_iter(), bound)))))
}

/// Bellman-Ford with per-vertex levels. Coordinates are `(dist, level)`,
/// `dist` descending and `level` ascending up to `n + 1`, starting at 1.
///
/// `f_i` relaxes its incoming edges, then raises its level unless some vertex
/// is at a lower level. Gating the relaxation on the level check as well
/// would break monotonicity: a vertex already at a higher level could then be
/// blocked from relaxing while one at a lower level is not.
pub fn bellman_ford_family(g: &Digraph) -> Result<FunctionFamily> {
    g.validate()?;
    g.require_non_negative()?;
    let n = g.n;
    let bound = shortest_path_bound(g);
    let max_level = n as u64 + 1;
    let bounds = Bounds::uniform(
        n,
        vec![
            FieldSpec::descending("dist", bound),
            FieldSpec::ascending("level", max_level),
        ],
    )?;
    let functions = predecessors(g)
        .into_iter()
        .enumerate()
        .map(|(i, pre)| {
            UpdateFunction::local(i, i, ReadSet::All, move |v| {
                let own = v.read(i);
                let (dist, level) = (own[0], own[1]);
                let relaxed = pre
                    .iter()
                    .map(|&(k, w)| v.read(k)[0].saturating_add(w))
                    .fold(dist, u64::min);
                let lagging = (0..n).any(|k| k != i && v.read(k)[1] < level);
                let next_level = if lagging || level >= max_level {
                    level
                } else {
                    level + 1
                };
                if (relaxed, next_level) == (dist, level) {
                    vec![]
                } else {
                    vec![Write::plain(i, smallvec::smallvec![relaxed, next_level])]
                }
            })
        })
        .collect();
    let initial = StateVector::new(
        source_row(g, bound)
            .into_iter()
            .map(|d| -> Tuple { smallvec::smallvec![d, 1] })
            .collect(),
    );
    let family = FunctionFamily::new("bellman-ford", bounds, functions, initial)?;
    Ok(family.with_decoder(move |s| Ok(Answer::Distances(distances(s.iter().map(|t| t[0]), bound)))))
}

/// All-pairs distances; coordinate `i * n + j` holds the `i -> j` distance.
pub fn floyd_warshall_family(g: &Digraph) -> Result<FunctionFamily> {
    g.validate()?;
    g.require_non_negative()?;
    let n = g.n;
    let bound = shortest_path_bound(g);
    let bounds = Bounds::uniform(n * n, vec![FieldSpec::descending("dist", bound)])?;
    let functions = (0..n * n)
        .map(|c| {
            let (i, j) = (c / n, c % n);
            let reads = (0..n).flat_map(|k| [i * n + k, k * n + j]).collect();
            UpdateFunction::local(c, c, ReadSet::Coords(reads), move |v| {
                let best = (0..n)
                    .map(|k| v.scalar(i * n + k).saturating_add(v.scalar(k * n + j)))
                    .min()
                    .unwrap_or(u64::MAX);
                if best < v.scalar(c) {
                    vec![Write::scalar(c, best)]
                } else {
                    vec![]
                }
            })
        })
        .collect();
    let w = g.weight_matrix();
    let initial: Vec<u64> = (0..n * n)
        .map(|c| {
            let (i, j) = (c / n, c % n);
            if i == j {
                0
            } else {
                w[i][j].map_or(bound, |x| (x as u64).min(bound))
            }
        })
        .collect();
    let family = FunctionFamily::new("floyd-warshall", bounds, functions, StateVector::from_scalars(&initial))?;
    Ok(family.with_decoder(move |s| {
        let d = s.scalars();
        Ok(Answer::AllPairs(
            (0..n)
                .map(|i| distances(d[i * n..(i + 1) * n].iter().copied(), bound))
                .collect(),
        ))
    }))
}

/// Johnson potentials. `G[i]` rises to `max_k (G[k] - w[i,k])` over edges
/// `i -> k`, capped at `n * |most negative weight|`. A potential reaching the
/// cap can only come from a negative cycle, and decodes to
/// [`Error::NegativeCycle`]. The decoder reweights each edge to
/// `w[i,j] + G[i] - G[j]`, which the fixed-point condition makes non-negative.
pub fn johnson_family(g: &Digraph) -> Result<FunctionFamily> {
    g.validate()?;
    let n = g.n;
    let most_negative = g.edges.iter().map(|e| e.2).min().unwrap_or(0).min(0);
    let cap = n as u64 * most_negative.unsigned_abs();
    let bounds = Bounds::uniform(n, vec![FieldSpec::ascending("potential", cap)])?;
    let w = g.weight_matrix();
    let functions = (0..n)
        .map(|i| {
            let out: Vec<(usize, i64)> = (0..n).filter_map(|k| w[i][k].map(|x| (k, x))).collect();
            let reads = out.iter().map(|&(k, _)| k).chain([i]).collect();
            UpdateFunction::local(i, i, ReadSet::Coords(reads), move |v| {
                let own = v.scalar(i) as i64;
                let best = out.iter().map(|&(k, x)| v.scalar(k) as i64 - x).max();
                match best {
                    Some(b) if b > own => vec![Write::scalar(i, (b as u64).min(cap))],
                    _ => vec![],
                }
            })
        })
        .collect();
    let family = FunctionFamily::new("johnson", bounds, functions, StateVector::from_scalars(&vec![0; n]))?;
    let edges = g.edges.clone();
    Ok(family.with_decoder(move |s| {
        let p = s.scalars();
        if cap > 0 && p.contains(&cap) {
            return Err(Error::NegativeCycle);
        }
        let reweighted = edges
            .iter()
            .map(|&(a, b, x)| (a, b, x + p[a] as i64 - p[b] as i64))
            .collect();
        Ok(Answer::Reweighting {
            potentials: p,
            edges: reweighted,
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::{audit_family, ViolationKind};
    use crate::engine::interleaved::{run_interleaved, FairSchedule};
    use crate::engine::parallel::{run_parallel, ParallelConfig};

    fn example() -> Digraph {
        Digraph::new(3, vec![(0, 1, 5), (1, 2, 2), (0, 2, 9)]).unwrap()
    }

    fn solve(fam: &FunctionFamily) -> Result<Answer> {
        let t = run_interleaved(fam, &FairSchedule::round_robin())?;
        assert!(t.converged());
        fam.decode(t.terminal())
    }

    #[test]
    fn single_source_example() {
        let expect = Answer::Distances(vec![Some(0), Some(5), Some(7)]);
        assert_eq!(solve(&edge_relaxation_family(&example()).unwrap()).unwrap(), expect);
        assert_eq!(solve(&bellman_ford_family(&example()).unwrap()).unwrap(), expect);
    }

    #[test]
    fn single_vertex_and_unreachable() {
        let one = Digraph::new(1, vec![]).unwrap();
        assert_eq!(
            solve(&edge_relaxation_family(&one).unwrap()).unwrap(),
            Answer::Distances(vec![Some(0)])
        );
        let g = Digraph::new(3, vec![(0, 1, 4)]).unwrap();
        let fam = edge_relaxation_family(&g).unwrap();
        let t = run_interleaved(&fam, &FairSchedule::round_robin()).unwrap();
        assert_eq!(t.terminal().scalar(2), shortest_path_bound(&g));
        assert_eq!(
            fam.decode(t.terminal()).unwrap(),
            Answer::Distances(vec![Some(0), Some(4), None])
        );
    }

    #[test]
    fn bellman_ford_levels_move_in_lockstep() {
        let fam = bellman_ford_family(&example()).unwrap();
        let t = run_parallel(&fam, &ParallelConfig::synchronous()).unwrap();
        assert!(t.converged());
        for st in &t.states {
            let levels: Vec<u64> = st.iter().map(|x| x[1]).collect();
            let (lo, hi) = (levels.iter().min().unwrap(), levels.iter().max().unwrap());
            assert!(hi - lo <= 1);
        }
        assert!(t.terminal().iter().all(|x| x[1] == 4));
        let edgeless = bellman_ford_family(&Digraph::new(3, vec![]).unwrap()).unwrap();
        let t = run_interleaved(&edgeless, &FairSchedule::round_robin()).unwrap();
        assert!(t.terminal().iter().all(|x| x[1] == 4));
        assert_eq!(
            t.terminal().iter().map(|x| x[0]).collect::<Vec<_>>(),
            edgeless.initial.iter().map(|x| x[0]).collect::<Vec<_>>()
        );
    }

    #[test]
    fn floyd_warshall_rows() {
        let Answer::AllPairs(d) = solve(&floyd_warshall_family(&example()).unwrap()).unwrap() else {
            panic!("expected all-pairs answer")
        };
        assert_eq!(d[0], vec![Some(0), Some(5), Some(7)]);
        assert!((0..3).all(|i| d[i][i] == Some(0)));
        let pairs: Vec<_> = (0..3)
            .flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| (a, b, 1)))
            .collect();
        let Answer::AllPairs(d) = solve(&floyd_warshall_family(&Digraph::new(3, pairs).unwrap()).unwrap()).unwrap()
        else {
            panic!("expected all-pairs answer")
        };
        assert!((0..3).all(|i| (0..3).all(|j| d[i][j] == Some((i != j) as u64))));
    }

    #[test]
    fn johnson_examples() {
        let g = Digraph::new(2, vec![(0, 1, -3)]).unwrap();
        let Answer::Reweighting { edges, .. } = solve(&johnson_family(&g).unwrap()).unwrap() else {
            panic!("expected reweighting")
        };
        assert!(edges.iter().all(|e| e.2 >= 0));

        let fam = johnson_family(&example()).unwrap();
        let t = run_interleaved(&fam, &FairSchedule::round_robin()).unwrap();
        assert_eq!(t.terminal(), &fam.initial);

        let cycle = Digraph::new(2, vec![(0, 1, 1), (1, 0, -2)]).unwrap();
        assert_eq!(solve(&johnson_family(&cycle).unwrap()), Err(Error::NegativeCycle));
    }

    #[test]
    fn audits_are_clean() {
        let g = Digraph::new(3, vec![(0, 1, 2), (1, 2, 1), (0, 2, 1)]).unwrap();
        let neg = Digraph::new(3, vec![(0, 1, -2), (1, 2, 1), (2, 0, 2)]).unwrap();
        for fam in [
            edge_relaxation_family(&g).unwrap(),
            bellman_ford_family(&g).unwrap(),
            floyd_warshall_family(&Digraph::new(2, vec![(0, 1, 2), (1, 0, 1)]).unwrap()).unwrap(),
            johnson_family(&neg).unwrap(),
        ] {
            let report = audit_family(&fam, 2000, 1);
            assert!(report.is_clean(), "{}: {:?}", fam.name, report.violations.first());
        }
    }

    /// Returning early while a vertex lags, before relaxing, is not monotone.
    #[test]
    fn level_gated_relaxation_is_not_monotone() {
        let g = Digraph::new(2, vec![(0, 1, 1)]).unwrap();
        let bound = shortest_path_bound(&g);
        let bounds = Bounds::uniform(
            2,
            vec![FieldSpec::descending("dist", bound), FieldSpec::ascending("level", 3)],
        )
        .unwrap();
        let pre = predecessors(&g);
        let fs = (0..2)
            .map(|i| {
                let pre = pre[i].clone();
                UpdateFunction::local(i, i, ReadSet::All, move |v| {
                    let own = v.read(i);
                    if (0..2).any(|k| v.read(k)[1] < own[1]) || own[1] >= 3 {
                        return vec![];
                    }
                    let d = pre.iter().map(|&(k, w)| v.read(k)[0] + w).fold(own[0], u64::min);
                    vec![Write::plain(i, smallvec::smallvec![d, own[1] + 1])]
                })
            })
            .collect();
        let init = StateVector::new(vec![smallvec::smallvec![0, 1], smallvec::smallvec![bound, 1]]);
        let literal = FunctionFamily::new("literal", bounds, fs, init).unwrap();
        assert!(audit_family(&literal, 1, 0).count(ViolationKind::Monotone) > 0);
    }
}
