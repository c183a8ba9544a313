use crate::answer::Answer;
use crate::error::Result;
use crate::family::{FunctionFamily, ReadSet, UpdateFunction, Write};
use crate::lattice::{Bounds, FieldSpec, StateVector};

use super::Digraph;

/// One reachability bit per ordered pair `(a, b)` at coordinate `a * n + b`.
/// `f_(a,b)` sets its bit once some `k` has both `R[a,k]` and `R[k,b]`.
/// Starts from the edge relation plus the diagonal.
pub fn transitive_closure_family(g: &Digraph) -> Result<FunctionFamily> {
    g.validate()?;
    let n = g.n;
    let bounds = Bounds::uniform(n * n, vec![FieldSpec::ascending("reach", 1)])?;
    let functions = (0..n * n)
        .map(|c| {
            let (a, b) = (c / n, c % n);
            let reads = (0..n).flat_map(|k| [a * n + k, k * n + b]).collect();
            UpdateFunction::local(c, c, ReadSet::Coords(reads), move |v| {
                if v.scalar(c) == 1 {
                    return vec![];
                }
                match (0..n).find(|&k| v.scalar(a * n + k) == 1 && v.scalar(k * n + b) == 1) {
                    Some(_) => vec![Write::scalar(c, 1)],
                    None => vec![],
                }
            })
        })
        .collect();
    let mut r0 = vec![0; n * n];
    for i in 0..n {
        r0[i * n + i] = 1;
    }
    for &(a, b, _) in &g.edges {
        r0[a * n + b] = 1;
    }
    let family = FunctionFamily::new("transitive-closure", bounds, functions, StateVector::from_scalars(&r0))?;
    Ok(family.with_decoder(move |s| {
        Ok(Answer::Closure(
            (0..n)
                .map(|a| (0..n).map(|b| s.scalar(a * n + b) == 1).collect())
                .collect(),
        ))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::audit_family;
    use crate::engine::interleaved::{run_interleaved, FairSchedule};

    fn closure_of(g: &Digraph) -> Vec<Vec<bool>> {
        let fam = transitive_closure_family(g).unwrap();
        let t = run_interleaved(&fam, &FairSchedule::round_robin()).unwrap();
        match fam.decode(t.terminal()).unwrap() {
            Answer::Closure(m) => m,
            other => panic!("unexpected answer {other:?}"),
        }
    }

    #[test]
    fn path_gains_the_shortcut() {
        let m = closure_of(&Digraph::unweighted(3, &[(0, 1), (1, 2)]).unwrap());
        assert!(m[0][2]);
        assert!(!m[2][0]);
    }

    #[test]
    fn empty_graph_gives_identity() {
        let m = closure_of(&Digraph::unweighted(3, &[]).unwrap());
        for (a, row) in m.iter().enumerate() {
            for (b, &x) in row.iter().enumerate() {
                assert_eq!(x, a == b);
            }
        }
    }

    #[test]
    fn complete_graph_gives_all_ones() {
        let pairs: Vec<_> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        let m = closure_of(&Digraph::unweighted(3, &pairs).unwrap());
        assert!(m.iter().flatten().all(|&x| x));
    }

    #[test]
    fn exhaustive_audit_is_clean_for_two_vertices() {
        let fam = transitive_closure_family(&Digraph::unweighted(2, &[(0, 1)]).unwrap()).unwrap();
        let report = audit_family(&fam, 1, 0);
        assert!(report.exhaustive);
        assert!(report.is_clean(), "{:?}", report.violations);
    }
}
