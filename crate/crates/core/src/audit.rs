//! Spot checks of the properties a family declares.
//!
//! The engines trust `Properties`; this module looks for counterexamples.
//! Lattices with at most [`EXHAUSTIVE_LIMIT`] elements are checked
//! exhaustively: inflationarity and locality at every state, monotonicity on
//! every covering pair (which implies it on every comparable pair of a
//! product of chains). Families with a reachable-state domain are checked on
//! all comparable pairs inside the domain instead, since a domain need not
//! be closed under covers. Larger lattices are sampled.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::family::{check_write, FunctionFamily, Protocol};
use crate::lattice::{StateVector, Tuple};

pub const EXHAUSTIVE_LIMIT: u128 = 1 << 16;

/// Cap on recorded violations per kind; totals are still counted.
const RECORD_LIMIT: usize = 32;

/// Largest domain enumerated pairwise.
const DOMAIN_PAIR_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    Inflationary,
    Monotone,
    Locality,
    Bounds,
    /// A function maps a domain state outside the domain.
    DomainClosure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub function: usize,
    pub state: StateVector,
    /// The larger state of a monotonicity pair.
    pub other: Option<StateVector>,
}

#[derive(Debug, Clone, Default)]
pub struct AuditReport {
    pub exhaustive: bool,
    pub states_checked: u64,
    pub pairs_checked: u64,
    pub violations: Vec<Violation>,
    counts: [u64; 5],
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn count(&self, kind: ViolationKind) -> u64 {
        self.counts[kind as usize]
    }

    fn record(&mut self, v: Violation) {
        let k = v.kind as usize;
        if (self.counts[k] as usize) < RECORD_LIMIT {
            self.violations.push(v);
        }
        self.counts[k] += 1;
    }

    pub fn first(&self, kind: ViolationKind) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == kind)
    }
}

/// Final values of the coordinates touched by `f_i(g)`, or the kind of
/// contract breach.
fn effect(family: &FunctionFamily, i: usize, g: &StateVector) -> Result<Vec<(usize, Tuple)>, ViolationKind> {
    let f = &family.functions[i];
    let mut touched: Vec<(usize, Tuple)> = Vec::new();
    for w in f.evaluate(g) {
        match check_write(&family.bounds, f, &w) {
            Ok(()) => {}
            Err(Error::ContractViolation { .. }) => return Err(ViolationKind::Locality),
            Err(_) => return Err(ViolationKind::Bounds),
        }
        let current = touched
            .iter()
            .rev()
            .find(|(c, _)| *c == w.coord)
            .map(|(_, t)| &t[..])
            .unwrap_or(g.get(w.coord));
        if let Protocol::Cas { field, expected } = w.protocol {
            if current.get(field) != Some(&expected) {
                break;
            }
        }
        touched.retain(|(c, _)| *c != w.coord);
        touched.push((w.coord, w.value));
    }
    Ok(touched)
}

fn value_after<'a>(g: &'a StateVector, eff: &'a [(usize, Tuple)], coord: usize) -> &'a [u64] {
    eff.iter()
        .find(|(c, _)| *c == coord)
        .map(|(_, t)| &t[..])
        .unwrap_or(g.get(coord))
}

fn materialize(g: &StateVector, eff: &[(usize, Tuple)]) -> StateVector {
    let mut out = g.clone();
    for (c, t) in eff {
        out.set(*c, t.clone());
    }
    out
}

struct Auditor<'a> {
    family: &'a FunctionFamily,
    report: AuditReport,
}

impl Auditor<'_> {
    /// Checks every single-state property at `g` and returns the effects of
    /// the functions that behaved.
    fn check_state(&mut self, g: &StateVector) -> Vec<Option<Vec<(usize, Tuple)>>> {
        self.report.states_checked += 1;
        let fam = self.family;
        let mut out = Vec::with_capacity(fam.len());
        for (i, f) in fam.functions.iter().enumerate() {
            let eff = match effect(fam, i, g) {
                Ok(e) => e,
                Err(kind) => {
                    self.report.record(Violation {
                        kind,
                        function: i,
                        state: g.clone(),
                        other: None,
                    });
                    out.push(None);
                    continue;
                }
            };
            if f.properties.i_local && eff.iter().any(|(c, _)| Some(*c) != f.home()) {
                self.report.record(Violation {
                    kind: ViolationKind::Locality,
                    function: i,
                    state: g.clone(),
                    other: None,
                });
            }
            if f.properties.inflationary && eff.iter().any(|(c, t)| !fam.bounds.coord_le(*c, g.get(*c), t)) {
                self.report.record(Violation {
                    kind: ViolationKind::Inflationary,
                    function: i,
                    state: g.clone(),
                    other: None,
                });
            }
            if fam.has_domain() && !fam.in_domain(&materialize(g, &eff)) {
                self.report.record(Violation {
                    kind: ViolationKind::DomainClosure,
                    function: i,
                    state: g.clone(),
                    other: None,
                });
            }
            out.push(Some(eff));
        }
        out
    }

    /// Checks `f(g) <= f(h)` for every monotone-declared function; `g <= h`.
    fn check_pair(&mut self, g: &StateVector, g_eff: &[Option<Vec<(usize, Tuple)>>], h: &StateVector) {
        self.report.pairs_checked += 1;
        let fam = self.family;
        for (i, f) in fam.functions.iter().enumerate() {
            if !f.properties.monotone {
                continue;
            }
            let Some(ge) = &g_eff[i] else { continue };
            let Ok(he) = effect(fam, i, h) else { continue };
            let coords: BTreeSet<usize> = ge.iter().chain(he.iter()).map(|(c, _)| *c).collect();
            let ok = coords
                .into_iter()
                .all(|c| fam.bounds.coord_le(c, value_after(g, ge, c), value_after(h, &he, c)));
            if !ok {
                self.report.record(Violation {
                    kind: ViolationKind::Monotone,
                    function: i,
                    state: g.clone(),
                    other: Some(h.clone()),
                });
            }
        }
    }
}

/// Audits the declared properties of `family`. Violations are report
/// entries, never errors.
pub fn audit_family(family: &FunctionFamily, sample_budget: usize, seed: u64) -> AuditReport {
    let budget = sample_budget.max(1);
    let mut a = Auditor {
        family,
        report: AuditReport::default(),
    };
    let exhaustive = family.bounds.size().is_some_and(|s| s <= EXHAUSTIVE_LIMIT);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    if exhaustive && !family.has_domain() {
        a.report.exhaustive = true;
        for g in family.bounds.states() {
            let eff = a.check_state(&g);
            for h in family.bounds.covers(&g) {
                a.check_pair(&g, &eff, &h);
            }
        }
        return a.report;
    }

    if exhaustive {
        let domain: Vec<StateVector> = family.bounds.states().filter(|s| family.in_domain(s)).collect();
        if domain.len() <= DOMAIN_PAIR_LIMIT {
            a.report.exhaustive = true;
            for g in &domain {
                let eff = a.check_state(g);
                for h in &domain {
                    if h != g && family.bounds.le(g, h) {
                        a.check_pair(g, &eff, h);
                    }
                }
            }
            return a.report;
        }
    }

    for _ in 0..budget {
        let (g, h) = if family.has_domain() {
            reachable_pair(family, &mut rng)
        } else {
            uniform_pair(family, &mut rng)
        };
        let eff = a.check_state(&g);
        a.check_pair(&g, &eff, &h);
        if !family.has_domain() {
            if let Some(c) = pick(&family.bounds.covers(&g), &mut rng) {
                a.check_pair(&g, &eff, &c);
            }
        }
    }
    a.report
}

fn pick<T: Clone>(items: &[T], rng: &mut ChaCha8Rng) -> Option<T> {
    if items.is_empty() {
        None
    } else {
        Some(items[rng.gen_range(0..items.len())].clone())
    }
}

/// Uniform `g`, and `h >= g` obtained by raising random fields.
fn uniform_pair(family: &FunctionFamily, rng: &mut ChaCha8Rng) -> (StateVector, StateVector) {
    let b = &family.bounds;
    let mut g = Vec::with_capacity(b.len());
    let mut h = Vec::with_capacity(b.len());
    for c in 0..b.len() {
        let mut gt = Tuple::new();
        let mut ht = Tuple::new();
        for spec in b.fields(c) {
            let r = rng.gen_range(0..=spec.max);
            let raised = if rng.gen_bool(0.3) {
                rng.gen_range(r..=spec.max)
            } else {
                r
            };
            gt.push(spec.from_rank(r));
            ht.push(spec.from_rank(raised));
        }
        g.push(gt);
        h.push(ht);
    }
    (StateVector::new(g), StateVector::new(h))
}

/// Two states on one random execution path from the initial state.
fn reachable_pair(family: &FunctionFamily, rng: &mut ChaCha8Rng) -> (StateVector, StateVector) {
    let walk = |mut s: StateVector, steps: usize, rng: &mut ChaCha8Rng| {
        if family.is_empty() {
            return s;
        }
        for _ in 0..steps {
            let i = rng.gen_range(0..family.len());
            if let Ok(next) = family.apply(i, &s) {
                s = next;
            }
        }
        s
    };
    let span = 4 * family.len().max(1);
    let g = walk(family.initial.clone(), rng.gen_range(0..span), rng);
    let h = walk(g.clone(), rng.gen_range(0..span), rng);
    (g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{ReadSet, UpdateFunction, Write};
    use crate::lattice::{Bounds, FieldSpec};

    fn chain_family(name: &str, tables: Vec<Vec<u64>>, max: u64) -> FunctionFamily {
        let bounds = Bounds::uniform(1, vec![FieldSpec::ascending("x", max)]).unwrap();
        let fs = tables
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                UpdateFunction::local(i, 0, ReadSet::All, move |v| {
                    vec![Write::scalar(0, t[v.scalar(0) as usize])]
                })
            })
            .collect();
        FunctionFamily::new(name, bounds, fs, StateVector::from_scalars(&[0])).unwrap()
    }

    #[test]
    fn non_monotone_table_is_flagged_at_zero_one() {
        let fam = chain_family("nonmono", vec![vec![2, 1, 2], vec![1, 1, 2]], 2);
        let r = audit_family(&fam, 10, 0);
        assert!(r.exhaustive);
        assert_eq!(r.count(ViolationKind::Monotone), 1);
        let v = r.first(ViolationKind::Monotone).unwrap();
        assert_eq!(v.function, 0);
        assert_eq!(v.state, StateVector::from_scalars(&[0]));
        assert_eq!(v.other, Some(StateVector::from_scalars(&[1])));
        assert_eq!(r.count(ViolationKind::Inflationary), 0);
    }

    #[test]
    fn non_inflationary_constant_is_flagged_at_one() {
        let fam = chain_family("noninfl", vec![vec![0, 0], vec![1, 1]], 1);
        let r = audit_family(&fam, 10, 0);
        assert_eq!(r.count(ViolationKind::Inflationary), 1);
        let v = r.first(ViolationKind::Inflationary).unwrap();
        assert_eq!((v.function, v.state.scalar(0)), (0, 1));
        assert_eq!(r.count(ViolationKind::Monotone), 0);
    }

    #[test]
    fn foreign_write_is_a_locality_violation() {
        let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("x", 1)]).unwrap();
        let f = UpdateFunction::local(0, 0, ReadSet::All, |_| vec![Write::scalar(1, 1)]);
        let fam = FunctionFamily::new("foreign", bounds, vec![f], StateVector::from_scalars(&[0, 0])).unwrap();
        let r = audit_family(&fam, 10, 0);
        assert!(r.count(ViolationKind::Locality) > 0);
    }

    #[test]
    fn sampled_mode_runs_on_large_lattices() {
        let bounds = Bounds::uniform(8, vec![FieldSpec::ascending("x", 100)]).unwrap();
        let fs = (0..8)
            .map(|i| {
                UpdateFunction::local(i, i, ReadSet::All, move |v| {
                    let m = (0..8).map(|j| v.scalar(j)).max().unwrap();
                    if m > v.scalar(i) {
                        vec![Write::scalar(i, m)]
                    } else {
                        vec![]
                    }
                })
            })
            .collect();
        let fam = FunctionFamily::new("max", bounds, fs, StateVector::from_scalars(&[0; 8])).unwrap();
        let r = audit_family(&fam, 200, 7);
        assert!(!r.exhaustive);
        assert_eq!(r.states_checked, 200);
        assert!(r.is_clean());
    }
}
