use crate::answer::Answer;
use crate::error::{Error, Result};
use crate::family::{FunctionFamily, ReadSet, UpdateFunction, Write};
use crate::lattice::{Bounds, FieldSpec, StateVector};

use super::SubsidyInstance;

/// Envy-eliminating subsidies. `G[i]` is agent `i`'s payment, bounded by
/// `n * delta`. `f_i` raises it by agent `i`'s largest envy
/// `v_i(X_j) + G[j] - (v_i(X_i) + G[i])`, saturating at the cap.
pub fn subsidy_family(inst: &SubsidyInstance) -> Result<FunctionFamily> {
    inst.validate()?;
    if !inst.is_envy_freeable() {
        return Err(Error::NotEnvyFreeable);
    }
    let n = inst.n();
    let cap = inst.cap();
    let bounds = Bounds::uniform(n, vec![FieldSpec::ascending("payment", cap)])?;
    let functions = (0..n)
        .map(|i| {
            let v = inst.valuations[i].clone();
            UpdateFunction::local(i, i, ReadSet::All, move |view| {
                let own = v[i] + view.scalar(i);
                let envy = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| (v[j] + view.scalar(j)).saturating_sub(own))
                    .max()
                    .unwrap_or(0);
                if envy == 0 {
                    vec![]
                } else {
                    vec![Write::scalar(i, (view.scalar(i) + envy).min(cap))]
                }
            })
        })
        .collect();
    let family = FunctionFamily::new("subsidy", bounds, functions, StateVector::from_scalars(&vec![0; n]))?;
    Ok(family.with_decoder(|s| Ok(Answer::Payments(s.scalars()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::audit_family;
    use crate::engine::interleaved::{run_interleaved, FairSchedule};

    fn pay(v: Vec<Vec<u64>>) -> Answer {
        let fam = subsidy_family(&SubsidyInstance::new(v).unwrap()).unwrap();
        let t = run_interleaved(&fam, &FairSchedule::round_robin()).unwrap();
        assert!(t.converged());
        fam.decode(t.terminal()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(pay(vec![vec![1, 3], vec![0, 2]]), Answer::Payments(vec![2, 0]));
        assert_eq!(
            pay(vec![vec![4, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]),
            Answer::Payments(vec![0, 0, 0])
        );
        assert_eq!(pay(vec![vec![5, 2], vec![2, 5]]), Answer::Payments(vec![0, 0]));
    }

    #[test]
    fn positive_envy_cycle_is_rejected() {
        let inst = SubsidyInstance::new(vec![vec![0, 2], vec![2, 0]]).unwrap();
        assert_eq!(subsidy_family(&inst).unwrap_err(), Error::NotEnvyFreeable);
    }

    #[test]
    fn exhaustive_audit_is_clean() {
        let fam =
            subsidy_family(&SubsidyInstance::new(vec![vec![1, 3, 0], vec![0, 2, 1], vec![0, 1, 2]]).unwrap()).unwrap();
        let report = audit_family(&fam, 1, 0);
        assert!(report.exhaustive);
        assert!(report.is_clean(), "{:?}", report.violations.first());
    }
}
