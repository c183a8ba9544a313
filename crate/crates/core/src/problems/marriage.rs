use crate::answer::Answer;
use crate::error::{Error, Result};
use crate::family::{FunctionFamily, ReadSet, UpdateFunction, Write};
use crate::lattice::{Bounds, FieldSpec, StateVector};

use super::PreferenceProfile;

/// Man-proposing stable marriage. `G[i]` is man `i`'s proposal position:
/// 0 before his first proposal, `k` while proposing to his `k`-th choice,
/// `n + 1` once every woman has rejected him.
///
/// Man `i` moves on when some man `j` she prefers has already proposed to his
/// current woman `w`, which on positions reads `G[j] >= pos_j(w)`. Checking
/// whether `j` is proposing to `w` *right now* would not be monotone: `j`
/// moving past `w` would release `i` again.
///
/// With `constrained = Some((m1, w1))`, man `m1` skips every woman other than
/// `w1`; the decoder answers [`Answer::Infeasible`] when any man runs off the
/// end of his list.
pub fn stable_marriage_family(p: &PreferenceProfile, constrained: Option<(usize, usize)>) -> Result<FunctionFamily> {
    p.validate()?;
    let n = p.n();
    if let Some((m1, w1)) = constrained {
        if m1 >= n || w1 >= n {
            return Err(Error::InvalidInstance(format!("constraint ({m1},{w1}) outside 0..{n}")));
        }
    }
    let rank = p.rank();
    // position[j][w]: 1-based position of woman w in man j's list
    let mut position = vec![vec![0u64; n]; n];
    for (j, list) in p.men_prefs.iter().enumerate() {
        for (k, &w) in list.iter().enumerate() {
            position[j][w] = k as u64 + 1;
        }
    }
    let top = n as u64 + 1;
    let bounds = Bounds::uniform(n, vec![FieldSpec::ascending("proposal", top)])?;
    let functions = (0..n)
        .map(|i| {
            let prefs = p.men_prefs[i].clone();
            let rank = rank.clone();
            let position = position.clone();
            UpdateFunction::local(i, i, ReadSet::All, move |v| {
                let g = v.scalar(i);
                if g == 0 {
                    return vec![Write::scalar(i, 1)];
                }
                if g > n as u64 {
                    return vec![];
                }
                let w = prefs[g as usize - 1];
                let skipped = matches!(constrained, Some((m1, w1)) if m1 == i && w != w1);
                let rejected =
                    skipped || (0..n).any(|j| j != i && rank[w][j] < rank[w][i] && v.scalar(j) >= position[j][w]);
                if rejected {
                    vec![Write::scalar(i, g + 1)]
                } else {
                    vec![]
                }
            })
        })
        .collect();
    let name = if constrained.is_some() {
        "stable-marriage-constrained"
    } else {
        "stable-marriage"
    };
    let family = FunctionFamily::new(name, bounds, functions, StateVector::from_scalars(&vec![0; n]))?;
    let prefs = p.men_prefs.clone();
    Ok(family.with_decoder(move |s| {
        let g = s.scalars();
        if g.contains(&top) {
            return Ok(Answer::Infeasible);
        }
        if g.contains(&0) {
            return Ok(Answer::State(s.clone()));
        }
        Ok(Answer::Matching(
            g.iter().enumerate().map(|(i, &x)| prefs[i][x as usize - 1]).collect(),
        ))
    }))
}
