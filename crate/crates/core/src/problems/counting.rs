use crate::answer::Answer;
use crate::error::Result;
use crate::family::{FunctionFamily, Properties, ReadSet, UpdateFunction, Write};
use crate::lattice::{Bounds, FieldSpec, StateVector};

/// Counts entries of `a` greater than `c` with a shared counter.
///
/// Coordinates `0..m` are the `checked` bits and coordinate `m` is the sum.
/// `f_i` increments the sum with a compare-and-set and only then marks entry
/// `i` checked; a failed compare-and-set drops the mark, so the entry is
/// retried later. This writes two coordinates, so the family is not i-local
/// and the distributed engine refuses it.
///
/// The functions are monotone only on states where the sum equals the
/// number of checked entries above `c`. Every execution from the initial
/// state stays there, and the family declares it as its audit domain.
pub fn count_greater_family(a: &[i64], c: i64) -> Result<FunctionFamily> {
    let m = a.len();
    let mut layouts = vec![vec![FieldSpec::ascending("checked", 1)]; m];
    layouts.push(vec![FieldSpec::ascending("sum", m as u64)]);
    let bounds = Bounds::from_layouts(layouts)?;
    let functions = a
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = x > c;
            UpdateFunction::new(
                i,
                ReadSet::Coords(vec![i, m]),
                vec![i, m],
                Properties::SHARED,
                move |v| {
                    if v.scalar(i) == 1 {
                        return vec![];
                    }
                    if !above {
                        return vec![Write::scalar(i, 1)];
                    }
                    let temp = v.scalar(m);
                    vec![
                        Write::cas(m, smallvec::smallvec![temp + 1], 0, temp),
                        Write::scalar(i, 1),
                    ]
                },
            )
        })
        .collect();
    let family = FunctionFamily::new(
        "count-greater",
        bounds,
        functions,
        StateVector::from_scalars(&vec![0; m + 1]),
    )?;
    let above: Vec<bool> = a.iter().map(|&x| x > c).collect();
    Ok(family
        .with_decoder(move |s| Ok(Answer::Count(s.scalar(m))))
        .with_domain(move |s| {
            let counted = (0..m).filter(|&i| above[i] && s.scalar(i) == 1).count() as u64;
            s.scalar(m) == counted
        }))
}
