//! Update functions and the families the engines run.

use std::fmt;
use std::sync::Arc;

use crate::answer::Answer;
use crate::error::{Error, Result};
use crate::lattice::{ascending_image, flip_state, flip_tuple, Bounds, Orientation, StateVector, Tuple};

/// Read access to a (possibly partial or stale) observation of the state.
pub trait StateView {
    fn len(&self) -> usize;

    fn read(&self, coord: usize) -> Tuple;

    fn scalar(&self, coord: usize) -> u64 {
        self.read(coord)[0]
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl StateView for StateVector {
    fn len(&self) -> usize {
        StateVector::len(self)
    }

    fn read(&self, coord: usize) -> Tuple {
        Tuple::from_slice(self.get(coord))
    }

    fn scalar(&self, coord: usize) -> u64 {
        StateVector::scalar(self, coord)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    Plain,
    /// Applies only if `field` of the coordinate still equals `expected`.
    Cas {
        field: usize,
        expected: u64,
    },
}

/// One intended write produced by an update function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Write {
    pub coord: usize,
    pub value: Tuple,
    pub protocol: Protocol,
}

impl Write {
    pub fn plain(coord: usize, value: Tuple) -> Self {
        Write {
            coord,
            value,
            protocol: Protocol::Plain,
        }
    }

    pub fn scalar(coord: usize, value: u64) -> Self {
        Write::plain(coord, smallvec::smallvec![value])
    }

    pub fn cas(coord: usize, value: Tuple, field: usize, expected: u64) -> Self {
        Write {
            coord,
            value,
            protocol: Protocol::Cas { field, expected },
        }
    }
}

/// Properties a function claims; engines trust them, `audit_family` checks them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Properties {
    pub monotone: bool,
    pub inflationary: bool,
    pub i_local: bool,
}

impl Properties {
    pub const LOCAL: Properties = Properties {
        monotone: true,
        inflationary: true,
        i_local: true,
    };

    pub const SHARED: Properties = Properties {
        monotone: true,
        inflationary: true,
        i_local: false,
    };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadSet {
    All,
    Coords(Vec<usize>),
}

impl ReadSet {
    pub fn contains(&self, coord: usize) -> bool {
        match self {
            ReadSet::All => true,
            ReadSet::Coords(c) => c.contains(&coord),
        }
    }
}

type Rule = Arc<dyn Fn(&dyn StateView) -> Vec<Write> + Send + Sync>;
type Decoder = Arc<dyn Fn(&StateVector) -> Result<Answer> + Send + Sync>;
type Predicate = Arc<dyn Fn(&StateVector) -> bool + Send + Sync>;

/// One `f_i`: a deterministic map from an observed state to intended writes.
#[derive(Clone)]
pub struct UpdateFunction {
    pub id: usize,
    pub read_set: ReadSet,
    pub write_set: Vec<usize>,
    pub properties: Properties,
    rule: Rule,
}

impl fmt::Debug for UpdateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UpdateFunction")
            .field("id", &self.id)
            .field("read_set", &self.read_set)
            .field("write_set", &self.write_set)
            .field("properties", &self.properties)
            .finish_non_exhaustive()
    }
}

impl UpdateFunction {
    pub fn new<F>(id: usize, read_set: ReadSet, write_set: Vec<usize>, properties: Properties, rule: F) -> Self
    where
        F: Fn(&dyn StateView) -> Vec<Write> + Send + Sync + 'static,
    {
        UpdateFunction {
            id,
            read_set,
            write_set,
            properties,
            rule: Arc::new(rule),
        }
    }

    /// A monotone, inflationary function writing only `coord`.
    pub fn local<F>(id: usize, coord: usize, read_set: ReadSet, rule: F) -> Self
    where
        F: Fn(&dyn StateView) -> Vec<Write> + Send + Sync + 'static,
    {
        UpdateFunction::new(id, read_set, vec![coord], Properties::LOCAL, rule)
    }

    pub fn evaluate(&self, view: &dyn StateView) -> Vec<Write> {
        (self.rule)(view)
    }

    /// The single coordinate an i-local function owns.
    pub fn home(&self) -> Option<usize> {
        match (self.properties.i_local, self.write_set.as_slice()) {
            (true, [c]) => Some(*c),
            _ => None,
        }
    }

    pub fn with_properties(mut self, properties: Properties) -> Self {
        self.properties = properties;
        self
    }
}

/// A lattice, a family of update functions over it, a start state and a
/// decoder from terminal states to problem answers.
#[derive(Clone)]
pub struct FunctionFamily {
    pub name: String,
    pub bounds: Bounds,
    pub functions: Vec<UpdateFunction>,
    pub initial: StateVector,
    decoder: Decoder,
    domain: Option<Predicate>,
}

impl fmt::Debug for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionFamily")
            .field("name", &self.name)
            .field("coords", &self.bounds.len())
            .field("functions", &self.functions.len())
            .field("initial", &self.initial)
            .finish_non_exhaustive()
    }
}

impl FunctionFamily {
    pub fn new(name: &str, bounds: Bounds, functions: Vec<UpdateFunction>, initial: StateVector) -> Result<Self> {
        bounds.check(&initial)?;
        for (idx, f) in functions.iter().enumerate() {
            if f.id != idx {
                return Err(Error::InvalidInstance(format!(
                    "function at position {idx} has id {}",
                    f.id
                )));
            }
            if let Some(&c) = f.write_set.iter().find(|&&c| c >= bounds.len()) {
                return Err(Error::ContractViolation {
                    function: idx,
                    coord: c,
                });
            }
            if f.properties.i_local && f.write_set.len() != 1 {
                return Err(Error::LocalityViolation {
                    function: idx,
                    reason: "an i-local function must write exactly one coordinate".into(),
                });
            }
        }
        Ok(FunctionFamily {
            name: name.to_string(),
            bounds,
            functions,
            initial,
            decoder: Arc::new(|s| Ok(Answer::State(s.clone()))),
            domain: None,
        })
    }

    pub fn with_decoder<F>(mut self, decoder: F) -> Self
    where
        F: Fn(&StateVector) -> Result<Answer> + Send + Sync + 'static,
    {
        self.decoder = Arc::new(decoder);
        self
    }

    /// Restricts auditing to states satisfying a reachable-state invariant.
    pub fn with_domain<F>(mut self, pred: F) -> Self
    where
        F: Fn(&StateVector) -> bool + Send + Sync + 'static,
    {
        self.domain = Some(Arc::new(pred));
        self
    }

    pub fn with_initial(mut self, initial: StateVector) -> Result<Self> {
        self.bounds.check(&initial)?;
        self.initial = initial;
        Ok(self)
    }

    pub fn decode(&self, state: &StateVector) -> Result<Answer> {
        (self.decoder)(state)
    }

    pub fn has_domain(&self) -> bool {
        self.domain.is_some()
    }

    pub fn in_domain(&self, state: &StateVector) -> bool {
        self.domain.as_ref().is_none_or(|p| p(state))
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Atomic application `f_i(G)`.
    pub fn apply(&self, i: usize, state: &StateVector) -> Result<StateVector> {
        let f = &self.functions[i];
        let writes = f.evaluate(state);
        let mut next = state.clone();
        apply_atomically(&self.bounds, f, &writes, &mut next)?;
        Ok(next)
    }

    /// True when function `i` is owned by coordinate `i` for every `i`.
    pub fn is_local_family(&self) -> bool {
        self.functions.len() == self.bounds.len() && self.functions.iter().all(|f| f.home() == Some(f.id))
    }
}

/// Applies `writes` in order to `state`. A failed CAS drops the remaining
/// writes of the same evaluation. Returns whether every CAS succeeded.
pub(crate) fn apply_atomically(
    bounds: &Bounds,
    f: &UpdateFunction,
    writes: &[Write],
    state: &mut StateVector,
) -> Result<bool> {
    for w in writes {
        check_write(bounds, f, w)?;
        if let Protocol::Cas { field, expected } = w.protocol {
            if state.get(w.coord).get(field) != Some(&expected) {
                return Ok(false);
            }
        }
        state.set(w.coord, w.value.clone());
    }
    Ok(true)
}

pub(crate) fn check_write(bounds: &Bounds, f: &UpdateFunction, w: &Write) -> Result<()> {
    if !f.write_set.contains(&w.coord) {
        return Err(Error::ContractViolation {
            function: f.id,
            coord: w.coord,
        });
    }
    bounds.check_tuple(w.coord, &w.value)
}

/// True iff every function leaves `state` unchanged.
pub fn is_common_fixed_point(state: &StateVector, family: &FunctionFamily) -> bool {
    family.functions.iter().all(|f| fixes(f, state))
}

pub(crate) fn fixes(f: &UpdateFunction, state: &StateVector) -> bool {
    let writes = f.evaluate(state);
    let mut scratch: Option<StateVector> = None;
    for w in &writes {
        let current = scratch.as_ref().unwrap_or(state);
        if let Protocol::Cas { field, expected } = w.protocol {
            if current.get(w.coord).get(field) != Some(&expected) {
                break;
            }
        }
        if current.get(w.coord) != &w.value[..] {
            return false;
        }
        if writes.len() > 1 {
            scratch
                .get_or_insert_with(|| state.clone())
                .set(w.coord, w.value.clone());
        }
    }
    true
}

struct FlippedView<'a> {
    inner: &'a dyn StateView,
    bounds: &'a Bounds,
}

impl StateView for FlippedView<'_> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn read(&self, coord: usize) -> Tuple {
        flip_tuple(self.bounds.fields(coord), &self.inner.read(coord))
    }
}

/// The family on the all-ascending image lattice: each descending field is
/// replaced by `max - v`, so deflationary functions become inflationary ones
/// and greatest fixed points become least ones.
pub fn dualize(family: &FunctionFamily) -> FunctionFamily {
    let original = family.bounds.clone();
    let functions = family
        .functions
        .iter()
        .map(|f| {
            let inner = f.clone();
            let b = original.clone();
            let rule = move |view: &dyn StateView| {
                let flipped = FlippedView {
                    inner: view,
                    bounds: &b,
                };
                inner
                    .evaluate(&flipped)
                    .into_iter()
                    .map(|w| {
                        let fields = b.fields(w.coord);
                        let value = flip_tuple(fields, &w.value);
                        let protocol = match w.protocol {
                            Protocol::Cas { field, expected } => {
                                let spec = &fields[field];
                                let expected = match spec.orientation {
                                    Orientation::Ascending => expected,
                                    Orientation::Descending => spec.max - expected,
                                };
                                Protocol::Cas { field, expected }
                            }
                            p => p,
                        };
                        Write {
                            coord: w.coord,
                            value,
                            protocol,
                        }
                    })
                    .collect()
            };
            UpdateFunction {
                id: f.id,
                read_set: f.read_set.clone(),
                write_set: f.write_set.clone(),
                properties: f.properties,
                rule: Arc::new(rule),
            }
        })
        .collect();
    let decoder = family.decoder.clone();
    let b = original.clone();
    let domain = family.domain.clone().map(|p| {
        let b = original.clone();
        Arc::new(move |s: &StateVector| p(&flip_state(&b, s))) as Predicate
    });
    FunctionFamily {
        name: format!("{} (dual)", family.name),
        bounds: ascending_image(&original),
        functions,
        initial: flip_state(&original, &family.initial),
        decoder: Arc::new(move |s| decoder(&flip_state(&b, s))),
        domain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FieldSpec;

    /// `f_1 = (1, x2)`, `f_2 = (x1, 1)` on `{0,1}^2`.
    fn two_bits() -> FunctionFamily {
        let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("bit", 1)]).unwrap();
        let fs = (0..2)
            .map(|i| UpdateFunction::local(i, i, ReadSet::Coords(vec![i]), move |_| vec![Write::scalar(i, 1)]))
            .collect();
        FunctionFamily::new("two-bits", bounds, fs, StateVector::from_scalars(&[0, 0])).unwrap()
    }

    #[test]
    fn common_fixed_point_examples() {
        let fam = two_bits();
        assert!(!is_common_fixed_point(&StateVector::from_scalars(&[0, 0]), &fam));
        assert!(!is_common_fixed_point(&StateVector::from_scalars(&[1, 0]), &fam));
        assert!(is_common_fixed_point(&StateVector::from_scalars(&[1, 1]), &fam));
        assert_eq!(
            fam.apply(0, &StateVector::from_scalars(&[0, 0])).unwrap(),
            StateVector::from_scalars(&[1, 0])
        );
    }

    #[test]
    fn write_outside_write_set_is_rejected() {
        let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("bit", 1)]).unwrap();
        let f = UpdateFunction::local(0, 0, ReadSet::All, |_| vec![Write::scalar(1, 1)]);
        let fam = FunctionFamily::new("bad", bounds, vec![f], StateVector::from_scalars(&[0, 0])).unwrap();
        assert_eq!(
            fam.apply(0, &fam.initial).unwrap_err(),
            Error::ContractViolation { function: 0, coord: 1 }
        );
    }

    #[test]
    fn failed_cas_drops_later_writes() {
        let bounds = Bounds::uniform(2, vec![FieldSpec::ascending("x", 3)]).unwrap();
        let f = UpdateFunction::new(0, ReadSet::All, vec![0, 1], Properties::SHARED, |_| {
            vec![Write::cas(0, smallvec::smallvec![2], 0, 1), Write::scalar(1, 3)]
        });
        let fam = FunctionFamily::new("cas", bounds, vec![f], StateVector::from_scalars(&[0, 0])).unwrap();
        assert_eq!(fam.apply(0, &fam.initial).unwrap(), fam.initial);
        let s = StateVector::from_scalars(&[1, 0]);
        assert_eq!(fam.apply(0, &s).unwrap(), StateVector::from_scalars(&[2, 3]));
    }

    #[test]
    fn zero_function_family_is_fixed_everywhere() {
        let bounds = Bounds::uniform(1, vec![FieldSpec::ascending("x", 3)]).unwrap();
        let fam = FunctionFamily::new("empty", bounds, vec![], StateVector::from_scalars(&[2])).unwrap();
        assert!(is_common_fixed_point(&fam.initial, &fam));
    }

    #[test]
    fn dual_of_descending_min_is_ascending() {
        let bounds = Bounds::uniform(1, vec![FieldSpec::descending("d", 9)]).unwrap();
        let f = UpdateFunction::local(0, 0, ReadSet::All, |v| {
            let x = v.scalar(0);
            if x > 4 {
                vec![Write::scalar(0, 4)]
            } else {
                vec![]
            }
        });
        let fam = FunctionFamily::new("min4", bounds, vec![f], StateVector::from_scalars(&[9])).unwrap();
        let dual = dualize(&fam);
        assert_eq!(dual.initial, StateVector::from_scalars(&[0]));
        assert_eq!(dual.apply(0, &dual.initial).unwrap(), StateVector::from_scalars(&[5]));
        assert_eq!(
            dual.decode(&StateVector::from_scalars(&[5])).unwrap(),
            Answer::State(StateVector::from_scalars(&[4]))
        );
    }
}
