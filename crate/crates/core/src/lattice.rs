//! Finite product lattices of bounded naturals.
//!
//! Each coordinate holds a small tuple of fields. Every field has an upper
//! bound `max` and an [`Orientation`]: ascending fields progress upward from
//! 0, descending fields progress downward from `max`. All order questions
//! are asked in this *progress order*, so a family of deflationary functions
//! on descending fields is handled by the same engines as inflationary ones.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Field values of one coordinate.
pub type Tuple = SmallVec<[u64; 2]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub name: String,
    pub max: u64,
    pub orientation: Orientation,
}

impl FieldSpec {
    pub fn ascending(name: &str, max: u64) -> Self {
        FieldSpec {
            name: name.to_string(),
            max,
            orientation: Orientation::Ascending,
        }
    }

    pub fn descending(name: &str, max: u64) -> Self {
        FieldSpec {
            name: name.to_string(),
            max,
            orientation: Orientation::Descending,
        }
    }

    /// Lowest value in progress order.
    pub fn bottom(&self) -> u64 {
        match self.orientation {
            Orientation::Ascending => 0,
            Orientation::Descending => self.max,
        }
    }

    pub fn top(&self) -> u64 {
        match self.orientation {
            Orientation::Ascending => self.max,
            Orientation::Descending => 0,
        }
    }

    /// Position of `v` in progress order, counting from the bottom.
    pub fn rank(&self, v: u64) -> u64 {
        match self.orientation {
            Orientation::Ascending => v,
            Orientation::Descending => self.max - v,
        }
    }

    /// Inverse of [`FieldSpec::rank`].
    pub fn from_rank(&self, r: u64) -> u64 {
        match self.orientation {
            Orientation::Ascending => r,
            Orientation::Descending => self.max - r,
        }
    }

    fn compare(&self, a: u64, b: u64) -> OrderRelation {
        OrderRelation::from_ord(self.rank(a).cmp(&self.rank(b)))
    }
}

/// Relation of two states in progress order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderRelation {
    Lt,
    Gt,
    Eq,
    Incomparable,
}

impl OrderRelation {
    fn from_ord(o: std::cmp::Ordering) -> Self {
        match o {
            std::cmp::Ordering::Less => OrderRelation::Lt,
            std::cmp::Ordering::Greater => OrderRelation::Gt,
            std::cmp::Ordering::Equal => OrderRelation::Eq,
        }
    }

    fn combine(self, other: OrderRelation) -> OrderRelation {
        use OrderRelation::*;
        match (self, other) {
            (Eq, x) | (x, Eq) => x,
            (Lt, Lt) => Lt,
            (Gt, Gt) => Gt,
            _ => Incomparable,
        }
    }

    /// `a <= b` in progress order.
    pub fn is_le(self) -> bool {
        matches!(self, OrderRelation::Lt | OrderRelation::Eq)
    }
}

/// Field layout of every coordinate of a product lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    layouts: Vec<Arc<[FieldSpec]>>,
}

impl Bounds {
    /// `n` coordinates sharing one field layout.
    pub fn uniform(n: usize, fields: Vec<FieldSpec>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("lattice needs at least one coordinate".into()));
        }
        if fields.is_empty() {
            return Err(Error::InvalidInstance("coordinate layout has no fields".into()));
        }
        let shared: Arc<[FieldSpec]> = fields.into();
        Ok(Bounds {
            layouts: vec![shared; n],
        })
    }

    pub fn from_layouts(layouts: Vec<Vec<FieldSpec>>) -> Result<Self> {
        if layouts.is_empty() {
            return Err(Error::InvalidInstance("lattice needs at least one coordinate".into()));
        }
        let mut out: Vec<Arc<[FieldSpec]>> = Vec::with_capacity(layouts.len());
        for layout in layouts {
            if layout.is_empty() {
                return Err(Error::InvalidInstance("coordinate layout has no fields".into()));
            }
            // share identical consecutive layouts
            match out.last() {
                Some(prev) if prev[..] == layout[..] => out.push(prev.clone()),
                _ => out.push(layout.into()),
            }
        }
        Ok(Bounds { layouts: out })
    }

    pub fn len(&self) -> usize {
        self.layouts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layouts.is_empty()
    }

    pub fn fields(&self, coord: usize) -> &[FieldSpec] {
        &self.layouts[coord]
    }

    /// Length of the longest strict chain: the sum of every field bound.
    pub fn height(&self) -> u128 {
        self.layouts.iter().flat_map(|l| l.iter()).map(|f| f.max as u128).sum()
    }

    /// Number of lattice elements, or `None` when it overflows `u128`.
    pub fn size(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        for f in self.layouts.iter().flat_map(|l| l.iter()) {
            acc = acc.checked_mul(f.max as u128 + 1)?;
        }
        Some(acc)
    }

    pub fn check_tuple(&self, coord: usize, tuple: &[u64]) -> Result<()> {
        let fields = self.fields(coord);
        if fields.len() != tuple.len() {
            return Err(Error::FieldMismatch {
                coord,
                expected: fields.len(),
                found: tuple.len(),
            });
        }
        for (field, (spec, &value)) in fields.iter().zip(tuple).enumerate() {
            if value > spec.max {
                return Err(Error::OutOfBounds {
                    coord,
                    field,
                    value,
                    max: spec.max,
                });
            }
        }
        Ok(())
    }

    pub fn check(&self, state: &StateVector) -> Result<()> {
        if state.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: state.len(),
            });
        }
        for (coord, t) in state.iter().enumerate() {
            self.check_tuple(coord, t)?;
        }
        Ok(())
    }

    pub fn compare_coord(&self, coord: usize, a: &[u64], b: &[u64]) -> OrderRelation {
        self.fields(coord)
            .iter()
            .zip(a.iter().zip(b))
            .fold(OrderRelation::Eq, |acc, (spec, (&x, &y))| {
                acc.combine(spec.compare(x, y))
            })
    }

    /// Per-field progress-order maximum of two values of `coord`.
    pub fn join_coord(&self, coord: usize, a: &[u64], b: &[u64]) -> Tuple {
        self.fields(coord)
            .iter()
            .zip(a.iter().zip(b))
            .map(|(spec, (&x, &y))| if spec.rank(x) >= spec.rank(y) { x } else { y })
            .collect()
    }

    pub fn coord_le(&self, coord: usize, a: &[u64], b: &[u64]) -> bool {
        self.compare_coord(coord, a, b).is_le()
    }

    /// `a <= b` in progress order. Both states must match the layout.
    pub fn le(&self, a: &StateVector, b: &StateVector) -> bool {
        a.iter()
            .zip(b.iter())
            .enumerate()
            .all(|(c, (x, y))| self.coord_le(c, x, y))
    }

    /// Iterates every element of the lattice in mixed-radix order.
    pub fn states(&self) -> StateIter<'_> {
        let (bottom, _) = extremes(self);
        StateIter {
            bounds: self,
            next: Some(bottom),
        }
    }

    /// Every state covering `g`: one field moved one step up in progress order.
    pub fn covers(&self, g: &StateVector) -> Vec<StateVector> {
        let mut out = Vec::new();
        for (coord, t) in g.iter().enumerate() {
            for (field, spec) in self.fields(coord).iter().enumerate() {
                let r = spec.rank(t[field]);
                if r < spec.max {
                    let mut h = g.clone();
                    h.values[coord][field] = spec.from_rank(r + 1);
                    out.push(h);
                }
            }
        }
        out
    }
}

/// Lattice elements in mixed-radix progress order (bottom first).
pub struct StateIter<'a> {
    bounds: &'a Bounds,
    next: Option<StateVector>,
}

impl Iterator for StateIter<'_> {
    type Item = StateVector;

    fn next(&mut self) -> Option<StateVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        'outer: for coord in 0..succ.len() {
            for (field, spec) in self.bounds.fields(coord).iter().enumerate() {
                let r = spec.rank(succ.values[coord][field]);
                if r < spec.max {
                    succ.values[coord][field] = spec.from_rank(r + 1);
                    carried = false;
                    break 'outer;
                }
                succ.values[coord][field] = spec.bottom();
            }
        }
        if !carried {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// A global state: one tuple per coordinate.
///
/// `Ord` is lexicographic on raw values and exists only so states can live
/// in ordered collections; use [`Bounds::le`] or [`order_compare`] for the
/// lattice order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector {
    values: Vec<Tuple>,
}

impl StateVector {
    pub fn new(values: Vec<Tuple>) -> Self {
        StateVector { values }
    }

    /// One single-field coordinate per entry.
    pub fn from_scalars(values: &[u64]) -> Self {
        StateVector {
            values: values.iter().map(|&v| smallvec::smallvec![v]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, coord: usize) -> &[u64] {
        &self.values[coord]
    }

    /// First field of `coord`.
    pub fn scalar(&self, coord: usize) -> u64 {
        self.values[coord][0]
    }

    pub fn set(&mut self, coord: usize, value: Tuple) {
        self.values[coord] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.values.iter()
    }

    pub fn scalars(&self) -> Vec<u64> {
        self.values.iter().map(|t| t[0]).collect()
    }

    pub fn into_inner(self) -> Vec<Tuple> {
        self.values
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if t.len() == 1 {
                write!(f, "{}", t[0])?;
            } else {
                write!(f, "(")?;
                for (k, v) in t.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")?;
            }
        }
        write!(f, ")")
    }
}

/// Progress-order relation between `a` and `b`.
pub fn order_compare(a: &StateVector, b: &StateVector, bounds: &Bounds) -> Result<OrderRelation> {
    for s in [a, b] {
        if s.len() != bounds.len() {
            return Err(Error::DimensionMismatch {
                expected: bounds.len(),
                found: s.len(),
            });
        }
    }
    let mut acc = OrderRelation::Eq;
    for coord in 0..a.len() {
        if a.get(coord).len() != bounds.fields(coord).len() || b.get(coord).len() != bounds.fields(coord).len() {
            return Err(Error::FieldMismatch {
                coord,
                expected: bounds.fields(coord).len(),
                found: a.get(coord).len().min(b.get(coord).len()),
            });
        }
        acc = acc.combine(bounds.compare_coord(coord, a.get(coord), b.get(coord)));
        if acc == OrderRelation::Incomparable {
            break;
        }
    }
    Ok(acc)
}

/// Bottom and top of the lattice in progress order.
pub fn extremes(bounds: &Bounds) -> (StateVector, StateVector) {
    let mut bottom = Vec::with_capacity(bounds.len());
    let mut top = Vec::with_capacity(bounds.len());
    for coord in 0..bounds.len() {
        let fields = bounds.fields(coord);
        bottom.push(fields.iter().map(FieldSpec::bottom).collect());
        top.push(fields.iter().map(FieldSpec::top).collect());
    }
    (StateVector::new(bottom), StateVector::new(top))
}

/// Replaces every descending field by its ascending image `v -> max - v`.
/// Applying it twice is the identity.
pub fn flip_state(bounds: &Bounds, state: &StateVector) -> StateVector {
    StateVector::new(
        state
            .iter()
            .enumerate()
            .map(|(c, t)| flip_tuple(bounds.fields(c), t))
            .collect(),
    )
}

pub(crate) fn flip_tuple(fields: &[FieldSpec], t: &[u64]) -> Tuple {
    fields
        .iter()
        .zip(t)
        .map(|(spec, &v)| match spec.orientation {
            Orientation::Ascending => v,
            Orientation::Descending => spec.max - v,
        })
        .collect()
}

/// The all-ascending image of `bounds`.
pub fn ascending_image(bounds: &Bounds) -> Bounds {
    let layouts = (0..bounds.len())
        .map(|c| {
            bounds
                .fields(c)
                .iter()
                .map(|f| FieldSpec::ascending(&f.name, f.max))
                .collect()
        })
        .collect();
    Bounds::from_layouts(layouts).expect("image of a valid layout is valid")
}
