//! Finite integer domains, valuations and the range machinery.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rat;

/// Dense index of a variable within a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VarId {
    fn from(i: usize) -> Self {
        VarId(i as u32)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A finite set of integers, kept strictly increasing.
///
/// An `IntSet` inside a live [`Domain`] is never empty; the empty set only
/// shows up transiently while a propagator decides it has failed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct IntSet {
    values: Vec<i64>,
}

impl IntSet {
    /// Builds a set from arbitrary values (sorted and deduplicated).
    pub fn from_values<I: IntoIterator<Item = i64>>(vals: I) -> IntSet {
        let mut values: Vec<i64> = vals.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        IntSet { values }
    }

    /// `[lo, hi]`; empty when `lo > hi`.
    pub fn range(lo: i64, hi: i64) -> IntSet {
        if lo > hi {
            return IntSet::default();
        }
        IntSet { values: (lo..=hi).collect() }
    }

    pub fn singleton(v: i64) -> IntSet {
        IntSet { values: vec![v] }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.values.last().copied()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn is_singleton(&self) -> bool {
        self.values.len() == 1
    }

    /// True iff the set is a contiguous run of integers.
    pub fn is_range(&self) -> bool {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => (hi as i128 - lo as i128 + 1) == self.values.len() as i128,
            _ => true,
        }
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.values.iter().all(|v| other.contains(*v))
    }

    /// Removes `v`; returns whether it was present.
    pub fn remove(&mut self, v: i64) -> bool {
        match self.values.binary_search(&v) {
            Ok(i) => {
                self.values.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    /// Keeps only values in `[lo, hi]`, returning the removed ones.
    pub fn restrict(&mut self, lo: i64, hi: i64) -> Vec<i64> {
        let (keep, gone): (Vec<i64>, Vec<i64>) = self.values.iter().partition(|&&v| lo <= v && v <= hi);
        self.values = keep;
        gone
    }

    pub fn retain<F: FnMut(i64) -> bool>(&mut self, mut f: F) {
        self.values.retain(|v| f(*v));
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        self.values.iter().copied()
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.len() > 1 && self.is_range() {
            return write!(f, "[{}..{}]", self.values[0], self.values[self.values.len() - 1]);
        }
        write!(f, "{{")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// A total map from the variables of a model to their current sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    sets: Vec<IntSet>,
}

impl Domain {
    pub fn new(sets: Vec<IntSet>) -> Domain {
        Domain { sets }
    }

    pub fn num_vars(&self) -> usize {
        self.sets.len()
    }

    pub fn get(&self, v: VarId) -> &IntSet {
        &self.sets[v.index()]
    }

    pub fn get_mut(&mut self, v: VarId) -> &mut IntSet {
        &mut self.sets[v.index()]
    }

    pub fn set(&mut self, v: VarId, s: IntSet) {
        self.sets[v.index()] = s;
    }

    pub fn sets(&self) -> &[IntSet] {
        &self.sets
    }

    pub fn covers(&self, v: VarId) -> bool {
        v.index() < self.sets.len()
    }

    /// `inf_D v`. Panics on an empty set, which a live domain never holds.
    pub fn inf(&self, v: VarId) -> i64 {
        self.get(v).min().expect("empty set in live domain")
    }

    /// `sup_D v`.
    pub fn sup(&self, v: VarId) -> i64 {
        self.get(v).max().expect("empty set in live domain")
    }

    pub fn has_empty(&self) -> bool {
        self.sets.iter().any(IntSet::is_empty)
    }

    pub fn all_fixed(&self) -> bool {
        self.sets.iter().all(IntSet::is_singleton)
    }

    /// Pointwise inclusion.
    pub fn is_subdomain_of(&self, other: &Domain) -> bool {
        self.sets.len() == other.sets.len() && self.sets.iter().zip(&other.sets).all(|(a, b)| a.is_subset(b))
    }

    pub fn size(&self) -> usize {
        self.sets.iter().map(IntSet::len).sum()
    }
}

/// The smallest range domain containing `d`.
pub fn range_of(d: &Domain) -> Domain {
    Domain {
        sets: d
            .sets
            .iter()
            .map(|s| match (s.min(), s.max()) {
                (Some(lo), Some(hi)) => IntSet::range(lo, hi),
                _ => IntSet::default(),
            })
            .collect(),
    }
}

/// True iff every set of `d` is contiguous.
pub fn is_range(d: &Domain) -> bool {
    d.sets.iter().all(IntSet::is_range)
}

/// A partial map from variables to exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Valuation {
    bindings: BTreeMap<VarId, Rat>,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn from_ints<I: IntoIterator<Item = (VarId, i64)>>(it: I) -> Valuation {
        Valuation { bindings: it.into_iter().map(|(v, x)| (v, Rat::from_int(x))).collect() }
    }

    pub fn from_rats<I: IntoIterator<Item = (VarId, Rat)>>(it: I) -> Valuation {
        Valuation { bindings: it.into_iter().collect() }
    }

    pub fn bind(&mut self, v: VarId, x: Rat) {
        self.bindings.insert(v, x);
    }

    pub fn get(&self, v: VarId) -> Option<Rat> {
        self.bindings.get(&v).copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.bindings.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, Rat)> + '_ {
        self.bindings.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.bindings.values().all(Rat::is_integer)
    }
}

/// `θ ∈ D`: every binding is an integer lying in its variable's set.
pub fn member(theta: &Valuation, d: &Domain) -> bool {
    theta.iter().all(|(v, x)| d.covers(v) && x.to_i64().is_some_and(|i| d.get(v).contains(i)))
}

/// `θ ∈_R D`: every binding lies within `[inf_D v, sup_D v]`.
pub fn member_box(theta: &Valuation, d: &Domain) -> bool {
    theta.iter().all(|(v, x)| {
        d.covers(v) && !d.get(v).is_empty() && Rat::from_int(d.inf(v)) <= x && x <= Rat::from_int(d.sup(v))
    })
}
