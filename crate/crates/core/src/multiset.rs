//! Finite multisets with arbitrary-precision multiplicities.
//!
//! Entries are kept in a `BTreeMap`, so iteration follows the element order
//! and printed output is deterministic. Zero multiplicities are never stored.

use std::collections::btree_map;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Multiset<T: Ord> {
    entries: BTreeMap<T, BigUint>,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset {
            entries: BTreeMap::new(),
        }
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: T) -> Self {
        let mut m = Self::new();
        m.insert(x);
        m
    }

    /// Adds one copy of `x`.
    pub fn insert(&mut self, x: T) {
        self.insert_many(x, BigUint::one());
    }

    /// Adds `count` copies of `x`; a zero count is a no-op.
    pub fn insert_many(&mut self, x: T, count: BigUint) {
        if count.is_zero() {
            return;
        }
        match self.entries.entry(x) {
            btree_map::Entry::Occupied(mut e) => *e.get_mut() += count,
            btree_map::Entry::Vacant(e) => {
                e.insert(count);
            }
        }
    }

    /// Stored multiplicity of `x`, zero when absent.
    pub fn multiplicity(&self, x: &T) -> BigUint {
        self.entries.get(x).cloned().unwrap_or_default()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.entries.contains_key(x)
    }

    /// Total number of elements counted with multiplicity (`#A`).
    pub fn cardinality(&self) -> BigUint {
        self.entries.values().sum()
    }

    /// Number of distinct elements.
    pub fn distinct_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, &BigUint)> {
        self.entries.iter()
    }

    pub fn elements(&self) -> impl Iterator<Item = &T> {
        self.entries.keys()
    }

    /// In-place `self ⊎ other`.
    pub fn absorb(&mut self, other: Multiset<T>) {
        for (x, m) in other.entries {
            self.insert_many(x, m);
        }
    }

    /// In-place `self ⊎ scale·other`.
    pub fn absorb_scaled(&mut self, other: &Multiset<T>, scale: &BigUint)
    where
        T: Clone,
    {
        for (x, m) in &other.entries {
            self.insert_many(x.clone(), m * scale);
        }
    }

    /// Keeps only the elements satisfying `keep`.
    pub fn filter(self, mut keep: impl FnMut(&T) -> bool) -> Self {
        Multiset {
            entries: self.entries.into_iter().filter(|(x, _)| keep(x)).collect(),
        }
    }

    /// Image of the multiset under `f`, aggregating multiplicities of collisions.
    pub fn map<U: Ord>(self, mut f: impl FnMut(T) -> U) -> Multiset<U> {
        let mut out = Multiset::new();
        for (x, m) in self.entries {
            out.insert_many(f(x), m);
        }
        out
    }
}

impl<T: Ord> IntoIterator for Multiset<T> {
    type Item = (T, BigUint);
    type IntoIter = btree_map::IntoIter<T, BigUint>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter()
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x);
        }
        m
    }
}

impl<T: Ord> FromIterator<(T, BigUint)> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = (T, BigUint)>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for (x, c) in iter {
            m.insert_many(x, c);
        }
        m
    }
}

impl<T: Ord + fmt::Debug> fmt::Debug for Multiset<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(k, v)| (k, v.to_string())))
            .finish()
    }
}

/// Multiset sum `A ⊎ B`: multiplicities add.
pub fn msum<T: Ord + Clone>(a: &Multiset<T>, b: &Multiset<T>) -> Multiset<T> {
    let mut out = a.clone();
    for (x, m) in b.iter() {
        out.insert_many(x.clone(), m.clone());
    }
    out
}

/// Multiset product `A × B`: the pair `(a, b)` has multiplicity `m_A(a)·m_B(b)`.
pub fn mprod<T: Ord + Clone, U: Ord + Clone>(a: &Multiset<T>, b: &Multiset<U>) -> Multiset<(T, U)> {
    let mut out = Multiset::new();
    for (x, mx) in a.iter() {
        for (y, my) in b.iter() {
            out.insert_many((x.clone(), y.clone()), mx * my);
        }
    }
    out
}

pub fn multiplicity<T: Ord>(a: &Multiset<T>, x: &T) -> BigUint {
    a.multiplicity(x)
}

/// Multiset inclusion: every multiplicity in `a` is bounded by the one in `b`.
pub fn msubset<T: Ord>(a: &Multiset<T>, b: &Multiset<T>) -> bool {
    a.iter().all(|(x, m)| match b.entries.get(x) {
        Some(mb) => m <= mb,
        None => false,
    })
}
