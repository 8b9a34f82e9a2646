//! The free vector space over a combinatorial basis, with exact rational
//! coefficients, and its tensor square.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{HopfError, Result};
use crate::multiset::Multiset;
use crate::rule::ObjectKey;

pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_natural(n: &BigUint) -> Rational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Serializes as `p/q`, omitting `/q` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || HopfError::parse_at(s, 0, format!("invalid rational `{s}`"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

fn insert_term<K: Ord>(terms: &mut BTreeMap<K, Rational>, key: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match terms.entry(key) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

fn write_terms<K>(
    f: &mut fmt::Formatter<'_>,
    terms: &BTreeMap<K, Rational>,
    mut show: impl FnMut(&K) -> String,
) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (i, (k, c)) in terms.iter().enumerate() {
        let negative = c < &Rational::zero();
        let abs = if negative { -c.clone() } else { c.clone() };
        match (i, negative) {
            (0, true) => f.write_str("-")?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        if !abs.is_one() {
            write!(f, "{abs} ")?;
        }
        f.write_str(&show(k))?;
    }
    Ok(())
}

/// Finite rational linear combination of basis objects.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Element {
    terms: BTreeMap<ObjectKey, Rational>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(key: ObjectKey) -> Self {
        Self::term(Rational::one(), key)
    }

    pub fn term(c: Rational, key: ObjectKey) -> Self {
        let mut e = Self::zero();
        e.add_term(key, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: ObjectKey, c: Rational) {
        insert_term(&mut self.terms, key, c);
    }

    pub fn coeff(&self, key: &ObjectKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ObjectKey, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rational::one());
        out
    }

    pub fn add_assign_scaled(&mut self, other: &Element, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            insert_term(&mut self.terms, k.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Each element contributes its multiplicity as coefficient.
    pub fn from_multiset(m: &Multiset<ObjectKey>) -> Element {
        let mut e = Element::zero();
        for (k, c) in m.iter() {
            e.add_term(k.clone(), from_natural(c));
        }
        e
    }

    /// Sum of all terms whose key satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&ObjectKey) -> bool) -> Element {
        Element {
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    pub fn display_with<'a, F: Fn(&ObjectKey) -> String + 'a>(&'a self, show: F) -> impl fmt::Display + 'a {
        DisplayElement { e: self, show }
    }
}

struct DisplayElement<'a, F> {
    e: &'a Element,
    show: F,
}

impl<F: Fn(&ObjectKey) -> String> fmt::Display for DisplayElement<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.e.terms, |k| (self.show)(k))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |k| format!("{k:?}"))
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        Element::add(self, rhs)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Rational::one())
    }
}

pub fn add(x: &Element, y: &Element) -> Element {
    x.add(y)
}

pub fn scale(c: &Rational, x: &Element) -> Element {
    x.scale(c)
}

pub fn from_multiset(m: &Multiset<ObjectKey>) -> Element {
    Element::from_multiset(m)
}

/// Finite rational linear combination of ordered pairs `a ⊗ b`.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct TensorElement {
    terms: BTreeMap<(ObjectKey, ObjectKey), Rational>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, left: ObjectKey, right: ObjectKey, c: Rational) {
        insert_term(&mut self.terms, (left, right), c);
    }

    pub fn coeff(&self, left: &ObjectKey, right: &ObjectKey) -> Rational {
        self.terms
            .get(&(left.clone(), right.clone()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(ObjectKey, ObjectKey), &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign_scaled(&mut self, other: &TensorElement, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            insert_term(&mut self.terms, k.clone(), v * c);
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.add_assign_scaled(other, &Rational::one());
        out
    }

    pub fn scale(&self, c: &Rational) -> TensorElement {
        let mut out = TensorElement::zero();
        out.add_assign_scaled(self, c);
        out
    }

    pub fn from_pairs(m: &Multiset<(ObjectKey, ObjectKey)>) -> TensorElement {
        let mut t = TensorElement::zero();
        for ((a, b), c) in m.iter() {
            t.add_term(a.clone(), b.clone(), from_natural(c));
        }
        t
    }

    /// Exchanges the two tensor factors.
    pub fn swap(&self) -> TensorElement {
        let mut t = TensorElement::zero();
        for ((a, b), c) in &self.terms {
            t.add_term(b.clone(), a.clone(), c.clone());
        }
        t
    }

    pub fn display_with<'a, F: Fn(&ObjectKey) -> String + 'a>(&'a self, show: F) -> impl fmt::Display + 'a {
        DisplayTensor { t: self, show }
    }
}

struct DisplayTensor<'a, F> {
    t: &'a TensorElement,
    show: F,
}

impl<F: Fn(&ObjectKey) -> String> fmt::Display for DisplayTensor<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.t.terms, |(a, b)| format!("{} (x) {}", (self.show)(a), (self.show)(b)))
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |(a, b)| format!("{a:?} (x) {b:?}"))
    }
}

/// Bilinear `x ⊗ y`.
pub fn tensor(x: &Element, y: &Element) -> TensorElement {
    let mut t = TensorElement::zero();
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            t.add_term(a.clone(), b.clone(), ca * cb);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(s: &str) -> ObjectKey {
        ObjectKey::new(s)
    }

    fn q(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn addition_cancels_and_combines() {
        let mut x = Element::term(q(2, 1), k("a"));
        x.add_term(k("b"), q(1, 1));
        let y = Element::term(q(-2, 1), k("a"));
        assert_eq!(add(&x, &y), Element::basis(k("b")));
        assert_eq!(add(&x, &Element::zero()), x);
        let s = add(&Element::term(q(1, 2), k("a")), &Element::term(q(1, 3), k("a")));
        assert_eq!(s, Element::term(q(5, 6), k("a")));
    }

    #[test]
    fn scaling() {
        let a_minus_b = &Element::basis(k("a")) - &Element::basis(k("b"));
        assert!(scale(&q(0, 1), &a_minus_b).is_zero());
        assert_eq!(scale(&q(-1, 1), &a_minus_b), &Element::basis(k("b")) - &Element::basis(k("a")));
        assert_eq!(scale(&q(2, 3), &Element::term(q(3, 1), k("a"))), Element::term(q(2, 1), k("a")));
    }

    #[test]
    fn multiset_to_element() {
        let m: Multiset<ObjectKey> = [k("ab"), k("ab")].into_iter().collect();
        assert_eq!(from_multiset(&m), Element::term(q(2, 1), k("ab")));
        assert!(from_multiset(&Multiset::new()).is_zero());
        let pairs: Multiset<(ObjectKey, ObjectKey)> = Multiset::singleton((k("b"), k("a")));
        assert_eq!(TensorElement::from_pairs(&pairs).coeff(&k("b"), &k("a")), q(1, 1));
    }

    #[test]
    fn tensor_is_bilinear() {
        let a = Element::basis(k("a"));
        let b = Element::basis(k("b"));
        let c = Element::basis(k("c"));
        assert_eq!(tensor(&a, &b).coeff(&k("a"), &k("b")), q(1, 1));
        let t = tensor(&(&a + &b), &c);
        assert_eq!(t.len(), 2);
        assert_eq!(t.coeff(&k("a"), &k("c")), q(1, 1));
        assert_eq!(t.coeff(&k("b"), &k("c")), q(1, 1));
        assert!(tensor(&Element::zero(), &b).is_zero());
    }

    #[test]
    fn rationals_print_and_parse() {
        assert_eq!(format_rational(&q(4, 2)), "2");
        assert_eq!(format_rational(&q(-2, 6)), "-1/3");
        assert_eq!(parse_rational("6/4").unwrap(), q(3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn display() {
        let mut e = Element::term(q(-1, 1), k("a"));
        e.add_term(k("b"), q(2, 3));
        e.add_term(k("c"), q(-5, 1));
        assert_eq!(e.display_with(|k| k.to_string()).to_string(), "-a + 2/3 b - 5 c");
        assert_eq!(Element::zero().display_with(|k| k.to_string()).to_string(), "0");
    }

    fn arb_element() -> impl Strategy<Value = Element> {
        prop::collection::vec((0u8..4, -5i64..5, 1i64..4), 0..5).prop_map(|v| {
            let mut e = Element::zero();
            for (key, n, d) in v {
                e.add_term(ObjectKey::new(((b'a' + key) as char).to_string()), rational(n, d));
            }
            e
        })
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-6i64..6, 1i64..5).prop_map(|(n, d)| rational(n, d))
    }

    proptest! {
        #[test]
        fn vector_space_axioms(x in arb_element(), y in arb_element(), z in arb_element(),
                               a in arb_rational(), b in arb_rational()) {
            prop_assert_eq!(add(&add(&x, &y), &z), add(&x, &add(&y, &z)));
            prop_assert_eq!(add(&x, &y), add(&y, &x));
            prop_assert!(add(&x, &(-&x)).is_zero());
            prop_assert_eq!(scale(&a, &add(&x, &y)), add(&scale(&a, &x), &scale(&a, &y)));
            prop_assert_eq!(scale(&(&a + &b), &x), add(&scale(&a, &x), &scale(&b, &x)));
            prop_assert_eq!(scale(&a, &scale(&b, &x)), scale(&(&a * &b), &x));
            for (_, c) in add(&x, &y).terms() {
                prop_assert!(!c.is_zero());
            }
        }

        #[test]
        fn multiset_sum_is_vector_sum(a in prop::collection::vec(0u8..4, 0..6), b in prop::collection::vec(0u8..4, 0..6)) {
            let key = |i: u8| ObjectKey::new(((b'a' + i) as char).to_string());
            let ma: Multiset<ObjectKey> = a.into_iter().map(key).collect();
            let mb: Multiset<ObjectKey> = b.into_iter().map(key).collect();
            prop_assert_eq!(
                from_multiset(&crate::multiset::msum(&ma, &mb)),
                add(&from_multiset(&ma), &from_multiset(&mb))
            );
        }
    }
}
