//! Product, coproduct, counit, antipode and grading induced by a [`Rule`].
//!
//! Everything is defined on basis objects and extended (bi)linearly.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::One;

use crate::error::{HopfError, Result};
use crate::rule::{Condition, ObjectKey, Rule, Strategy};
use crate::vector::{from_natural, Element, Rational, TensorElement};

/// Default number of decomposition tuples the antipode may enumerate per object.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Maximum recursion depth of [`antipode_rec`].
pub const RECURSION_LIMIT: usize = 4096;

/// Product of two basis objects: the sum over all their compositions.
pub fn mul_basis(rule: &Rule, g2: &ObjectKey, g1: &ObjectKey) -> Result<Element> {
    Ok(Element::from_multiset(&rule.compose(g2, g1)?))
}

/// Bilinear product `x * y`.
pub fn mul(rule: &Rule, x: &Element, y: &Element) -> Result<Element> {
    rule.require(&[Condition::C1])?;
    let mut out = Element::zero();
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            out.add_assign_scaled(&mul_basis(rule, a, b)?, &(ca * cb));
        }
    }
    Ok(out)
}

/// Product of a sequence of basis objects, left to right.
pub fn mul_chain(rule: &Rule, objects: &[ObjectKey]) -> Result<Element> {
    let mut acc = Element::basis(rule.neutral().clone());
    for (i, g) in objects.iter().enumerate() {
        if i == 0 {
            acc = Element::basis(g.clone());
        } else {
            acc = mul(rule, &acc, &Element::basis(g.clone()))?;
        }
    }
    Ok(acc)
}

/// Componentwise product on the tensor square: `(a ⊗ b) * (c ⊗ d) = (a*c) ⊗ (b*d)`.
pub fn tensor_mul(rule: &Rule, x: &TensorElement, y: &TensorElement) -> Result<TensorElement> {
    rule.require(&[Condition::C1])?;
    let mut out = TensorElement::zero();
    for ((a, b), cx) in x.terms() {
        for ((c, d), cy) in y.terms() {
            let left = mul_basis(rule, a, c)?;
            let right = mul_basis(rule, b, d)?;
            let coeff = cx * cy;
            for (l, cl) in left.terms() {
                for (r, cr) in right.terms() {
                    out.add_term(l.clone(), r.clone(), &coeff * cl * cr);
                }
            }
        }
    }
    Ok(out)
}

/// Multiplication map `μ(a ⊗ b) = a * b`, extended linearly.
pub fn mu(rule: &Rule, t: &TensorElement) -> Result<Element> {
    rule.require(&[Condition::C1])?;
    let mut out = Element::zero();
    for ((a, b), c) in t.terms() {
        out.add_assign_scaled(&mul_basis(rule, a, b)?, c);
    }
    Ok(out)
}

/// Coproduct: the sum over all splittings `Γ'' ⊗ Γ'` of every basis object.
pub fn coproduct(rule: &Rule, x: &Element) -> Result<TensorElement> {
    rule.require(&[Condition::D1])?;
    let mut out = TensorElement::zero();
    for (g, c) in x.terms() {
        out.add_assign_scaled(&TensorElement::from_pairs(&rule.decompose(g)?), c);
    }
    Ok(out)
}

fn require_void(rule: &Rule) -> Result<()> {
    if rule.declares(Condition::C3) || rule.declares(Condition::D3) {
        Ok(())
    } else {
        rule.require(&[Condition::D3])
    }
}

/// Counit: the coefficient standing at Ø.
pub fn counit(rule: &Rule, x: &Element) -> Result<Rational> {
    require_void(rule)?;
    Ok(x.coeff(rule.neutral()))
}

/// `ε(x)·Ø`, the projection onto the span of the void object.
pub fn counit_projection(rule: &Rule, x: &Element) -> Result<Element> {
    let c = counit(rule, x)?;
    Ok(Element::term(c, rule.neutral().clone()))
}

fn require_antipode(rule: &Rule) -> Result<()> {
    rule.require(&[Condition::D2, Condition::D5, Condition::CD1])
}

/// Antipode of a basis object as the alternating sum of products over all
/// Ø-free multiple decompositions, using the default budget.
pub fn antipode_sum(rule: &Rule, g: &ObjectKey) -> Result<Element> {
    antipode_sum_with(rule, g, DEFAULT_BUDGET, Strategy::LeftFirst)
}

/// [`antipode_sum`] with an explicit tuple budget and splitting strategy.
pub fn antipode_sum_with(rule: &Rule, g: &ObjectKey, budget: u64, strategy: Strategy) -> Result<Element> {
    require_antipode(rule)?;
    if g == rule.neutral() {
        return Ok(Element::basis(g.clone()));
    }
    let mut remaining = budget;
    let mut memo = HashMap::new();
    let mut products: HashMap<Vec<ObjectKey>, Element> = HashMap::new();
    let mut out = Element::zero();
    let mut n = 1usize;
    loop {
        let tuples = rule
            .nontrivial_with(g, n, strategy, &mut remaining, &mut memo)
            .map_err(|e| match e {
                HopfError::BudgetExceeded { .. } => HopfError::NonTermination {
                    object: rule.format_object(g),
                    budget,
                },
                other => other,
            })?;
        if tuples.is_empty() {
            break;
        }
        let sign = if n.is_multiple_of(2) { Rational::one() } else { -Rational::one() };
        for (tuple, m) in tuples {
            let product = match products.get(&tuple) {
                Some(p) => p.clone(),
                None => {
                    let p = mul_chain(rule, &tuple)?;
                    products.insert(tuple, p.clone());
                    p
                }
            };
            out.add_assign_scaled(&product, &(&sign * from_natural(&m)));
        }
        n += 1;
    }
    Ok(out)
}

/// Antipode of a basis object by the recursion
/// `S(Γ) = −Σ_{(Γ'',Γ')∈⟨Γ⟩, Γ'≠Ø} S(Γ'') * Γ'`, memoized per rule.
pub fn antipode_rec(rule: &Rule, g: &ObjectKey) -> Result<Element> {
    require_antipode(rule)?;
    let mut stack = HashSet::new();
    antipode_rec_inner(rule, g, &mut stack)
}

fn antipode_rec_inner(rule: &Rule, g: &ObjectKey, stack: &mut HashSet<ObjectKey>) -> Result<Element> {
    if g == rule.neutral() {
        return Ok(Element::basis(g.clone()));
    }
    if let Some(hit) = rule.antipode_cache().lock().unwrap().get(g) {
        return Ok(hit.clone());
    }
    // A repeated object on the stack means the recursion cannot bottom out.
    if stack.len() >= RECURSION_LIMIT || !stack.insert(g.clone()) {
        return Err(HopfError::RecursionBudgetExceeded {
            object: rule.format_object(g),
        });
    }
    let mut out = Element::zero();
    for ((left, right), m) in rule.decompose(g)? {
        if right.is_void() {
            continue;
        }
        let s_left = antipode_rec_inner(rule, &left, stack)?;
        let term = mul(rule, &s_left, &Element::basis(right))?;
        out.add_assign_scaled(&term, &-from_natural(&m));
    }
    stack.remove(g);
    rule.antipode_cache().lock().unwrap().insert(g.clone(), out.clone());
    Ok(out)
}

/// Which antipode algorithm to use when extending linearly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntipodeAlgorithm {
    AlternatingSum,
    Recursive,
}

/// Linear extension of the antipode to an element.
pub fn antipode(rule: &Rule, x: &Element, algorithm: AntipodeAlgorithm) -> Result<Element> {
    let mut out = Element::zero();
    for (g, c) in x.terms() {
        let s = match algorithm {
            AntipodeAlgorithm::AlternatingSum => antipode_sum(rule, g)?,
            AntipodeAlgorithm::Recursive => antipode_rec(rule, g)?,
        };
        out.add_assign_scaled(&s, c);
    }
    Ok(out)
}

/// Applies a linear map to the left or right tensor factor.
pub fn map_tensor_factor(
    t: &TensorElement,
    right_factor: bool,
    mut f: impl FnMut(&ObjectKey) -> Result<Element>,
) -> Result<TensorElement> {
    let mut out = TensorElement::zero();
    let mut images: BTreeMap<ObjectKey, Element> = BTreeMap::new();
    for ((a, b), c) in t.terms() {
        let target = if right_factor { b } else { a };
        if !images.contains_key(target) {
            images.insert(target.clone(), f(target)?);
        }
        for (k, ck) in images[target].terms() {
            let (l, r) = if right_factor { (a.clone(), k.clone()) } else { (k.clone(), b.clone()) };
            out.add_term(l, r, c * ck);
        }
    }
    Ok(out)
}

/// The part of `x` supported on objects of size exactly `n`.
pub fn project_grade(rule: &Rule, x: &Element, n: usize) -> Result<Element> {
    rule.require(&[Condition::CD2])?;
    let mut sizes = HashMap::new();
    for (k, _) in x.terms() {
        sizes.insert(k.clone(), rule.size(k)?);
    }
    Ok(x.restrict(|k| sizes[k] == n))
}

/// Splits an element into its homogeneous components, keyed by grade.
pub fn homogeneous_components(rule: &Rule, x: &Element) -> Result<BTreeMap<usize, Element>> {
    rule.require(&[Condition::CD2])?;
    let mut out: BTreeMap<usize, Element> = BTreeMap::new();
    for (k, c) in x.terms() {
        out.entry(rule.size(k)?)
            .or_default()
            .add_term(k.clone(), c.clone());
    }
    Ok(out)
}

/// `true` when `x` is zero or entirely of grade `n`.
pub fn is_homogeneous(rule: &Rule, x: &Element, n: usize) -> Result<bool> {
    let comps = homogeneous_components(rule, x)?;
    Ok(comps.keys().all(|&k| k == n))
}
