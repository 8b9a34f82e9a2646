//! Composition/decomposition rules over a combinatorial class.
//!
//! A [`Rule`] bundles the composition map, the decomposition map, the void
//! object, the size function and the set of conditions the rule claims to
//! satisfy. Objects are handled through their canonical [`ObjectKey`]; each
//! instance is responsible for producing canonical keys.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{HopfError, Result};
use crate::multiset::Multiset;
use crate::vector::Element;

/// Canonical, totally ordered encoding of a combinatorial object.
///
/// Two objects are equal iff their keys are. The void object Ø always has the
/// empty key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectKey(Arc<str>);

impl ObjectKey {
    pub fn new(s: impl AsRef<str>) -> Self {
        ObjectKey(Arc::from(s.as_ref()))
    }

    pub fn void() -> Self {
        ObjectKey::new("")
    }

    pub fn is_void(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ObjectKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_void() {
            f.write_str("Ø")
        } else {
            write!(f, "{:?}", &*self.0)
        }
    }
}

impl fmt::Display for ObjectKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjectKey {
    fn from(s: &str) -> Self {
        ObjectKey::new(s)
    }
}

/// The conditions a composition/decomposition rule may satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
    D1,
    D2,
    D3,
    D4,
    D5,
    CD1,
    CD2,
}

impl Condition {
    pub const ALL: [Condition; 11] = [
        Condition::C1,
        Condition::C2,
        Condition::C3,
        Condition::C4,
        Condition::D1,
        Condition::D2,
        Condition::D3,
        Condition::D4,
        Condition::D5,
        Condition::CD1,
        Condition::CD2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
            Condition::C4 => "C4",
            Condition::D1 => "D1",
            Condition::D2 => "D2",
            Condition::D3 => "D3",
            Condition::D4 => "D4",
            Condition::D5 => "D5",
            Condition::CD1 => "CD1",
            Condition::CD2 => "CD2",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = HopfError;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HopfError::InvalidRule(format!("unknown condition `{s}`")))
    }
}

pub type ComposeFn = Arc<dyn Fn(&ObjectKey, &ObjectKey) -> Result<Multiset<ObjectKey>> + Send + Sync>;
pub type DecomposeFn = Arc<dyn Fn(&ObjectKey) -> Result<Multiset<(ObjectKey, ObjectKey)>> + Send + Sync>;
pub type SizeFn = Arc<dyn Fn(&ObjectKey) -> Result<usize> + Send + Sync>;
pub type BasisFn = Arc<dyn Fn(usize) -> Vec<ObjectKey> + Send + Sync>;

/// Literal syntax for the objects of one class.
pub trait ObjectSyntax: Send + Sync {
    /// Parses a literal into its canonical key. Error columns are relative to `text`.
    fn parse(&self, text: &str) -> Result<ObjectKey>;

    /// Prints the literal for a canonical key; `parse(format(k)) == k`.
    fn format(&self, key: &ObjectKey) -> String;
}

/// Order in which an object is split repeatedly into tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Always split the leftmost component.
    LeftFirst,
    /// Always split the rightmost component.
    RightFirst,
}

type ComposeCache = HashMap<(ObjectKey, ObjectKey), Multiset<ObjectKey>>;

const COMPOSE_CACHE_LIMIT: usize = 1 << 16;

struct RuleInner {
    name: String,
    neutral: ObjectKey,
    compose_fn: ComposeFn,
    decompose_fn: DecomposeFn,
    size_fn: SizeFn,
    declared: BTreeSet<Condition>,
    syntax: Option<Arc<dyn ObjectSyntax>>,
    basis_fn: Option<BasisFn>,
    compose_cache: Option<Mutex<ComposeCache>>,
    antipode_cache: Mutex<HashMap<ObjectKey, Element>>,
}

/// A combinatorial class together with its composition and decomposition rules.
///
/// Cloning is cheap and clones share the internal memoization caches.
#[derive(Clone)]
pub struct Rule {
    inner: Arc<RuleInner>,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("name", &self.inner.name)
            .field("declared", &self.inner.declared)
            .finish()
    }
}

pub struct RuleBuilder {
    name: String,
    neutral: ObjectKey,
    compose_fn: Option<ComposeFn>,
    decompose_fn: Option<DecomposeFn>,
    size_fn: Option<SizeFn>,
    declared: BTreeSet<Condition>,
    syntax: Option<Arc<dyn ObjectSyntax>>,
    basis_fn: Option<BasisFn>,
    cache_compose: bool,
}

impl RuleBuilder {
    pub fn compose(
        mut self,
        f: impl Fn(&ObjectKey, &ObjectKey) -> Result<Multiset<ObjectKey>> + Send + Sync + 'static,
    ) -> Self {
        self.compose_fn = Some(Arc::new(f));
        self
    }

    pub fn decompose(
        mut self,
        f: impl Fn(&ObjectKey) -> Result<Multiset<(ObjectKey, ObjectKey)>> + Send + Sync + 'static,
    ) -> Self {
        self.decompose_fn = Some(Arc::new(f));
        self
    }

    pub fn size(mut self, f: impl Fn(&ObjectKey) -> Result<usize> + Send + Sync + 'static) -> Self {
        self.size_fn = Some(Arc::new(f));
        self
    }

    pub fn declare(mut self, conditions: impl IntoIterator<Item = Condition>) -> Self {
        self.declared.extend(conditions);
        self
    }

    pub fn syntax(mut self, syntax: Arc<dyn ObjectSyntax>) -> Self {
        self.syntax = Some(syntax);
        self
    }

    pub fn basis(mut self, f: impl Fn(usize) -> Vec<ObjectKey> + Send + Sync + 'static) -> Self {
        self.basis_fn = Some(Arc::new(f));
        self
    }

    /// Memoize `compose` by key pair. Worth it for rules with expensive,
    /// many-outcome compositions such as shuffles.
    pub fn cache_compositions(mut self, yes: bool) -> Self {
        self.cache_compose = yes;
        self
    }

    pub fn build(self) -> Result<Rule> {
        let missing = |what: &str| HopfError::InvalidRule(format!("rule `{}` has no {what}", self.name));
        let compose_fn = self.compose_fn.clone().ok_or_else(|| missing("composition"))?;
        let decompose_fn = self.decompose_fn.clone().ok_or_else(|| missing("decomposition"))?;
        let size_fn = self.size_fn.clone().ok_or_else(|| missing("size function"))?;
        let void_size = size_fn(&self.neutral)?;
        if void_size != 0 {
            return Err(HopfError::InvalidRule(format!(
                "neutral object of `{}` has size {void_size}, expected 0",
                self.name
            )));
        }
        Ok(Rule {
            inner: Arc::new(RuleInner {
                name: self.name,
                neutral: self.neutral,
                compose_fn,
                decompose_fn,
                size_fn,
                declared: self.declared,
                syntax: self.syntax,
                basis_fn: self.basis_fn,
                compose_cache: self.cache_compose.then(|| Mutex::new(HashMap::new())),
                antipode_cache: Mutex::new(HashMap::new()),
            }),
        })
    }
}

impl Rule {
    /// Starts a rule whose void object is the reserved empty key.
    pub fn builder(name: impl Into<String>) -> RuleBuilder {
        RuleBuilder {
            name: name.into(),
            neutral: ObjectKey::void(),
            compose_fn: None,
            decompose_fn: None,
            size_fn: None,
            declared: BTreeSet::new(),
            syntax: None,
            basis_fn: None,
            cache_compose: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn neutral(&self) -> &ObjectKey {
        &self.inner.neutral
    }

    pub fn declared(&self) -> &BTreeSet<Condition> {
        &self.inner.declared
    }

    pub fn declares(&self, c: Condition) -> bool {
        self.inner.declared.contains(&c)
    }

    /// Fails with `ConditionNotDeclared` unless every condition in `cs` is declared.
    pub fn require(&self, cs: &[Condition]) -> Result<()> {
        match cs.iter().find(|c| !self.declares(**c)) {
            Some(c) => Err(HopfError::ConditionNotDeclared {
                rule: self.inner.name.clone(),
                condition: *c,
            }),
            None => Ok(()),
        }
    }

    pub fn compose(&self, g2: &ObjectKey, g1: &ObjectKey) -> Result<Multiset<ObjectKey>> {
        if let Some(cache) = &self.inner.compose_cache {
            let pair = (g2.clone(), g1.clone());
            if let Some(hit) = cache.lock().unwrap().get(&pair) {
                return Ok(hit.clone());
            }
            let out = (self.inner.compose_fn)(g2, g1)?;
            let mut cache = cache.lock().unwrap();
            if cache.len() >= COMPOSE_CACHE_LIMIT {
                cache.clear();
            }
            cache.insert(pair, out.clone());
            return Ok(out);
        }
        (self.inner.compose_fn)(g2, g1)
    }

    pub fn decompose(&self, g: &ObjectKey) -> Result<Multiset<(ObjectKey, ObjectKey)>> {
        (self.inner.decompose_fn)(g)
    }

    pub fn size(&self, g: &ObjectKey) -> Result<usize> {
        (self.inner.size_fn)(g)
    }

    /// Lifted composition: `⊎` of `compose` over all ordered pairs, with multiplicity.
    pub fn compose_msets(&self, g2s: &Multiset<ObjectKey>, g1s: &Multiset<ObjectKey>) -> Result<Multiset<ObjectKey>> {
        let mut out = Multiset::new();
        for (a, ma) in g2s.iter() {
            for (b, mb) in g1s.iter() {
                out.absorb_scaled(&self.compose(a, b)?, &(ma * mb));
            }
        }
        Ok(out)
    }

    /// Lifted decomposition: `⊎` of `decompose` over the elements, with multiplicity.
    pub fn decompose_mset(&self, gs: &Multiset<ObjectKey>) -> Result<Multiset<(ObjectKey, ObjectKey)>> {
        let mut out = Multiset::new();
        for (g, m) in gs.iter() {
            out.absorb_scaled(&self.decompose(g)?, m);
        }
        Ok(out)
    }

    /// `⟨g⟩⁽ⁿ⁾`: all ways of splitting `g` with `n` successive decompositions,
    /// giving tuples of `n + 1` components (`n = 0` yields `{(g)}`).
    ///
    /// Requires D2, which makes the result independent of the splitting order.
    pub fn iterated_decompose(&self, g: &ObjectKey, n: usize) -> Result<Multiset<Vec<ObjectKey>>> {
        self.require(&[Condition::D2])?;
        self.iterated_decompose_with(g, n, Strategy::LeftFirst)
    }

    /// Like [`Rule::iterated_decompose`] with an explicit strategy and no D2 check.
    pub fn iterated_decompose_with(&self, g: &ObjectKey, n: usize, strategy: Strategy) -> Result<Multiset<Vec<ObjectKey>>> {
        let mut acc: Multiset<Vec<ObjectKey>> = Multiset::singleton(vec![g.clone()]);
        for _ in 0..n {
            let mut next = Multiset::new();
            for (tuple, m) in acc {
                let at = match strategy {
                    Strategy::LeftFirst => 0,
                    Strategy::RightFirst => tuple.len() - 1,
                };
                for ((a, b), mp) in self.decompose(&tuple[at])? {
                    let mut t = Vec::with_capacity(tuple.len() + 1);
                    t.extend_from_slice(&tuple[..at]);
                    t.push(a);
                    t.push(b);
                    t.extend_from_slice(&tuple[at + 1..]);
                    next.insert_many(t, &m * mp);
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Ø-free tuples of exactly `n` components obtained by iterated decomposition.
    pub fn nontrivial_decompositions(&self, g: &ObjectKey, n: usize) -> Result<Multiset<Vec<ObjectKey>>> {
        self.require(&[Condition::D2])?;
        let mut budget = u64::MAX;
        let mut memo = HashMap::new();
        self.nontrivial_with(g, n, Strategy::LeftFirst, &mut budget, &mut memo)
    }

    /// Ø-free `n`-tuples, charging every distinct produced tuple against `budget`.
    ///
    /// Only splittings whose finished component is non-void are followed, which
    /// yields exactly the Ø-free part of `⟨g⟩⁽ⁿ⁻¹⁾` without materializing the rest.
    pub(crate) fn nontrivial_with(
        &self,
        g: &ObjectKey,
        n: usize,
        strategy: Strategy,
        budget: &mut u64,
        memo: &mut HashMap<(ObjectKey, usize), Multiset<Vec<ObjectKey>>>,
    ) -> Result<Multiset<Vec<ObjectKey>>> {
        if n == 0 {
            return Ok(Multiset::new());
        }
        if n == 1 {
            return Ok(if g.is_void() {
                Multiset::new()
            } else {
                Multiset::singleton(vec![g.clone()])
            });
        }
        if let Some(hit) = memo.get(&(g.clone(), n)) {
            return Ok(hit.clone());
        }
        let mut out = Multiset::new();
        for ((left, right), m) in self.decompose(g)? {
            let (done, rest) = match strategy {
                Strategy::LeftFirst => (right, left),
                Strategy::RightFirst => (left, right),
            };
            if done.is_void() {
                continue;
            }
            for (tail, mt) in self.nontrivial_with(&rest, n - 1, strategy, budget, memo)? {
                let count = &m * mt;
                charge(budget, g)?;
                let mut t = Vec::with_capacity(n);
                match strategy {
                    Strategy::LeftFirst => {
                        t.extend(tail);
                        t.push(done.clone());
                    }
                    Strategy::RightFirst => {
                        t.push(done.clone());
                        t.extend(tail);
                    }
                }
                out.insert_many(t, count);
            }
        }
        memo.insert((g.clone(), n), out.clone());
        Ok(out)
    }

    pub fn parse_object(&self, text: &str) -> Result<ObjectKey> {
        let trimmed = text.trim();
        if trimmed == "void" {
            return Ok(self.inner.neutral.clone());
        }
        match &self.inner.syntax {
            Some(s) => s.parse(text),
            None => Ok(ObjectKey::new(trimmed)),
        }
    }

    pub fn format_object(&self, key: &ObjectKey) -> String {
        if key == &self.inner.neutral {
            return "void".to_string();
        }
        match &self.inner.syntax {
            Some(s) => s.format(key),
            None => key.to_string(),
        }
    }

    pub fn has_syntax(&self) -> bool {
        self.inner.syntax.is_some()
    }

    /// All canonical objects of size ≤ `bound`, ascending by size then key, if
    /// the rule knows how to enumerate its class.
    pub fn enumerate_basis(&self, bound: usize) -> Option<Vec<ObjectKey>> {
        let f = self.inner.basis_fn.as_ref()?;
        let mut objs = f(bound);
        let mut sized: Vec<(usize, ObjectKey)> = objs
            .drain(..)
            .map(|k| (self.size(&k).unwrap_or(usize::MAX), k))
            .filter(|(s, _)| *s <= bound)
            .collect();
        sized.sort();
        sized.dedup();
        Some(sized.into_iter().map(|(_, k)| k).collect())
    }

    pub(crate) fn antipode_cache(&self) -> &Mutex<HashMap<ObjectKey, Element>> {
        &self.inner.antipode_cache
    }
}

pub(crate) fn charge(budget: &mut u64, at: &ObjectKey) -> Result<()> {
    if *budget == 0 {
        return Err(HopfError::BudgetExceeded {
            object: at.to_string(),
            budget: 0,
        });
    }
    *budget -= 1;
    Ok(())
}
