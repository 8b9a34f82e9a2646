//! Rules for monoids: every composition is a singleton, every object is a
//! product of generators, and the decomposition is determined by its values on
//! the generators through compatibility with composition.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{HopfError, Result};
use crate::multiset::Multiset;
use crate::rule::{BasisFn, ComposeFn, Condition, DecomposeFn, ObjectKey, ObjectSyntax, Rule, SizeFn};

/// Longest generator product searched when factorizing by table.
pub const MAX_FACTORS: usize = 64;

/// Largest factorization table built before giving up.
pub const MAX_TABLE: usize = 1 << 20;

type FactorFn = Arc<dyn Fn(&ObjectKey) -> Result<Vec<ObjectKey>> + Send + Sync>;

/// Products of the generators, grown one factor at a time.
struct FactorTable {
    known: HashMap<ObjectKey, Vec<ObjectKey>>,
    frontier: Vec<ObjectKey>,
    depth: usize,
}

fn single(out: Multiset<ObjectKey>, a: &ObjectKey, b: &ObjectKey) -> Result<ObjectKey> {
    if out.cardinality() != 1u32.into() {
        return Err(HopfError::NotAMonoid(format!(
            "composing `{a}` with `{b}` gives {} outcomes",
            out.cardinality()
        )));
    }
    Ok(out.elements().next().cloned().unwrap())
}

/// The unique composite of `a` and `b`; the void object is handled here so
/// user compositions only ever see proper objects.
fn product(compose: &ComposeFn, a: &ObjectKey, b: &ObjectKey) -> Result<ObjectKey> {
    if a.is_void() {
        return Ok(b.clone());
    }
    if b.is_void() {
        return Ok(a.clone());
    }
    single(compose(a, b)?, a, b)
}

impl FactorTable {
    fn new() -> Self {
        let void = ObjectKey::void();
        FactorTable {
            known: HashMap::from([(void.clone(), Vec::new())]),
            frontier: vec![void],
            depth: 0,
        }
    }

    /// Adds all products with one more factor; `false` once nothing new appears.
    fn grow(&mut self, gens: &[ObjectKey], compose: &ComposeFn) -> Result<bool> {
        let mut next = Vec::new();
        for p in std::mem::take(&mut self.frontier) {
            for h in gens {
                let c = product(compose, &p, h)?;
                if !self.known.contains_key(&c) {
                    let mut f = self.known[&p].clone();
                    f.push(h.clone());
                    self.known.insert(c.clone(), f);
                    next.push(c);
                }
            }
        }
        self.depth += 1;
        self.frontier = next;
        Ok(!self.frontier.is_empty())
    }
}

/// Builder for a monoid rule; see [`monoid_rule_from_generators`] for the defaults.
pub struct MonoidRule {
    name: String,
    gens: Vec<ObjectKey>,
    compose: ComposeFn,
    gen_decompose: Option<DecomposeFn>,
    factorizer: Option<FactorFn>,
    size: Option<SizeFn>,
    basis: Option<BasisFn>,
    syntax: Option<Arc<dyn ObjectSyntax>>,
    declared: BTreeSet<Condition>,
}

impl MonoidRule {
    pub fn new(
        name: impl Into<String>,
        gens: Vec<ObjectKey>,
        compose: impl Fn(&ObjectKey, &ObjectKey) -> Result<Multiset<ObjectKey>> + Send + Sync + 'static,
    ) -> Self {
        MonoidRule {
            name: name.into(),
            gens,
            compose: Arc::new(compose),
            gen_decompose: None,
            factorizer: None,
            size: None,
            basis: None,
            syntax: None,
            declared: BTreeSet::new(),
        }
    }

    /// Decomposition of the generators. Without it every generator is primitive.
    pub fn gen_decompose(
        mut self,
        f: impl Fn(&ObjectKey) -> Result<Multiset<(ObjectKey, ObjectKey)>> + Send + Sync + 'static,
    ) -> Self {
        self.gen_decompose = Some(Arc::new(f));
        self
    }

    /// Splits an object into generators directly instead of searching products.
    pub fn factorizer(mut self, f: impl Fn(&ObjectKey) -> Result<Vec<ObjectKey>> + Send + Sync + 'static) -> Self {
        self.factorizer = Some(Arc::new(f));
        self
    }

    /// Size function; the default counts generator factors.
    pub fn size(mut self, f: impl Fn(&ObjectKey) -> Result<usize> + Send + Sync + 'static) -> Self {
        self.size = Some(Arc::new(f));
        self
    }

    pub fn basis(mut self, f: impl Fn(usize) -> Vec<ObjectKey> + Send + Sync + 'static) -> Self {
        self.basis = Some(Arc::new(f));
        self
    }

    pub fn syntax(mut self, syntax: Arc<dyn ObjectSyntax>) -> Self {
        self.syntax = Some(syntax);
        self
    }

    /// Extra conditions to claim on top of the ones implied by construction.
    pub fn declare(mut self, conditions: impl IntoIterator<Item = Condition>) -> Self {
        self.declared.extend(conditions);
        self
    }

    pub fn build(self) -> Result<Rule> {
        use Condition::*;
        if self.gens.is_empty() {
            return Err(HopfError::InvalidRule("a monoid rule needs at least one generator".into()));
        }
        if self.gens.iter().any(ObjectKey::is_void) {
            return Err(HopfError::InvalidRule("the void object cannot be a generator".into()));
        }
        for a in &self.gens {
            for b in &self.gens {
                single((self.compose)(a, b)?, a, b)?;
            }
        }

        let gens = Arc::new(self.gens);
        let compose = self.compose.clone();
        let factor: FactorFn = match self.factorizer {
            Some(f) => f,
            None => {
                let table = Arc::new(Mutex::new(FactorTable::new()));
                let gens = gens.clone();
                let compose = compose.clone();
                Arc::new(move |g: &ObjectKey| {
                    let mut t = table.lock().unwrap();
                    loop {
                        if let Some(f) = t.known.get(g) {
                            return Ok(f.clone());
                        }
                        if t.depth >= MAX_FACTORS || t.known.len() >= MAX_TABLE {
                            return Err(HopfError::BudgetExceeded {
                                object: g.to_string(),
                                budget: t.known.len() as u64,
                            });
                        }
                        if !t.grow(&gens, &compose)? {
                            return Err(HopfError::malformed(g.as_str(), "not a product of the generators"));
                        }
                    }
                })
            }
        };

        let mut declared: BTreeSet<Condition> = [C1, C2, C3, D1, CD1].into();
        if self.gen_decompose.is_none() {
            // primitive generators: the extension is coassociative, cocommutative and graded
            declared.extend([D2, D3, D4, D5]);
            if self.size.is_none() {
                declared.insert(CD2);
            }
        }
        declared.extend(self.declared);

        let gen_decompose: DecomposeFn = self.gen_decompose.unwrap_or_else(|| {
            Arc::new(|g: &ObjectKey| Ok([(ObjectKey::void(), g.clone()), (g.clone(), ObjectKey::void())].into_iter().collect()))
        });

        let rule_compose = compose.clone();
        let f = factor.clone();
        let decompose = move |g: &ObjectKey| -> Result<Multiset<(ObjectKey, ObjectKey)>> {
            let mut acc: Multiset<(ObjectKey, ObjectKey)> = Multiset::singleton((ObjectKey::void(), ObjectKey::void()));
            for h in f(g)? {
                let parts = gen_decompose(&h)?;
                let mut next = Multiset::new();
                for ((a1, a2), m) in acc.iter() {
                    for ((b1, b2), mb) in parts.iter() {
                        let l = product(&compose, a1, b1)?;
                        let r = product(&compose, a2, b2)?;
                        next.insert_many((l, r), m * mb);
                    }
                }
                acc = next;
            }
            Ok(acc)
        };

        let custom_size = self.size.is_some();
        let size: SizeFn = match self.size {
            Some(s) => s,
            None => {
                let f = factor.clone();
                Arc::new(move |g: &ObjectKey| Ok(f(g)?.len()))
            }
        };
        let size_fn = size.clone();

        let mut builder = Rule::builder(self.name)
            .compose(move |a, b| Ok(Multiset::singleton(product(&rule_compose, a, b)?)))
            .decompose(decompose)
            .size(move |g| size_fn(g))
            .declare(declared);
        if let Some(b) = self.basis {
            builder = builder.basis(move |n| b(n));
        } else if !custom_size {
            // default grading: products of at most `bound` generators
            let gens = gens.clone();
            let compose = self.compose.clone();
            builder = builder.basis(move |bound| {
                let mut t = FactorTable::new();
                for _ in 0..bound {
                    if !matches!(t.grow(&gens, &compose), Ok(true)) {
                        break;
                    }
                }
                t.known.into_keys().collect()
            });
        }
        if let Some(s) = self.syntax {
            builder = builder.syntax(s);
        }
        builder.build()
    }
}

/// Monoid rule generated by `gens` under the singleton-valued `compose`.
///
/// The decomposition of a product of generators is the componentwise product
/// of their decompositions, folded left to right. Without `gen_decompose`
/// every generator is primitive: `⟨g⟩ = {(Ø,g),(g,Ø)}`.
pub fn monoid_rule_from_generators(
    name: impl Into<String>,
    gens: Vec<ObjectKey>,
    compose: impl Fn(&ObjectKey, &ObjectKey) -> Result<Multiset<ObjectKey>> + Send + Sync + 'static,
    gen_decompose: Option<DecomposeFn>,
) -> Result<Rule> {
    let mut m = MonoidRule::new(name, gens, compose);
    if let Some(d) = gen_decompose {
        m = m.gen_decompose(move |g| d(g));
    }
    m.build()
}
