//! Bounded exhaustive verification of rule conditions and of the Hopf
//! algebra laws they imply.
//!
//! Objects are visited by increasing size and pairs/triples by increasing
//! total size; each check stops at its first failure, so counterexamples are
//! as small as the domain allows.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{HopfError, Result};
use crate::hopf::{self, AntipodeAlgorithm, DEFAULT_BUDGET};
use crate::multiset::Multiset;
use crate::rule::{Condition, ObjectKey, Rule, Strategy};
use crate::vector::{format_rational, Element, TensorElement};

/// A rule together with the finite set of objects to check it on.
#[derive(Debug, Clone)]
pub struct Domain {
    pub rule: Rule,
    pub objects: Vec<ObjectKey>,
    pub bound: usize,
    /// Tuple budget for D5 searches and the alternating-sum antipode.
    pub budget: u64,
}

impl Domain {
    /// Every object of size ≤ `bound` the rule can enumerate.
    pub fn new(rule: &Rule, bound: usize) -> Result<Self> {
        let objects = crate::instances::enumerate_basis(rule, bound)?;
        Ok(Domain {
            rule: rule.clone(),
            objects,
            bound,
            budget: DEFAULT_BUDGET,
        })
    }

    /// An explicit object list; it is sorted by size and deduplicated.
    pub fn from_objects(rule: &Rule, objects: Vec<ObjectKey>, bound: usize) -> Result<Self> {
        let mut sized = objects
            .into_iter()
            .map(|k| Ok((rule.size(&k)?, k)))
            .collect::<Result<Vec<_>>>()?;
        sized.sort();
        sized.dedup();
        Ok(Domain {
            rule: rule.clone(),
            objects: sized.into_iter().map(|(_, k)| k).collect(),
            bound,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn sizes(&self) -> Result<HashMap<ObjectKey, usize>> {
        self.objects.iter().map(|k| Ok((k.clone(), self.rule.size(k)?))).collect()
    }

    fn singles(&self) -> Vec<Vec<ObjectKey>> {
        self.objects.iter().map(|k| vec![k.clone()]).collect()
    }

    fn tuples(&self, arity: usize) -> Result<Vec<Vec<ObjectKey>>> {
        let sizes = self.sizes()?;
        let mut out: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
        for _ in 0..arity {
            let mut next = Vec::with_capacity(out.len() * self.objects.len());
            for (total, idx) in &out {
                for (i, k) in self.objects.iter().enumerate() {
                    let mut idx = idx.clone();
                    idx.push(i);
                    next.push((total + sizes[k], idx));
                }
            }
            out = next;
        }
        out.sort();
        Ok(out
            .into_iter()
            .map(|(_, idx)| idx.into_iter().map(|i| self.objects[i].clone()).collect())
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    BudgetExceeded,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::BudgetExceeded => "budget-exceeded",
        })
    }
}

/// The objects a check failed on, with both sides of the equation printed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub objects: Vec<String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rule: String,
    pub condition: String,
    pub verdict: Verdict,
    pub cases: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    /// Why a check could not finish, for budget-exceeded verdicts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub declared: bool,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subreports: Vec<Report>,
}

impl Report {
    /// A declared condition holds, or an undeclared one fails.
    pub fn agrees_with_declaration(&self) -> bool {
        match self.verdict {
            Verdict::Holds => self.declared,
            Verdict::Fails => !self.declared,
            Verdict::BudgetExceeded => false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line per report, sub-reports indented.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let tag = if self.declared { "declared" } else { "not declared" };
        let _ = writeln!(
            out,
            "{pad}{} {}: {} ({} cases, {tag}, {} ms)",
            self.rule, self.condition, self.verdict, self.cases, self.elapsed_ms
        );
        if let Some(cx) = &self.counterexample {
            let _ = writeln!(out, "{pad}  at {}", cx.objects.join(", "));
            let _ = writeln!(out, "{pad}  lhs = {}", cx.lhs);
            let _ = writeln!(out, "{pad}  rhs = {}", cx.rhs);
        }
        if let Some(note) = &self.note {
            let _ = writeln!(out, "{pad}  {note}");
        }
        for sub in &self.subreports {
            sub.write_text(out, depth + 1);
        }
    }
}

fn is_budget(e: &HopfError) -> bool {
    matches!(
        e,
        HopfError::BudgetExceeded { .. } | HopfError::NonTermination { .. } | HopfError::RecursionBudgetExceeded { .. }
    )
}

/// Outcome of one case: `None` when the law holds, otherwise both sides.
type Outcome = Result<Option<(String, String)>>;

fn sweep(
    rule: &Rule,
    condition: &str,
    declared: bool,
    cases: Vec<Vec<ObjectKey>>,
    mut check: impl FnMut(&[ObjectKey]) -> Outcome,
) -> Report {
    let start = Instant::now();
    let mut report = Report {
        rule: rule.name().to_string(),
        condition: condition.to_string(),
        verdict: Verdict::Holds,
        cases: 0,
        counterexample: None,
        note: None,
        declared,
        elapsed_ms: 0,
        subreports: Vec::new(),
    };
    for case in cases {
        report.cases += 1;
        let objects = || case.iter().map(|k| rule.format_object(k)).collect();
        match check(&case) {
            Ok(None) => {}
            Ok(Some((lhs, rhs))) => {
                report.verdict = Verdict::Fails;
                report.counterexample = Some(Counterexample { objects: objects(), lhs, rhs });
                break;
            }
            Err(e) if is_budget(&e) => {
                report.verdict = Verdict::BudgetExceeded;
                report.note = Some(e.to_string());
                break;
            }
            Err(e) => {
                report.verdict = Verdict::Fails;
                report.counterexample = Some(Counterexample {
                    objects: objects(),
                    lhs: format!("error: {e}"),
                    rhs: String::new(),
                });
                break;
            }
        }
    }
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

fn compare<T: PartialEq>(lhs: T, rhs: T, show: impl Fn(&T) -> String) -> Outcome {
    Ok(if lhs == rhs { None } else { Some((show(&lhs), show(&rhs))) })
}

fn show_mset<T: Ord>(rule: &Rule, m: &Multiset<T>, item: impl Fn(&Rule, &T) -> String) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|(x, n)| {
            if *n == BigUint::from(1u32) {
                item(rule, x)
            } else {
                format!("{n} x {}", item(rule, x))
            }
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn show_key(rule: &Rule, k: &ObjectKey) -> String {
    rule.format_object(k)
}

fn show_tuple(rule: &Rule, t: &[ObjectKey]) -> String {
    format!("({})", t.iter().map(|k| rule.format_object(k)).collect::<Vec<_>>().join(", "))
}

fn show_pair(rule: &Rule, p: &(ObjectKey, ObjectKey)) -> String {
    show_tuple(rule, &[p.0.clone(), p.1.clone()])
}

fn show_element(rule: &Rule, x: &Element) -> String {
    x.display_with(|k| rule.format_object(k)).to_string()
}

fn show_tensor(rule: &Rule, t: &TensorElement) -> String {
    t.display_with(|k| rule.format_object(k)).to_string()
}

fn within(budget: u64, m: &BigUint, at: &ObjectKey) -> Result<()> {
    if m.to_u64().is_none_or(|c| c > budget) {
        return Err(HopfError::BudgetExceeded {
            object: at.to_string(),
            budget,
        });
    }
    Ok(())
}

/// Checks one condition on every object, pair or triple of the domain.
pub fn check_condition(rule: &Rule, condition: Condition, dom: &Domain) -> Result<Report> {
    use Condition::*;
    let declared = rule.declares(condition);
    let name = condition.as_str();
    let void = rule.neutral().clone();
    let budget = dom.budget;
    let report = match condition {
        C1 => sweep(rule, name, declared, dom.tuples(2)?, |c| {
            within(budget, &rule.compose(&c[0], &c[1])?.cardinality(), &c[0])?;
            Ok(None)
        }),
        C2 => sweep(rule, name, declared, dom.tuples(3)?, |c| {
            let (g3, g2, g1) = (&c[0], &c[1], &c[2]);
            let lhs = rule.compose_msets(&Multiset::singleton(g3.clone()), &rule.compose(g2, g1)?)?;
            let rhs = rule.compose_msets(&rule.compose(g3, g2)?, &Multiset::singleton(g1.clone()))?;
            compare(lhs, rhs, |m| show_mset(rule, m, show_key))
        }),
        C3 => sweep(rule, name, declared, dom.singles(), |c| {
            let g = &c[0];
            let expected = Multiset::singleton(g.clone());
            let left = rule.compose(&void, g)?;
            if left != expected {
                return compare(left, expected, |m| show_mset(rule, m, show_key));
            }
            compare(rule.compose(g, &void)?, expected, |m| show_mset(rule, m, show_key))
        }),
        C4 => sweep(rule, name, declared, dom.tuples(2)?, |c| {
            compare(rule.compose(&c[0], &c[1])?, rule.compose(&c[1], &c[0])?, |m| {
                show_mset(rule, m, show_key)
            })
        }),
        D1 => sweep(rule, name, declared, dom.singles(), |c| {
            within(budget, &rule.decompose(&c[0])?.cardinality(), &c[0])?;
            Ok(None)
        }),
        D2 => sweep(rule, name, declared, dom.singles(), |c| {
            let left = rule.iterated_decompose_with(&c[0], 2, Strategy::LeftFirst)?;
            let right = rule.iterated_decompose_with(&c[0], 2, Strategy::RightFirst)?;
            compare(left, right, |m| show_mset(rule, m, |r, t| show_tuple(r, t)))
        }),
        D3 => sweep(rule, name, declared, dom.singles(), |c| {
            let g = &c[0];
            let trivial = rule.decompose(g)?.filter(|(a, b)| a.is_void() || b.is_void() || a == g || b == g);
            let expected: Multiset<(ObjectKey, ObjectKey)> = if g == &void {
                Multiset::singleton((void.clone(), void.clone()))
            } else {
                [(void.clone(), g.clone()), (g.clone(), void.clone())].into_iter().collect()
            };
            compare(trivial, expected, |m| show_mset(rule, m, show_pair))
        }),
        D4 => sweep(rule, name, declared, dom.singles(), |c| {
            let d = rule.decompose(&c[0])?;
            let swapped = d.clone().map(|(a, b)| (b, a));
            compare(d, swapped, |m| show_mset(rule, m, show_pair))
        }),
        D5 => {
            let graded = rule.declares(CD2);
            sweep(rule, name, declared, dom.singles(), |c| {
                let g = &c[0];
                let mut remaining = budget;
                let mut memo = HashMap::new();
                if graded {
                    let n = rule.size(g)? + 1;
                    let tuples = rule.nontrivial_with(g, n, Strategy::LeftFirst, &mut remaining, &mut memo)?;
                    return Ok((!tuples.is_empty()).then(|| {
                        (
                            format!("{} void-free {n}-fold splittings", tuples.cardinality()),
                            "none".to_string(),
                        )
                    }));
                }
                // no a-priori bound on N: search until empty or out of budget
                let mut n = 1;
                loop {
                    if rule.nontrivial_with(g, n, Strategy::LeftFirst, &mut remaining, &mut memo)?.is_empty() {
                        return Ok(None);
                    }
                    n += 1;
                }
            })
        }
        CD1 => sweep(rule, name, declared, dom.tuples(2)?, |c| {
            let (g2, g1) = (&c[0], &c[1]);
            let lhs = rule.decompose_mset(&rule.compose(g2, g1)?)?;
            let mut rhs = Multiset::new();
            let d2 = rule.decompose(g2)?;
            let d1 = rule.decompose(g1)?;
            for ((a2, b2), m2) in d2.iter() {
                for ((a1, b1), m1) in d1.iter() {
                    let left = rule.compose(a2, a1)?;
                    let right = rule.compose(b2, b1)?;
                    let m = m2 * m1;
                    for (l, ml) in left.iter() {
                        for (r, mr) in right.iter() {
                            rhs.insert_many((l.clone(), r.clone()), &m * ml * mr);
                        }
                    }
                }
            }
            compare(lhs, rhs, |m| show_mset(rule, m, show_pair))
        }),
        CD2 => {
            let mut cases = dom.singles();
            cases.extend(dom.tuples(2)?);
            sweep(rule, name, declared, cases, |c| {
                if let [g] = c {
                    let n = rule.size(g)?;
                    if n == 0 && g != &void {
                        return Ok(Some((format!("size {n}"), "only void has size 0".into())));
                    }
                    for ((a, b), _) in rule.decompose(g)?.iter() {
                        let (sa, sb) = (rule.size(a)?, rule.size(b)?);
                        if sa + sb != n {
                            return Ok(Some((
                                format!("|{}| + |{}| = {}", rule.format_object(a), rule.format_object(b), sa + sb),
                                format!("{n}"),
                            )));
                        }
                    }
                    return Ok(None);
                }
                let n = rule.size(&c[0])? + rule.size(&c[1])?;
                for g in rule.compose(&c[0], &c[1])?.elements() {
                    let s = rule.size(g)?;
                    if s != n {
                        return Ok(Some((format!("|{}| = {s}", rule.format_object(g)), format!("{n}"))));
                    }
                }
                Ok(None)
            })
        }
    };
    Ok(report)
}

/// Checks the given conditions in order.
pub fn check_conditions(rule: &Rule, conditions: &[Condition], dom: &Domain) -> Result<Vec<Report>> {
    conditions.iter().map(|&c| check_condition(rule, c, dom)).collect()
}

/// Conditions a rule must declare for [`check_hopf`].
pub const HOPF_REQUIRED: [Condition; 8] = [
    Condition::C1,
    Condition::C2,
    Condition::C3,
    Condition::D1,
    Condition::D2,
    Condition::D3,
    Condition::CD1,
    Condition::D5,
];

/// Verifies the bialgebra laws, both antipode identities, agreement of the two
/// antipode algorithms, their independence of the splitting order, and the
/// involution property for commutative or cocommutative rules.
pub fn check_hopf(rule: &Rule, dom: &Domain) -> Result<Report> {
    rule.require(&HOPF_REQUIRED)?;
    let start = Instant::now();
    let budget = dom.budget;
    let basis = |k: &ObjectKey| Element::basis(k.clone());
    let s_rec = |k: &ObjectKey| hopf::antipode_rec(rule, k);
    let mut subs = Vec::new();

    subs.push(sweep(rule, "delta-morphism", true, dom.tuples(2)?, |c| {
        let lhs = hopf::coproduct(rule, &hopf::mul(rule, &basis(&c[0]), &basis(&c[1]))?)?;
        let rhs = hopf::tensor_mul(
            rule,
            &hopf::coproduct(rule, &basis(&c[0]))?,
            &hopf::coproduct(rule, &basis(&c[1]))?,
        )?;
        compare(lhs, rhs, |t| show_tensor(rule, t))
    }));
    subs.push(sweep(rule, "epsilon-morphism", true, dom.tuples(2)?, |c| {
        let lhs = hopf::counit(rule, &hopf::mul(rule, &basis(&c[0]), &basis(&c[1]))?)?;
        let rhs = hopf::counit(rule, &basis(&c[0]))? * hopf::counit(rule, &basis(&c[1]))?;
        compare(lhs, rhs, format_rational)
    }));
    for (label, right) in [("antipode-left", true), ("antipode-right", false)] {
        subs.push(sweep(rule, label, true, dom.singles(), |c| {
            let delta = hopf::coproduct(rule, &basis(&c[0]))?;
            let lhs = hopf::mu(rule, &hopf::map_tensor_factor(&delta, right, s_rec)?)?;
            let rhs = hopf::counit_projection(rule, &basis(&c[0]))?;
            compare(lhs, rhs, |x| show_element(rule, x))
        }));
    }
    subs.push(sweep(rule, "antipode-agreement", true, dom.singles(), |c| {
        let sum = hopf::antipode_sum_with(rule, &c[0], budget, Strategy::LeftFirst)?;
        compare(sum, s_rec(&c[0])?, |x| show_element(rule, x))
    }));
    subs.push(sweep(rule, "strategy-stability", true, dom.singles(), |c| {
        let left = hopf::antipode_sum_with(rule, &c[0], budget, Strategy::LeftFirst)?;
        let right = hopf::antipode_sum_with(rule, &c[0], budget, Strategy::RightFirst)?;
        compare(left, right, |x| show_element(rule, x))
    }));
    if rule.declares(Condition::C4) || rule.declares(Condition::D4) {
        subs.push(sweep(rule, "involution", true, dom.singles(), |c| {
            let s = s_rec(&c[0])?;
            let ss = hopf::antipode(rule, &s, AntipodeAlgorithm::Recursive)?;
            compare(ss, basis(&c[0]), |x| show_element(rule, x))
        }));
    }

    let verdict = if subs.iter().any(|r| r.verdict == Verdict::Fails) {
        Verdict::Fails
    } else if subs.iter().any(|r| r.verdict == Verdict::BudgetExceeded) {
        Verdict::BudgetExceeded
    } else {
        Verdict::Holds
    };
    let counterexample = subs.iter().find(|r| r.verdict == Verdict::Fails).and_then(|r| r.counterexample.clone());
    Ok(Report {
        rule: rule.name().to_string(),
        condition: "hopf".to_string(),
        verdict,
        cases: subs.iter().map(|r| r.cases).sum(),
        counterexample,
        note: None,
        declared: true,
        elapsed_ms: start.elapsed().as_millis() as u64,
        subreports: subs,
    })
}

/// No repeated keys and Ø first.
pub fn domain_is_well_formed(dom: &Domain) -> bool {
    let unique: HashSet<&ObjectKey> = dom.objects.iter().collect();
    unique.len() == dom.objects.len() && dom.objects.first() == Some(dom.rule.neutral())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::make_rule;

    fn dom(name: &str, bound: usize) -> (Rule, Domain) {
        let r = make_rule(name, None).unwrap();
        let d = Domain::new(&r, bound).unwrap();
        (r, d)
    }

    #[test]
    fn free_c2_holds_on_short_words() {
        let (r, d) = dom("free", 3);
        let rep = check_condition(&r, Condition::C2, &d).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_eq!(rep.cases, 15u64.pow(3));
    }

    #[test]
    fn shuffle_d4_counterexample_is_ab() {
        let (r, d) = dom("shuffle", 3);
        let rep = check_condition(&r, Condition::D4, &d).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert!(!rep.declared);
        assert!(rep.agrees_with_declaration());
        let cx = rep.counterexample.unwrap();
        assert_eq!(cx.objects, vec!["w\"ab\"".to_string()]);
        assert!(cx.lhs.contains("(w\"b\", w\"a\")"));
        assert!(!cx.lhs.contains("(w\"a\", w\"b\")"));
    }

    #[test]
    fn forest_cd2_holds() {
        let (r, d) = dom("forest", 4);
        assert_eq!(check_condition(&r, Condition::CD2, &d).unwrap().verdict, Verdict::Holds);
    }

    #[test]
    fn free_c4_fails_on_two_letters() {
        let (r, d) = dom("free", 2);
        let rep = check_condition(&r, Condition::C4, &d).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert_eq!(rep.counterexample.unwrap().objects, vec!["w\"a\"", "w\"b\""]);
    }

    #[test]
    fn hopf_on_void_only() {
        let r = make_rule("graph", None).unwrap();
        let d = Domain::from_objects(&r, vec![ObjectKey::void()], 0).unwrap();
        let rep = check_hopf(&r, &d).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(domain_is_well_formed(&d));
    }

    #[test]
    fn polynomial_hopf_and_spot_value() {
        let (r, d) = dom("polynomial", 6);
        assert_eq!(check_hopf(&r, &d).unwrap().verdict, Verdict::Holds);
        let x3 = Element::basis(ObjectKey::new("xxx"));
        let delta = hopf::coproduct(&r, &x3).unwrap();
        let lhs = hopf::mu(&r, &hopf::map_tensor_factor(&delta, true, |k| hopf::antipode_rec(&r, k)).unwrap()).unwrap();
        assert!(lhs.is_zero());
    }

    #[test]
    fn undeclared_hopf_is_refused() {
        let r = crate::rule::Rule::builder("bare")
            .compose(|a, b| Ok(Multiset::singleton(ObjectKey::new(format!("{a}{b}")))))
            .decompose(|g| Ok(Multiset::singleton((ObjectKey::void(), g.clone()))))
            .size(|g| Ok(g.as_str().len()))
            .declare([Condition::C1])
            .build()
            .unwrap();
        let d = Domain::from_objects(&r, vec![ObjectKey::void()], 0).unwrap();
        assert!(matches!(check_hopf(&r, &d), Err(HopfError::ConditionNotDeclared { .. })));
    }

    #[test]
    fn reports_serialize() {
        let (r, d) = dom("shuffle", 2);
        let rep = check_condition(&r, Condition::D4, &d).unwrap();
        let json: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(json["verdict"], "fails");
        assert_eq!(json["condition"], "D4");
        assert!(json["counterexample"]["objects"].is_array());
        let back: Report = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        let holds = check_condition(&r, Condition::D1, &d).unwrap();
        let json: serde_json::Value = serde_json::from_str(&holds.to_json()).unwrap();
        assert!(json.get("counterexample").is_none());
    }

    #[test]
    fn non_graded_d5_uses_the_search() {
        // a decomposition that keeps splitting off the object itself never terminates
        let r = crate::rule::Rule::builder("loop")
            .compose(|a, b| Ok(Multiset::singleton(ObjectKey::new(format!("{a}{b}")))))
            .decompose(|g| {
                let mut m: Multiset<_> = [(ObjectKey::void(), g.clone()), (g.clone(), ObjectKey::void())].into_iter().collect();
                if !g.is_void() {
                    m.insert((g.clone(), g.clone()));
                }
                Ok(m)
            })
            .size(|g| Ok(g.as_str().len()))
            .build()
            .unwrap();
        let d = Domain::from_objects(&r, vec![ObjectKey::void(), ObjectKey::new("a")], 1).unwrap().with_budget(1000);
        let rep = check_condition(&r, Condition::D5, &d).unwrap();
        assert_eq!(rep.verdict, Verdict::BudgetExceeded);
        assert!(rep.note.is_some());
    }
}
