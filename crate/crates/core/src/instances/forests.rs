//! Unordered rooted trees and forests (multisets of trees) with the
//! trimming decomposition: a proper subtree sharing the root stays on the
//! right, the forest of cut-off branches goes to the left.
//!
//! Keys are nested brackets: a leaf is `[]`, a tree is `[c1,c2,...]` with its
//! children's keys sorted, and a forest is its sorted tree keys joined by `,`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{HopfError, Result};
use crate::multiset::Multiset;
use crate::rule::{Condition, ObjectKey, ObjectSyntax, Rule};

/// Splits a comma-separated list of bracketed items at top level.
fn split_top(s: &str) -> Option<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    if !s.is_empty() {
        out.push(&s[start..]);
    }
    Some(out)
}

pub fn tree_key(children: impl IntoIterator<Item = String>) -> String {
    let mut cs: Vec<String> = children.into_iter().collect();
    cs.sort();
    format!("[{}]", cs.join(","))
}

pub fn forest_key<S: AsRef<str>>(trees: impl IntoIterator<Item = S>) -> String {
    let mut ts: Vec<String> = trees
        .into_iter()
        .filter(|t| !t.as_ref().is_empty())
        .flat_map(|t| split_top(t.as_ref()).unwrap_or_default().into_iter().map(str::to_string).collect::<Vec<_>>())
        .collect();
    ts.sort();
    ts.join(",")
}

fn tree_children(tree: &str) -> &str {
    &tree[1..tree.len() - 1]
}

/// Checks that `key` is a canonical forest key and returns its trees.
fn forest_trees(key: &str) -> Result<Vec<&str>> {
    fn canonical_tree(t: &str) -> bool {
        if !(t.starts_with('[') && t.ends_with(']')) || t.len() < 2 {
            return false;
        }
        match split_top(tree_children(t)) {
            Some(cs) => cs.windows(2).all(|w| w[0] <= w[1]) && cs.iter().all(|c| canonical_tree(c)),
            None => false,
        }
    }
    let bad = || HopfError::malformed(key, "not a canonical forest key");
    let trees = split_top(key).ok_or_else(bad)?;
    if !trees.windows(2).all(|w| w[0] <= w[1]) || !trees.iter().all(|t| canonical_tree(t)) {
        return Err(bad());
    }
    Ok(trees)
}

fn vertex_count(key: &str) -> usize {
    key.matches('[').count()
}

/// Multiset of `(cut forest, kept subtree)` over all proper subtrees, the
/// empty subtree included.
fn tree_splits(tree: &str, memo: &Mutex<HashMap<String, Multiset<(String, String)>>>) -> Multiset<(String, String)> {
    if let Some(hit) = memo.lock().unwrap().get(tree) {
        return hit.clone();
    }
    let children = split_top(tree_children(tree)).unwrap_or_default();
    // root kept: each child independently contributes a split of itself
    let mut acc: Multiset<(String, Vec<String>)> = Multiset::singleton((String::new(), Vec::new()));
    for child in children {
        let child_splits = tree_splits(child, memo);
        let mut next = Multiset::new();
        for ((cut, kept), m) in acc.iter() {
            for ((ccut, ckept), cm) in child_splits.iter() {
                let mut kept = kept.clone();
                if !ckept.is_empty() {
                    kept.push(ckept.clone());
                    kept.sort();
                }
                next.insert_many((forest_key([cut.as_str(), ccut.as_str()]), kept), m * cm);
            }
        }
        acc = next;
    }
    let mut out: Multiset<(String, String)> = acc.map(|(cut, kept)| (cut, tree_key(kept)));
    out.insert((tree.to_string(), String::new()));
    memo.lock().unwrap().insert(tree.to_string(), out.clone());
    out
}

type SplitMemo = Mutex<HashMap<String, Multiset<(String, String)>>>;

/// Decomposition of a forest: the product of its trees' decompositions.
fn forest_splits(trees: &[&str], memo: &SplitMemo) -> Multiset<(ObjectKey, ObjectKey)> {
    let mut acc: Multiset<(String, String)> = Multiset::singleton((String::new(), String::new()));
    for t in trees {
        let splits = tree_splits(t, memo);
        let mut next = Multiset::new();
        for ((l, r), m) in acc.iter() {
            for ((cl, cr), cm) in splits.iter() {
                next.insert_many(
                    (forest_key([l.as_str(), cl.as_str()]), forest_key([r.as_str(), cr.as_str()])),
                    m * cm,
                );
            }
        }
        acc = next;
    }
    acc.map(|(l, r)| (ObjectKey::new(l), ObjectKey::new(r)))
}

/// All trees with exactly `n` vertices, and all forests with exactly `n` vertices.
pub struct ForestCatalog {
    trees: BTreeMap<usize, Vec<String>>,
    forests: BTreeMap<usize, Vec<String>>,
}

impl ForestCatalog {
    pub fn up_to(bound: usize) -> Self {
        let mut cat = ForestCatalog {
            trees: BTreeMap::new(),
            forests: BTreeMap::new(),
        };
        cat.forests.insert(0, vec![String::new()]);
        for n in 1..=bound {
            let trees: BTreeSet<String> = cat.forests[&(n - 1)]
                .iter()
                .map(|f| format!("[{f}]"))
                .collect();
            cat.trees.insert(n, trees.into_iter().collect());
            let mut forests = BTreeSet::new();
            for k in 1..=n {
                for t in &cat.trees[&k] {
                    for f in &cat.forests[&(n - k)] {
                        forests.insert(forest_key([t.as_str(), f.as_str()]));
                    }
                }
            }
            cat.forests.insert(n, forests.into_iter().collect());
        }
        cat
    }

    pub fn trees(&self, n: usize) -> &[String] {
        self.trees.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn forests(&self, n: usize) -> &[String] {
        self.forests.get(&n).map(Vec::as_slice).unwrap_or(&[])
    }
}

struct ForestSyntax;

impl ForestSyntax {
    /// Parses `t(...)` starting at byte `pos`; returns the canonical tree key and the end offset.
    fn tree(text: &str, pos: usize) -> Result<(String, usize)> {
        let bytes = text.as_bytes();
        let mut i = skip_ws(text, pos);
        if !text[i..].starts_with("t(") {
            return Err(HopfError::parse_at(text, i, "expected a tree literal `t(...)`"));
        }
        i += 2;
        let mut children = Vec::new();
        i = skip_ws(text, i);
        if bytes.get(i) == Some(&b')') {
            return Ok((tree_key(children), i + 1));
        }
        loop {
            let (child, end) = Self::tree(text, i)?;
            children.push(child);
            i = skip_ws(text, end);
            match bytes.get(i) {
                Some(b',') => i += 1,
                Some(b')') => return Ok((tree_key(children), i + 1)),
                _ => return Err(HopfError::parse_at(text, i, "expected `,` or `)` in tree literal")),
            }
        }
    }
}

fn skip_ws(text: &str, mut i: usize) -> usize {
    while text[i..].starts_with(char::is_whitespace) {
        i += text[i..].chars().next().unwrap().len_utf8();
    }
    i
}

impl ObjectSyntax for ForestSyntax {
    fn parse(&self, text: &str) -> Result<ObjectKey> {
        let start = skip_ws(text, 0);
        let rest = &text[start..];
        let (key, end) = if rest.starts_with("void") {
            (String::new(), start + 4)
        } else if rest.starts_with("t(") {
            Self::tree(text, start)?
        } else if rest.starts_with("f[") {
            let bytes = text.as_bytes();
            let mut i = skip_ws(text, start + 2);
            let mut trees = Vec::new();
            if bytes.get(i) == Some(&b']') {
                (String::new(), i + 1)
            } else {
                loop {
                    let (t, end) = Self::tree(text, i)?;
                    trees.push(t);
                    i = skip_ws(text, end);
                    match bytes.get(i) {
                        Some(b',') => i += 1,
                        Some(b']') => break,
                        _ => return Err(HopfError::parse_at(text, i, "expected `,` or `]` in forest literal")),
                    }
                }
                (forest_key(trees), i + 1)
            }
        } else {
            return Err(HopfError::parse_at(text, start, "expected `t(...)`, `f[...]` or `void`"));
        };
        let end = skip_ws(text, end);
        if end != text.len() {
            return Err(HopfError::parse_at(text, end, "unexpected trailing input"));
        }
        Ok(ObjectKey::new(key))
    }

    fn format(&self, key: &ObjectKey) -> String {
        fn tree(t: &str) -> String {
            let cs = split_top(tree_children(t)).unwrap_or_default();
            format!("t({})", cs.iter().map(|c| tree(c)).collect::<Vec<_>>().join(","))
        }
        let trees = split_top(key.as_str()).unwrap_or_default();
        match trees.as_slice() {
            [] => "void".to_string(),
            [one] => tree(one),
            many => format!("f[{}]", many.iter().map(|t| tree(t)).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Decomposition of a single canonical tree key (for the generic monoid builder).
pub fn tree_decomposition(tree: &ObjectKey) -> Result<Multiset<(ObjectKey, ObjectKey)>> {
    let trees = forest_trees(tree.as_str())?;
    if trees.len() != 1 {
        return Err(HopfError::malformed(tree.as_str(), "expected a single tree"));
    }
    let memo = Mutex::new(HashMap::new());
    Ok(tree_splits(trees[0], &memo).map(|(l, r)| (ObjectKey::new(l), ObjectKey::new(r))))
}

/// The trees of a canonical forest key, as keys.
pub fn forest_factors(forest: &ObjectKey) -> Result<Vec<ObjectKey>> {
    Ok(forest_trees(forest.as_str())?.into_iter().map(ObjectKey::new).collect())
}

/// Forest union.
pub fn forest_union(a: &ObjectKey, b: &ObjectKey) -> Result<ObjectKey> {
    forest_trees(a.as_str())?;
    forest_trees(b.as_str())?;
    Ok(ObjectKey::new(forest_key([a.as_str(), b.as_str()])))
}

pub fn forest_size(g: &ObjectKey) -> Result<usize> {
    forest_trees(g.as_str())?;
    Ok(vertex_count(g.as_str()))
}

pub fn forest_syntax() -> Arc<dyn ObjectSyntax> {
    Arc::new(ForestSyntax)
}

pub fn forest_basis(bound: usize) -> Vec<ObjectKey> {
    let cat = ForestCatalog::up_to(bound);
    (0..=bound).flat_map(|n| cat.forests(n).iter().map(ObjectKey::new).collect::<Vec<_>>()).collect()
}

/// Forests under union with the trimming decomposition (Connes–Kreimer).
pub fn forest() -> Result<Rule> {
    use Condition::*;
    let memo: Arc<SplitMemo> = Arc::new(Mutex::new(HashMap::new()));
    Rule::builder("forest")
        .compose(|a, b| Ok(Multiset::singleton(forest_union(a, b)?)))
        .decompose(move |g| Ok(forest_splits(&forest_trees(g.as_str())?, &memo)))
        .size(forest_size)
        .basis(forest_basis)
        .declare([C1, C2, C3, C4, D1, D2, D3, D5, CD1, CD2])
        .syntax(forest_syntax())
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> ObjectKey {
        ObjectKey::new(s)
    }

    #[test]
    fn canonical_literals() {
        let r = forest().unwrap();
        assert_eq!(r.parse_object("t(t(),t())").unwrap(), k("[[],[]]"));
        assert_eq!(r.parse_object("t(t(t()),t())").unwrap(), r.parse_object("t(t(),t(t()))").unwrap());
        assert_eq!(r.parse_object("f[t(t()),t()]").unwrap(), k("[[]],[]"));
        assert_eq!(r.parse_object("f[]").unwrap(), k(""));
        assert!(matches!(r.parse_object("t(t()"), Err(HopfError::Parse { .. })));
        assert!(matches!(r.parse_object("t() x"), Err(HopfError::Parse { .. })));
        assert_eq!(r.format_object(&k("[[],[]]")), "t(t(),t())");
        assert_eq!(r.format_object(&k("[[]],[]")), "f[t(t()),t()]");
        assert!(r.size(&k("[[]")).is_err());
        assert!(r.size(&k("[],[]]")).is_err());
        // children out of order is not canonical
        assert!(r.size(&k("[[],[[]]]")).is_err());
        assert!(r.size(&k("[],[[]]")).is_err());
    }

    #[test]
    fn sizes_count_vertices() {
        let r = forest().unwrap();
        assert_eq!(r.size(&k("[],[]")).unwrap(), 2);
        assert_eq!(r.size(&k("")).unwrap(), 0);
        assert_eq!(r.size(&k("[[[]],[]]")).unwrap(), 4);
    }

    #[test]
    fn chain_decomposition() {
        let r = forest().unwrap();
        let t2 = k("[[]]");
        let dot = k("[]");
        let expected: Multiset<_> = [(t2.clone(), k("")), (dot.clone(), dot), (k(""), t2.clone())].into_iter().collect();
        assert_eq!(r.decompose(&t2).unwrap(), expected);
    }

    #[test]
    fn cherry_is_not_symmetric() {
        let r = forest().unwrap();
        let d = r.decompose(&k("[[],[]]")).unwrap();
        assert_eq!(d.multiplicity(&(k("[]"), k("[[]]"))), 2u32.into());
        assert_eq!(d.multiplicity(&(k("[],[]"), k("[]"))), 1u32.into());
        assert_eq!(d.multiplicity(&(k("[]"), k("[],[]"))), 0u32.into());
    }

    #[test]
    fn union_is_commutative() {
        let r = forest().unwrap();
        let a = k("[[]]");
        let b = k("[],[]");
        assert_eq!(r.compose(&a, &b).unwrap(), r.compose(&b, &a).unwrap());
        assert_eq!(r.compose(&a, &b).unwrap(), Multiset::singleton(k("[[]],[],[]")));
    }

    #[test]
    fn catalog_counts() {
        let cat = ForestCatalog::up_to(6);
        let trees: Vec<usize> = (1..=6).map(|n| cat.trees(n).len()).collect();
        assert_eq!(trees, vec![1, 1, 2, 4, 9, 20]);
        let forests: Vec<usize> = (0..=5).map(|n| cat.forests(n).len()).collect();
        assert_eq!(forests, vec![1, 1, 2, 4, 9, 20]);
        assert_eq!(forest_basis(2), vec![k(""), k("[]"), k("[[]]"), k("[],[]")]);
    }
}
