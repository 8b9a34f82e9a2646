//! Undirected multigraphs (loops allowed, no isolated vertices) up to
//! isomorphism, composed by disjoint union and decomposed by ordered
//! partitions of the edge set.
//!
//! Canonical form: every connected component is relabeled to the
//! lexicographically smallest edge list among the labelings that respect a
//! colour refinement of its vertices; components are then sorted and laid out
//! on consecutive labels starting at 1. The key is the edge list `u-v,u-v,...`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{HopfError, Result};
use crate::multiset::Multiset;
use crate::rule::{Condition, ObjectKey, ObjectSyntax, Rule};

pub type Edge = (u32, u32);

fn norm(e: Edge) -> Edge {
    if e.0 <= e.1 {
        e
    } else {
        (e.1, e.0)
    }
}

/// Connected components of an edge list, each relabeled onto `0..k` in order
/// of first appearance of its vertices.
fn components(edges: &[Edge]) -> Vec<Vec<Edge>> {
    let mut verts: Vec<u32> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let index: HashMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, index[&u]), find(&mut parent, index[&v]));
        if a != b {
            parent[a] = b;
        }
    }
    let mut groups: Vec<(usize, Vec<Edge>)> = Vec::new();
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    for &(u, v) in edges {
        let root = find(&mut parent, index[&u]);
        let g = *group_of.entry(root).or_insert_with(|| {
            groups.push((root, Vec::new()));
            groups.len() - 1
        });
        groups[g].1.push((u, v));
    }
    groups
        .into_iter()
        .map(|(_, es)| {
            let mut local: HashMap<u32, u32> = HashMap::new();
            es.iter()
                .map(|&(u, v)| {
                    let n = local.len() as u32;
                    let a = *local.entry(u).or_insert(n);
                    let n = local.len() as u32;
                    let b = *local.entry(v).or_insert(n);
                    (a, b)
                })
                .collect()
        })
        .collect()
}

/// Iterated colour refinement; returns a class index per vertex, ordered
/// by an isomorphism-invariant signature.
fn refine(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut loops = vec![0usize; n];
    for &(u, v) in edges {
        let (u, v) = (u as usize, v as usize);
        if u == v {
            loops[u] += 1;
        } else {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut class: Vec<usize> = {
        let sig: Vec<(usize, usize)> = (0..n).map(|v| (adj[v].len(), loops[v])).collect();
        rank(&sig)
    };
    loop {
        let sig: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = adj[v].iter().map(|&w| class[w]).collect();
                nb.sort_unstable();
                (class[v], nb)
            })
            .collect();
        let next = rank(&sig);
        let before = class.iter().collect::<BTreeSet<_>>().len();
        let after = next.iter().collect::<BTreeSet<_>>().len();
        class = next;
        if after == before {
            return class;
        }
    }
}

fn rank<T: Ord + Clone>(sig: &[T]) -> Vec<usize> {
    let mut distinct: Vec<T> = sig.to_vec();
    distinct.sort();
    distinct.dedup();
    sig.iter().map(|s| distinct.binary_search(s).unwrap()).collect()
}

/// Lexicographically minimal edge list (labels `1..=k`) of a connected
/// component over all labelings compatible with the refined classes.
fn canonical_component(local: &[Edge]) -> Vec<Edge> {
    let n = local.iter().map(|&(u, v)| u.max(v) as usize + 1).max().unwrap_or(0);
    let class = refine(n, local);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    // high-signature classes (e.g. high degree) take the small labels
    for c in (0..=class.iter().copied().max().unwrap_or(0)).rev() {
        classes.push((0..n).filter(|&v| class[v] == c).collect());
    }
    // labels are handed out class by class; the order inside a class is searched
    let mut label = vec![0u32; n];
    let mut best: Option<Vec<Edge>> = None;
    fn search(
        ci: usize,
        next_label: u32,
        classes: &[Vec<usize>],
        label: &mut Vec<u32>,
        local: &[Edge],
        best: &mut Option<Vec<Edge>>,
    ) {
        if ci == classes.len() {
            let mut es: Vec<Edge> = local
                .iter()
                .map(|&(u, v)| norm((label[u as usize] + 1, label[v as usize] + 1)))
                .collect();
            es.sort_unstable();
            if best.as_ref().is_none_or(|b| es < *b) {
                *best = Some(es);
            }
            return;
        }
        let mut members = classes[ci].clone();
        permute(&mut members, 0, &mut |perm| {
            for (i, &v) in perm.iter().enumerate() {
                label[v] = next_label + i as u32;
            }
            search(ci + 1, next_label + perm.len() as u32, classes, label, local, best);
        });
    }
    search(0, 0, &classes, &mut label, local, &mut best);
    best.unwrap_or_default()
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Canonicalizer with a memo of already canonicalized components.
#[derive(Default)]
pub struct GraphCanon {
    memo: Mutex<HashMap<Vec<Edge>, Vec<Edge>>>,
    // canonical components of keys already validated
    parts: Mutex<HashMap<ObjectKey, Arc<Vec<Vec<Edge>>>>>,
}

const PARTS_LIMIT: usize = 1 << 18;
const SPLITS_LIMIT: usize = 1 << 14;

impl GraphCanon {
    fn component(&self, local: Vec<Edge>) -> Vec<Edge> {
        if let Some(hit) = self.memo.lock().unwrap().get(&local) {
            return hit.clone();
        }
        let canon = canonical_component(&local);
        self.memo.lock().unwrap().insert(local, canon.clone());
        canon
    }

    /// Canonical edge list of an arbitrary labeled multigraph.
    pub fn canonical(&self, edges: &[Edge]) -> Vec<Edge> {
        layout(self.canonical_parts(edges))
    }

    fn canonical_parts(&self, edges: &[Edge]) -> Vec<Vec<Edge>> {
        let mut comps: Vec<Vec<Edge>> = components(edges).into_iter().map(|c| self.component(c)).collect();
        comps.sort();
        comps
    }

    /// Sorted canonical components of a key; rejects keys that are not canonical.
    fn parts_of(&self, key: &ObjectKey) -> Result<Arc<Vec<Vec<Edge>>>> {
        if let Some(hit) = self.parts.lock().unwrap().get(key) {
            return Ok(hit.clone());
        }
        let edges = key_to_edges(key)?;
        let comps = self.canonical_parts(&edges);
        if layout(comps.clone()) != edges {
            return Err(HopfError::malformed(key.as_str(), "not a canonical graph key"));
        }
        let comps = Arc::new(comps);
        let mut parts = self.parts.lock().unwrap();
        if parts.len() >= PARTS_LIMIT {
            parts.clear();
        }
        parts.insert(key.clone(), comps.clone());
        Ok(comps)
    }
}

fn layout(mut comps: Vec<Vec<Edge>>) -> Vec<Edge> {
    comps.sort();
    let mut out = Vec::new();
    let mut offset = 0u32;
    for c in comps {
        let k = c.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0);
        out.extend(c.into_iter().map(|(u, v)| (u + offset, v + offset)));
        offset += k;
    }
    out
}

pub fn edges_to_key(edges: &[Edge]) -> ObjectKey {
    let s: Vec<String> = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
    ObjectKey::new(s.join(","))
}

fn key_to_edges(key: &ObjectKey) -> Result<Vec<Edge>> {
    if key.is_void() {
        return Ok(Vec::new());
    }
    key.as_str()
        .split(',')
        .map(|e| {
            let (u, v) = e
                .split_once('-')
                .ok_or_else(|| HopfError::malformed(key.as_str(), format!("bad edge `{e}`")))?;
            let u: u32 = u.parse().map_err(|_| HopfError::malformed(key.as_str(), format!("bad vertex `{u}`")))?;
            let v: u32 = v.parse().map_err(|_| HopfError::malformed(key.as_str(), format!("bad vertex `{v}`")))?;
            if u == 0 || v == 0 {
                return Err(HopfError::malformed(key.as_str(), "vertex labels start at 1"));
            }
            Ok(norm((u, v)))
        })
        .collect()
}

struct GraphSyntax {
    canon: Arc<GraphCanon>,
}

impl GraphSyntax {
    /// Edges of a canonical key; rejects keys that are not canonical.
    fn edges_of(&self, key: &ObjectKey) -> Result<Vec<Edge>> {
        Ok(layout(self.canon.parts_of(key)?.as_ref().clone()))
    }
}

/// Parses `g{u-v,...}` into a labeled edge list.
pub fn parse_graph_literal(text: &str) -> Result<Vec<Edge>> {
    let lead = text.len() - text.trim_start().len();
    let t = text.trim();
    let body = t
        .strip_prefix("g{")
        .ok_or_else(|| HopfError::parse_at(text, lead, "expected a graph literal `g{u-v,...}`"))?;
    let body = body
        .strip_suffix('}')
        .ok_or_else(|| HopfError::parse_at(text, lead + t.len(), "unterminated graph literal"))?;
    let base = lead + 2;
    let mut edges = Vec::new();
    if body.trim().is_empty() {
        return Ok(edges);
    }
    let mut offset = 0;
    for item in body.split(',') {
        let at = base + offset + (item.len() - item.trim_start().len());
        offset += item.len() + 1;
        let item = item.trim();
        let vertex = |s: &str, at: usize| -> Result<u32> {
            let s = s.trim();
            match s.parse::<u32>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(HopfError::parse_at(text, at, format!("expected a positive vertex label, found `{s}`"))),
            }
        };
        match item.split_once('-') {
            Some((u, v)) => {
                let u = vertex(u, at)?;
                let v = vertex(v, at + item.find('-').unwrap() + 1)?;
                edges.push(norm((u, v)));
            }
            None => {
                vertex(item, at)?;
                return Err(HopfError::malformed(t, format!("isolated vertex `{item}`")));
            }
        }
    }
    Ok(edges)
}

impl ObjectSyntax for GraphSyntax {
    fn parse(&self, text: &str) -> Result<ObjectKey> {
        if text.trim() == "void" {
            return Ok(ObjectKey::void());
        }
        let edges = parse_graph_literal(text)?;
        Ok(edges_to_key(&self.canon.canonical(&edges)))
    }

    fn format(&self, key: &ObjectKey) -> String {
        format!("g{{{key}}}")
    }
}

/// All isomorphism classes with at most `bound` edges, grown one edge at a time.
fn graphs_up_to(canon: &GraphCanon, bound: usize) -> Vec<ObjectKey> {
    let mut all: BTreeSet<Vec<Edge>> = BTreeSet::new();
    let mut layer: BTreeSet<Vec<Edge>> = BTreeSet::from([Vec::new()]);
    all.extend(layer.iter().cloned());
    for _ in 0..bound {
        let mut next = BTreeSet::new();
        for g in &layer {
            let n = g.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0);
            // endpoints range over existing vertices plus up to two fresh ones
            for u in 1..=n + 1 {
                for v in u..=n + 2 {
                    let mut h = g.clone();
                    h.push((u, v));
                    next.insert(canon.canonical(&h));
                }
            }
        }
        all.extend(next.iter().cloned());
        layer = next;
    }
    all.iter().map(|g| edges_to_key(g)).collect()
}

/// Graphs under disjoint union, decomposed by ordered edge bipartitions.
pub fn graph() -> Result<Rule> {
    use Condition::*;
    let canon = Arc::new(GraphCanon::default());
    let syntax = Arc::new(GraphSyntax { canon: canon.clone() });
    let s1 = syntax.clone();
    let s2 = syntax.clone();
    let s3 = syntax.clone();
    let c2 = canon.clone();
    let splits: Mutex<HashMap<ObjectKey, Multiset<(ObjectKey, ObjectKey)>>> = Mutex::default();
    Rule::builder("graph")
        .compose(move |a, b| {
            let mut comps = s1.canon.parts_of(a)?.as_ref().clone();
            comps.extend(s1.canon.parts_of(b)?.iter().cloned());
            Ok(Multiset::singleton(edges_to_key(&layout(comps))))
        })
        .decompose(move |g| {
            if let Some(hit) = splits.lock().unwrap().get(g) {
                return Ok(hit.clone());
            }
            let edges = s2.edges_of(g)?;
            let m = edges.len();
            if m >= 32 {
                return Err(HopfError::malformed(g.as_str(), "too many edges to enumerate splittings"));
            }
            let mut out = Multiset::new();
            for mask in 0u32..(1u32 << m) {
                let (mut left, mut right) = (Vec::new(), Vec::new());
                for (i, &e) in edges.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        left.push(e);
                    } else {
                        right.push(e);
                    }
                }
                out.insert((
                    edges_to_key(&s2.canon.canonical(&left)),
                    edges_to_key(&s2.canon.canonical(&right)),
                ));
            }
            let mut splits = splits.lock().unwrap();
            if splits.len() >= SPLITS_LIMIT {
                splits.clear();
            }
            splits.insert(g.clone(), out.clone());
            Ok(out)
        })
        .size(move |g| Ok(s3.edges_of(g)?.len()))
        .basis(move |bound| graphs_up_to(&c2, bound))
        .declare([C1, C2, C3, C4, D1, D2, D3, D4, D5, CD1, CD2])
        .syntax(syntax)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(r: &Rule, lit: &str) -> ObjectKey {
        r.parse_object(lit).unwrap()
    }

    /// Reference canonical form: minimum over every relabeling of the whole graph.
    fn brute_canonical(edges: &[Edge]) -> Vec<Edge> {
        let mut verts: Vec<u32> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        verts.sort_unstable();
        verts.dedup();
        let mut idx: Vec<usize> = (0..verts.len()).collect();
        let mut best: Option<Vec<Edge>> = None;
        permute(&mut idx, 0, &mut |p| {
            let lab: HashMap<u32, u32> = verts.iter().zip(p).map(|(&v, &i)| (v, i as u32 + 1)).collect();
            let mut es: Vec<Edge> = edges.iter().map(|&(u, v)| norm((lab[&u], lab[&v]))).collect();
            es.sort_unstable();
            if best.as_ref().is_none_or(|b| es < *b) {
                best = Some(es);
            }
        });
        best.unwrap_or_default()
    }

    #[test]
    fn path_literal_is_canonical_under_relabeling() {
        let r = graph().unwrap();
        let p3 = key(&r, "g{1-2,2-3}");
        for lit in ["g{2-1,3-2}", "g{1-3,3-2}", "g{7-4,4-9}", "g{3-1,1-2}"] {
            assert_eq!(key(&r, lit), p3, "{lit}");
        }
        assert_eq!(p3.as_str(), "1-2,1-3");
    }

    #[test]
    fn literal_errors() {
        let r = graph().unwrap();
        assert!(matches!(r.parse_object("g{1-2,3}"), Err(HopfError::MalformedObject { .. })));
        assert!(matches!(r.parse_object("g{0-1}"), Err(HopfError::Parse { .. })));
        assert!(matches!(r.parse_object("g{1-2"), Err(HopfError::Parse { .. })));
        assert_eq!(r.parse_object("g{}").unwrap(), ObjectKey::void());
        assert!(r.size(&ObjectKey::new("1-3")).is_err());
    }

    #[test]
    fn union_and_size() {
        let r = graph().unwrap();
        let k2 = key(&r, "g{1-2}");
        let lp = key(&r, "g{1-1}");
        let u = r.compose(&k2, &lp).unwrap();
        assert_eq!(u, r.compose(&lp, &k2).unwrap());
        assert_eq!(u, Multiset::singleton(key(&r, "g{5-6,9-9}")));
        assert_eq!(r.size(&key(&r, "g{1-2,2-3,3-1}")).unwrap(), 3);
    }

    #[test]
    fn path_decomposition_aggregates() {
        let r = graph().unwrap();
        let p3 = key(&r, "g{1-2,2-3}");
        let k2 = key(&r, "g{1-2}");
        let d = r.decompose(&p3).unwrap();
        assert_eq!(d.multiplicity(&(k2.clone(), k2)), 2u32.into());
        assert_eq!(d.cardinality(), 4u32.into());
        assert_eq!(d.distinct_len(), 3);
    }

    #[test]
    fn enumeration_matches_orbit_count() {
        // every edge multiset over {1..2b} with ≤ b edges, canonicalized by the
        // whole-graph brute force; count the distinct classes
        for bound in 0..=3usize {
            let nv = (2 * bound) as u32;
            let pairs: Vec<Edge> = (1..=nv).flat_map(|u| (u..=nv).map(move |v| (u, v))).collect();
            let mut classes: BTreeSet<Vec<Edge>> = BTreeSet::new();
            fn rec(pairs: &[Edge], start: usize, left: usize, cur: &mut Vec<Edge>, out: &mut BTreeSet<Vec<Edge>>) {
                out.insert(brute_canonical(cur));
                if left == 0 {
                    return;
                }
                for i in start..pairs.len() {
                    cur.push(pairs[i]);
                    rec(pairs, i, left - 1, cur, out);
                    cur.pop();
                }
            }
            rec(&pairs, 0, bound, &mut Vec::new(), &mut classes);
            let r = graph().unwrap();
            let basis = r.enumerate_basis(bound).unwrap();
            assert_eq!(basis.len(), classes.len(), "bound {bound}");
            if bound == 2 {
                assert_eq!(basis.len(), 10);
            }
        }
    }

    #[test]
    fn canonical_form_is_a_complete_invariant_on_small_graphs() {
        // two graphs get the same key iff the brute-force forms agree
        let canon = GraphCanon::default();
        let samples: Vec<Vec<Edge>> = vec![
            vec![(1, 2), (3, 4), (4, 5)],
            vec![(4, 5), (1, 2), (2, 3)],
            vec![(1, 2), (2, 3), (3, 4)],
            vec![(1, 1), (1, 2), (3, 3)],
            vec![(2, 2), (1, 2), (3, 3)],
            vec![(1, 2), (1, 2), (2, 3)],
            vec![(1, 2), (2, 3), (2, 3)],
        ];
        for a in &samples {
            for b in &samples {
                let same = brute_canonical(a) == brute_canonical(b);
                assert_eq!(canon.canonical(a) == canon.canonical(b), same, "{a:?} {b:?}");
            }
        }
    }
}
