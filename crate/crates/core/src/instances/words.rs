//! Word classes: the free (concatenation) algebra, the symmetric algebra of
//! non-decreasing words, the shuffle algebra, and the one-letter polynomial
//! algebra.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{HopfError, Result};
use crate::multiset::Multiset;
use crate::rule::{Condition, ObjectKey, ObjectSyntax, Rule};

/// A finite, linearly ordered alphabet of single-character letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: impl IntoIterator<Item = char>) -> Result<Self> {
        let letters: Vec<char> = letters.into_iter().collect();
        if letters.is_empty() {
            return Err(HopfError::EmptyAlphabet);
        }
        for (i, c) in letters.iter().enumerate() {
            if letters[..i].contains(c) {
                return Err(HopfError::InvalidAlphabet(format!("letter `{c}` repeated")));
            }
            if c.is_whitespace() || matches!(c, '"' | ',' | '<' | '\\') {
                return Err(HopfError::InvalidAlphabet(format!("`{c}` cannot be a letter")));
            }
        }
        Ok(Alphabet { letters })
    }

    /// Accepts `ab`, `a,b` or `a<b`; the order of appearance is the letter order.
    pub fn parse(spec: &str) -> Result<Self> {
        Alphabet::new(spec.chars().filter(|c| !matches!(c, ',' | '<') && !c.is_whitespace()))
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn rank(&self, c: char) -> Option<usize> {
        self.letters.iter().position(|&l| l == c)
    }
}

/// Whether words are kept in non-decreasing letter order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ordering {
    Free,
    Sorted,
}

#[derive(Clone)]
struct WordSyntax {
    alphabet: Alphabet,
    ordering: Ordering,
}

impl WordSyntax {
    fn letters_of(&self, key: &ObjectKey) -> Result<Vec<char>> {
        let letters: Vec<char> = key.as_str().chars().collect();
        if let Some(bad) = letters.iter().find(|c| self.alphabet.rank(**c).is_none()) {
            return Err(HopfError::malformed(
                format!("w\"{key}\""),
                format!("letter `{bad}` is not in the alphabet"),
            ));
        }
        if self.ordering == Ordering::Sorted {
            let ranks: Vec<usize> = letters.iter().map(|c| self.alphabet.rank(*c).unwrap()).collect();
            if ranks.windows(2).any(|w| w[0] > w[1]) {
                return Err(HopfError::malformed(format!("w\"{key}\""), "letters are not in non-decreasing order"));
            }
        }
        Ok(letters)
    }

    fn canonical(&self, mut letters: Vec<char>) -> ObjectKey {
        if self.ordering == Ordering::Sorted {
            letters.sort_by_key(|c| self.alphabet.rank(*c));
        }
        ObjectKey::new(letters.into_iter().collect::<String>())
    }
}

impl ObjectSyntax for WordSyntax {
    fn parse(&self, text: &str) -> Result<ObjectKey> {
        let lead = text.len() - text.trim_start().len();
        let t = text.trim();
        if t == "void" {
            return Ok(ObjectKey::void());
        }
        let body = t
            .strip_prefix("w\"")
            .ok_or_else(|| HopfError::parse_at(text, lead, "expected a word literal `w\"...\"`"))?;
        let body = body
            .strip_suffix('"')
            .ok_or_else(|| HopfError::parse_at(text, lead + t.len(), "unterminated word literal"))?;
        if let Some(pos) = body.find('"') {
            return Err(HopfError::parse_at(text, lead + 2 + pos, "unexpected `\"` inside word literal"));
        }
        let letters: Vec<char> = body.chars().collect();
        if let Some(bad) = letters.iter().find(|c| self.alphabet.rank(**c).is_none()) {
            return Err(HopfError::malformed(t, format!("letter `{bad}` is not in the alphabet")));
        }
        Ok(self.canonical(letters))
    }

    fn format(&self, key: &ObjectKey) -> String {
        format!("w\"{key}\"")
    }
}

fn words_up_to(alphabet: &Alphabet, ordering: Ordering, bound: usize) -> Vec<ObjectKey> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for w in &layer {
            let min_rank = match (ordering, w.chars().last()) {
                (Ordering::Sorted, Some(c)) => alphabet.rank(c).unwrap(),
                _ => 0,
            };
            for &c in &alphabet.letters[min_rank..] {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.into_iter().map(ObjectKey::new).collect()
}

/// All splittings of a word by choosing a subword (by position) for the left
/// component and leaving the rest, in order, on the right.
fn subword_splittings(letters: &[char]) -> Multiset<(ObjectKey, ObjectKey)> {
    let k = letters.len();
    assert!(k < 64, "word too long to enumerate subwords");
    let mut out = Multiset::new();
    for mask in 0u64..(1u64 << k) {
        let mut left = String::new();
        let mut right = String::new();
        for (i, &c) in letters.iter().enumerate() {
            if mask >> i & 1 == 1 {
                left.push(c);
            } else {
                right.push(c);
            }
        }
        out.insert((ObjectKey::new(left), ObjectKey::new(right)));
    }
    out
}

/// All order-preserving interleavings of `u` and `v`, with multiplicity.
pub(crate) fn shuffle(u: &[char], v: &[char]) -> Multiset<String> {
    fn go(
        u: &[char],
        v: &[char],
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), Multiset<String>>,
    ) -> Multiset<String> {
        if i == u.len() {
            return Multiset::singleton(v[j..].iter().collect());
        }
        if j == v.len() {
            return Multiset::singleton(u[i..].iter().collect());
        }
        if let Some(hit) = memo.get(&(i, j)) {
            return hit.clone();
        }
        let mut out = Multiset::new();
        for (w, m) in go(u, v, i + 1, j, memo) {
            out.insert_many(format!("{}{w}", u[i]), m);
        }
        for (w, m) in go(u, v, i, j + 1, memo) {
            out.insert_many(format!("{}{w}", v[j]), m);
        }
        memo.insert((i, j), out.clone());
        out
    }
    go(u, v, 0, 0, &mut HashMap::new())
}

fn word_rule(
    name: &str,
    alphabet: Alphabet,
    ordering: Ordering,
    declared: Vec<Condition>,
    shuffle_law: bool,
) -> Result<Rule> {
    let syntax = WordSyntax { alphabet, ordering };
    let sx = syntax.clone();
    let size = move |g: &ObjectKey| Ok(sx.letters_of(g)?.len());
    let sx = syntax.clone();
    let basis = move |bound: usize| words_up_to(&sx.alphabet, sx.ordering, bound);
    let builder = Rule::builder(name)
        .size(size)
        .basis(basis)
        .declare(declared)
        .syntax(Arc::new(syntax.clone()));
    let sx = syntax.clone();
    let builder = if shuffle_law {
        builder
            .compose(move |a, b| {
                let u = sx.letters_of(a)?;
                let v = sx.letters_of(b)?;
                Ok(shuffle(&u, &v).map(ObjectKey::new))
            })
            .decompose({
                let sx = syntax.clone();
                move |g| {
                    let w = sx.letters_of(g)?;
                    let mut out = Multiset::new();
                    for j in 0..=w.len() {
                        let prefix: String = w[..j].iter().collect();
                        let suffix: String = w[j..].iter().collect();
                        out.insert((ObjectKey::new(suffix), ObjectKey::new(prefix)));
                    }
                    Ok(out)
                }
            })
            .cache_compositions(true)
    } else {
        builder
            .compose(move |a, b| {
                let mut w = sx.letters_of(a)?;
                w.extend(sx.letters_of(b)?);
                Ok(Multiset::singleton(sx.canonical(w)))
            })
            .decompose({
                let sx = syntax.clone();
                move |g| Ok(subword_splittings(&sx.letters_of(g)?))
            })
    };
    builder.build()
}

fn hopf_core() -> Vec<Condition> {
    use Condition::*;
    vec![C1, C2, C3, D1, D2, D3, D5, CD1, CD2]
}

/// Words under concatenation with subword-choice decomposition.
///
/// Commutative only over a one-letter alphabet, where it is the polynomial algebra.
pub fn free(alphabet: Alphabet) -> Result<Rule> {
    let mut declared = hopf_core();
    declared.push(Condition::D4);
    if alphabet.len() == 1 {
        declared.push(Condition::C4);
    }
    word_rule("free", alphabet, Ordering::Free, declared, false)
}

/// Non-decreasing words under sorted concatenation; commutative and cocommutative.
pub fn symmetric(alphabet: Alphabet) -> Result<Rule> {
    let mut declared = hopf_core();
    declared.extend([Condition::C4, Condition::D4]);
    word_rule("symmetric", alphabet, Ordering::Sorted, declared, false)
}

/// Words under shuffle with the cut decomposition `w ↝ (suffix, prefix)`.
///
/// Not cocommutative unless the alphabet has a single letter.
pub fn shuffle_algebra(alphabet: Alphabet) -> Result<Rule> {
    let mut declared = hopf_core();
    declared.push(Condition::C4);
    if alphabet.len() == 1 {
        declared.push(Condition::D4);
    }
    word_rule("shuffle", alphabet, Ordering::Free, declared, true)
}

/// The free algebra over the single letter `x`: polynomials in one variable.
pub fn polynomial() -> Result<Rule> {
    let mut declared = hopf_core();
    declared.extend([Condition::C4, Condition::D4]);
    word_rule("polynomial", Alphabet::new(['x'])?, Ordering::Free, declared, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> ObjectKey {
        ObjectKey::new(s)
    }

    fn ab() -> Alphabet {
        Alphabet::parse("ab").unwrap()
    }

    #[test]
    fn alphabet_validation() {
        assert_eq!(Alphabet::parse(""), Err(HopfError::EmptyAlphabet));
        assert!(matches!(Alphabet::parse("aa"), Err(HopfError::InvalidAlphabet(_))));
        assert_eq!(Alphabet::parse("x<y").unwrap().letters(), &['x', 'y']);
        assert_eq!(Alphabet::parse("a,b,c").unwrap().len(), 3);
    }

    #[test]
    fn free_concatenation() {
        let r = free(ab()).unwrap();
        assert_eq!(r.compose(&k("ab"), &k("a")).unwrap(), Multiset::singleton(k("aba")));
        assert_eq!(r.compose(&k(""), &k("ba")).unwrap(), Multiset::singleton(k("ba")));
        assert_eq!(r.size(&k("aba")).unwrap(), 3);
    }

    #[test]
    fn free_subword_decomposition() {
        let r = free(ab()).unwrap();
        let d = r.decompose(&k("ab")).unwrap();
        let expected: Multiset<_> = [(k(""), k("ab")), (k("a"), k("b")), (k("b"), k("a")), (k("ab"), k(""))]
            .into_iter()
            .collect();
        assert_eq!(d, expected);
        assert_eq!(r.decompose(&k("")).unwrap(), Multiset::singleton((k(""), k(""))));
    }

    #[test]
    fn symmetric_reorders() {
        let r = symmetric(Alphabet::parse("x<y").unwrap()).unwrap();
        assert_eq!(r.compose(&k("y"), &k("x")).unwrap(), Multiset::singleton(k("xy")));
        assert_eq!(r.parse_object("w\"yxy\"").unwrap(), k("xyy"));
        assert!(r.size(&k("yx")).is_err());
        // ⟨xx⟩ has the middle pair twice
        let d = r.decompose(&k("xx")).unwrap();
        assert_eq!(d.multiplicity(&(k("x"), k("x"))), 2u32.into());
    }

    #[test]
    fn shuffle_interleavings() {
        let r = shuffle_algebra(ab()).unwrap();
        let expected: Multiset<_> = [k("ab"), k("ba")].into_iter().collect();
        assert_eq!(r.compose(&k("a"), &k("b")).unwrap(), expected);
        let aa = r.compose(&k("a"), &k("a")).unwrap();
        assert_eq!(aa.multiplicity(&k("aa")), 2u32.into());
    }

    #[test]
    fn shuffle_cut_decomposition() {
        let r = shuffle_algebra(ab()).unwrap();
        let expected: Multiset<_> = [(k("ab"), k("")), (k("b"), k("a")), (k(""), k("ab"))].into_iter().collect();
        assert_eq!(r.decompose(&k("ab")).unwrap(), expected);
    }

    #[test]
    fn shuffle_counts_against_enumeration() {
        // enumerate interleavings as position subsets of the merged word
        let u: Vec<char> = "aba".chars().collect();
        let v: Vec<char> = "bb".chars().collect();
        let n = u.len() + v.len();
        let mut oracle: HashMap<String, u32> = HashMap::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != u.len() {
                continue;
            }
            let (mut i, mut j) = (0, 0);
            let mut w = String::new();
            for p in 0..n {
                if mask >> p & 1 == 1 {
                    w.push(u[i]);
                    i += 1;
                } else {
                    w.push(v[j]);
                    j += 1;
                }
            }
            *oracle.entry(w).or_default() += 1;
        }
        let got = shuffle(&u, &v);
        assert_eq!(got.distinct_len(), oracle.len());
        for (w, m) in oracle {
            assert_eq!(got.multiplicity(&w), m.into());
        }
    }

    #[test]
    fn literals() {
        let r = free(ab()).unwrap();
        assert!(r.parse_object("w\"abc\"").unwrap_err().to_string().contains("not in the alphabet"));
        assert_eq!(r.parse_object("w\"ab\"").unwrap(), k("ab"));
        assert_eq!(r.parse_object("void").unwrap(), k(""));
        assert_eq!(r.parse_object("w\"\"").unwrap(), k(""));
        assert!(matches!(r.parse_object("w\"ab"), Err(HopfError::Parse { .. })));
        assert!(matches!(r.parse_object("ab"), Err(HopfError::Parse { .. })));
        assert_eq!(r.format_object(&k("ba")), "w\"ba\"");
        assert_eq!(r.format_object(&k("")), "void");
    }

    #[test]
    fn enumeration() {
        let p = polynomial().unwrap();
        assert_eq!(p.enumerate_basis(3).unwrap(), vec![k(""), k("x"), k("xx"), k("xxx")]);
        let f = free(ab()).unwrap();
        assert_eq!(f.enumerate_basis(4).unwrap().len(), 31);
        let s = symmetric(ab()).unwrap();
        // non-decreasing words of length ≤ 3 over two letters: 1+2+3+4
        assert_eq!(s.enumerate_basis(3).unwrap().len(), 10);
    }
}
