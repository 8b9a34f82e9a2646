//! Expressions over a rule: object literals, sums, rational multiples,
//! products, tensors, and the maps `delta`, `eps`, `S` and `grade`.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    := tensor (('+' | '-') tensor)*
//! tensor  := product ('(x)' product)*
//! product := unary ('*' unary)*
//! unary   := '-' unary | RATIONAL [unary] | atom
//! atom    := LITERAL | 'void' | '(' expr ')'
//!          | ('delta' | 'eps' | 'S') '(' expr ')' | 'grade' '(' expr ',' INT ')'
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{HopfError, Result};
use crate::hopf::{self, DEFAULT_BUDGET};
use crate::rule::{ObjectKey, Rule, Strategy};
use crate::vector::{format_rational, Element, Rational, TensorElement};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Literal(String),
    Void,
    Ident(String),
    Number(BigInt),
    Slash,
    Plus,
    Minus,
    Star,
    Tensor,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    at: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            ',' => Some(Tok::Comma),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, at: start });
            i += 1;
            continue;
        }
        if c == '(' {
            if text[i..].starts_with("(x)") {
                out.push(Token { tok: Tok::Tensor, at: start });
                i += 3;
            } else {
                out.push(Token { tok: Tok::LParen, at: start });
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = text[start..i].parse().expect("digits");
            out.push(Token { tok: Tok::Number(n), at: start });
            continue;
        }
        if c.is_alphabetic() {
            while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                i += 1;
            }
            let word = &text[start..i];
            let next = bytes.get(i).copied();
            let literal_end = match (word, next) {
                ("w", Some(b'"')) => Some(
                    text[i + 1..]
                        .find('"')
                        .map(|j| i + 1 + j + 1)
                        .ok_or_else(|| HopfError::parse_at(text, start, "unterminated word literal"))?,
                ),
                ("g", Some(b'{')) => Some(
                    text[i..]
                        .find('}')
                        .map(|j| i + j + 1)
                        .ok_or_else(|| HopfError::parse_at(text, start, "unterminated graph literal"))?,
                ),
                ("t", Some(b'(')) | ("f", Some(b'[')) => Some(balanced(text, i)?),
                _ => None,
            };
            match literal_end {
                Some(end) => {
                    out.push(Token { tok: Tok::Literal(text[start..end].to_string()), at: start });
                    i = end;
                }
                None if word == "void" => out.push(Token { tok: Tok::Void, at: start }),
                None => out.push(Token { tok: Tok::Ident(word.to_string()), at: start }),
            }
            continue;
        }
        return Err(HopfError::parse_at(text, start, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::End, at: text.len() });
    Ok(out)
}

/// End offset of the bracket group opening at `open`.
fn balanced(text: &str, open: usize) -> Result<usize> {
    let mut depth = 0i32;
    for (j, c) in text[open..].char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(open + j + 1);
                }
            }
            _ => {}
        }
    }
    Err(HopfError::parse_at(text, open, "unbalanced brackets in literal"))
}

/// Unary maps available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Map {
    Delta,
    Eps,
    Antipode,
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Object(ObjectKey),
    Scalar(Rational),
    Neg(Box<Expr>),
    Scale(Rational, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
    Apply(Map, Box<Expr>),
    Grade(Box<Expr>, usize),
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
    rule: &'a Rule,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn at(&self) -> usize {
        self.toks[self.pos].at
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> HopfError {
        HopfError::parse_at(self.text, self.at(), msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.tensor()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.tensor()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.tensor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn tensor(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while *self.peek() == Tok::Tensor {
            self.bump();
            lhs = Expr::Tensor(Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn starts_unary(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Minus | Tok::Number(_) | Tok::Literal(_) | Tok::Void | Tok::LParen | Tok::Ident(_)
        )
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Number(n) => {
                self.bump();
                let q = if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.peek().clone() {
                        Tok::Number(d) if !d.is_zero() => {
                            self.bump();
                            Rational::new(n, d)
                        }
                        Tok::Number(_) => return Err(self.error("zero denominator")),
                        _ => return Err(self.error("expected a denominator")),
                    }
                } else {
                    Rational::from_integer(n)
                };
                if self.starts_unary() && *self.peek() != Tok::Minus {
                    Ok(Expr::Scale(q, Box::new(self.unary()?)))
                } else {
                    Ok(Expr::Scalar(q))
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.bump();
        match tok.tok {
            Tok::Literal(lit) => self.rule.parse_object(&lit).map(Expr::Object).map_err(|e| shift(self.text, tok.at, e)),
            Tok::Void => Ok(Expr::Object(self.rule.neutral().clone())),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let map = match name.as_str() {
                    "delta" => Some(Map::Delta),
                    "eps" => Some(Map::Eps),
                    "S" => Some(Map::Antipode),
                    "grade" => None,
                    _ => return Err(HopfError::parse_at(self.text, tok.at, format!("unknown name `{name}`"))),
                };
                self.expect(Tok::LParen, "`(`")?;
                let arg = self.expr()?;
                let e = match map {
                    Some(m) => Expr::Apply(m, Box::new(arg)),
                    None => {
                        self.expect(Tok::Comma, "`,`")?;
                        let n = match self.peek().clone() {
                            Tok::Number(n) => {
                                self.bump();
                                usize::try_from(n).map_err(|_| self.error("grade out of range"))?
                            }
                            _ => return Err(self.error("expected a grade")),
                        };
                        Expr::Grade(Box::new(arg), n)
                    }
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::End => Err(HopfError::parse_at(self.text, tok.at, "unexpected end of input")),
            other => Err(HopfError::parse_at(self.text, tok.at, format!("unexpected {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Slash => "`/`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Star => "`*`".into(),
        Tok::Tensor => "`(x)`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        other => format!("{other:?}"),
    }
}

/// Moves a parse error reported inside a literal to its place in the whole text.
fn shift(text: &str, start: usize, e: HopfError) -> HopfError {
    match e {
        HopfError::Parse { line: 1, column, message } => {
            let inner: usize = text[start..].chars().take(column - 1).map(char::len_utf8).sum();
            HopfError::parse_at(text, start + inner, message)
        }
        other => other,
    }
}

/// Parses `text` into an expression over `rule`'s objects.
pub fn parse_expression(text: &str, rule: &Rule) -> Result<Expr> {
    let mut p = Parser {
        text,
        toks: lex(text)?,
        pos: 0,
        rule,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Scalar(Rational),
    Element(Element),
    Tensor(TensorElement),
}

impl Value {
    /// Scalars stand for multiples of Ø.
    fn into_element(self, rule: &Rule) -> Result<Element> {
        match self {
            Value::Scalar(c) => Ok(Element::term(c, rule.neutral().clone())),
            Value::Element(e) => Ok(e),
            Value::Tensor(_) => Err(HopfError::Type("expected an element, found a tensor".into())),
        }
    }

    fn into_tensor(self, rule: &Rule) -> Result<TensorElement> {
        match self {
            Value::Scalar(c) => {
                let mut t = TensorElement::zero();
                t.add_term(rule.neutral().clone(), rule.neutral().clone(), c);
                Ok(t)
            }
            Value::Tensor(t) => Ok(t),
            Value::Element(_) => Err(HopfError::Type("expected a tensor, found an element".into())),
        }
    }

    fn scale(self, c: &Rational) -> Value {
        match self {
            Value::Scalar(x) => Value::Scalar(x * c),
            Value::Element(e) => Value::Element(e.scale(c)),
            Value::Tensor(t) => Value::Tensor(t.scale(c)),
        }
    }

    /// Equality up to reading scalars as multiples of Ø (so `0` equals every zero).
    pub fn same_as(&self, other: &Value, rule: &Rule) -> bool {
        match (self, other) {
            (Value::Tensor(_), _) | (_, Value::Tensor(_)) => {
                match (self.clone().into_tensor(rule), other.clone().into_tensor(rule)) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                }
            }
            _ => self.clone().into_element(rule).ok() == other.clone().into_element(rule).ok(),
        }
    }

    pub fn display<'a>(&'a self, rule: &'a Rule) -> impl fmt::Display + 'a {
        DisplayValue { v: self, rule }
    }

    /// `{type, terms: [{coeff, key}]}` with terms sorted by key; tensor keys are `[left, right]`.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Value::Scalar(c) => json!({"type": "scalar", "value": format_rational(c)}),
            Value::Element(e) => json!({
                "type": "element",
                "terms": e.terms().map(|(k, c)| json!({"coeff": format_rational(c), "key": k.as_str()})).collect::<Vec<_>>(),
            }),
            Value::Tensor(t) => json!({
                "type": "tensor",
                "terms": t.terms().map(|((a, b), c)| json!({"coeff": format_rational(c), "key": [a.as_str(), b.as_str()]})).collect::<Vec<_>>(),
            }),
        }
    }
}

struct DisplayValue<'a> {
    v: &'a Value,
    rule: &'a Rule,
}

impl fmt::Display for DisplayValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |k: &ObjectKey| self.rule.format_object(k);
        match self.v {
            Value::Scalar(c) => f.write_str(&format_rational(c)),
            Value::Element(e) => write!(f, "{}", e.display_with(show)),
            Value::Tensor(t) => write!(f, "{}", t.display_with(show)),
        }
    }
}

/// Evaluation settings.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Tuple budget for the alternating-sum antipode.
    pub budget: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { budget: DEFAULT_BUDGET }
    }
}

pub fn eval(expr: &Expr, rule: &Rule, opts: EvalOptions) -> Result<Value> {
    let ev = |e: &Expr| eval(e, rule, opts);
    Ok(match expr {
        Expr::Object(k) => Value::Element(Element::basis(k.clone())),
        Expr::Scalar(c) => Value::Scalar(c.clone()),
        Expr::Neg(e) => ev(e)?.scale(&-Rational::one()),
        Expr::Scale(c, e) => ev(e)?.scale(c),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            let sign = if matches!(expr, Expr::Sub(..)) { -Rational::one() } else { Rational::one() };
            match (ev(a)?, ev(b)?) {
                (Value::Scalar(x), Value::Scalar(y)) => Value::Scalar(x + y * sign),
                (x @ Value::Tensor(_), y) | (x, y @ Value::Tensor(_)) => {
                    let mut t = x.into_tensor(rule)?;
                    t.add_assign_scaled(&y.into_tensor(rule)?, &sign);
                    Value::Tensor(t)
                }
                (x, y) => {
                    let mut e = x.into_element(rule)?;
                    e.add_assign_scaled(&y.into_element(rule)?, &sign);
                    Value::Element(e)
                }
            }
        }
        Expr::Mul(a, b) => match (ev(a)?, ev(b)?) {
            (Value::Scalar(c), v) | (v, Value::Scalar(c)) => v.scale(&c),
            (Value::Element(x), Value::Element(y)) => Value::Element(hopf::mul(rule, &x, &y)?),
            (Value::Tensor(x), Value::Tensor(y)) => Value::Tensor(hopf::tensor_mul(rule, &x, &y)?),
            _ => return Err(HopfError::Type("cannot multiply an element by a tensor".into())),
        },
        Expr::Tensor(a, b) => {
            let x = ev(a)?.into_element(rule)?;
            let y = ev(b)?.into_element(rule)?;
            Value::Tensor(crate::vector::tensor(&x, &y))
        }
        Expr::Apply(map, e) => {
            let x = ev(e)?.into_element(rule)?;
            match map {
                Map::Delta => Value::Tensor(hopf::coproduct(rule, &x)?),
                Map::Eps => Value::Scalar(hopf::counit(rule, &x)?),
                Map::Antipode => {
                    let mut out = Element::zero();
                    for (g, c) in x.terms() {
                        out.add_assign_scaled(&hopf::antipode_sum_with(rule, g, opts.budget, Strategy::LeftFirst)?, c);
                    }
                    Value::Element(out)
                }
            }
        }
        Expr::Grade(e, n) => Value::Element(hopf::project_grade(rule, &ev(e)?.into_element(rule)?, *n)?),
    })
}

/// Parses and evaluates in one step.
pub fn evaluate(text: &str, rule: &Rule, opts: EvalOptions) -> Result<Value> {
    eval(&parse_expression(text, rule)?, rule, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::make_rule;
    use crate::vector::rational;

    fn run(rule: &Rule, text: &str) -> String {
        evaluate(text, rule, EvalOptions::default()).unwrap().display(rule).to_string()
    }

    #[test]
    fn documented_examples() {
        let shuffle = make_rule("shuffle", None).unwrap();
        assert_eq!(run(&shuffle, "w\"a\" * w\"b\""), "w\"ab\" + w\"ba\"");
        let poly = make_rule("polynomial", None).unwrap();
        assert_eq!(
            run(&poly, "delta(w\"xx\")"),
            "void (x) w\"xx\" + 2 w\"x\" (x) w\"x\" + w\"xx\" (x) void"
        );
        let free = make_rule("free", Some("abc")).unwrap();
        assert_eq!(run(&free, "S(w\"abc\")"), "-w\"cba\"");
        assert_eq!(run(&free, "2/3 w\"a\" + w\"b\""), "2/3 w\"a\" + w\"b\"");
        assert_eq!(run(&free, "eps(3 void + 2 w\"a\")"), "3");
        assert_eq!(run(&free, "grade(w\"a\" + w\"ab\", 2)"), "w\"ab\"");
        assert_eq!(run(&free, "w\"a\" - w\"a\""), "0");
    }

    #[test]
    fn ast_shapes() {
        let free = make_rule("free", None).unwrap();
        let a = Expr::Object(ObjectKey::new("a"));
        let b = Expr::Object(ObjectKey::new("b"));
        assert_eq!(
            parse_expression("S(w\"a\")", &free).unwrap(),
            Expr::Apply(Map::Antipode, Box::new(a.clone()))
        );
        assert_eq!(
            parse_expression("2/3 w\"a\" + w\"b\"", &free).unwrap(),
            Expr::Add(Box::new(Expr::Scale(rational(2, 3), Box::new(a.clone()))), Box::new(b.clone()))
        );
        assert_eq!(
            parse_expression("delta(w\"a\") * delta(w\"b\")", &free).unwrap(),
            Expr::Mul(
                Box::new(Expr::Apply(Map::Delta, Box::new(a))),
                Box::new(Expr::Apply(Map::Delta, Box::new(b)))
            )
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        let free = make_rule("free", None).unwrap();
        let err = parse_expression("w\"a\" +\n  * w\"b\"", &free).unwrap_err();
        assert!(matches!(err, HopfError::Parse { line: 2, column: 3, .. }), "{err:?}");
        let err = parse_expression("w\"a\" + w\"abz\"", &free).unwrap_err();
        assert!(matches!(err, HopfError::Parse { line: 1, column: 11, .. } | HopfError::MalformedObject { .. }), "{err:?}");
        assert!(matches!(parse_expression("foo(w\"a\")", &free), Err(HopfError::Parse { column: 1, .. })));
        assert!(matches!(parse_expression("1/0", &free), Err(HopfError::Parse { .. })));
        assert!(matches!(parse_expression("(w\"a\"", &free), Err(HopfError::Parse { .. })));
        let graph = make_rule("graph", None).unwrap();
        assert!(matches!(parse_expression("g{1-2,3}", &graph), Err(HopfError::Parse { .. } | HopfError::MalformedObject { .. })));
    }

    #[test]
    fn type_errors() {
        let free = make_rule("free", None).unwrap();
        let opts = EvalOptions::default();
        assert!(matches!(evaluate("delta(w\"a\") * w\"b\"", &free, opts), Err(HopfError::Type(_))));
        assert!(matches!(evaluate("delta(w\"a\") (x) w\"b\"", &free, opts), Err(HopfError::Type(_))));
        assert!(matches!(evaluate("w\"a\" + delta(w\"b\")", &free, opts), Err(HopfError::Type(_))));
    }

    #[test]
    fn delta_is_multiplicative_at_the_expression_level() {
        for name in ["free", "symmetric", "shuffle", "polynomial", "graph", "forest"] {
            let rule = make_rule(name, None).unwrap();
            let objs = rule.enumerate_basis(2).unwrap();
            for a in &objs {
                for b in &objs {
                    let (la, lb) = (rule.format_object(a), rule.format_object(b));
                    let lhs = evaluate(&format!("delta({la} * {lb})"), &rule, EvalOptions::default()).unwrap();
                    let rhs = evaluate(&format!("delta({la}) * delta({lb})"), &rule, EvalOptions::default()).unwrap();
                    assert_eq!(lhs, rhs, "{name}: {la} {lb}");
                }
            }
        }
    }

    #[test]
    fn printed_results_parse_back() {
        let cases = [
            ("free", "S(w\"aab\") + 1/2 w\"b\" - 3"),
            ("shuffle", "delta(w\"ab\" * w\"a\")"),
            ("polynomial", "-2/7 delta(w\"xxx\")"),
            ("graph", "S(g{1-2,2-3})"),
            ("forest", "delta(t(t(),t(t())))"),
            ("forest", "S(f[t(t()),t()])"),
            ("symmetric", "w\"ba\" * w\"a\" - w\"aab\""),
        ];
        for (name, text) in cases {
            let rule = make_rule(name, None).unwrap();
            let v = evaluate(text, &rule, EvalOptions::default()).unwrap();
            let printed = v.display(&rule).to_string();
            let back = evaluate(&printed, &rule, EvalOptions::default()).unwrap();
            assert!(v.same_as(&back, &rule), "{name}: {text} -> {printed}");
        }
    }
}
