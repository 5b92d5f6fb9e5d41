//! Text form of phrases.
//!
//! ```text
//! phrase := ['+'|'-'] term (('+'|'-') term)* | '0'
//! term   := factor+                       juxtaposition, folded left
//! factor := 'z' sfx | 'zc' sfx | 'e' sfx | 'ec' sfx | 'I' sfx | 'Ic' sfx
//!         | '[' REAL (',' REAL)* ']'      a real scalar, or a constant of A_r
//!         | '[' INT '/' INT ']'           exact rational scalar
//!         | '(' phrase ')'
//! sfx    := ('_' INT)? ('^' INT)?         variable index, power
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Leaf, Phrase, PhraseError, Tree, Word};
use crate::algebra::CdNumber;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Multiplicity violations are errors.
    #[default]
    Strict,
    /// Multiplicity violations are returned as warnings.
    Lenient,
}

#[derive(Debug, Clone)]
struct RawTerm {
    coeff: BigRational,
    tree: Option<Tree>,
}

fn product(a: &[RawTerm], b: &[RawTerm]) -> Vec<RawTerm> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let tree = match (&x.tree, &y.tree) {
                (Some(s), Some(t)) => Some(Tree::node(s.clone(), t.clone())),
                (Some(s), None) => Some(s.clone()),
                (None, t) => t.clone(),
            };
            out.push(RawTerm { coeff: &x.coeff * &y.coeff, tree });
        }
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    level: u32,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PhraseError> {
        Err(PhraseError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn phrase(&mut self) -> Result<Vec<RawTerm>, PhraseError> {
        let mut out = Vec::new();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -BigRational::one()
            }
            Some(b'+') => {
                self.pos += 1;
                BigRational::one()
            }
            _ => BigRational::one(),
        };
        loop {
            for mut t in self.term()? {
                t.coeff *= &sign;
                out.push(t);
            }
            sign = match self.peek() {
                Some(b'+') => BigRational::one(),
                Some(b'-') => -BigRational::one(),
                _ => return Ok(out),
            };
            self.pos += 1;
        }
    }

    fn starts_factor(c: u8) -> bool {
        matches!(c, b'z' | b'e' | b'I' | b'[' | b'(')
    }

    fn term(&mut self) -> Result<Vec<RawTerm>, PhraseError> {
        match self.peek() {
            Some(c) if Self::starts_factor(c) => {}
            Some(c) => return self.err(format!("expected a factor, found '{}'", c as char)),
            None => return self.err("expected a factor, found end of input"),
        }
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            if !Self::starts_factor(c) {
                break;
            }
            let f = self.factor()?;
            acc = product(&acc, &f);
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<u32, PhraseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match text.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => {
                self.pos = start;
                self.err("expected a positive integer")
            }
        }
    }

    fn suffixes(&mut self) -> Result<(u32, u32), PhraseError> {
        let (mut var, mut pow) = (None, None);
        loop {
            match self.src.get(self.pos) {
                Some(b'_') if var.is_none() => {
                    self.pos += 1;
                    var = Some(self.integer()?);
                }
                Some(b'^') if pow.is_none() => {
                    self.pos += 1;
                    pow = Some(self.integer()?);
                }
                _ => return Ok((var.unwrap_or(1), pow.unwrap_or(1))),
            }
        }
    }

    fn symbol(&mut self, tilde: bool, plain: fn(u32, u32) -> Leaf, conj: fn(u32, u32) -> Leaf, powered: bool) -> Result<Vec<RawTerm>, PhraseError> {
        let (v, p) = self.suffixes()?;
        if !powered && p != 1 {
            return self.err("only z and zc take a power");
        }
        let leaf = if tilde { conj(v, p) } else { plain(v, p) };
        Ok(vec![RawTerm { coeff: BigRational::one(), tree: Some(Tree::Leaf(leaf)) }])
    }

    fn factor(&mut self) -> Result<Vec<RawTerm>, PhraseError> {
        let c = self.peek().expect("caller checked");
        self.pos += 1;
        let tilde = self.src.get(self.pos) == Some(&b'c');
        if tilde && c != b'[' && c != b'(' {
            self.pos += 1;
        }
        match c {
            b'z' => self.symbol(tilde, Leaf::Z, Leaf::Zc, true),
            b'e' => self.symbol(tilde, |v, _| Leaf::E(v), |v, _| Leaf::Ec(v), false),
            b'I' => self.symbol(tilde, |v, _| Leaf::One(v), |v, _| Leaf::OneC(v), false),
            b'(' => {
                let inner = self.phrase()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            b'[' => self.bracket(),
            _ => unreachable!("starts_factor"),
        }
    }

    fn bracket(&mut self) -> Result<Vec<RawTerm>, PhraseError> {
        let start = self.pos;
        let Some(len) = self.src[start..].iter().position(|&b| b == b']') else {
            return self.err("unclosed '['");
        };
        let body = std::str::from_utf8(&self.src[start..start + len]).map_err(|_| PhraseError::Syntax { pos: start, msg: "invalid UTF-8".into() })?;
        self.pos = start + len + 1;
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        let bad = |msg: String| PhraseError::Syntax { pos: start, msg };
        if parts.len() == 1 {
            let coeff = scalar(parts[0]).ok_or_else(|| bad(format!("bad scalar '{}'", parts[0])))?;
            return Ok(vec![RawTerm { coeff, tree: None }]);
        }
        let expected = 1usize << self.level;
        if parts.len() != expected {
            return Err(PhraseError::ConstantLength { level: self.level, expected, found: parts.len() });
        }
        let mut coeffs = Vec::with_capacity(expected);
        for p in parts {
            let x: f64 = p.parse().map_err(|_| bad(format!("bad number '{p}'")))?;
            if !x.is_finite() {
                return Err(bad(format!("non-finite number '{p}'")));
            }
            coeffs.push(x);
        }
        let c = CdNumber::new(coeffs).expect("length checked");
        Ok(vec![RawTerm { coeff: BigRational::one(), tree: Some(Tree::Leaf(Leaf::Const(c))) }])
    }
}

fn scalar(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    let x: f64 = s.parse().ok()?;
    BigRational::from_float(x)
}

fn parse_raw(text: &str, level: u32) -> Result<Vec<RawTerm>, PhraseError> {
    if text.trim() == "0" {
        return Ok(Vec::new());
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, level };
    let terms = p.phrase()?;
    if let Some(c) = p.peek() {
        return p.err(format!("unexpected '{}'", c as char));
    }
    Ok(terms)
}

/// Parses and normalizes, rejecting multiplicity violations.
pub fn parse(text: &str, level: u32) -> Result<Phrase, PhraseError> {
    parse_with(text, level, Strictness::Strict).map(|(p, _)| p)
}

/// Parses and normalizes; in lenient mode multiplicity violations come back
/// as warnings.
pub fn parse_with(text: &str, level: u32, strictness: Strictness) -> Result<(Phrase, Vec<String>), PhraseError> {
    if !(crate::algebra::MIN_LEVEL..=crate::algebra::MAX_LEVEL).contains(&level) {
        return Err(PhraseError::Syntax { pos: 0, msg: format!("unsupported level {level}") });
    }
    let raw = parse_raw(text, level)?;
    let mut trees = Vec::with_capacity(raw.len());
    let mut terms = Vec::with_capacity(raw.len());
    for t in raw {
        match t.tree {
            Some(tree) => {
                trees.push(tree.clone());
                terms.push((t.coeff, tree));
            }
            None if t.coeff.is_zero() => {}
            None => return Err(PhraseError::ConstantWord(render_coeff(&t.coeff))),
        }
    }
    let refs: Vec<&Tree> = trees.iter().collect();
    let warnings = multiplicity_violations(&refs);
    if strictness == Strictness::Strict {
        if let Some(w) = warnings.first() {
            return Err(PhraseError::Multiplicity(w.clone()));
        }
    }
    Ok((Phrase::from_terms(level, terms)?, warnings))
}

/// Multiplicity violations of a normalized phrase.
pub fn check_multiplicity(p: &Phrase) -> Vec<String> {
    let refs: Vec<&Tree> = p.words().iter().map(|w| &w.tree).collect();
    multiplicity_violations(&refs)
}

/// Every word carries `I_v` and `Ic_v` equally often. Markers `e_v`
/// (resp. `ec_v`) either occur equally often in every word, or only in
/// words holding exactly one of them and no `z_v` (resp. `zc_v`).
type LeafTest = fn(&Leaf, u32) -> bool;

fn multiplicity_violations(words: &[&Tree]) -> Vec<String> {
    let mut vars: Vec<u32> = words.iter().flat_map(|t| t.leaves().into_iter().filter_map(|l| l.var())).collect();
    vars.sort_unstable();
    vars.dedup();
    let mut out = Vec::new();
    for v in vars {
        let ops: [(&str, LeafTest); 2] = [("I", |l, v| matches!(*l, Leaf::One(w) if w == v)), ("Ic", |l, v| matches!(*l, Leaf::OneC(w) if w == v))];
        for (name, pred) in ops {
            let counts: Vec<usize> = words.iter().map(|t| t.count_leaves(&|l| pred(l, v))).collect();
            if counts.windows(2).any(|w| w[0] != w[1]) {
                out.push(format!("{name}_{v} occurs {counts:?} times across words"));
            }
        }
        let markers: [(&str, LeafTest, LeafTest); 2] = [
            ("e", |l, v| matches!(*l, Leaf::E(w) if w == v), |l, v| matches!(*l, Leaf::Z(w, _) if w == v)),
            ("ec", |l, v| matches!(*l, Leaf::Ec(w) if w == v), |l, v| matches!(*l, Leaf::Zc(w, _) if w == v)),
        ];
        for (name, marker, power) in markers {
            let counts: Vec<usize> = words.iter().map(|t| t.count_leaves(&|l| marker(l, v))).collect();
            if counts.windows(2).all(|w| w[0] == w[1]) {
                continue;
            }
            let exceptional = words.iter().zip(&counts).all(|(t, &c)| c == 0 || (c == 1 && !t.any_leaf(&|l| power(l, v))));
            if !exceptional {
                out.push(format!("{name}_{v} occurs {counts:?} times across words"));
            }
        }
    }
    out
}

fn render_number(x: f64) -> String {
    format!("{}", x + 0.0)
}

fn render_coeff(c: &BigRational) -> String {
    if c.is_integer() {
        format!("[{}]", c.numer())
    } else {
        format!("[{}/{}]", c.numer(), c.denom())
    }
}

fn render_leaf(l: &Leaf) -> String {
    let sym = |name: &str, v: u32, p: u32| {
        let mut s = name.to_string();
        if v != 1 {
            s += &format!("_{v}");
        }
        if p != 1 {
            s += &format!("^{p}");
        }
        s
    };
    match *l {
        Leaf::Const(ref c) => format!("[{}]", c.coeffs().iter().map(|x| render_number(*x)).collect::<Vec<_>>().join(",")),
        Leaf::E(v) => sym("e", v, 1),
        Leaf::Ec(v) => sym("ec", v, 1),
        Leaf::One(v) => sym("I", v, 1),
        Leaf::OneC(v) => sym("Ic", v, 1),
        Leaf::Z(v, p) => sym("z", v, p),
        Leaf::Zc(v, p) => sym("zc", v, p),
    }
}

pub fn render_tree(t: &Tree) -> String {
    match t {
        Tree::Leaf(l) => render_leaf(l),
        Tree::Node(a, b) => format!("({} {})", render_tree(a), render_tree(b)),
    }
}

fn render_word(w: &Word, first: bool) -> String {
    let neg = w.coeff.is_negative();
    let mag = w.coeff.abs();
    let sign = match (first, neg) {
        (true, false) => "",
        (true, true) => "-",
        (false, false) => " + ",
        (false, true) => " - ",
    };
    let body = render_tree(&w.tree);
    if mag.is_one() {
        format!("{sign}{body}")
    } else {
        format!("{sign}{} {body}", render_coeff(&mag))
    }
}

pub(super) fn render(p: &Phrase) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.words().iter().enumerate().map(|(i, w)| render_word(w, i == 0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_are_kept() {
        let (a, b) = ("[0,1,0,0,0,0,0,0]", "[0,0,1,0,0,0,0,0]");
        let left = parse(&format!("({a} z) {b}"), 3).unwrap();
        let right = parse(&format!("{a} (z {b})"), 3).unwrap();
        assert_ne!(left, right);
        assert_eq!(left.render(), format!("(({a} z) {b})"));
    }

    #[test]
    fn constant_word_example() {
        let p = parse("[0,1,0,0] z^2 [0,0,1,0]", 2).unwrap();
        assert_eq!(p.render(), "(([0,1,0,0] z^2) [0,0,1,0])");
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn round_trip_render() {
        for s in ["z^2 + [1/3] z_2^3 - (e_2 [0,1,0,0])", "-[0.25] zc^2 ([0,0,0,1] z)", "0", "[7] Ic_3"] {
            let p = parse(s, 2).unwrap();
            assert_eq!(parse(&p.render(), 2).unwrap(), p, "{s}");
        }
    }

    #[test]
    fn distributes_sums() {
        let p = parse("(z + e_2) [0,1,0,0]", 2).unwrap();
        assert_eq!(p.words().len(), 2);
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse("z + + z", 2) {
            Err(PhraseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(z", 2), Err(PhraseError::Syntax { .. })));
        assert!(matches!(parse("e^2", 2), Err(PhraseError::Syntax { .. })));
        assert!(matches!(parse("[1,2,3]", 2), Err(PhraseError::ConstantLength { .. })));
        assert!(matches!(parse("z^0", 2), Err(PhraseError::Syntax { .. })));
        assert!(matches!(parse("[1/0] z", 2), Err(PhraseError::Syntax { .. })));
    }

    #[test]
    fn multiplicity_rules() {
        // exception words: one marker and no power of z
        assert!(parse("z^2 + [0,1,0,0] e [0,0,1,0]", 2).is_ok());
        assert!(matches!(parse("z + z e", 2), Err(PhraseError::Multiplicity(_))));
        assert!(matches!(parse("I z + z", 2), Err(PhraseError::Multiplicity(_))));
        let (p, w) = parse_with("I z + z", 2, Strictness::Lenient).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(p.words().len(), 2);
        assert!(parse("I z + z I", 2).is_ok());
    }
}
