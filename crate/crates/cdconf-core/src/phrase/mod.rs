//! Symbolic words and phrases over A_r: noncommutative, nonassociative
//! products of constants, markers `e`, operator symbols `I` and powers of
//! `z`, with an explicit bracket tree.
//!
//! Variables are numbered from 1; `z` is `z_1`.

mod calculus;
mod metric;
mod normalize;
mod parse;

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::CdNumber;

pub use calculus::{antiderive, antiderive_var, derivative_at_one, derivative_at_one_var, hat_operator, hat_operator_var, Side};
pub use metric::{phrase_distance, triangle_defect, word_length, PhraseMetricParams};
pub use parse::{check_multiplicity, parse, parse_with, Strictness};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhraseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("multiplicity rule violated: {0}")]
    Multiplicity(String),
    #[error("word consists of constants only: {0}")]
    ConstantWord(String),
    #[error("unsupported phrase: {0}")]
    Unsupported(String),
    #[error("no value supplied for {0}")]
    MissingArgument(String),
    #[error("constant has {found} coefficients, level {level} needs {expected}")]
    ConstantLength { level: u32, expected: usize, found: usize },
    #[error("phrases live at levels {0} and {1}")]
    LevelMismatch(u32, u32),
    #[error("metric parameter b must lie in (0, 1), got {0}")]
    BadMetricParameter(f64),
}

#[derive(Debug, Clone)]
pub enum Leaf {
    Const(CdNumber),
    E(u32),
    Ec(u32),
    One(u32),
    OneC(u32),
    Z(u32, u32),
    Zc(u32, u32),
}

impl Leaf {
    fn rank(&self) -> u8 {
        match self {
            Leaf::Const(_) => 0,
            Leaf::E(_) => 1,
            Leaf::Ec(_) => 2,
            Leaf::One(_) => 3,
            Leaf::OneC(_) => 4,
            Leaf::Z(..) => 5,
            Leaf::Zc(..) => 6,
        }
    }

    fn key(&self) -> (u32, u32) {
        match *self {
            Leaf::Const(_) => (0, 0),
            Leaf::E(v) | Leaf::Ec(v) | Leaf::One(v) | Leaf::OneC(v) => (v, 0),
            Leaf::Z(v, p) | Leaf::Zc(v, p) => (v, p),
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Leaf::Const(_))
    }

    pub fn is_marker_of(&self, v: u32) -> bool {
        matches!(*self, Leaf::E(w) | Leaf::Ec(w) if w == v)
    }

    /// A symbol that depends on variable `v` or its increment.
    pub fn is_active_of(&self, v: u32) -> bool {
        matches!(*self, Leaf::Z(w, _) | Leaf::Zc(w, _) | Leaf::One(w) | Leaf::OneC(w) if w == v)
    }

    pub fn degree(&self) -> u32 {
        match *self {
            Leaf::Z(_, p) | Leaf::Zc(_, p) => p,
            _ => 0,
        }
    }

    pub fn length(&self) -> u32 {
        match *self {
            Leaf::Z(_, p) | Leaf::Zc(_, p) => p + 1,
            _ => 1,
        }
    }

    fn var(&self) -> Option<u32> {
        match *self {
            Leaf::Const(_) => None,
            Leaf::E(v) | Leaf::Ec(v) | Leaf::One(v) | Leaf::OneC(v) | Leaf::Z(v, _) | Leaf::Zc(v, _) => Some(v),
        }
    }
}

impl Ord for Leaf {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Leaf::Const(a), Leaf::Const(b)) => {
                for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                    match x.total_cmp(y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                a.dim().cmp(&b.dim())
            }
            _ => self.key().cmp(&other.key()),
        })
    }
}

impl PartialOrd for Leaf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Leaf {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Leaf {}

/// Binary bracket tree. Leaves order before nodes; nodes compare left
/// subtree first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tree {
    Leaf(Leaf),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn leaf(l: Leaf) -> Self {
        Tree::Leaf(l)
    }

    pub fn node(a: Tree, b: Tree) -> Self {
        Tree::Node(Box::new(a), Box::new(b))
    }

    pub fn z(p: u32) -> Self {
        Tree::Leaf(Leaf::Z(1, p))
    }

    pub fn constant(c: CdNumber) -> Self {
        Tree::Leaf(Leaf::Const(c))
    }

    pub fn leaves(&self) -> Vec<&Leaf> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Leaf>) {
        match self {
            Tree::Leaf(l) => out.push(l),
            Tree::Node(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    pub fn any_leaf(&self, pred: &impl Fn(&Leaf) -> bool) -> bool {
        match self {
            Tree::Leaf(l) => pred(l),
            Tree::Node(a, b) => a.any_leaf(pred) || b.any_leaf(pred),
        }
    }

    pub fn count_leaves(&self, pred: &impl Fn(&Leaf) -> bool) -> usize {
        match self {
            Tree::Leaf(l) => usize::from(pred(l)),
            Tree::Node(a, b) => a.count_leaves(pred) + b.count_leaves(pred),
        }
    }

    pub fn degree(&self) -> u32 {
        self.leaves().iter().map(|l| l.degree()).sum()
    }

    pub fn eval(&self, zs: &[CdNumber], hs: &[Option<CdNumber>], level: u32) -> Result<CdNumber, PhraseError> {
        let var = |v: u32| -> Result<&CdNumber, PhraseError> { zs.get(v as usize - 1).ok_or_else(|| PhraseError::MissingArgument(format!("z_{v}"))) };
        let inc = |v: u32| -> Result<&CdNumber, PhraseError> {
            hs.get(v as usize - 1).and_then(|h| h.as_ref()).ok_or_else(|| PhraseError::MissingArgument(format!("operator argument for I_{v}")))
        };
        Ok(match self {
            Tree::Leaf(l) => match l {
                Leaf::Const(c) => c.clone(),
                Leaf::E(_) | Leaf::Ec(_) => CdNumber::one(level),
                Leaf::Z(v, p) => var(*v)?.powi(*p),
                Leaf::Zc(v, p) => var(*v)?.conj().powi(*p),
                Leaf::One(v) => inc(*v)?.clone(),
                Leaf::OneC(v) => inc(*v)?.conj(),
            },
            Tree::Node(a, b) => &a.eval(zs, hs, level)? * &b.eval(zs, hs, level)?,
        })
    }
}

/// Real coefficient times a bracket tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub coeff: BigRational,
    pub tree: Tree,
}

impl Word {
    pub fn new(coeff: BigRational, tree: Tree) -> Self {
        Word { coeff, tree }
    }

    pub fn degree(&self) -> u32 {
        self.tree.degree()
    }

    pub fn coeff_f64(&self) -> f64 {
        self.coeff.to_f64().unwrap_or(f64::NAN)
    }
}

/// Finite sum of normalized words at a fixed level, sorted by
/// (degree, tree) with equal trees merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    level: u32,
    words: Vec<Word>,
}

impl Phrase {
    pub fn zero(level: u32) -> Self {
        Phrase { level, words: Vec::new() }
    }

    /// Normalizes the given terms; constant-only words are rejected.
    pub fn from_terms(level: u32, terms: Vec<(BigRational, Tree)>) -> Result<Self, PhraseError> {
        normalize::normalize_phrase(level, terms)
    }

    pub fn from_tree(level: u32, tree: Tree) -> Result<Self, PhraseError> {
        Self::from_terms(level, vec![(BigRational::one(), tree)])
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.words.iter().map(|w| w.degree()).max()
    }

    /// Words of homogeneity degree `j`.
    pub fn component(&self, j: u32) -> Vec<&Word> {
        self.words.iter().filter(|w| w.degree() == j).collect()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.words.iter().map(|w| w.degree()).collect();
        d.dedup();
        d
    }

    pub fn variables(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self.words.iter().flat_map(|w| w.tree.leaves().into_iter().filter_map(|l| l.var())).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn has_operator(&self) -> bool {
        self.words.iter().any(|w| w.tree.any_leaf(&|l| matches!(l, Leaf::One(_) | Leaf::OneC(_))))
    }

    fn terms(&self) -> Vec<(BigRational, Tree)> {
        self.words.iter().map(|w| (w.coeff.clone(), w.tree.clone())).collect()
    }

    pub fn add(&self, other: &Phrase) -> Result<Phrase, PhraseError> {
        self.combine(other, BigRational::one())
    }

    pub fn sub(&self, other: &Phrase) -> Result<Phrase, PhraseError> {
        self.combine(other, -BigRational::one())
    }

    fn combine(&self, other: &Phrase, sign: BigRational) -> Result<Phrase, PhraseError> {
        if self.level != other.level {
            return Err(PhraseError::LevelMismatch(self.level, other.level));
        }
        let mut t = self.terms();
        t.extend(other.words.iter().map(|w| (&w.coeff * &sign, w.tree.clone())));
        Phrase::from_terms(self.level, t)
    }

    pub fn scale(&self, c: &BigRational) -> Phrase {
        if c.is_zero() {
            return Phrase::zero(self.level);
        }
        let words = self.words.iter().map(|w| Word::new(&w.coeff * c, w.tree.clone())).collect();
        Phrase { level: self.level, words }
    }

    /// Single-variable evaluation; `h` feeds every `I`/`Ic`.
    pub fn eval(&self, z: &CdNumber, h: Option<&CdNumber>) -> Result<CdNumber, PhraseError> {
        self.eval_multi(std::slice::from_ref(z), &[h.cloned()])
    }

    pub fn eval_multi(&self, zs: &[CdNumber], hs: &[Option<CdNumber>]) -> Result<CdNumber, PhraseError> {
        for z in zs {
            if z.level() != self.level {
                return Err(PhraseError::LevelMismatch(self.level, z.level()));
            }
        }
        let mut acc = CdNumber::zero(self.level);
        for w in &self.words {
            acc += &w.tree.eval(zs, hs, self.level)?.scale(w.coeff_f64());
        }
        Ok(acc)
    }

    pub fn render(&self) -> String {
        parse::render(self)
    }

    pub(crate) fn from_sorted(level: u32, words: Vec<Word>) -> Self {
        Phrase { level, words }
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Phrase {
    type Err = PhraseError;

    /// Parses at level 2.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s, 2)
    }
}
