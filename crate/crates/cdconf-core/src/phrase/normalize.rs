//! Normal form of words, applied to a fixpoint:
//! real constants move into the coefficient, adjacent constants multiply,
//! adjacent powers of the same variable merge, markers of a variable are
//! absorbed by any active symbol of that variable, zero words vanish.
//!
//! Over H the tree is flattened and rebuilt as a left comb, so adjacency is
//! along the whole product. From O upward only siblings are merged.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Leaf, Phrase, PhraseError, Tree, Word};
use crate::algebra::CdNumber;

pub(super) enum Normal {
    Zero,
    /// Real constant with no symbols left.
    Scalar(BigRational),
    Word(Word),
}

fn clean(c: &CdNumber) -> CdNumber {
    CdNumber::new(c.coeffs().iter().map(|x| x + 0.0).collect()).expect("same length")
}

fn join(a: Option<Tree>, b: Option<Tree>) -> Option<Tree> {
    match (a, b) {
        (Some(a), Some(b)) => Some(Tree::node(a, b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn extract(t: Tree) -> (BigRational, Option<Tree>) {
    match t {
        Tree::Leaf(Leaf::Const(c)) => {
            if c.is_real() {
                if let Some(r) = BigRational::from_float(c.re()) {
                    return (r, None);
                }
            }
            (BigRational::one(), Some(Tree::Leaf(Leaf::Const(clean(&c)))))
        }
        Tree::Leaf(l) => (BigRational::one(), Some(Tree::Leaf(l))),
        Tree::Node(a, b) => {
            let (sa, ta) = extract(*a);
            let (sb, tb) = extract(*b);
            (sa * sb, join(ta, tb))
        }
    }
}

fn merge(a: &Leaf, b: &Leaf) -> Option<Leaf> {
    match (a, b) {
        (Leaf::Const(x), Leaf::Const(y)) => Some(Leaf::Const(clean(&(x * y)))),
        (Leaf::Z(v, p), Leaf::Z(w, q)) if v == w => Some(Leaf::Z(*v, p + q)),
        (Leaf::Zc(v, p), Leaf::Zc(w, q)) if v == w => Some(Leaf::Zc(*v, p + q)),
        _ => None,
    }
}

fn fold_siblings(t: Tree) -> Tree {
    match t {
        Tree::Leaf(l) => Tree::Leaf(l),
        Tree::Node(a, b) => {
            let a = fold_siblings(*a);
            let b = fold_siblings(*b);
            if let (Tree::Leaf(x), Tree::Leaf(y)) = (&a, &b) {
                if let Some(m) = merge(x, y) {
                    return Tree::Leaf(m);
                }
            }
            Tree::node(a, b)
        }
    }
}

fn fold_comb(t: Tree) -> Tree {
    let mut seq: Vec<Leaf> = Vec::new();
    for l in t.leaves() {
        if let Some(m) = seq.last().and_then(|last| merge(last, l)) {
            *seq.last_mut().expect("nonempty") = m;
        } else {
            seq.push(l.clone());
        }
    }
    let mut it = seq.into_iter();
    let first = Tree::Leaf(it.next().expect("tree has a leaf"));
    it.fold(first, |acc, l| Tree::node(acc, Tree::Leaf(l)))
}

fn drop_markers(t: Tree, vars: &[u32]) -> Option<Tree> {
    match t {
        Tree::Leaf(l) if vars.iter().any(|&v| l.is_marker_of(v)) => None,
        Tree::Leaf(l) => Some(Tree::Leaf(l)),
        Tree::Node(a, b) => join(drop_markers(*a, vars), drop_markers(*b, vars)),
    }
}

fn absorb_markers(t: Tree) -> Tree {
    let mut vars: Vec<u32> = t
        .leaves()
        .into_iter()
        .filter_map(|l| match *l {
            Leaf::Z(v, _) | Leaf::Zc(v, _) | Leaf::One(v) | Leaf::OneC(v) => Some(v),
            _ => None,
        })
        .collect();
    vars.dedup();
    if vars.is_empty() {
        return t;
    }
    drop_markers(t, &vars).expect("an active leaf survives")
}

pub(super) fn normalize_term(level: u32, coeff: BigRational, tree: Tree) -> Normal {
    let mut c = coeff;
    let mut t = tree;
    loop {
        if c.is_zero() {
            return Normal::Zero;
        }
        let (s, rest) = extract(t.clone());
        c *= s;
        let Some(rest) = rest else {
            return if c.is_zero() { Normal::Zero } else { Normal::Scalar(c) };
        };
        let folded = if level == 2 { fold_comb(rest) } else { fold_siblings(rest) };
        let next = absorb_markers(folded);
        if next == t {
            return if c.is_zero() { Normal::Zero } else { Normal::Word(Word::new(c, t)) };
        }
        t = next;
    }
}

fn check_constants(level: u32, t: &Tree) -> Result<(), PhraseError> {
    let expected = 1usize << level;
    for l in t.leaves() {
        if let Leaf::Const(c) = l {
            if c.dim() != expected {
                return Err(PhraseError::ConstantLength { level, expected, found: c.dim() });
            }
        }
    }
    Ok(())
}

pub(super) fn normalize_phrase(level: u32, terms: Vec<(BigRational, Tree)>) -> Result<Phrase, PhraseError> {
    let mut words = Vec::with_capacity(terms.len());
    for (c, t) in terms {
        check_constants(level, &t)?;
        match normalize_term(level, c, t.clone()) {
            Normal::Zero => {}
            Normal::Scalar(s) => {
                let shown = Phrase::from_sorted(level, vec![Word::new(s, t)]).render();
                return Err(PhraseError::ConstantWord(shown));
            }
            Normal::Word(w) if w.tree.leaves().iter().all(|l| l.is_const()) => {
                return Err(PhraseError::ConstantWord(Phrase::from_sorted(level, vec![w]).render()));
            }
            Normal::Word(w) => words.push(w),
        }
    }
    words.sort_by(|a, b| (a.degree(), &a.tree).cmp(&(b.degree(), &b.tree)));
    let mut merged: Vec<Word> = Vec::with_capacity(words.len());
    for w in words {
        match merged.last_mut() {
            Some(last) if last.tree == w.tree => last.coeff += w.coeff,
            _ => merged.push(w),
        }
    }
    merged.retain(|w| !w.coeff.is_zero());
    Ok(Phrase::from_sorted(level, merged))
}
