//! Derivative in the real direction, antiderivatives and the full derivative
//! operator of a z-only phrase, one variable at a time.
//!
//! `D` is the directional derivative along 1: by bilinearity of every node
//! it obeys Leibniz on the bracket tree, with `D z^p = p z^{p-1}`,
//! `D z = e` and constants and markers going to zero.
//!
//! For a node with symbols on both sides the antiderivative integrates by
//! parts and telescopes; the series stops once `D` exhausts the other side:
//!
//! ```text
//! Left:  A(L R) = Σ_{p≥1} (−1)^{p−1} (A^p L)(D^{p−1} R)
//! Right: A(L R) = Σ_{n≥0} (−1)^n     (D^n L)(A^{n+1} R)
//! ```

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Leaf, Phrase, PhraseError, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Left,
    Right,
}

type Terms = Vec<(BigRational, Tree)>;

fn unsupported(l: &Leaf, v: u32, what: &str) -> PhraseError {
    let sym = match l {
        Leaf::Zc(..) => "zc",
        Leaf::One(_) => "I",
        Leaf::OneC(_) => "Ic",
        _ => "symbol",
    };
    PhraseError::Unsupported(format!("{what} of a phrase containing {sym}_{v}"))
}

fn blocked(l: &Leaf, v: u32) -> bool {
    matches!(*l, Leaf::Zc(w, _) | Leaf::One(w) | Leaf::OneC(w) if w == v)
}

fn check_z_only(p: &Phrase, v: u32, what: &str) -> Result<(), PhraseError> {
    for w in p.words() {
        if let Some(l) = w.tree.leaves().into_iter().find(|l| blocked(l, v)) {
            return Err(unsupported(l, v, what));
        }
    }
    Ok(())
}

fn d_tree(t: &Tree, v: u32) -> Terms {
    match t {
        Tree::Leaf(Leaf::Z(w, p)) if *w == v => {
            if *p == 1 {
                vec![(BigRational::one(), Tree::Leaf(Leaf::E(v)))]
            } else {
                vec![(BigRational::from_integer((*p).into()), Tree::Leaf(Leaf::Z(v, p - 1)))]
            }
        }
        Tree::Leaf(_) => Vec::new(),
        Tree::Node(a, b) => {
            let mut out: Terms = d_tree(a, v).into_iter().map(|(c, da)| (c, Tree::node(da, (**b).clone()))).collect();
            out.extend(d_tree(b, v).into_iter().map(|(c, db)| (c, Tree::node((**a).clone(), db))));
            out
        }
    }
}

fn d_terms(ts: &Terms, v: u32) -> Terms {
    ts.iter().flat_map(|(c, t)| d_tree(t, v).into_iter().map(move |(k, s)| (c * k, s))).collect()
}

fn is_active(t: &Tree, v: u32) -> bool {
    t.any_leaf(&|l| matches!(*l, Leaf::Z(w, _) | Leaf::E(w) if w == v))
}

fn a_tree(t: &Tree, v: u32, side: Side) -> Result<Terms, PhraseError> {
    match t {
        Tree::Leaf(Leaf::Z(w, p)) if *w == v => Ok(vec![(BigRational::new(1.into(), (p + 1).into()), Tree::Leaf(Leaf::Z(v, p + 1)))]),
        Tree::Leaf(Leaf::E(w)) if *w == v => Ok(vec![(BigRational::one(), Tree::Leaf(Leaf::Z(v, 1)))]),
        Tree::Leaf(l) if blocked(l, v) => Err(unsupported(l, v, "antiderivative")),
        Tree::Leaf(_) => Err(PhraseError::Unsupported(format!("antiderivative of a constant with respect to z_{v}"))),
        Tree::Node(a, b) => {
            let (la, ra) = (is_active(a, v), is_active(b, v));
            match (la, ra) {
                (false, false) => Err(PhraseError::Unsupported(format!("word without z_{v}"))),
                (false, true) => Ok(a_tree(b, v, side)?.into_iter().map(|(c, s)| (c, Tree::node((**a).clone(), s))).collect()),
                (true, false) => Ok(a_tree(a, v, side)?.into_iter().map(|(c, s)| (c, Tree::node(s, (**b).clone()))).collect()),
                (true, true) => by_parts(a, b, v, side),
            }
        }
    }
}

fn a_terms(ts: &Terms, v: u32, side: Side) -> Result<Terms, PhraseError> {
    let mut out = Vec::new();
    for (c, t) in ts {
        out.extend(a_tree(t, v, side)?.into_iter().map(|(k, s)| (c * k, s)));
    }
    Ok(out)
}

fn pair(xs: &Terms, ys: &Terms, sign: &BigRational) -> Terms {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for (cx, x) in xs {
        for (cy, y) in ys {
            out.push((sign * cx * cy, Tree::node(x.clone(), y.clone())));
        }
    }
    out
}

fn by_parts(l: &Tree, r: &Tree, v: u32, side: Side) -> Result<Terms, PhraseError> {
    let one = BigRational::one();
    let mut out = Vec::new();
    let mut sign = one.clone();
    match side {
        Side::Left => {
            let mut integrated = a_terms(&vec![(one.clone(), l.clone())], v, side)?;
            let mut differentiated = vec![(one, r.clone())];
            while !differentiated.is_empty() {
                out.extend(pair(&integrated, &differentiated, &sign));
                integrated = a_terms(&integrated, v, side)?;
                differentiated = d_terms(&differentiated, v);
                sign = -sign;
            }
        }
        Side::Right => {
            let mut differentiated = vec![(one.clone(), l.clone())];
            let mut integrated = a_terms(&vec![(one, r.clone())], v, side)?;
            while !differentiated.is_empty() {
                out.extend(pair(&differentiated, &integrated, &sign));
                differentiated = d_terms(&differentiated, v);
                integrated = a_terms(&integrated, v, side)?;
                sign = -sign;
            }
        }
    }
    Ok(out)
}

pub fn derivative_at_one(p: &Phrase) -> Result<Phrase, PhraseError> {
    derivative_at_one_var(p, 1)
}

/// `(∂f/∂z_v).1` of a phrase free of `zc_v`, `I_v` and `Ic_v`.
pub fn derivative_at_one_var(p: &Phrase, v: u32) -> Result<Phrase, PhraseError> {
    check_z_only(p, v, "derivative")?;
    let mut terms = Vec::new();
    for w in p.words() {
        terms.extend(d_tree(&w.tree, v).into_iter().map(|(c, t)| (&w.coeff * c, t)));
    }
    Phrase::from_terms(p.level(), terms)
}

pub fn antiderive(p: &Phrase, side: Side) -> Result<Phrase, PhraseError> {
    antiderive_var(p, 1, side)
}

/// A phrase `μ` with `derivative_at_one_var(μ, v) = p`.
///
/// Words without `z_v` must hold exactly one marker `e_v`, which becomes
/// `z_v`.
pub fn antiderive_var(p: &Phrase, v: u32, side: Side) -> Result<Phrase, PhraseError> {
    check_z_only(p, v, "antiderivative")?;
    let mut terms = Vec::new();
    for w in p.words() {
        let has_z = w.tree.any_leaf(&|l| matches!(*l, Leaf::Z(u, _) if u == v));
        let markers = w.tree.count_leaves(&|l| l.is_marker_of(v));
        if !has_z && markers != 1 {
            return Err(PhraseError::Unsupported(format!("word {} has {markers} markers e_{v} and no z_{v}", super::parse::render_tree(&w.tree))));
        }
        terms.extend(a_tree(&w.tree, v, side)?.into_iter().map(|(c, t)| (&w.coeff * c, t)));
    }
    Phrase::from_terms(p.level(), terms)
}

fn z_power_split(p: u32, v: u32) -> Vec<Tree> {
    (0..p)
        .map(|k| {
            let head = if k == 0 { Tree::Leaf(Leaf::One(v)) } else { Tree::node(Tree::Leaf(Leaf::Z(v, k)), Tree::Leaf(Leaf::One(v))) };
            let m = p - 1 - k;
            if m == 0 {
                head
            } else {
                Tree::node(head, Tree::Leaf(Leaf::Z(v, m)))
            }
        })
        .collect()
}

/// Full derivative of a word, `h` written as `I_v`.
fn full_derivative(t: &Tree, v: u32) -> Vec<Tree> {
    match t {
        Tree::Leaf(Leaf::Z(w, p)) if *w == v => z_power_split(*p, v),
        Tree::Leaf(_) => Vec::new(),
        Tree::Node(a, b) => {
            let mut out: Vec<Tree> = full_derivative(a, v).into_iter().map(|da| Tree::node(da, (**b).clone())).collect();
            out.extend(full_derivative(b, v).into_iter().map(|db| Tree::node((**a).clone(), db)));
            out
        }
    }
}

pub fn hat_operator(p: &Phrase) -> Result<Phrase, PhraseError> {
    hat_operator_var(p, 1)
}

/// The operator phrase `h ↦ dμ(z).h` with `μ` the left antiderivative;
/// at `h = 1` it evaluates to `p`.
pub fn hat_operator_var(p: &Phrase, v: u32) -> Result<Phrase, PhraseError> {
    let mu = antiderive_var(p, v, Side::Left)?;
    let mut terms = Vec::new();
    for w in mu.words() {
        terms.extend(full_derivative(&w.tree, v).into_iter().map(|t| (w.coeff.clone(), t)));
    }
    let out = Phrase::from_terms(p.level(), terms)?;
    debug_assert!(out.words().iter().all(|w| !w.coeff.is_zero()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use crate::algebra::CdNumber;

    fn q(c: [f64; 4]) -> CdNumber {
        CdNumber::new(c.to_vec()).unwrap()
    }

    #[test]
    fn power_rule() {
        let p = parse("z^4", 2).unwrap();
        assert_eq!(derivative_at_one(&p).unwrap().render(), "[4] z^3");
        assert_eq!(derivative_at_one(&parse("z", 2).unwrap()).unwrap().render(), "e");
    }

    #[test]
    fn sandwich_keeps_marker() {
        let p = parse("[0,1,0,0] z [0,0,1,0]", 2).unwrap();
        let d = derivative_at_one(&p).unwrap();
        assert_eq!(d.render(), "(([0,1,0,0] e) [0,0,1,0])");
        assert_eq!(antiderive(&d, Side::Left).unwrap(), p);
    }

    #[test]
    fn leibniz_example() {
        let p = parse("[0,1,0,0] z^2 [0,0,1,0] z^3 [0,0,0,1]", 2).unwrap();
        let want = parse("[2] [0,1,0,0] z [0,0,1,0] z^3 [0,0,0,1] + [3] [0,1,0,0] z^2 [0,0,1,0] z^2 [0,0,0,1]", 2).unwrap();
        assert_eq!(derivative_at_one(&p).unwrap(), want);
    }

    #[test]
    fn conjugates_rejected() {
        let p = parse("zc z", 2).unwrap();
        assert!(matches!(derivative_at_one(&p), Err(PhraseError::Unsupported(_))));
        assert!(matches!(antiderive(&p, Side::Right), Err(PhraseError::Unsupported(_))));
    }

    #[test]
    fn antiderivative_of_powers() {
        let p = parse("z^3", 3).unwrap();
        assert_eq!(antiderive(&p, Side::Left).unwrap().render(), "[1/4] z^4");
    }

    #[test]
    fn round_trip_noncommuting() {
        for side in [Side::Left, Side::Right] {
            let p = parse("[0,1,0,0] z [0,0,1,0] z [0,0,0,1]", 2).unwrap();
            let mu = antiderive(&p, side).unwrap();
            assert_eq!(derivative_at_one(&mu).unwrap(), p);
        }
    }

    #[test]
    fn hat_examples() {
        assert_eq!(hat_operator(&parse("e", 2).unwrap()).unwrap().render(), "I");
        let z = q([0.3, -0.2, 0.9, 0.1]);
        let h = q([-1.0, 0.5, 0.25, 2.0]);
        let hat = hat_operator(&parse("z", 2).unwrap()).unwrap();
        let want = (&(&z * &h) + &(&h * &z)).scale(0.5);
        assert!(hat.eval(&z, Some(&h)).unwrap().dist(&want) < 1e-14);
        let (a, b) = (q([0.0, 1.0, 0.0, 0.0]), q([0.0, 0.0, 1.0, 0.0]));
        let sand = hat_operator(&parse("[0,1,0,0] e [0,0,1,0]", 2).unwrap()).unwrap();
        assert!(sand.eval(&z, Some(&h)).unwrap().dist(&(&(&a * &h) * &b)) < 1e-14);
    }

    #[test]
    fn double_marker_rejected() {
        let p = parse("e [0,1,0,0] e", 2).unwrap();
        assert!(matches!(antiderive(&p, Side::Left), Err(PhraseError::Unsupported(_))));
    }
}
