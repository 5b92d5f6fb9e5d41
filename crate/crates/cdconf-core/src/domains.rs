//! Automorphisms of the unit ball and the polydisc in K^n, the Cayley map
//! of the half-space `⟨z, M⟩ > 0` onto the unit ball, and sampled Schwarz
//! lemma and Cartan uniqueness checks.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::CdNumber;
use crate::calculus::{self, apply_givens, factor_octonion_givens, factor_quaternion};
use crate::moebius::Ext;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("point outside the domain: {0}")]
    Outside(String),
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error("precondition failed ({which}): deviation {deviation:e}")]
    Precondition { which: String, deviation: f64 },
    #[error(transparent)]
    Calculus(#[from] calculus::CalculusError),
}

pub fn euclidean(z: &[CdNumber]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_norm(z: &[CdNumber]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Euclidean,
    MaxPolydisc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousNorm {
    pub kind: NormKind,
    pub level: u32,
    pub arity: usize,
}

impl HomogeneousNorm {
    pub fn norm(&self, z: &[CdNumber]) -> f64 {
        match self.kind {
            NormKind::Euclidean => euclidean(z),
            NormKind::MaxPolydisc => max_norm(z),
        }
    }

    /// Random point of the open unit ball of this norm, radius drawn from
    /// `[0, rmax)`.
    pub fn sample_ball<R: Rng>(&self, rmax: f64, rng: &mut R) -> Vec<CdNumber> {
        let dim = 1usize << self.level;
        let mut z: Vec<CdNumber> = (0..self.arity).map(|_| CdNumber::new((0..dim).map(|_| gaussian(rng)).collect()).expect("valid level")).collect();
        let n = self.norm(&z);
        let r = rmax * rng.random::<f64>();
        for c in &mut z {
            *c = c.scale(r / n);
        }
        z
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `Σ_j z_j ã_j`.
pub fn inner(z: &[CdNumber], a: &[CdNumber]) -> CdNumber {
    let level = a[0].level();
    z.iter().zip(a).fold(CdNumber::zero(level), |acc, (x, y)| &acc + &(x * &y.conj()))
}

/// Norm-preserving multiplier applied to one coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum FrameOp {
    /// `z ↦ u z`
    Left { u: CdNumber },
    /// `z ↦ z u`
    Right { u: CdNumber },
    /// Givens word over the octonions.
    Givens { angles: Vec<(usize, usize, f64)> },
}

impl FrameOp {
    fn apply(&self, z: &CdNumber) -> CdNumber {
        match self {
            FrameOp::Left { u } => u * z,
            FrameOp::Right { u } => z * u,
            FrameOp::Givens { angles } => apply_givens(angles, z),
        }
    }

    fn inverse(&self) -> FrameOp {
        match self {
            FrameOp::Left { u } => FrameOp::Left { u: u.conj() },
            FrameOp::Right { u } => FrameOp::Right { u: u.conj() },
            FrameOp::Givens { angles } => FrameOp::Givens { angles: angles.iter().rev().map(|&(k, m, t)| (k, m, -t)).collect() },
        }
    }

    fn check(&self, level: u32) -> Result<(), DomainError> {
        match self {
            FrameOp::Left { u } | FrameOp::Right { u } => {
                if u.level() != level || (u.norm() - 1.0).abs() > 1e-12 {
                    return Err(DomainError::BadParameters(format!("frame multiplier {u} must be a unit of level {level}")));
                }
            }
            FrameOp::Givens { angles } => {
                if level != 3 || angles.iter().any(|&(k, m, _)| !(k < m && m < 8)) {
                    return Err(DomainError::BadParameters("givens frames need level 3 and planes k < m < 8".into()));
                }
            }
        }
        Ok(())
    }
}

/// `z ↦ F(S_a(z))` on the unit ball of K^n, where `F` applies per-coordinate
/// frame operations in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallAutomorphism {
    pub a: Vec<CdNumber>,
    #[serde(default)]
    pub frame: Vec<Vec<FrameOp>>,
}

impl BallAutomorphism {
    pub fn new(a: Vec<CdNumber>, frame: Vec<Vec<FrameOp>>) -> Result<Self, DomainError> {
        let b = BallAutomorphism { a, frame };
        b.check()?;
        Ok(b)
    }

    pub fn involution(a: Vec<CdNumber>) -> Result<Self, DomainError> {
        Self::new(a, Vec::new())
    }

    pub fn check(&self) -> Result<(), DomainError> {
        let Some(first) = self.a.first() else {
            return Err(DomainError::BadParameters("a must have at least one coordinate".into()));
        };
        let level = first.level();
        if self.a.iter().any(|c| c.level() != level) {
            return Err(DomainError::BadParameters("coordinates of a at different levels".into()));
        }
        if !(euclidean(&self.a) < 1.0) {
            return Err(DomainError::BadParameters(format!("|a| = {} is not below 1", euclidean(&self.a))));
        }
        if !self.frame.is_empty() && self.frame.len() != self.a.len() {
            return Err(DomainError::BadParameters("frame needs one list per coordinate".into()));
        }
        for op in self.frame.iter().flatten() {
            op.check(level)?;
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.a.len()
    }

    pub fn level(&self) -> u32 {
        self.a[0].level()
    }

    fn check_input(&self, z: &[CdNumber]) -> Result<(), DomainError> {
        if z.len() != self.arity() || z.iter().any(|c| c.level() != self.level()) {
            return Err(DomainError::BadParameters(format!("expected {} coordinates at level {}", self.arity(), self.level())));
        }
        let n = euclidean(z);
        if !(n < 1.0) {
            return Err(DomainError::Outside(format!("|z| = {n} is not below 1")));
        }
        Ok(())
    }

    /// `S_a(z) = (1 − ⟨z,a⟩)^{-1}(a − π_a(z) − (1 − |a|²)^{1/2} ζ_a(z))`
    /// with `π_a(z) = ⟨z,a⟩ a / |a|²` and `ζ_a = z − π_a`.
    pub fn involution_part(&self, z: &[CdNumber]) -> Vec<CdNumber> {
        let a2: f64 = self.a.iter().map(|c| c.norm_sqr()).sum();
        if a2 == 0.0 {
            return z.to_vec();
        }
        let level = self.level();
        let za = inner(z, &self.a);
        let left = (&CdNumber::one(level) - &za).inv();
        let s = (1.0 - a2).sqrt();
        self.a
            .iter()
            .zip(z)
            .map(|(aj, zj)| {
                let pi = (&za * aj).scale(1.0 / a2);
                let zeta = zj - &pi;
                let num = &(aj - &pi) - &zeta.scale(s);
                match &left {
                    Ok(l) => l * &num,
                    Err(_) => CdNumber::new(vec![f64::INFINITY; 1 << level]).expect("valid level"),
                }
            })
            .collect()
    }

    pub fn apply(&self, z: &[CdNumber]) -> Result<Vec<CdNumber>, DomainError> {
        self.check_input(z)?;
        Ok(self.apply_unchecked(z))
    }

    fn apply_unchecked(&self, z: &[CdNumber]) -> Vec<CdNumber> {
        let mut w = if self.a.iter().all(|c| c.norm_sqr() == 0.0) { z.to_vec() } else { self.involution_part(z) };
        for (c, ops) in w.iter_mut().zip(&self.frame) {
            for op in ops {
                *c = op.apply(c);
            }
        }
        w
    }

    /// Inverse: undo the frame, then apply the involution.
    pub fn apply_inverse(&self, w: &[CdNumber]) -> Result<Vec<CdNumber>, DomainError> {
        self.check_input(w)?;
        let mut z = w.to_vec();
        for (c, ops) in z.iter_mut().zip(&self.frame) {
            for op in ops.iter().rev() {
                *c = op.inverse().apply(c);
            }
        }
        let inv = BallAutomorphism { a: self.a.clone(), frame: Vec::new() };
        Ok(inv.apply_unchecked(&z))
    }

    /// `then ∘ self` in normal form, one coordinate only: the new centre is
    /// the preimage of 0, the frame is read off the derivative at 0 of the
    /// remaining rotation.
    pub fn then(&self, then: &BallAutomorphism) -> Result<BallAutomorphism, DomainError> {
        if self.arity() != 1 || then.arity() != 1 || self.level() != then.level() {
            return Err(DomainError::BadParameters("composition normal form needs n = 1 and equal levels".into()));
        }
        let zero = vec![CdNumber::zero(self.level())];
        let a_new = self.apply_inverse(&then.apply_inverse(&zero)?)?;
        let s_new = BallAutomorphism::involution(a_new.clone())?;
        let rest = |h: &CdNumber| -> CdNumber {
            let x = s_new.apply_unchecked(std::slice::from_ref(h));
            then.apply_unchecked(&self.apply_unchecked(&x))[0].clone()
        };
        let j = calculus::jacobian(rest, &zero[0], 1e-6)?;
        let frame = match self.level() {
            2 => {
                let f = factor_quaternion(&j)?;
                vec![FrameOp::Left { u: f.a }, FrameOp::Right { u: f.b }]
            }
            3 => vec![FrameOp::Givens { angles: factor_octonion_givens(&j)?.angles }],
            l => return Err(DomainError::BadParameters(format!("no frame normal form at level {l}"))),
        };
        BallAutomorphism::new(a_new, vec![frame])
    }
}

/// Per-coordinate data `ζ_j = (c3((c1 z_j) c2)) c4` and
/// `out_j = (1 − ζ_σ(j) b̃_σ(j))^{-1}(b_σ(j) − ζ_σ(j))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolydiscAutomorphism {
    pub b: Vec<CdNumber>,
    pub c: Vec<[CdNumber; 4]>,
    pub sigma: Vec<usize>,
}

impl PolydiscAutomorphism {
    pub fn new(b: Vec<CdNumber>, c: Vec<[CdNumber; 4]>, sigma: Vec<usize>) -> Result<Self, DomainError> {
        let p = PolydiscAutomorphism { b, c, sigma };
        p.check()?;
        Ok(p)
    }

    pub fn identity(level: u32, n: usize) -> Self {
        let one = CdNumber::one(level);
        PolydiscAutomorphism { b: vec![CdNumber::zero(level); n], c: vec![[one.clone(), one.clone(), one.clone(), one]; n], sigma: (0..n).collect() }
    }

    pub fn check(&self) -> Result<(), DomainError> {
        let n = self.b.len();
        if n == 0 || self.c.len() != n || self.sigma.len() != n {
            return Err(DomainError::BadParameters("b, c and sigma need the same nonzero length".into()));
        }
        let level = self.b[0].level();
        let mut seen = vec![false; n];
        for &s in &self.sigma {
            if s >= n || seen[s] {
                return Err(DomainError::BadParameters(format!("sigma {:?} is not a permutation", self.sigma)));
            }
            seen[s] = true;
        }
        for (bj, cj) in self.b.iter().zip(&self.c) {
            if bj.level() != level || !(bj.norm() < 1.0) {
                return Err(DomainError::BadParameters(format!("|b| = {} must be below 1", bj.norm())));
            }
            for (k, ck) in cj.iter().enumerate() {
                if ck.level() != level || (ck.norm() - 1.0).abs() > 1e-12 {
                    return Err(DomainError::BadParameters(format!("c{} = {ck} must be a unit", k + 1)));
                }
                if level == 2 && k >= 2 && ck.dist(&CdNumber::one(2)) > 1e-12 {
                    return Err(DomainError::BadParameters("over H, c3 = c4 = 1".into()));
                }
            }
        }
        Ok(())
    }

    fn zeta(&self, j: usize, z: &CdNumber) -> CdNumber {
        let [c1, c2, c3, c4] = &self.c[j];
        &(c3 * &(&(c1 * z) * c2)) * c4
    }

    pub fn apply(&self, z: &[CdNumber]) -> Result<Vec<CdNumber>, DomainError> {
        if z.len() != self.b.len() {
            return Err(DomainError::BadParameters(format!("expected {} coordinates", self.b.len())));
        }
        let m = max_norm(z);
        if !(m < 1.0) {
            return Err(DomainError::Outside(format!("max |z_j| = {m} is not below 1")));
        }
        let level = self.b[0].level();
        let zeta: Vec<CdNumber> = z.iter().enumerate().map(|(j, zj)| self.zeta(j, zj)).collect();
        Ok(self
            .sigma
            .iter()
            .map(|&s| {
                let den = &CdNumber::one(level) - &(&zeta[s] * &self.b[s].conj());
                &den.inv().expect("|ζ b̃| < 1") * &(&self.b[s] - &zeta[s])
            })
            .collect())
    }

    /// Coordinate `j` value whose `ζ_j` equals `b_j`.
    pub fn preimage_of_zero(&self, j: usize) -> CdNumber {
        let [c1, c2, c3, c4] = &self.c[j];
        let inv = |u: &CdNumber| u.conj();
        let w = &inv(c3) * &(&self.b[j] * &inv(c4));
        &inv(c1) * &(&w * &inv(c2))
    }
}

/// `W = (z + M)^{-1}(z − M)`; ∞ at `z = −M`.
pub fn cayley_to_ball(z: &CdNumber, m: &CdNumber) -> Result<Ext, DomainError> {
    check_direction(m)?;
    let re = z.dot(m);
    // boundary points computed in floating point may land a rounding error outside
    if re < -1e-12 * z.norm().max(1.0) {
        return Err(DomainError::Outside(format!("⟨z, M⟩ = {re} is negative")));
    }
    Ok(match (z + m).inv() {
        Ok(l) => Ext::Finite(&l * &(z - m)),
        Err(_) => Ext::INF,
    })
}

/// `Z = (M(1 + W))(1 − W)^{-1}`; ∞ at `W = 1`.
pub fn ball_to_halfspace(w: &CdNumber, m: &CdNumber) -> Result<Ext, DomainError> {
    check_direction(m)?;
    let n = w.norm();
    if n > 1.0 {
        return Err(DomainError::Outside(format!("|W| = {n} exceeds 1")));
    }
    let one = CdNumber::one(w.level());
    Ok(match (&one - w).inv() {
        Ok(r) => Ext::Finite(&(m * &(&one + w)) * &r),
        Err(_) => Ext::INF,
    })
}

/// Both sides of `1 − W W̃ = −4 (z+M)^{-1} Re(zM) (z̃−M)^{-1}`.
pub fn halfspace_identity(z: &CdNumber, m: &CdNumber) -> Result<(CdNumber, CdNumber), DomainError> {
    let w = cayley_to_ball(z, m)?.finite().cloned().ok_or_else(|| DomainError::Outside("z = −M".into()))?;
    let one = CdNumber::one(z.level());
    let lhs = &one - &(&w * &w.conj());
    let a = (z + m).inv().map_err(|_| DomainError::Outside("z = −M".into()))?;
    let b = (&z.conj() - m).inv().map_err(|_| DomainError::Outside("z̃ = M".into()))?;
    let rhs = (&a * &b).scale(-4.0 * (z * m).re());
    Ok((lhs, rhs))
}

fn check_direction(m: &CdNumber) -> Result<(), DomainError> {
    if m.re().abs() > 1e-12 || (m.norm() - 1.0).abs() > 1e-12 {
        return Err(DomainError::BadParameters(format!("M = {m} must be a unit imaginary element")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchwarzResult {
    pub holds: bool,
    pub worst_ratio: f64,
    pub witness: Option<Vec<CdNumber>>,
}

/// `‖f(z)‖_out ≤ ‖z‖_in + tol` on the samples, for `f(0) = 0`.
pub fn schwarz_check<F>(f: F, norm_in: &HomogeneousNorm, norm_out: &HomogeneousNorm, samples: &[Vec<CdNumber>], tol: f64) -> Result<SchwarzResult, DomainError>
where
    F: Fn(&[CdNumber]) -> Vec<CdNumber>,
{
    let zero = vec![CdNumber::zero(norm_in.level); norm_in.arity];
    let f0 = norm_out.norm(&f(&zero));
    if !(f0 <= tol) {
        return Err(DomainError::Precondition { which: "f(0) = 0".into(), deviation: f0 });
    }
    let mut worst_ratio = 0.0_f64;
    let mut witness = None;
    for z in samples {
        let (nz, nf) = (norm_in.norm(z), norm_out.norm(&f(z)));
        if nz > 0.0 {
            worst_ratio = worst_ratio.max(nf / nz);
        }
        if witness.is_none() && !(nf <= nz + tol) {
            witness = Some(z.clone());
        }
    }
    Ok(SchwarzResult { holds: witness.is_none(), worst_ratio, witness })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CartanResult {
    pub is_identity: bool,
    pub max_dev: f64,
}

/// With `f(base) = base` and `f'(base) = I` confirmed to `pre_tol`,
/// reports `max |f(z) − z|` over the samples.
pub fn cartan_check<F>(f: F, base: &[CdNumber], samples: &[Vec<CdNumber>], pre_tol: f64, tol: f64) -> Result<CartanResult, DomainError>
where
    F: Fn(&[CdNumber]) -> Vec<CdNumber>,
{
    let fixed = euclidean(&diff(&f(base), base));
    if !(fixed <= pre_tol) {
        return Err(DomainError::Precondition { which: "f(base) = base".into(), deviation: fixed });
    }
    let j = calculus::jacobian_n(&f, base, 1e-5)?;
    let mut dev = 0.0_f64;
    for r in 0..j.nrows() {
        for c in 0..j.ncols() {
            let target = if r == c { 1.0 } else { 0.0 };
            dev = dev.max((j[(r, c)] - target).abs());
        }
    }
    if !(dev <= pre_tol) {
        return Err(DomainError::Precondition { which: "f'(base) = I".into(), deviation: dev });
    }
    let max_dev = samples.iter().map(|z| euclidean(&diff(&f(z), z))).fold(0.0, f64::max);
    Ok(CartanResult { is_identity: max_dev < tol, max_dev })
}

fn diff(a: &[CdNumber], b: &[CdNumber]) -> Vec<CdNumber> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(c: [f64; 4]) -> CdNumber {
        CdNumber::new(c.to_vec()).unwrap()
    }

    #[test]
    fn ball_basics() {
        let a = vec![q([0.2, -0.3, 0.1, 0.4])];
        let s = BallAutomorphism::involution(a.clone()).unwrap();
        assert!(euclidean(&s.apply(&a).unwrap()) < 1e-15);
        let z = vec![q([-0.1, 0.5, 0.2, 0.0])];
        let back = s.apply(&s.apply(&z).unwrap()).unwrap();
        assert!(euclidean(&diff(&back, &z)) < 1e-14);
        let id = BallAutomorphism::involution(vec![CdNumber::zero(2)]).unwrap();
        assert_eq!(id.apply(&z).unwrap(), z);
        assert!(matches!(s.apply(&[CdNumber::real(2, 1.0)]), Err(DomainError::Outside(_))));
        assert!(BallAutomorphism::involution(vec![CdNumber::real(2, 1.0)]).is_err());
    }

    #[test]
    fn polydisc_basics() {
        let id = PolydiscAutomorphism::identity(2, 2);
        let z = vec![q([0.1, 0.2, 0.0, 0.3]), q([-0.5, 0.0, 0.1, 0.0])];
        let w = id.apply(&z).unwrap();
        // with b = 0 the coordinate map is ζ ↦ −ζ
        assert!(euclidean(&diff(&w, &z.iter().map(|c| -c).collect::<Vec<_>>())) < 1e-15);
        let u = q([0.6, 0.0, 0.8, 0.0]);
        let one = CdNumber::one(2);
        let p = PolydiscAutomorphism::new(vec![q([0.3, 0.1, 0.0, -0.2])], vec![[u.clone(), u.conj(), one.clone(), one]], vec![0]).unwrap();
        let z0 = p.preimage_of_zero(0);
        assert!(p.apply(&[z0]).unwrap()[0].norm() < 1e-15);
    }

    #[test]
    fn cayley_examples() {
        let m = CdNumber::basis(2, 2);
        assert!(cayley_to_ball(&m, &m).unwrap().finite().unwrap().norm() < 1e-15);
        let edge = q([1.5, 0.3, 0.0, -2.0]);
        assert!((cayley_to_ball(&edge, &m).unwrap().finite().unwrap().norm() - 1.0).abs() < 1e-12);
        let z = q([0.3, -0.7, 1.2, 0.4]);
        let w = cayley_to_ball(&z, &m).unwrap();
        let back = ball_to_halfspace(w.finite().unwrap(), &m).unwrap();
        assert!(back.finite().unwrap().dist(&z) < 1e-14);
        assert_eq!(ball_to_halfspace(&CdNumber::one(2), &m).unwrap(), Ext::INF);
        let (l, r) = halfspace_identity(&z, &m).unwrap();
        assert!(l.dist(&r) < 1e-14);
    }

    #[test]
    fn schwarz_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let norm = HomogeneousNorm { kind: NormKind::Euclidean, level: 2, arity: 1 };
        let samples: Vec<_> = (0..100).map(|_| norm.sample_ball(1.0, &mut rng)).collect();
        let r = schwarz_check(|z| z.to_vec(), &norm, &norm, &samples, 1e-9).unwrap();
        assert!(r.holds && (r.worst_ratio - 1.0).abs() < 1e-12);
        let r = schwarz_check(|z| z.iter().map(|c| c.scale(1.1)).collect(), &norm, &norm, &samples, 1e-9).unwrap();
        assert!(!r.holds && r.witness.is_some());
        let shifted = schwarz_check(|z| z.iter().map(|c| c + &CdNumber::one(2)).collect(), &norm, &norm, &samples, 1e-9);
        assert!(matches!(shifted, Err(DomainError::Precondition { .. })));
    }

    #[test]
    fn cartan_examples() {
        let base = vec![CdNumber::zero(2)];
        let samples = vec![vec![q([0.1, 0.2, 0.3, 0.0])]];
        assert!(cartan_check(|z| z.to_vec(), &base, &samples, 1e-6, 1e-8).unwrap().is_identity);
        let u = q([(0.05f64).cos(), (0.05f64).sin(), 0.0, 0.0]);
        let rot = cartan_check(|z| vec![&u * &z[0]], &base, &samples, 1e-6, 1e-8);
        match rot {
            Err(DomainError::Precondition { which, .. }) => assert_eq!(which, "f'(base) = I"),
            other => panic!("{other:?}"),
        }
    }

    fn random_unit<R: Rng>(level: u32, rng: &mut R) -> CdNumber {
        let u = CdNumber::new((0..1usize << level).map(|_| gaussian(rng)).collect()).unwrap();
        u.scale(1.0 / u.norm())
    }

    #[test]
    fn ball_maps_are_pseudoconformal_involutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for level in [2, 3] {
            let norm = HomogeneousNorm { kind: NormKind::Euclidean, level, arity: 1 };
            for _ in 0..20 {
                let a = norm.sample_ball(0.9, &mut rng);
                let s = BallAutomorphism::involution(a).unwrap();
                let z = norm.sample_ball(0.95, &mut rng);
                let w = s.apply(&z).unwrap();
                assert!(euclidean(&w) < 1.0);
                assert!(euclidean(&diff(&s.apply(&w).unwrap(), &z)) < 1e-12);
                let v = calculus::is_pseudoconformal_at(|x| s.apply_unchecked(std::slice::from_ref(x))[0].clone(), &z[0], 1e-6).unwrap();
                assert!(v.is_pseudoconformal(), "level {level}: {v:?}");
            }
        }
    }

    fn push_to_sphere(z: &mut [CdNumber], r: f64) {
        let n = euclidean(z);
        for c in z.iter_mut() {
            *c = c.scale(r / n);
        }
    }

    #[test]
    fn two_variable_quaternion_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let norm = HomogeneousNorm { kind: NormKind::Euclidean, level: 2, arity: 2 };
        for _ in 0..50 {
            let s = BallAutomorphism::involution(norm.sample_ball(0.9, &mut rng)).unwrap();
            let mut z = norm.sample_ball(1.0, &mut rng);
            push_to_sphere(&mut z, 1.0 - 1e-9);
            assert!((euclidean(&s.apply(&z).unwrap()) - 1.0).abs() < 1e-6);
            let p = norm.sample_ball(0.9, &mut rng);
            assert!(euclidean(&diff(&s.apply(&s.apply(&p).unwrap()).unwrap(), &p)) < 1e-12);
        }
    }

    // Over O with n = 2 the literal formula still sends a to 0 and the sphere
    // to itself, but it is no longer an involution.
    #[test]
    fn two_variable_octonion_ball_is_not_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let norm = HomogeneousNorm { kind: NormKind::Euclidean, level: 3, arity: 2 };
        let mut worst = 0.0_f64;
        for _ in 0..50 {
            let s = BallAutomorphism::involution(norm.sample_ball(0.9, &mut rng)).unwrap();
            assert!(euclidean(&s.apply(&s.a).unwrap()) < 1e-12);
            let mut z = norm.sample_ball(1.0, &mut rng);
            push_to_sphere(&mut z, 1.0 - 1e-9);
            assert!((euclidean(&s.apply(&z).unwrap()) - 1.0).abs() < 1e-6);
            let p = norm.sample_ball(0.9, &mut rng);
            worst = worst.max(euclidean(&diff(&s.apply(&s.apply(&p).unwrap()).unwrap(), &p)));
        }
        assert!(worst > 1e-3, "{worst:e}");
    }

    #[test]
    fn polydisc_maps_into_polydisc() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for level in [2, 3] {
            let disc = HomogeneousNorm { kind: NormKind::MaxPolydisc, level, arity: 3 };
            let random_psi = |rng: &mut ChaCha8Rng, zero_b: bool| {
                let b = if zero_b { vec![CdNumber::zero(level); 3] } else { disc.sample_ball(0.95, rng) };
                let one = CdNumber::one(level);
                let c = (0..3)
                    .map(|_| {
                        let (c3, c4) = if level == 2 { (one.clone(), one.clone()) } else { (random_unit(level, rng), random_unit(level, rng)) };
                        [random_unit(level, rng), random_unit(level, rng), c3, c4]
                    })
                    .collect();
                let mut sigma = vec![0, 1, 2];
                sigma.rotate_left(rng.random_range(0..3));
                PolydiscAutomorphism::new(b, c, sigma).unwrap()
            };
            for _ in 0..200 {
                let psi = random_psi(&mut rng, false);
                let z = disc.sample_ball(0.999, &mut rng);
                assert!(max_norm(&psi.apply(&z).unwrap()) < 1.0);
                let (f, g) = (random_psi(&mut rng, true), random_psi(&mut rng, true));
                let fz = g.apply(&f.apply(&z).unwrap()).unwrap();
                assert!((max_norm(&fz) - max_norm(&z)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn composition_normal_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for level in [2, 3] {
            let norm = HomogeneousNorm { kind: NormKind::Euclidean, level, arity: 1 };
            for _ in 0..10 {
                let frame = |rng: &mut ChaCha8Rng| vec![vec![FrameOp::Left { u: random_unit(level, rng) }, FrameOp::Right { u: random_unit(level, rng) }]];
                let f = BallAutomorphism::new(norm.sample_ball(0.8, &mut rng), frame(&mut rng)).unwrap();
                let g = BallAutomorphism::new(norm.sample_ball(0.8, &mut rng), frame(&mut rng)).unwrap();
                let h = f.then(&g).unwrap();
                for _ in 0..10 {
                    let z = norm.sample_ball(0.95, &mut rng);
                    let direct = g.apply(&f.apply(&z).unwrap()).unwrap();
                    let dev = euclidean(&diff(&direct, &h.apply(&z).unwrap()));
                    assert!(dev < 1e-7, "level {level}: {dev:e}");
                }
            }
        }
    }
}
