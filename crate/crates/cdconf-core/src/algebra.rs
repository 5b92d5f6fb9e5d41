//! Cayley–Dickson arithmetic for A_r, 2 ≤ r ≤ 6.
//!
//! Products come from a generator table built once per level by the
//! recursive doubling rule `(a,b)(c,d) = (ac − d̃b, da + bc̃)`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Absolute tolerance for algebraic identities on unit-scale inputs.
pub const ALGEBRA_TOL: f64 = 1e-11;

pub const MIN_LEVEL: u32 = 2;
pub const MAX_LEVEL: u32 = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("level mismatch: {left} vs {right}")]
    LevelMismatch { left: u32, right: u32 },
    #[error("coefficient count {0} is not a power of two between 4 and 64")]
    BadLength(usize),
    #[error("level {0} outside 2..=6")]
    BadLevel(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("domain error: {0}")]
    Domain(String),
}

/// An element of A_r stored as its 2^r real coefficients.
#[derive(Clone, PartialEq)]
pub struct CdNumber {
    coeffs: Vec<f64>,
}

fn check_level(level: u32) -> Result<(), AlgebraError> {
    if (MIN_LEVEL..=MAX_LEVEL).contains(&level) {
        Ok(())
    } else {
        Err(AlgebraError::BadLevel(level))
    }
}

impl CdNumber {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, AlgebraError> {
        let n = coeffs.len();
        if !n.is_power_of_two() || !(4..=64).contains(&n) {
            return Err(AlgebraError::BadLength(n));
        }
        Ok(CdNumber { coeffs })
    }

    pub fn zero(level: u32) -> Self {
        check_level(level).expect("level");
        CdNumber { coeffs: vec![0.0; 1 << level] }
    }

    pub fn real(level: u32, x: f64) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[0] = x;
        z
    }

    pub fn one(level: u32) -> Self {
        Self::real(level, 1.0)
    }

    /// The generator i_k.
    pub fn basis(level: u32, k: usize) -> Self {
        let mut z = Self::zero(level);
        z.coeffs[k] = 1.0;
        z
    }

    pub fn level(&self) -> u32 {
        self.coeffs.len().trailing_zeros()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn re(&self) -> f64 {
        self.coeffs[0]
    }

    /// Imaginary part x − Re(x).
    pub fn im(&self) -> Self {
        let mut v = self.clone();
        v.coeffs[0] = 0.0;
        v
    }

    pub fn conj(&self) -> Self {
        let mut v = self.clone();
        for c in &mut v.coeffs[1..] {
            *c = -*c;
        }
        v
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product of coefficient vectors, Re(x ỹ).
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn is_real(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        CdNumber { coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.dim() != other.dim() {
            return Err(AlgebraError::LevelMismatch { left: self.level(), right: other.level() });
        }
        let table = table(self.level());
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            let row = &table[i * n..(i + 1) * n];
            for (j, &y) in other.coeffs.iter().enumerate() {
                let (sign, k) = row[j];
                out[k] += f64::from(sign) * x * y;
            }
        }
        Ok(CdNumber { coeffs: out })
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// z^p by repeated left multiplication; A_r is power-associative.
    pub fn powi(&self, p: u32) -> Self {
        let mut acc = Self::one(self.level());
        for _ in 0..p {
            acc = self * &acc;
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let a = self.re();
        let v = self.im();
        let t = v.norm();
        let ea = a.exp();
        let sinc = if t < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
        let mut out = v.scale(ea * sinc);
        out.coeffs[0] = ea * t.cos();
        out
    }

    /// Unit imaginary direction of Arg; i_1 when the imaginary part vanishes.
    fn arg_direction(&self) -> Self {
        let v = self.im();
        let t = v.norm();
        if t > 0.0 {
            v.scale(1.0 / t)
        } else {
            Self::basis(self.level(), 1)
        }
    }

    /// Principal Arg: a purely imaginary element of modulus in [0, π].
    pub fn arg(&self) -> Result<Self, AlgebraError> {
        if self.norm_sqr() == 0.0 {
            return Err(AlgebraError::Domain("Arg of zero".into()));
        }
        let phi = self.im().norm().atan2(self.re());
        if phi == 0.0 {
            return Ok(Self::zero(self.level()));
        }
        Ok(self.arg_direction().scale(phi))
    }

    pub fn ln_principal(&self) -> Result<Self, AlgebraError> {
        self.ln_branch(0)
    }

    /// Branch k of Ln: the principal value shifted by 2πk along Arg's direction.
    pub fn ln_branch(&self, k: i64) -> Result<Self, AlgebraError> {
        let r = self.norm();
        if r == 0.0 {
            return Err(AlgebraError::Domain("logarithm of zero".into()));
        }
        let phi = self.im().norm().atan2(self.re()) + 2.0 * PI * k as f64;
        let mut out = if phi == 0.0 { Self::zero(self.level()) } else { self.arg_direction().scale(phi) };
        out.coeffs[0] = r.ln();
        Ok(out)
    }

    pub fn pow_real(&self, alpha: f64) -> Result<Self, AlgebraError> {
        self.pow_real_branch(alpha, 0)
    }

    pub fn pow_real_branch(&self, alpha: f64, k: i64) -> Result<Self, AlgebraError> {
        Ok(self.ln_branch(k)?.scale(alpha).exp())
    }

    pub fn polar(&self) -> Result<PolarForm, AlgebraError> {
        if self.norm_sqr() == 0.0 {
            return Err(AlgebraError::Domain("polar form of zero".into()));
        }
        Ok(PolarForm { modulus: self.norm(), arg: self.arg()? })
    }
}

/// `z = |z| exp(Arg z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarForm {
    pub modulus: f64,
    pub arg: CdNumber,
}

impl PolarForm {
    pub fn reconstruct(&self) -> CdNumber {
        self.arg.exp().scale(self.modulus)
    }
}

pub fn mul(x: &CdNumber, y: &CdNumber) -> Result<CdNumber, AlgebraError> {
    x.try_mul(y)
}

/// The j-th real coefficient computed from products with generators:
/// `h_j = (−h i_j + i_j K)/2`, `h_0 = (h + K)/2`, where
/// `K = (2^r − 2)^{-1}(−h + Σ_{k≥1} i_k (h i_k^*))`.
pub fn proj(j: usize, h: &CdNumber) -> Result<f64, AlgebraError> {
    let n = h.dim();
    if j >= n {
        return Err(AlgebraError::IndexOutOfRange { index: j, dim: n });
    }
    let level = h.level();
    let mut sum = -h;
    for k in 1..n {
        let ik = CdNumber::basis(level, k);
        sum += &(&ik * &(h * &ik.conj()));
    }
    let braced = sum.scale(1.0 / (n as f64 - 2.0));
    let val = if j == 0 {
        (h + &braced).scale(0.5)
    } else {
        let ij = CdNumber::basis(level, j);
        (&(&ij * &braced) - &(h * &ij)).scale(0.5)
    };
    Ok(val.re())
}

/// Reference product by the recursive doubling rule on raw coefficient slices.
pub fn doubling_product(x: &CdNumber, y: &CdNumber) -> Result<CdNumber, AlgebraError> {
    if x.dim() != y.dim() {
        return Err(AlgebraError::LevelMismatch { left: x.level(), right: y.level() });
    }
    Ok(CdNumber { coeffs: doubling(&x.coeffs, &y.coeffs) })
}

fn conj_slice(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    for c in v.iter_mut().skip(1) {
        *c = -*c;
    }
    v
}

fn doubling(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n == 1 {
        return vec![x[0] * y[0]];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = doubling(a, c);
    let db = doubling(&conj_slice(d), b);
    let da = doubling(d, a);
    let bc = doubling(b, &conj_slice(c));
    let mut out = Vec::with_capacity(n);
    out.extend(ac.iter().zip(&db).map(|(p, q)| p - q));
    out.extend(da.iter().zip(&bc).map(|(p, q)| p + q));
    out
}

type Table = Vec<(i8, usize)>;

fn build_table(level: u32) -> Table {
    let n = 1usize << level;
    let mut t = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut ei = vec![0.0; n];
            let mut ej = vec![0.0; n];
            ei[i] = 1.0;
            ej[j] = 1.0;
            let p = doubling(&ei, &ej);
            let k = p.iter().position(|&c| c != 0.0).expect("generator product is nonzero");
            t.push((p[k] as i8, k));
        }
    }
    t
}

fn table(level: u32) -> &'static Table {
    static TABLES: [OnceLock<Table>; 7] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    TABLES[level as usize].get_or_init(|| build_table(level))
}

/// Generator product `i_i i_j = sign · i_k`.
pub fn generator_product(level: u32, i: usize, j: usize) -> (i8, usize) {
    let n = 1usize << level;
    table(level)[i * n + j]
}

/// Octonion split `x = z0 + z_l l` with `l = i_4` and quaternion halves.
pub mod oct_split {
    use super::CdNumber;

    pub fn split(x: &CdNumber) -> (CdNumber, CdNumber) {
        assert_eq!(x.level(), 3, "octonion expected");
        let c = x.coeffs();
        (CdNumber::new(c[..4].to_vec()).expect("len 4"), CdNumber::new(c[4..].to_vec()).expect("len 4"))
    }

    pub fn join(z0: &CdNumber, zl: &CdNumber) -> CdNumber {
        let mut c = z0.coeffs().to_vec();
        c.extend_from_slice(zl.coeffs());
        CdNumber::new(c).expect("len 8")
    }

    /// `(a(z0 + z_l l))b = a z0 b + (z_l a b̃) l`.
    pub fn product_i(a: &CdNumber, z0: &CdNumber, zl: &CdNumber, b: &CdNumber) -> CdNumber {
        join(&(&(a * z0) * b), &(&(zl * a) * &b.conj()))
    }

    /// `((al)(z0 + z_l l))(bl) = −(b̃ a z̃0) − (b z̃_l a) l`.
    pub fn product_ii(a: &CdNumber, z0: &CdNumber, zl: &CdNumber, b: &CdNumber) -> CdNumber {
        join(&-&(&(&b.conj() * a) * &z0.conj()), &-&(&(b * &zl.conj()) * a))
    }

    /// `(a(z0 + z_l l))(bl) = −(b̃ z_l a) + (b a z0) l`.
    pub fn product_iii(a: &CdNumber, z0: &CdNumber, zl: &CdNumber, b: &CdNumber) -> CdNumber {
        join(&-&(&(&b.conj() * zl) * a), &(&(b * a) * z0))
    }

    /// `((al)(z0 + z_l l))b = −(z̃_l a b) + (a z̃0 b̃) l`.
    pub fn product_iv(a: &CdNumber, z0: &CdNumber, zl: &CdNumber, b: &CdNumber) -> CdNumber {
        join(&-&(&(&zl.conj() * a) * b), &(&(a * &z0.conj()) * &b.conj()))
    }

    /// Full octonion product assembled from the split formulas with b = 1:
    /// `(p + q l)(s + t l) = (ps − t̃q) + (tp + qs̃) l`.
    pub fn product(x: &CdNumber, y: &CdNumber) -> CdNumber {
        let (p, q) = split(x);
        let (s, t) = split(y);
        let one = CdNumber::one(2);
        &product_i(&p, &s, &t, &one) + &product_iv(&q, &s, &t, &one)
    }
}

impl fmt::Debug for CdNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl fmt::Display for CdNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for CdNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CdNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        CdNumber::new(v).map_err(serde::de::Error::custom)
    }
}

fn same_dim(x: &CdNumber, y: &CdNumber) {
    assert_eq!(x.dim(), y.dim(), "Cayley–Dickson level mismatch");
}

impl Add for &CdNumber {
    type Output = CdNumber;
    fn add(self, rhs: &CdNumber) -> CdNumber {
        same_dim(self, rhs);
        CdNumber { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CdNumber {
    type Output = CdNumber;
    fn sub(self, rhs: &CdNumber) -> CdNumber {
        same_dim(self, rhs);
        CdNumber { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

/// Panics on level mismatch; use [`CdNumber::try_mul`] for a checked product.
impl Mul for &CdNumber {
    type Output = CdNumber;
    fn mul(self, rhs: &CdNumber) -> CdNumber {
        self.try_mul(rhs).expect("Cayley–Dickson level mismatch")
    }
}

impl Neg for &CdNumber {
    type Output = CdNumber;
    fn neg(self) -> CdNumber {
        self.scale(-1.0)
    }
}

impl Add for CdNumber {
    type Output = CdNumber;
    fn add(self, rhs: CdNumber) -> CdNumber {
        &self + &rhs
    }
}

impl Sub for CdNumber {
    type Output = CdNumber;
    fn sub(self, rhs: CdNumber) -> CdNumber {
        &self - &rhs
    }
}

impl Mul for CdNumber {
    type Output = CdNumber;
    fn mul(self, rhs: CdNumber) -> CdNumber {
        &self * &rhs
    }
}

impl Neg for CdNumber {
    type Output = CdNumber;
    fn neg(self) -> CdNumber {
        self.scale(-1.0)
    }
}

impl AddAssign<&CdNumber> for CdNumber {
    fn add_assign(&mut self, rhs: &CdNumber) {
        same_dim(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&CdNumber> for CdNumber {
    fn sub_assign(&mut self, rhs: &CdNumber) {
        same_dim(self, rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: [f64; 4]) -> CdNumber {
        CdNumber::new(c.to_vec()).unwrap()
    }

    #[test]
    fn quaternion_generators() {
        let i1 = CdNumber::basis(2, 1);
        let i2 = CdNumber::basis(2, 2);
        assert_eq!(&i1 * &i2, CdNumber::basis(2, 3));
        assert_eq!(&i2 * &i1, -CdNumber::basis(2, 3));
        assert_eq!(&i1 * &i1, CdNumber::real(2, -1.0));
    }

    #[test]
    fn conj_and_inverse() {
        assert_eq!(q([1.0, 2.0, 0.0, 0.0]).conj(), q([1.0, -2.0, 0.0, 0.0]));
        assert_eq!(CdNumber::basis(2, 1).inv().unwrap(), -CdNumber::basis(2, 1));
        assert_eq!(CdNumber::zero(3).inv(), Err(AlgebraError::DivisionByZero));
    }

    #[test]
    fn level_mismatch_is_an_error() {
        let e = mul(&CdNumber::one(2), &CdNumber::one(3)).unwrap_err();
        assert_eq!(e, AlgebraError::LevelMismatch { left: 2, right: 3 });
    }

    #[test]
    fn bad_lengths_rejected() {
        assert!(CdNumber::new(vec![0.0; 3]).is_err());
        assert!(CdNumber::new(vec![0.0; 2]).is_err());
        assert!(CdNumber::new(vec![0.0; 128]).is_err());
        assert!(CdNumber::new(vec![0.0; 64]).is_ok());
    }

    #[test]
    fn proj_small_examples() {
        let h = q([3.0, 2.0, 0.0, 0.0]);
        assert!((proj(0, &h).unwrap() - 3.0).abs() < 1e-15);
        assert!((proj(1, &h).unwrap() - 2.0).abs() < 1e-15);
        assert!(proj(4, &h).is_err());
    }

    #[test]
    fn exp_and_log_examples() {
        assert_eq!(CdNumber::zero(2).exp(), CdNumber::one(2));
        let m1 = CdNumber::real(2, -1.0);
        let l = m1.ln_principal().unwrap();
        assert!(l.dist(&CdNumber::basis(2, 1).scale(PI)) < 1e-15);
        assert!(l.exp().dist(&m1) < 1e-12);
        assert!(CdNumber::zero(2).ln_principal().is_err());
    }

    #[test]
    fn polar_of_generator() {
        let p = CdNumber::basis(2, 2).polar().unwrap();
        assert!((p.modulus - 1.0).abs() < 1e-15);
        assert!(p.arg.dist(&CdNumber::basis(2, 2).scale(PI / 2.0)) < 1e-15);
        let p2 = CdNumber::real(3, 2.0).polar().unwrap();
        assert_eq!(p2.modulus, 2.0);
        assert_eq!(p2.arg, CdNumber::zero(3));
    }

    #[test]
    fn branches_differ_by_two_pi() {
        let x = q([0.3, -0.2, 0.5, 0.1]);
        let l0 = x.ln_principal().unwrap();
        let l1 = x.ln_branch(1).unwrap();
        assert!(((&l1 - &l0).norm() - 2.0 * PI).abs() < 1e-12);
        assert!(l1.exp().dist(&x) < 1e-12);
        let half = x.pow_real(0.5).unwrap();
        assert!((&half * &half).dist(&x) < 1e-12);
    }
}
