//! Numerical super-differentiation, the pseudoconformality verdict and
//! derivative factorization (h ↦ λ a h b over H, Givens words over O).

use nalgebra::DMatrix;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::CdNumber;
use crate::linalg::{self, similarity_parts, spectral_norm};

pub const DEFAULT_STEP: f64 = 1e-5;
pub const DEFAULT_PC_TOL: f64 = 1e-6;
/// Relative similarity defect accepted by the factorizations.
pub const FACTOR_TOL: f64 = 1e-6;
/// Givens angles below this are dropped.
pub const ANGLE_DROP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("non-finite sample at {point}")]
    NonFinite { point: CdNumber },
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("expected level {expected}, found {found}")]
    WrongLevel { expected: u32, found: u32 },
    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    BadShape { rows: usize, cols: usize, expected: usize },
    #[error("Jacobian is not a similarity (relative defect {residual:e})")]
    NotSimilarity { residual: f64 },
    #[error("similarity has non-positive determinant {det:e}")]
    NonproperRotation { det: f64 },
}

/// Real 2^r × 2^r matrix; column k is the derivative along i_k.
#[derive(Debug, Clone, PartialEq)]
pub struct RealJacobian {
    pub level: u32,
    pub matrix: DMatrix<f64>,
    /// Finite-difference step, 0 for matrices built exactly.
    pub step: f64,
}

impl RealJacobian {
    pub fn new(level: u32, matrix: DMatrix<f64>) -> Result<Self, CalculusError> {
        let n = 1usize << level;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(CalculusError::BadShape { rows: matrix.nrows(), cols: matrix.ncols(), expected: n });
        }
        Ok(RealJacobian { level, matrix, step: 0.0 })
    }

    /// Exact matrix of a real-linear map.
    pub fn from_linear(level: u32, f: impl Fn(&CdNumber) -> CdNumber) -> Self {
        RealJacobian { level, matrix: linalg::matrix_of(level, f), step: 0.0 }
    }

    pub fn identity(level: u32) -> Self {
        let n = 1usize << level;
        RealJacobian { level, matrix: DMatrix::identity(n, n), step: 0.0 }
    }

    /// diag(1, −1, …, −1).
    pub fn conjugation(level: u32) -> Self {
        Self::from_linear(level, |h| h.conj())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, h: &CdNumber) -> CdNumber {
        linalg::apply(&self.matrix, h)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        linalg::to_rows(&self.matrix)
    }

    pub fn spectral_norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }
}

fn check_step(step: f64) -> Result<(), CalculusError> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(CalculusError::BadStep(step))
    }
}

fn finite(point: &CdNumber, v: CdNumber) -> Result<CdNumber, CalculusError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CalculusError::NonFinite { point: point.clone() })
    }
}

/// Second-order central differences along every generator.
pub fn jacobian<F>(f: F, z: &CdNumber, step: f64) -> Result<RealJacobian, CalculusError>
where
    F: Fn(&CdNumber) -> CdNumber,
{
    check_step(step)?;
    let level = z.level();
    let n = z.dim();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let e = CdNumber::basis(level, k).scale(step);
        let zp = z + &e;
        let zm = z - &e;
        let fp = finite(&zp, f(&zp))?;
        let fm = finite(&zm, f(&zm))?;
        if fp.dim() != n {
            return Err(CalculusError::WrongLevel { expected: level, found: fp.level() });
        }
        let col = (&fp - &fm).scale(0.5 / step);
        for (i, c) in col.coeffs().iter().enumerate() {
            m[(i, k)] = *c;
        }
    }
    Ok(RealJacobian { level, matrix: m, step })
}

/// Central-difference Jacobian of a map K^n → K^m, flattened coordinate-major.
pub fn jacobian_n<F>(f: F, z: &[CdNumber], step: f64) -> Result<DMatrix<f64>, CalculusError>
where
    F: Fn(&[CdNumber]) -> Vec<CdNumber>,
{
    check_step(step)?;
    let d = z.first().map_or(0, |c| c.dim());
    let level = z.first().map_or(2, |c| c.level());
    let cols = z.len() * d;
    let mut columns = Vec::with_capacity(cols);
    for j in 0..z.len() {
        for k in 0..d {
            let e = CdNumber::basis(level, k).scale(step);
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            zp[j] = &zp[j] + &e;
            zm[j] = &zm[j] - &e;
            let fp = f(&zp);
            let fm = f(&zm);
            let mut col = Vec::new();
            for (a, b) in fp.iter().zip(&fm) {
                if !a.is_finite() {
                    return Err(CalculusError::NonFinite { point: zp[j].clone() });
                }
                if !b.is_finite() {
                    return Err(CalculusError::NonFinite { point: zm[j].clone() });
                }
                col.extend((a - b).scale(0.5 / step).coeffs().iter().cloned());
            }
            columns.push(col);
        }
    }
    let rows = columns.first().map_or(0, |c| c.len());
    Ok(DMatrix::from_fn(rows, cols, |i, j| columns[j][i]))
}

/// Holomorphic and antiholomorphic parts of a real Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct DzDecomposition {
    pub dz_part: RealJacobian,
    pub dzbar_part: RealJacobian,
}

/// Orientation split: an orientation-preserving Jacobian is all `dz`;
/// an orientation-reversing one is all `dz̃`, stored as `J∘C` so that
/// `dz_part + dzbar_part∘C = J`.
///
/// The commutator split `(J ∓ CJC)/2` is not used: for `h ↦ a h b` it yields
/// a nonzero anticommuting part, and for `J = I` it puts everything in `dz̃`.
pub fn split_dz(j: &RealJacobian) -> DzDecomposition {
    let n = j.dim();
    let zero = RealJacobian { level: j.level, matrix: DMatrix::zeros(n, n), step: j.step };
    if j.matrix.determinant() >= 0.0 {
        DzDecomposition { dz_part: j.clone(), dzbar_part: zero }
    } else {
        let c = RealJacobian::conjugation(j.level).matrix;
        DzDecomposition { dz_part: zero, dzbar_part: RealJacobian { level: j.level, matrix: &j.matrix * c, step: j.step } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Pseudoconformal { lambda: f64, residual: f64 },
    ZeroDerivative { residual: f64 },
    AntiholomorphicPart { residual: f64 },
    NotSimilarity { residual: f64 },
}

impl Verdict {
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Pseudoconformal { .. } => "Pseudoconformal",
            Verdict::ZeroDerivative { .. } => "ZeroDerivative",
            Verdict::AntiholomorphicPart { .. } => "AntiholomorphicPart",
            Verdict::NotSimilarity { .. } => "NotSimilarity",
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            Verdict::Pseudoconformal { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }

    pub fn residual(&self) -> f64 {
        match *self {
            Verdict::Pseudoconformal { residual, .. }
            | Verdict::ZeroDerivative { residual }
            | Verdict::AntiholomorphicPart { residual }
            | Verdict::NotSimilarity { residual } => residual,
        }
    }

    pub fn is_pseudoconformal(&self) -> bool {
        matches!(self, Verdict::Pseudoconformal { .. })
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Verdict", 3)?;
        st.serialize_field("status", self.status())?;
        st.serialize_field("lambda", &self.lambda())?;
        st.serialize_field("residual", &self.residual())?;
        st.end()
    }
}

/// Checks ∂f/∂z̃ = 0, then f′ ≠ 0, then JᵀJ = λ²I with det J > 0.
pub fn classify_jacobian(j: &RealJacobian, tol: f64) -> Verdict {
    let parts = split_dz(j);
    let anti = parts.dzbar_part.spectral_norm();
    if anti >= tol {
        return Verdict::AntiholomorphicPart { residual: anti };
    }
    let size = j.spectral_norm();
    if size <= tol {
        return Verdict::ZeroDerivative { residual: size };
    }
    let (lambda, dev) = similarity_parts(&j.matrix);
    if dev < tol && j.matrix.determinant() > 0.0 {
        Verdict::Pseudoconformal { lambda, residual: dev }
    } else {
        Verdict::NotSimilarity { residual: dev }
    }
}

pub fn is_pseudoconformal_at<F>(f: F, z: &CdNumber, tol: f64) -> Result<Verdict, CalculusError>
where
    F: Fn(&CdNumber) -> CdNumber,
{
    let j = jacobian(f, z, DEFAULT_STEP)?;
    Ok(classify_jacobian(&j, tol))
}

/// `J h = λ a h b` with unit quaternions a, b.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuatFactorization {
    pub a: CdNumber,
    pub b: CdNumber,
    pub lambda: f64,
}

impl QuatFactorization {
    pub fn apply(&self, h: &CdNumber) -> CdNumber {
        (&(&self.a * h) * &self.b).scale(self.lambda)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        linalg::matrix_of(2, |h| self.apply(h))
    }
}

fn scaled_rotation(j: &RealJacobian, level: u32) -> Result<(f64, DMatrix<f64>), CalculusError> {
    if j.level != level {
        return Err(CalculusError::WrongLevel { expected: level, found: j.level });
    }
    let (lambda, dev) = similarity_parts(&j.matrix);
    if !(dev < FACTOR_TOL) || lambda == 0.0 {
        return Err(CalculusError::NotSimilarity { residual: dev });
    }
    let det = j.matrix.determinant();
    if det <= 0.0 {
        return Err(CalculusError::NonproperRotation { det });
    }
    Ok((lambda, &j.matrix / lambda))
}

/// Unit quaternion a with h ↦ a h ā equal to the given 3×3 rotation
/// (acting on the imaginary coordinates), largest-pivot extraction.
fn quaternion_from_rotation(r: &[[f64; 3]; 3]) -> [f64; 4] {
    let t = r[0][0] + r[1][1] + r[2][2];
    let cands = [1.0 + t, 1.0 + r[0][0] - r[1][1] - r[2][2], 1.0 - r[0][0] + r[1][1] - r[2][2], 1.0 - r[0][0] - r[1][1] + r[2][2]];
    let (k, &big) = cands.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("four candidates");
    let s = big.max(0.0).sqrt() * 2.0;
    let q = match k {
        0 => [s / 4.0, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s],
        1 => [(r[2][1] - r[1][2]) / s, s / 4.0, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s],
        2 => [(r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, s / 4.0, (r[1][2] + r[2][1]) / s],
        _ => [(r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, s / 4.0],
    };
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}

/// Sign choice making the pair (a, b) unique: Re(a) > 0, or the first
/// clearly nonzero coefficient of a positive when Re(a) vanishes.
fn canonical_sign(a: &CdNumber) -> f64 {
    let lead = a.coeffs().iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(1.0);
    if lead < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Isoclinic factorization of a quaternion Jacobian.
///
/// With c = J(1)/λ = ab, the map h ↦ (J h / λ) c̃ is h ↦ a h ā, whose
/// rotation of the imaginary 3-space determines a up to sign; then b = ā c.
pub fn factor_quaternion(j: &RealJacobian) -> Result<QuatFactorization, CalculusError> {
    let (lambda, r) = scaled_rotation(j, 2)?;
    let c = CdNumber::new(linalg::column(&r, 0)).expect("4 coefficients");
    let c = c.scale(1.0 / c.norm());
    let cc = c.conj();
    let conj_rot = linalg::matrix_of(2, |h| &linalg::apply(&r, h) * &cc);
    let mut rot = [[0.0; 3]; 3];
    for (i, row) in rot.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = conj_rot[(i + 1, k + 1)];
        }
    }
    let a = CdNumber::new(quaternion_from_rotation(&rot).to_vec()).expect("4 coefficients");
    let b = &a.conj() * &c;
    let s = canonical_sign(&a);
    Ok(QuatFactorization { a: a.scale(s), b: b.scale(s), lambda })
}

/// `exp(t X_{k,m}) h = h + (cos t − 1)(h_k i_k + h_m i_m) + sin t (h_m i_k − h_k i_m)`.
pub fn givens_generator(k: usize, m: usize, t: f64, h: &CdNumber) -> CdNumber {
    let level = h.level();
    let (hk, hm) = (h.coeffs()[k], h.coeffs()[m]);
    let ik = CdNumber::basis(level, k);
    let im = CdNumber::basis(level, m);
    let plane = &ik.scale(hk) + &im.scale(hm);
    let turn = &ik.scale(hm) - &im.scale(hk);
    &(h + &plane.scale(t.cos() - 1.0)) + &turn.scale(t.sin())
}

/// Ordered product of generators, the last angle acting first.
pub fn apply_givens(angles: &[(usize, usize, f64)], h: &CdNumber) -> CdNumber {
    angles.iter().rev().fold(h.clone(), |acc, &(k, m, t)| givens_generator(k, m, t, &acc))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OctGivensFactorization {
    pub lambda: f64,
    pub angles: Vec<(usize, usize, f64)>,
}

impl OctGivensFactorization {
    pub fn apply(&self, h: &CdNumber) -> CdNumber {
        apply_givens(&self.angles, h).scale(self.lambda)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        linalg::matrix_of(3, |h| self.apply(h))
    }
}

/// Givens sweep of a rotation matrix: angles in lexicographic (k, m) order
/// whose product, applied right to left, is the rotation.
pub fn givens_angles(r: &DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let n = r.nrows();
    let mut a = r.clone();
    let mut angles = Vec::new();
    for k in 0..n {
        for m in (k + 1)..n {
            let (x, y) = (a[(k, k)], a[(m, k)]);
            let t = -y.atan2(x);
            if t.abs() < ANGLE_DROP {
                continue;
            }
            let (c, s) = (t.cos(), t.sin());
            for col in 0..n {
                let (rk, rm) = (a[(k, col)], a[(m, col)]);
                a[(k, col)] = c * rk - s * rm;
                a[(m, col)] = s * rk + c * rm;
            }
            angles.push((k, m, t));
        }
    }
    angles
}

pub fn factor_octonion_givens(j: &RealJacobian) -> Result<OctGivensFactorization, CalculusError> {
    let (lambda, r) = scaled_rotation(j, 3)?;
    Ok(OctGivensFactorization { lambda, angles: givens_angles(&r) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(c: [f64; 4]) -> CdNumber {
        CdNumber::new(c.to_vec()).unwrap()
    }

    #[test]
    fn identity_and_conjugation_jacobians() {
        let z = q([0.3, -1.0, 0.2, 0.5]);
        let j = jacobian(|x| x.clone(), &z, 1e-5).unwrap();
        assert!(linalg::max_abs(&(&j.matrix - DMatrix::<f64>::identity(4, 4))) < 1e-10);
        let c = jacobian(|x| x.conj(), &z, 1e-5).unwrap();
        assert!(linalg::max_abs(&(&c.matrix - RealJacobian::conjugation(2).matrix)) < 1e-10);
    }

    #[test]
    fn left_multiplication_jacobian() {
        let i1 = CdNumber::basis(2, 1);
        let j = jacobian(|x| &i1 * x, &CdNumber::zero(2), 1e-5).unwrap();
        let exact = RealJacobian::from_linear(2, |h| &i1 * h);
        assert!(linalg::max_abs(&(&j.matrix - &exact.matrix)) < 1e-10);
    }

    #[test]
    fn non_finite_sample_reports_point() {
        let r = jacobian(|x| if x.re() > 0.0 { CdNumber::real(2, f64::INFINITY) } else { x.clone() }, &CdNumber::zero(2), 1e-5);
        assert!(matches!(r, Err(CalculusError::NonFinite { .. })));
        assert_eq!(jacobian(|x| x.clone(), &CdNumber::zero(2), 0.0), Err(CalculusError::BadStep(0.0)));
    }

    #[test]
    fn split_examples() {
        let id = split_dz(&RealJacobian::identity(2));
        assert_eq!(id.dzbar_part.spectral_norm(), 0.0);
        let c = split_dz(&RealJacobian::conjugation(3));
        assert_eq!(c.dz_part.spectral_norm(), 0.0);
        assert!(linalg::max_abs(&(&c.dzbar_part.matrix - DMatrix::<f64>::identity(8, 8))) < 1e-15);
    }

    #[test]
    fn verdict_examples() {
        let c = q([0.1, 2.0, -1.0, 0.0]);
        let z = q([0.7, 0.1, 0.2, -0.3]);
        let v = is_pseudoconformal_at(|x| x + &c, &z, 1e-6).unwrap();
        assert!((v.lambda().unwrap() - 1.0).abs() < 1e-9);
        let v = is_pseudoconformal_at(|x| x.conj(), &z, 1e-6).unwrap();
        assert_eq!(v.status(), "AntiholomorphicPart");
        let v = is_pseudoconformal_at(|_| c.clone(), &z, 1e-6).unwrap();
        assert_eq!(v.status(), "ZeroDerivative");
        let w = q([1.0, 1.0, 0.0, 0.0]);
        let v = is_pseudoconformal_at(|x| x.inv().unwrap(), &w, 1e-6).unwrap();
        assert!((v.lambda().unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn factor_identity_and_generators() {
        let f = factor_quaternion(&RealJacobian::identity(2)).unwrap();
        assert!(f.a.dist(&CdNumber::one(2)) < 1e-12 && f.b.dist(&CdNumber::one(2)) < 1e-12);
        assert!((f.lambda - 1.0).abs() < 1e-12);
        let (i1, i2) = (CdNumber::basis(2, 1), CdNumber::basis(2, 2));
        let j = RealJacobian::from_linear(2, |h| &(&i1 * h) * &i2);
        let f = factor_quaternion(&j).unwrap();
        let same = f.a.dist(&i1) < 1e-12 && f.b.dist(&i2) < 1e-12;
        let flipped = f.a.dist(&-&i1) < 1e-12 && f.b.dist(&-&i2) < 1e-12;
        assert!(same || flipped);
        assert!(linalg::max_abs(&(&f.matrix() - &j.matrix)) < 1e-12);
    }

    #[test]
    fn factor_rejects_reflections_and_shears() {
        let e = factor_quaternion(&RealJacobian::conjugation(2)).unwrap_err();
        assert!(matches!(e, CalculusError::NonproperRotation { .. }));
        let mut m = DMatrix::<f64>::identity(4, 4);
        m[(0, 1)] = 0.5;
        let e = factor_quaternion(&RealJacobian::new(2, m).unwrap()).unwrap_err();
        assert!(matches!(e, CalculusError::NotSimilarity { .. }));
    }

    #[test]
    fn givens_identity_and_single_plane() {
        let f = factor_octonion_givens(&RealJacobian::identity(3)).unwrap();
        assert!(f.angles.is_empty());
        assert!((f.lambda - 1.0).abs() < 1e-15);
        let j = RealJacobian::from_linear(3, |h| givens_generator(2, 5, 0.7, h));
        let f = factor_octonion_givens(&j).unwrap();
        assert_eq!(f.angles.len(), 1);
        let (k, m, t) = f.angles[0];
        assert_eq!((k, m), (2, 5));
        assert!((t - 0.7).abs() < 1e-10);
    }
}
