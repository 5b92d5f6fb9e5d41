//! Small dense helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::algebra::CdNumber;

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.transpose() * m;
    let eig = g.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max).max(0.0).sqrt()
}

/// Gram matrix JᵀJ, the scale λ² = tr/n and the relative deviation
/// max |JᵀJ − λ²I| / λ².
pub fn similarity_parts(m: &DMatrix<f64>) -> (f64, f64) {
    let n = m.ncols() as f64;
    let g = m.transpose() * m;
    let lam2 = g.trace() / n;
    if lam2 == 0.0 {
        return (0.0, f64::INFINITY);
    }
    let mut dev = 0.0_f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { lam2 } else { 0.0 };
            dev = dev.max((g[(i, j)] - target).abs());
        }
    }
    (lam2.sqrt(), dev / lam2)
}

pub fn column(m: &DMatrix<f64>, k: usize) -> Vec<f64> {
    m.column(k).iter().cloned().collect()
}

/// Real matrix of the linear map h ↦ f(h) on A_r, column k = f(i_k).
pub fn matrix_of(level: u32, f: impl Fn(&CdNumber) -> CdNumber) -> DMatrix<f64> {
    let n = 1usize << level;
    let mut m = DMatrix::zeros(n, n);
    for k in 0..n {
        let col = f(&CdNumber::basis(level, k));
        for (i, c) in col.coeffs().iter().enumerate() {
            m[(i, k)] = *c;
        }
    }
    m
}

pub fn apply(m: &DMatrix<f64>, h: &CdNumber) -> CdNumber {
    let v = nalgebra::DVector::from_column_slice(h.coeffs());
    let out = m * v;
    CdNumber::new(out.iter().cloned().collect()).expect("square matrix of algebra dimension")
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, b| a.max(b.abs()))
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let n = rows.len();
    let c = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != c) {
        return None;
    }
    Some(DMatrix::from_fn(n, c, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -3.0, 2.0]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_of_scaled_rotation() {
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let m = DMatrix::from_row_slice(2, 2, &[2.0 * c, -2.0 * s, 2.0 * s, 2.0 * c]);
        let (lam, dev) = similarity_parts(&m);
        assert!((lam - 2.0).abs() < 1e-14);
        assert!(dev < 1e-14);
    }
}
