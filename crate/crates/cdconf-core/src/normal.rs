//! The ρ metric on a sampled compact set and a finite-resolution
//! normal-family classifier.
//!
//! Verdicts are evidence at the grid resolution, not proofs.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::CdNumber;
use crate::calculus::{self, CalculusError};
use crate::exec::Exec;
use crate::linalg;

pub const JACOBIAN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalError {
    #[error("evaluation failed at node {node}: {source}")]
    Evaluation { node: usize, source: CalculusError },
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("sequence too short: {0} maps, need at least 8")]
    TooShort(usize),
}

/// Product of closed balls `|z_j − center_j| ≤ radius_j`, sampled by the
/// first `resolution` points of a Halton sequence pushed radially from the
/// cube onto the ball. Raising the resolution only adds nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridJson")]
pub struct CompactGrid {
    pub center: Vec<CdNumber>,
    pub radii: Vec<f64>,
    pub resolution: usize,
    #[serde(skip)]
    nodes: Vec<Vec<CdNumber>>,
}

const PRIMES: [u64; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157,
    163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311,
];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

impl CompactGrid {
    pub fn new(center: Vec<CdNumber>, radii: Vec<f64>, resolution: usize) -> Result<Self, NormalError> {
        let mut g = CompactGrid { center, radii, resolution, nodes: Vec::new() };
        g.build()?;
        Ok(g)
    }

    /// Ball of the given radius around 0 in K^1.
    pub fn ball(level: u32, radius: f64, resolution: usize) -> Result<Self, NormalError> {
        Self::new(vec![CdNumber::zero(level)], vec![radius], resolution)
    }

    fn build(&mut self) -> Result<(), NormalError> {
        let Some(first) = self.center.first() else {
            return Err(NormalError::BadGrid("no coordinates".into()));
        };
        if self.radii.len() != self.center.len() || self.radii.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(NormalError::BadGrid("one finite nonnegative radius per coordinate".into()));
        }
        if self.resolution == 0 {
            return Err(NormalError::BadGrid("resolution must be positive".into()));
        }
        let d = first.dim();
        if self.center.len() * d > PRIMES.len() {
            return Err(NormalError::BadGrid("too many real dimensions".into()));
        }
        self.nodes = (1..=self.resolution as u64)
            .map(|i| {
                self.center
                    .iter()
                    .zip(&self.radii)
                    .enumerate()
                    .map(|(j, (c, r))| {
                        let x: Vec<f64> = (0..d).map(|k| 2.0 * radical_inverse(i, PRIMES[j * d + k]) - 1.0).collect();
                        let inf = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                        let two = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                        let s = if two > 0.0 { r * inf / two } else { 0.0 };
                        c + &CdNumber::new(x.iter().map(|v| v * s).collect()).expect("valid level")
                    })
                    .collect()
            })
            .collect();
        Ok(())
    }

    pub fn nodes(&self) -> &[Vec<CdNumber>] {
        &self.nodes
    }

    pub fn refine(&self, resolution: usize) -> Result<Self, NormalError> {
        Self::new(self.center.clone(), self.radii.clone(), resolution)
    }

    pub fn contains(&self, z: &[CdNumber]) -> bool {
        z.iter().zip(&self.center).zip(&self.radii).all(|((x, c), r)| x.dist(c) <= r * (1.0 + 1e-12))
    }
}

#[derive(Deserialize)]
struct GridJson {
    center: Vec<CdNumber>,
    radii: Vec<f64>,
    resolution: usize,
}

impl TryFrom<GridJson> for CompactGrid {
    type Error = NormalError;

    fn try_from(g: GridJson) -> Result<Self, NormalError> {
        CompactGrid::new(g.center, g.radii, g.resolution)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoValue {
    pub value: f64,
    pub nodes: usize,
}

/// Values and Jacobians of one map on every node.
pub struct Sampled {
    values: Vec<Vec<CdNumber>>,
    jacobians: Vec<DMatrix<f64>>,
}

impl Sampled {
    pub fn new<F>(f: &F, grid: &CompactGrid, exec: Exec) -> Result<Self, NormalError>
    where
        F: Fn(&[CdNumber]) -> Vec<CdNumber> + Sync,
    {
        let nodes = grid.nodes();
        let per_node = exec.try_map_range(nodes.len(), |i| {
            let v = f(&nodes[i]);
            if let Some(bad) = v.iter().find(|c| !c.is_finite()) {
                return Err(NormalError::Evaluation { node: i, source: CalculusError::NonFinite { point: bad.clone() } });
            }
            let j = calculus::jacobian_n(f, &nodes[i], JACOBIAN_STEP).map_err(|source| NormalError::Evaluation { node: i, source })?;
            Ok((v, j))
        })?;
        let (values, jacobians) = per_node.into_iter().unzip();
        Ok(Sampled { values, jacobians })
    }

    pub fn values(&self) -> &[Vec<CdNumber>] {
        &self.values
    }

    /// Smallest `|f(z)|` over the nodes.
    pub fn min_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()).fold(f64::INFINITY, f64::min)
    }
}

fn value_dist(a: &[CdNumber], b: &[CdNumber]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dist(y).powi(2)).sum::<f64>().sqrt()
}

/// `max_node |f − g| + ‖f′ − g′‖₂`.
pub fn rho_sampled(f: &Sampled, g: &Sampled) -> f64 {
    f.values
        .iter()
        .zip(&g.values)
        .zip(f.jacobians.iter().zip(&g.jacobians))
        .map(|((fv, gv), (fj, gj))| value_dist(fv, gv) + linalg::spectral_norm(&(fj - gj)))
        .fold(0.0, f64::max)
}

pub fn rho<F, G>(f: &F, g: &G, grid: &CompactGrid, exec: Exec) -> Result<RhoValue, NormalError>
where
    F: Fn(&[CdNumber]) -> Vec<CdNumber> + Sync,
    G: Fn(&[CdNumber]) -> Vec<CdNumber> + Sync,
{
    let (a, b) = (Sampled::new(f, grid, exec)?, Sampled::new(g, grid, exec)?);
    Ok(RhoValue { value: rho_sampled(&a, &b), nodes: grid.nodes().len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub tol: f64,
    pub divergence_threshold: f64,
    /// Shortest subsequence accepted as extracted.
    pub min_chain: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams { tol: 1e-3, divergence_threshold: 1e6, min_chain: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Classification {
    /// The last quarter is ρ-Cauchy within tol; samples of the last map.
    ConvergesTo {
        limit: Vec<Vec<CdNumber>>,
        diameter: f64,
    },
    DivergesToInfinity {
        min_modulus: f64,
    },
    Extracted {
        indices: Vec<usize>,
        diameter: f64,
    },
    NotNormalEvidence {
        witness: (usize, usize),
        rho: f64,
    },
}

/// Pairwise ρ of the sampled maps.
pub fn rho_matrix(sampled: &[Sampled], exec: Exec) -> Vec<Vec<f64>> {
    let n = sampled.len();
    let flat = exec.map_range(n * n, |k| {
        let (i, j) = (k / n, k % n);
        if i < j {
            rho_sampled(&sampled[i], &sampled[j])
        } else {
            0.0
        }
    });
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            m[i][j] = flat[i * n + j];
            m[j][i] = m[i][j];
        }
    }
    m
}

fn diameter(m: &[Vec<f64>], set: &[usize]) -> f64 {
    let mut d = 0.0_f64;
    for (a, &i) in set.iter().enumerate() {
        for &j in &set[a + 1..] {
            d = d.max(m[i][j]);
        }
    }
    d
}

/// Greedy extraction: halve the radius, keep the largest ρ-ball inside the
/// current candidate set, stop once its diameter is within `tol`.
pub fn extract_cauchy(m: &[Vec<f64>], tol: f64, min_chain: usize) -> Option<(Vec<usize>, f64)> {
    let mut set: Vec<usize> = (0..m.len()).collect();
    let mut r = diameter(m, &set);
    loop {
        let d = diameter(m, &set);
        if d <= tol {
            return (set.len() >= min_chain).then_some((set, d));
        }
        // a ball of radius tol/2 already has diameter within tol
        r = (r.min(d) / 2.0).max(tol / 2.0);
        let best = set
            .iter()
            .map(|&c| set.iter().copied().filter(|&j| m[c][j] <= r).collect::<Vec<_>>())
            .max_by_key(|ball| ball.len())
            .expect("nonempty candidate set");
        if best.len() < min_chain {
            return None;
        }
        set = best;
    }
}

pub fn classify_sequence<F>(fs: &[F], grid: &CompactGrid, params: &ClassifyParams, exec: Exec) -> Result<Classification, NormalError>
where
    F: Fn(&[CdNumber]) -> Vec<CdNumber> + Sync,
{
    let n = fs.len();
    if n < 8 {
        return Err(NormalError::TooShort(n));
    }
    let sampled = fs.iter().map(|f| Sampled::new(f, grid, exec)).collect::<Result<Vec<_>, _>>()?;
    let tail = 3 * n / 4;
    let moduli: Vec<f64> = sampled[tail..].iter().map(Sampled::min_modulus).collect();
    if moduli.iter().all(|&m| m > params.divergence_threshold) && moduli.windows(2).all(|w| w[1] > w[0]) {
        return Ok(Classification::DivergesToInfinity { min_modulus: moduli[moduli.len() - 1] });
    }
    let m = rho_matrix(&sampled, exec);
    let tail_set: Vec<usize> = (tail..n).collect();
    let d = diameter(&m, &tail_set);
    if d <= params.tol {
        return Ok(Classification::ConvergesTo { limit: sampled[n - 1].values.clone(), diameter: d });
    }
    if let Some((indices, diameter)) = extract_cauchy(&m, params.tol, params.min_chain) {
        return Ok(Classification::Extracted { indices, diameter });
    }
    let mut witness = (0, 1);
    for i in 0..n {
        for j in i + 1..n {
            if m[i][j] < m[witness.0][witness.1] {
                witness = (i, j);
            }
        }
    }
    Ok(Classification::NotNormalEvidence { witness, rho: m[witness.0][witness.1] })
}

/// Coefficients of `z ↦ a z b + c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub a: CdNumber,
    pub b: CdNumber,
    pub c: CdNumber,
}

impl Affine {
    pub fn eval(&self, z: &CdNumber) -> CdNumber {
        &(&(&self.a * z) * &self.b) + &self.c
    }

    pub fn map(&self) -> impl Fn(&[CdNumber]) -> Vec<CdNumber> + Sync + '_ {
        move |z: &[CdNumber]| vec![self.eval(&z[0])]
    }
}

fn point_in_ball<R: Rng>(level: u32, r: f64, rng: &mut R) -> CdNumber {
    loop {
        let x = CdNumber::new((0..1usize << level).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("valid level");
        if x.norm() <= 1.0 {
            return x.scale(r);
        }
    }
}

/// Four anchors with `|a|, |b| ≤ 1.5`, `|c| ≤ 0.75`; member `k` (from 1)
/// perturbs anchor `k mod 4` by at most `2^{-k/3}` in each coefficient, so
/// every member obeys `|a|, |b| ≤ 2`, `|c| ≤ 1`.
pub fn bounded_affine_family<R: Rng>(level: u32, len: usize, rng: &mut R) -> Vec<Affine> {
    let anchors: Vec<Affine> =
        (0..4).map(|_| Affine { a: point_in_ball(level, 1.5, rng), b: point_in_ball(level, 1.5, rng), c: point_in_ball(level, 0.75, rng) }).collect();
    (1..=len)
        .map(|k| {
            let eps = 2f64.powf(-(k as f64) / 3.0).min(0.25);
            let base = &anchors[k % 4];
            Affine { a: &base.a + &point_in_ball(level, eps, rng), b: &base.b + &point_in_ball(level, eps, rng), c: &base.c + &point_in_ball(level, eps, rng) }
        })
        .collect()
}

/// Independent draws with `|a|, |b| ≤ 2`, `|c| ≤ 1`.
pub fn iid_affine_family<R: Rng>(level: u32, len: usize, rng: &mut R) -> Vec<Affine> {
    (0..len).map(|_| Affine { a: point_in_ball(level, 2.0, rng), b: point_in_ball(level, 2.0, rng), c: point_in_ball(level, 1.0, rng) }).collect()
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
    fn grid_nodes_lie_in_region_and_nest() {
        let g = CompactGrid::new(vec![q([1.0, 0.0, 0.0, 0.0])], vec![0.5], 100).unwrap();
        assert_eq!(g.nodes().len(), 100);
        assert!(g.nodes().iter().all(|z| g.contains(z)));
        let fine = g.refine(300).unwrap();
        assert_eq!(&fine.nodes()[..100], g.nodes());
    }

    #[test]
    fn rho_examples() {
        let g = CompactGrid::ball(2, 1.0, 200).unwrap();
        let id = |z: &[CdNumber]| z.to_vec();
        assert_eq!(rho(&id, &id, &g, Exec::Sequential).unwrap().value, 0.0);
        let c = q([0.1, -0.2, 0.3, 0.4]);
        let shifted = |z: &[CdNumber]| vec![&z[0] + &c];
        let r = rho(&id, &shifted, &g, Exec::Parallel).unwrap().value;
        assert!((r - c.norm()).abs() < 1e-9, "{r}");

        let (a, a2) = (q([0.5, 1.0, 0.0, -0.3]), q([0.2, 0.9, 0.4, 0.0]));
        let fa = |z: &[CdNumber]| vec![&a * &z[0]];
        let fb = |z: &[CdNumber]| vec![&a2 * &z[0]];
        let r = rho(&fa, &fb, &g, Exec::Parallel).unwrap().value;
        let diff = &a - &a2;
        let max_z = g.nodes().iter().map(|z| z[0].norm()).fold(0.0, f64::max);
        // left multiplication by a unit-scaled quaternion has spectral norm |a|
        let op = linalg::spectral_norm(&linalg::matrix_of(2, |h| &diff * h));
        assert!((op - diff.norm()).abs() < 1e-12);
        assert!((r - (diff.norm() * max_z + op)).abs() < 1e-8, "{r}");
    }

    #[test]
    fn classify_examples() {
        let g = CompactGrid::ball(2, 1.0, 64).unwrap();
        let p = ClassifyParams { tol: 1e-2, ..Default::default() };
        let shifts: Vec<_> = (1..=64).map(|k| move |z: &[CdNumber]| vec![&z[0] + &CdNumber::real(2, 1.0 / k as f64)]).collect();
        assert!(matches!(classify_sequence(&shifts, &g, &p, Exec::Parallel).unwrap(), Classification::ConvergesTo { .. }));

        let away = CompactGrid::new(vec![CdNumber::real(2, 2.0)], vec![1.0], 64).unwrap();
        let grow: Vec<_> = (1..=16).map(|k| move |z: &[CdNumber]| vec![z[0].scale(4f64.powi(k))]).collect();
        assert!(matches!(classify_sequence(&grow, &away, &p, Exec::Parallel).unwrap(), Classification::DivergesToInfinity { .. }));

        assert!(matches!(classify_sequence(&shifts[..4], &g, &p, Exec::Parallel), Err(NormalError::TooShort(4))));
    }

    #[test]
    fn bounded_family_extracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fam = bounded_affine_family(2, 64, &mut rng);
        for f in &fam {
            assert!(f.a.norm() <= 2.0 && f.b.norm() <= 2.0 && f.c.norm() <= 1.0);
        }
        let g = CompactGrid::ball(2, 1.0, 729).unwrap();
        let maps: Vec<_> = fam.iter().map(|f| f.map()).collect();
        match classify_sequence(&maps, &g, &ClassifyParams::default(), Exec::Parallel).unwrap() {
            Classification::Extracted { indices, diameter } => {
                assert!(indices.len() >= 4 && diameter <= 1e-3);
            }
            other => panic!("{other:?}"),
        }
    }
}
