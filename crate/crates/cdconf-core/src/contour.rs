//! Loops in a plane `a0 + R + R M`, line integrals of phrases, winding
//! numbers, zero counting through the phase of `f∘γ`, Rouché comparison,
//! zero localization and a sampled maximum principle.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::CdNumber;
use crate::exec::Exec;
use crate::phrase::{hat_operator, Phrase, PhraseError};

pub const MAX_REFINE_LEVELS: u32 = 20;
/// Relative position of the quadtree split point.
const SPLIT_RATIO: f64 = 0.5 + 0.01 * std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("invalid loop: {0}")]
    BadLoop(String),
    #[error("point lies {residual:e} off the loop plane")]
    OffPlane { residual: f64 },
    #[error("point lies on the loop (distance {distance:e})")]
    DegenerateLoop { distance: f64 },
    #[error("f vanishes on the curve at {point} (|f| = {value:e})")]
    BoundaryZero { point: CdNumber, value: f64 },
    #[error("f is not finite at {point}")]
    Pole { point: CdNumber },
    #[error("image of the loop is not planar through 0 (relative residual {residual:e})")]
    NotPlanar { residual: f64 },
    #[error("refinement did not converge; last estimates {last} and {previous}")]
    Quadrature { last: CdNumber, previous: CdNumber },
    #[error("|f| < |g| fails at {witness}: |f| = {f_norm:e}, |g| = {g_norm:e}")]
    Precondition { witness: CdNumber, f_norm: f64, g_norm: f64 },
    #[error("zero count not conserved: parent {parent}, children {children:?}")]
    Conservation { parent: i64, children: Vec<i64> },
    #[error(transparent)]
    Phrase(#[from] PhraseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourParams {
    /// |f| below this on the curve is a zero.
    pub zero_tol: f64,
    /// Relative off-plane residual tolerated for images.
    pub plane_tol: f64,
    /// Largest phase step between adjacent samples.
    pub max_phase_step: f64,
    /// Bisection depth for phase refinement.
    pub max_depth: u32,
    /// Initial samples per loop segment.
    pub samples_per_segment: usize,
}

impl Default for ContourParams {
    fn default() -> Self {
        ContourParams { zero_tol: 1e-10, plane_tol: 1e-6, max_phase_step: FRAC_PI_4, max_depth: 48, samples_per_segment: 8 }
    }
}

/// Closed polyline `t ↦ a0 + x(t) + y(t) M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarLoop {
    pub a0: CdNumber,
    #[serde(rename = "M")]
    pub m: CdNumber,
    pub pts: Vec<[f64; 2]>,
}

impl PlanarLoop {
    pub fn new(a0: CdNumber, m: CdNumber, pts: Vec<[f64; 2]>) -> Result<Self, ContourError> {
        let l = PlanarLoop { a0, m, pts };
        l.validate()?;
        Ok(l)
    }

    pub fn validate(&self) -> Result<(), ContourError> {
        if self.a0.level() != self.m.level() {
            return Err(ContourError::BadLoop("a0 and M live at different levels".into()));
        }
        if self.m.re().abs() > 1e-12 || (self.m.norm() - 1.0).abs() > 1e-12 {
            return Err(ContourError::BadLoop("M must be a unit imaginary element".into()));
        }
        if self.pts.len() < 17 {
            return Err(ContourError::BadLoop(format!("{} segments, at least 16 required", self.pts.len().saturating_sub(1))));
        }
        if self.pts.iter().flatten().any(|c| !c.is_finite()) {
            return Err(ContourError::BadLoop("non-finite vertex".into()));
        }
        let (f, l) = (self.pts[0], self.pts[self.pts.len() - 1]);
        if (f[0] - l[0]).abs() > 1e-12 || (f[1] - l[1]).abs() > 1e-12 {
            return Err(ContourError::BadLoop("first and last vertex differ".into()));
        }
        Ok(())
    }

    /// Counterclockwise circle with `n` segments.
    pub fn circle(a0: CdNumber, m: CdNumber, center: [f64; 2], radius: f64, n: usize) -> Result<Self, ContourError> {
        let mut pts: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            })
            .collect();
        pts.push(pts[0]);
        Self::new(a0, m, pts)
    }

    /// Counterclockwise boundary of `[x0,x1]×[y0,y1]`, `per_side` segments
    /// on each edge.
    pub fn rectangle(a0: CdNumber, m: CdNumber, lo: [f64; 2], hi: [f64; 2], per_side: usize) -> Result<Self, ContourError> {
        let corners = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
        let mut pts = Vec::with_capacity(4 * per_side + 1);
        for k in 0..4 {
            let (p, q) = (corners[k], corners[(k + 1) % 4]);
            for j in 0..per_side {
                let s = j as f64 / per_side as f64;
                pts.push([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]);
            }
        }
        pts.push(pts[0]);
        Self::new(a0, m, pts)
    }

    pub fn level(&self) -> u32 {
        self.a0.level()
    }

    pub fn point(&self, xy: [f64; 2]) -> CdNumber {
        &(&self.a0 + &CdNumber::real(self.level(), xy[0])) + &self.m.scale(xy[1])
    }

    pub fn vertices(&self) -> Vec<CdNumber> {
        self.pts.iter().map(|&p| self.point(p)).collect()
    }

    /// Plane coordinates of `z` and its distance from the plane.
    pub fn plane_coords(&self, z: &CdNumber) -> ([f64; 2], f64) {
        let u = z - &self.a0;
        let (x, y) = (u.re(), u.dot(&self.m));
        let back = &CdNumber::real(self.level(), x) + &self.m.scale(y);
        ([x, y], u.dist(&back))
    }

    pub fn segments(&self) -> usize {
        self.pts.len() - 1
    }

    pub fn length(&self) -> f64 {
        self.pts.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum()
    }

    /// Uniform samples of the disc of the given center and radius.
    pub fn disc_samples<R: Rng>(&self, center: [f64; 2], radius: f64, n: usize, rng: &mut R) -> Vec<CdNumber> {
        (0..n)
            .map(|_| {
                let r = radius * rng.random::<f64>().sqrt();
                let t = TAU * rng.random::<f64>();
                self.point([center[0] + r * t.cos(), center[1] + r * t.sin()])
            })
            .collect()
    }
}

/// Open path through the given points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<CdNumber>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: CdNumber,
    pub levels: u32,
    pub change: f64,
}

/// Richardson exponents for the right-endpoint rule: the error is an exact
/// linear term plus the even trapezoid expansion.
fn richardson_exponent(k: usize) -> i32 {
    if k == 1 {
        1
    } else {
        2 * (k as i32 - 1)
    }
}

fn riemann_level(hat: &Phrase, path: &[CdNumber], pieces: usize, exec: Exec) -> Result<CdNumber, PhraseError> {
    let level = hat.level();
    let parts = exec.try_map_range(path.len() - 1, |s| {
        let (p, q) = (&path[s], &path[s + 1]);
        let h = (q - p).scale(1.0 / pieces as f64);
        let mut acc = CdNumber::zero(level);
        for j in 1..=pieces {
            let z = p + &h.scale(j as f64);
            acc += &hat.eval(&z, Some(&h))?;
        }
        Ok(acc)
    })?;
    Ok(parts.iter().fold(CdNumber::zero(level), |a, b| &a + b))
}

/// `Σ f̂(z_{k+1}).Δz_k` over the path, refined dyadically and extrapolated
/// until successive estimates differ by less than `tol`.
pub fn line_integral(nu: &Phrase, path: &[CdNumber], tol: f64) -> Result<Quadrature, ContourError> {
    line_integral_with(nu, path, tol, Exec::default())
}

pub fn line_integral_with(nu: &Phrase, path: &[CdNumber], tol: f64, exec: Exec) -> Result<Quadrature, ContourError> {
    if path.len() < 2 {
        return Err(ContourError::BadLoop("path needs at least two points".into()));
    }
    if let Some(p) = path.iter().find(|p| p.level() != nu.level()) {
        return Err(ContourError::Phrase(PhraseError::LevelMismatch(nu.level(), p.level())));
    }
    let hat = hat_operator(nu)?;
    let mut prev_row: Vec<CdNumber> = Vec::new();
    for lvl in 0..=MAX_REFINE_LEVELS {
        let mut row = vec![riemann_level(&hat, path, 1usize << lvl, exec)?];
        for k in 1..=prev_row.len() {
            let f = 2f64.powi(richardson_exponent(k)) - 1.0;
            let next = &row[k - 1] + &(&row[k - 1] - &prev_row[k - 1]).scale(1.0 / f);
            row.push(next);
        }
        if let Some(prev_best) = prev_row.last() {
            let best = row.last().expect("nonempty");
            let change = best.dist(prev_best);
            if change < tol {
                return Ok(Quadrature { value: best.clone(), levels: lvl, change });
            }
            if lvl == MAX_REFINE_LEVELS {
                return Err(ContourError::Quadrature { last: best.clone(), previous: prev_best.clone() });
            }
        }
        prev_row = row;
    }
    unreachable!("loop returns at the last level")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingResult {
    pub turns: i64,
    #[serde(rename = "M")]
    pub m: CdNumber,
    pub raw_phase: f64,
}

fn segment_distance(a: [f64; 2], p: [f64; 2], q: [f64; 2]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 { 0.0 } else { (((a[0] - p[0]) * d[0] + (a[1] - p[1]) * d[1]) / len2).clamp(0.0, 1.0) };
    (p[0] + t * d[0] - a[0]).hypot(p[1] + t * d[1] - a[1])
}

/// Turns of the loop about `a` inside its plane.
pub fn winding(l: &PlanarLoop, a: &CdNumber, tol: f64) -> Result<WindingResult, ContourError> {
    let (c, residual) = l.plane_coords(a);
    if residual > tol.max(1e-12) {
        return Err(ContourError::OffPlane { residual });
    }
    let mut phase = 0.0;
    for w in l.pts.windows(2) {
        let distance = segment_distance(c, w[0], w[1]);
        if distance <= tol {
            return Err(ContourError::DegenerateLoop { distance });
        }
        let u = [w[0][0] - c[0], w[0][1] - c[1]];
        let v = [w[1][0] - c[0], w[1][1] - c[1]];
        // a straight segment missing the point subtends less than π
        phase += (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
    }
    Ok(WindingResult { turns: (phase / TAU).round() as i64, m: l.m.clone(), raw_phase: phase })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCount {
    /// Zeros minus poles inside, with multiplicity.
    pub count: i64,
    pub raw_phase: f64,
    pub samples: usize,
    /// Largest relative distance of an image sample from the fitted plane.
    pub plane_residual: f64,
}

struct Sample {
    z: CdNumber,
    w: CdNumber,
}

fn sample<F: Fn(&CdNumber) -> CdNumber>(f: &F, z: CdNumber, params: &ContourParams) -> Result<Sample, ContourError> {
    let w = f(&z);
    if !w.is_finite() {
        return Err(ContourError::Pole { point: z });
    }
    let n = w.norm();
    if n < params.zero_tol {
        return Err(ContourError::BoundaryZero { point: z, value: n });
    }
    Ok(Sample { z, w })
}

/// Orthonormal basis of the best 2-plane through 0, oriented so that the
/// derivative of `f` along (1, M) is positively oriented.
fn image_plane<F: Fn(&CdNumber) -> CdNumber>(f: &F, l: &PlanarLoop, ws: &[CdNumber]) -> (CdNumber, CdNumber) {
    let level = l.level();
    let n = ws[0].dim();
    let mut s = DMatrix::<f64>::zeros(n, n);
    for w in ws {
        let v = DVector::from_column_slice(w.coeffs());
        s += &v * v.transpose() / (w.norm_sqr());
    }
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let col = |k: usize| CdNumber::new(eig.eigenvectors.column(order[k]).iter().cloned().collect()).expect("algebra dimension");
    let q1 = col(0);
    let mut q2 = col(1);
    for z in l.vertices().iter().take(l.segments()) {
        let h = 1e-6 * z.norm().max(1.0);
        let d = |dir: &CdNumber| (&f(&(z + &dir.scale(h))) - &f(&(z - &dir.scale(h)))).scale(0.5 / h);
        let (u1, u2) = (d(&CdNumber::one(level)), d(&l.m));
        let det = u1.dot(&q1) * u2.dot(&q2) - u2.dot(&q1) * u1.dot(&q2);
        if det.is_finite() && det.abs() > 1e-12 * u1.norm() * u2.norm() {
            if det < 0.0 {
                q2 = -&q2;
            }
            break;
        }
    }
    (q1, q2)
}

fn phase_in(w: &CdNumber, q: &(CdNumber, CdNumber)) -> f64 {
    w.dot(&q.1).atan2(w.dot(&q.0))
}

fn wrap(d: f64) -> f64 {
    let r = (d + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Zeros minus poles of `f` enclosed by the loop, read off as the winding
/// of `f∘γ` about 0 inside the image plane.
pub fn count_zeros<F>(f: &F, l: &PlanarLoop, params: &ContourParams) -> Result<ZeroCount, ContourError>
where
    F: Fn(&CdNumber) -> CdNumber,
{
    l.validate()?;
    let k = params.samples_per_segment.max(1);
    let mut ts = Vec::with_capacity(l.segments() * k);
    let mut initial = Vec::with_capacity(l.segments() * k);
    for s in 0..l.segments() {
        for j in 0..k {
            let t = s as f64 + j as f64 / k as f64;
            initial.push(sample(f, loop_point(l, t), params)?);
            ts.push(t);
        }
    }
    let ws: Vec<CdNumber> = initial.iter().map(|s| s.w.clone()).collect();
    let q = image_plane(f, l, &ws);
    let mut plane_residual = 0.0_f64;
    let mut check = |w: &CdNumber| -> Result<(), ContourError> {
        let proj = &q.0.scale(w.dot(&q.0)) + &q.1.scale(w.dot(&q.1));
        let r = w.dist(&proj) / w.norm();
        plane_residual = plane_residual.max(r);
        if r > params.plane_tol {
            Err(ContourError::NotPlanar { residual: r })
        } else {
            Ok(())
        }
    };
    for w in &ws {
        check(w)?;
    }
    let mut total = 0.0;
    let mut samples = initial.len();
    let n = ts.len();
    for i in 0..n {
        let t0 = ts[i];
        let t1 = if i + 1 == n { l.segments() as f64 } else { ts[i + 1] };
        let w1 = if i + 1 == n { &initial[0].w } else { &initial[i + 1].w };
        let mut stack = vec![(t0, t1, initial[i].w.clone(), w1.clone(), 0u32)];
        while let Some((a, b, wa, wb, depth)) = stack.pop() {
            let d = wrap(phase_in(&wb, &q) - phase_in(&wa, &q));
            if d.abs() <= params.max_phase_step {
                total += d;
                continue;
            }
            let mid = 0.5 * (a + b);
            let sm = sample(f, loop_point(l, mid), params)?;
            if depth >= params.max_depth {
                return Err(ContourError::BoundaryZero { value: sm.w.norm(), point: sm.z });
            }
            check(&sm.w)?;
            samples += 1;
            // right half first so the left half is processed next
            stack.push((mid, b, sm.w.clone(), wb, depth + 1));
            stack.push((a, mid, wa, sm.w, depth + 1));
        }
    }
    Ok(ZeroCount { count: (total / TAU).round() as i64, raw_phase: total, samples, plane_residual })
}

/// Point at parameter `t ∈ [0, segments]`, segment `⌊t⌋`.
fn loop_point(l: &PlanarLoop, t: f64) -> CdNumber {
    let s = (t.floor() as usize).min(l.segments() - 1);
    let u = t - s as f64;
    let (p, q) = (l.pts[s], l.pts[s + 1]);
    l.point([p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])])
}

/// Dense boundary samples: every segment cut into `k` pieces.
pub fn boundary_samples(l: &PlanarLoop, k: usize) -> Vec<CdNumber> {
    let k = k.max(1);
    (0..l.segments() * k).map(|i| loop_point(l, i as f64 / k as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoucheResult {
    pub holds: bool,
    pub n_g: i64,
    pub n_h: i64,
}

/// Compares the zero counts of `g` and `f + g` once `|f| < |g|` is
/// confirmed on boundary samples.
pub fn rouche_equal<F, G>(f: &F, g: &G, l: &PlanarLoop, params: &ContourParams) -> Result<RoucheResult, ContourError>
where
    F: Fn(&CdNumber) -> CdNumber,
    G: Fn(&CdNumber) -> CdNumber,
{
    for z in boundary_samples(l, params.samples_per_segment * 4) {
        let (fv, gv) = (f(&z), g(&z));
        let (f_norm, g_norm) = (fv.norm(), gv.norm());
        if !(f_norm < g_norm) {
            return Err(ContourError::Precondition { witness: z, f_norm, g_norm });
        }
    }
    let n_g = count_zeros(g, l, params)?.count;
    let n_h = count_zeros(&|z: &CdNumber| &f(z) + &g(z), l, params)?.count;
    Ok(RoucheResult { holds: n_g == n_h, n_g, n_h })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaxPrincipleResult {
    pub holds: bool,
    pub boundary_sup: f64,
    pub interior_sup: f64,
    pub witness: Option<CdNumber>,
}

/// `sup |f|` over interior samples against `sup |f|` over dense boundary
/// samples plus `tol`.
pub fn max_principle_check<F>(f: &F, l: &PlanarLoop, interior: &[CdNumber], tol: f64) -> Result<MaxPrincipleResult, ContourError>
where
    F: Fn(&CdNumber) -> CdNumber,
{
    l.validate()?;
    let eval = |z: &CdNumber| -> Result<f64, ContourError> {
        let w = f(z);
        if w.is_finite() {
            Ok(w.norm())
        } else {
            Err(ContourError::Pole { point: z.clone() })
        }
    };
    let mut boundary_sup = 0.0_f64;
    for z in boundary_samples(l, 32) {
        boundary_sup = boundary_sup.max(eval(&z)?);
    }
    let mut interior_sup = 0.0_f64;
    let mut witness = None;
    for z in interior {
        let v = eval(z)?;
        interior_sup = interior_sup.max(v);
        if witness.is_none() && v > boundary_sup + tol {
            witness = Some(z.clone());
        }
    }
    Ok(MaxPrincipleResult { holds: witness.is_none(), boundary_sup, interior_sup, witness })
}

/// Axis-parallel rectangle `[lo, hi]` in the plane `a0 + R + R M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneRect {
    pub a0: CdNumber,
    #[serde(rename = "M")]
    pub m: CdNumber,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl PlaneRect {
    fn boundary(&self) -> Result<PlanarLoop, ContourError> {
        PlanarLoop::rectangle(self.a0.clone(), self.m.clone(), self.lo, self.hi, 4)
    }

    fn size(&self) -> f64 {
        (self.hi[0] - self.lo[0]).max(self.hi[1] - self.lo[1])
    }

    fn split(&self, at: [f64; 2]) -> [PlaneRect; 4] {
        let r = |lo: [f64; 2], hi: [f64; 2]| PlaneRect { a0: self.a0.clone(), m: self.m.clone(), lo, hi };
        [r(self.lo, at), r([at[0], self.lo[1]], [self.hi[0], at[1]]), r([self.lo[0], at[1]], [at[0], self.hi[1]]), r(at, self.hi)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCell {
    pub center: CdNumber,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub order: i64,
}

/// Quadtree search for cells of size at most `min_cell` carrying a nonzero
/// count. Counts of zeros and poles sharing a cell cancel.
pub fn locate_zeros<F>(f: &F, rect: &PlaneRect, min_cell: f64, params: &ContourParams, exec: Exec) -> Result<Vec<ZeroCell>, ContourError>
where
    F: Fn(&CdNumber) -> CdNumber + Sync,
{
    let n = count_zeros(f, &rect.boundary()?, params)?.count;
    cell_search(f, rect, n, min_cell, params, exec)
}

fn cell_search<F>(f: &F, rect: &PlaneRect, n: i64, min_cell: f64, params: &ContourParams, exec: Exec) -> Result<Vec<ZeroCell>, ContourError>
where
    F: Fn(&CdNumber) -> CdNumber + Sync,
{
    if n == 0 {
        return Ok(Vec::new());
    }
    if rect.size() <= min_cell {
        let mid = [0.5 * (rect.lo[0] + rect.hi[0]), 0.5 * (rect.lo[1] + rect.hi[1])];
        let center = rect.boundary()?.point(mid);
        return Ok(vec![ZeroCell { center, lo: rect.lo, hi: rect.hi, order: n }]);
    }
    // off-center split so zeros at round coordinates stay off cell edges;
    // a zero passing through an edge can split its order between cells
    let mid = [rect.lo[0] + SPLIT_RATIO * (rect.hi[0] - rect.lo[0]), rect.lo[1] + SPLIT_RATIO * (rect.hi[1] - rect.lo[1])];
    let jitter = min_cell / 7.0;
    let counts = |at: [f64; 2]| -> Result<(Vec<PlaneRect>, Vec<i64>), ContourError> {
        let kids = rect.split(at).to_vec();
        let counts = exec.try_map_range(4, |i| Ok::<i64, ContourError>(count_zeros(f, &kids[i].boundary()?, params)?.count))?;
        Ok((kids, counts))
    };
    let (kids, c) = match counts(mid) {
        Err(ContourError::BoundaryZero { .. }) => counts([mid[0] + jitter, mid[1] + jitter])?,
        other => other?,
    };
    if c.iter().sum::<i64>() != n {
        return Err(ContourError::Conservation { parent: n, children: c });
    }
    let found = exec.try_map_range(4, |i| cell_search(f, &kids[i], c[i], min_cell, params, exec))?;
    Ok(found.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phrase::parse;

    fn plane(level: u32, k: usize) -> (CdNumber, CdNumber) {
        (CdNumber::zero(level), CdNumber::basis(level, k))
    }

    fn unit_circle(level: u32, k: usize) -> PlanarLoop {
        let (a0, m) = plane(level, k);
        PlanarLoop::circle(a0, m, [0.0, 0.0], 1.0, 64).unwrap()
    }

    #[test]
    fn loop_validation() {
        let (a0, m) = plane(2, 1);
        assert!(PlanarLoop::circle(a0.clone(), m.clone(), [0.0, 0.0], 1.0, 8).is_err());
        assert!(PlanarLoop::circle(a0, CdNumber::basis(2, 1).scale(2.0), [0.0, 0.0], 1.0, 32).is_err());
    }

    #[test]
    fn winding_examples() {
        let l = unit_circle(2, 1);
        assert_eq!(winding(&l, &CdNumber::zero(2), 1e-12).unwrap().turns, 1);
        assert_eq!(winding(&l, &CdNumber::real(2, 3.0), 1e-12).unwrap().turns, 0);
        assert!(matches!(winding(&l, &CdNumber::real(2, 1.0), 1e-12), Err(ContourError::DegenerateLoop { .. })));
        assert!(matches!(winding(&l, &CdNumber::basis(2, 2).scale(0.1), 1e-12), Err(ContourError::OffPlane { .. })));
    }

    #[test]
    fn constant_integrand_gives_displacement() {
        let nu = parse("e", 2).unwrap();
        let z0 = CdNumber::new(vec![0.0, 1.0, -1.0, 0.5]).unwrap();
        let z1 = CdNumber::new(vec![2.0, 0.0, 1.0, 0.5]).unwrap();
        let q = line_integral(&nu, &[z0.clone(), z1.clone()], 1e-12).unwrap();
        assert!(q.value.dist(&(&z1 - &z0)) < 1e-12);
    }

    #[test]
    fn closed_loop_integral_vanishes() {
        let nu = parse("z", 2).unwrap();
        let l = unit_circle(2, 1);
        let q = line_integral(&nu, &l.vertices(), 1e-10).unwrap();
        assert!(q.value.norm() < 1e-8);
    }

    #[test]
    fn count_zeros_examples() {
        let l = unit_circle(2, 1);
        let p = ContourParams::default();
        let a = CdNumber::new(vec![0.2, -0.1, 0.0, 0.0]).unwrap();
        let c = CdNumber::new(vec![0.5, 0.1, 1.0, -0.3]).unwrap();
        let d = CdNumber::new(vec![-0.2, 0.0, 0.7, 1.1]).unwrap();
        let f = |z: &CdNumber| &(&c * &(z - &a)) * &d;
        assert_eq!(count_zeros(&f, &l, &p).unwrap().count, 1);
        let sq = |z: &CdNumber| (z - &a).powi(2);
        assert_eq!(count_zeros(&sq, &l, &p).unwrap().count, 2);
        let far = |z: &CdNumber| z - &CdNumber::real(2, 5.0);
        assert_eq!(count_zeros(&far, &l, &p).unwrap().count, 0);
        let pole = |z: &CdNumber| z.inv().unwrap();
        assert_eq!(count_zeros(&pole, &l, &p).unwrap().count, -1);
    }

    #[test]
    fn boundary_zero_reported() {
        let l = unit_circle(2, 1);
        let f = |z: &CdNumber| z - &CdNumber::real(2, 1.0);
        assert!(matches!(count_zeros(&f, &l, &ContourParams::default()), Err(ContourError::BoundaryZero { .. })));
    }

    #[test]
    fn rouche_examples() {
        let p = ContourParams::default();
        let l = unit_circle(2, 1);
        let r = rouche_equal(&|_: &CdNumber| CdNumber::real(2, 0.1), &|z: &CdNumber| z.clone(), &l, &p).unwrap();
        assert_eq!((r.holds, r.n_g, r.n_h), (true, 1, 1));
        let l2 = unit_circle(2, 2);
        let r = rouche_equal(&|z: &CdNumber| z.scale(0.1), &|z: &CdNumber| z.powi(2), &l2, &p).unwrap();
        assert_eq!((r.n_g, r.n_h), (2, 2));
        let e = rouche_equal(&|_: &CdNumber| CdNumber::real(2, 2.0), &|z: &CdNumber| z.clone(), &l, &p);
        assert!(matches!(e, Err(ContourError::Precondition { .. })));
    }

    #[test]
    fn max_principle_examples() {
        use rand::SeedableRng;
        let l = unit_circle(2, 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let inside = l.disc_samples([0.0, 0.0], 0.95, 1000, &mut rng);
        let r = max_principle_check(&|z: &CdNumber| z.clone(), &l, &inside, 1e-9).unwrap();
        assert!(r.holds);
        let c = max_principle_check(&|_: &CdNumber| CdNumber::real(2, 3.0), &l, &inside, 0.0).unwrap();
        assert!(c.holds && c.boundary_sup == c.interior_sup);
        let pole = |z: &CdNumber| (z - &CdNumber::real(2, 1.0)).inv().unwrap_or(CdNumber::real(2, f64::INFINITY));
        assert!(matches!(max_principle_check(&pole, &l, &inside, 1e-9), Err(ContourError::Pole { .. })));
    }

    #[test]
    fn locate_examples() {
        let (a0, m) = plane(2, 1);
        let rect = PlaneRect { a0, m, lo: [-1.0, -1.0], hi: [2.0, 1.0] };
        let p = ContourParams::default();
        let one = CdNumber::real(2, 1.0);
        let f = |z: &CdNumber| z * &(z - &one);
        let cells = locate_zeros(&f, &rect, 0.05, &p, Exec::Parallel).unwrap();
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|c| c.order == 1));
        let sq = |z: &CdNumber| z.powi(2);
        let cells = locate_zeros(&sq, &rect, 0.05, &p, Exec::Sequential).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].order, 2);
        assert!(cells[0].center.norm() < 0.1);
        let none = |z: &CdNumber| z - &CdNumber::real(2, 10.0);
        assert!(locate_zeros(&none, &rect, 0.05, &p, Exec::Parallel).unwrap().is_empty());
    }
}
