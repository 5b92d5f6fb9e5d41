use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::{case_rng, gauss, in_ball, random_word, unit_imaginary, worst, Check, SuiteConfig, SuiteReport};
use crate::algebra::CdNumber;
use crate::contour::{self, ContourError, ContourParams, PlanarLoop};
use crate::moebius::{self, symmetric_point, Ext, Generator, Hypersphere, MoebiusWord};
use crate::phrase::{antiderive, derivative_at_one, Phrase, Side, Tree};

fn small_constant(level: u32, rng: &mut impl Rng) -> CdNumber {
    loop {
        let c = CdNumber::new((0..1usize << level).map(|_| rng.random_range(-2i32..=2) as f64).collect()).expect("valid level");
        if !c.is_real() {
            return c;
        }
    }
}

fn bracket(mut factors: Vec<Tree>, rng: &mut impl Rng) -> Tree {
    if factors.len() == 1 {
        return factors.pop().expect("one factor");
    }
    let cut = rng.random_range(1..factors.len());
    let right = factors.split_off(cut);
    Tree::node(bracket(factors, rng), bracket(right, rng))
}

/// Sum of one to three words in `z` powers and small integer constants,
/// each word containing `z`, under random bracketing.
pub fn random_z_phrase(level: u32, rng: &mut impl Rng) -> Phrase {
    loop {
        let terms = (0..rng.random_range(1..=3))
            .map(|_| {
                let k = rng.random_range(1..=4);
                let mut factors: Vec<Tree> =
                    (0..k).map(|_| if rng.random_bool(0.6) { Tree::z(rng.random_range(1..=3)) } else { Tree::constant(small_constant(level, rng)) }).collect();
                if !factors.iter().any(|t| t.degree() > 0) {
                    let at = rng.random_range(0..k);
                    factors[at] = Tree::z(1);
                }
                let num = loop {
                    let n = rng.random_range(-5i64..=5);
                    if n != 0 {
                        break n;
                    }
                };
                (BigRational::new(BigInt::from(num), BigInt::from(rng.random_range(1i64..=4))), bracket(factors, rng))
            })
            .collect();
        if let Ok(p) = Phrase::from_terms(level, terms) {
            if !p.is_zero() {
                return p;
            }
        }
    }
}

pub(super) fn antiderive_roundtrip(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 200;
    const LIMIT: f64 = 1e-8;
    const QUAD_TOL: f64 = 1e-11;
    // [symbolic mismatches, closed loop, open path]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        let nu = random_z_phrase(level, &mut rng);
        let mut mismatches = 0.0;
        let mut mu = None;
        for side in [Side::Left, Side::Right] {
            match antiderive(&nu, side).and_then(|m| derivative_at_one(&m).map(|d| (m, d))) {
                Ok((m, d)) => {
                    if d != nu {
                        mismatches += 1.0;
                    }
                    if side == Side::Left {
                        mu = Some(m);
                    }
                }
                Err(_) => mismatches += 1.0,
            }
        }
        let Some(mu) = mu else {
            return [mismatches, f64::INFINITY, f64::INFINITY];
        };
        let mut closed: Vec<CdNumber> = (0..5).map(|_| in_ball(level, 0.9, &mut rng)).collect();
        closed.push(closed[0].clone());
        let open: Vec<CdNumber> = (0..4).map(|_| in_ball(level, 0.9, &mut rng)).collect();
        // sequential inside a case; cases already run in parallel
        let integral = |path: &[CdNumber]| contour::line_integral_with(&nu, path, QUAD_TOL, crate::exec::Exec::Sequential).map(|q| q.value);
        let loop_residual = integral(&closed).map_or(f64::INFINITY, |v| v.norm());
        let open_residual = match (integral(&open), mu.eval(&open[3], None), mu.eval(&open[0], None)) {
            (Ok(v), Ok(end), Ok(start)) => v.dist(&(&end - &start)),
            _ => f64::INFINITY,
        };
        [mismatches, loop_residual, open_residual]
    });
    let checks = vec![
        Check::at_most("D(antiderivative) ≠ input, both sides", rows.iter().map(|r| r[0]).sum(), 0.0),
        Check::below("closed-loop line integral magnitude", worst(rows.iter().map(|r| r[1])), LIMIT),
        Check::below("open path vs antiderivative difference", worst(rows.iter().map(|r| r[2])), LIMIT),
    ];
    SuiteReport::new("thm17-antiderive-roundtrip", cfg, checks, rows.iter().map(|r| r[1].max(r[2])).collect(), Vec::new())
}

/// `A (Π_k (z − z_k)^{p_k}) B` with all `z_k` in the plane of `M` through 0.
struct Constructed {
    zeros: Vec<(CdNumber, u32)>,
    a: CdNumber,
    b: CdNumber,
}

impl Constructed {
    fn eval(&self, z: &CdNumber) -> CdNumber {
        let mut w = CdNumber::one(z.level());
        for (zk, p) in &self.zeros {
            w = &w * &(z - zk).powi(*p);
        }
        &(&self.a * &w) * &self.b
    }
}

pub(super) fn argument_principle(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 50;
    let params = ContourParams::default();
    // [count wrong, rouche failed, rouche applicable]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        let m = unit_imaginary(level, &mut rng);
        let zero = CdNumber::zero(level);
        let l = PlanarLoop::circle(zero.clone(), m.clone(), [0.0, 0.0], 1.0, 64).expect("valid circle");
        let n = rng.random_range(1..=3);
        let zeros: Vec<([f64; 2], u32)> = (0..n)
            .map(|k| loop {
                let xy = [rng.random_range(-1.6..1.6), rng.random_range(-1.6..1.6)];
                let r = f64::hypot(xy[0], xy[1]);
                if (r - 1.0).abs() > 0.1 {
                    break (xy, if i % 2 == 0 && k == 0 { 2 } else { 1 });
                }
            })
            .collect();
        let expected: i64 = zeros.iter().filter(|(xy, _)| f64::hypot(xy[0], xy[1]) < 1.0).map(|(_, p)| *p as i64).sum();
        let g = Constructed { zeros: zeros.iter().map(|(xy, p)| (l.point(*xy), *p)).collect(), a: gauss(level, 1.0, &mut rng), b: gauss(level, 1.0, &mut rng) };
        let gf = |z: &CdNumber| g.eval(z);
        let wrong = match contour::count_zeros(&gf, &l, &params) {
            Ok(c) if c.count == expected => 0.0,
            _ => 1.0,
        };
        let w = l.point([rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)]);
        let boundary = contour::boundary_samples(&l, 32);
        let g_min = boundary.iter().map(|z| g.eval(z).norm()).fold(f64::INFINITY, f64::min);
        let h_unit = boundary.iter().map(|z| (&(&g.a * &(z - &w)) * &g.b).norm()).fold(0.0, f64::max);
        let eps = rng.random_range(0.2..1.8) * 0.5 * g_min / h_unit;
        let h = |z: &CdNumber| (&(&g.a * &(z - &w)) * &g.b).scale(eps);
        let (rouche_failed, applicable) = match contour::rouche_equal(&h, &gf, &l, &params) {
            Ok(r) => (if r.holds { 0.0 } else { 1.0 }, 1.0),
            Err(ContourError::Precondition { .. }) => (0.0, 0.0),
            Err(_) => (1.0, 1.0),
        };
        [wrong, rouche_failed, applicable]
    });
    let applicable: f64 = rows.iter().map(|r| r[2]).sum();
    let checks = vec![
        Check::at_most("maps with a wrong zero count", rows.iter().map(|r| r[0]).sum(), 0.0),
        Check::at_most("Rouché equality failures", rows.iter().map(|r| r[1]).sum(), 0.0),
        Check::at_least("cases meeting the boundary inequality", applicable, 1.0),
    ];
    SuiteReport::new(
        "thm23-argument-principle",
        cfg,
        checks,
        rows.iter().map(|r| r[0].max(r[1])).collect(),
        vec![format!("{applicable} of {CASES} perturbations met |f| < |g| on the boundary")],
    )
}

/// Shifts within the plane of `M` and inversions, then one norm-scaling
/// generator; such a word restricted to that plane is a complex Möbius map.
fn plane_word(level: u32, m: &CdNumber, rng: &mut impl Rng) -> MoebiusWord {
    let mut gens: Vec<Generator> = (0..rng.random_range(2..=5))
        .map(|_| {
            if rng.random_bool(0.5) {
                Generator::Inv
            } else {
                let c = &CdNumber::real(level, rng.random_range(-1.0..1.0)) + &m.scale(rng.random_range(-1.0..1.0));
                Generator::Shift { c }
            }
        })
        .collect();
    if level == 2 {
        gens.push(Generator::MulQ { a: moebius::random_unit(2, rng).scale(rng.random_range(0.5..2.0)), b: moebius::random_unit(2, rng) });
    } else {
        gens.push(Generator::RotO { angles: vec![(rng.random_range(0..4), rng.random_range(4..8), rng.random_range(-3.0..3.0))] });
    }
    MoebiusWord::new(level, gens).expect("valid generators")
}

pub(super) fn maximum_principle(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 50;
    const SEGMENTS: usize = 64;
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        let m = unit_imaginary(level, &mut rng);
        let zero = CdNumber::zero(level);
        let w = plane_word(level, &m, &mut rng);
        let probe = PlanarLoop::circle(zero.clone(), m.clone(), [0.0, 0.0], 1.0, SEGMENTS).expect("valid circle");
        let pole = w.inverse().apply(&Ext::INF).finite().map(|p| probe.plane_coords(p).0);
        let (center, radius) = loop {
            let c = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let r = match pole {
                Some(p) => (0.6 * f64::hypot(c[0] - p[0], c[1] - p[1])).min(1.0),
                None => 1.0,
            };
            if r > 0.05 {
                break (c, r);
            }
        };
        let l = PlanarLoop::circle(zero, m, center, radius, SEGMENTS).expect("valid circle");
        // stay inside the inscribed polygon
        let interior = l.disc_samples(center, 0.99 * radius * (PI / SEGMENTS as f64).cos(), 200, &mut rng);
        match contour::max_principle_check(&|z: &CdNumber| w.eval(z), &l, &interior, 1e-9) {
            Ok(r) => [if r.holds { 0.0 } else { 1.0 }, r.interior_sup - r.boundary_sup],
            Err(_) => [1.0, f64::INFINITY],
        }
    });
    let checks = vec![
        Check::at_most("words with an interior sample above boundary sup + 1e-9", rows.iter().map(|r| r[0]).sum(), 0.0),
        Check::at_most("largest interior sup minus boundary sup", worst(rows.iter().map(|r| r[1])), 1e-9),
    ];
    SuiteReport::new("thm28-maximum-principle", cfg, checks, rows.iter().map(|r| r[1]).collect(), Vec::new())
}

fn ext_residual(x: &Ext, y: &Ext) -> f64 {
    match (x, y) {
        (Ext::Finite(a), Ext::Finite(b)) => a.dist(b) / a.norm().max(b.norm()).max(1.0),
        (Ext::Infinity(_), Ext::Infinity(_)) => 0.0,
        _ => f64::INFINITY,
    }
}

pub(super) fn hypersphere(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 1000;
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        let w = random_word(level, rng.random_range(1..=5), &mut rng);
        let s = if rng.random_bool(0.1) {
            Hypersphere::hyperplane(&moebius::random_unit(level, &mut rng), rng.random_range(-1.0..1.0))
        } else {
            Hypersphere::sphere(&gauss(level, 0.8, &mut rng), rng.random_range(0.2..1.5))
        }
        .expect("nonempty sphere");
        let Ok(img) = w.map_hypersphere(&s) else {
            return [f64::INFINITY; 2];
        };
        let z = s.point_towards(&moebius::random_unit(level, &mut rng));
        let on_image = match w.apply_finite(&z) {
            Ext::Finite(fz) => img.relative_residual(&fz),
            Ext::Infinity(_) if img.is_hyperplane() => 0.0,
            Ext::Infinity(_) => f64::INFINITY,
        };
        let z1 = Ext::Finite(in_ball(level, 2.0, &mut rng));
        let lhs = w.apply(&symmetric_point(&z1, &s));
        let rhs = symmetric_point(&w.apply(&z1), &img);
        [on_image, ext_residual(&lhs, &rhs)]
    });
    let checks = vec![
        Check::below("image sample off the image hypersphere (relative)", worst(rows.iter().map(|r| r[0])), 1e-9),
        Check::below("symmetric points commuting square (relative)", worst(rows.iter().map(|r| r[1])), 1e-8),
    ];
    SuiteReport::new("thm33-hypersphere", cfg, checks, rows.iter().map(|r| r[0].max(r[1])).collect(), Vec::new())
}
