use nalgebra::DMatrix;
use rand::Rng;

use super::{case_rng, gauss, in_ball, random_word, worst, Check, SuiteConfig, SuiteReport};
use crate::algebra::{doubling_product, oct_split, proj, CdNumber};
use crate::calculus::{self, factor_octonion_givens, factor_quaternion, jacobian, RealJacobian};
use crate::linalg::{self, matrix_of};
use crate::moebius::{self, Generator, MoebiusWord};

pub(super) fn algebra_laws(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 10_000;
    const LIMIT: f64 = 1e-11;
    // [left alt, right alt, norm, conj, doubling, split, proj]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let mut r = [0.0_f64; 7];
        for level in [2, 3] {
            let (x, y) = (gauss(level, 1.0, &mut rng), gauss(level, 1.0, &mut rng));
            let xy = &x * &y;
            let xx = &x * &x;
            r[0] = r[0].max((&x * &xy).dist(&(&xx * &y)));
            r[1] = r[1].max((&(&y * &x) * &x).dist(&(&y * &xx)));
            r[2] = r[2].max((xy.norm() - x.norm() * y.norm()).abs());
            r[3] = r[3].max(xy.conj().dist(&(&y.conj() * &x.conj())));
            r[4] = r[4].max(xy.dist(&doubling_product(&x, &y).expect("same level")));
            r[6] = r[6].max((0..x.dim()).map(|j| (proj(j, &x).expect("in range") - x.coeffs()[j]).abs()).fold(0.0, f64::max));
        }
        let (a, b) = (gauss(2, 1.0, &mut rng), gauss(2, 1.0, &mut rng));
        let (z0, zl) = (gauss(2, 1.0, &mut rng), gauss(2, 1.0, &mut rng));
        let z = oct_split::join(&z0, &zl);
        let l = CdNumber::basis(3, 4);
        let zero = CdNumber::zero(2);
        let (ao, bo) = (oct_split::join(&a, &zero), oct_split::join(&b, &zero));
        let (al, bl) = (&ao * &l, &bo * &l);
        let split = [
            (&(&ao * &z) * &bo).dist(&oct_split::product_i(&a, &z0, &zl, &b)),
            (&(&al * &z) * &bl).dist(&oct_split::product_ii(&a, &z0, &zl, &b)),
            (&(&ao * &z) * &bl).dist(&oct_split::product_iii(&a, &z0, &zl, &b)),
            (&(&al * &z) * &bo).dist(&oct_split::product_iv(&a, &z0, &zl, &b)),
        ];
        let w = gauss(3, 1.0, &mut rng);
        r[5] = worst(split).max(oct_split::product(&z, &w).dist(&(&z * &w)));
        r
    });
    let labels = [
        "left alternativity x(xy) = (xx)y",
        "right alternativity (yx)x = y(xx)",
        "norm multiplicativity |xy| = |x||y|",
        "conjugation reverses products",
        "table product equals recursive doubling",
        "split octonion products (i)-(iv)",
        "coefficients recovered from generator products",
    ];
    let checks = labels.iter().enumerate().map(|(k, l)| Check::below(*l, worst(rows.iter().map(|r| r[k])), LIMIT)).collect();
    let per_case = rows.iter().map(|r| worst(r.iter().copied())).collect();
    SuiteReport::new("algebra-laws", cfg, checks, per_case, vec!["10^4 pairs in each of H and O".into()])
}

fn log_uniform(lo: f64, hi: f64, rng: &mut impl Rng) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

pub(super) fn quaternion_factorization(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 1000;
    const LIMIT: f64 = 1e-7;
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let (a, b) = (moebius::random_unit(2, &mut rng), moebius::random_unit(2, &mut rng));
        let lambda = log_uniform(0.1, 10.0, &mut rng);
        let z = gauss(2, 1.0, &mut rng);
        let analytic = matrix_of(2, |h| (&(&a * h) * &b).scale(lambda));
        let Ok(j) = jacobian(|x| (&(&a * x) * &b).scale(lambda), &z, calculus::DEFAULT_STEP) else {
            return [f64::INFINITY; 4];
        };
        let Ok(f) = factor_quaternion(&j) else {
            return [f64::INFINITY; 4];
        };
        let recon = linalg::max_abs(&(f.matrix() - &analytic));
        let factors = ((f.a.dist(&a) + f.b.dist(&b)).min(f.a.dist(&-&a) + f.b.dist(&-&b))).max((f.lambda - lambda).abs() / lambda);
        // (s, t) reproduces the map iff s = t
        let mut kernel_violation = 0.0_f64;
        for s in [1.0, -1.0] {
            for t in [1.0, -1.0] {
                let e = linalg::max_abs(&(matrix_of(2, |h| (&(&f.a.scale(s) * h) * &f.b.scale(t)).scale(f.lambda)) - &analytic));
                let ok = if s == t { e < LIMIT } else { e > lambda };
                if !ok {
                    kernel_violation = 1.0;
                }
            }
        }
        [recon, factors, kernel_violation, f.lambda]
    });
    let checks = vec![
        Check::below("reconstruction sup-error", worst(rows.iter().map(|r| r[0])), LIMIT),
        Check::below("recovered (a, b, λ) up to joint sign", worst(rows.iter().map(|r| r[1])), LIMIT),
        Check::at_most("sign pairs outside {(1,1),(-1,-1)} accepted", rows.iter().map(|r| r[2]).sum(), 0.0),
    ];
    SuiteReport::new("thm4-quaternion-factorization", cfg, checks, rows.iter().map(|r| r[0].max(r[1])).collect(), Vec::new())
}

fn random_rotation(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

pub(super) fn givens_factorization(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 100;
    const LIMIT: f64 = 1e-8;
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let lambda = log_uniform(0.1, 10.0, &mut rng);
        let m = random_rotation(8, &mut rng) * lambda;
        let Ok(j) = RealJacobian::new(3, m.clone()) else {
            return [f64::INFINITY; 2];
        };
        match factor_octonion_givens(&j) {
            Ok(f) => [linalg::max_abs(&(f.matrix() - &m)) / lambda, f.angles.len() as f64],
            Err(_) => [f64::INFINITY; 2],
        }
    });
    let checks = vec![
        Check::below("reconstruction sup-error / λ", worst(rows.iter().map(|r| r[0])), LIMIT),
        Check::at_most("angles used", worst(rows.iter().map(|r| r[1])), 28.0),
    ];
    SuiteReport::new("thm5-givens-factorization", cfg, checks, rows.iter().map(|r| r[0]).collect(), Vec::new())
}

/// `Some(z)` when the orbit of `z` stays bounded and meets every inversion
/// at modulus at least `min_inv`.
fn well_conditioned(w: &MoebiusWord, z: &CdNumber, min_inv: f64, max_abs: f64) -> bool {
    let mut cur = z.clone();
    for g in w.generators() {
        if matches!(g, Generator::Inv) && cur.norm() < min_inv {
            return false;
        }
        match g.apply(&crate::moebius::Ext::Finite(cur), w.level()).finite() {
            Some(next) if next.norm() <= max_abs => cur = next.clone(),
            _ => return false,
        }
    }
    true
}

pub(super) fn composition_closure(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 200;
    const LIMIT: f64 = 1e-6;
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        loop {
            let w1 = random_word(level, rng.random_range(1..5), &mut rng);
            let w2 = random_word(level, rng.random_range(1..5), &mut rng);
            let w = w1.compose(&w2).expect("same level");
            let Some(z) = (0..50).map(|_| in_ball(level, 1.5, &mut rng)).find(|z| well_conditioned(&w, z, 0.25, 20.0)) else {
                continue;
            };
            let expected = w1.scale_at(&z).zip(w1.apply_finite(&z).finite().and_then(|y| w2.scale_at(y))).map(|(a, b)| a * b);
            let verdict = calculus::is_pseudoconformal_at(|x| w.eval(x), &z, calculus::DEFAULT_PC_TOL);
            return match (verdict, expected) {
                (Ok(v), Some(e)) if v.is_pseudoconformal() => [0.0, (v.lambda().unwrap_or(f64::NAN) - e).abs() / e],
                _ => [1.0, f64::INFINITY],
            };
        }
    });
    let checks = vec![
        Check::at_most("compositions failing the similarity test", rows.iter().map(|r| r[0]).sum(), 0.0),
        Check::below("λ(g∘f) vs λ_g·λ_f relative", worst(rows.iter().map(|r| r[1])), LIMIT),
    ];
    SuiteReport::new("thm6-composition-closure", cfg, checks, rows.iter().map(|r| r[1]).collect(), Vec::new())
}

pub(super) fn finite_differences(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 100;
    const STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
    type Map = fn(&CdNumber, &CdNumber, &CdNumber) -> CdNumber;
    type Op = fn(&CdNumber, &CdNumber, &CdNumber, &CdNumber) -> CdNumber;
    let maps: [(&str, Map, Op); 4] = [
        ("z^2", |z, _, _| z * z, |z, h, _, _| &(z * h) + &(h * z)),
        ("z^3", |z, _, _| &(z * z) * z, |z, h, _, _| &(&(&(z * z) * h) + &(&(z * h) * z)) + &(h * &(z * z))),
        ("a z b", |z, a, b| &(a * z) * b, |_, h, a, b| &(a * h) * b),
        (
            "z^-1",
            |z, _, _| z.inv().expect("nonzero"),
            |z, h, _, _| {
                let w = z.inv().expect("nonzero");
                -&(&(&w * h) * &w)
            },
        ),
    ];
    // per case: [ratio to 10 step² (max), observed order of z^-1, observed order of z^3]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        let u = moebius::random_unit(level, &mut rng);
        let z = u.scale(rng.random_range(0.8..2.0));
        let (a, b) = (gauss(level, 1.0, &mut rng), gauss(level, 1.0, &mut rng));
        let mut ratio = 0.0_f64;
        let mut orders = [f64::INFINITY; 2];
        for (name, f, op) in maps {
            let analytic = matrix_of(level, |h| op(&z, h, &a, &b));
            let errs: Vec<f64> = STEPS
                .iter()
                .map(|&s| match jacobian(|x| f(x, &a, &b), &z, s) {
                    Ok(j) => linalg::max_abs(&(&j.matrix - &analytic)),
                    Err(_) => f64::INFINITY,
                })
                .collect();
            for (e, s) in errs.iter().zip(STEPS) {
                ratio = ratio.max(e / (10.0 * s * s));
            }
            let order = (errs[0] / errs[1]).log10();
            match name {
                "z^-1" => orders[0] = order,
                "z^3" => orders[1] = order,
                _ => {}
            }
        }
        [ratio, orders[0], orders[1]]
    });
    let min_order = |k: usize| rows.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::at_most("max error / (10 step²)", worst(rows.iter().map(|r| r[0])), 1.0),
        Check::at_least("observed order for z^-1, steps 1e-3 → 1e-4", min_order(1), 1.8),
        Check::at_least("observed order for z^3, steps 1e-3 → 1e-4", min_order(2), 1.8),
    ];
    SuiteReport::new("finite-difference-jacobians", cfg, checks, rows.iter().map(|r| r[0]).collect(), vec![format!("steps {STEPS:?}")])
}
