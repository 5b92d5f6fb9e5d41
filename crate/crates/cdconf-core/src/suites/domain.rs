use rand::Rng;

use super::{case_rng, gauss, unit_imaginary, worst, Check, SuiteConfig, SuiteReport};
use crate::algebra::CdNumber;
use crate::calculus;
use crate::domains::{self, BallAutomorphism, DomainError, FrameOp, HomogeneousNorm, NormKind, PolydiscAutomorphism};
use crate::exec::Exec;
use crate::moebius;
use crate::normal::{self, Classification, ClassifyParams, CompactGrid};

fn ball(level: u32, arity: usize) -> HomogeneousNorm {
    HomogeneousNorm { kind: NormKind::Euclidean, level, arity }
}

fn diff_norm(a: &[CdNumber], b: &[CdNumber]) -> f64 {
    domains::euclidean(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

pub(super) fn ball_automorphisms(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 1000;
    const LIMIT: f64 = 1e-9;
    // per case, worst over H and O: [|S_a(a)|, |S_a S_a z − z|, max(|S_a z| − 1, 0) flag, not pseudoconformal]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let mut r = [0.0_f64; 4];
        for level in [2, 3] {
            let norm = ball(level, 1);
            let s = BallAutomorphism::involution(norm.sample_ball(0.95, &mut rng)).expect("|a| < 1");
            let z = norm.sample_ball(0.95, &mut rng);
            let (Ok(sa), Ok(sz)) = (s.apply(&s.a), s.apply(&z)) else {
                return [f64::INFINITY; 4];
            };
            r[0] = r[0].max(domains::euclidean(&sa));
            r[2] = r[2].max(if domains::euclidean(&sz) < 1.0 { 0.0 } else { 1.0 });
            r[1] = r[1].max(s.apply(&sz).map_or(f64::INFINITY, |back| diff_norm(&back, &z)));
            let verdict = calculus::is_pseudoconformal_at(|x| s.involution_part(std::slice::from_ref(x))[0].clone(), &z[0], calculus::DEFAULT_PC_TOL);
            r[3] = r[3].max(if verdict.is_ok_and(|v| v.is_pseudoconformal()) { 0.0 } else { 1.0 });
        }
        r
    });
    let checks = vec![
        Check::below("|S_a(a)|", worst(rows.iter().map(|r| r[0])), LIMIT),
        Check::below("|S_a(S_a(z)) − z|", worst(rows.iter().map(|r| r[1])), LIMIT),
        Check::at_most("images with |S_a(z)| ≥ 1", rows.iter().map(|r| r[2]).sum(), 0.0),
        Check::at_most("points failing the similarity test", rows.iter().map(|r| r[3]).sum(), 0.0),
    ];
    SuiteReport::new(
        "thm37-ball-automorphisms",
        cfg,
        checks,
        rows.iter().map(|r| r[0].max(r[1])).collect(),
        vec!["n = 1, one H and one O trial per case".into()],
    )
}

pub(super) fn cayley_halfspace(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 1000;
    const LIMIT: f64 = 1e-10;
    // [round trip, identity, |W| ≥ 1 flag, boundary modulus]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        let m = unit_imaginary(level, &mut rng);
        let mut z = gauss(level, 2.0, &mut rng);
        let along = z.dot(&m);
        z = &z + &m.scale(along.abs() - along + rng.random_range(0.01..1.0));
        let bad = [f64::INFINITY; 4];
        let Ok(moebius::Ext::Finite(w)) = domains::cayley_to_ball(&z, &m) else {
            return bad;
        };
        let round = match domains::ball_to_halfspace(&w, &m) {
            Ok(moebius::Ext::Finite(back)) => back.dist(&z) / z.norm().max(1.0),
            _ => f64::INFINITY,
        };
        let identity = domains::halfspace_identity(&z, &m).map_or(f64::INFINITY, |(l, r)| l.dist(&r));
        let edge = &z - &m.scale(z.dot(&m));
        let boundary = match domains::cayley_to_ball(&edge, &m) {
            Ok(moebius::Ext::Finite(wb)) => (wb.norm() - 1.0).abs(),
            _ => f64::INFINITY,
        };
        [round, identity, if w.norm() < 1.0 { 0.0 } else { 1.0 }, boundary]
    });
    let checks = vec![
        Check::below("ball_to_halfspace(cayley_to_ball(z)) − z (relative)", worst(rows.iter().map(|r| r[0])), LIMIT),
        Check::below("1 − WW̃ against −4(z+M)⁻¹Re(zM)(z̃−M)⁻¹", worst(rows.iter().map(|r| r[1])), LIMIT),
        Check::at_most("half-space points mapped outside the open ball", rows.iter().map(|r| r[2]).sum(), 0.0),
        Check::below("| |W| − 1 | on the boundary", worst(rows.iter().map(|r| r[3])), LIMIT),
    ];
    SuiteReport::new("cayley-halfspace", cfg, checks, rows.iter().map(|r| worst([r[0], r[1], r[3]])).collect(), Vec::new())
}

pub(super) fn cartan(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 10;
    const SAMPLES: usize = 500;
    // [preconditions failed, max deviation, rotation not rejected]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + (i % 2) as u32;
        let norm = ball(level, 1);
        let s = BallAutomorphism::involution(norm.sample_ball(0.9, &mut rng)).expect("|a| < 1");
        let ss = |z: &[CdNumber]| s.involution_part(&s.involution_part(z));
        let base = vec![CdNumber::zero(level)];
        let samples: Vec<_> = (0..SAMPLES).map(|_| norm.sample_ball(0.95, &mut rng)).collect();
        let (pre, dev) = match domains::cartan_check(ss, &base, &samples, 1e-6, 1e-8) {
            Ok(r) => (0.0, r.max_dev),
            Err(_) => (1.0, f64::INFINITY),
        };
        let u = moebius::random_unit(level, &mut rng);
        let rot = BallAutomorphism::new(vec![CdNumber::zero(level)], vec![vec![FrameOp::Left { u }]]).expect("unit frame");
        let rejected = matches!(
            domains::cartan_check(|z| rot.apply(z).unwrap_or_else(|_| z.to_vec()), &base, &samples, 1e-6, 1e-8),
            Err(DomainError::Precondition { ref which, .. }) if which == "f'(base) = I"
        );
        [pre, dev, if rejected { 0.0 } else { 1.0 }]
    });
    let checks = vec![
        Check::at_most("S_a∘S_a failing f(0) = 0 or f'(0) = I", rows.iter().map(|r| r[0]).sum(), 0.0),
        Check::below("max |S_a(S_a(z)) − z| over 500 samples", worst(rows.iter().map(|r| r[1])), 1e-8),
        Check::at_most("rotations not rejected at the derivative precondition", rows.iter().map(|r| r[2]).sum(), 0.0),
    ];
    SuiteReport::new("cartan-uniqueness", cfg, checks, rows.iter().map(|r| r[1]).collect(), Vec::new())
}

/// Random unitary frame. Left multipliers only preserve ⟨z, a⟩ in one
/// variable, so for n ≥ 2 each coordinate gets a right multiplier alone.
fn random_unit_frame(level: u32, arity: usize, rng: &mut impl Rng) -> Vec<Vec<FrameOp>> {
    (0..arity)
        .map(|_| {
            let right = FrameOp::Right { u: moebius::random_unit(level, rng) };
            if arity == 1 {
                vec![FrameOp::Left { u: moebius::random_unit(level, rng) }, right]
            } else {
                vec![right]
            }
        })
        .collect()
}

fn random_polydisc(level: u32, n: usize, b: Vec<CdNumber>, rng: &mut impl Rng) -> PolydiscAutomorphism {
    let one = CdNumber::one(level);
    let c = (0..n)
        .map(|_| {
            let (c3, c4) = if level == 2 { (one.clone(), one.clone()) } else { (moebius::random_unit(level, rng), moebius::random_unit(level, rng)) };
            [moebius::random_unit(level, rng), moebius::random_unit(level, rng), c3, c4]
        })
        .collect();
    let mut sigma: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        sigma.swap(k, rng.random_range(0..=k));
    }
    PolydiscAutomorphism::new(b, c, sigma).expect("valid polydisc data")
}

pub(super) fn schwarz(cfg: &SuiteConfig) -> SuiteReport {
    const CASES: usize = 500;
    const SAMPLES: usize = 20;
    const TOL: f64 = 1e-9;
    // even cases: Euclidean ball, odd cases: polydisc; [violation flag, worst ratio]
    let rows = cfg.exec.map_range(CASES, |i| {
        let mut rng = case_rng(cfg.seed, i);
        let level = 2 + ((i / 2) % 2) as u32;
        if i % 2 == 0 {
            // S_{U(a)} ∘ U ∘ S_a fixes 0; over O only n = 1 has an involutive S_a
            let n = if level == 2 { 1 + (i / 4) % 2 } else { 1 };
            let norm = ball(level, n);
            let a = norm.sample_ball(0.9, &mut rng);
            let first = BallAutomorphism::new(a.clone(), random_unit_frame(level, n, &mut rng)).expect("valid");
            let Ok(image) = first.apply(&vec![CdNumber::zero(level); n]) else {
                return [1.0, f64::INFINITY];
            };
            let second = BallAutomorphism::involution(image).expect("image lies in the ball");
            let f = |z: &[CdNumber]| first.apply(z).and_then(|w| second.apply(&w)).unwrap_or_else(|_| vec![CdNumber::real(level, f64::NAN); n]);
            let samples: Vec<_> = (0..SAMPLES).map(|_| norm.sample_ball(0.99, &mut rng)).collect();
            match domains::schwarz_check(f, &norm, &norm, &samples, TOL) {
                Ok(r) => [if r.holds { 0.0 } else { 1.0 }, r.worst_ratio],
                Err(_) => [1.0, f64::INFINITY],
            }
        } else {
            let n = 1 + (i / 4) % 3;
            let norm = HomogeneousNorm { kind: NormKind::MaxPolydisc, level, arity: n };
            let first = random_polydisc(level, n, norm.sample_ball(0.9, &mut rng), &mut rng);
            let Ok(image) = first.apply(&vec![CdNumber::zero(level); n]) else {
                return [1.0, f64::INFINITY];
            };
            let one = CdNumber::one(level);
            let second = PolydiscAutomorphism::new(image, vec![[one.clone(), one.clone(), one.clone(), one]; n], (0..n).collect()).expect("valid");
            let f = |z: &[CdNumber]| first.apply(z).and_then(|w| second.apply(&w)).unwrap_or_else(|_| vec![CdNumber::real(level, f64::NAN); n]);
            let samples: Vec<_> = (0..SAMPLES).map(|_| norm.sample_ball(0.99, &mut rng)).collect();
            match domains::schwarz_check(f, &norm, &norm, &samples, TOL) {
                Ok(r) => [if r.holds { 0.0 } else { 1.0 }, r.worst_ratio],
                Err(_) => [1.0, f64::INFINITY],
            }
        }
    });
    let checks = vec![
        Check::at_most("automorphisms with ‖f(z)‖ > ‖z‖ + 1e-9 (Euclidean)", rows.iter().step_by(2).map(|r| r[0]).sum(), 0.0),
        Check::at_most("automorphisms with ‖f(z)‖ > ‖z‖ + 1e-9 (max norm)", rows.iter().skip(1).step_by(2).map(|r| r[0]).sum(), 0.0),
    ];
    let notes = vec![format!("worst ratio ‖f(z)‖/‖z‖ = {:.12}", worst(rows.iter().map(|r| r[1])))];
    SuiteReport::new("schwarz-lemma", cfg, checks, rows.iter().map(|r| r[1]).collect(), notes)
}

pub(super) fn montel(cfg: &SuiteConfig) -> SuiteReport {
    const LEN: usize = 64;
    const RESOLUTION: usize = 729;
    let params = ClassifyParams::default();
    let grid = CompactGrid::ball(2, 1.0, RESOLUTION).expect("valid grid");
    let classify = |family: Vec<normal::Affine>, exec: Exec| {
        let maps: Vec<_> = family.iter().map(|f| f.map()).collect();
        normal::classify_sequence(&maps, &grid, &params, exec)
    };
    let mut rng = case_rng(cfg.seed, 0);
    let bounded = classify(normal::bounded_affine_family(2, LEN, &mut rng), cfg.exec);
    let mut rng = case_rng(cfg.seed, 1);
    let iid = classify(normal::iid_affine_family(2, LEN, &mut rng), cfg.exec);
    let describe = |c: &Result<Classification, _>| match c {
        Ok(Classification::Extracted { indices, diameter }) => format!("Extracted {} maps, diameter {diameter:.3e}", indices.len()),
        Ok(Classification::ConvergesTo { diameter, .. }) => format!("ConvergesTo, tail diameter {diameter:.3e}"),
        Ok(Classification::DivergesToInfinity { min_modulus }) => format!("DivergesToInfinity, min modulus {min_modulus:.3e}"),
        Ok(Classification::NotNormalEvidence { witness, rho }) => format!("NotNormalEvidence, closest pair {witness:?} at ρ = {rho:.3e}"),
        Err(e) => format!("error: {e}"),
    };
    let (diameter, length) = match &bounded {
        Ok(Classification::Extracted { indices, diameter }) => (*diameter, indices.len() as f64),
        _ => (f64::INFINITY, 0.0),
    };
    let checks = vec![
        Check::at_most("extracted subsequence ρ-diameter", diameter, params.tol),
        Check::at_least("extracted subsequence length", length, params.min_chain as f64),
    ];
    let notes = vec![
        format!("bounded family (4 anchors, perturbation 2^(-k/3)): {}", describe(&bounded)),
        format!("i.i.d. family |a|,|b| ≤ 2, |c| ≤ 1: {}", describe(&iid)),
        format!("{RESOLUTION} grid nodes in the unit ball of H, {LEN} maps"),
    ];
    SuiteReport::new("thm13-montel", cfg, checks, vec![diameter], notes)
}
