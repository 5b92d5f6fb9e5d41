use cdconf_core::algebra::{self, CdNumber};
use cdconf_core::moebius::{Ext, Generator, MoebiusWord};
use cdconf_core::normal::{self, CompactGrid};
use cdconf_core::phrase::{self, PhraseMetricParams, Side};
use cdconf_core::suites::{self, case_rng, SuiteConfig};
use cdconf_core::Exec;
use proptest::prelude::*;

fn cd(level: u32) -> impl Strategy<Value = CdNumber> {
    prop::collection::vec(-2.0..2.0f64, 1usize << level).prop_map(|c| CdNumber::new(c).unwrap())
}

fn cd_pair() -> impl Strategy<Value = (CdNumber, CdNumber)> {
    (2u32..=3).prop_flat_map(|l| (cd(l), cd(l)))
}

proptest! {
    #[test]
    fn norm_is_multiplicative((x, y) in cd_pair()) {
        let lhs = (&x * &y).norm();
        prop_assert!((lhs - x.norm() * y.norm()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn alternative_laws((x, y) in cd_pair()) {
        let scale = 1.0 + x.norm().powi(2) * y.norm();
        prop_assert!((&x * &(&x * &y)).dist(&(&(&x * &x) * &y)) <= 1e-12 * scale);
        prop_assert!((&(&y * &x) * &x).dist(&(&y * &(&x * &x))) <= 1e-12 * scale);
    }

    #[test]
    fn conjugation_reverses_products((x, y) in cd_pair()) {
        let lhs = (&x * &y).conj();
        let rhs = &y.conj() * &x.conj();
        prop_assert!(lhs.dist(&rhs) <= 1e-12 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn doubling_formula_matches_table((x, y) in cd_pair()) {
        let table = algebra::mul(&x, &y).unwrap();
        let doubled = algebra::doubling_product(&x, &y).unwrap();
        prop_assert!(table.dist(&doubled) <= 1e-12 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn inverse_is_two_sided(x in (2u32..=3).prop_flat_map(cd)) {
        prop_assume!(x.norm() > 1e-3);
        let inv = x.inv().unwrap();
        let one = CdNumber::one(x.level());
        prop_assert!((&x * &inv).dist(&one) < 1e-10);
        prop_assert!((&inv * &x).dist(&one) < 1e-10);
    }

    #[test]
    fn exp_of_log_round_trips(x in (2u32..=3).prop_flat_map(cd)) {
        prop_assume!(x.norm() > 1e-3 && x.im().norm() > 1e-6);
        let back = x.ln_principal().unwrap().exp();
        prop_assert!(back.dist(&x) < 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn word_then_inverse_is_identity(seed in any::<u64>(), level in 2u32..=3, z in cd(2)) {
        let mut rng = case_rng(seed, 0);
        let w = suites::random_word(level, 4, &mut rng);
        let z = if level == 2 { z } else { CdNumber::new([z.coeffs(), &[0.0; 4][..]].concat()).unwrap() };
        let back = w.compose(&w.inverse()).unwrap().apply(&Ext::from(z.clone()));
        if let Some(b) = back.finite() {
            prop_assert!(b.dist(&z) < 1e-6 * (1.0 + z.norm()));
        }
    }
}

fn phrase_cases(n: usize) -> impl Iterator<Item = phrase::Phrase> {
    (0..n).map(|i| suites::random_z_phrase(2 + (i % 2) as u32, &mut case_rng(11, i)))
}

#[test]
fn render_parse_round_trip() {
    for p in phrase_cases(200) {
        let text = p.render();
        assert_eq!(phrase::parse(&text, p.level()).unwrap(), p, "{text}");
    }
}

#[test]
fn normalization_is_idempotent() {
    for p in phrase_cases(200) {
        let terms = p.words().iter().map(|w| (w.coeff.clone(), w.tree.clone())).collect();
        assert_eq!(phrase::Phrase::from_terms(p.level(), terms).unwrap(), p);
    }
}

#[test]
fn phrase_metric_axioms() {
    let params = PhraseMetricParams::default();
    let ps: Vec<_> = phrase_cases(40).filter(|p| p.level() == 2).collect();
    for a in &ps {
        assert_eq!(phrase::phrase_distance(a, a, &params), 0.0);
        for b in &ps {
            let d = phrase::phrase_distance(a, b, &params);
            assert_eq!(d, phrase::phrase_distance(b, a, &params));
            assert_eq!(d > 0.0, a != b);
        }
    }
}

#[test]
fn antiderivatives_differentiate_back() {
    for p in phrase_cases(100) {
        for side in [Side::Left, Side::Right] {
            let mu = phrase::antiderive(&phrase::derivative_at_one(&p).unwrap(), side).unwrap();
            assert_eq!(phrase::derivative_at_one(&mu).unwrap(), phrase::derivative_at_one(&p).unwrap());
        }
    }
}

// Left and Right antiderivatives of z a z differ by a nonconstant phrase.
#[test]
fn left_right_antiderivatives_differ_by_nonconstant() {
    let p = phrase::parse("z [0,0,1,0] z", 2).unwrap();
    let left = phrase::antiderive(&p, Side::Left).unwrap();
    let right = phrase::antiderive(&p, Side::Right).unwrap();
    let diff = left.sub(&right).unwrap();
    let at = |z: &CdNumber| diff.eval(z, None).unwrap();
    let i1 = CdNumber::basis(2, 1);
    let want = CdNumber::basis(2, 3).scale(4.0 / 3.0);
    assert!(at(&i1).dist(&want) < 1e-12, "{}", at(&i1));
    assert!(at(&CdNumber::zero(2)).norm() < 1e-15);
}

#[test]
fn rho_is_a_pseudometric_and_grows_with_the_grid() {
    let grid = CompactGrid::ball(2, 1.0, 81).unwrap();
    let fine = grid.refine(243).unwrap();
    let family = normal::iid_affine_family(2, 6, &mut case_rng(5, 0));
    let maps: Vec<_> = family.iter().map(|f| f.map()).collect();
    let sample = |g: &CompactGrid| maps.iter().map(|f| normal::Sampled::new(f, g, Exec::Parallel).unwrap()).collect::<Vec<_>>();
    let (coarse_s, fine_s) = (sample(&grid), sample(&fine));
    for (i, a) in coarse_s.iter().enumerate() {
        assert_eq!(normal::rho_sampled(a, a), 0.0);
        for (j, b) in coarse_s.iter().enumerate() {
            let ab = normal::rho_sampled(a, b);
            assert!((ab - normal::rho_sampled(b, a)).abs() < 1e-12);
            assert!(normal::rho_sampled(&fine_s[i], &fine_s[j]) >= ab - 1e-12);
            for c in &coarse_s {
                assert!(normal::rho_sampled(a, c) <= ab + normal::rho_sampled(b, c) + 1e-9);
            }
        }
    }
}

#[test]
fn strategies_produce_identical_reports() {
    for name in ["algebra-laws", "thm37-ball-automorphisms", "schwarz-lemma", "thm33-hypersphere"] {
        let seq = suites::run(name, &SuiteConfig { seed: 3, exec: Exec::Sequential }).unwrap();
        let par = suites::run(name, &SuiteConfig { seed: 3, exec: Exec::Parallel }).unwrap();
        assert_eq!(seq, par, "{name}");
    }
}

#[test]
fn generators_invert() {
    let z = CdNumber::new(vec![0.3, -0.4, 0.1, 0.7]).unwrap();
    let w = MoebiusWord::new(2, vec![Generator::Shift { c: CdNumber::real(2, 1.5) }, Generator::Inv]).unwrap();
    assert!(w.inverse().eval(&w.eval(&z)).dist(&z) < 1e-12);
}

proptest! {
    // beyond the octonions only power-associativity and flexibility survive
    #[test]
    fn higher_levels_are_flexible(level in 4u32..=5, seed in any::<u64>()) {
        let mut rng = case_rng(seed, 1);
        let x = cdconf_core::suites::random_point(level, &mut rng);
        let y = cdconf_core::suites::random_point(level, &mut rng);
        let scale = 1.0 + x.norm().powi(2) * y.norm();
        prop_assert!((&(&x * &y) * &x).dist(&(&x * &(&y * &x))) <= 1e-12 * scale);
        prop_assert!((&x * &(&x * &x)).dist(&(&(&x * &x) * &x)) <= 1e-12 * scale);
    }
}
