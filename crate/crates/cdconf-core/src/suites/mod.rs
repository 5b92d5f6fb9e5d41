//! Seeded acceptance suites.
//!
//! Case `k` of a suite draws from `ChaCha8Rng::seed_from_u64(seed)` switched
//! to stream `k`, so cases are independent of each other and of the
//! execution strategy.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::algebra::CdNumber;
use crate::exec::Exec;
use crate::moebius::{self, Generator, MoebiusWord};

mod analytic;
mod domain;
mod structure;

pub use analytic::random_z_phrase;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 7, exec: Exec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < limit`.
    pub fn below(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { label: label.into(), value, limit, passed: value < limit }
    }

    /// Passes when `value ≥ limit`.
    pub fn at_least(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { label: label.into(), value, limit, passed: value >= limit }
    }

    /// Passes when `value ≤ limit`.
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { label: label.into(), value, limit, passed: value <= limit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Worst residual of each case, relative to its limit where a case
    /// mixes several checks.
    pub case_residuals: Vec<f64>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, cfg: &SuiteConfig, checks: Vec<Check>, case_residuals: Vec<f64>, notes: Vec<String>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        SuiteReport { name, seed: cfg.seed, cases: case_residuals.len(), passed, checks, case_residuals, notes }
    }

    /// One line per check.
    pub fn table(&self) -> String {
        let mut out = format!("{} (seed {}, {} cases): {}\n", self.name, self.seed, self.cases, if self.passed { "PASS" } else { "FAIL" });
        for c in &self.checks {
            out += &format!("  {:<4} {:<48} {:>12.3e}  limit {:.1e}\n", if c.passed { "ok" } else { "FAIL" }, c.label, c.value, c.limit);
        }
        out
    }
}

pub struct SuiteInfo {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub anchor: &'static str,
    run: fn(&SuiteConfig) -> SuiteReport,
}

impl SuiteInfo {
    pub fn run(&self, cfg: &SuiteConfig) -> SuiteReport {
        (self.run)(cfg)
    }
}

impl Serialize for SuiteInfo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SuiteInfo", 3)?;
        st.serialize_field("name", self.name)?;
        st.serialize_field("aliases", self.aliases)?;
        st.serialize_field("anchor", self.anchor)?;
        st.end()
    }
}

pub static SUITES: [SuiteInfo; 14] = [
    SuiteInfo {
        name: "algebra-laws",
        aliases: &[],
        anchor: "alternativity, norm multiplicativity, conjugation, doubling against the split octonion products",
        run: structure::algebra_laws,
    },
    SuiteInfo {
        name: "thm4-quaternion-factorization",
        aliases: &[],
        anchor: "quaternion similarity Jacobians factor as h ↦ λ a h b",
        run: structure::quaternion_factorization,
    },
    SuiteInfo {
        name: "thm5-givens-factorization",
        aliases: &[],
        anchor: "octonion similarity Jacobians factor through Givens generators",
        run: structure::givens_factorization,
    },
    SuiteInfo {
        name: "thm6-composition-closure",
        aliases: &[],
        anchor: "compositions of pseudoconformal words stay pseudoconformal with multiplicative scale",
        run: structure::composition_closure,
    },
    SuiteInfo {
        name: "thm17-antiderive-roundtrip",
        aliases: &["thm18-line-integral"],
        anchor: "symbolic antiderivatives and the line-integral operator",
        run: analytic::antiderive_roundtrip,
    },
    SuiteInfo {
        name: "thm23-argument-principle",
        aliases: &["thm24-rouche"],
        anchor: "argument principle zero counts and Rouché equality",
        run: analytic::argument_principle,
    },
    SuiteInfo { name: "thm28-maximum-principle", aliases: &[], anchor: "maximum modulus on discs avoiding poles", run: analytic::maximum_principle },
    SuiteInfo {
        name: "thm33-hypersphere",
        aliases: &["thm35-symmetry"],
        anchor: "hyperspheres map to hyperspheres and symmetric points stay symmetric",
        run: analytic::hypersphere,
    },
    SuiteInfo { name: "thm37-ball-automorphisms", aliases: &[], anchor: "ball involutions S_a over H and O", run: domain::ball_automorphisms },
    SuiteInfo { name: "cayley-halfspace", aliases: &[], anchor: "Cayley transform between the half-space and the unit ball", run: domain::cayley_halfspace },
    SuiteInfo { name: "cartan-uniqueness", aliases: &[], anchor: "a self-map fixing a point with identity derivative is the identity", run: domain::cartan },
    SuiteInfo { name: "schwarz-lemma", aliases: &[], anchor: "automorphisms fixing 0 do not increase homogeneous norms", run: domain::schwarz },
    SuiteInfo { name: "thm13-montel", aliases: &[], anchor: "uniformly bounded affine families admit ρ-Cauchy subsequences", run: domain::montel },
    SuiteInfo {
        name: "finite-difference-jacobians",
        aliases: &[],
        anchor: "central differences converge to analytic derivative operators at second order",
        run: structure::finite_differences,
    },
];

pub fn find(name: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name || s.aliases.contains(&name))
}

pub fn run(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    find(name).map(|s| s.run(cfg))
}

pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub(crate) fn gauss(level: u32, scale: f64, rng: &mut impl Rng) -> CdNumber {
    CdNumber::new((0..1usize << level).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()).expect("valid level")
}

/// Standard Gaussian element of A_r.
pub fn random_point(level: u32, rng: &mut impl Rng) -> CdNumber {
    gauss(level, 1.0, rng)
}

pub(crate) fn unit_imaginary(level: u32, rng: &mut impl Rng) -> CdNumber {
    let mut v = gauss(level, 1.0, rng).im();
    while v.norm() < 1e-3 {
        v = gauss(level, 1.0, rng).im();
    }
    v.scale(1.0 / v.norm())
}

/// Uniform point of the ball of radius `r` in A_r.
pub(crate) fn in_ball(level: u32, r: f64, rng: &mut impl Rng) -> CdNumber {
    let d = 1usize << level;
    let g = gauss(level, 1.0, rng);
    let n = g.norm().max(1e-300);
    g.scale(r * rng.random::<f64>().powf(1.0 / d as f64) / n)
}

/// Random word of `len` generators: shifts, inversions, and two-sided
/// multiplications (H) or Givens rotations (O).
pub fn random_word(level: u32, len: usize, rng: &mut impl Rng) -> MoebiusWord {
    let gens = (0..len)
        .map(|_| match rng.random_range(0..3) {
            0 => Generator::Shift { c: gauss(level, 0.7, rng) },
            1 => Generator::Inv,
            _ if level == 2 => {
                let a = moebius::random_unit(2, rng).scale(rng.random_range(0.5..2.0));
                let b = moebius::random_unit(2, rng).scale(rng.random_range(0.5..2.0));
                Generator::MulQ { a, b }
            }
            _ => {
                let k = rng.random_range(1..4);
                let angles = (0..k)
                    .map(|_| {
                        let a = rng.random_range(0..7);
                        (a, rng.random_range(a + 1..8), rng.random_range(-3.0..3.0))
                    })
                    .collect();
                Generator::RotO { angles }
            }
        })
        .collect();
    MoebiusWord::new(level, gens).expect("generated generators are valid")
}

/// Maximum of finite values, NaN-poisoned.
pub(crate) fn worst(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m: f64, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let mut names: Vec<&str> = SUITES.iter().flat_map(|s| std::iter::once(s.name).chain(s.aliases.iter().copied())).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
        assert!(find("thm35-symmetry").is_some_and(|s| s.name == "thm33-hypersphere"));
    }

    #[test]
    fn case_streams_differ() {
        let a: f64 = case_rng(1, 0).random();
        let b: f64 = case_rng(1, 1).random();
        let c: f64 = case_rng(1, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
