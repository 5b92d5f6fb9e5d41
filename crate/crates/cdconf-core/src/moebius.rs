//! Words in shifts, inversion, two-sided multiplication (H) and Givens
//! rotations (O), acting on the one-point compactification, together with
//! their action on hyperspheres `E|z|² + 2⟨J, z⟩ + D = 0`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::CdNumber;
use crate::calculus::apply_givens;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("expected level {expected}, found {found}")]
    LevelMismatch { expected: u32, found: u32 },
    #[error("invalid generator: {0}")]
    BadGenerator(String),
    #[error("empty hypersphere: {0}")]
    EmptySphere(String),
    #[error("outside the domain: {0}")]
    Domain(String),
}

/// Point of A_r ∪ {∞}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ext {
    Finite(CdNumber),
    Infinity(Inf),
}

/// Serializes as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inf;

impl Serialize for Inf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("inf")
    }
}

impl<'de> Deserialize<'de> for Inf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            Ok(Inf)
        } else {
            Err(serde::de::Error::custom("expected \"inf\""))
        }
    }
}

impl Ext {
    pub const INF: Ext = Ext::Infinity(Inf);

    pub fn finite(&self) -> Option<&CdNumber> {
        match self {
            Ext::Finite(z) => Some(z),
            Ext::Infinity(_) => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinity(_))
    }

    /// Finite value, or a vector of infinities for ∞.
    pub fn into_lossy(self, level: u32) -> CdNumber {
        match self {
            Ext::Finite(z) => z,
            Ext::Infinity(_) => CdNumber::new(vec![f64::INFINITY; 1 << level]).expect("valid level"),
        }
    }
}

impl From<CdNumber> for Ext {
    fn from(z: CdNumber) -> Self {
        Ext::Finite(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Generator {
    Shift {
        c: CdNumber,
    },
    Inv,
    #[serde(rename = "mulq")]
    MulQ {
        a: CdNumber,
        b: CdNumber,
    },
    #[serde(rename = "roto")]
    RotO {
        angles: Vec<(usize, usize, f64)>,
    },
}

impl Generator {
    fn check(&self, level: u32) -> Result<(), MoebiusError> {
        let same = |z: &CdNumber| {
            if z.level() == level {
                Ok(())
            } else {
                Err(MoebiusError::LevelMismatch { expected: level, found: z.level() })
            }
        };
        match self {
            Generator::Shift { c } => same(c),
            Generator::Inv => Ok(()),
            Generator::MulQ { a, b } => {
                if level != 2 {
                    return Err(MoebiusError::BadGenerator("mulq acts over the quaternions only".into()));
                }
                same(a)?;
                same(b)?;
                if a.norm() == 0.0 || b.norm() == 0.0 {
                    return Err(MoebiusError::BadGenerator("mulq needs nonzero a and b".into()));
                }
                Ok(())
            }
            Generator::RotO { angles } => {
                if level != 3 {
                    return Err(MoebiusError::BadGenerator("roto acts over the octonions only".into()));
                }
                match angles.iter().find(|&&(k, m, t)| !(k < m && m < 8 && t.is_finite())) {
                    Some(bad) => Err(MoebiusError::BadGenerator(format!("bad rotation plane {bad:?}"))),
                    None => Ok(()),
                }
            }
        }
    }

    pub fn apply(&self, z: &Ext, level: u32) -> Ext {
        let Ext::Finite(z) = z else {
            return match self {
                Generator::Inv => Ext::Finite(CdNumber::zero(level)),
                _ => Ext::INF,
            };
        };
        match self {
            Generator::Shift { c } => Ext::Finite(z + c),
            Generator::Inv => match z.inv() {
                Ok(w) => Ext::Finite(w),
                Err(_) => Ext::INF,
            },
            Generator::MulQ { a, b } => Ext::Finite(&(a * z) * b),
            Generator::RotO { angles } => Ext::Finite(apply_givens(angles, z)),
        }
    }

    fn level_hint(&self) -> Option<u32> {
        match self {
            Generator::Shift { c } => Some(c.level()),
            Generator::MulQ { a, .. } => Some(a.level()),
            Generator::RotO { .. } => Some(3),
            Generator::Inv => None,
        }
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Shift { c } => Generator::Shift { c: -c },
            Generator::Inv => Generator::Inv,
            Generator::MulQ { a, b } => Generator::MulQ { a: a.inv().expect("checked nonzero"), b: b.inv().expect("checked nonzero") },
            Generator::RotO { angles } => Generator::RotO { angles: angles.iter().rev().map(|&(k, m, t)| (k, m, -t)).collect() },
        }
    }

    /// Similarity ratio of the derivative at a finite, non-singular point.
    pub fn scale_at(&self, z: &CdNumber) -> f64 {
        match self {
            Generator::Shift { .. } | Generator::RotO { .. } => 1.0,
            Generator::Inv => 1.0 / z.norm_sqr(),
            Generator::MulQ { a, b } => a.norm() * b.norm(),
        }
    }

    pub fn map_hypersphere(&self, s: &Hypersphere) -> Hypersphere {
        let (e, j, d) = (s.e, &s.j, s.d);
        let raw = match self {
            Generator::Inv => Hypersphere { e: d, j: j.conj(), d: e },
            Generator::Shift { c } => Hypersphere { e, j: j - &c.scale(e), d: d + e * c.norm_sqr() - 2.0 * j.dot(c) },
            Generator::MulQ { a, b } => Hypersphere { e, j: &(a * j) * b, d: d * a.norm_sqr() * b.norm_sqr() },
            Generator::RotO { angles } => Hypersphere { e, j: apply_givens(angles, j), d },
        };
        raw.normalized()
    }
}

/// Generators applied first to last.
#[derive(Debug, Clone, PartialEq)]
pub struct MoebiusWord {
    level: u32,
    gens: Vec<Generator>,
}

impl MoebiusWord {
    pub fn new(level: u32, gens: Vec<Generator>) -> Result<Self, MoebiusError> {
        if !(crate::algebra::MIN_LEVEL..=crate::algebra::MAX_LEVEL).contains(&level) {
            return Err(MoebiusError::BadGenerator(format!("unsupported level {level}")));
        }
        for g in &gens {
            g.check(level)?;
        }
        Ok(MoebiusWord { level, gens })
    }

    pub fn identity(level: u32) -> Self {
        MoebiusWord { level, gens: Vec::new() }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn apply(&self, z: &Ext) -> Ext {
        let mut cur = z.clone();
        for g in &self.gens {
            cur = g.apply(&cur, self.level);
        }
        cur
    }

    pub fn apply_finite(&self, z: &CdNumber) -> Ext {
        self.apply(&Ext::Finite(z.clone()))
    }

    /// Value with ∞ encoded as infinite coefficients.
    pub fn eval(&self, z: &CdNumber) -> CdNumber {
        self.apply_finite(z).into_lossy(self.level)
    }

    /// `self` first, then `then`.
    pub fn compose(&self, then: &MoebiusWord) -> Result<MoebiusWord, MoebiusError> {
        if self.level != then.level {
            return Err(MoebiusError::LevelMismatch { expected: self.level, found: then.level });
        }
        let mut gens = self.gens.clone();
        gens.extend(then.gens.iter().cloned());
        Ok(MoebiusWord { level: self.level, gens })
    }

    pub fn inverse(&self) -> MoebiusWord {
        MoebiusWord { level: self.level, gens: self.gens.iter().rev().map(Generator::inverse).collect() }
    }

    /// Product of generator scales along the orbit of `z`; `None` if the
    /// orbit meets 0 before an inversion or ∞.
    pub fn scale_at(&self, z: &CdNumber) -> Option<f64> {
        let mut cur = z.clone();
        let mut lambda = 1.0;
        for g in &self.gens {
            if matches!(g, Generator::Inv) && cur.norm_sqr() == 0.0 {
                return None;
            }
            lambda *= g.scale_at(&cur);
            cur = g.apply(&Ext::Finite(cur), self.level).finite()?.clone();
        }
        Some(lambda)
    }

    pub fn map_hypersphere(&self, s: &Hypersphere) -> Result<Hypersphere, MoebiusError> {
        if s.j.level() != self.level {
            return Err(MoebiusError::LevelMismatch { expected: self.level, found: s.j.level() });
        }
        s.check()?;
        let out = self.gens.iter().fold(s.normalized(), |acc, g| g.map_hypersphere(&acc));
        assert!(out.check().is_ok(), "hypersphere image degenerated: {out:?}");
        Ok(out)
    }

    /// Smallest distance from a preimage of a point on the sphere of radius
    /// `λ r / 2` about `f(z)` back to `z`, relative to `r`; below 1 means the
    /// image ball sits inside `f(B(z, r))` at that sample.
    pub fn open_mapping_spot_check<R: Rng>(&self, z: &CdNumber, r: f64, samples: usize, rng: &mut R) -> Option<f64> {
        let lambda = self.scale_at(z)?;
        let fz = self.apply_finite(z).finite()?.clone();
        let inv = self.inverse();
        let rho = 0.5 * lambda * r;
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let dir = random_unit(self.level, rng);
            let y = &fz + &dir.scale(rho);
            let x = inv.apply_finite(&y).finite()?.clone();
            worst = worst.max(x.dist(z) / r);
        }
        Some(worst)
    }
}

impl Serialize for MoebiusWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.gens.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusWord {
    /// A generator list; the level comes from the first coefficient, or is
    /// 3 for a rotation, or 2.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let gens = Vec::<Generator>::deserialize(d)?;
        let level = gens.iter().find_map(Generator::level_hint).unwrap_or(2);
        MoebiusWord::new(level, gens).map_err(serde::de::Error::custom)
    }
}

pub fn random_unit<R: Rng>(level: u32, rng: &mut R) -> CdNumber {
    loop {
        let v: Vec<f64> = (0..1usize << level).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z = CdNumber::new(v).expect("valid level");
        let n = z.norm();
        if n > 0.1 && n <= 1.0 {
            return z.scale(1.0 / n);
        }
    }
}

/// `E|z|² + 2⟨J, z⟩ + D = 0`; a hyperplane when `E = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypersphere {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "J")]
    pub j: CdNumber,
    #[serde(rename = "D")]
    pub d: f64,
}

impl Hypersphere {
    pub fn new(e: f64, j: CdNumber, d: f64) -> Result<Self, MoebiusError> {
        let s = Hypersphere { e, j, d };
        s.check()?;
        Ok(s.normalized())
    }

    pub fn sphere(center: &CdNumber, radius: f64) -> Result<Self, MoebiusError> {
        Self::new(1.0, -center, center.norm_sqr() - radius * radius)
    }

    /// `⟨n, z⟩ = c` for a nonzero normal `n`.
    pub fn hyperplane(normal: &CdNumber, c: f64) -> Result<Self, MoebiusError> {
        Self::new(0.0, normal.scale(0.5), -c)
    }

    fn check(&self) -> Result<(), MoebiusError> {
        if !(self.e.is_finite() && self.d.is_finite() && self.j.is_finite()) {
            return Err(MoebiusError::EmptySphere("non-finite parameters".into()));
        }
        if self.is_hyperplane() {
            if self.j.norm() == 0.0 {
                return Err(MoebiusError::EmptySphere("E = 0 and J = 0".into()));
            }
        } else if self.radius_sqr() <= 0.0 {
            return Err(MoebiusError::EmptySphere(format!("R² = {:e}", self.radius_sqr())));
        }
        Ok(())
    }

    pub fn is_hyperplane(&self) -> bool {
        self.e == 0.0
    }

    pub fn center(&self) -> Option<CdNumber> {
        (!self.is_hyperplane()).then(|| self.j.scale(-1.0 / self.e))
    }

    pub fn radius_sqr(&self) -> f64 {
        (self.j.norm_sqr() - self.e * self.d) / (self.e * self.e)
    }

    pub fn radius(&self) -> Option<f64> {
        (!self.is_hyperplane()).then(|| self.radius_sqr().sqrt())
    }

    pub fn value(&self, z: &CdNumber) -> f64 {
        self.e * z.norm_sqr() + 2.0 * self.j.dot(z) + self.d
    }

    /// `|F(z)|` over the size of its terms.
    pub fn relative_residual(&self, z: &CdNumber) -> f64 {
        let scale = self.e.abs() * z.norm_sqr() + 2.0 * self.j.norm() * z.norm() + self.d.abs();
        self.value(z).abs() / scale.max(f64::MIN_POSITIVE)
    }

    /// Largest parameter equal to 1; `E > 0`, or for a hyperplane the
    /// first nonzero coefficient of `J` positive.
    pub fn normalized(&self) -> Hypersphere {
        let m = self.e.abs().max(self.j.norm()).max(self.d.abs());
        if m == 0.0 || !m.is_finite() {
            return self.clone();
        }
        let lead = if self.e != 0.0 { self.e } else { self.j.coeffs().iter().copied().find(|c| *c != 0.0).unwrap_or(1.0) };
        let s = lead.signum() / m;
        Hypersphere { e: self.e * s, j: self.j.scale(s), d: self.d * s }
    }

    /// Point on the set along direction `dir` from the center; for a
    /// hyperplane the foot of `dir` projected onto it.
    pub fn point_towards(&self, dir: &CdNumber) -> CdNumber {
        match (self.center(), self.radius()) {
            (Some(c), Some(r)) => &c + &dir.scale(r / dir.norm()),
            _ => {
                let n2 = self.j.norm_sqr();
                dir - &self.j.scale((2.0 * self.j.dot(dir) + self.d) / (2.0 * n2))
            }
        }
    }
}

/// Inversion in the sphere, or reflection in the hyperplane.
pub fn symmetric_point(z1: &Ext, s: &Hypersphere) -> Ext {
    match (s.center(), z1) {
        (Some(c), Ext::Infinity(_)) => Ext::Finite(c),
        (None, Ext::Infinity(_)) => Ext::INF,
        (Some(c), Ext::Finite(z)) => {
            let u = z - &c;
            let n2 = u.norm_sqr();
            if n2 == 0.0 {
                return Ext::INF;
            }
            Ext::Finite(&c + &u.scale(s.radius_sqr() / n2))
        }
        (None, Ext::Finite(z)) => {
            let k = (s.j.dot(z) + 0.5 * s.d) / s.j.norm_sqr();
            Ext::Finite(z - &s.j.scale(2.0 * k))
        }
    }
}

/// Negates the last coefficient.
pub fn reflect_conjugate(z: &CdNumber) -> CdNumber {
    let mut c = z.coeffs().to_vec();
    let last = c.len() - 1;
    c[last] = -c[last];
    CdNumber::new(c).expect("same length")
}

/// `θ(f(θ z))` for `z` whose reflection lies in the domain of `f`.
pub fn schwarz_extend<F, D>(f: F, in_domain: D, z: &CdNumber) -> Result<CdNumber, MoebiusError>
where
    F: Fn(&CdNumber) -> CdNumber,
    D: Fn(&CdNumber) -> bool,
{
    let t = reflect_conjugate(z);
    if !in_domain(&t) {
        return Err(MoebiusError::Domain(format!("reflection {t} of {z} is outside the domain")));
    }
    Ok(reflect_conjugate(&f(&t)))
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
    fn inversion_examples() {
        let w = MoebiusWord::new(2, vec![Generator::Inv]).unwrap();
        let i1 = CdNumber::basis(2, 1);
        assert_eq!(w.apply_finite(&i1), Ext::Finite(-&i1));
        assert_eq!(w.apply_finite(&CdNumber::zero(2)), Ext::INF);
        assert_eq!(w.apply(&Ext::INF), Ext::Finite(CdNumber::zero(2)));
        let sw = MoebiusWord::new(2, vec![Generator::Shift { c: CdNumber::one(2) }, Generator::Inv]).unwrap();
        assert_eq!(sw.apply_finite(&CdNumber::one(2)), Ext::Finite(CdNumber::real(2, 0.5)));
    }

    #[test]
    fn inverse_words() {
        let c = q([0.5, -1.0, 2.0, 0.0]);
        let s = MoebiusWord::new(2, vec![Generator::Shift { c }]).unwrap();
        let id = s.compose(&s.inverse()).unwrap();
        let z = q([0.1, 0.2, 0.3, 0.4]);
        assert!(id.apply_finite(&z).finite().unwrap().dist(&z) < 1e-15);
        assert_eq!(MoebiusWord::new(2, vec![Generator::Inv]).unwrap().inverse().generators(), &[Generator::Inv]);
    }

    #[test]
    fn infinity_bookkeeping() {
        let w = MoebiusWord::new(2, vec![Generator::Shift { c: CdNumber::one(2) }, Generator::MulQ { a: CdNumber::basis(2, 1), b: CdNumber::basis(2, 2) }])
            .unwrap();
        assert_eq!(w.apply(&Ext::INF), Ext::INF);
    }

    #[test]
    fn sphere_updates() {
        let unit = Hypersphere::sphere(&CdNumber::zero(2), 1.0).unwrap();
        let inv = MoebiusWord::new(2, vec![Generator::Inv]).unwrap();
        assert_eq!(inv.map_hypersphere(&unit).unwrap(), unit);
        let z0 = q([1.0, 2.0, -1.0, 0.5]);
        let c = q([-0.3, 0.0, 0.7, 1.0]);
        let s = Hypersphere::sphere(&z0, 0.75).unwrap();
        let img = MoebiusWord::new(2, vec![Generator::Shift { c: c.clone() }]).unwrap().map_hypersphere(&s).unwrap();
        assert!(img.center().unwrap().dist(&(&z0 + &c)) < 1e-14);
        assert!((img.radius().unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn sphere_through_origin_inverts_to_plane() {
        let s = Hypersphere::sphere(&CdNumber::one(2), 1.0).unwrap();
        let p = MoebiusWord::new(2, vec![Generator::Inv]).unwrap().map_hypersphere(&s).unwrap();
        assert!(p.is_hyperplane());
        // Re(w) = 1/2
        assert!(p.value(&q([0.5, 3.0, -2.0, 1.0])).abs() < 1e-15);
    }

    #[test]
    fn sampled_images_lie_on_image_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = MoebiusWord::new(
            2,
            vec![Generator::Shift { c: q([0.3, 0.1, -0.4, 0.2]) }, Generator::Inv, Generator::MulQ { a: q([1.0, 2.0, 0.0, -1.0]), b: q([0.5, 0.0, 0.3, 0.0]) }],
        )
        .unwrap();
        let s = Hypersphere::sphere(&q([1.0, 0.0, 1.0, 0.0]), 0.6).unwrap();
        let img = w.map_hypersphere(&s).unwrap();
        for _ in 0..100 {
            let z = s.point_towards(&random_unit(2, &mut rng));
            let fz = w.apply_finite(&z);
            assert!(img.relative_residual(fz.finite().unwrap()) < 1e-12);
        }
    }

    #[test]
    fn symmetric_point_examples() {
        let unit = Hypersphere::sphere(&CdNumber::zero(2), 1.0).unwrap();
        let sp = |z: CdNumber| symmetric_point(&Ext::Finite(z), &unit).finite().unwrap().clone();
        assert!(sp(CdNumber::real(2, 2.0)).dist(&CdNumber::real(2, 0.5)) < 1e-15);
        assert!(sp(CdNumber::basis(2, 3).scale(2.0)).dist(&CdNumber::basis(2, 3).scale(0.5)) < 1e-15);
        let on = q([0.6, 0.0, 0.8, 0.0]);
        assert!(sp(on.clone()).dist(&on) < 1e-15);
        assert_eq!(symmetric_point(&Ext::Finite(CdNumber::zero(2)), &unit), Ext::INF);
    }

    #[test]
    fn reflection_examples() {
        let z = q([1.0, 0.0, 0.0, 1.0]);
        assert_eq!(reflect_conjugate(&z), q([1.0, 0.0, 0.0, -1.0]));
        assert_eq!(reflect_conjugate(&reflect_conjugate(&z)), z);
        let upper = |z: &CdNumber| z.coeffs()[3] > 0.0;
        assert!(schwarz_extend(|z| z.clone(), upper, &q([0.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn generator_validation() {
        assert!(MoebiusWord::new(3, vec![Generator::MulQ { a: CdNumber::one(3), b: CdNumber::one(3) }]).is_err());
        assert!(MoebiusWord::new(3, vec![Generator::RotO { angles: vec![(2, 8, 0.1)] }]).is_err());
        assert!(MoebiusWord::new(2, vec![Generator::MulQ { a: CdNumber::zero(2), b: CdNumber::one(2) }]).is_err());
    }

    #[test]
    fn json_shape() {
        let text = r#"[{"op":"shift","c":[0,0,1,0,0,0,0,0]},{"op":"inv"},{"op":"roto","angles":[[0,7,0.3]]}]"#;
        let w: MoebiusWord = serde_json::from_str(text).unwrap();
        assert_eq!((w.level(), w.len()), (3, 3));
        let back = serde_json::to_value(&w).unwrap();
        assert_eq!(back[2]["angles"][0][1], 7);
        let bad = r#"[{"op":"mulq","a":[1,0,0,0,0,0,0,0],"b":[1,0,0,0,0,0,0,0]}]"#;
        assert!(serde_json::from_str::<MoebiusWord>(bad).is_err());
        let inf: Ext = serde_json::from_str("\"inf\"").unwrap();
        assert!(inf.is_infinite());
    }
}
