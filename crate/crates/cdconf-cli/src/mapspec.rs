//! JSON descriptions of the maps handed to the analysis routines.
//!
//! One-variable maps act coordinatewise on points of K^n; `ball` and
//! `polydisc` act on the whole tuple.

use cdconf_core::domains::{BallAutomorphism, PolydiscAutomorphism};
use cdconf_core::moebius::MoebiusWord;
use cdconf_core::normal::Affine;
use cdconf_core::phrase::{self, Phrase};
use cdconf_core::CdNumber;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zero {
    pub at: CdNumber,
    pub order: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    /// z ↦ z̃
    Conj,
    Constant {
        c: CdNumber,
    },
    /// z-only phrase, parsed at the level of the data it meets.
    Phrase {
        text: String,
    },
    Word {
        word: MoebiusWord,
    },
    /// z ↦ a z b + c
    Affine {
        a: CdNumber,
        b: CdNumber,
        c: CdNumber,
    },
    /// z ↦ A (z − z_1)^{p_1} ⋯ (z − z_k)^{p_k} B, factors multiplied left to right.
    Zeros {
        #[serde(default)]
        a: Option<CdNumber>,
        zeros: Vec<Zero>,
        #[serde(default)]
        b: Option<CdNumber>,
    },
    Sum {
        maps: Vec<MapSpec>,
    },
    /// Applies `maps[0]` first.
    Compose {
        maps: Vec<MapSpec>,
    },
    Ball {
        automorphism: BallAutomorphism,
    },
    Polydisc {
        automorphism: PolydiscAutomorphism,
    },
}

/// A [`MapSpec`] with phrases parsed and levels checked.
#[derive(Debug, Clone)]
pub enum Map {
    Identity,
    Conj,
    Constant(CdNumber),
    Phrase(Phrase),
    Word(MoebiusWord),
    Affine(Affine),
    Zeros { a: Option<CdNumber>, zeros: Vec<(CdNumber, u32)>, b: Option<CdNumber> },
    Sum(Vec<Map>),
    Compose(Vec<Map>),
    Ball(BallAutomorphism),
    Polydisc(PolydiscAutomorphism),
}

fn same_level(what: &str, z: &CdNumber, level: u32) -> Result<(), CliError> {
    if z.level() == level {
        Ok(())
    } else {
        Err(CliError::domain("map", format!("{what} has level {}, expected {level}", z.level())))
    }
}

impl MapSpec {
    pub fn build(&self, level: u32) -> Result<Map, CliError> {
        Ok(match self {
            MapSpec::Identity => Map::Identity,
            MapSpec::Conj => Map::Conj,
            MapSpec::Constant { c } => {
                same_level("constant", c, level)?;
                Map::Constant(c.clone())
            }
            MapSpec::Phrase { text } => {
                let p = phrase::parse(text, level).map_err(|e| CliError::domain("phrase", e))?;
                if p.variables().iter().any(|&v| v != 1) || p.has_operator() {
                    return Err(CliError::domain("map", format!("phrase {text:?} must use z alone")));
                }
                Map::Phrase(p)
            }
            MapSpec::Word { word } => {
                if word.level() != level {
                    return Err(CliError::domain("map", format!("word has level {}, expected {level}", word.level())));
                }
                Map::Word(word.clone())
            }
            MapSpec::Affine { a, b, c } => {
                for (name, x) in [("a", a), ("b", b), ("c", c)] {
                    same_level(name, x, level)?;
                }
                Map::Affine(Affine { a: a.clone(), b: b.clone(), c: c.clone() })
            }
            MapSpec::Zeros { a, zeros, b } => {
                for x in a.iter().chain(b.iter()).chain(zeros.iter().map(|z| &z.at)) {
                    same_level("zero-map coefficient", x, level)?;
                }
                if zeros.iter().any(|z| z.order == 0) {
                    return Err(CliError::domain("map", "zero orders must be positive"));
                }
                Map::Zeros { a: a.clone(), zeros: zeros.iter().map(|z| (z.at.clone(), z.order)).collect(), b: b.clone() }
            }
            MapSpec::Sum { maps } | MapSpec::Compose { maps } => {
                if maps.is_empty() {
                    return Err(CliError::domain("map", "sum and compose need at least one map"));
                }
                let built = maps.iter().map(|m| m.build(level)).collect::<Result<Vec<_>, _>>()?;
                if matches!(self, MapSpec::Sum { .. }) {
                    Map::Sum(built)
                } else {
                    Map::Compose(built)
                }
            }
            MapSpec::Ball { automorphism } => {
                automorphism.check().map_err(|e| CliError::domain("domains", e))?;
                if automorphism.level() != level {
                    return Err(CliError::domain("map", format!("automorphism has level {}, expected {level}", automorphism.level())));
                }
                Map::Ball(automorphism.clone())
            }
            MapSpec::Polydisc { automorphism } => {
                automorphism.check().map_err(|e| CliError::domain("domains", e))?;
                Map::Polydisc(automorphism.clone())
            }
        })
    }
}

impl Map {
    fn eval_one(&self, z: &CdNumber) -> Result<CdNumber, String> {
        match self {
            Map::Identity => Ok(z.clone()),
            Map::Conj => Ok(z.conj()),
            Map::Constant(c) => Ok(c.clone()),
            Map::Phrase(p) => p.eval(z, None).map_err(|e| e.to_string()),
            Map::Word(w) => w.apply_finite(z).finite().cloned().ok_or_else(|| format!("pole at {z}")),
            Map::Affine(f) => Ok(f.eval(z)),
            Map::Zeros { a, zeros, b } => {
                let mut acc = a.clone().unwrap_or_else(|| CdNumber::one(z.level()));
                for (at, order) in zeros {
                    acc = &acc * &(z - at).powi(*order);
                }
                Ok(match b {
                    Some(b) => &acc * b,
                    None => acc,
                })
            }
            Map::Sum(_) | Map::Compose(_) | Map::Ball(_) | Map::Polydisc(_) => self.eval(std::slice::from_ref(z)).map(|mut v| v.remove(0)),
        }
    }

    pub fn eval(&self, z: &[CdNumber]) -> Result<Vec<CdNumber>, String> {
        match self {
            Map::Sum(maps) => {
                let mut parts = maps.iter().map(|m| m.eval(z));
                let mut acc = parts.next().expect("nonempty sum")?;
                for p in parts {
                    let p = p?;
                    if p.len() != acc.len() {
                        return Err("summands have different arities".into());
                    }
                    acc.iter_mut().zip(&p).for_each(|(x, y)| *x += y);
                }
                Ok(acc)
            }
            Map::Compose(maps) => maps.iter().try_fold(z.to_vec(), |w, m| m.eval(&w)),
            Map::Ball(b) => b.apply(z).map_err(|e| e.to_string()),
            Map::Polydisc(p) => p.apply(z).map_err(|e| e.to_string()),
            _ => z.iter().map(|x| self.eval_one(x)).collect(),
        }
    }

    /// One-variable form; failures become NaN so the numerical routines
    /// report them as non-finite samples.
    pub fn f1(&self) -> impl Fn(&CdNumber) -> CdNumber + Sync + '_ {
        move |z: &CdNumber| self.eval_one(z).unwrap_or_else(|_| CdNumber::real(z.level(), f64::NAN))
    }

    pub fn fn_(&self) -> impl Fn(&[CdNumber]) -> Vec<CdNumber> + Sync + '_ {
        move |z: &[CdNumber]| self.eval(z).unwrap_or_else(|_| z.iter().map(|x| CdNumber::real(x.level(), f64::NAN)).collect())
    }
}
