use cdconf_core::calculus::{self, RealJacobian};
use cdconf_core::contour::{self, ContourParams, PlanarLoop, PlaneRect};
use cdconf_core::domains::{self, BallAutomorphism, HomogeneousNorm, NormKind, PolydiscAutomorphism};
use cdconf_core::moebius::{self, Ext, Hypersphere, MoebiusWord};
use cdconf_core::normal::{self, ClassifyParams, CompactGrid};
use cdconf_core::phrase::{self, PhraseMetricParams, Side, Strictness};
use cdconf_core::suites::{self, case_rng, SuiteConfig};
use cdconf_core::{linalg, CdNumber, Exec};
use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::mapspec::MapSpec;
use crate::{from_payload, CliError, Options};

fn to_json(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum EvalReq {
    Mul {
        x: CdNumber,
        y: CdNumber,
    },
    Conj {
        x: CdNumber,
    },
    Re {
        x: CdNumber,
    },
    Norm {
        x: CdNumber,
    },
    Inv {
        x: CdNumber,
    },
    Proj {
        j: usize,
        h: CdNumber,
    },
    Exp {
        x: CdNumber,
    },
    Ln {
        x: CdNumber,
        #[serde(default)]
        k: i64,
    },
    Pow {
        x: CdNumber,
        alpha: f64,
        #[serde(default)]
        k: i64,
    },
    Polar {
        x: CdNumber,
    },
}

pub fn eval(payload: Value) -> Result<Value, CliError> {
    let err = |e| CliError::domain("algebra", e);
    Ok(match from_payload(payload)? {
        EvalReq::Mul { x, y } => to_json(cdconf_core::algebra::mul(&x, &y).map_err(err)?),
        EvalReq::Conj { x } => to_json(x.conj()),
        EvalReq::Re { x } => json!(x.re()),
        EvalReq::Norm { x } => json!(x.norm()),
        EvalReq::Inv { x } => to_json(x.inv().map_err(err)?),
        EvalReq::Proj { j, h } => json!(cdconf_core::algebra::proj(j, &h).map_err(err)?),
        EvalReq::Exp { x } => to_json(x.exp()),
        EvalReq::Ln { x, k } => to_json(x.ln_branch(k).map_err(err)?),
        EvalReq::Pow { x, alpha, k } => to_json(x.pow_real_branch(alpha, k).map_err(err)?),
        EvalReq::Polar { x } => to_json(x.polar().map_err(err)?),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckPcReq {
    map: MapSpec,
    z: CdNumber,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    step: Option<f64>,
    /// Adds the Jacobian and its dz/dz̃ split to the output.
    #[serde(default)]
    detail: bool,
}

pub fn check_pc(payload: Value, opts: &Options) -> Result<Value, CliError> {
    let req: CheckPcReq = from_payload(payload)?;
    let map = req.map.build(req.z.level())?;
    let tol = opts.tol_or(req.tol, 1e-6);
    let err = |e| CliError::domain("calculus", e);
    let f = map.f1();
    let verdict = match req.step {
        None => calculus::is_pseudoconformal_at(&f, &req.z, tol).map_err(err)?,
        Some(step) => calculus::classify_jacobian(&calculus::jacobian(&f, &req.z, step).map_err(err)?, tol),
    };
    let mut out = to_json(verdict);
    if req.detail {
        let j = calculus::jacobian(&f, &req.z, req.step.unwrap_or(1e-5)).map_err(err)?;
        let split = calculus::split_dz(&j);
        out["jacobian"] = json!(j.rows());
        out["dz"] = json!(split.dz_part.rows());
        out["dzbar"] = json!(split.dzbar_part.rows());
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorReq {
    #[serde(default)]
    map: Option<MapSpec>,
    #[serde(default)]
    z: Option<CdNumber>,
    #[serde(default)]
    jacobian: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    step: Option<f64>,
}

pub fn factor(payload: Value) -> Result<Value, CliError> {
    let req: FactorReq = from_payload(payload)?;
    let err = |e| CliError::domain("calculus", e);
    let j = match (req.map, req.z, req.jacobian) {
        (Some(map), Some(z), None) => {
            let m = map.build(z.level())?;
            calculus::jacobian(m.f1(), &z, req.step.unwrap_or(1e-5)).map_err(err)?
        }
        (None, None, Some(rows)) => {
            let m = linalg::from_rows(&rows).ok_or_else(|| CliError::Schema("jacobian rows must be nonempty and of equal length".into()))?;
            let level = match m.nrows() {
                4 => 2,
                8 => 3,
                n => return Err(CliError::domain("calculus", format!("{n}x{n} matrices are not handled; expected 4x4 or 8x8"))),
            };
            RealJacobian::new(level, m).map_err(err)?
        }
        _ => return Err(CliError::Schema("give either map and z, or jacobian".into())),
    };
    let reconstruction = |m: DMatrix<f64>| linalg::max_abs(&(m - &j.matrix));
    Ok(match j.level {
        2 => {
            let q = calculus::factor_quaternion(&j).map_err(err)?;
            let e = reconstruction(q.matrix());
            json!({ "kind": "quaternion", "a": q.a, "b": q.b, "lambda": q.lambda, "reconstruction_error": e })
        }
        3 => {
            let g = calculus::factor_octonion_givens(&j).map_err(err)?;
            let e = reconstruction(g.matrix());
            json!({ "kind": "givens", "lambda": g.lambda, "angles": g.angles, "reconstruction_error": e })
        }
        l => return Err(CliError::domain("calculus", format!("factorization exists at levels 2 and 3, not {l}"))),
    })
}

#[derive(Deserialize, Clone, Copy, Default)]
#[serde(rename_all = "snake_case")]
enum SideJson {
    #[default]
    Left,
    Right,
}

fn default_level() -> u32 {
    2
}

fn default_var() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum PhraseReq {
    Parse {
        text: String,
        #[serde(default = "default_level")]
        level: u32,
        #[serde(default)]
        lenient: bool,
    },
    Length {
        text: String,
        #[serde(default = "default_level")]
        level: u32,
    },
    Distance {
        text: String,
        other: String,
        #[serde(default = "default_level")]
        level: u32,
        #[serde(default)]
        b: Option<f64>,
    },
    Eval {
        text: String,
        z: CdNumber,
        #[serde(default)]
        h: Option<CdNumber>,
    },
    Derive {
        text: String,
        #[serde(default = "default_level")]
        level: u32,
        #[serde(default = "default_var")]
        var: u32,
    },
    Antiderive {
        text: String,
        #[serde(default = "default_level")]
        level: u32,
        #[serde(default)]
        side: SideJson,
        #[serde(default = "default_var")]
        var: u32,
    },
    Hat {
        text: String,
        #[serde(default = "default_level")]
        level: u32,
        #[serde(default = "default_var")]
        var: u32,
    },
    Integrate {
        text: String,
        path: Vec<CdNumber>,
        #[serde(default)]
        tol: Option<f64>,
    },
}

pub fn phrase(payload: Value, opts: &Options) -> Result<Value, CliError> {
    let err = |e: phrase::PhraseError| CliError::domain("phrase", e);
    let parse = |text: &str, level: u32| phrase::parse(text, level).map_err(err);
    let rendered = |p: phrase::Phrase| json!({ "phrase": p.render(), "degrees": p.degrees() });
    Ok(match from_payload(payload)? {
        PhraseReq::Parse { text, level, lenient } => {
            let strictness = if lenient { Strictness::Lenient } else { Strictness::Strict };
            let (p, warnings) = phrase::parse_with(&text, level, strictness).map_err(err)?;
            let mut out = rendered(p);
            out["warnings"] = json!(warnings);
            out
        }
        PhraseReq::Length { text, level } => {
            let p = parse(&text, level)?;
            json!(p.words().iter().map(phrase::word_length).collect::<Vec<_>>())
        }
        PhraseReq::Distance { text, other, level, b } => {
            let params = match b {
                Some(b) => PhraseMetricParams::new(b).map_err(err)?,
                None => PhraseMetricParams::default(),
            };
            json!(phrase::phrase_distance(&parse(&text, level)?, &parse(&other, level)?, &params))
        }
        PhraseReq::Eval { text, z, h } => to_json(parse(&text, z.level())?.eval(&z, h.as_ref()).map_err(err)?),
        PhraseReq::Derive { text, level, var } => rendered(phrase::derivative_at_one_var(&parse(&text, level)?, var).map_err(err)?),
        PhraseReq::Antiderive { text, level, side, var } => {
            let side = match side {
                SideJson::Left => Side::Left,
                SideJson::Right => Side::Right,
            };
            rendered(phrase::antiderive_var(&parse(&text, level)?, var, side).map_err(err)?)
        }
        PhraseReq::Hat { text, level, var } => rendered(phrase::hat_operator_var(&parse(&text, level)?, var).map_err(err)?),
        PhraseReq::Integrate { text, path, tol } => {
            let first = path.first().ok_or_else(|| CliError::Schema("path is empty".into()))?;
            let p = parse(&text, first.level())?;
            to_json(contour::line_integral(&p, &path, opts.tol_or(tol, 1e-10)).map_err(|e| CliError::domain("contour", e))?)
        }
    })
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum MoebiusReq {
    Apply {
        word: MoebiusWord,
        z: Ext,
    },
    Compose {
        word: MoebiusWord,
        then: MoebiusWord,
    },
    Inverse {
        word: MoebiusWord,
    },
    Scale {
        word: MoebiusWord,
        z: CdNumber,
    },
    Sphere {
        word: MoebiusWord,
        sphere: Hypersphere,
    },
    Symmetric {
        z: Ext,
        sphere: Hypersphere,
    },
    Reflect {
        z: CdNumber,
    },
    /// Extends a map given on the region where the last coefficient is
    /// positive.
    SchwarzExtend {
        map: MapSpec,
        z: CdNumber,
    },
}

pub fn moebius(payload: Value) -> Result<Value, CliError> {
    let err = |e: moebius::MoebiusError| CliError::domain("moebius", e);
    let level_check = |w: &MoebiusWord, z: &CdNumber| {
        if w.level() == z.level() {
            Ok(())
        } else {
            Err(CliError::domain("moebius", format!("word has level {}, point has level {}", w.level(), z.level())))
        }
    };
    Ok(match from_payload(payload)? {
        MoebiusReq::Apply { word, z } => {
            if let Some(f) = z.finite() {
                level_check(&word, f)?;
            }
            to_json(word.apply(&z))
        }
        MoebiusReq::Compose { word, then } => to_json(word.compose(&then).map_err(err)?),
        MoebiusReq::Inverse { word } => to_json(word.inverse()),
        MoebiusReq::Scale { word, z } => {
            level_check(&word, &z)?;
            json!(word.scale_at(&z))
        }
        MoebiusReq::Sphere { word, sphere } => to_json(word.map_hypersphere(&sphere).map_err(err)?),
        MoebiusReq::Symmetric { z, sphere } => {
            if sphere.e == 0.0 {
                return Err(CliError::domain("moebius", "symmetric points need a sphere with E ≠ 0"));
            }
            to_json(moebius::symmetric_point(&z, &sphere))
        }
        MoebiusReq::Reflect { z } => to_json(moebius::reflect_conjugate(&z)),
        MoebiusReq::SchwarzExtend { map, z } => {
            let m = map.build(z.level())?;
            let upper = |t: &CdNumber| t.coeffs().last().is_some_and(|&c| c > 0.0);
            to_json(moebius::schwarz_extend(m.f1(), upper, &z).map_err(err)?)
        }
    })
}

fn default_count() -> usize {
    200
}

fn default_radius() -> f64 {
    0.99
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum DomainReq {
    Ball {
        automorphism: BallAutomorphism,
        z: Vec<CdNumber>,
    },
    /// Normal form of `then ∘ automorphism`.
    BallCompose {
        automorphism: BallAutomorphism,
        then: BallAutomorphism,
    },
    Polydisc {
        automorphism: PolydiscAutomorphism,
        z: Vec<CdNumber>,
    },
    Cayley {
        z: CdNumber,
        #[serde(rename = "M")]
        m: CdNumber,
    },
    Halfspace {
        w: CdNumber,
        #[serde(rename = "M")]
        m: CdNumber,
    },
    CayleyIdentity {
        z: CdNumber,
        #[serde(rename = "M")]
        m: CdNumber,
    },
    Schwarz {
        map: MapSpec,
        norm_in: HomogeneousNorm,
        #[serde(default)]
        norm_out: Option<HomogeneousNorm>,
        #[serde(default)]
        samples: Option<Vec<Vec<CdNumber>>>,
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        tol: Option<f64>,
    },
    Cartan {
        map: MapSpec,
        base: Vec<CdNumber>,
        #[serde(default)]
        samples: Option<Vec<Vec<CdNumber>>>,
        #[serde(default = "default_count")]
        count: usize,
        /// Samples are drawn from the Euclidean ball of this radius.
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default)]
        pre_tol: Option<f64>,
        #[serde(default)]
        tol: Option<f64>,
    },
}

fn draw(norm: &HomogeneousNorm, count: usize, radius: f64, opts: &Options) -> Vec<Vec<CdNumber>> {
    let mut rng: ChaCha8Rng = case_rng(opts.seed(), 0);
    (0..count).map(|_| norm.sample_ball(radius, &mut rng)).collect()
}

pub fn domain(payload: Value, opts: &Options) -> Result<Value, CliError> {
    let err = |e: domains::DomainError| CliError::domain("domains", e);
    Ok(match from_payload(payload)? {
        DomainReq::Ball { automorphism, z } => {
            automorphism.check().map_err(err)?;
            to_json(automorphism.apply(&z).map_err(err)?)
        }
        DomainReq::BallCompose { automorphism, then } => {
            automorphism.check().map_err(err)?;
            then.check().map_err(err)?;
            to_json(automorphism.then(&then).map_err(err)?)
        }
        DomainReq::Polydisc { automorphism, z } => {
            automorphism.check().map_err(err)?;
            to_json(automorphism.apply(&z).map_err(err)?)
        }
        DomainReq::Cayley { z, m } => to_json(domains::cayley_to_ball(&z, &m).map_err(err)?),
        DomainReq::Halfspace { w, m } => to_json(domains::ball_to_halfspace(&w, &m).map_err(err)?),
        DomainReq::CayleyIdentity { z, m } => {
            let (lhs, rhs) = domains::halfspace_identity(&z, &m).map_err(err)?;
            json!({ "lhs": lhs, "rhs": rhs, "residual": lhs.dist(&rhs) })
        }
        DomainReq::Schwarz { map, norm_in, norm_out, samples, count, radius, tol } => {
            let m = map.build(norm_in.level)?;
            let samples = samples.unwrap_or_else(|| draw(&norm_in, count, radius, opts));
            let out = norm_out.unwrap_or(norm_in);
            to_json(domains::schwarz_check(m.fn_(), &norm_in, &out, &samples, opts.tol_or(tol, 1e-9)).map_err(err)?)
        }
        DomainReq::Cartan { map, base, samples, count, radius, pre_tol, tol } => {
            let first = base.first().ok_or_else(|| CliError::Schema("base point is empty".into()))?;
            let m = map.build(first.level())?;
            let norm = HomogeneousNorm { kind: NormKind::Euclidean, level: first.level(), arity: base.len() };
            let samples = samples.unwrap_or_else(|| draw(&norm, count, radius, opts));
            let tol = opts.tol_or(tol, 1e-8);
            to_json(domains::cartan_check(m.fn_(), &base, &samples, pre_tol.unwrap_or(1e-6), tol).map_err(err)?)
        }
    })
}

fn default_segments() -> usize {
    64
}

fn default_per_side() -> usize {
    16
}

#[derive(Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
enum LoopSpec {
    Circle {
        a0: CdNumber,
        #[serde(rename = "M")]
        m: CdNumber,
        center: [f64; 2],
        radius: f64,
        #[serde(default = "default_segments")]
        segments: usize,
    },
    Rectangle {
        a0: CdNumber,
        #[serde(rename = "M")]
        m: CdNumber,
        lo: [f64; 2],
        hi: [f64; 2],
        #[serde(default = "default_per_side")]
        per_side: usize,
    },
    Polyline {
        a0: CdNumber,
        #[serde(rename = "M")]
        m: CdNumber,
        pts: Vec<[f64; 2]>,
    },
}

impl LoopSpec {
    fn build(self) -> Result<PlanarLoop, contour::ContourError> {
        let l = match self {
            LoopSpec::Circle { a0, m, center, radius, segments } => PlanarLoop::circle(a0, m, center, radius, segments)?,
            LoopSpec::Rectangle { a0, m, lo, hi, per_side } => PlanarLoop::rectangle(a0, m, lo, hi, per_side)?,
            LoopSpec::Polyline { a0, m, pts } => PlanarLoop::new(a0, m, pts)?,
        };
        l.validate()?;
        Ok(l)
    }
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum ContourReq {
    Winding {
        #[serde(rename = "loop")]
        lp: LoopSpec,
        a: CdNumber,
        #[serde(default)]
        tol: Option<f64>,
    },
    Zeros {
        map: MapSpec,
        #[serde(rename = "loop")]
        lp: LoopSpec,
        #[serde(default)]
        params: Option<ContourParams>,
    },
    /// Zero counts of `g` and `f + g` under `|f| < |g|` on the loop.
    Rouche {
        f: MapSpec,
        g: MapSpec,
        #[serde(rename = "loop")]
        lp: LoopSpec,
        #[serde(default)]
        params: Option<ContourParams>,
    },
    /// Interior samples are drawn uniformly from the disc when not given;
    /// the disc defaults to the loop's bounding circle for circles.
    Maxmod {
        map: MapSpec,
        #[serde(rename = "loop")]
        lp: LoopSpec,
        #[serde(default)]
        interior: Option<Vec<CdNumber>>,
        #[serde(default)]
        disc: Option<([f64; 2], f64)>,
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default)]
        tol: Option<f64>,
    },
    Locate {
        map: MapSpec,
        rect: PlaneRect,
        min_cell: f64,
        #[serde(default)]
        params: Option<ContourParams>,
    },
}

pub fn contour(payload: Value, opts: &Options) -> Result<Value, CliError> {
    let err = |e: contour::ContourError| CliError::domain("contour", e);
    Ok(match from_payload(payload)? {
        ContourReq::Winding { lp, a, tol } => {
            let l = lp.build().map_err(err)?;
            to_json(contour::winding(&l, &a, opts.tol_or(tol, 1e-9)).map_err(err)?)
        }
        ContourReq::Zeros { map, lp, params } => {
            let l = lp.build().map_err(err)?;
            let m = map.build(l.level())?;
            let r = contour::count_zeros(&m.f1(), &l, &params.unwrap_or_default()).map_err(err)?;
            to_json(r)
        }
        ContourReq::Rouche { f, g, lp, params } => {
            let l = lp.build().map_err(err)?;
            let (f, g) = (f.build(l.level())?, g.build(l.level())?);
            let r = contour::rouche_equal(&f.f1(), &g.f1(), &l, &params.unwrap_or_default()).map_err(err)?;
            to_json(r)
        }
        ContourReq::Maxmod { map, lp, interior, disc, count, tol } => {
            let circle = match &lp {
                LoopSpec::Circle { center, radius, .. } => Some((*center, *radius)),
                _ => None,
            };
            let l = lp.build().map_err(err)?;
            let m = map.build(l.level())?;
            let interior = match (interior, disc.or(circle)) {
                (Some(pts), _) => pts,
                (None, Some((center, radius))) => l.disc_samples(center, radius, count, &mut case_rng(opts.seed(), 0)),
                (None, None) => return Err(CliError::Schema("give interior samples or a disc [center, radius]".into())),
            };
            let r = contour::max_principle_check(&m.f1(), &l, &interior, opts.tol_or(tol, 1e-9)).map_err(err)?;
            to_json(r)
        }
        ContourReq::Locate { map, rect, min_cell, params } => {
            let m = map.build(rect.a0.level())?;
            let r = contour::locate_zeros(&m.f1(), &rect, min_cell, &params.unwrap_or_default(), Exec::default()).map_err(err)?;
            to_json(r)
        }
    })
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum FamilyKind {
    Bounded,
    Iid,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySpec {
    kind: FamilyKind,
    len: usize,
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum NormalReq {
    Rho {
        f: MapSpec,
        g: MapSpec,
        grid: CompactGrid,
    },
    Classify {
        #[serde(default)]
        maps: Option<Vec<MapSpec>>,
        /// Seeded affine family used when `maps` is absent.
        #[serde(default)]
        family: Option<FamilySpec>,
        grid: CompactGrid,
        #[serde(default)]
        params: Option<ClassifyParams>,
    },
}

pub fn normal(payload: Value, opts: &Options) -> Result<Value, CliError> {
    let err = |e: normal::NormalError| CliError::domain("normal", e);
    Ok(match from_payload(payload)? {
        NormalReq::Rho { f, g, grid } => {
            let level = grid.center[0].level();
            let (f, g) = (f.build(level)?, g.build(level)?);
            let r = normal::rho(&f.fn_(), &g.fn_(), &grid, Exec::default()).map_err(err)?;
            to_json(r)
        }
        NormalReq::Classify { maps, family, grid, params } => {
            let level = grid.center[0].level();
            let mut params = params.unwrap_or_default();
            if let Some(t) = opts.tol {
                params.tol = t;
            }
            let specs = match (maps, family) {
                (Some(maps), None) => maps,
                (None, Some(fam)) => {
                    if grid.center.len() != 1 {
                        return Err(CliError::domain("normal", "affine families act on one variable"));
                    }
                    let mut rng: ChaCha8Rng = case_rng(opts.seed(), 0);
                    let members = match fam.kind {
                        FamilyKind::Bounded => normal::bounded_affine_family(level, fam.len, &mut rng),
                        FamilyKind::Iid => normal::iid_affine_family(level, fam.len, &mut rng),
                    };
                    members.into_iter().map(|f| MapSpec::Affine { a: f.a, b: f.b, c: f.c }).collect()
                }
                _ => return Err(CliError::Schema("give exactly one of maps and family".into())),
            };
            let built = specs.iter().map(|s| s.build(level)).collect::<Result<Vec<_>, _>>()?;
            let fs: Vec<_> = built.iter().map(|m| m.fn_()).collect();
            to_json(normal::classify_sequence(&fs, &grid, &params, Exec::default()).map_err(err)?)
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteReq {
    name: String,
    #[serde(default)]
    seed: Option<u64>,
}

pub fn suite(payload: Value, opts: &Options) -> Result<Value, CliError> {
    let req: SuiteReq = from_payload(payload)?;
    let info = suites::find(&req.name).ok_or_else(|| CliError::Schema(format!("unknown suite {:?}", req.name)))?;
    let seed = opts.seed.or(req.seed).unwrap_or(crate::DEFAULT_SEED);
    let report = info.run(&SuiteConfig { seed, exec: Exec::default() });
    let mut out = to_json(&report);
    out["table"] = json!(report.table());
    Ok(out)
}

pub fn list_suites() -> Value {
    json!({ "count": suites::SUITES.len(), "suites": to_json(&suites::SUITES[..]) })
}
