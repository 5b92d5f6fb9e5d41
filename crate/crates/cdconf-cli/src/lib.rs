//! JSON command surface over `cdconf-core`.
//!
//! [`run`] takes a command name and a JSON payload and returns the JSON
//! result. Malformed payloads are [`CliError::Schema`] (exit 2); failures
//! inside the numerical routines are [`CliError::Domain`] (exit 1).

use serde::de::DeserializeOwned;
use serde_json::{json, Value};

mod commands;
pub mod mapspec;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Options {
    /// Seed for every randomized part of a command.
    pub seed: Option<u64>,
    /// Overrides the command's tolerance where it has one.
    pub tol: Option<f64>,
}

impl Options {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn tol_or(&self, payload: Option<f64>, default: f64) -> f64 {
        self.tol.or(payload).unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{module}: {message}")]
    Domain { module: &'static str, message: String },
}

impl CliError {
    pub fn domain(module: &'static str, e: impl ToString) -> Self {
        CliError::Domain { module, message: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Domain { .. } => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Schema(m) => json!({ "error": "schema", "message": m }),
            CliError::Domain { module, message } => json!({ "error": "domain", "module": module, "message": message }),
        }
    }
}

pub(crate) fn from_payload<T: DeserializeOwned>(payload: Value) -> Result<T, CliError> {
    serde_json::from_value(payload).map_err(|e| CliError::Schema(e.to_string()))
}

pub const COMMANDS: [&str; 10] = ["eval", "check-pc", "factor", "phrase", "moebius", "domain", "contour", "normal", "suite", "list-suites"];

pub fn run(command: &str, payload: Value, opts: &Options) -> Result<Value, CliError> {
    match command {
        "eval" => commands::eval(payload),
        "check-pc" => commands::check_pc(payload, opts),
        "factor" => commands::factor(payload),
        "phrase" => commands::phrase(payload, opts),
        "moebius" => commands::moebius(payload),
        "domain" => commands::domain(payload, opts),
        "contour" => commands::contour(payload, opts),
        "normal" => commands::normal(payload, opts),
        "suite" => commands::suite(payload, opts),
        "list-suites" => Ok(commands::list_suites()),
        other => Err(CliError::Schema(format!("unknown command {other:?}"))),
    }
}

/// A library operation and a request that reaches it.
#[derive(Debug, Clone, Copy)]
pub struct Operation {
    pub module: &'static str,
    pub name: &'static str,
    pub command: &'static str,
    pub example: &'static str,
}

macro_rules! op {
    ($module:literal, $name:literal, $command:literal, $example:literal) => {
        Operation { module: $module, name: $name, command: $command, example: $example }
    };
}

pub static OPERATIONS: &[Operation] = &[
    op!("algebra", "mul", "eval", r#"{"op":"mul","x":[0,1,0,0],"y":[0,0,1,0]}"#),
    op!("algebra", "conj", "eval", r#"{"op":"conj","x":[1,2,3,4]}"#),
    op!("algebra", "re", "eval", r#"{"op":"re","x":[1,2,3,4]}"#),
    op!("algebra", "norm", "eval", r#"{"op":"norm","x":[1,2,3,4,0,0,0,0]}"#),
    op!("algebra", "inv", "eval", r#"{"op":"inv","x":[0,0,2,0]}"#),
    op!("algebra", "proj", "eval", r#"{"op":"proj","j":2,"h":[1,2,3,4]}"#),
    op!("algebra", "exp", "eval", r#"{"op":"exp","x":[0,1,0,0]}"#),
    op!("algebra", "ln_principal", "eval", r#"{"op":"ln","x":[0,1,0,0]}"#),
    op!("algebra", "pow_real", "eval", r#"{"op":"pow","x":[0,0,0,1],"alpha":0.5}"#),
    op!("algebra", "polar", "eval", r#"{"op":"polar","x":[1,1,0,0]}"#),
    op!("calculus", "jacobian", "check-pc", r#"{"map":{"kind":"phrase","text":"z^2"},"z":[1,0.5,0,0],"step":1e-5,"detail":true}"#),
    op!("calculus", "split_dz", "check-pc", r#"{"map":{"kind":"conj"},"z":[0,0,0,0],"detail":true}"#),
    op!("calculus", "is_pseudoconformal_at", "check-pc", r#"{"map":{"kind":"identity"},"z":[0.3,0,0,0]}"#),
    op!("calculus", "factor_quaternion", "factor", r#"{"map":{"kind":"affine","a":[0,1,0,0],"b":[0,0,2,0],"c":[0,0,0,0]},"z":[0,0,0,0]}"#),
    op!("calculus", "factor_octonion_givens", "factor", r#"{"map":{"kind":"word","word":[{"op":"roto","angles":[[0,3,0.4]]}]},"z":[0.1,0,0,0,0,0,0,0]}"#),
    op!("phrase", "parse", "phrase", r#"{"op":"parse","text":"[0,1,0,0] z^2 + z"}"#),
    op!("phrase", "word_length", "phrase", r#"{"op":"length","text":"[3] z^2 [0,1,0,0]"}"#),
    op!("phrase", "phrase_distance", "phrase", r#"{"op":"distance","text":"z^2","other":"z^2 + z^3"}"#),
    op!("phrase", "eval", "phrase", r#"{"op":"eval","text":"z [0,1,0,0] z","z":[1,0,1,0]}"#),
    op!("phrase", "derivative_at_one", "phrase", r#"{"op":"derive","text":"z^3"}"#),
    op!("phrase", "antiderive", "phrase", r#"{"op":"antiderive","text":"z [0,0,1,0] z","side":"right"}"#),
    op!("phrase", "hat_operator", "phrase", r#"{"op":"hat","text":"e"}"#),
    op!("contour", "line_integral", "phrase", r#"{"op":"integrate","text":"z^2","path":[[0,0,0,0],[1,1,0,0]]}"#),
    op!("contour", "winding", "contour", r#"{"op":"winding","loop":{"shape":"circle","a0":[0,0,0,0],"M":[0,1,0,0],"center":[0,0],"radius":1},"a":[0,0,0,0]}"#),
    op!(
        "contour",
        "count_zeros",
        "contour",
        r#"{"op":"zeros","map":{"kind":"phrase","text":"z^2"},"loop":{"shape":"circle","a0":[0,0,0,0],"M":[0,1,0,0],"center":[0,0],"radius":1}}"#
    ),
    op!(
        "contour",
        "rouche_equal",
        "contour",
        r#"{"op":"rouche","f":{"kind":"constant","c":[0.1,0,0,0]},"g":{"kind":"phrase","text":"z^2"},"loop":{"shape":"circle","a0":[0,0,0,0],"M":[0,1,0,0],"center":[0,0],"radius":1}}"#
    ),
    op!(
        "contour",
        "max_principle_check",
        "contour",
        r#"{"op":"maxmod","map":{"kind":"phrase","text":"z^3 + z"},"loop":{"shape":"circle","a0":[0,0,0,0],"M":[0,0,1,0],"center":[0,0],"radius":1}}"#
    ),
    op!(
        "contour",
        "locate_zeros",
        "contour",
        r#"{"op":"locate","map":{"kind":"zeros","zeros":[{"at":[0.3,0,0,0],"order":1},{"at":[-0.2,0,0.4,0],"order":2}]},"rect":{"a0":[0,0,0,0],"M":[0,0,1,0],"lo":[-1,-1],"hi":[1,1]},"min_cell":0.05}"#
    ),
    op!("moebius", "apply", "moebius", r#"{"op":"apply","word":[{"op":"inv"}],"z":[0,0,0,0]}"#),
    op!("moebius", "compose", "moebius", r#"{"op":"compose","word":[{"op":"inv"}],"then":[{"op":"shift","c":[1,0,0,0]}]}"#),
    op!("moebius", "inverse", "moebius", r#"{"op":"inverse","word":[{"op":"shift","c":[1,0,0,0]},{"op":"inv"}]}"#),
    op!("moebius", "map_hypersphere", "moebius", r#"{"op":"sphere","word":[{"op":"inv"}],"sphere":{"E":1,"J":[-2,0,0,0],"D":3}}"#),
    op!("moebius", "symmetric_point", "moebius", r#"{"op":"symmetric","z":[0.5,0,0,0],"sphere":{"E":1,"J":[0,0,0,0],"D":-1}}"#),
    op!("moebius", "reflect_conjugate", "moebius", r#"{"op":"reflect","z":[1,2,3,4]}"#),
    op!("moebius", "schwarz_extend", "moebius", r#"{"op":"schwarz_extend","map":{"kind":"phrase","text":"z^2"},"z":[0.1,0.2,0.3,-0.4]}"#),
    op!("domains", "ball_apply", "domain", r#"{"op":"ball","automorphism":{"a":[[0.5,0,0,0]],"frame":[]},"z":[[0.5,0,0,0]]}"#),
    op!(
        "domains",
        "polydisc_apply",
        "domain",
        r#"{"op":"polydisc","automorphism":{"b":[[0.5,0,0,0]],"c":[[[1,0,0,0],[1,0,0,0],[1,0,0,0],[1,0,0,0]]],"sigma":[0]},"z":[[0,0,0,0]]}"#
    ),
    op!("domains", "cayley_to_ball", "domain", r#"{"op":"cayley","z":[1,0,0,0],"M":[0,1,0,0]}"#),
    op!("domains", "ball_to_halfspace", "domain", r#"{"op":"halfspace","w":[0,0,0,0],"M":[0,1,0,0]}"#),
    op!(
        "domains",
        "schwarz_check",
        "domain",
        r#"{"op":"schwarz","map":{"kind":"affine","a":[0.6,0,0,0],"b":[1,0,0,0],"c":[0,0,0,0]},"norm_in":{"kind":"euclidean","level":2,"arity":1}}"#
    ),
    op!(
        "domains",
        "cartan_check",
        "domain",
        r#"{"op":"cartan","map":{"kind":"compose","maps":[{"kind":"ball","automorphism":{"a":[[0.3,0.1,0,0]],"frame":[]}},{"kind":"ball","automorphism":{"a":[[0.3,0.1,0,0]],"frame":[]}}]},"base":[[0,0,0,0]]}"#
    ),
    op!("normal", "rho", "normal", r#"{"op":"rho","f":{"kind":"identity"},"g":{"kind":"conj"},"grid":{"center":[[0,0,0,0]],"radii":[1],"resolution":64}}"#),
    op!(
        "normal",
        "classify_sequence",
        "normal",
        r#"{"op":"classify","family":{"kind":"bounded","len":16},"grid":{"center":[[0,0,0,0]],"radii":[1],"resolution":81}}"#
    ),
    op!("cli", "run", "suite", r#"{"name":"thm35-symmetry"}"#),
    op!("cli", "list_suites", "list-suites", "{}"),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_reach_their_commands() {
        for op in OPERATIONS {
            assert!(COMMANDS.contains(&op.command), "{}", op.name);
            let payload: Value = serde_json::from_str(op.example).unwrap();
            if let Err(e) = run(op.command, payload, &Options::default()) {
                panic!("{}.{}: {e}", op.module, op.name);
            }
        }
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let e = run("eval", json!({"op": "mul", "x": [1, 0, 0, 0]}), &Options::default()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run("eval", json!({"op": "inv", "x": [0, 0, 0, 0]}), &Options::default()).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert_eq!(run("nope", json!({}), &Options::default()).unwrap_err().exit_code(), 2);
    }
}
