use std::io::Write;
use std::process::{Command, Output, Stdio};

use cdconf_cli::OPERATIONS;
use serde_json::{json, Value};

fn cdconf(args: &[&str], payload: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cdconf"))
        .args(args)
        .args(["--json", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(payload.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn every_library_operation_is_reachable() {
    let expected = [
        ("algebra", &["mul", "conj", "re", "norm", "inv", "proj", "exp", "ln_principal", "pow_real", "polar"][..]),
        ("calculus", &["jacobian", "split_dz", "is_pseudoconformal_at", "factor_quaternion", "factor_octonion_givens"]),
        ("phrase", &["parse", "word_length", "phrase_distance", "eval", "derivative_at_one", "antiderive", "hat_operator"]),
        ("contour", &["line_integral", "winding", "count_zeros", "rouche_equal", "max_principle_check", "locate_zeros"]),
        ("moebius", &["apply", "compose", "inverse", "map_hypersphere", "symmetric_point", "reflect_conjugate", "schwarz_extend"]),
        ("domains", &["ball_apply", "polydisc_apply", "cayley_to_ball", "ball_to_halfspace", "schwarz_check", "cartan_check"]),
        ("normal", &["rho", "classify_sequence"]),
        ("cli", &["run", "list_suites"]),
    ];
    for (module, names) in expected {
        for name in names {
            let op = OPERATIONS.iter().find(|o| o.module == module && o.name == *name).unwrap_or_else(|| panic!("{module}.{name} missing"));
            let out = cdconf(&[op.command], op.example);
            assert!(out.status.success(), "{module}.{name}: {}", String::from_utf8_lossy(&out.stdout));
        }
    }
    assert_eq!(OPERATIONS.len(), expected.iter().map(|(_, n)| n.len()).sum::<usize>());
}

#[test]
fn generator_product() {
    let out = cdconf(&["eval"], r#"{"op":"mul","x":[0,1,0,0],"y":[0,0,1,0]}"#);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out), json!([0.0, 0.0, 0.0, 1.0]));
}

#[test]
fn identity_is_pseudoconformal_with_unit_scale() {
    let out = cdconf(&["check-pc"], r#"{"map":{"kind":"identity"},"z":[0.4,-1,2,0.5,0,0,0,0]}"#);
    let v = stdout_json(&out);
    assert_eq!(v["status"], "Pseudoconformal");
    assert!((v["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn suites_are_listed_once_each() {
    let v = stdout_json(&cdconf(&["list-suites"], "{}"));
    assert_eq!(v["count"], 14);
    let names: Vec<&str> = v["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 14);
    for want in ["thm33-hypersphere", "thm17-antiderive-roundtrip", "schwarz-lemma"] {
        assert!(names.contains(&want), "{want}");
    }
}

#[test]
fn suite_by_alias_returns_a_passing_table() {
    let out = cdconf(&["suite", "--seed", "7"], r#"{"name":"thm35-symmetry"}"#);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["name"], "thm33-hypersphere");
    assert_eq!(v["passed"], true);
    assert_eq!(v["case_residuals"].as_array().unwrap().len(), 1000);
    assert!(v["table"].as_str().unwrap().contains("PASS"));
}

#[test]
fn same_request_gives_identical_bytes() {
    let requests = [
        (vec!["suite", "--seed", "11"], r#"{"name":"thm37-ball-automorphisms"}"#),
        (vec!["normal", "--seed", "3"], r#"{"op":"classify","family":{"kind":"bounded","len":12},"grid":{"center":[[0,0,0,0]],"radii":[1],"resolution":64}}"#),
        (
            vec!["domain", "--seed", "5"],
            r#"{"op":"schwarz","map":{"kind":"ball","automorphism":{"a":[[0,0,0,0]],"frame":[[{"op":"left","u":[0,1,0,0]}]]}},"norm_in":{"kind":"euclidean","level":2,"arity":1}}"#,
        ),
    ];
    for (args, payload) in requests {
        let a = cdconf(&args, payload);
        let b = cdconf(&args, payload);
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout);
    }
    let s1 = cdconf(&["suite", "--seed", "1"], r#"{"name":"cayley-halfspace"}"#);
    let s2 = cdconf(&["suite", "--seed", "2"], r#"{"name":"cayley-halfspace"}"#);
    assert_ne!(s1.stdout, s2.stdout);
}

#[test]
fn schema_errors_exit_with_2() {
    for (cmd, payload) in [
        ("eval", r#"{"op":"mul","x":[0,1,0,0]}"#),
        ("eval", r#"{"op":"mul","x":[0,1,0,0],"y":[1,0,0,0],"extra":1}"#),
        ("phrase", r#"{"op":"shout","text":"z"}"#),
        ("suite", r#"{"name":"no-such-suite"}"#),
        ("eval", "not json"),
        ("frobnicate", "{}"),
    ] {
        let out = cdconf(&[cmd], payload);
        assert_eq!(out.status.code(), Some(2), "{cmd} {payload}");
        assert_eq!(stdout_json(&out)["error"], "schema");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn domain_errors_exit_with_1() {
    for (cmd, payload) in [
        ("eval", r#"{"op":"inv","x":[0,0,0,0]}"#),
        ("phrase", r#"{"op":"parse","text":"z + + z"}"#),
        ("domain", r#"{"op":"ball","automorphism":{"a":[[0.5,0,0,0]],"frame":[]},"z":[[2,0,0,0]]}"#),
        ("domain", r#"{"op":"cartan","map":{"kind":"affine","a":[0,1,0,0],"b":[1,0,0,0],"c":[0,0,0,0]},"base":[[0,0,0,0]]}"#),
        ("contour", r#"{"op":"winding","loop":{"shape":"circle","a0":[0,0,0,0],"M":[0,1,0,0],"center":[0,0],"radius":1},"a":[1,0,0,0]}"#),
    ] {
        let out = cdconf(&[cmd], payload);
        assert_eq!(out.status.code(), Some(1), "{cmd} {payload}: {}", String::from_utf8_lossy(&out.stdout));
        assert_eq!(stdout_json(&out)["error"], "domain");
    }
}

#[test]
fn tol_flag_overrides_payload() {
    // rounding in the central differences leaves a similarity defect far above 1e-17
    let payload = r#"{"map":{"kind":"affine","a":[0.3,0.7,-1.1,0.2],"b":[1.3,-0.4,0.9,2.1],"c":[1,0,0,0]},"z":[0.3,0.2,-0.1,0.7],"tol":1e-3}"#;
    let loose = stdout_json(&cdconf(&["check-pc"], payload));
    let strict = stdout_json(&cdconf(&["check-pc", "--tol", "1e-17"], payload));
    assert_eq!(loose["status"], "Pseudoconformal");
    assert_ne!(strict["status"], "Pseudoconformal");
}

#[test]
fn argument_principle_through_the_cli() {
    let payload = r#"{"op":"zeros","map":{"kind":"zeros","a":[0,0,1,0],"zeros":[{"at":[0.2,0.1,0,0],"order":2},{"at":[-0.3,0,0,0],"order":1}]},
        "loop":{"shape":"circle","a0":[0,0,0,0],"M":[0,1,0,0],"center":[0,0],"radius":1}}"#;
    let v = stdout_json(&cdconf(&["contour"], payload));
    assert_eq!(v["count"], 3);
}
