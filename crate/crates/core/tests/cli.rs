use std::path::PathBuf;

use serde_json::Value;
use varlp::cli::{run, EXIT_CERTIFICATE_FAILED, EXIT_INVALID, EXIT_OK};

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(name)
        .display()
        .to_string()
}

fn varlp(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("varlp").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json_of(args: &[&str]) -> Value {
    let (code, out, err) = varlp(args);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn classify_prints_flags_and_scalars() {
    let v = json_of(&["classify", "--spec", &example("nakano.json")]);
    assert_eq!(v["nic_eligible"], true);
    assert_eq!(v["reflexive"], false);
    assert_eq!(v["scalars"]["p_plus"], 2.0);
    assert!(v["witnesses"].is_object());
}

#[test]
fn infinite_scalars_serialize_as_inf() {
    let v = json_of(&["classify", "--spec", &example("growing.json")]);
    assert_eq!(v["scalars"]["p_plus"], "inf");
    assert_eq!(v["isometric_linfty"], true);
}

#[test]
fn norm_and_rho() {
    let spec = example("mixed.json");
    let f = example("mixed_fn.json");
    let n = json_of(&["norm", "--spec", &spec, "--fn", &f]);
    let norm = n["norm"].as_f64().unwrap();
    let lo = n["bracket"][0].as_f64().unwrap();
    assert!(lo <= norm && norm - lo <= 1e-12 * norm);
    let r = json_of(&["rho", "--spec", &spec, "--fn", &f]);
    // 0.75^1.5 + 0.5·2^3 + 0.5
    let want = 0.75f64.powf(1.5) + 4.0 + 0.5;
    assert!((r["rho"].as_f64().unwrap() - want).abs() <= 1e-12 * want);
}

#[test]
fn certify_nakano_separation_passes_and_is_deterministic() {
    let args = [
        "certify",
        "--construct",
        "nakano",
        "--n",
        "16",
        "--check",
        "separation",
        "--k",
        "2,4",
        "--samples",
        "50",
        "--seed",
        "7",
    ];
    let (code, first, _) = varlp(&args);
    assert_eq!(code, EXIT_OK);
    let (_, second, _) = varlp(&args);
    assert_eq!(first, second);
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn failing_certificate_exits_one_with_witness() {
    // Nakano spaces carry no asymptotically isometric copy of l1
    let (code, out, _) = varlp(&[
        "aic",
        "--construct",
        "nakano",
        "--n",
        "64",
        "--mode",
        "test",
        "--samples",
        "60",
    ]);
    assert_eq!(code, EXIT_CERTIFICATE_FAILED);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pass"], false);
    assert!(!v["reports"][0]["witness"].is_null());
}

#[test]
fn aic_refutation_passes_on_nakano() {
    let v = json_of(&[
        "aic",
        "--construct",
        "nakano",
        "--n",
        "2000",
        "--p-seq",
        r#"{"kind":"harmonic_approach","a":0.5,"b":1}"#,
    ]);
    assert_eq!(v["pass"], true);
    assert!(v["reports"][0]["parameters"]["crossing_n"].is_u64());
}

#[test]
fn linfty_certificate_on_growing_exponent() {
    let v = json_of(&[
        "certify",
        "--spec",
        &example("growing.json"),
        "--construct",
        "linfty",
        "--n",
        "3",
        "--j",
        "12",
        "--samples",
        "50",
    ]);
    assert_eq!(v["pass"], true);
}

#[test]
fn iterate_contraction_converges() {
    let v = json_of(&[
        "iterate",
        "--spec",
        &example("mixed.json"),
        "--operator",
        &example("contraction.json"),
        "--x0",
        &example("mixed_fn.json"),
        "--tol",
        "1e-9",
    ]);
    assert_eq!(v["converged"], true);
    assert_eq!(v["residuals_nonincreasing"], true);
}

#[test]
fn lipschitz_of_contraction() {
    let v = json_of(&[
        "lipschitz",
        "--spec",
        &example("mixed.json"),
        "--operator",
        &example("contraction.json"),
        "--samples",
        "100",
    ]);
    assert!(v["max_ratio"].as_f64().unwrap() <= 0.5 + 1e-9);
    assert_eq!(v["nonexpansive"], true);
}

#[test]
fn different_seeds_sample_different_points() {
    let args = |extra: &[&'static str]| {
        let mut a = vec![
            "lipschitz",
            "--spec",
            "",
            "--operator",
            "",
            "--samples",
            "20",
        ];
        a.extend_from_slice(extra);
        a
    };
    let spec = example("mixed.json");
    let op = example("isometry_ball.json");
    let mut a = args(&["--seed", "11"]);
    a[2] = &spec;
    a[4] = &op;
    let (_, with_flag, _) = varlp(&a);
    let (_, other, _) = varlp(&{
        let mut b = args(&["--seed", "12"]);
        b[2] = &spec;
        b[4] = &op;
        b
    });
    assert_ne!(with_flag, other);
}

#[test]
fn invalid_inputs_exit_two() {
    let (code, out, err) = varlp(&["classify"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.is_empty() && err.contains("--spec"));

    let (code, _, err) = varlp(&["classify", "--spec", "/nonexistent.json"]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("cannot read"));

    let (code, _, _) = varlp(&["no-such-verb"]);
    assert_eq!(code, EXIT_INVALID);

    let (code, _, err) = varlp(&[
        "norm",
        "--spec",
        &example("mixed.json"),
        "--fn",
        &example("mixed_fn.json"),
        "--tol",
        "0.5",
    ]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("tol"), "{err}");

    let (code, _, _) = varlp(&["aic", "--construct", "nakano", "--eps-c", "1.5"]);
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, err) = varlp(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("classify") && err.is_empty());
}
