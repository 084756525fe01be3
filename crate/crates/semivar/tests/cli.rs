use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn semivar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semivar"))
        .args(args)
        .output()
        .expect("run semivar")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad report ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn variation_of_product_function() {
    let out = semivar(&[
        "variation",
        &fixture("product.json"),
        "--family-config",
        &fixture("wiener1.json"),
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["status"], "computed");
    let v = &r["results"]["variation"];
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(v["argmax"]["pi"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["argmax"]["pi_star"], serde_json::json!([0, 1, 2]));
    assert_eq!(v["method"], "jordan-full-grid");
    assert_eq!(v["optimal"], true);
}

#[test]
fn constant_function_has_zero_variation_for_every_family() {
    for cfg in [
        "wiener1.json",
        "wiener2.json",
        "wiener_half.json",
        "riesz2.json",
        "waterman.json",
        "korenblum.json",
        "korenblum_dp.json",
    ] {
        let out = semivar(&[
            "variation",
            &fixture("constant_interval.json"),
            "--family-config",
            &fixture(cfg),
        ]);
        assert_eq!(code(&out), 0, "{cfg}");
        assert_eq!(report(&out)["results"]["variation"]["value"], 0.0, "{cfg}");
    }
}

#[test]
fn invalid_config_and_inputs_exit_2() {
    let cases: Vec<Vec<String>> = vec![
        vec![
            "variation".into(),
            fixture("product.json"),
            "--family-config".into(),
            fixture("riesz1.json"),
        ],
        vec!["variation".into(), fixture("product.json")],
        vec![
            "variation".into(),
            fixture("non_monotone.json"),
            "--family-config".into(),
            fixture("wiener1.json"),
        ],
        vec![
            "variation".into(),
            fixture("malformed.json"),
            "--family-config".into(),
            fixture("wiener1.json"),
        ],
        vec![
            "variation".into(),
            fixture("missing.json"),
            "--family-config".into(),
            fixture("wiener1.json"),
        ],
        vec![
            "variation".into(),
            fixture("product.json"),
            "--family-config".into(),
            fixture("wiener2.json"),
            "--method".into(),
            "jordan".into(),
        ],
        vec![
            "variation".into(),
            fixture("product.json"),
            "--family-config".into(),
            fixture("wiener2.json"),
            "--method".into(),
            "fastest".into(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = semivar(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error"));
    }
}

#[test]
fn size_guards_exit_3() {
    let big = semivar(&[
        "variation",
        &fixture("big_16x16.json"),
        "--family-config",
        &fixture("wiener2.json"),
        "--method",
        "bb",
    ]);
    assert_eq!(code(&big), 3);
    let brute = semivar(&[
        "variation",
        &fixture("grid_13x3.json"),
        "--family-config",
        &fixture("wiener2.json"),
        "--method",
        "brute",
    ]);
    assert_eq!(code(&brute), 3);

    // Auto falls back to greedy and says so.
    let auto = semivar(&[
        "variation",
        &fixture("big_16x16.json"),
        "--family-config",
        &fixture("wiener2.json"),
    ]);
    assert_eq!(code(&auto), 0);
    let v = &report(&auto)["results"]["variation"];
    assert_eq!(v["method"], "greedy");
    assert_eq!(v["optimal"], false);
}

#[test]
fn distances() {
    let wiener1 = fixture("wiener1.json");
    let same = semivar(&[
        "distance",
        &fixture("box_walk.json"),
        &fixture("box_walk.json"),
        "--family-config",
        &fixture("waterman.json"),
    ]);
    assert_eq!(code(&same), 0);
    assert_eq!(report(&same)["results"]["rho"], 0.0);
    assert_eq!(report(&same)["status"], "computed");

    let theta = semivar(&[
        "distance",
        &fixture("theta_0.json"),
        &fixture("theta_1.json"),
        "--family-config",
        &wiener1,
    ]);
    assert_eq!(code(&theta), 0);
    let rho = report(&theta)["results"]["rho"].as_f64().unwrap();
    assert!((rho - 1.0).abs() < 1e-12, "{rho}");

    let mismatch = semivar(&[
        "distance",
        &fixture("theta_0.json"),
        &fixture("product.json"),
        "--family-config",
        &wiener1,
    ]);
    assert_eq!(code(&mismatch), 2);
}

#[test]
fn verify_suites() {
    for (suite, seed, count) in [
        ("axioms", "42", "500"),
        ("search-oracle", "7", "100"),
        ("lemmas", "1", "1"),
        ("semigroup", "3", "200"),
    ] {
        let out = semivar(&["verify", suite, "--seed", seed, "--count", count]);
        assert_eq!(
            code(&out),
            0,
            "{suite}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
        let r = report(&out);
        assert_eq!(r["status"], "pass");
        assert_eq!(r["results"]["violations"], 0);
        assert!(!r["results"]["checks"].as_array().unwrap().is_empty());
    }
    let one_family = semivar(&[
        "verify",
        "lemmas",
        "--seed",
        "5",
        "--count",
        "20",
        "--family-config",
        &fixture("korenblum_dp.json"),
    ]);
    assert_eq!(code(&one_family), 0);
    let r = report(&one_family);
    assert_eq!(r["results"]["checks"].as_array().unwrap().len(), 2 * 4);
    assert!(r["inputs"]["family_config"].is_string());

    assert_eq!(code(&semivar(&["verify", "axioms", "--count", "3"])), 2);
    assert_eq!(code(&semivar(&["verify", "everything", "--seed", "1"])), 2);
    assert_eq!(
        code(&semivar(&[
            "verify", "axioms", "--seed", "1", "--count", "0"
        ])),
        2
    );
}

#[test]
fn precompact_theta_family_passes() {
    let out = semivar(&[
        "precompact",
        &fixture("theta_family.json"),
        "--epsilon",
        "0.1",
        "--family-config",
        &fixture("wiener1.json"),
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["status"], "pass");
    let res = &r["results"];
    assert!(res["centers"].as_array().unwrap().len() <= 11);
    assert_eq!(res["certificate"]["holds"], true);
    assert_eq!(res["verification"]["ok"], true);
    assert_eq!(res["members"], 101);
}

#[test]
fn precompact_singleton_and_failures() {
    let single = semivar(&[
        "precompact",
        &fixture("singleton_family.json"),
        "--epsilon",
        "0.01",
        "--family-config",
        &fixture("riesz2.json"),
    ]);
    assert_eq!(code(&single), 0);
    assert_eq!(
        report(&single)["results"]["centers"],
        serde_json::json!(["product"])
    );

    let ramp = semivar(&[
        "precompact",
        &fixture("ramp_family.json"),
        "--epsilon",
        "0.1",
        "--family-config",
        &fixture("wiener2.json"),
    ]);
    assert_eq!(code(&ramp), 0);
    let witness = &report(&ramp)["results"]["certificate"]["witness"];
    assert_eq!(witness["pi"], serde_json::json!([0, 2]));

    let fail = semivar(&[
        "precompact",
        &fixture("no_witness_family.json"),
        "--epsilon",
        "0.1",
        "--family-config",
        &fixture("wiener2.json"),
    ]);
    assert_eq!(code(&fail), 1);
    let r = report(&fail);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["results"]["note"], "no witness found");
    assert_eq!(r["results"]["certificate"]["holds"], false);
    assert!(r["results"]["verification"].is_null());
    let defect = r["results"]["certificate"]["defect"].as_f64().unwrap();
    assert!((defect - (2.0 - 2f64.sqrt())).abs() < 1e-12, "{defect}");

    let bad_eps = semivar(&[
        "precompact",
        &fixture("singleton_family.json"),
        "--epsilon",
        "-1",
        "--family-config",
        &fixture("wiener1.json"),
    ]);
    assert_eq!(code(&bad_eps), 2);
}

#[test]
fn reports_are_byte_deterministic_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["verify", "search-oracle", "--seed", "11", "--count", "10"];
    let first = semivar(&args);
    let second = semivar(&args);
    assert_eq!(first.stdout, second.stdout);

    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.display().to_string();
    with_out.extend(["--out", &p]);
    let third = semivar(&with_out);
    assert_eq!(code(&third), 0);
    assert!(third.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), first.stdout);
}

#[test]
fn variation_report_matches_golden() {
    let out = semivar(&[
        "variation",
        &fixture("box_walk.json"),
        "--family-config",
        &fixture("korenblum_dp.json"),
        "--method",
        "bb",
    ]);
    assert_eq!(code(&out), 0);
    let golden =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/variation_box_walk.json");
    if std::env::var_os("SEMIVAR_BLESS").is_some() {
        fs::create_dir_all(golden.parent().unwrap()).unwrap();
        fs::write(&golden, &out.stdout).unwrap();
    }
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        fs::read_to_string(&golden).unwrap()
    );
}
