//! End-to-end runs of the command-line binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_snmodes")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn modes_golden_n4() {
    let spec = data("n4.json");
    let output = run(&["modes", "-i", spec.to_str().unwrap()]);
    let got = stdout_json(&output);
    let golden: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("n4_modes.golden.json")).unwrap())
            .unwrap();
    assert_eq!(got, golden);
}

#[test]
fn modes_reports_five_roots_with_dpm_multiplicities() {
    let spec_json = std::fs::read_to_string(data("n4.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&spec_json).unwrap();
    value["N"] = serde_json::json!(10);
    let output = run(&["modes", "--spec-json", &value.to_string()]);
    let doc = stdout_json(&output);
    let roots = doc["roots"].as_object().unwrap();
    assert_eq!(roots.len(), 5);
    let mut mult: Vec<u64> = roots
        .values()
        .map(|r| r["multiplicity"].as_u64().unwrap())
        .collect();
    mult.sort_unstable();
    assert_eq!(mult, vec![1, 1, 9, 9, 35]);
}

#[test]
fn verify_is_deterministic_and_green() {
    let spec = data("n4.json");
    let first = run(&["verify", "-i", spec.to_str().unwrap(), "--seed", "7"]);
    let second = run(&["verify", "-i", spec.to_str().unwrap(), "--seed", "7"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "reports must be byte-identical");
    let doc: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(doc["report"]["pass"], true);
}

#[test]
fn exit_codes() {
    // Malformed JSON -> 2.
    let bad = run(&["modes", "--spec-json", "{not json"]);
    assert_eq!(bad.status.code(), Some(2));

    // Validation failure -> 3.
    let spec_json = std::fs::read_to_string(data("n4.json")).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&spec_json).unwrap();
    value["N"] = serde_json::json!(1);
    let invalid = run(&["modes", "--spec-json", &value.to_string()]);
    assert_eq!(invalid.status.code(), Some(3));
}

#[test]
fn motion_emits_complete_displacement_table() {
    let spec = data("n4.json");
    let output = run(&[
        "motion",
        "-i",
        spec.to_str().unwrap(),
        "--mode",
        "1+",
        "--xi",
        "1",
        "--value",
        "0.5",
    ]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // Comment, header, 4 radial rows, 6 angular rows.
    assert_eq!(lines.len(), 12);
    assert!(lines[0].starts_with("# spec"));
    assert_eq!(lines[1], "kind,i,j,displacement");

    // A two-row mode never moves radii.
    let output = run(&[
        "motion",
        "-i",
        spec.to_str().unwrap(),
        "--mode",
        "2",
        "--xi",
        "1",
    ]);
    let text = String::from_utf8(output.stdout).unwrap();
    for line in text.lines().filter(|l| l.starts_with("r,")) {
        let displacement: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(displacement, 0.0);
    }
}

#[test]
fn energy_and_phi0_agree_with_closed_forms() {
    let spec = data("n4.json");
    let ground = stdout_json(&run(&["energy", "-i", spec.to_str().unwrap()]));
    let e0 = ground["energy"].as_f64().unwrap();

    // Excite one 1+ quantum via an occupancy file.
    let occ_path = std::env::temp_dir().join("snmodes_cli_occ.json");
    std::fs::write(&occ_path, r#"[{"mu":"1+","n":1,"count":1}]"#).unwrap();
    let excited = stdout_json(&run(&[
        "energy",
        "-i",
        spec.to_str().unwrap(),
        "--occupancy",
        occ_path.to_str().unwrap(),
    ]));
    let e1 = excited["energy"].as_f64().unwrap();

    let modes = stdout_json(&run(&["modes", "-i", spec.to_str().unwrap()]));
    let omega = modes["roots"]["1+"]["omega"].as_f64().unwrap();
    let delta = modes["spec"]["delta"].as_f64().unwrap();
    assert!((e1 - e0 - delta * omega).abs() < 1e-12);

    // Ground-state wave function at the origin is the product of
    // (omega/pi)^(1/4) over all modes.
    let phi = stdout_json(&run(&["phi0", "-i", spec.to_str().unwrap()]));
    let value = phi["phi0"].as_f64().unwrap();
    let product: f64 = modes["modes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["omega"].as_f64().unwrap() / std::f64::consts::PI).powf(0.25))
        .product();
    assert!((value - product).abs() < 1e-12 * product);
}

#[test]
fn emit_w_block_csv() {
    let spec = data("n4.json");
    let out = std::env::temp_dir().join("snmodes_cli_w.csv");
    let request = format!("two-row:gamma:{}", out.display());
    let output = run(&[
        "modes",
        "-i",
        spec.to_str().unwrap(),
        "--emit-w",
        &request,
        "-o",
        std::env::temp_dir()
            .join("snmodes_cli_modes.json")
            .to_str()
            .unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# W [N-2,2] gamma"));
    assert_eq!(text.lines().count(), 4); // comment + header + 2 rows
}
