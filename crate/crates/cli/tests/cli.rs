use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use wonder_cli::input::{load_arrangement, load_fan, parse_phase};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn wonder(args: &[&str]) -> Output {
    let arr = fixture("running.arr.json");
    let fan = fixture("running.fan.json");
    Command::new(env!("CARGO_BIN_EXE_wonder"))
        .arg("--arrangement")
        .arg(&arr)
        .arg("--fan")
        .arg(&fan)
        .args(args)
        .env_remove("WONDER_THREADS")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn bundled_fixtures_parse() {
    let (arr, lp) = load_arrangement(&fixture("running.arr.json")).unwrap();
    assert_eq!(arr.subtori().len(), 3);
    assert_eq!(lp.poset.len(), 10);
    for l in ["L1", "L2", "L3", "P1", "P2", "P3"] {
        assert!(lp.poset.index_of(l).is_some(), "{l}");
    }
    assert_eq!(
        load_fan(&fixture("running.fan.json")).unwrap().rays().len(),
        14
    );
}

#[test]
fn phases_are_exact() {
    assert_eq!(parse_phase("1/2").unwrap().to_string(), "1/2");
    assert_eq!(parse_phase("5/3").unwrap().to_string(), "2/3");
    assert_eq!(parse_phase("-1/3").unwrap().to_string(), "2/3");
    assert!(parse_phase("0.5").is_err());
    assert!(parse_phase("1e3").is_err());
}

#[test]
fn missing_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fan.json");
    fs::write(&path, r#"{"ambient_rank": 1, "rays": [[1], [-1]]}"#).unwrap();
    let err = format!("{:#}", load_fan(&path).unwrap_err());
    assert!(err.contains("max_cones"), "{err}");
    let o = Command::new(env!("CARGO_BIN_EXE_wonder"))
        .arg("--fan")
        .arg(&path)
        .arg("toric-betti")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_cones"));
}

#[test]
fn non_primitive_rays_are_normalised() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fan.json");
    fs::write(
        &path,
        r#"{"ambient_rank": 1, "rays": [[2], [-1]], "max_cones": [[0], [1]]}"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_wonder"))
        .arg("--fan")
        .arg(&path)
        .arg("toric-betti")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not primitive"));
    assert_eq!(
        json(&o)["result"]["betti"]["value"],
        serde_json::json!([1, 1])
    );
}

#[test]
fn decimal_phase_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("arr.json");
    fs::write(
        &path,
        r#"{"ambient_rank": 1, "subtori": [{"label": "p", "chars": [[1]], "phase": ["0.5"]}]}"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_wonder"))
        .arg("--arrangement")
        .arg(&path)
        .arg("poset")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("decimals"));
}

#[test]
fn rank_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fan.json");
    fs::write(
        &path,
        r#"{"ambient_rank": 1, "rays": [[1], [-1]], "max_cones": [[0], [1]]}"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_wonder"))
        .arg("--arrangement")
        .arg(fixture("running.arr.json"))
        .arg("--fan")
        .arg(&path)
        .arg("model-betti")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ambient rank"));
}

#[test]
fn poset_command() {
    let o = wonder(&["poset"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["result"]["count"], 10);
}

#[test]
fn minimal_building_set_has_six_labels() {
    let o = wonder(&["building"]);
    let r = &json(&o)["result"];
    assert_eq!(r["members"].as_array().unwrap().len(), 6);
    assert_eq!(r["sizes"]["min_well_connected"], 9);
    let o = wonder(&[
        "--building",
        fixture("running.building.json").to_str().unwrap(),
        "building",
    ]);
    assert_eq!(json(&o)["result"]["members"][5], "a");
}

#[test]
fn blowup_command() {
    let o = wonder(&["blowup"]);
    let r = &json(&o)["result"];
    assert_eq!(r["count"], 21);
    assert_eq!(r["locally_boolean"], true);
}

#[test]
fn model_betti_of_running_fixtures() {
    let o = wonder(&["model-betti", "--deterministic"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(
        v["result"]["betti"]["value"],
        serde_json::json!([1, 15, 15, 1])
    );
    assert_eq!(
        v["result"]["betti"]["routes"],
        serde_json::json!(["escalier", "oracle", "enumeration"])
    );
    assert_eq!(v["result"]["torsion"], serde_json::json!([]));
}

#[test]
fn reports_are_deterministic() {
    let a = wonder(&["admissible", "--deterministic"]);
    let b = wonder(&["admissible", "--deterministic"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["generated_at"].is_null());
    assert!(json(&wonder(&["poset"]))["generated_at"].is_u64());
}

#[test]
fn recursion_at_rank_one_member() {
    let o = wonder(&["verify", "--recursions", "--last", "a"]);
    assert_eq!(o.status.code(), Some(0));
    for r in json(&o)["result"]["recursions"].as_array().unwrap() {
        assert_eq!(r["d"], 1);
        assert_eq!(r["lhs"], r["rhs"]);
        assert!(r["correction"].as_array().unwrap().iter().all(|x| x == 0));
    }
}

#[test]
fn bad_last_member_is_an_input_error() {
    assert_eq!(wonder(&["verify", "--last", "P1"]).status.code(), Some(2));
    assert_eq!(wonder(&["verify", "--last", "L1"]).status.code(), Some(2));
}

#[test]
fn threads_variable_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_wonder"))
            .arg("--arrangement")
            .arg(fixture("running.arr.json"))
            .arg("poset")
            .env("WONDER_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("4").status.code(), Some(0));
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn out_and_table_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let o = wonder(&[
        "toric-betti",
        "--format",
        "table",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.contains("H⁰"));
    assert!(text.contains("status: ok"));
}
