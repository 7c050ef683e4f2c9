use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocycle-lab")).args(args).output().unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(lab(&[]).status.code(), Some(2));
    assert_eq!(lab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(lab(&["ez1-trend", "--n", "2..=4"]).status.code(), Some(2));
    assert_eq!(lab(&["ez1-trend", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(lab(&["betti-trend", "--p", "4", "--n", "6"]).status.code(), Some(2));
    assert_eq!(lab(&["homology", "--in", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(lab(&["sample", "--n", "5", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn corrupted_kernel_exits_with_one() {
    let out = lab(&["certify", "--quick", "--corrupt-kernel", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("kernel_certificate_n5,") && l.ends_with(",false")));
}

#[test]
fn homology_of_projective_plane() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rp2.json");
    std::fs::write(
        &path,
        r#"{"n":6,"triangles":[[1,2,3],[1,3,4],[1,4,5],[1,5,6],[1,2,6],[2,3,5],[3,4,6],[2,4,5],[3,5,6],[2,4,6]]}"#,
    )
    .unwrap();
    let out = lab(&["homology", "--in", path.to_str().unwrap(), "--p", "2", "--format", "json"]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["torsion_order"], "2");
    assert_eq!(r["dim_h1"], 1);
    assert_eq!(r["mg"], 1);
    assert_eq!(r["elementary_divisors"], serde_json::json!(["2"]));
}

#[test]
fn out_flag_writes_file_and_sample_json_parses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out = lab(&[
        "sample", "--model", "hypertree", "--n", "6", "--samples", "3", "--seed", "5", "--format", "json",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let xs: Vec<cocycle_core::TwoComplex> =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(xs.len(), 3);
    assert!(xs.iter().all(|x| x.face_count() == 10));
}

#[test]
fn graphon_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    // identity atom on Z/3: b = 0, rate = log(3)/2
    std::fs::write(&path, r#"{"group":[3],"part_measures":[1.0],"values":[[[1.0,0.0,0.0]]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let rate = lab(&["graphon", "rate", "--in", p, "--format", "json"]);
    let r: serde_json::Value = serde_json::from_slice(&rate.stdout).unwrap();
    assert!((r["rows"][0][1].as_f64().unwrap() - 0.5 * 3f64.ln()).abs() < 1e-12);
    let b = lab(&["graphon", "b", "--in", p]);
    assert_eq!(String::from_utf8(b.stdout).unwrap(), "quantity,value\nb,0e0\n");
    let c = lab(&["graphon", "convolve", "--in", p, "--with", p, "--format", "json"]);
    let c: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(c["values"], serde_json::json!([[[1.0, 0.0, 0.0]]]));
    let fk = lab(&["graphon", "fk", "--in", p, "--format", "json"]);
    let fk: serde_json::Value = serde_json::from_slice(&fk.stdout).unwrap();
    assert_eq!(fk["rounds"], serde_json::json!([]));
    let cut = lab(&["graphon", "cutnorm", "--in", p]);
    assert_eq!(String::from_utf8(cut.stdout).unwrap(), "cut_norm,exact\n1e0,true\n");
    std::fs::write(&path, r#"{"group":[3],"part_measures":[1.0],"values":[[[0.2,0.5,0.3]]]}"#).unwrap();
    assert_eq!(lab(&["graphon", "b", "--in", p]).status.code(), Some(2));
}
