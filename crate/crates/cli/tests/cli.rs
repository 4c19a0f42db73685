use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hochgysin"));
    c.env_remove("HOCHGYSIN_SEED");
    c
}

fn run(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut cmd = bin();
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(bytes) = stdin {
        // the process may exit before reading, e.g. on a usage error
        let _ = pipe.write_all(bytes);
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/massey_fixture.dga.json")
}

fn torus_dga(dir: &Path, n: usize) -> PathBuf {
    let scx = run(&["build", "torus", "--n", &n.to_string()], None);
    assert!(scx.status.success());
    let dga = run(&["cochains", "--ring", "Z"], Some(&scx.stdout));
    assert!(dga.status.success());
    let path = dir.join(format!("t{n}.dga.json"));
    std::fs::write(&path, &dga.stdout).unwrap();
    path
}

#[test]
fn build_cochains_validate_pipeline() {
    let scx = run(&["build", "torus", "--n", "2"], None);
    let dga = run(&["cochains", "--ring", "Z"], Some(&scx.stdout));
    let out = run(&["validate"], Some(&dga.stdout));
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["exit_status"], 0);
    assert!(r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .all(|v| v["passed"] == true));
    assert_eq!(r["inputs"]["-"].as_str().unwrap().len(), 64);
}

#[test]
fn gysin_theorem_on_torus() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = torus_dga(dir.path(), 2);
    let out = run(
        &[
            "gysin",
            t2.to_str().unwrap(),
            "--c",
            "2:[1]",
            "--check-th",
            "--split",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let verdicts = r["verdicts"].as_array().unwrap();
    let th = verdicts
        .iter()
        .find(|v| v["check"] == "extension class = image of [θ]")
        .unwrap();
    assert_eq!(th["passed"], true);
    assert!(verdicts
        .iter()
        .any(|v| v["check"] == "splitting is H-linear" && v["passed"] == true));
    assert_eq!(r["result"]["cone_cohomology"]["2"]["free_rank"], 2);
}

#[test]
fn gysin_torsion_shows_in_cone() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = torus_dga(dir.path(), 2);
    let out = run(&["gysin", t2.to_str().unwrap(), "--c", "2:[3]"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        report(&out)["result"]["cone_cohomology"]["2"]["torsion"],
        serde_json::json!([3])
    );
}

#[test]
fn non_triple_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = torus_dga(dir.path(), 2);
    let out = run(
        &[
            "massey",
            t2.to_str().unwrap(),
            "--x",
            "1:[1,0]",
            "--y",
            "1:[0,1]",
            "--z",
            "1:[1,0]",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert!(r["result"]["error"]
        .as_str()
        .unwrap()
        .contains("not a Massey triple"));
}

#[test]
fn massey_fixture_product() {
    let f = fixture();
    let out = run(
        &[
            "massey",
            f.to_str().unwrap(),
            "--x",
            "1:[1,0,0]",
            "--y",
            "1:[0,1,0]",
            "--z",
            "1:[0,0,1]",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["representative"], serde_json::json!([-1]));
    assert_eq!(r["result"]["contains_zero"], false);
}

#[test]
fn theta_class_exit_codes() {
    let f = fixture();
    let plain = run(&["theta-class", f.to_str().unwrap()], None);
    assert_eq!(plain.status.code(), Some(0));
    assert_eq!(report(&plain)["result"]["trivial"], false);
    let strict = run(
        &["theta-class", f.to_str().unwrap(), "--require-trivial"],
        None,
    );
    assert_eq!(strict.status.code(), Some(1));
    assert!(report(&strict)["witnesses"]["obstruction"]["certificate"].is_object());
}

#[test]
fn broken_algebra_fails_validation() {
    let f = fixture();
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(f).unwrap()).unwrap();
    v["unit"] = serde_json::json!([2]);
    let out = run(&["validate"], Some(v.to_string().as_bytes()));
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert!(r["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v["passed"] == false));
}

#[test]
fn malformed_inputs_exit_2() {
    assert_eq!(run(&["validate"], Some(b"{}")).status.code(), Some(2));
    assert_eq!(
        run(&["validate", "/nonexistent/file.json"], None)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["cochains", "--ring", "F4"], Some(b"{}"))
            .status
            .code(),
        Some(2)
    );
    let f = fixture();
    let bad = run(&["gysin", f.to_str().unwrap(), "--c", "1[1,0,0]"], None);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn reports_are_byte_stable_and_seed_env_applies() {
    let dir = tempfile::tempdir().unwrap();
    let t2 = torus_dga(dir.path(), 2);
    let p = t2.to_str().unwrap();
    let a = run(&["theta", p, "--seed", "5"], None);
    let b = run(&["theta", p, "--seed", "5"], None);
    assert_eq!(a.stdout, b.stdout);
    let env = bin()
        .args(["theta", p])
        .env("HOCHGYSIN_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
    let s = run(&["sections", p, "--seed", "5"], None);
    let sp = dir.path().join("t2.sections.json");
    std::fs::write(&sp, &s.stdout).unwrap();
    let reuse = run(&["theta", p, "--sections", sp.to_str().unwrap()], None);
    assert_eq!(reuse.stdout, a.stdout);
    let g1 = run(
        &["gysin", p, "--c", "2:[2]", "--check-th", "--seed", "3"],
        None,
    );
    let g2 = run(
        &["gysin", p, "--c", "2:[2]", "--check-th", "--seed", "3"],
        None,
    );
    assert_eq!(g1.stdout, g2.stdout);
}

#[test]
fn torus_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.hcochain.json");
    let out = run(
        &[
            "torus",
            "--n",
            "2",
            "--seed",
            "1",
            "--emit-witness",
            w.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["h_ranks"], serde_json::json!([1, 2, 1]));
    let a: Value = serde_json::from_str(&std::fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(a["arity"], 2);
}

#[test]
fn cohomology_report_lists_basis() {
    let scx = run(&["build", "sphere", "--m", "2"], None);
    let dga = run(&["cochains", "--ring", "F3"], Some(&scx.stdout));
    let out = run(&["cohomology"], Some(&dga.stdout));
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["ranks"], serde_json::json!([1, 0, 1]));
    assert_eq!(r["result"]["ring"], "F3");
}
