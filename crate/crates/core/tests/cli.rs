use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_origami-kz"))
}

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn torus_check_theorem_passes() {
    let (code, out) = run(&["check-theorem", "--input", &corpus("torus")]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "pass");
    for c in v["result"]["claims"].as_array().unwrap() {
        assert!(c["status"] == "pass" || c["status"] == "not-computed", "{c}");
    }
}

#[test]
fn wollmilchsau_report_is_byte_identical() {
    let args = ["check-theorem", "--input", &corpus("wollmilchsau"), "--seed", "3"];
    let (code, a) = run(&args);
    assert_eq!(code, 0, "{a}");
    let (_, b) = run(&args);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let claims = v["result"]["claims"].as_array().unwrap();
    let get = |id: &str| claims.iter().find(|c| c["id"] == id).unwrap()["status"].clone();
    assert_eq!(get("tangent-orthogonal-to-forni"), "pass");
    assert_eq!(get("hodge-orthogonality"), "not-computed");
}

#[test]
fn malformed_inputs_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let not_perm = write(dir.path(), "a.json", r#"{"n": 3, "h": [1, 1, 2], "v": [1, 2, 3]}"#);
    let (code, out) = run(&["stratum", "--input", &not_perm]);
    assert_eq!(code, 64);
    assert!(out.contains("\\\"h\\\""), "{out}");
    let syntax = write(dir.path(), "b.json", "{\n \"n\": 2,\n \"h\": [2, 1],\n \"v\": [1 2]\n}");
    let (code, out) = run(&["stratum", "--input", &syntax]);
    assert_eq!(code, 64);
    assert!(out.contains("line 4"), "{out}");
    assert_eq!(run(&["stratum", "--input", "/no/such/file"]).0, 64);
    assert_eq!(run(&["stratum"]).0, 64);
    assert_eq!(run(&["stratum", "--input", &corpus("torus"), "--set", "nokey=1"]).0, 64);
    assert_eq!(run(&["homology", "--input", &corpus("torus"), "--format", "csv"]).0, 64);
}

#[test]
fn holonomy_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = r#"{"pairing": [["0","1","0","0"],["-1","0","0","0"],["0","0","0","1"],["0","0","-1","0"]],
        "a": ["1","0","0","0"], "b": ["0","1","0","0"], "delta": ["0","0","1","0"], "eps": "1/2", "v": ["0","0","0","-3/2"]}"#;
    let (code, out) = run(&["holonomy", "--input", &write(dir.path(), "h.json", good)]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"]["defect"], serde_json::json!(["0", "0", "3/4", "0"]));
    let bad = good.replace(r#""delta": ["0","0","1","0"]"#, r#""delta": ["0","1","1","0"]"#);
    assert_eq!(run(&["holonomy", "--input", &write(dir.path(), "bad.json", &bad)]).0, 64);
}

#[test]
fn tiny_norm_cap_is_inconclusive() {
    let (code, out) = run(&["forni", "--input", &corpus("wollmilchsau"), "--norm-cap", "0.5"]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("inconclusive"));
}

#[test]
fn config_file_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# quick run\nsteps = 2000\nseed = 5\nformat = csv\n");
    let (code, out) = run(&["lyapunov", "--input", &corpus("torus"), "--config", &cfg]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("index,estimate,stderr,steps,seed\n"));
    assert_eq!(out.lines().count(), 3);
    let outfile = dir.path().join("r.txt");
    let (code, _) = run(&["stratum", "--input", &corpus("l-shape"), "--format", "text", "--out", outfile.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(std::fs::read_to_string(outfile).unwrap().contains("kappa: (2)"));
}
