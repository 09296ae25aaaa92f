use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_writhe"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value_column(csv: &str, method: &str) -> f64 {
    csv.lines()
        .find(|l| l.starts_with(method))
        .and_then(|l| l.split(',').nth(3))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no {method} row in {csv}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn writhe_of_circle() {
    let dir = scratch("circle");
    let input = write(&dir, "c.json", r#"{"kind":"analytic","name":"circle","radius":1.0,"N":512}"#);
    let out = run(&["writhe", "--input", &input]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("method,N,band,value,oracle_delta\n"));
    assert!(value_column(&text, "quadrature").abs() < 1e-6);
    let delta: f64 = text.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!(delta < 1e-9);
}

#[test]
fn fix_writhe_round_trips_through_oracle() {
    let dir = scratch("fix");
    let input = write(
        &dir,
        "t.json",
        r#"{"kind":"analytic","name":"torus_knot","p":2,"q":3,"R":2.0,"r":1.0,"N":2048}"#,
    );
    let out_dir = dir.join("out");
    let out = run(&["fix-writhe", "--input", &input, "--target", "0.0", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let corrected = out_dir.join("corrected.json");
    let again = run(&["writhe", "--input", corrected.to_str().unwrap()]);
    assert!(again.status.success());
    assert!(value_column(&stdout(&again), "polygonal_exact").abs() < 1e-2);
    let trace: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["run"]["seed"], 20240601);
    assert_eq!(trace["trace"]["helix"]["n"], 4);
    assert_eq!(trace["trace"]["locality_ok"], true);
}

#[test]
fn negative_target_accepted() {
    let dir = scratch("neg");
    let input = write(
        &dir,
        "t.json",
        r#"{"kind":"analytic","name":"torus_knot","p":3,"q":2,"R":2.0,"r":0.5,"N":2048}"#,
    );
    let out = run(&["fix-writhe", "--input", &input, "--target", "-0.25"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fuller_writes_reports() {
    let dir = scratch("fuller");
    let input = write(
        &dir,
        "t.json",
        r#"{"kind":"analytic","name":"torus_knot","p":2,"q":5,"R":2.0,"r":1.0,"N":1024}"#,
    );
    let out_dir = dir.join("out");
    let out = run(&["fuller", "--input", &input, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("N,writhe,area,fuller_lhs,fuller_rhs,residual_mod2\n"));
    let ind = fs::read_to_string(out_dir.join("indicatrix.json")).unwrap();
    assert!(ind.starts_with(r#"{"kind":"samples","closed":true,"points":"#));
}

#[test]
fn errors_are_machine_readable() {
    let out = run(&["writhe", "--input", "/nonexistent/curve.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");

    let dir = scratch("errors");
    let bad = write(&dir, "bad.json", r#"{"kind":"analytic","name":"torus_knot","p":2,"q":4,"R":2.0,"r":1.0,"N":512}"#);
    let out = run(&["writhe", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "construction");

    let out = run(&["writhe"]);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");
}

fn family_manifest(dir: &Path) -> String {
    write(
        dir,
        "family.json",
        r#"{"space":{"kind":"sphere","dim":1,"nodes":8},"generator":{"name":"flexed_trefoil","N":512}}"#,
    )
}

#[test]
fn family_correct_outputs() {
    let dir = scratch("family");
    let manifest = family_manifest(&dir);
    let out_dir = dir.join("out");
    let out = run(&["family-correct", "--input", &manifest, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("node_id,dist,wr_raw,wr_tilde,w,wr_final\n"));
    assert_eq!(summary.lines().count(), 9);
    let run_meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run.json")).unwrap()).unwrap();
    assert!(run_meta["max_deviation"].as_f64().unwrap() < 1e-2);
    assert_eq!(run_meta["turns"], 2);
    // The written family reads back and can be processed again.
    let again = run(&["writhe", "--input", out_dir.join("corrected/node_0003.json").to_str().unwrap()]);
    assert!(again.status.success());
}

#[test]
fn homotopy_half_is_tilde_family() {
    let dir = scratch("homotopy");
    let manifest = family_manifest(&dir);
    let out = run(&["homotopy-sample", "--input", &manifest, "--t", "0.5"]);
    assert!(out.status.success());
    let fam = run(&["family-correct", "--input", &manifest]);
    let tilde: Vec<String> = stdout(&fam)
        .lines()
        .skip(1)
        .take(8)
        .map(|l| l.split(',').nth(3).unwrap().to_string())
        .collect();
    let half: Vec<String> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().to_string())
        .collect();
    assert_eq!(half.len(), 8);
    // Node 0 carries no insertion; elsewhere Ω at 1/2 is γ̃ with the helix profile.
    assert_eq!(half[0], tilde[0]);
    for (h, t) in half.iter().zip(&tilde) {
        let (h, t): (f64, f64) = (h.parse().unwrap(), t.parse().unwrap());
        assert!((h - t).abs() < 1e-9, "{h} vs {t}");
    }
}

#[test]
fn homotopy_rejects_time_out_of_range() {
    let dir = scratch("homotopy_bad");
    let manifest = family_manifest(&dir);
    let out = run(&["homotopy-sample", "--input", &manifest, "--t", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "domain");
}

#[test]
fn reports_are_deterministic() {
    let dir = scratch("determinism");
    let manifest = family_manifest(&dir);
    let a = dir.join("a");
    let b = dir.join("b");
    for d in [&a, &b] {
        let out = run(&["family-correct", "--input", &manifest, "--out", d.to_str().unwrap(), "--seed", "7"]);
        assert!(out.status.success());
    }
    for name in ["summary.csv", "run.json", "traces.json", "corrected/node_0005.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}
