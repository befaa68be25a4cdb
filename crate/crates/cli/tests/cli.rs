use serde_json::Value;
use std::f64::consts::PI;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_superint"));
    cmd.args(args).env_remove("SUPERINT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}{out}");
    assert_eq!(out.trim_end().lines().count(), 1, "one line of JSON");
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn superball_volume_at_superdimension_one() {
    let v = json(&["volume", "--m", "3", "--n", "1", "--phase", "-(X2) - 1"]);
    assert!((num(&v, "value") - 2.0).abs() < 1e-12);
    assert!((num(&v, "closed_form") - 2.0).abs() < 1e-12);
    assert_eq!(v["M"], 1);
    assert_eq!(v["status"], "ok");
}

#[test]
fn paraboloid_area_through_the_axis_flag() {
    let v = json(&["surface", "--m", "3", "--n", "0", "--phase", "x1^2+x2^2 - x3", "--constraint", "x3 - 1", "--axis", "x3"]);
    assert!((num(&v, "value") - 5.3304135).abs() < 1e-6, "{v}");
    assert_eq!(v["shape"], "paraboloid");
    // the same surface with x2 as the axis
    let w = json(&["surface", "--m", "3", "--phase", "x1^2+x3^2 - x2", "--constraint", "x2 - 1", "--axis", "x2"]);
    assert!((num(&w, "value") - num(&v, "value")).abs() < 1e-10);
}

#[test]
fn catalog_entries() {
    let v = json(&["catalog", "hyperboloid", "volume", "--m", "3", "--n", "0", "--param", "h=1"]);
    assert!((num(&v, "value") - 8.0 * PI / 3.0).abs() < 1e-12);
    let v = json(&["catalog", "superball", "volume", "--m", "2", "--n", "2"]);
    assert_eq!(num(&v, "value"), 0.0);
    let v = json(&["catalog", "paraboloid", "area", "--m", "2", "--n", "0", "--param", "h=1"]);
    assert!((num(&v, "value") - 2.9578857).abs() < 1e-7);
    let v = json(&["catalog", "paraboloid", "area", "--m", "2", "--param", "h=1", "--engine"]);
    assert!(num(&v, "deviation") < 1e-6, "{v}");
    assert_ne!(v["backend"], "closed-form");
}

#[test]
fn csv_and_table_output() {
    let (code, out, _) = run(&["catalog", "superball", "area", "--m", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.trim_end().lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("schema,command,"));
    let (code, out, _) = run(&["catalog", "superball", "area", "--m", "3", "--pretty"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l.starts_with("value")));
}

#[test]
fn problem_file_with_overrides() {
    let dir = std::env::temp_dir().join(format!("superint-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ball.txt");
    std::fs::write(&path, "# unit ball\nm = 3\nn = 0\nphase = x1^2 + x2^2 + x3^2 - 1\nintegrand = x3^2\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["volume", "--file", p]);
    assert!((num(&v, "value") - 4.0 * PI / 15.0).abs() < 1e-10);
    assert!(v["closed_form"].is_null());
    let v = json(&["volume", "--file", p, "--integrand", "1"]);
    assert!((num(&v, "value") - 4.0 * PI / 3.0).abs() < 1e-10);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn specification_errors_exit_with_three() {
    for args in [
        vec!["volume", "--phase", "x1"],
        vec!["volume", "--m", "2", "--phase", "x1^2 + q1"],
        vec!["volume", "--m", "2", "--phase", "x1^2 + x2^2 - 1", "--constraint", "q1"],
        vec!["volume", "--m", "2", "--phase", "x1^2 + x2^2 - 1", "--backend", "magic"],
        vec!["volume", "--m", "2", "--phase", "x1^2 + x2^2 - 1", "--box", "0:1"],
        vec!["catalog", "torus", "volume", "--m", "2"],
        vec!["verify", "nonsense"],
        vec!["frobnicate"],
    ] {
        let (code, _, err) = run(&args);
        assert_eq!(code, 3, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn tolerance_failure_exits_with_two() {
    let (code, out, _) = run(&["volume", "--m", "2", "--phase", "x1^2+x2^2-1", "--tol", "1e-20"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["status"], "tolerance");
}

#[test]
fn oriented_surface_components() {
    let v = json(&["surface", "--oriented", "--m", "2", "--n", "1", "--phase", "-(X2) - 1"]);
    let comps = v["components"].as_object().unwrap();
    assert!(!comps.is_empty());
    assert!(comps.values().all(|c| c.as_f64().unwrap().abs() < 1e-10), "{v}");
}

#[test]
fn pizzetti_stokes_and_cauchy_pompeiu() {
    let v = json(&["pizzetti", "--m", "3", "--n", "1", "--integrand", "x1^2*x2^2 + q1*q2*x3^2"]);
    assert!(num(&v, "deviation") < 1e-10);
    let v = json(&["stokes", "--m", "2", "--n", "1", "--integrand", "x1 + q1*q2", "--right", "x2^2"]);
    assert!(num(&v, "deviation") < 1e-8);
    let v = json(&["cauchy-pompeiu", "--m", "2", "--n", "1", "--integrand", "1 + x1*x2 + q1*q2*x1", "--param", "y=0.2,-0.1"]);
    assert_eq!(v["inside"], true);
    assert!((num(&v, "value") - 0.98).abs() < 1e-6);
    let v = json(&["cauchy-pompeiu", "--m", "2", "--integrand", "1 + x1", "--param", "y=1.5,0.5"]);
    assert_eq!(v["inside"], false);
    assert!(num(&v, "value").abs() < 1e-8);
}

#[test]
fn verify_is_independent_of_the_thread_count() {
    let strip = |out: &str| -> Vec<(String, String)> {
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| (r["status"].to_string(), r["worst_deviation"].to_string()))
            .collect()
    };
    let (c1, a, _) = run(&["verify", "phase-invariance", "--threads", "1"]);
    let (c2, b, _) = run_env(&["verify", "7"], &[("SUPERINT_THREADS", "3")]);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(strip(&a), strip(&b));
    let (code, out, _) = run(&["verify", "jets", "--pretty"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("PASS criterion 11"));
}
