use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hilbert-teich-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hilbert-teich"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HILBERT_TEICH_THREADS")
        .output()
        .expect("binary runs")
}

fn read_csv(path: PathBuf) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn summary(out: &Path, command: &str) -> Vec<Value> {
    serde_json::from_str(&fs::read_to_string(out.join(format!("{command}_summary.json"))).unwrap()).unwrap()
}

fn all_pass(claims: &[Value]) -> bool {
    claims.iter().all(|c| c["pass"].as_bool().unwrap())
}

#[test]
fn ray_example_has_64_rows_and_passes() {
    let out = out_dir("ray");
    let o = run(&["ray", "--slope", "1/0", "--weight", "1", "--tmax", "200", "--steps", "64"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(out.join("ray.csv"));
    assert_eq!(
        header,
        ["t", "s", "l_eta1", "l_eta2", "l_eta3", "f_1", "f_2", "f_3", "d_hilbert_from_base", "defect"]
    );
    assert_eq!(rows.len(), 64);
    assert!((rows[63][0] - 200.0).abs() < 1e-12);
    assert!((rows[0][0] - 200.0 / 1024.0).abs() < 1e-12);
    // geometric grid: s advances by ½ log of the t ratio, 5 log(2)/63 per row
    let ds = 5.0 * 2f64.ln() / 63.0;
    for w in rows.windows(2) {
        assert!((w[1][1] - w[0][1] - ds).abs() < 1e-12);
    }
    for r in &rows {
        assert!((r[9] - (r[8] - r[1]).abs()).abs() < 1e-12);
    }
    let claims = summary(&out, "ray");
    assert!(all_pass(&claims));
    let printed: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(printed, claims);
}

#[test]
fn axioms_is_byte_deterministic() {
    let (a, b) = (out_dir("axioms-a"), out_dir("axioms-b"));
    let oa = run(&["axioms", "--seed", "7"], &a);
    let ob = run(&["axioms", "--seed", "7"], &b);
    assert!(oa.status.success() && ob.status.success());
    assert_eq!(oa.stdout, ob.stdout);
    for f in ["axioms.csv", "axioms_summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    let c = out_dir("axioms-c");
    run(&["axioms", "--seed", "8"], &c);
    assert_ne!(fs::read(a.join("axioms.csv")).unwrap(), fs::read(c.join("axioms.csv")).unwrap());
}

#[test]
fn thread_cap_does_not_change_output() {
    let (a, b) = (out_dir("threads-a"), out_dir("threads-b"));
    run(&["bounds", "--slope", "2/1"], &a);
    let o = Command::new(env!("CARGO_BIN_EXE_hilbert-teich"))
        .args(["bounds", "--slope", "2/1", "--out"])
        .arg(&b)
        .env("HILBERT_TEICH_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(fs::read(a.join("bounds.csv")).unwrap(), fs::read(b.join("bounds.csv")).unwrap());
}

#[test]
fn flip_inequalities_within_log2() {
    let out = out_dir("flip");
    let o = run(&["flip", "--seed", "3"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let claims = summary(&out, "flip");
    let lemma: Vec<&Value> = claims.iter().filter(|c| c["claim"].as_str().unwrap().contains("<= log 2")).collect();
    assert_eq!(lemma.len(), 4);
    for c in lemma {
        assert!(c["worst_observed"].as_f64().unwrap() <= 2f64.ln() + 1e-9);
    }
    let (header, rows) = read_csv(out.join("flip.csv"));
    assert_eq!(header, ["t", "d_gamma", "d_gamma_prime", "diff", "ceiling"]);
    for r in rows {
        assert!((r[3] - (r[1] - r[2]).abs()).abs() < 1e-15 && r[3] <= r[4]);
    }
}

#[test]
fn every_command_summary_is_consistent() {
    for cmd in ["axioms", "ray", "bounds", "flip", "radial", "mcg"] {
        let out = out_dir(&format!("all-{cmd}"));
        let o = run(&[cmd, "--steps", "16", "--slope", "1/1"], &out);
        let claims = summary(&out, cmd);
        assert!(!claims.is_empty());
        for c in &claims {
            let worst = c["worst_observed"].as_f64().unwrap();
            let bound = c["bound"].as_f64().unwrap();
            assert_eq!(c["pass"].as_bool().unwrap(), worst <= bound, "{cmd}: {c}");
        }
        assert_eq!(o.status.success(), all_pass(&claims), "{cmd}");
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn radial_and_orbit_tables() {
    let out = out_dir("radial");
    assert!(run(&["radial", "--tmax", "100", "--steps", "11"], &out).status.success());
    let (_, rows) = read_csv(out.join("radial.csv"));
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert!((r[3] - (r[1] - r[2])).abs() < 1e-12 && r[3].abs() <= r[4]);
    }
    let out = out_dir("mcg");
    assert!(run(&["mcg", "--steps", "20"], &out).status.success());
    let (header, rows) = read_csv(out.join("mcg.csv"));
    assert_eq!(header, ["n", "d_orbit_pair", "d_consecutive"]);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), (0..=20).map(f64::from).collect::<Vec<_>>());
}

#[test]
fn csv_floats_round_trip() {
    let out = out_dir("roundtrip");
    run(&["bounds", "--steps", "8"], &out);
    let text = fs::read_to_string(out.join("bounds.csv")).unwrap();
    for field in text.lines().skip(1).flat_map(|l| l.split(',')) {
        let v: f64 = field.parse().unwrap();
        assert_eq!(format!("{v:.16e}"), field);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let out = out_dir("config");
    fs::create_dir_all(&out).unwrap();
    let cfg = out.join("cfg.json");
    fs::write(&cfg, r#"{"steps": 10, "tmax": 50, "format": "json", "slope": "2/1"}"#).unwrap();
    let o = run(&["radial", "--config", cfg.to_str().unwrap(), "--steps", "5"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<Value> = serde_json::from_str(&fs::read_to_string(out.join("radial.json")).unwrap()).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4]["t"].as_f64().unwrap(), 50.0);
}

#[test]
fn invalid_configs_exit_nonzero() {
    let out = out_dir("invalid");
    fs::create_dir_all(&out).unwrap();
    let bad = out.join("bad.json");
    fs::write(&bad, r#"{"bogus": 1}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["ray", "--steps", "1"],
        vec!["ray", "--tmax", "0"],
        vec!["ray", "--tmax", "-3"],
        vec!["ray", "--rho0", "-1"],
        vec!["ray", "--slope", "2/4"],
        vec!["ray", "--config", bad.to_str().unwrap()],
        vec!["ray", "--config", "/nonexistent/config.json"],
    ];
    for args in cases {
        let o = run(&args, &out);
        assert!(!o.status.success(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}
