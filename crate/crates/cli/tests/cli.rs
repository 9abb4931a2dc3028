use std::f64::consts::LN_2;
use std::path::Path;
use std::process::{Command, Output};

fn rbn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rbn"))
        .args(args)
        .env_remove("RBN_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn eval_eta(state: &str, setting: &str) -> f64 {
    let o = rbn(&["eval", "--state", state, "--setting", setting]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("eta_")).expect("eta line");
    line.split_whitespace().last().unwrap().parse().unwrap()
}

fn sweep_to(path: &Path, extra: &[&str]) -> Vec<u8> {
    let p = path.to_str().unwrap();
    let mut args = vec![
        "sweep-noise",
        "--chi",
        "w",
        "--noise-step",
        "0.25",
        "--increment",
        "pi/4",
        "--out",
        p,
    ];
    args.extend_from_slice(extra);
    let o = rbn(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn eval_examples() {
    assert!((eval_eta("ghz", "z,z,z") - LN_2).abs() < 1e-10);
    assert!((eval_eta("w", "z,z,z") - 0.6364).abs() < 5e-4);
    assert_eq!(eval_eta("mixed(1.0)", "x,y,z"), 0.0);
    let o = rbn(&["eval", "--state", "ghz", "--setting", "z,z,z"]);
    let text = stdout(&o);
    for key in ["S(rho)", "S(Phi_A rho)", "S(Phi_BC rho)", "S(Phi_ABC rho)", "eta_A|BC"] {
        assert!(text.contains(key), "missing {key}");
    }
}

#[test]
fn malformed_input_exits_with_usage_code() {
    assert_eq!(rbn(&["eval", "--state", "bell", "--setting", "z,z,z"]).status.code(), Some(1));
    assert_eq!(rbn(&["eval", "--state", "ghz", "--setting", "z,q,z"]).status.code(), Some(1));
    assert_eq!(rbn(&["eval", "--state", "ghz", "--setting", "z,z"]).status.code(), Some(1));
    assert_eq!(rbn(&["sweep-noise", "--chi", "x"]).status.code(), Some(1));
    assert_eq!(rbn(&["sweep-noise", "--chi", "w", "--noise-end", "2"]).status.code(), Some(1));
    assert_eq!(rbn(&["sweep-noise", "--chi", "w", "--increment", "0.7"]).status.code(), Some(1));
    assert_eq!(rbn(&["sweep-noise", "--chi", "w", "--seed", "3"]).status.code(), Some(1));
    assert_eq!(rbn(&["sweep-noise", "--chi", "w", "--workers", "0"]).status.code(), Some(1));
    assert_eq!(rbn(&["monogamy", "--chi", "w", "--alpha-start", "0"]).status.code(), Some(1));
    assert_eq!(rbn(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rbn(&["--help"]).status.code(), Some(0));
    assert_eq!(rbn(&["--version"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let o = rbn(&[
        "sweep-noise",
        "--chi",
        "ghz",
        "--noise-end",
        "0",
        "--increment",
        "pi/2",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn csv_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let a = sweep_to(&dir.path().join("a.csv"), &["--workers", "1"]);
    let b = sweep_to(&dir.path().join("b.csv"), &["--workers", "1"]);
    let c = sweep_to(&dir.path().join("c.csv"), &["--workers", "3"]);
    assert_eq!(a, b);
    assert_eq!(a, c);

    let env = Command::new(env!("CARGO_BIN_EXE_rbn"))
        .args(["sweep-noise", "--chi", "w", "--noise-step", "0.25", "--increment", "pi/4"])
        .env("RBN_WORKERS", "2")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(env.stdout, a);

    let r1 = sweep_to(&dir.path().join("r1.csv"), &["--random", "20000", "--seed", "5", "--workers", "1"]);
    let r2 = sweep_to(&dir.path().join("r2.csv"), &["--random", "20000", "--seed", "5", "--workers", "4"]);
    assert_eq!(r1, r2);
}

#[test]
fn csv_header_records_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(sweep_to(&dir.path().join("d.csv"), &["--dedupe"])).unwrap();
    let version = format!("# tool: rbn {}", env!("CARGO_PKG_VERSION"));
    for needle in [
        version.as_str(),
        "# strategy: grid",
        "# increment: pi/4",
        "# seed: -",
        "# dedupe: true",
    ] {
        assert!(text.contains(needle), "missing '{needle}' in\n{text}");
    }
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "chi,noise,n3,cut,theta_a,phi_a,theta_b,phi_b,theta_c,phi_c,evaluations");

    let text = String::from_utf8(sweep_to(&dir.path().join("r.csv"), &["--random", "1000", "--seed", "9"])).unwrap();
    assert!(text.contains("# strategy: random") && text.contains("# seed: 9") && text.contains("# random_count: 1000"));
}

#[test]
fn sweep_rows_are_nonincreasing_and_vanish_at_full_noise() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(sweep_to(&dir.path().join("s.csv"), &[])).unwrap();
    let values: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("w,"))
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 5);
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    assert_eq!(*values.last().unwrap(), 0.0);
}

#[test]
fn monogamy_json_rows_are_consistent() {
    let o = rbn(&[
        "monogamy",
        "--chi",
        "ghz",
        "--noise-step",
        "0.5",
        "--alpha-start",
        "0.5",
        "--alpha-end",
        "4",
        "--alpha-step",
        "0.5",
        "--increment",
        "pi/4",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3 * 8);
    for r in rows {
        let f = |k: &str| r[k].as_f64().unwrap();
        let a = f("alpha");
        let recomputed = f("n3").powf(a) - f("n2_ab").powf(a) - f("n2_ac").powf(a);
        assert!((recomputed - f("delta")).abs() <= 1e-12);
        if f("noise") == 0.0 {
            assert!((f("delta") + LN_2.powf(a)).abs() < 1e-9);
        }
    }
    assert_eq!(doc["metadata"]["alpha"], "0.5:4:0.5");
    assert!(doc["summary"]["alpha_threshold"].is_null());
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("alpha_threshold: none"));
}

#[test]
fn monogamy_csv_has_summary_footer() {
    let o = rbn(&[
        "monogamy",
        "--chi",
        "w",
        "--noise-end",
        "0",
        "--alpha-start",
        "1",
        "--alpha-end",
        "5",
        "--alpha-step",
        "0.1",
        "--increment",
        "pi/4",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let threshold: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# alpha_threshold: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((2.14..=2.19).contains(&threshold), "{threshold}");
    assert!(text.contains("chi,noise,alpha,n3,n2_ab,n2_ac,delta,delta_normalized\n"));
}

#[test]
fn selftest_passes() {
    let o = rbn(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0 failed"));
    assert!(!text.contains("FAIL"));
}
