use std::path::Path;
use std::process::{Command, Output};

fn jjbath(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jjbath"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Header lines stripped, then the first row as column names.
fn read_table(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let names = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (names, rows)
}

fn check_header(path: &Path) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# units: hbar = k_B = e = 1", "{}", path.display());
    let params = lines.next().unwrap().strip_prefix("# params: ").unwrap();
    let v: serde_json::Value = serde_json::from_str(params).unwrap();
    assert!(v.get("scenario").is_some());
}

#[test]
fn gksl_lorentzian_reports_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let o = jjbath(&["gksl", "--scenario", "lorentzian", "--omega0", "1.0"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let kappa = v["kappa"].as_f64().unwrap();
    assert!((kappa - 1.9635e-5).abs() < 1e-9, "kappa {kappa}");
    // ω₀ = E_C0 is the lower band edge.
    assert!(v["lamb_shift"].is_null());
    assert_eq!(v["unit_convention"], "hbar = k_B = e = 1");
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("gksl.json")).unwrap()).unwrap();
    assert_eq!(file, v);
}

#[test]
fn figure_fig2_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = jjbath(&["figure", "fig2"], dir.path());
    assert!(o.status.success());
    let path = dir.path().join("fig2.csv");
    check_header(&path);
    let (names, rows) = read_table(&path);
    assert_eq!(names.len(), 9);
    assert_eq!(rows.len(), 2001);
    assert_eq!(rows[2000][0], 100.0);
    let col = |n: &str| names.iter().position(|c| c == n).unwrap();
    // Perturbative and exact agree within 5% of λ²/2 on both temperatures.
    for t in ["0.02", "0.1"] {
        let (a, e) = (col(&format!("analytic_re_T{t}")), col(&format!("exact_re_T{t}")));
        let worst = rows.iter().map(|r| (r[a] - r[e]).abs()).fold(0.0, f64::max);
        assert!(worst < 0.05 * 0.5e-4, "T {t}: {worst}");
    }
}

#[test]
fn figure_fig3_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = jjbath(&["figure", "fig3"], dir.path());
    assert!(o.status.success());
    let (names, nu) = read_table(&dir.path().join("fig3_nu.csv"));
    assert_eq!(names, ["x", "nu"]);
    assert_eq!((nu[0][0], nu[nu.len() - 1][0]), (-1.0, 1.0));
    // Trapezoid rule on the 2001-point table recovers N_J ≈ 1277.
    let n_j: f64 = nu.windows(2).map(|w| 0.5 * (w[0][1] + w[1][1]) * (w[1][0] - w[0][0])).sum();
    assert!((n_j - 1277.0).abs() < 1.0, "{n_j}");
    let (_, j) = read_table(&dir.path().join("fig3_spectral.csv"));
    assert_eq!((j[0][0], j[j.len() - 1][0]), (1.0, 1.2));
    for r in &j {
        assert!((r[1] - r[2]).abs() <= 1e-8 * r[2]);
    }
    check_header(&dir.path().join("fig3_gksl.csv"));
}

#[test]
fn presets_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        assert!(jjbath(&["disorder", "--seed", "9"], dir).status.success());
    }
    for name in ["samples.csv", "gamma_sampled.csv", "disorder.json"] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let c = tempfile::tempdir().unwrap();
    assert!(jjbath(&["disorder", "--seed", "10"], c.path()).status.success());
    assert_ne!(
        std::fs::read(a.path().join("samples.csv")).unwrap(),
        std::fs::read(c.path().join("samples.csv")).unwrap()
    );
}

#[test]
fn markovianity_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = jjbath(&["markovianity", "--config", &config("lorentzian_markov.json")], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["units"], "E_C0");
    assert!(v["criteria"]["bm"].as_bool().unwrap() && v["criteria"]["secular"].as_bool().unwrap());
    assert!((v["zeta_m"].as_f64().unwrap() - 1.9635e-5).abs() < 1e-9);
    assert_eq!(v["params"]["oscillator"]["omega0"], 1.1);
}

#[test]
fn custom_chain_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = jjbath(&["gksl", "--config", &config("linear_chain.json")], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // J = 2νE_J²/|E_C'| = 8 on [1, 1.2].
    let expected = std::f64::consts::PI * 1e-4 * 1.1 * 8.0 / 800.0;
    assert!((v["kappa"].as_f64().unwrap() - expected).abs() < 1e-12);

    let o = jjbath(&["correlation", "--config", &config("linear_chain.json")], dir.path());
    assert!(o.status.success());
    let path = dir.path().join("gamma.csv");
    check_header(&path);
    let (names, rows) = read_table(&path);
    assert_eq!(names, ["t", "re", "im"]);
    assert_eq!(rows.len(), 2001);
    assert_eq!(rows[2000][0], 200.0);
}

#[test]
fn evolve_decays_toward_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let o = jjbath(&["evolve", "--omega0", "1.1"], dir.path());
    assert!(o.status.success());
    let (names, rows) = read_table(&dir.path().join("trajectory.csv"));
    assert_eq!(names, ["t", "n_expect", "trace", "purity"]);
    assert_eq!(rows[0][1], 3.0);
    let last = rows.last().unwrap();
    // Five decay times: ⟨n⟩ = 3e^{−5}.
    assert!((last[1] - 3.0 * (-5.0f64).exp()).abs() < 1e-6, "{}", last[1]);
    assert!(rows.iter().all(|r| (r[2] - 1.0).abs() < 1e-10));
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["gksl", "--scenario", "no-such-preset"],
        vec!["spectral", "--scenario", "junction"],
        vec!["gksl", "--omega0=-1"],
        vec!["correlation", "--beta", "0"],
        vec!["gksl", "--config", "/nonexistent/config.json"],
    ] {
        let o = jjbath(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scenario": {"kind": "junction", "e_c": -1.0, "e_j": 0.1}}"#).unwrap();
    let o = jjbath(&["correlation", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = jjbath(&["disorder", "--scenario", "lorentzian"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn duality_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = jjbath(&["duality", "--omega0", "1.1", "--beta", "3"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["report"]["max_rel_j_deviation"].as_f64().unwrap() < 1e-8);
    assert!(v["report"]["lamb_shift_rel_diff"].as_f64().unwrap() < 1e-8);
    let ln20 = 20f64.ln();
    assert!((v["mapped_beta"].as_f64().unwrap() - 3.0 / ln20).abs() < 1e-9);
}
