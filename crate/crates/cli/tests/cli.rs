use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bethechain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .and_then(|v| v.split_whitespace().next())
        .unwrap_or_else(|| panic!("{key} missing in\n{text}"))
        .parse()
        .unwrap()
}

#[test]
fn ground_free_chain_energy() {
    let o = bin(&["ground", "--n", "5", "--u", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let e0 = value(&stdout(&o), "E0");
    assert!((e0 + 1.0 + 5f64.sqrt()).abs() < 1e-12, "{e0}");
}

#[test]
fn even_chain_is_a_usage_error() {
    let o = bin(&["ground", "--n", "4", "--u", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(bin(&["ground", "--bogus"]).status.code(), Some(2));
    assert_eq!(bin(&["scan-u", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn spectrum_lists_every_state() {
    let o = bin(&["spectrum", "--n", "6", "--u", "1.3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 15);
    assert!(rows.windows(2).all(|w| w[0][3] <= w[1][3]));
}

#[test]
fn scan_resumes_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let part = dir.path().join("part.csv");
    let args = |p: &Path| {
        vec![
            "scan-u".to_string(),
            "--n".into(),
            "7".into(),
            "--u-from".into(),
            "-2.1".into(),
            "--u-to".into(),
            "-1.9".into(),
            "--points".into(),
            "5".into(),
            "--out".into(),
            p.display().to_string(),
        ]
    };
    let run = |p: &Path| {
        let a = args(p);
        bin(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run(&full).status.code(), Some(0));
    let text = fs::read_to_string(&full).unwrap();
    assert_eq!(data_rows(&text).len(), 5);
    assert!(text.contains("U,S_half,S_twobody_as_written,S_twobody_variant,gap"));

    // Two complete rows and a torn third.
    let header_lines = text.lines().take_while(|l| !l.starts_with('-')).count();
    let cut = text.match_indices('\n').nth(header_lines + 1).unwrap().0;
    fs::write(&part, format!("{}-2.05", &text[..=cut])).unwrap();
    assert_eq!(run(&part).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&part).unwrap(), text);

    // A file from another grid is refused.
    let other = bin(&[
        "scan-u", "--n", "9", "--u-from", "-2.1", "--u-to", "-1.9", "--points", "5", "--out",
        full.to_str().unwrap(),
    ]);
    assert_eq!(other.status.code(), Some(2));
}

#[test]
fn verify_passes_and_detects_tampering() {
    let ok = bin(&["verify"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(stdout(&ok).contains("unfolding-overlap:"));
    let bad = bin(&["verify", "--tamper-gate-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("overlap"));
}

#[test]
fn decompose_writes_replayable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bin(&["decompose", "--n", "5", "--u", "-2", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["folding.txt", "unfolding.txt", "cascade.txt", "factors.json", "metadata.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let meta = fs::read_to_string(dir.path().join("metadata.txt")).unwrap();
    assert_eq!(value(&meta, "givens_gates"), 10.0);
    assert!(value(&meta, "mps_overlap") > 1.0 - 1e-10);
    let unfold = fs::read_to_string(dir.path().join("unfolding.txt")).unwrap();
    assert_eq!(unfold.lines().filter(|l| !l.starts_with('#')).count(), 10);
    assert_eq!(bin(&["decompose", "--n", "5", "--u", "-2"]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# chain\nn = 7\nu = -2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = bin(&["ground", "--config", c]);
    assert_eq!(from_file.status.code(), Some(0));
    assert!(stdout(&from_file).starts_with("N = 7, J = 1, U = -2"));
    let flagged = bin(&["ground", "--config", c, "--n", "5"]);
    assert!(stdout(&flagged).starts_with("N = 5, J = 1, U = -2"));
    fs::write(&cfg, "n = 7\nwidth = 3\n").unwrap();
    assert_eq!(bin(&["ground", "--config", c]).status.code(), Some(2));
}

#[test]
fn entropy_profile_methods_agree() {
    let args = |m: &'static str| ["entropy-profile", "--n", "11", "--u", "-2.011", "--method", m];
    let rows: Vec<_> = ["mps", "oracle"]
        .map(|m| {
            let o = bin(&args(m));
            assert_eq!(o.status.code(), Some(0), "{m}");
            data_rows(&stdout(&o))
        })
        .into();
    assert_eq!(rows[0].len(), 10);
    for (a, b) in rows[0].iter().zip(&rows[1]) {
        assert_eq!(a[0], b[0]);
        assert!((a[1] - b[1]).abs() < 1e-10, "L={}: {} vs {}", a[0], a[1], b[1]);
    }
}

#[test]
fn gap_over_a_range() {
    let o = bin(&["gap", "--n", "5", "--u-from", "-1", "--u-to", "1", "--points", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!((rows[1][3] - 5f64.sqrt()).abs() < 1e-12);
    assert!(rows.iter().all(|r| (r[2] - r[1] - r[3]).abs() < 1e-12));
}
