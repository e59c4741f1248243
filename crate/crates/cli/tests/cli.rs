use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fidecay_cli::config::{ExperimentConfig, ModelSelection};
use fidecay_cli::{load_config, ConfigError};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fidecay"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("experiment.toml");
    fs::write(&p, text).unwrap();
    p
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn decay_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn empty_config_is_the_default_experiment() {
    let dir = TempDir::new().unwrap();
    let cfg = load_config(&write_config(dir.path(), "")).unwrap();
    assert_eq!(cfg, ExperimentConfig::default());
    assert_eq!(cfg.model, ModelSelection::Both);
    assert_eq!(cfg.n_max, 30);
    assert!(cfg.relaxation);
    let setup = cfg.setup().unwrap();
    assert!((setup.dist.mean() - 0.9895).abs() < 1e-12);
}

#[test]
fn bad_weights_name_the_field() {
    let dir = TempDir::new().unwrap();
    let p = write_config(
        dir.path(),
        "[rf_distribution]\npoints = [0.9, 1.0]\nweights = [0.5, 0.4]\n",
    );
    match load_config(&p) {
        Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "rf_distribution"),
        other => panic!("unexpected {other:?}"),
    }
    let o = run_cli(&[
        "run",
        "--config",
        p.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("rf_distribution"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), "n_max = 4\nbogus = true\n");
    assert!(matches!(load_config(&p), Err(ConfigError::Parse { .. })));
    let p = write_config(dir.path(), "[spin_system]\nfreqs = [0.0, 1.0, 2.0]\n");
    assert!(matches!(load_config(&p), Err(ConfigError::Parse { .. })));
}

#[test]
fn missing_file_is_distinct_from_parse_error() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("absent.toml");
    assert!(matches!(load_config(&p), Err(ConfigError::Missing(_))));
    let o = run_cli(&["run", "--config", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("not found"));
}

#[test]
fn invalid_spin_system_is_reported() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), "[spin_system]\nt2 = [3.0, -1.5, 1.5]\n");
    match load_config(&p) {
        Err(ConfigError::Invalid { field, .. }) => assert!(field.starts_with("spin_system")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn explicit_distribution_and_preset() {
    let dir = TempDir::new().unwrap();
    let p = write_config(
        dir.path(),
        "[rf_distribution]\npoints = [0.9, 1.1]\nweights = [0.5, 0.5]\n",
    );
    let d = load_config(&p).unwrap().distribution().unwrap();
    assert_eq!(d.len(), 2);
    assert!((d.mean() - 1.0).abs() < 1e-15);
    let p = write_config(dir.path(), "rf_distribution = \"uniform\"\n");
    assert!(matches!(
        load_config(&p),
        Err(ConfigError::Invalid {
            field: "rf_distribution",
            ..
        })
    ));
}

#[test]
fn digest_ignores_output_dir_only() {
    let a = ExperimentConfig::default();
    let mut b = a.clone();
    b.output.dir = PathBuf::from("elsewhere");
    assert_eq!(a.digest(), b.digest());
    b.n_max = 12;
    assert_ne!(a.digest(), b.digest());
    assert_eq!(a.digest().len(), 64);
}

#[test]
fn run_both_writes_the_full_file_set() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run_cli(&["run", "--model", "both", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.iter().filter(|n| n.starts_with("decay_")).count(), 2);
    assert_eq!(
        names.iter().filter(|n| n.starts_with("spectrum_")).count(),
        8
    );
    assert!(names.contains(&"summary.txt".to_string()));
    assert_eq!(names.len(), 11);

    let digest = ExperimentConfig::default().digest();
    for n in names.iter().filter(|n| n.ends_with(".csv")) {
        let text = fs::read_to_string(out.join(n)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# config sha256 {digest}"));
        let header = lines.next().unwrap();
        if n.starts_with("decay_") {
            assert_eq!(header, "n,F,c1,c12,c13,c123,sum_abs,purity");
            assert_eq!(lines.count(), 31);
        } else {
            assert_eq!(header, "bin_freq,magnitude");
            assert_eq!(
                lines
                    .last()
                    .unwrap()
                    .split(',')
                    .next()
                    .unwrap()
                    .parse::<f64>()
                    .unwrap(),
                0.125
            );
        }
    }

    let dec = decay_rows(&out.join("decay_decoherent.csv"));
    let tail: Vec<f64> = dec[dec.len() - 5..].iter().map(|r| r[1]).collect();
    let sat = tail.iter().sum::<f64>() / 5.0;
    assert!((sat - 0.125).abs() < 0.05, "saturation {sat}");

    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.starts_with(&format!("# config sha256 {digest}")));
    assert!(summary.contains("nyquist ZZZ"));
}

#[test]
fn noiseless_run_keeps_unit_fidelity() {
    let dir = TempDir::new().unwrap();
    let p = write_config(
        dir.path(),
        "model = \"decoherent\"\nn_max = 10\nrelaxation = false\n[rf_distribution]\npoints = [1.0]\nweights = [1.0]\n",
    );
    let out = dir.path().join("out");
    let o = run_cli(&[
        "run",
        "--config",
        p.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = decay_rows(&out.join("decay_decoherent.csv"));
    assert_eq!(rows.len(), 11);
    for r in rows {
        assert!((r[1] - 1.0).abs() < 1e-10);
        assert!((r[6] - 0.5).abs() < 1e-10);
    }
    assert!(!out.join("decay_incoherent.csv").exists());
}

#[test]
fn short_runs_skip_spectra() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), "n_max = 5\n");
    let out = dir.path().join("out");
    let o = run_cli(&[
        "run",
        "--config",
        p.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(decay_rows(&out.join("decay_incoherent.csv")).len(), 6);
    assert!(!out.join("spectrum_incoherent_c1.csv").exists());
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("spectra skipped"));
}

#[test]
fn outputs_are_bitwise_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), "n_max = 12\n");
    let mut runs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("out{k}"));
        let o = run_cli(&[
            "run",
            "--config",
            p.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        runs.push(out);
    }
    for e in fs::read_dir(&runs[0]).unwrap() {
        let name = e.unwrap().file_name();
        assert_eq!(
            fs::read(runs[0].join(&name)).unwrap(),
            fs::read(runs[1].join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn pulse_mode_runs() {
    let dir = TempDir::new().unwrap();
    let p = write_config(
        dir.path(),
        "mode = \"pulse\"\nn_max = 3\nmodel = \"incoherent\"\n",
    );
    let out = dir.path().join("out");
    let o = run_cli(&[
        "run",
        "--config",
        p.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = decay_rows(&out.join("decay_incoherent.csv"));
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[1] <= 1.0 + 1e-12));
}

#[test]
fn failed_run_removes_partial_outputs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    fs::create_dir_all(out.join("summary.txt")).unwrap();
    let p = write_config(dir.path(), "n_max = 8\n");
    let o = run_cli(&[
        "run",
        "--config",
        p.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let left: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(left, vec![std::ffi::OsString::from("summary.txt")]);
}

#[test]
fn cyclecheck_default_passes() {
    let o = run_cli(&["cyclecheck"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("identity, PASS"));
    let c = fidecay_cli::cyclecheck(None, 1.0, 8).unwrap();
    assert!(c.pass && c.residual < 1e-9);
}

#[test]
fn cyclecheck_detects_miscalibration() {
    let c = fidecay_cli::cyclecheck(None, 1.05, 8).unwrap();
    assert!(!c.pass);
    assert!(c.residual > 1e-3);
    let o = run_cli(&["cyclecheck", "--scale", "1.05"]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("non-identity"));
}

#[test]
fn cyclecheck_rejects_short_cycle() {
    let c = fidecay_cli::cyclecheck(None, 1.0, 4).unwrap();
    assert!(!c.pass);
    let o = run_cli(&["cyclecheck", "--cycle", "4"]);
    assert!(!o.status.success());
    assert!(stdout(&o).contains("non-identity"));
}

#[test]
fn describe_lists_plan() {
    let o = run_cli(&["describe"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("entangler: H(2), CNOT(2->3)"));
    assert!(s.contains("cycle length: 8"));
}
