use std::path::Path;
use std::process::{Command, Output};

fn wickbell(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wickbell"))
        .args(args)
        .current_dir(cwd)
        .env_remove("WICKBELL_OUT_DIR")
        .output()
        .expect("spawn wickbell")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_prints_eight_lines_including_cnot() {
    let dir = tempfile::tempdir().unwrap();
    let o = wickbell(&["list"], dir.path());
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().any(|l| l.starts_with("chsh ") && l.contains("CNOT")));

    let o = wickbell(&["list", "--csv"], dir.path());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("experiment,anchor"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn too_few_points_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = wickbell(&["run", "wigner", "--set", "n_points=4"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("n_points") && e.contains("at least 8"), "{e}");
    assert!(!dir.path().join("wickbell-out").exists());
}

#[test]
fn unknown_key_in_file_names_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "restarts = 2\ncolour = blue\n").unwrap();
    let o = wickbell(&["run", "chsh", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("bad.cfg:2") && e.contains("`colour`"), "{e}");
}

#[test]
fn grid_escape_exits_with_guard_code() {
    // A short Minkowski evolution on a coarse grid aliases the chirp.
    let dir = tempfile::tempdir().unwrap();
    let o = wickbell(
        &["run", "epr", "--set", "n_points=64", "--set", "total_time=0.01"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("grid-escape"));
}

#[test]
fn chsh_default_prints_single_line_and_manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let o = wickbell(&["run", "chsh", "--set", "product_samples=100"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("S = 2.828427"), "{out}");

    let first = dir.path().join("wickbell-out");
    let manifest = first.join("chsh.manifest");
    let text = std::fs::read_to_string(&manifest).unwrap();
    assert!(text.contains("experiment = chsh") && text.contains("product_samples = 100"));

    let o = wickbell(
        &["run", "chsh", "--config", manifest.to_str().unwrap(), "--out-dir", "again"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let a = std::fs::read(first.join("chsh.csv")).unwrap();
    let b = std::fs::read(dir.path().join("again/chsh.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn out_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_wickbell"))
        .args(["run", "commutator", "--set", "slices=2,3"])
        .current_dir(dir.path())
        .env("WICKBELL_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("from-env/commutator.csv").exists());
}

#[test]
fn mismatched_experiment_in_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "experiment = epr\n").unwrap();
    let o = wickbell(&["run", "chsh", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
