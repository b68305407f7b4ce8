use std::path::PathBuf;
use std::process::{Command, Output};

fn ddri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddri"))
        .args(args)
        .output()
        .expect("run ddri")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ddri-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn invalid_configuration_exits_with_2() {
    let out = ddri(&["converge", "--levels", "0", "--dry-run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("levels"));
    assert_eq!(ddri(&["converge", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(
        ddri(&["converge", "--case", "hexagon"]).status.code(),
        Some(2)
    );
}

#[test]
fn config_file_errors_exit_with_2() {
    let dir = scratch("config");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "[mesh]\nbase = 8\ncolour = \"red\"\n").unwrap();
    let out = ddri(&["converge", "--config", path.to_str().unwrap(), "--dry-run"]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.join("missing.toml");
    assert_eq!(
        ddri(&["converge", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn dry_run_writes_nothing() {
    let dir = scratch("dry");
    let target = dir.join("out");
    let out = ddri(&[
        "converge",
        "--levels",
        "2",
        "--dry-run",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(!target.exists());
}

#[test]
fn unstable_relaxation_exits_with_3() {
    let dir = scratch("unstable");
    let out = ddri(&[
        "ldm",
        "--levels",
        "1",
        "--steps0",
        "4",
        "--t-final",
        "400",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unstable"));
}

#[test]
fn convergence_output_is_deterministic() {
    let run = |name: &str| {
        let dir = scratch(name);
        let out = ddri(&[
            "converge",
            "--family",
            "perturbed",
            "--levels",
            "2",
            "--ratios",
            "1e3",
            "--seed",
            "11",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read_to_string(dir.join("square_perturbed_k0_M0_ratio1e3.csv")).unwrap()
    };
    let a = run("det-a");
    assert!(a.starts_with("level,h,"));
    assert_eq!(a, run("det-b"));
}

#[test]
fn mesh_generate_and_inspect() {
    let dir = scratch("mesh");
    let path = dir.join("grid.mesh");
    let out = ddri(&[
        "mesh",
        "generate",
        "--kind",
        "triangular",
        "--n",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = ddri(&["mesh", "inspect", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("32"));
    assert_eq!(
        ddri(&["mesh", "inspect", dir.join("none.mesh").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn patch_solve_writes_solution() {
    let dir = scratch("solve");
    let out = ddri(&[
        "solve",
        "--case",
        "patch",
        "--base",
        "8",
        "--ratios",
        "10",
        "--matrix-market",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let files: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert!(files.iter().any(|f| f.ends_with(".mtx")), "{files:?}");
    assert!(files.len() >= 3, "{files:?}");
}
