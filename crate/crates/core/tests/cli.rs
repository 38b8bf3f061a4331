use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const RUNNING: &str = "1,0,1,-251,-727";

fn anticyclo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anticyclo")).args(args).output().expect("binary runs")
}

fn running(cmd: &str, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--curve", RUNNING, "--p", "5", "--disc", "-4"];
    args.extend_from_slice(extra);
    anticyclo(&args)
}

#[test]
fn verify_passes_on_the_running_example() {
    let out = running("verify", &["--nmax", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["pass"], true);
}

#[test]
fn analyze_reports_the_quaternionic_setting() {
    let out = running("analyze", &[]);
    assert_eq!(out.status.code(), Some(0));
    let a: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(a["conductor"], 75);
    assert_eq!(a["quaternion_disc"], 3);
    assert_eq!(a["eichler_level"], 5);
    assert_eq!(a["class_number"], 2);
}

#[test]
fn semistable_curve_is_rejected() {
    let out = anticyclo(&["analyze", "--curve", "1,1,1,-10,-10", "--p", "5", "--disc", "-4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn odd_ramification_set_is_rejected() {
    let out = anticyclo(&["analyze", "--curve", "0,1,1,-258,-2981", "--p", "5", "--disc", "-8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn character_beyond_nmax_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let chars = dir.path().join("chars.json");
    fs::write(&chars, r#"[{"n": 3, "k": [0]}]"#).unwrap();
    let out = running("eval", &["--nmax", "2", "--chars", chars.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn only_file(dir: &Path) -> std::path::PathBuf {
    let mut files: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(files.len(), 1);
    files.pop().unwrap()
}

#[test]
fn corrupted_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let first = running("theta", &["--nmax", "1", "--cache", cache]);
    assert_eq!(first.status.code(), Some(0));
    let file = only_file(dir.path());
    let text = fs::read_to_string(&file).unwrap();
    let pos = text.find("\"payload\"").unwrap();
    let digit = text[pos..].find(|c: char| c.is_ascii_digit()).unwrap() + pos;
    let mut bytes = text.into_bytes();
    bytes[digit] = if bytes[digit] == b'7' { b'8' } else { b'7' };
    fs::write(&file, bytes).unwrap();
    let second = running("theta", &["--nmax", "1", "--cache", cache]);
    assert_eq!(second.status.code(), Some(3), "{}", String::from_utf8_lossy(&second.stderr));
}

#[test]
fn cached_and_fresh_runs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let fresh = running("theta", &["--nmax", "2"]);
    let stored = running("theta", &["--nmax", "2", "--cache", cache]);
    let loaded = running("theta", &["--nmax", "2", "--cache", cache]);
    assert_eq!(fresh.stdout, stored.stdout);
    assert_eq!(fresh.stdout, loaded.stdout);
}

#[test]
fn report_table_lists_good_characters() {
    let out = running("report", &["--nmax", "2", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stdout.is_empty());
}
