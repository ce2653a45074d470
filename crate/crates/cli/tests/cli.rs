use std::path::Path;
use std::process::Command;

fn verify(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(args)
        .env_remove("VERIFY_CACHE_DIR")
        .output()
        .expect("run verify");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 report"))
}

#[test]
fn exit_codes() {
    assert_eq!(verify(&["bogus"]).0, 2);
    assert_eq!(verify(&["hyperg", "--primes", "4"]).0, 2);
    assert_eq!(verify(&["hyperg", "--s-max", "0"]).0, 2);
    assert_eq!(verify(&["hyperg", "--families", "sixth"]).0, 2);
    assert_eq!(verify(&["describe"]).0, 2);
    assert_eq!(verify(&["describe", "nope"]).0, 2);
    assert_eq!(verify(&["ghost", "--primes", "3", "--s-max", "1"]).0, 0);
    // Beyond the scan's word-size limit the check fails rather than passing silently.
    let (code, json) = verify(&["conjecture", "--primes", "4099", "--s-max", "1", "--samples", "0"]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["summary"]["failed"], 1);
    assert!(v["checks"][0]["witness"].is_object());
}

#[test]
fn spec_examples() {
    assert_eq!(verify(&["hyperg", "--primes", "3,5,7", "--s-max", "3"]).0, 0);
    assert_eq!(verify(&["conjecture", "--primes", "3", "--s-max", "2"]).0, 0);
}

#[test]
fn describe_lists_inventory() {
    let (code, text) = verify(&["describe", "kz"]);
    assert_eq!(code, 0);
    assert!(text.contains("three-term Dwork congruence for T_s and U_s"));
    assert!(text.contains("factorization of U_s through P_s"));
    let (_, fifths) = verify(&["describe", "fifths"]);
    assert!(fifths.contains("fifths families"));
    let (_, all) = verify(&["describe", "all"]);
    for suite in ["ghost", "dwork-tuple", "mellit", "hyperg", "thirds", "fifths", "unit-root", "kz", "conjecture"] {
        assert!(all.lines().any(|l| l == suite), "{suite}");
    }
}

#[test]
fn golden_hyperg_p3() {
    let (code, json) = verify(&["hyperg", "--primes", "3"]);
    assert_eq!(code, 0);
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/hyperg_p3.json")).unwrap();
    assert_eq!(json, golden);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |out: &Path, jobs: &str| {
        vec!["all".to_string(), "--primes".into(), "3".into(), "--s-max".into(), "1".into(), "--samples".into(), "5".into(), "--seed".into(), "11".into(), "--jobs".into(), jobs.into(), "--out".into(), out.display().to_string()]
    };
    let run = |v: Vec<String>| {
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        verify(&refs).0
    };
    assert_eq!(run(args(&a, "1")), 0);
    assert_eq!(run(args(&b, "4")), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("verify.toml");
    std::fs::write(&cfg, "primes = [5]\ns_max = 1\nfamilies = [\"half\"]\n").unwrap();
    let cfg = cfg.display().to_string();
    let (code, json) = verify(&["hyperg", "--config", &cfg]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["config"]["primes"], serde_json::json!([5]));
    let (_, json) = verify(&["hyperg", "--config", &cfg, "--primes", "7"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["config"]["primes"], serde_json::json!([7]));
    assert_eq!(v["config"]["s_max"], 1);
    std::fs::write(dir.path().join("bad.toml"), "s_max = \"two\"\n").unwrap();
    assert_eq!(verify(&["hyperg", "--config", &dir.path().join("bad.toml").display().to_string()]).0, 2);
}

#[test]
fn scan_checkpoints_in_cache_dir() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_verify"))
            .args(["conjecture", "--primes", "3", "--s-max", "1", "--samples", "3"])
            .env("VERIFY_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let ckpt = dir.path().join("scan-p3-s1.ndjson");
    assert_eq!(std::fs::read_to_string(&ckpt).unwrap().lines().count(), 81);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}
