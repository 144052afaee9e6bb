use std::path::Path;
use std::process::{Command, Output};

fn saut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saut"))
        .args(args)
        .env_remove("SAUT_THREADS")
        .env_remove("SAUT_CHECKPOINT_ROOT")
        .output()
        .expect("run saut")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn search_rank_three(dir: &Path) -> Output {
    saut(&["search", "--rank", "3", "--degrees", "2..7", "--threads", "2", "--json", "--checkpoint", dir.to_str().unwrap()])
}

#[test]
fn search_reports_and_certificates_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    let out = search_rank_three(&dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["statement"], "x_3 = 7");
    assert_eq!(std::fs::read_to_string(dir.join("report.json")).unwrap(), stdout(&out));

    for m in 2..=7 {
        let cert = dir.join(format!("certificates/n3_m{m}.json"));
        let v = saut(&["verify", cert.to_str().unwrap()]);
        assert!(v.status.success(), "m = {m}: {}", stdout(&v));
        assert!(stdout(&v).contains("pass"));
    }

    // Resuming a finished run rebuilds the same report.
    let again = saut(&["resume", "--checkpoint", dir.to_str().unwrap(), "--json"]);
    assert!(again.status.success());
    assert_eq!(stdout(&again), stdout(&out));

    // A second search into the same directory is refused.
    let dup = search_rank_three(&dir);
    assert_eq!(dup.status.code(), Some(3));
}

#[test]
fn tampered_certificate_fails_verification() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    assert!(search_rank_three(&dir).status.success());
    let path = dir.join("certificates/n3_m7.json");
    let mut cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let img = cert["images"]["rho"][0]["image"].as_array_mut().unwrap();
    img.swap(0, 1);
    img.swap(1, 2);
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string_pretty(&cert).unwrap()).unwrap();
    let v = saut(&["verify", bad.to_str().unwrap(), "--json"]);
    assert_eq!(v.status.code(), Some(4));
    let check: serde_json::Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(check["passed"], false);

    std::fs::write(&bad, "{ truncated").unwrap();
    assert_eq!(saut(&["verify", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn corrupted_ledger_is_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("run");
    assert!(search_rank_three(&dir).status.success());
    let ledger = dir.join("ledger.jsonl");
    let text = std::fs::read_to_string(&ledger).unwrap();

    // Flip a digit inside a record without fixing its checksum.
    let pos = text.find("\"tested\":").expect("a shard record") + "\"tested\":".len();
    let mut bytes = text.clone().into_bytes();
    bytes[pos] = if bytes[pos] == b'9' { b'8' } else { bytes[pos] + 1 };
    std::fs::write(&ledger, &bytes).unwrap();
    let r = saut(&["resume", "--checkpoint", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stderr).contains("checksum"));

    // A torn final line.
    std::fs::write(&ledger, &text[..text.len() - 5]).unwrap();
    let r = saut(&["resume", "--checkpoint", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));

    // Missing directory.
    let r = saut(&["resume", "--checkpoint", tmp.path().join("absent").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(saut(&["search", "--rank", "2", "--degrees", "2..5"]).status.code(), Some(2));
    assert_eq!(saut(&["search", "--rank", "3", "--degrees", "7..2"]).status.code(), Some(2));
    assert_eq!(saut(&["search", "--rank", "3", "--degrees", "seven"]).status.code(), Some(2));
    assert_eq!(saut(&["control", "psl", "--rank", "2"]).status.code(), Some(2));
}

#[test]
fn control_and_selftest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("psl4.json");
    let c = saut(&["control", "psl", "--rank", "4", "--out", out.to_str().unwrap()]);
    assert!(c.status.success());
    let v = saut(&["verify", out.to_str().unwrap()]);
    assert!(v.status.success());
    assert!(stdout(&v).contains("nontrivial, degree 15"), "{}", stdout(&v));

    let s = saut(&["selftest", "gersten", "--rank", "4"]);
    assert!(s.status.success());
    assert!(stdout(&s).contains(", 0 failures"));
}

#[test]
fn checkpoint_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_saut"))
        .args(["search", "--rank", "3", "--degrees", "2..4"])
        .env("SAUT_CHECKPOINT_ROOT", tmp.path())
        .env("SAUT_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("x_3 >= 5"));
    assert!(tmp.path().join("rank3_m2-4/report.json").exists());
}
