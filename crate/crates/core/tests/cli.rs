use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn specsms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specsms")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn gen(dir: &TempDir, what: &[&str], name: &str) -> String {
    let path = p(dir, name);
    let mut args = vec!["gen"];
    args.extend_from_slice(what);
    args.extend_from_slice(&["-o", &path]);
    assert!(specsms(&args).status.success());
    path
}

#[test]
fn unsat_chain_with_proof_interpolant_and_check() {
    let dir = TempDir::new().unwrap();
    let input = gen(&dir, &["chain", "3"], "chain.msat");
    let (proof, itp) = (p(&dir, "chain.proof"), p(&dir, "chain.itp"));
    let out = specsms(&["solve", &input, "--proof", &proof, "--interpolate", &itp, "--check"]);
    assert_eq!(out.status.code(), Some(20));
    assert!(stdout(&out).contains("s UNSATISFIABLE"));
    assert!(Path::new(&itp).exists());

    let out = specsms(&["check-proof", &input, "--proof", &proof]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("s VALID"));

    let trimmed = p(&dir, "trimmed.proof");
    assert!(specsms(&["trim-proof", &input, "--proof", &proof, "-o", &trimmed]).status.success());
    let out = specsms(&["interpolate", &input, "--proof", &trimmed, "--check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("->"));
}

#[test]
fn tampered_proof_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = gen(&dir, &["chain", "2"], "chain.msat");
    let proof = p(&dir, "chain.proof");
    assert_eq!(specsms(&["solve", &input, "--proof", &proof]).status.code(), Some(20));
    let text = std::fs::read_to_string(&proof).unwrap();
    let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with('r') || l.trim() == "r m 0").collect();
    std::fs::write(&proof, kept.join("\n") + "\n").unwrap();
    let out = specsms(&["check-proof", &input, "--proof", &proof]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("s INVALID"));
}

#[test]
fn satisfiable_split_input_prints_model() {
    let dir = TempDir::new().unwrap();
    let (s, m, i) = (p(&dir, "s.cnf"), p(&dir, "m.cnf"), p(&dir, "i.txt"));
    std::fs::write(&s, "p cnf 3 2\n1 2 0\n-1 3 0\n").unwrap();
    std::fs::write(&m, "p cnf 3 1\n-2 -3 0\n").unwrap();
    std::fs::write(&i, "2 3 0\n").unwrap();
    for mode in ["sms", "specsms"] {
        let out = specsms(&[
            "solve", "--secondary", &s, "--main", &m, "--interface", &i, "--mode", mode, "--guidance",
            "speculate-first",
        ]);
        assert_eq!(out.status.code(), Some(10));
        let text = stdout(&out);
        assert!(text.contains("s SATISFIABLE"));
        assert!(text.lines().any(|l| l.starts_with('v')));
    }
}

#[test]
fn budget_exhaustion_is_indeterminate() {
    let dir = TempDir::new().unwrap();
    let input = gen(&dir, &["php", "7"], "php.msat");
    let out = specsms(&["solve", &input, "--max-conflicts", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("s UNKNOWN"));
}

#[test]
fn hidden_key_generation_and_guided_solve() {
    let dir = TempDir::new().unwrap();
    let input = gen(&dir, &["hidden-key", "--rounds", "4", "--unsat"], "key.msat");
    let text = std::fs::read_to_string(&input).unwrap();
    let selector = text
        .lines()
        .find_map(|l| l.strip_prefix("c selector "))
        .expect("selector comment")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(",");
    let guidance = format!("speculate-first:{selector}");
    let out = specsms(&["solve", &input, "--guidance", &guidance, "--time-limit", "30"]);
    assert_eq!(out.status.code(), Some(20));
}

#[test]
fn sweep_writes_csv() {
    let out = specsms(&[
        "bench", "sweep", "--rounds", "4", "--modes", "specsms", "--time-limit", "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rounds,mode,verdict,decisions,conflicts,seconds"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn malformed_input_is_an_error() {
    let dir = TempDir::new().unwrap();
    let bad = p(&dir, "bad.msat");
    std::fs::write(&bad, "p msat 2\nnonsense\n").unwrap();
    assert_eq!(specsms(&["solve", &bad]).status.code(), Some(2));
    assert_eq!(specsms(&["solve", &p(&dir, "missing.msat")]).status.code(), Some(2));
}
