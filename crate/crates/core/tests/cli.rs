use std::fs;
use std::path::Path;

use matgroup_crypto::cli::execute;

fn run(dir: &Path, args: &[&str]) -> (i32, String) {
    let args: Vec<String> = args
        .iter()
        .map(|a| if a.starts_with('@') { dir.join(&a[1..]).display().to_string() } else { a.to_string() })
        .collect();
    execute(args)
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let (code, out) = run(dir, args);
    assert_eq!(code, 0, "{args:?}: {out}");
    out
}

#[test]
fn version_and_usage() {
    let (code, out) = execute(["version"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("matgroup "));
    assert_eq!(execute(["--help"]).0, 0);
    assert_eq!(execute(["frobnicate"]).0, 2);
    assert_eq!(execute(["gen", "--seed", "x", "--pub", "a", "--sec", "b"]).0, 2);
    assert_eq!(execute(Vec::<String>::new()).0, 2);
}

#[test]
fn domain_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (code, out) = run(d, &["member", "--sec", "@missing.json", "--elem", "@missing.json"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("error: "));

    ok(d, &["hom", "keygen", "--fixture", "klein4", "--pub", "@pk.json", "--sec", "@sk.json"]);
    let (code, out) = run(d, &["hom", "encrypt", "--pub", "@pk.json", "--msg", "[3]", "--out", "@c.json"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("error: homcrypt: "), "{out}");
    assert_eq!(run(d, &["hom", "keygen", "--fixture", "q8", "--pub", "@a", "--sec", "@b"]).0, 2);
    assert_eq!(run(d, &["gdh", "--seed", "1"]).0, 2);
}

#[test]
fn gen_member_ltp() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--seed", "7", "--size", "30", "--pub", "@p.json", "--sec", "@s.json"]);
    ok(d, &["sample", "--pub", "@p.json", "--seed", "2", "--out", "@e.json"]);
    let out = ok(d, &["member", "--sec", "@s.json", "--elem", "@e.json", "--witness", "@w.json"]);
    assert!(out.starts_with("yes\n"));
    assert!(d.join("w.json").exists());

    let oracle = ok(d, &["oracle", "solve", "--pub", "@p.json", "--elem", "@e.json"]);
    assert!(oracle.starts_with("yes "));
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut outs = vec![];
    for d in [a.path(), b.path()] {
        let mut log = String::new();
        log += &ok(d, &["gen", "--seed", "7", "--pub", "@p.json", "--sec", "@s.json"]);
        log += &ok(d, &["aag", "--pub", "@p.json", "--seed", "3", "--transcript", "@aag.jsonl"]);
        log += &ok(d, &["mparty", "--pub", "@p.json", "--parties", "5", "--transcript", "@mp.jsonl"]);
        log += &ok(d, &["gdh", "--p", "101", "--seed", "4", "--transcript", "@dh.jsonl"]);
        log += &ok(d, &["hom", "keygen", "--fixture", "s3", "--seed", "1", "--pub", "@pk.json", "--sec", "@sk.json"]);
        log += &ok(d, &["hom", "encrypt", "--pub", "@pk.json", "--msg", "[1,-2,1]", "--seed", "9", "--out", "@c.json"]);
        log += &ok(d, &["hom", "decrypt", "--sec", "@sk.json", "--in", "@c.json"]);
        log += &ok(d, &["attack", "scsp", "--q", "17", "--seed", "5", "--report", "@scsp.json"]);
        outs.push(log);
    }
    assert_eq!(outs[0], outs[1]);
    for f in ["p.json", "s.json", "aag.jsonl", "mp.jsonl", "dh.jsonl", "pk.json", "sk.json", "c.json", "scsp.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert!(outs[0].contains("agree yes"));
}

#[test]
fn homomorphic_pipeline_and_coset_attack() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["hom", "keygen", "--fixture", "klein4", "--seed", "2", "--pub", "@pk.json", "--sec", "@sk.json"]);
    ok(d, &["hom", "encrypt", "--pub", "@pk.json", "--msg", "[1,2]", "--out", "@c.json"]);
    let plain = ok(d, &["hom", "decrypt", "--sec", "@sk.json", "--in", "@c.json"]);
    assert!(plain.trim_end().starts_with('['));
    let report = ok(d, &["attack", "coset", "--pub", "@pk.json", "--in", "@c.json", "--bound", "400"]);
    assert!(report.contains("\"attack\":\"coset\""), "{report}");
}
