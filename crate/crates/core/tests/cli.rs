//! End-to-end runs of the `qcprop` binary: JSON shape and exit codes.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn qcprop(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qcprop")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, s) = qcprop(args);
    (code, serde_json::from_str(&s).unwrap_or_else(|e| panic!("{e}: {s}")))
}

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel).display().to_string()
}

fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn envelope_keys_are_stable_and_carry_the_hash() {
    let (code, v) = json(&["soundness", "Cliff"]);
    assert_eq!(code, 0);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    assert_eq!(keys, ["command", "fragment", "content_hash", "verdict", "report"]);
    let hash = qcprop::fragments::load_fragment("Cliff").unwrap().content_hash;
    assert_eq!(v["content_hash"], hash.as_str());
    // identical runs print identical bytes
    assert_eq!(qcprop(&["soundness", "Cliff"]).1, qcprop(&["soundness", "Cliff"]).1);
}

#[test]
fn unsound_fragment_file_is_negative() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "bad.frag", "(fragment Bad dim 2)\n(generators H S)\n(axiom HS lhs (gen H) rhs (gen S))\n");
    let (code, v) = json(&["soundness", &f]);
    assert_eq!(code, 1);
    assert_eq!(v["verdict"], "negative");
    assert_eq!(v["report"]["entries"][0]["sound"], false);
}

#[test]
fn closure_and_budget_exit_codes() {
    let (code, v) = json(&["closure", "Cliff3", "--wires", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["order"], 2592);
    let (code, _) = json(&["closure", "Cliff", "--wires", "2", "--cap", "100"]);
    assert_eq!(code, 3);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(qcprop(&["closure", "Cliff"]).0, 2);
    assert_eq!(qcprop(&["frobnicate"]).0, 2);
    assert_eq!(json(&["soundness", "NoSuchFragment"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.term", "(seq (gen H)");
    assert_eq!(json(&["eval", &bad]).0, 2);
}

#[test]
fn equal_normalize_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let hh = write(&dir, "hh.term", "(seq (gen H) (gen H))");
    let id = write(&dir, "id.term", "(id 1)");
    let s = write(&dir, "s.term", "(gen S)");
    let (code, v) = json(&["equal", &hh, &id, "--fragment", "Cliff"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["found"], true);
    // the printed script replays
    let script = v["report"]["script"].as_str().unwrap();
    let p = write(&dir, "found.deriv", script);
    assert_eq!(json(&["check-derivation", &p]).0, 0);

    let (code, v) = json(&["equal", &hh, &s, "--fragment", "Cliff"]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["semantically_equal"], false);

    let (code, v) = json(&["normalize", &hh, "--fragment", "Cliff"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["term"], "(seq (gen H) (gen H))");

    let (code, v) = json(&["eval", &hh]);
    assert_eq!(code, 0);
    assert_eq!(v["fragment"], "master2");
    // entries are coefficient vectors over powers of a primitive 24th root of unity
    assert_eq!(v["report"]["matrix"][0][0][0], "1/1");
    assert_eq!(v["report"]["matrix"][0][1][0], "0/1");
}

#[test]
fn equal_reports_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir, "a.term", "(seq (gen CNOT) (gen CNOT))");
    let b = write(&dir, "b.term", "(id 2)");
    let (code, v) = json(&["equal", &a, &b, "--fragment", "Cliff", "--depth", "2"]);
    assert_eq!(code, 3);
    assert_eq!(v["verdict"], "exhausted");
}

#[test]
fn derivation_corpus_and_broken_script() {
    assert_eq!(json(&["check-derivation", &data("derivations/cnotdihe_conservativity.deriv")]).0, 0);
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "broken.deriv",
        "(derivation (fragment Cliff) (initial (seq (gen H) (gen H))) (step S4 lr 0) (final (id 1)))",
    );
    let (code, v) = json(&["check-derivation", &p]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["derivations"][0]["ok"], false);
}

#[test]
fn minimality_independence_and_scalars() {
    let (code, v) = json(&["minimality", "RCliff"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["failed"].as_array().unwrap().len(), 0);
    let (code, v) = json(&["independence", "Cliff", "--axiom", "I"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["rows"].as_array().unwrap().len(), 2);
    let (code, v) = json(&["independence", "Cliff", "--axiom", "H2", "--interp", "?S"]);
    assert_eq!(code, 1);
    assert_eq!(v["report"]["witness"], false);
    let (code, v) = json(&["scalars", "Cliff"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["visible"]["order"], 8);
}

#[test]
fn refine_and_transfer_files() {
    let (code, v) = json(&["refine", &data("refine/cliffcs_mu4_mu8.refine")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["refined_order"], 8);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        &dir,
        "bad.refine",
        "(refine (fragment CliffCSsrc) (scalar i) (zeta (const omega8)) (m 4) (ell 2) (r 3))",
    );
    assert_eq!(json(&["refine", &bad]).0, 1);
    let (code, v) = json(&["transfer", &data("transfer/clifford.transfer")]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["encdec"]["all_equal"], true);
    assert_eq!(v["report"]["decenc"]["all_found"], true);
}

#[test]
fn evidence_small_run() {
    let (code, v) = json(&["evidence", "RCliff", "--wires", "1", "--len", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["report"]["failures"].as_array().unwrap().len(), 0);
}
