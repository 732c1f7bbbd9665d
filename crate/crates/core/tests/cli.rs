//! End-to-end checks of the command-line driver: output formats and exit
//! codes as documented in the manual.

use std::path::PathBuf;
use std::process::{Command, Output};

fn repo(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel).to_string_lossy().into_owned()
}

fn flpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flpc")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_meal_prints_canonical_model() {
    let out = flpc(&["solve", "--method", "oracle", &repo("programs/meal.flp")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1 model\nfirst=pasta second=fish\n");
    // both methods print byte-identical output
    let translated = flpc(&["solve", "--method", "translate", &repo("programs/meal.flp")]);
    assert_eq!(stdout(&out), stdout(&translated));
}

#[test]
fn translate_matches_golden() {
    let out = flpc(&["translate", &repo("programs/ham3.flp")]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/goldens/ham3.lp.txt"),
    )
    .unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn exit_codes() {
    // 0: success
    assert_eq!(flpc(&["check", &repo("programs/ham3.flp")]).status.code(), Some(0));
    // 1: syntax error
    let dir = std::env::temp_dir();
    let bad = dir.join("flpc_cli_bad.flp");
    std::fs::write(&bad, "p(.").unwrap();
    assert_eq!(flpc(&["parse", bad.to_str().unwrap()]).status.code(), Some(1));
    // 2: unsafe input
    let unsafe_file = dir.join("flpc_cli_unsafe.flp");
    std::fs::write(&unsafe_file, "f(Z) := 0.").unwrap();
    assert_eq!(flpc(&["check", unsafe_file.to_str().unwrap()]).status.code(), Some(2));
    // 4: resource guard
    let out = flpc(&["solve", "--max-search", "1", &repo("programs/ham3.flp")]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn compare_agrees_on_corpus_and_random_programs() {
    let out = flpc(&["compare", &repo("programs/ham3.flp")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "agree: 1 model\n");
    let out = flpc(&["compare", "--random", "10", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "10/10 programs agree\n");
}

#[test]
fn fasp_pipeline_subcommands() {
    let out = flpc(&["solve", &repo("programs/colouring3.fasp")]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("6 models\n"));
    let embedded = flpc(&["fasp2flp", &repo("programs/ham.fasp")]);
    assert!(embedded.status.success());
    assert!(stdout(&embedded).contains("next(X1) in { Y | node(Y) } :- node(X1)."));
    // the emitted text is itself a parseable functional program
    let tmp = std::env::temp_dir().join("flpc_cli_embedded.flp");
    std::fs::write(&tmp, stdout(&embedded)).unwrap();
    assert_eq!(flpc(&["parse", tmp.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_flpc"))
        .args(["solve", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(b"p(a). q(X) :- p(X).").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1 model\np(a) q(a)\n");
}
