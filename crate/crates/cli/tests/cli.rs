use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn testdata(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/testdata")
        .join(name)
}

fn predmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_predmap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn schema() -> String {
    testdata("geometry.pls").to_str().unwrap().to_string()
}

fn listing() -> String {
    testdata("tetragon.pl").to_str().unwrap().to_string()
}

#[test]
fn validate_tetragon_listing() {
    let out = predmap(&["validate", "--schema", &schema(), "--kb", &listing()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn validate_reports_positions() {
    let dir = tempfile::tempdir().unwrap();
    let kb = write(&dir, "bad.pl", "'Point'(a,1,1).\n'Point'(b,'oops,2).\n");
    let out = predmap(&["validate", "--kb", &kb]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr(&out).contains("bad.pl:2:11: unterminated quoted atom"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn validate_unresolvable_and_undecodable() {
    let dir = tempfile::tempdir().unwrap();
    let kb = write(&dir, "kb.pl", "'Polygon'(a).\n'Point'(a,2,true).\n'Point'(X,1,1).\n");
    let out = predmap(&["validate", "--schema", &schema(), "--kb", &kb]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("kb.pl:1:1: no class registered for 'Polygon'/1"), "{err}");
    assert!(err.contains("kb.pl:2:1: cannot decode"), "{err}");
    assert!(err.contains("kb.pl:3:1: fact is not ground"), "{err}");
    // without a schema only syntax and groundness are checked
    let kb = write(&dir, "kb2.pl", "'Polygon'(a).\n");
    assert_eq!(code(&predmap(&["validate", "--kb", &kb])), 0);
}

#[test]
fn canon_is_idempotent_and_drops_comments() {
    let dir = tempfile::tempdir().unwrap();
    let out = predmap(&["canon", "--kb", &listing()]);
    assert_eq!(code(&out), 0);
    let once = stdout(&out);
    assert_eq!(once.lines().count(), 1);
    let first = write(&dir, "once.pl", &once);
    assert_eq!(stdout(&predmap(&["canon", "--kb", &first])), once);

    let commented = write(
        &dir,
        "c.pl",
        "% header\np( a ,'b c' ). % trailing\r\n\nq([1 , 2.50]).\n",
    );
    let out = predmap(&["canon", "--kb", &commented]);
    assert_eq!(stdout(&out), "p(a,'b c').\nq([1,2.5]).\n");

    let target = dir.path().join("out.pl");
    let out = predmap(&["canon", "--kb", &commented, "--out", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    assert_eq!(fs::read_to_string(target).unwrap(), "p(a,'b c').\nq([1,2.5]).\n");

    let broken = write(&dir, "broken.pl", "p(a.\n");
    assert_eq!(code(&predmap(&["canon", "--kb", &broken])), 1);
}

#[test]
fn decls_lists_most_general_terms() {
    let out = predmap(&["decls", "--schema", &schema()]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "'Point'(Id,X,Y).\n'Polygon'(Id,Segments).\n'Polygon'(Id,Segments,Diagonals).\n'Segment'(Id,Point0,Point1).\n"
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.pls", "class('X',[extends('X')],[attr(a,int)]).\n");
    let out = predmap(&["decls", "--schema", &bad]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("inheritance cycle"));
}

#[test]
fn query_prints_bindings() {
    let out = predmap(&[
        "query",
        "--schema",
        &schema(),
        "--kb",
        &listing(),
        "--goal",
        "'Polygon'(abcd,S,D)",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("  S = ['Segment'(ab,"));
    assert!(lines[2].starts_with("  D = ['Segment'(ac,"));
    assert_eq!(lines[3], "1 match");

    let out = predmap(&[
        "query",
        "--schema",
        &schema(),
        "--kb",
        &listing(),
        "--goal",
        "'Polygon'(xyz,S,D)",
    ]);
    assert_eq!((code(&out), stdout(&out)), (0, "0 matches\n".to_string()));
}

#[test]
fn query_shared_variable() {
    let dir = tempfile::tempdir().unwrap();
    let kb = write(&dir, "p.pl", "p(a,a).\np(a,b).\n");
    let out = predmap(&["query", "--kb", &kb, "--goal", "p(X,X)"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "p(a,a).\n  X = a\n1 match\n");
    // with a schema the facts are unresolvable unless --permissive
    let out = predmap(&["query", "--schema", &schema(), "--kb", &kb, "--goal", "p(X,X)"]);
    assert_eq!(code(&out), 1);
    let out = predmap(&[
        "query",
        "--schema",
        &schema(),
        "--kb",
        &kb,
        "--goal",
        "p(X,_)",
        "--permissive",
    ]);
    assert_eq!(stdout(&out), "p(a,a).\n  X = a\np(a,b).\n  X = a\n2 matches\n");
    assert_eq!(code(&predmap(&["query", "--kb", &kb, "--goal", "p(X"])), 1);
    assert_eq!(code(&predmap(&["query", "--kb", &kb])), 2);
}

#[test]
fn roundtrip_checks_every_fact() {
    let out = predmap(&["roundtrip", "--schema", &schema(), "--kb", &listing()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dir = tempfile::tempdir().unwrap();
    let empty = write(&dir, "empty.pl", "");
    assert_eq!(code(&predmap(&["roundtrip", "--schema", &schema(), "--kb", &empty])), 0);
    let bad = write(&dir, "bad.pl", "'Point'(a,2,true).\n");
    let out = predmap(&["roundtrip", "--schema", &schema(), "--kb", &bad]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("fact 1: decode failed"), "{}", stderr(&out));
}

#[test]
fn usage_and_io_errors_exit_2() {
    assert_eq!(code(&predmap(&["decls"])), 2);
    assert_eq!(code(&predmap(&["roundtrip", "--kb", &listing()])), 2);
    assert_eq!(code(&predmap(&["canon", "--kb", "/nonexistent/kb.pl"])), 2);
    assert_eq!(code(&predmap(&["validate"])), 2);
    assert_eq!(code(&predmap(&["frobnicate"])), 2);
    assert_eq!(code(&predmap(&[])), 2);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "query",
        "--schema",
        &schema(),
        "--kb",
        &listing(),
        "--goal",
        "'Polygon'(I,S,D)",
    ];
    assert_eq!(predmap(&args).stdout, predmap(&args).stdout);
}
