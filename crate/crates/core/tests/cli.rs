use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dlcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlcert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn file(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_owned()
}

#[test]
fn parse_prints_canonical_form() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.dl", "[ x := x + 1 ] x > 5");
    let o = dlcert(&["parse", s(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[x:=x+1;]x>5");
}

#[test]
fn parse_errors_exit_three() {
    let dir = TempDir::new().unwrap();
    for bad in ["", "x >", "[x:=1;"] {
        let p = file(&dir, "bad.dl", bad);
        let o = dlcert(&["parse", s(&p)]);
        assert_eq!(o.status.code(), Some(3), "input {bad:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(
        dlcert(&["parse", "/nonexistent/file.dl"]).status.code(),
        Some(3)
    );
    assert_eq!(dlcert(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn instantiate_quiz() {
    let dir = TempDir::new().unwrap();
    let q = file(&dir, "q.dl", "[ctrl;plant;]x>y");
    let o = dlcert(&["instantiate", "composeb", s(&q)]);
    assert_eq!(
        (o.status.code(), stdout(&o).as_str()),
        (Some(0), "[ctrl;][plant;]x>y")
    );
    let o = dlcert(&["instantiate", "assignb", s(&q)]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "n/a"));
}

#[test]
fn instantiate_with_explicit_substitution() {
    let dir = TempDir::new().unwrap();
    let sub = file(&dir, "s.sub", "a{} ~> x:=x+1; b{} ~> ?x>0; P ~> x>1;");
    let o = dlcert(&["instantiate", "composeb", "-", "--subst", s(&sub)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(
        stdout(&o),
        "VALID [x:=x+1;?x>0;]x>1 <-> [x:=x+1;][?x>0;]x>1"
    );
}

#[test]
fn equiv_refutes_and_accepts() {
    let dir = TempDir::new().unwrap();
    let lhs = file(&dir, "l.dl", "[x:=x+1]x>5");
    let good = file(&dir, "g.dl", "x>4");
    let bad = file(&dir, "b.dl", "x>5");
    let o = dlcert(&["equiv", s(&lhs), s(&good), "--trials", "500"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "not-refuted trials=500 unknowns=0");
    let o = dlcert(&["equiv", s(&lhs), s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("refuted\nx="));
}

#[test]
fn optimized_certificate_checks() {
    let dir = TempDir::new().unwrap();
    let input = "[x:=a^2+b;while(y^2<x){z:=z+y^2*x;y:=y+2*3;}]P";
    let src = file(&dir, "in.dl", input);
    let cert = dir.path().join("fold.cert");
    let o = dlcert(&["optimize", "constfold", s(&src), "--emit-cert", s(&cert)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out, "[x:=a^2+b;while(y^2<x){z:=z+y^2*x;y:=y+6;}]P");

    let claim = file(&dir, "claim.dl", &format!("{input} <-> {out}"));
    let o = dlcert(&["check-cert", s(&cert), s(&claim)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let wrong = file(&dir, "wrong.dl", &format!("{input} <-> {input}"));
    assert_eq!(
        dlcert(&["check-cert", s(&cert), s(&wrong)]).status.code(),
        Some(1)
    );

    let text = fs::read_to_string(&cert).unwrap();
    let tampered = file(&dir, "t.cert", &text.replacen("6", "7", 1));
    assert_ne!(
        dlcert(&["check-cert", s(&tampered), s(&claim)])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn rejected_optimization_exits_one() {
    let dir = TempDir::new().unwrap();
    let src = file(
        &dir,
        "in.dl",
        "[while(y^2<a^2+b){z:=z+y^2*(a^2+b);y:=y+2*3;}]P",
    );
    let o = dlcert(&[
        "optimize",
        "cse",
        s(&src),
        "--subexpr",
        "y^2",
        "--fresh",
        "x",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn loop_leaves_three_premises_open() {
    let dir = TempDir::new().unwrap();
    let src = file(
        &dir,
        "q.dl",
        "x>=1 & v>0 & A>0 -> [{{a:=0; ++ a:=A;}{x'=v,v'=a}}*]x>=0",
    );
    let cert = dir.path().join("loop.cert");
    let o = dlcert(&[
        "loop",
        s(&src),
        "--invariant",
        "x>=1 & v>0 & A>0",
        "--emit-cert",
        s(&cert),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        fs::read_to_string(&cert).unwrap().matches(" OPEN ").count(),
        3
    );
    let o = dlcert(&["check-cert", s(&cert), s(&src)]);
    assert_eq!(o.status.code(), Some(2));
}
