use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use ybs_cli::{parse_ybs, parse_ybs_all};
use ybs_core::construct::{gap_example, gi_x};
use ybs_core::enumerate::{is_isomorphic, is_isomorphic_with_cap};
use ybs_core::is_square_free_solution;

fn ybs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ybs")).args(args).output().expect("binary runs")
}

fn ybs_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ybs"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn fixture(name: &str) -> String {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    root.to_str().unwrap().to_string()
}

fn temp_path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn analyze_gap_fixture() {
    let o = ybs(&["analyze", &fixture("gap12.ybs")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for line in ["mpl: 3\n", "group order: 8\n", "group abelian: yes\n", "sol(group): 1\n", "sol(G): 2\n"] {
        assert!(text.contains(line), "{line:?} missing:\n{text}");
    }
}

#[test]
fn fixtures_match_the_built_in_examples() {
    let gap = parse_ybs(&std::fs::read_to_string(fixture("gap12.ybs")).unwrap()).unwrap();
    assert_eq!(gap, gap_example());
    let jump = parse_ybs(&std::fs::read_to_string(fixture("jump26.ybs")).unwrap()).unwrap();
    assert_eq!(jump, ybs_core::construct::jump_example());
}

#[test]
fn analyze_json() {
    let o = ybs(&["analyze", "--json", &fixture("jump26.ybs")]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "ybs-report/1");
    assert_eq!(v["mpl"]["level"], 4);
    assert_eq!(v["group"]["order"], "16384");
    assert_eq!(v["group"]["solvable_length"], 3);
    assert_eq!(v["group"]["structure_group_solvable_length"], 4);
}

#[test]
fn construct_pipe_analyze() {
    let built = ybs(&["construct", "gi", "4"]);
    assert_eq!(code(&built), 0);
    let o = ybs_stdin(&["analyze", "-"], &stdout(&built));
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("n: 9\n"), "{text}");
    assert!(text.contains("mpl: 4\n"));
}

#[test]
fn minorder() {
    let o = ybs(&["minorder", "--mpl", "3", "--max-n", "5"]);
    assert_eq!((code(&o), stdout(&o)), (0, "5\n".to_string()));
    let o = ybs(&["minorder", "--mpl", "4", "--max-n", "5"]);
    assert_eq!(stdout(&o), "none\n");
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ybs(&["verify", &fixture("gap12.ybs")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("square-free solution: yes\n"));

    // degenerate but well-formed: explicit tables
    let bad = temp_path(&dir, "bad.ybs");
    std::fs::write(&bad, "ybs 1\nn 2\nL 1: 1 1\nL 2: 1 2\nR 1: 1 2\nR 2: 1 2\n").unwrap();
    let o = ybs(&["verify", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("nondegenerate: no"));

    let malformed = temp_path(&dir, "malformed.ybs");
    std::fs::write(&malformed, "ybs 1\nn 2\nL 1: 1 1\nL 2: 1 2\n").unwrap();
    let o = ybs(&["verify", malformed.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3, column 8: row not a bijection"), "{err}");

    let o = ybs(&["verify", temp_path(&dir, "missing.ybs").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn usage_errors() {
    for args in [
        &["frobnicate"][..],
        &["construct", "unknown-family", "3"],
        &["enumerate"],
        &["enumerate", "-n", "three"],
        &["verify"],
        &["graph", "x.ybs", "--bogus"],
    ] {
        let o = ybs(args);
        assert_eq!(code(&o), 64, "{args:?}");
        assert!(String::from_utf8(o.stderr).unwrap().starts_with("error:"), "{args:?}");
    }
    assert_eq!(code(&ybs(&["--help"])), 0);
}

#[test]
fn round_trip_every_family() {
    let dir = tempfile::tempdir().unwrap();
    let three = temp_path(&dir, "three.ybs");
    assert_eq!(code(&ybs(&["construct", "example", "three", "-o", three.to_str().unwrap()])), 0);
    let t = three.to_str().unwrap();
    let families: Vec<Vec<&str>> = vec![
        vec!["trivial", "4"],
        vec!["gi", "3"],
        vec!["easy", "3"],
        vec!["double", t],
        vec!["wreath", t, t],
        vec!["extend-tau", t, "(x1 x2)"],
        vec!["abelian-mpl2", "2", "4"],
        vec!["linear", "4", "3", "2"],
        vec!["stu", t, t],
        vec!["example", "gap12"],
        vec!["example", "jump26"],
    ];
    for (i, family) in families.iter().enumerate() {
        let out = temp_path(&dir, &format!("f{i}.ybs"));
        let mut args = vec!["construct"];
        args.extend(family);
        args.extend(["-o", out.to_str().unwrap()]);
        let o = ybs(&args);
        assert_eq!(code(&o), 0, "{family:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v = ybs(&["verify", out.to_str().unwrap()]);
        assert_eq!(code(&v), 0, "{family:?}");
    }
}

#[test]
fn construct_errors() {
    let o = ybs(&["construct", "linear", "5", "2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stderr).unwrap().contains("expected 0"));
    let o = ybs(&["construct", "extend-tau", &fixture("gap12.ybs"), "(x1 zz)"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn stu_union_command() {
    let dir = tempfile::tempdir().unwrap();
    let two = temp_path(&dir, "two.ybs");
    assert_eq!(code(&ybs(&["construct", "trivial", "2", "-o", two.to_str().unwrap()])), 0);
    let one = temp_path(&dir, "one.ybs");
    std::fs::write(&one, "ybs 1\nn 1\nL 1: 1\n").unwrap();
    // the single element of B swaps A; A acts trivially on B
    let out = temp_path(&dir, "u.ybs");
    let o = ybs(&[
        "construct",
        "stu",
        two.to_str().unwrap(),
        one.to_str().unwrap(),
        "--b-on-a",
        "(x1 x2)",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&ybs(&["verify", out.to_str().unwrap()])), 0);
    let o = ybs(&["construct", "stu", two.to_str().unwrap(), one.to_str().unwrap(), "--a-on-b", "()"]);
    assert_eq!(code(&o), 1, "wrong number of actions");
}

#[test]
fn retract_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = temp_path(&dir, "ret.ybs");
    let o = ybs(&["retract", &fixture("gap12.ybs"), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let ret = parse_ybs(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(ret.n(), 5);
    let o = ybs(&["retract", "-k", "3", &fixture("gap12.ybs")]);
    assert_eq!(parse_ybs(&stdout(&o)).unwrap().n(), 1);
    let o = ybs(&["construct", "gi", "5"]);
    let r = ybs_stdin(&["retract", "-"], &stdout(&o));
    let ret = parse_ybs(&stdout(&r)).unwrap();
    assert!(is_isomorphic_with_cap(&ret, &gi_x(4).unwrap(), 64).unwrap().is_some());
}

#[test]
fn enumerate_command() {
    let o = ybs(&["enumerate", "-n", "4", "--count-only"]);
    assert_eq!(stdout(&o), "30\n");
    let o = ybs(&["enumerate", "-n", "5", "--up-to-iso", "--count-only"]);
    assert_eq!(stdout(&o), "17\n");
    let o = ybs(&["enumerate", "-n", "5", "--up-to-iso", "--mpl", "3"]);
    let sets = parse_ybs_all(&stdout(&o)).unwrap();
    assert_eq!(sets.len(), 2);
    let gi = gi_x(3).unwrap();
    assert_eq!(sets.iter().filter(|q| is_isomorphic(q, &gi).unwrap().is_some()).count(), 1);
    let o = ybs(&["enumerate", "-n", "3"]);
    let sets = parse_ybs_all(&stdout(&o)).unwrap();
    assert_eq!(sets.len(), 4);
    assert!(sets.iter().all(is_square_free_solution));
    let single = ybs(&["enumerate", "-n", "4", "--shards", "1"]);
    let many = ybs(&["enumerate", "-n", "4", "--shards", "3"]);
    assert_eq!(single.stdout, many.stdout);
    let o = ybs(&["enumerate", "-n", "9"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn census_command() {
    let o = ybs(&["census", "--max-n", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("n\tcount\t"));
    assert!(lines[1].starts_with("2\t1\t1\t"));
    assert!(lines[3].starts_with("4\t30\t5\t"));
}

#[test]
fn graph_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = temp_path(&dir, "g.dot");
    let o = ybs(&["construct", "example", "three"]);
    let g = ybs_stdin(&["graph", "-", "-o", out.to_str().unwrap()], &stdout(&o));
    assert_eq!(code(&g), 0);
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.contains("n0 -> n1 [label=\"x3\"];"));
    assert!(dot.contains("n1 -> n0 [label=\"x3\"];"));
    assert_eq!(dot.matches("->").count(), 2);
    let with_loops = ybs_stdin(&["graph", "-", "--loops"], &stdout(&o));
    assert_eq!(stdout(&with_loops).matches("->").count(), 9);
    // only the target file appears in the directory
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("g.dot")]);
}

#[test]
fn graph_rejects_non_lri() {
    let o = ybs_stdin(&["graph", "-"], "ybs 1\nn 2\nL 1: 1 2\nL 2: 1 2\nR 1: 2 1\nR 2: 2 1\n");
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stderr).unwrap().contains("lri"));
}
