use std::path::Path;
use std::process::{Command, Output};

fn bstree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bstree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("session.ini");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn nf_applies_defining_relation() {
    let o = bstree(&["nf", "bs23", "t x^2 t^-1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "x^3\n"));
    let o = bstree(&["nf", "non2", "b1 a1 b1^-1 a1^-1 b2 a2 b2^-1 a2^-1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "1\n"));
    let o = bstree(&["nf", "Z2", "b a b^-1"]);
    assert_eq!(stdout(&o), "a\n");
}

#[test]
fn nf_input_errors_exit_2() {
    assert_eq!(code(&bstree(&["nf", "nowhere", "x"])), 2);
    let o = bstree(&["nf", "bs23", "y"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("y"));
    assert_eq!(code(&bstree(&["nf", "bs23", "x^two"])), 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&bstree(&[])), 2);
    assert_eq!(code(&bstree(&["frobnicate"])), 2);
    assert_eq!(code(&bstree(&["ball", "bs23", "--radius", "many"])), 2);
    assert_eq!(code(&bstree(&["check", "bs23", "c3"])), 2);
    assert_eq!(code(&bstree(&["suite", "surface", "--curve", "sideways"])), 2);
    let help = bstree(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("suite"));
}

#[test]
fn ball_dot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.dot");
    let second = dir.path().join("b.dot");
    for path in [&first, &second] {
        let o = bstree(&[
            "ball",
            "bs23",
            "--radius",
            "2",
            "--bound",
            "6",
            "--dot",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).starts_with("ball bs23 [radius=2 transversal=6] vertices=26 edges=25 complete=true\n"));
    }
    let a = std::fs::read(&first).unwrap();
    assert_eq!(a, std::fs::read(&second).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("graph tree {\n") && text.ends_with("}\n"));
    // BS(2,3): every vertex has 2 + 3 neighbours, so 1 + 5 + 5·4 vertices.
    assert_eq!(
        text.lines()
            .filter(|l| l.trim_start().starts_with('n') && l.contains("[label="))
            .count(),
        26
    );
    assert_eq!(text.matches(" -- ").count(), 25);
}

#[test]
fn barycentric_dot_splits_edges() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.dot");
    let o = bstree(&[
        "ball",
        "sep2",
        "--radius",
        "1",
        "--bound",
        "1",
        "--barycentric",
        "--dot",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let midpoints = text.matches("shape=point").count();
    assert_eq!(midpoints, 5);
    assert_eq!(text.matches(" -- ").count(), 2 * midpoints);
}

#[test]
fn dot_write_failure_exits_2() {
    let o = bstree(&["ball", "bs23", "--radius", "1", "--dot", "/nonexistent-dir/x.dot"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn act_on_vertices_and_edges() {
    let o = bstree(&["act", "bs23", "t", "V:1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "t · 1·V = t·V\ndistance 1\n"));
    let o = bstree(&["act", "bs23", "x^2", "edge:1"]);
    assert_eq!(stdout(&o), "x^2 · 1·C = 1·C\nfixed yes\n");
    let o = bstree(&["act", "bs23", "x", "edge:1"]);
    assert_eq!(stdout(&o), "x · 1·C = x·C\nfixed no\n");
    let o = bstree(&["act", "sep2", "a1", "B:1"]);
    assert_eq!(stdout(&o), "a1 · 1·B = a1·B\ndistance 2\n");
    assert_eq!(code(&bstree(&["act", "bs23", "t", "B:1"])), 2);
    assert_eq!(code(&bstree(&["act", "bs23", "t", "nowhere"])), 2);
}

#[test]
fn check_exit_codes() {
    let ok = bstree(&["check", "bs23"]);
    assert_eq!(code(&ok), 0);
    let text = stdout(&ok);
    for name in ["c1 [", "c2 [", "faithful [", "not-line [", "minimal ["] {
        assert!(text.contains(name), "{name} missing");
    }
    let bad = bstree(&["check", "bs24", "c2"]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("c2 [conj=1 power=16] ViolationWitness(⟨x^4⟩ ⊊ ⟨x^2⟩"));
    assert_eq!(code(&bstree(&["check", "z2z3", "c1"])), 0);
    assert_eq!(code(&bstree(&["check", "nowhere"])), 2);
}

#[test]
fn every_report_line_carries_bounds() {
    let o = bstree(&["check", "non2", "all"]);
    for line in stdout(&o).lines().filter(|l| !l.starts_with("  ")) {
        assert!(line.contains(" [") && line.contains('='), "no bounds on `{line}`");
    }
}

#[test]
fn extend_outcomes() {
    let o = bstree(&["extend", "non2", "twist"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("1·V -> 1·V"));
    assert!(text.contains("compatibility [sample=65 radius=2 transversal=1] Verified"));
    let o = bstree(&["extend", "bs23", "conj"]);
    assert!(stdout(&o).contains("class: hyperbolic, translation length 1"));
    let broken = bstree(&["extend", "non2", "broken"]);
    assert_eq!(code(&broken), 1);
    assert!(stdout(&broken).starts_with("automorphism ViolationWitness("));
    assert_eq!(code(&bstree(&["extend", "bs23", "twist"])), 2);
    assert_eq!(code(&bstree(&["extend", "bs23", "missing"])), 2);
}

#[test]
fn suite_bs_golden() {
    let o = bstree(&["suite", "bs", "--p", "2", "--q", "3", "--kmax", "4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), golden("suite_bs.txt"));
    assert!(stdout(&o).contains("k = 3: t^3 x^24 t^-3 = x^81"));
}

#[test]
fn suite_freeproduct_golden() {
    let o = bstree(&["suite", "freeproduct"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), golden("suite_freeproduct.txt"));
}

#[test]
fn suite_bs_rejects_degenerate_parameters() {
    assert_eq!(code(&bstree(&["suite", "bs", "--p", "1", "--q", "3"])), 2);
}

#[test]
fn suite_surface_is_seed_deterministic() {
    let run = |seed: &str| {
        bstree(&[
            "suite",
            "surface",
            "--curve",
            "separating:1",
            "--seed",
            seed,
            "--samples",
            "200",
        ])
    };
    let (a, b, c) = (run("11"), run("11"), run("12"));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&c).contains("seed=12"));
    assert!(stdout(&a).contains("solver-agreement [samples=200 length=20 seed=11] NoViolationUpTo"));
}

#[test]
fn timings_go_to_stderr_only() {
    let plain = bstree(&["suite", "bs"]);
    let timed = bstree(&["suite", "bs", "--timings"]);
    assert_eq!(plain.stdout, timed.stdout);
    assert!(stderr(&timed).contains("timing identities:"));
}

#[test]
fn config_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        &dir,
        "[group F]\nkind = free\ngenerators = a b\n\n[group G]\nkind = free\ngenerators = u v\n\n\
         [splitting s]\nkind = amalgam\na = F\nb = G\nedge = c\nfirst = a b a^-1 b^-1\nsecond = u v u^-1 v^-1\n\n\
         [bounds]\nword = 1\n",
    );
    let o = bstree(&["--config", &path, "nf", "s", "a b a^-1 b^-1 v u v^-1 u^-1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "1\n"));
    let o = bstree(&["--config", &path, "check", "s", "c1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("c1 [word=1] Verified"));
}

#[test]
fn config_errors_exit_2_with_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(&dir, "[splitting s]\nkind = amalgam\na = H\nb = H\n");
    let o = bstree(&["--config", &path, "check", "s"]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("line 3: undefined group `H`"), "{err}");
    assert!(err.contains("line 4"));
    let o = bstree(&["--config", "/nonexistent/session.ini", "check", "s"]);
    assert_eq!(code(&o), 2);
}
