use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spirality"));
    c.env("SPIRALITY_NO_COLOR", "1");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIANGLE: &str = r#"{"graph": {
  "vertices": [
    {"id": "a", "kind": "horizontal", "orientable": true},
    {"id": "b", "kind": "horizontal", "orientable": true},
    {"id": "c", "kind": "geometrically_infinite", "orientable": true}
  ],
  "edges": [
    {"id": "e0", "from": "a", "to": "b", "h_ini": 2, "h_ter": 3, "omega": 1},
    {"id": "e1", "from": "b", "to": "c", "h_ini": 3, "h_ter": 4, "omega": 1},
    {"id": "e2", "from": "c", "to": "a", "h_ini": H, "h_ter": 2, "omega": 1}
  ]
}}"#;

fn triangle(h: &str) -> String {
    TRIANGLE.replace("H", h)
}

#[test]
fn twisted_pair_default_round_trip() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s8.json");
    let o = run(&["gen", "twisted-pair", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("expected = 3/2"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"expected\": \"3/2\""));

    let o = run(&["rw", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert!(t.contains("\ns = 3/2\n"), "{t}");
    assert!(t.contains("sigma(c1) = 3/2"), "{t}");
    assert!(t.contains("matches expected: yes"));

    let o = run(&["aspiral", s(&out)]);
    assert!(
        stdout(&o).contains("aspiral: no, witness c0·c1 = 3/2"),
        "{}",
        stdout(&o)
    );
    assert!(stdout(&o).contains("virtually embedded: no"));

    let o = run(&["fdtc", s(&out)]);
    assert!(stdout(&o).contains("fdtc(T) = 1"));
}

#[test]
fn twisted_pair_second_instance() {
    let o = run(&[
        "gen",
        "twisted-pair",
        "--k",
        "-2",
        "--p",
        "2",
        "--q",
        "3",
        "--r-minus",
        "1",
        "--r-plus",
        "3",
        "--d",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "m.json", &stdout(&o));
    let o = run(&["rw", s(&p)]);
    assert!(stdout(&o).contains("\ns = 25/81\n"), "{}", stdout(&o));
    assert!(stdout(&run(&["fdtc", s(&p)])).contains("fdtc(T) = -2"));
}

#[test]
fn bad_generator_parameters_are_domain_errors() {
    let o = run(&["gen", "twisted-pair", "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("k must be nonzero"));
    let o = run(&["gen", "twisted-pair", "--k", "1", "--r-minus", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn matched_slopes_have_trivial_spirality() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.json");
    assert!(run(&[
        "gen",
        "matched",
        "--pieces",
        "4",
        "--seed",
        "7",
        "--out",
        s(&out)
    ])
    .status
    .success());
    let o = run(&["rw", s(&out)]);
    assert!(stdout(&o).contains("\ns = 1\n"), "{}", stdout(&o));
    let o = run(&["aspiral", s(&out)]);
    assert!(stdout(&o).contains("aspiral: yes"));
    assert!(stdout(&o).contains("virtually embedded: yes"));
}

#[test]
fn aspiral_on_graphs() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "t.json", &triangle("4"));
    let o = run(&["aspiral", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("aspiral: yes\n"), "{}", stdout(&o));

    let p = write(
        &dir,
        "t5.json",
        &TRIANGLE.replace("\"h_ini\": H, \"h_ter\": 2", "\"h_ini\": 4, \"h_ter\": 5"),
    );
    let o = run(&["aspiral", s(&p)]);
    assert!(stdout(&o).contains("= 2/5"), "{}", stdout(&o));
    assert!(stdout(&o).contains("aspiral: no, witness"));

    let p = write(
        &dir,
        "empty.json",
        r#"{"graph": {"vertices": [], "edges": []}}"#,
    );
    let o = run(&["aspiral", s(&p)]);
    assert!(
        stdout(&o).contains("aspiral: yes (vacuous)"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok.json", &triangle("4"));
    assert_eq!(run(&["validate", s(&ok)]).status.code(), Some(0));

    let zero = write(&dir, "zero.json", &triangle("0"));
    let o = run(&["validate", s(&zero)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NonPositiveH"), "{}", stdout(&o));

    let malformed = write(&dir, "bad.json", &triangle("\"4/\""));
    let o = run(&["validate", s(&malformed)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 10"), "{}", stderr(&o));

    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["validate", s(&missing)]).status.code(), Some(2));
}

#[test]
fn rational_h_needs_the_flag() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "r.json", &triangle("\"7/2\""));
    let o = run(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NonIntegralH"));
    let o = run(&["validate", "--allow-rational-h", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("warning: warning[NonIntegralH]"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn unknown_fields_strict_and_lenient() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "u.json",
        &triangle("4").replace("\"id\": \"a\",", "\"id\": \"a\", \"note\": \"x\","),
    );
    let o = run(&["validate", s(&p)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("note"));
    let o = run(&["validate", "--lenient", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).contains("warning: unknown field"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn degenerate_crossing_names_the_torus() {
    let dir = TempDir::new().unwrap();
    let text = stdout(&run(&["gen", "twisted-pair"])).replace(
        "\"curve\": [\n        0,\n        1\n      ]",
        "\"curve\": [\n        1,\n        1\n      ]",
    );
    let p = write(&dir, "d.json", &text);
    let o = run(&["rw", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    let t = stdout(&o);
    assert!(
        t.contains("NotFlowTransverse") && t.contains("c0") && t.contains("torus T"),
        "{t}"
    );
}

#[test]
fn fdtc_entries() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "f.json",
        r#"{"fdtc": [{"id": "x", "l_plus": [1, 3], "l_minus": [1, 0], "e": [0, 1], "m": 2}]}"#,
    );
    let o = run(&["fdtc", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fdtc(x) = 3/2"));
    let p = write(
        &dir,
        "g.json",
        r#"{"fdtc": [{"l_plus": {"vector": [1, 0], "mult": 2}, "l_minus": [1, 0], "e": [0, 1]}]}"#,
    );
    let o = run(&["fdtc", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("not an integer multiple"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn crosscheck_random_and_file() {
    let o = run(&["crosscheck", "--random", "100", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mismatches = 0"));
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "s.json",
        &stdout(&run(&["gen", "twisted-pair", "--d", "3"])),
    );
    let o = run(&["crosscheck", s(&p)]);
    assert!(
        stdout(&o).contains("rw = 27/8") && stdout(&o).contains("holonomy = 27/8"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "s.json",
        &stdout(&run(&["gen", "matched", "--seed", "11"])),
    );
    for cmd in ["validate", "aspiral", "rw", "crosscheck"] {
        let a = run(&[cmd, s(&p)]);
        let b = run(&[cmd, s(&p)]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
        assert!(!stdout(&a).contains("generated_at"));
    }
    assert_eq!(
        run(&["gen", "matched", "--seed", "11"]).stdout,
        run(&["gen", "matched", "--seed", "11"]).stdout
    );
    let o = run(&["rw", "--timestamps", s(&p)]);
    assert!(stdout(&o).contains("generated_at: "));
}

#[test]
fn structured_output_is_json() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "t.json", &triangle("4"));
    let o = run(&["aspiral", "--format", "structured", s(&p)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "aspiral");
    assert!(v["input_digest"].as_str().unwrap().starts_with("sha256:"));
    assert!(v["results"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["label"] == "aspiral" && r["value"] == "yes"));
}

#[test]
fn side_convention_flag() {
    let dir = TempDir::new().unwrap();
    let text = stdout(&run(&["gen", "twisted-pair"]));
    let swapped = text
        .replace("\"from_side\": \"minus\"", "\"from_side\": \"PLUS\"")
        .replace("\"from_side\": \"plus\"", "\"from_side\": \"minus\"")
        .replace("PLUS", "plus");
    let p = write(&dir, "e.json", &swapped);
    let o = run(&["rw", "--side-convention", "enter", s(&p)]);
    assert!(stdout(&o).contains("\ns = 3/2\n"), "{}", stdout(&o));
    let o = run(&["rw", s(&p)]);
    assert!(stdout(&o).contains("\ns = 2/3\n"), "{}", stdout(&o));
}

#[test]
fn reads_stdin() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = bin()
        .args(["validate", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(triangle("4").as_bytes())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains('\x1b'));
}
