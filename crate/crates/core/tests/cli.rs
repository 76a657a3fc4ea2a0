use std::io::Write as _;
use std::path::PathBuf;
use std::process::{Command, Output};

use dts_core::report::RunReport;

fn dts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dts"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("dts runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn discourse(name: &str) -> String {
    PathBuf::from("discourses").join(format!("{name}.txt")).display().to_string()
}

#[test]
fn check_accepts_well_typed_forms() {
    let o = dts(&["check", "terms/basic.dts"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("j : entity"), "{out}");
    assert!(out.contains("(fst ?u) : entity"), "{out}");
}

#[test]
fn check_reports_the_line_of_a_type_error() {
    let o = dts(&["check", "terms/role-error.dts"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("terms/role-error.dts:2: error: type mismatch at fun.arg"), "{}", stderr(&o));
    let o = dts(&["check", "terms/sigma-sort.dts"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("(kind, type)"), "{}", stderr(&o));
}

#[test]
fn check_inserts_coercions_unless_disabled() {
    let o = dts(&["check", "terms/replace.dts"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("coercion (lambda (z) (pair (fst z) (snd (snd z))))"), "{}", stdout(&o));
    let o = dts(&["check", "--no-subtyping", "terms/replace.dts"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("type mismatch at body.body"), "{}", stderr(&o));
}

#[test]
fn check_structured_output() {
    let o = dts(&["--format", "structured", "check", "terms/replace.dts"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["line"], 3);
    assert_eq!(v[0]["coercions"].as_array().unwrap().len(), 1);
}

#[test]
fn check_missing_file() {
    let o = dts(&["check", "terms/no-such-file.dts"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn subtype_prints_witness_or_absent() {
    let o = dts(&["subtype", "(Evt_AP a p)", "(Evt_A a)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "(lambda (z) (pair (fst z) (fst (snd z))))");
    let o = dts(&["subtype", "(Evt_A a)", "(Evt_AP a p)"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "absent");
    let o = dts(&["--format", "structured", "subtype", "(Evt_AP a p)", "(Evt_P p)"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"], "present");
    let o = dts(&["subtype", "(sigma", "Event"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn resolve_success_and_felicity_failure() {
    let o = dts(&["resolve", &discourse("mary-did-too")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("readings: 1"), "{}", stdout(&o));
    let o = dts(&["resolve", &discourse("infelicitous")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no resolution for @_1"), "{}", stderr(&o));
}

#[test]
fn worst_exit_code_wins_and_order_is_kept() {
    let files = [discourse("hat"), discourse("infelicitous"), discourse("passive")];
    let o = dts(&["export-fol", &files[0], &files[1], &files[2]]);
    assert_eq!(code(&o), 2);
    let out = stdout(&o);
    let hat = out.find("# discourses/hat.txt").unwrap();
    let passive = out.find("# discourses/passive.txt").unwrap();
    assert!(hat < passive, "{out}");
    assert!(!out.contains("infelicitous"), "{out}");
}

#[test]
fn unknown_words_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.txt");
    std::fs::write(&path, "John frobnicated.\n").unwrap();
    let o = dts(&["resolve", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn trace_shows_goals_and_witnesses() {
    let o = dts(&["resolve", "--trace", &discourse("hat")]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("goal @1 : "), "{out}");
    assert!(out.contains("antecedent π1π2(c) : "), "{out}");
    assert!(out.contains("witness [strict]"), "{out}");
    assert!(out.contains("witness [sloppy]"), "{out}");
    let o = dts(&["resolve", "--trace", &discourse("infelicitous")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("goal @1 : "), "{}", stderr(&o));
}

#[test]
fn structured_report_round_trips() {
    let o = dts(&["--format", "structured", "resolve", "--trace", &discourse("hat")]);
    assert_eq!(code(&o), 0);
    let report = RunReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(report.readings.len(), 2);
    assert_eq!(report.goals.len(), 1);
    assert!(report.trace.is_some());
    assert_eq!(report.sentences[1].text, "Fred does too.");
}

#[test]
fn export_fol_lines() {
    let o = dts(&["export-fol", &discourse("hat")]);
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("strict: ∃x. hat(x)"), "{lines:?}");
    assert!(lines[1].starts_with("sloppy: ∃x. hat(x)"), "{lines:?}");
    let o = dts(&["export-fol", "--canonical", &discourse("mary-did-too")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("agent-replaced: ∃"), "{}", stdout(&o));
    let o = dts(&["--format", "structured", "export-fol", &discourse("passive")]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["readings"][0]["label"], "patient-replaced");
}

#[test]
fn max_readings_caps_the_output() {
    let o = dts(&["export-fol", "--max-readings", "1", &discourse("hat")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn custom_lexicon() {
    let mut lex = tempfile::NamedTempFile::new().unwrap();
    writeln!(lex, "alice name al female\nbert name bt male\nleft verb left intrans").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.txt");
    std::fs::write(&path, "Alice left. Bert did too.\n").unwrap();
    let o = dts(&["--lexicon", lex.path().to_str().unwrap(), "export-fol", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "agent-replaced: ∃e. left(e) ∧ agent(e, al) ∧ ∃e''. left(e'') ∧ agent(e'', bt)");
    // The bundled names are gone.
    std::fs::write(&path, "John left.\n").unwrap();
    let o = dts(&["--lexicon", lex.path().to_str().unwrap(), "resolve", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "pairs noun pair").unwrap();
    let o = dts(&["--lexicon", bad.path().to_str().unwrap(), "resolve", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("reserved"), "{}", stderr(&o));
}
