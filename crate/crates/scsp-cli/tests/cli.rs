//! End-to-end tests of the `scsp` binary: exit codes, plain output and the
//! JSON schema.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests");
    p.push("fixtures");
    p.push(name);
    p.display().to_string()
}

fn scsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON output")
}

#[test]
fn check_refutes_triangle_at_step_one() {
    let out = scsp(&["check", &fixture("triangle_unsat.scsp")]);
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).contains("INCONSISTENT (step 1: qualitative pb)"));
}

#[test]
fn check_accepts_mixed_disjunction() {
    let out = scsp(&["check", &fixture("mixed_disjunction.scsp")]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).trim().starts_with("CONSISTENT"));
}

#[test]
fn check_refutes_sector_clash_at_step_two() {
    let out = scsp(&["check", &fixture("sector_clash.scsp")]);
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).contains("step 2"));
}

#[test]
fn check_refutes_strict_cycle() {
    let out = scsp(&["check", &fixture("ne_cycle.scsp")]);
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).contains("INCONSISTENT"));
}

fn parse_witness_line(line: &str) -> Option<(String, f64, f64)> {
    let (name, rest) = line.split_once(": ")?;
    let rest = rest.trim().strip_prefix('(')?.strip_suffix(')')?;
    let (x, y) = rest.split_once(',')?;
    Some((
        name.trim().to_string(),
        x.trim().parse().ok()?,
        y.trim().parse().ok()?,
    ))
}

#[test]
fn solve_prints_witness_respecting_flags() {
    let out = scsp(&["solve", &fixture("two_point_ne.scsp")]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut coords = std::collections::HashMap::new();
    for line in text.lines().skip(1) {
        if let Some((name, x, y)) = parse_witness_line(line) {
            coords.insert(name, (x, y));
        }
    }
    let a = coords["A"];
    let b = coords["B"];
    // [co] flags: closed lower bound, open upper bound.
    assert!(a.0 > b.0, "x_A > x_B expected: {a:?} {b:?}");
    assert!(a.1 >= b.1, "y_A >= y_B expected: {a:?} {b:?}");
}

#[test]
fn solve_witness_satisfies_unary_ray() {
    let out = scsp(&["solve", &fixture("unary.scsp")]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let p = text
        .lines()
        .skip(1)
        .find_map(parse_witness_line)
        .expect("witness line");
    assert_eq!(p.0, "P");
    // On the diagonal ray from the pinned origin, strictly away from it.
    assert!((p.1 - p.2).abs() < 1e-6, "diagonal: {p:?}");
    assert!(p.1 > 1e-9);
}

#[test]
fn pc_refines_chain_edge() {
    let out = scsp(&["pc", &fixture("north_chain.scsp")]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.contains("A C: sector(pi/2,pi/2)[cc]"),
        "missing refined edge in:\n{text}"
    );
}

#[test]
fn pc_reports_empty_edge() {
    let out = scsp(&["pc", &fixture("sector_clash.scsp")]);
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).contains("EMPTY at A B"));
}

#[test]
fn pc_output_literals_reparse() {
    let out = scsp(&["pc", &fixture("north_chain.scsp")]);
    for line in stdout(&out).lines() {
        let Some((_, literal)) = line.rsplit_once(": ") else {
            continue;
        };
        // Round-trip through the binary: composing with `eq` is identity.
        let echo = scsp(&["compose", literal, "eq"]);
        assert_eq!(exit_code(&echo), 0, "literal `{literal}` failed to parse");
        assert_eq!(stdout(&echo).trim(), literal, "canonical form drifted");
    }
}

#[test]
fn linearize_emits_three_rows_for_a_ray() {
    let out = scsp(&["linearize", &fixture("north_pair.scsp")]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3, "{text}");
    assert_eq!(rows.iter().filter(|r| r.contains(" < ")).count(), 1);
    assert_eq!(rows.iter().filter(|r| r.contains(" <= ")).count(), 2);
    assert!(text.contains("xA") && text.contains("xB"));
}

#[test]
fn linearize_rejects_non_basic_scenarios() {
    let out = scsp(&["linearize", &fixture("mixed_disjunction.scsp")]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("basic"));
}

#[test]
fn compose_overlapping_quarters() {
    let out = scsp(&["compose", "sector(0,pi/4)", "sector(pi/4,pi/2)"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out).trim(), "sector(0,pi/2)[cc]");
}

#[test]
fn compose_rejects_bad_literals() {
    let out = scsp(&["compose", "sector(0,pi/4)", "nonsense"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn tables_prints_both_calculi() {
    for calc in ["cs", "pb"] {
        let out = scsp(&["tables", calc]);
        assert_eq!(exit_code(&out), 0);
        let text = stdout(&out);
        assert!(text.contains("composition table"));
        for atom in ["No", "NE", "Ea", "SE", "So", "SW", "We", "NW", "Eq"] {
            assert!(text.contains(atom), "{calc} table missing {atom}");
        }
    }
    let out = scsp(&["tables", "xx"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn oracle_finds_witness_for_satisfiable_fixture() {
    let out = scsp(&["oracle", &fixture("mixed_disjunction.scsp")]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("witness found"));
}

#[test]
fn oracle_is_inconclusive_on_contradiction() {
    let out = scsp(&["oracle", &fixture("sector_clash.scsp")]);
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).contains("inconclusive"));
}

#[test]
fn parse_errors_report_position_and_exit_two() {
    let dir = std::env::temp_dir().join("scsp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.scsp");
    std::fs::write(&path, "point A\npoint B\nA B wobble\n").unwrap();
    let out = scsp(&["check", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column 5"), "{err}");

    let out = scsp(&["check", "/nonexistent/definitely-missing.scsp"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn json_check_schema_is_stable() {
    let out = scsp(&["--json", "check", &fixture("triangle_unsat.scsp")]);
    assert_eq!(exit_code(&out), 1);
    let v = json(&out);
    assert_eq!(v["command"], "check");
    assert_eq!(v["consistent"], false);
    assert_eq!(v["refuted_at_step"], 1);
    assert_eq!(v["calculus"], "pb");
    assert!(v["edge"].is_array());
    assert!(v["witness"].is_null());
}

#[test]
fn json_solve_carries_witness_and_scenario() {
    let out = scsp(&["--json", "solve", &fixture("mixed_disjunction.scsp")]);
    assert_eq!(exit_code(&out), 0);
    let v = json(&out);
    assert_eq!(v["command"], "solve");
    assert_eq!(v["consistent"], true);
    let witness = v["witness"].as_object().expect("witness object");
    assert_eq!(witness.len(), 3);
    for coords in witness.values() {
        assert_eq!(coords.as_array().unwrap().len(), 2);
    }
    let scenario = v["scenario"].as_array().expect("scenario edges");
    assert_eq!(scenario.len(), 3);
    for edge in scenario {
        assert!(edge["from"].is_string());
        assert!(edge["to"].is_string());
        assert!(edge["relation"].is_string());
    }
}

#[test]
fn json_tables_and_pc_schemas() {
    let out = scsp(&["--json", "tables", "pb"]);
    let v = json(&out);
    assert_eq!(v["command"], "tables");
    assert_eq!(v["calculus"], "pb");
    assert_eq!(v["entries"].as_array().unwrap().len(), 81);

    let out = scsp(&["--json", "pc", &fixture("north_chain.scsp")]);
    let v = json(&out);
    assert_eq!(v["command"], "pc");
    assert!(v["empty_edge"].is_null());
    assert_eq!(v["matrix"].as_array().unwrap().len(), 3);
}

#[test]
fn no_lp_leaves_flag_still_decides_fixtures() {
    let out = scsp(&["--no-lp-leaves", "check", &fixture("mixed_disjunction.scsp")]);
    assert_eq!(exit_code(&out), 0);
    let out = scsp(&["--no-lp-leaves", "check", &fixture("triangle_unsat.scsp")]);
    assert_eq!(exit_code(&out), 1);
}
