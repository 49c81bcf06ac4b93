mod common;

use std::io::Write;
use std::process::Command;

use common::{cli, json, Schema};
use weilrad::cli::{EXIT_BUDGET, EXIT_HYPOTHESIS, EXIT_OK, EXIT_USAGE};
use weilrad::invariants::FibreSpec;

fn temp_grid(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("weilrad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(body.as_bytes())
        .unwrap();
    path
}

#[test]
fn predict_examples() {
    let (code, out, err) = cli(&["predict", "--fibre", "SL2@p=2;e=1,1", "--phi-injective"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(err.is_empty());
    assert_eq!(json(&out)["N"], 2);

    let (code, out, err) = cli(&["predict", "--fibre", "T1@p=2;e=1"]);
    assert_eq!(code, EXIT_HYPOTHESIS);
    assert!(out.is_empty());
    assert!(err.contains("non-commutative hypothesis"), "{err}");
}

#[test]
fn bounds_example() {
    let (code, out, _) = cli(&["bounds", "--fibre", "GL2@p=3;e=1"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["upper"], 2);
    assert_eq!(v["witness_lower"], 2);
    assert_eq!(v["proved"], true);
}

#[test]
fn json_outputs_match_schema() {
    let schema = Schema::shipped();
    let grid = temp_grid(
        "small.json",
        r#"[{"fibre":"GL2@p=2;e=1,1"},{"fibre":"SL2@p=2;e=1"},{"fibre":"Borel2@p=2;e=1"},{"fibre":"T1@p=2;e=2"},{"fibre":"GL2@p=3;e=2"}]"#,
    );
    let grid = grid.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "predict",
            "--fibre",
            "SL2@p=2;e=1,1",
            "--phi-injective",
            "--fibre",
            "GL2@p=3;e=1",
        ],
        vec![
            "predict",
            "--fibre",
            "PGL2@p=2;e=3",
            "--fibre",
            "T2@p=2;e=1",
        ],
        vec!["bounds", "--fibre", "GL2@p=3;e=1", "--fibre", "T1@p=2;e=1"],
        vec!["witness", "--fibre", "PGL2@p=2;e=2"],
        vec!["witness", "--fibre", "SL2@p=2;e=2,1", "--phi-injective"],
        vec!["witness", "--fibre", "GL2@p=2;e=1,1", "--kind", "borel"],
        vec![
            "witness",
            "--fibre",
            "GL2@p=2;e=2",
            "--kind",
            "superdiagonal",
        ],
        vec![
            "exponent",
            "--group",
            "GL2",
            "--ext",
            "p=2;e=1,1,1",
            "--samples",
            "64",
        ],
        vec!["exponent", "--group", "T1", "--ext", "p=2;e=2", "--timings"],
        vec!["borel", "--ext", "p=2;e=1,1"],
        vec![
            "brute-class",
            "--group",
            "SL2",
            "--ext",
            "p=2;e=1,1",
            "--stabilize",
            "2",
        ],
        vec!["report", "--grid", grid],
    ];
    for args in commands {
        let (code, out, err) = cli(&args);
        assert_eq!(code, EXIT_OK, "{args:?}: {err}");
        assert!(!out.is_empty());
        for line in out.lines() {
            if let Err(e) = schema.validate(&json(line)) {
                panic!("{args:?}: {e}");
            }
        }
    }
}

#[test]
fn validator_rejects_bad_documents() {
    let schema = Schema::shipped();
    assert!(schema
        .validate(&json(r#"{"rows": [], "summary": {}}"#))
        .is_err());
    assert!(schema.validate(&json(r#"{"N": -1}"#)).is_err());
    assert!(schema.validate(&json("[]")).is_err());
}

#[test]
fn other_formats() {
    let (code, out, _) = cli(&["bounds", "--fibre", "GL2@p=2;e=2", "--format", "tsv"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "upper\t3"), "{out}");
    let (code, out, _) = cli(&["predict", "--fibre", "GL2@p=2;e=2", "--format", "pretty"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\n  \"N\": 3"), "{out}");

    let grid = temp_grid(
        "fmt.json",
        r#"[{"fibre":"GL2@p=2;e=1"},{"fibre":"SL2@p=2;e=1,1"}]"#,
    );
    let (code, out, _) = cli(&[
        "report",
        "--grid",
        grid.to_str().unwrap(),
        "--format",
        "tsv",
    ]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("fibre\tstatus"));
    assert!(lines[2].contains("HYPOTHESIS-UNMET"));
    let (_, out, _) = cli(&[
        "report",
        "--grid",
        grid.to_str().unwrap(),
        "--format",
        "pretty",
    ]);
    assert!(out.contains("2 rows: 1 ok, 1 hypothesis-unmet"), "{out}");
}

#[test]
fn report_grid_edge_cases() {
    let empty = temp_grid("empty.json", "[]");
    let (code, out, _) = cli(&["report", "--grid", empty.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["rows"], json("[]"));
    assert_eq!(v["summary"]["rows"], 0);

    let unusual = temp_grid("unusual.json", r#"[{"fibre": "SL2@p=2;e=1,1"}]"#);
    let (code, out, _) = cli(&["report", "--grid", unusual.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["rows"][0]["status"], "HYPOTHESIS-UNMET");

    let bad = temp_grid(
        "bad.json",
        "[\n  {\"fibre\": \"GL2@p=2;e=1\"},\n  {\"fibre\": \"GL2@p=2;e=1\",,}\n]",
    );
    let (code, out, err) = cli(&["report", "--grid", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("line 3, column"), "{err}");

    let missing = cli(&["report", "--grid", "/nonexistent/grid.json"]);
    assert_eq!(missing.0, EXIT_USAGE);
}

#[test]
fn budget_refusals() {
    let (code, out, err) = cli(&[
        "brute-class",
        "--group",
        "GL2",
        "--ext",
        "p=2;e=1,1",
        "--field-degree",
        "2",
    ]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(out.is_empty());
    assert!(err.contains("16777216"), "{err}");
    let (code, _, _) = cli(&[
        "exponent",
        "--group",
        "GL2",
        "--ext",
        "p=2;e=3",
        "--mode",
        "exhaustive",
    ]);
    assert_eq!(code, EXIT_BUDGET);
}

#[test]
fn budget_from_environment() {
    let bin = env!("CARGO_BIN_EXE_weilrad");
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(bin);
        cmd.args(["brute-class", "--group", "GL2", "--ext", "p=2;e=2"])
            .args(extra);
        match env {
            Some(v) => cmd.env("WEILRAD_BUDGET", v),
            None => cmd.env_remove("WEILRAD_BUDGET"),
        };
        cmd.output().unwrap()
    };
    assert_eq!(run(None, &[]).status.code(), Some(EXIT_OK));
    let refused = run(Some("100"), &[]);
    assert_eq!(refused.status.code(), Some(EXIT_BUDGET));
    assert!(refused.stdout.is_empty());
    assert_eq!(
        run(Some("100"), &["--budget", "5000"]).status.code(),
        Some(EXIT_OK)
    );
    assert_eq!(run(Some("many"), &[]).status.code(), Some(EXIT_USAGE));
}

#[test]
fn usage_errors() {
    for args in [
        vec![],
        vec!["frobnicate"],
        vec!["predict"],
        vec!["predict", "--fibre", "GL2@p=4;e=1"],
        vec!["predict", "--fibre", "GL2"],
        vec!["exponent", "--group", "SL3", "--ext", "p=2;e=1"],
        vec!["report", "--format", "xml"],
        vec![
            "brute-class",
            "--group",
            "GL2",
            "--ext",
            "p=2;e=1",
            "--stabilize",
            "",
        ],
    ] {
        let (code, out, _) = cli(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(out.is_empty(), "{args:?}");
    }
}

#[test]
fn printed_specs_reparse() {
    let (_, out, _) = cli(&[
        "predict",
        "--fibre",
        "SL2^2*T3@p=2;e=2,1",
        "--phi-injective",
        "--fibre",
        "GL3@p=3;e=1",
        "--fibre",
        "PGL2@p=2;e=1,1",
    ]);
    let v = json(&out);
    for f in v["fibres"].as_array().unwrap() {
        let text = format!(
            "{}@{}",
            f["kind"].as_str().unwrap(),
            f["ext"].as_str().unwrap()
        );
        let spec: FibreSpec = text.parse().unwrap();
        assert_eq!(spec.to_string(), text);
    }
}

#[test]
fn seeded_output_is_deterministic() {
    let args = [
        "exponent",
        "--group",
        "SL2",
        "--ext",
        "p=2;e=2,2",
        "--samples",
        "300",
        "--seed",
        "11",
    ];
    let a = cli(&args);
    let b = cli(&args);
    assert_eq!(a, b);
    let c = cli(&[
        "exponent",
        "--group",
        "SL2",
        "--ext",
        "p=2;e=2,2",
        "--samples",
        "300",
        "--seed",
        "12",
    ]);
    assert_eq!(c.0, EXIT_OK);
    assert_eq!(json(&c.1)["config"]["seed"], 12);
}
