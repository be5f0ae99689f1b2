use std::path::{Path, PathBuf};
use std::process::Command;

use pinfloer::{model, BitMatrix, CriticalManifold, FloerData, GradedComplex, GradedMap, GradedSpace, Grading, Kind, ModelName, ModuliOperator, OpClass, Window};
use pinfloer_cli::document::{emit_document, parse_document, DocError};
use pinfloer_cli::table::Table;

const BIN: &str = env!("CARGO_BIN_EXE_pinfloer");

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn pinfloer(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(BIN).args(args).output().unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

fn write_model(name: &str, window: &str) -> PathBuf {
    let path = scratch(&format!("{name}{window}.json"));
    let (code, _, err) = pinfloer(&["model", name, "--window", window, "--emit", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    path
}

#[test]
fn round_trip_every_model() {
    let w = Window::new(-12, 12);
    for name in ModelName::data_models() {
        let data = model(name, w).unwrap();
        let text = emit_document(&data, Some(w));
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.data, data, "{name}");
        assert_eq!(doc.window, Some(w));
        assert_eq!(emit_document(&doc.data, doc.window), text, "{name}");
    }
}

const TWO_GENERATORS: &str = r#"{
  "schema_version": "1",
  "metadata": { "name": "pair", "b1": 0, "rokhlin_times8": null },
  "grading_denominator": 1,
  "window": null,
  "manifolds": [
    { "id": "a", "kind": "irreducible", "base_grading": "1", "cells": [{ "label": "p", "degree": 0 }], "tower": null },
    { "id": "b", "kind": "irreducible", "base_grading": "0/1", "cells": [{ "label": "p", "degree": 0 }], "tower": null }
  ],
  "operators": [
    { "class": "oo", "source": "a", "target": "b", "shift": "-1", "entries": [["p", "p"]] }
  ],
  "involution": null,
  "filtration": null
}"#;

fn point(id: &str, g: i64) -> CriticalManifold {
    let mut space = GradedSpace::new();
    space.push(Grading::ZERO, "p");
    CriticalManifold {
        id: id.into(),
        kind: Kind::Irreducible,
        base_grading: Grading::int(g),
        local: GradedComplex::new(space, GradedMap::zero(Grading::int(-1)), Window::new(-1, 1)).unwrap(),
        tower: None,
    }
}

#[test]
fn hand_written_document_matches_construction() {
    let doc = parse_document(TWO_GENERATORS).unwrap();
    let want = FloerData {
        manifolds: vec![point("a", 1), point("b", 0)],
        operators: vec![ModuliOperator::new(OpClass::Oo, "a", "b", -1, &[("p", "p")])],
        metadata: pinfloer::Metadata {
            name: "pair".into(),
            ..Default::default()
        },
        ..Default::default()
    };
    assert_eq!(doc.data, want);
    assert!(doc.data.validate(Window::new(-2, 3)).passed());
    let c = doc.data.assemble_complex(pinfloer::Flavor::Check, Window::new(-2, 3)).unwrap();
    assert_eq!(c.d(Grading::int(1)), BitMatrix::identity(1));
    assert_eq!(c.homology().unwrap().total_interior_dim(), 0);
}

#[test]
fn dangling_reference_names_path() {
    let text = TWO_GENERATORS.replace(r#""target": "b""#, r#""target": "zz""#);
    match parse_document(&text) {
        Err(DocError::Semantic { path, message }) => {
            assert_eq!(path, "operators[0].target");
            assert!(message.contains("zz"));
        }
        other => panic!("{other:?}"),
    }
    let text = TWO_GENERATORS.replace(r#"[["p", "p"]]"#, r#"[["p", "q"]]"#);
    assert!(matches!(parse_document(&text), Err(DocError::Semantic { path, .. }) if path == "operators[0].entries[0][1]"));
}

#[test]
fn syntax_error_has_position() {
    let text = TWO_GENERATORS.replace(r#""b1": 0,"#, r#""b1": 0,,"#);
    match parse_document(&text) {
        Err(DocError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 41)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn strict_schema() {
    let text = TWO_GENERATORS.replace(r#""name": "pair","#, r#""name": "pair", "colour": 1,"#);
    let e = parse_document(&text);
    assert!(matches!(&e, Err(DocError::Schema { path, .. }) if path == "metadata.colour"), "{e:?}");
    let text = TWO_GENERATORS.replace(r#""schema_version": "1""#, r#""schema_version": "2""#);
    assert_eq!(parse_document(&text), Err(DocError::Version("2".into())));
    let text = TWO_GENERATORS.replace(r#""base_grading": "1""#, r#""base_grading": "1/0""#);
    assert!(matches!(parse_document(&text), Err(DocError::Semantic { path, .. }) if path == "manifolds[0].base_grading"));
}

#[test]
fn empty_document_gives_empty_table() {
    let path = scratch("empty.json");
    std::fs::write(
        &path,
        r#"{"schema_version":"1","metadata":{"name":"empty","b1":0,"rokhlin_times8":null},"grading_denominator":1,"window":null,"manifolds":[],"involution":null,"filtration":null}"#,
    )
    .unwrap();
    let (code, out, _) = pinfloer(&["homology", path.to_str().unwrap(), "--flavor", "bar"]);
    assert_eq!((code, out.as_str()), (0, "degree  dimension  edge\n"));
}

#[test]
fn s3_check_table_from_cli() {
    let path = write_model("s3", "-20..20");
    let (code, out, _) = pinfloer(&["homology", path.to_str().unwrap(), "--flavor", "check", "--invariant", "--format", "csv"]);
    assert_eq!(code, 0);
    let table = Table::parse_csv(&out).unwrap();
    assert_eq!(table.header, ["degree", "dimension", "edge"]);
    for row in &table.rows {
        let d: i64 = row[0].parse().unwrap();
        let n: usize = row[1].parse().unwrap();
        if row[2] == "no" {
            assert_eq!(n, usize::from(d >= 0 && d.rem_euclid(4) != 3), "degree {d}");
        }
    }
    assert!(table.rows.iter().any(|r| r[0] == "0" && r[1] == "1"));
}

#[test]
fn csv_matches_text() {
    let path = write_model("s1xs2", "-8..8");
    let p = path.to_str().unwrap();
    let (_, csv, _) = pinfloer(&["homology", p, "--flavor", "hat", "--format", "csv"]);
    let (_, text, _) = pinfloer(&["homology", p, "--flavor", "hat"]);
    let from_text: Vec<Vec<String>> =
        text.lines().map(|l| l.split_whitespace().map(str::to_string).collect()).collect();
    let t = Table::parse_csv(&csv).unwrap();
    assert_eq!(from_text[0], t.header);
    assert_eq!(from_text[1..], t.rows[..]);
}

#[test]
fn exit_codes() {
    let s3 = write_model("s3", "-12..12");
    let s3 = s3.to_str().unwrap();
    assert_eq!(pinfloer(&["validate", s3]).0, 0);
    assert_eq!(pinfloer(&["les", s3, "--invariant"]).0, 0);
    assert_eq!(pinfloer(&["gysin", s3]).0, 0);
    let (code, out, _) = pinfloer(&["invariants", s3]);
    assert_eq!((code, out.as_str()), (0, "alpha=0 beta=0 gamma=0\n"));
    assert_eq!(pinfloer(&["invariants", s3, "--window", "-3..3"]).0, 3);
    assert_eq!(pinfloer(&["validate", "/nonexistent.json"]).0, 2);
    assert_eq!(pinfloer(&["model", "k3", "--window", "-8..8"]).0, 2);
    assert_eq!(pinfloer(&["model", "s3", "--window", "8..-8"]).0, 2);
    assert_eq!(pinfloer(&["homology", s3, "--flavor", "sideways"]).0, 2);
    assert_eq!(pinfloer(&["homology", s3, "--flavor", "bar", "--window", "-1/2..4"]).0, 2);
    assert_eq!(pinfloer(&["frobnicate"]).0, 2);
    let t3 = write_model("t3", "-8..8");
    assert_eq!(pinfloer(&["invariants", t3.to_str().unwrap()]).0, 2);

    // A corrupted operator entry fails validation.
    let text = std::fs::read_to_string(write_model("s1xs2", "-8..8")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entries = doc["operators"][0]["entries"].as_array_mut().unwrap();
    entries.pop();
    let bad = scratch("bad.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let (code, out, _) = pinfloer(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("fail"));
}

#[test]
fn cobmap_on_e8() {
    let s3 = write_model("s3", "-12..12");
    let p = write_model("poincare", "-12..12");
    let e8 = write_model("minus_e8_cobordism", "-12..12");
    let (code, out, err) = pinfloer(&[
        "cobmap", "--src", s3.to_str().unwrap(), "--tgt", p.to_str().unwrap(), "--ops", e8.to_str().unwrap(),
        "--flavor", "bar", "--invariant", "--format", "csv",
    ]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("chain map: pass"));
    let t = Table::parse_csv(&lines.collect::<Vec<_>>().join("\n")).unwrap();
    for r in t.rows.iter().filter(|r| r[5] == "no" && r[2] != "0") {
        let d: i64 = r[0].parse().unwrap();
        let e: i64 = r[1].parse().unwrap();
        assert_eq!(e, d + 2);
        assert_eq!((&r[2], &r[4]), (&r[3], &r[2]), "degree {d}");
    }
}

#[test]
fn deterministic_output_and_thread_override() {
    let t3 = write_model("t3", "-8..8");
    let p = t3.to_str().unwrap();
    let args = ["specseq", p, "--flavor", "bar", "--invariant", "--pages", "5"];
    let first = pinfloer(&args);
    assert_eq!(first.0, 0);
    assert_eq!(pinfloer(&args), first);
    let single = Command::new(BIN).args(args).env("PINFLOER_THREADS", "1").output().unwrap();
    assert_eq!(String::from_utf8(single.stdout).unwrap(), first.1);
    let bad = Command::new(BIN).args(args).env("PINFLOER_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
