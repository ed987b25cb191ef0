use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use surfcert::{parse_config, CertificateDocument, RunConfig};
use surfcert_core::geometry::MetricId;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_surfcert"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{}.schema.json", name));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

fn assert_valid(name: &str, text: &str) -> Value {
    let v: Value = serde_json::from_str(text).expect("output is json");
    let errors: Vec<String> = schema(name)
        .iter_errors(&v)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{}: {:?}", name, errors);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn empty_config_gives_defaults() {
    assert_eq!(parse_config("").unwrap(), RunConfig::default());
    let cfg = parse_config("genus = 3\ncurve = \"a1 a4\"\nlength_cutoff = 5.0\n").unwrap();
    assert_eq!(cfg.genus, 3);
    assert_eq!(cfg.metric, MetricId::RegularPolygon);
    assert_eq!(cfg.length_cutoff, Some(5.0));
}

#[test]
fn config_errors_are_located() {
    let e = parse_config("genus = 1\n").unwrap_err();
    assert_eq!(e.position, Some((1, 9)));
    assert!(e.message.contains("genus"));

    let e = parse_config("genus = 2\nbogus = 3\n").unwrap_err();
    assert_eq!(e.position.map(|p| p.0), Some(2));
    assert!(e.message.contains("bogus"), "{}", e.message);

    let e = parse_config("length_cutoff_max = \"long\"\n").unwrap_err();
    assert_eq!(e.position.map(|p| p.0), Some(1));

    let e = parse_config("\n\ncurve = \"a1 b2\"\n").unwrap_err();
    assert_eq!(e.position, Some((3, 9)));

    let e = parse_config("curve = \"a5\"\n").unwrap_err();
    assert!(e.message.contains("a5"), "{}", e.message);

    let e = parse_config("homology = [1, 0]\n").unwrap_err();
    assert_eq!(e.position, Some((1, 12)));

    let e = parse_config("length_cutoff_max = 5.0\nlength_cutoff = 6.0\n").unwrap_err();
    assert_eq!(e.position.map(|p| p.0), Some(2));

    let e = parse_config("metric = \"matrix-file\"\n").unwrap_err();
    assert!(e.message.contains("matrix_file"));
    let e = parse_config("metric = \"flat\"\n").unwrap_err();
    assert!(e.message.contains("flat"));
}

#[test]
fn config_file_errors_name_the_file() {
    let dir = scratch("config-errors");
    let path = dir.join("bad.toml");
    std::fs::write(&path, "genus = 2\ngenus_typo = 4\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "cover"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("cli-io/config"), "{}", err);
    assert!(err.contains(&format!("{}:2:", path.display())), "{}", err);

    let path = dir.join("matrices.toml");
    std::fs::write(&path, "matrix_file = \"missing.txt\"\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "cover"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("cli-io/io"), "{}", err);
    assert!(err.contains("missing.txt"), "{}", err);

    let o = run(&[
        "--config",
        dir.join("absent.toml").to_str().unwrap(),
        "cover",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("absent.toml"));
}

#[test]
fn usage_errors() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
    let o = run(&[]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // a command that needs a curve
    let o = run(&["certify"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cli-io/usage"));
    let o = run(&["lift", "--curve", "a1 x2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("surface-group/word-syntax"),
        "{}",
        stderr(&o)
    );
    let o = run(&["lengths"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lengths_lists_the_systoles() {
    let o = run(&["lengths", "--length-cutoff", "3.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.contains("length"), "{}", header);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 24);
    for g in ["a1", "A1", "a2", "A2", "a3", "A3", "a4", "A4"] {
        assert!(
            rows.iter()
                .any(|r| r.split(',').any(|f| f.trim_matches('"') == g)),
            "{} missing",
            g
        );
    }
}

#[test]
fn json_outputs_match_schemas() {
    let dir = scratch("schemas");
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "curve = \"a1\"\nperiod = 2.0\nshift = 2.0\n").unwrap();
    let c = cfg.to_str().unwrap();

    let o = run(&["--config", c, "cover"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = assert_valid("cover", &stdout(&o));
    assert_eq!(v["index"], 2);

    let o = run(&["--config", c, "lift", "--curve", "a1 a2 A1 A2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = assert_valid("lift", &stdout(&o));
    assert_eq!(v["homology_rank"], 6);

    let o = run(&["--config", c, "measure"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_valid("measure", &stdout(&o));

    let o = run(&["--config", c, "partition-min"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = assert_valid("partition", &stdout(&o));
    assert_eq!(v["partition"]["entries"][0]["form"], "a1");
}

#[test]
fn certify_round_trip_and_check() {
    let dir = scratch("certify");
    let out = dir.join("cert.json");
    let o = run(&[
        "certify",
        "--curve",
        "a1 a2 A1 A2",
        "--reproducible",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let v = assert_valid("certificate-document", &text);
    assert_eq!(v["certificate"]["verdict"], "certified");
    assert_eq!(
        v["certificate"]["tower"]["stages"][0]["spec"]["kind"],
        "lemma61"
    );
    assert_eq!(v["certificate"]["tower"]["stages"][0]["stage_index"], 2);
    assert!(v.get("timestamp").is_none());

    // same bytes on a second run
    let again = run(&["certify", "--curve", "a1 a2 A1 A2", "--reproducible"]);
    assert_eq!(stdout(&again), text);

    // bit-exact round trip through the document type
    let doc: CertificateDocument = serde_json::from_str(&text).unwrap();
    assert_eq!(surfcert::to_json(&doc).unwrap(), text);

    let o = run(&["check", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = assert_valid("check-report", &stdout(&o));
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));

    // tampering is caught
    let mut bad: Value = serde_json::from_str(&text).unwrap();
    bad["certificate"]["tower"]["total_index"] = 3.into();
    let tampered = dir.join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&bad).unwrap()).unwrap();
    let o = run(&["check", tampered.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("total-index"), "{}", stderr(&o));
}

#[test]
fn timestamps_are_recorded_by_default() {
    let o = run(&["certify", "--curve", "a1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = assert_valid("certificate-document", &stdout(&o));
    assert!(v["timestamp"].as_u64().unwrap() > 1_600_000_000);
    assert!(v["certificate"]["tower"]["stages"]
        .as_array()
        .unwrap()
        .is_empty());
}
