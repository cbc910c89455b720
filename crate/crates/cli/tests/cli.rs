use std::path::{Path, PathBuf};
use std::process::Command;

use homotopy_cli::*;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn bundled() -> Vec<PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(scenarios()).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "json")).collect();
    v.sort();
    v
}

fn machine() -> Options {
    Options { format: Format::Machine, ..Options::default() }
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homotopy-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const MINIMAL: &str = r#"{
  "spaces": {
    "A": [["x", 0], ["y", 1]]
  },
  "structures": {
    "d": {"kind": "a_infinity", "space": "A", "maps": [{"inputs": ["x"], "output": {"y": "1"}}]}
  },
  "scenarios": {
    "d_check": {"command": "check", "structure": "d"}
  }
}"#;

#[test]
fn bundled_files_round_trip_byte_for_byte() {
    let files = bundled();
    assert!(files.len() >= 4);
    for p in files {
        let text = std::fs::read_to_string(&p).unwrap();
        let parsed = WorkspaceFile::parse(&text).unwrap();
        assert_eq!(parsed.to_canonical_string(), text, "{}", p.display());
        Model::load(&parsed, LoadOptions::default()).unwrap();
    }
}

#[test]
fn minimal_file_loads_and_checks() {
    let p = temp_file("minimal.json", MINIMAL);
    let (out, code) = execute("check", &p, &machine());
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().last().unwrap().contains("\"status\":\"ok\""));
}

#[test]
fn parse_errors_carry_positions() {
    let err = WorkspaceFile::parse("{\n  \"spaces\": {\n    \"A\": [[\"x\", 0],]\n  }\n}").unwrap_err();
    match err {
        CliError::Parse { line, column, .. } => assert_eq!((line, column > 0), (3, true)),
        other => panic!("{other:?}"),
    }
    assert_eq!(WorkspaceFile::parse(r#"{"spaces": {}, "extra": 1}"#).unwrap_err().code(), "PARSE_ERROR");
}

#[test]
fn form_parity_violation_names_the_entry() {
    let text = r#"{
  "spaces": {"A": [["x", 0], ["y", 0]]},
  "forms": {"w": {"space": "A", "entries": [["x", "y", "1"]]}}
}"#;
    let err = Model::load(&WorkspaceFile::parse(text).unwrap(), LoadOptions::default()).unwrap_err();
    match err {
        CliError::Validation { object, .. } => assert_eq!(object, "forms.w"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn validation_rejects_bad_references_and_scalars() {
    let mut f = WorkspaceFile::parse(MINIMAL).unwrap();
    f.structures["d"].maps[0].output.insert("y".into(), "1/0".into());
    let err = Model::load(&f, LoadOptions::default()).unwrap_err();
    assert!(matches!(&err, CliError::Validation { object, .. } if object == "structures.d.maps[0]"), "{err:?}");

    let mut f = WorkspaceFile::parse(MINIMAL).unwrap();
    f.scenarios["d_check"].structure = Some("nope".into());
    assert!(matches!(Model::load(&f, LoadOptions::default()), Err(CliError::Validation { .. })));

    let mut f = WorkspaceFile::parse(MINIMAL).unwrap();
    f.field = Some("mod 9".into());
    assert!(matches!(Model::load(&f, LoadOptions::default()), Err(CliError::Validation { .. })));
    f.field = Some("mod 7".into());
    assert!(Model::load(&f, LoadOptions::default()).is_ok());
}

#[test]
fn degenerate_forms_need_the_topological_switch() {
    let text = r#"{
  "spaces": {"A": [["x", 0], ["y", 1]]},
  "forms": {"w": {"space": "A", "entries": []}}
}"#;
    let f = WorkspaceFile::parse(text).unwrap();
    assert!(Model::load(&f, LoadOptions::default()).is_err());
    assert!(Model::load(&f, LoadOptions { topological: true }).is_ok());
}

#[test]
fn corrupted_dga_fails_check() {
    let path = scenarios().join("algebras.json");
    let mut f = WorkspaceFile::read(&path).unwrap();
    f.structures["dga"].maps.push(serde_json::from_str(r#"{"inputs": ["x", "x"], "output": {"1": "1"}}"#).unwrap());
    let p = temp_file("corrupt.json", &f.to_canonical_string());
    let opts = Options { scenarios: vec!["dga_check".into()], ..machine() };
    let (out, code) = execute("check", &p, &opts);
    assert_eq!(code, 2);
    assert!(out.contains("\"record\":\"residual\""));
}

#[test]
fn obstruction_certificate_is_independently_valid() {
    let path = scenarios().join("loop.json");
    let model = Model::load(&WorkspaceFile::read(&path).unwrap(), LoadOptions::default()).unwrap();
    let r = run_scenario(&model, "cubic_mc", None, &Flags::default(), &Bounds::default());
    assert_eq!(r.exit_code(), 2);
    let (order, hbar) = r
        .records
        .iter()
        .find_map(|x| match x {
            Record::Obstruction { order, hbar, rank_d, rank_augmented } => {
                assert!(rank_augmented > rank_d);
                Some((*order, *hbar))
            }
            _ => None,
        })
        .unwrap();
    assert_eq!((order, hbar), (0, 1));
    // K has a (u, v) coefficient, but no classical structure map ever outputs v, so
    // nothing in the image of D(l⁰) can cancel it.
    let k: Vec<_> = r.records.iter().filter_map(|x| match x {
        Record::Term { object, word, .. } if object == "obstruction" => Some(word.clone()),
        _ => None,
    }).collect();
    assert!(k.contains(&vec!["u".to_string(), "v".to_string()]));
    let model::Built::Loop(alg) = &model.structures["cubic"] else { panic!() };
    let v = alg.space.index_of("v").unwrap();
    assert!(alg.maps.components().all(|(_, t)| t.iter().all(|(_, out)| out.coeff(v).is_zero())));
}

#[test]
fn topological_switch_solves() {
    let opts = Options { flags: Flags { topological: true, ..Flags::default() }, ..machine() };
    let (out, code) = execute("mc", &scenarios().join("loop.json"), &opts);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("\"object\":\"phi\",\"order\":1"));
}

#[test]
fn transfer_matches_golden_file() {
    let (out, code) = execute("transfer", &scenarios().join("loop.json"), &machine());
    assert_eq!(code, 0);
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/mixed_transfer.jsonl")).unwrap();
    assert_eq!(out, golden);
}

#[test]
fn reports_are_identical_across_runs_and_parallelism() {
    for p in bundled() {
        let serial = execute("suite", &p, &machine());
        let again = execute("suite", &p, &machine());
        let parallel = execute("suite", &p, &Options { parallel: true, ..machine() });
        assert_eq!(serial, again);
        assert_eq!(serial, parallel);
    }
}

#[test]
fn bounds_precedence() {
    let env = parse_env_bounds("max_arity=2, max_order=5").unwrap();
    assert_eq!(run::resolve(&Bounds::default(), None, &env), (2, 2, 5));
    let scenario = Bounds { max_arity: Some(3), ..Bounds::default() };
    assert_eq!(run::resolve(&Bounds::default(), Some(&scenario), &env), (3, 2, 5));
    let flags = Bounds { max_arity: Some(1), max_hbar: Some(0), ..Bounds::default() };
    assert_eq!(run::resolve(&flags, Some(&scenario), &env), (1, 0, 5));
    assert!(parse_env_bounds("max_arity").is_err());
    assert!(parse_env_bounds("depth=3").is_err());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_homotopy");
    let status = |args: &[&str]| Command::new(bin).args(args).env_remove("HOMOTOPY_TRUNCATION").output().unwrap().status.code().unwrap();
    let algebras = scenarios().join("algebras.json");
    let lp = scenarios().join("loop.json");
    assert_eq!(status(&["check", algebras.to_str().unwrap(), "--max-arity", "4"]), 0);
    assert_eq!(status(&["mc", lp.to_str().unwrap()]), 2);
    assert_eq!(status(&["mc", lp.to_str().unwrap(), "--topological"]), 0);
    assert_eq!(status(&["frobnicate", lp.to_str().unwrap()]), 1);
    assert_eq!(status(&["check", "/nonexistent.json"]), 1);
    assert_eq!(status(&["check"]), 1);
    let out = Command::new(bin).args(["check", algebras.to_str().unwrap(), "--format", "machine"]).env("HOMOTOPY_TRUNCATION", "max_arity=3").output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("{\"record\":\"run\",\"scenario\":\"dga_check\",\"command\":\"check\",\"max_arity\":3"));
}
