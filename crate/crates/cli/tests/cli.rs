use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use labelqm_cli::{config_hash, emit_report, parse_config, run_experiment, ConfigError, Experiment, Format};

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn shipped(name: &str) -> String {
    fs::read_to_string(configs_dir().join(format!("{name}.json"))).unwrap()
}

fn labelqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labelqm")).args(args).output().unwrap()
}

#[test]
fn shipped_configs_round_trip() {
    let mut seen = Vec::new();
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let c = parse_config(&fs::read_to_string(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let text = c.canonical_text();
        let again = parse_config(&text).unwrap();
        assert_eq!(c, again);
        assert_eq!(config_hash(&c), config_hash(&again));
        seen.push(c.experiment);
    }
    for e in Experiment::ALL {
        assert!(seen.contains(&e), "no shipped config for {}", e.name());
    }
}

#[test]
fn unknown_key_and_bad_norm_reported_together() {
    let text = r#"{
        "experiment": "order",
        "dim": 2,
        "state": [[1, 0], [1, 0]],
        "a": "computational",
        "b": "hadamard",
        "sampling": {"n_samples": 10, "seed": 1, "sed": 2}
    }"#;
    let err = parse_config(text).unwrap_err();
    let ConfigError::Validation(errs) = &err else { panic!("{err}") };
    assert!(errs.iter().any(|e| e.path == "sampling.sed"), "{err}");
    assert!(errs.iter().any(|e| e.path == "state" && e.message.contains('2')), "{err}");
}

#[test]
fn sampling_experiments_need_seeds() {
    let text = r#"{"experiment": "singlet", "singlet": {"angles_deg": [0, 90]}}"#;
    let err = parse_config(text).unwrap_err();
    assert!(err.field_errors().iter().any(|e| e.path.starts_with("sampling")), "{err}");
}

#[test]
fn pair_report_values() {
    let report = run_experiment(&parse_config(&shipped("pair")).unwrap()).unwrap();
    let tv: f64 = report.summary_value("tv_distance").unwrap().parse().unwrap();
    assert!((tv - 0.4).abs() < 1e-12);
    let table = report.table("pair").unwrap();
    assert_eq!(table.header, ["i", "j", "label_theory", "orthodox_b_first", "orthodox_a_first"]);
    let cell = |i: &str, j: &str, col: usize| -> f64 {
        table.rows.iter().find(|r| r[0] == i && r[1] == j).unwrap()[col].parse().unwrap()
    };
    assert!((cell("0", "0", 2) - 0.4).abs() < 1e-12);
    assert!((cell("1", "1", 3) - 0.05).abs() < 1e-12);
}

#[test]
fn twoslit_report_values() {
    let report = run_experiment(&parse_config(&shipped("twoslit")).unwrap()).unwrap();
    let v: f64 = report.summary_value("visibility_label").unwrap().parse().unwrap();
    let o: f64 = report.summary_value("visibility_orthodox").unwrap().parse().unwrap();
    assert!(v > 1.0 - 1e-9 && o < 1e-9);
    assert_eq!(report.table("twoslit").unwrap().rows.len(), 101);
}

#[test]
fn artifacts_carry_hash_and_seed() {
    let config = parse_config(&shipped("sequence")).unwrap();
    let report = run_experiment(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&report, dir.path(), Format::Both).unwrap();
    let hash = config_hash(&config);
    for f in &files {
        let text = fs::read_to_string(f).unwrap();
        assert!(text.contains(&hash), "{}", f.display());
        if f.extension().unwrap() == "csv" {
            assert!(text.starts_with(&format!("# config_hash={hash},seed=2\n")));
        } else {
            let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
            assert_eq!(doc["seed"], 2);
        }
    }
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs_dir().join("singlet.json");
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = labelqm(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut files: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_owned(), fs::read(&p).unwrap())
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].len(), 2);
}

#[test]
fn format_flag_selects_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs_dir().join("order.json");
    let o = labelqm(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["order.json"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"experiment": "weights", "dim": 2, "state": [[1, 0]], "a": "computational", "b": "hadamard"}"#)
        .unwrap();
    let o = labelqm(&["validate", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("state"));

    let o = labelqm(&["validate", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let good = configs_dir().join("weights.json");
    assert!(labelqm(&["validate", "--config", good.to_str().unwrap()]).status.success());

    let listed = labelqm(&["list-experiments"]);
    let text = String::from_utf8(listed.stdout).unwrap();
    for e in Experiment::ALL {
        assert!(text.contains(e.name()));
    }

    // the output path is an existing file, so writing fails at run time
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let o = labelqm(&["run", "--config", good.to_str().unwrap(), "--out", blocker.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
