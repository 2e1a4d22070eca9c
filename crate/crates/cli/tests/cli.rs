use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chunkwm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chunkwm")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("exp.toml");
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

const REPLAY: &str = r#"schema_version = 1
tasks = ["tyreworld", "gripper"]
variants = ["STD", "OURS"]
max_steps = 20
parallelism = 2
out_dir = "out"

[instances]
tyreworld = ["t1"]
gripper = ["g1", "g2"]

[backend]
kind = "replay"
script_dir = "scripts"
synthesize = true
"#;

#[test]
fn run_report_stats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), REPLAY);
    // one explicit script that wanders before giving up: fails the trial, not the run
    fs::create_dir(dir.path().join("scripts")).unwrap();
    fs::write(dir.path().join("scripts/gripper-g2-STD.txt"), "Action: look around\n").unwrap();

    let o = chunkwm(&["--json", "run", &cfg]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let out: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(out["trials"], 5);
    assert_eq!(out["failures"].as_array().unwrap().len(), 1);

    let out_dir = dir.path().join("out");
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["trials_planned"], 6);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert!(out_dir.join("logs/tyreworld-t1-OURS-s0.jsonl").is_file());

    let records = out_dir.join("records.jsonl").display().to_string();
    let o = chunkwm(&["report", &records]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("Tyreworld") && table.contains("OURS"));
    for f in ["report.txt", "progress_by_step.csv", "executability_by_step.csv", "report.json"] {
        assert!(out_dir.join("report").join(f).is_file(), "{f}");
    }

    // g2/STD has no record, so the pairing is incomplete
    let o = chunkwm(&["stats", &records, "--a", "STD", "--b", "OURS"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unpaired records: gripper/g2/seed 0"));
}

#[test]
fn same_config_same_records() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), REPLAY);
        assert_eq!(code(&chunkwm(&["run", &cfg])), 0);
        let text = fs::read_to_string(dir.path().join("out/records.jsonl")).unwrap();
        let mut records: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        for r in &mut records {
            let r = r.as_object_mut().unwrap();
            r.remove("total_wall_ms");
            r.remove("events");
            for s in r["per_step"].as_array_mut().unwrap() {
                s.as_object_mut().unwrap().remove("wall_ms");
            }
        }
        records
    };
    assert_eq!(run(), run());
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &REPLAY.replace("\"tyreworld\", \"gripper\"", "\"tyreworld\", \"jericho\""));
    let o = chunkwm(&["run", &cfg]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("exp.toml:2:"), "{err}");

    let cfg = write_config(dir.path(), &REPLAY.replace("[\"STD\", \"OURS\"]", "[]"));
    let o = chunkwm(&["--json", "run", &cfg]);
    assert_eq!(code(&o), 1);
    let out: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(out["ok"], false);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn http_backend_needs_live() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "schema_version = 1\ntasks = [\"tyreworld\"]\nvariants = [\"STD\"]\nout_dir = \"out\"\n\n[backend]\nkind = \"http\"\n",
    );
    let o = chunkwm(&["run", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--live"));
    // even with --live, a ceiling on requests is mandatory
    let o = chunkwm(&["--live", "run", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("request ceiling"));
}

#[test]
fn envcheck_commands() {
    let o = chunkwm(&["--json", "envcheck", "tyreworld"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let out: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(out["ok"], true);

    let o = chunkwm(&["envcheck", "gripper"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("all checks passed"));

    let o = chunkwm(&["envcheck", "jericho"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn report_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("records.jsonl");
    fs::write(&p, "{not json}\n").unwrap();
    let o = chunkwm(&["report", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let o = chunkwm(&["report", dir.path().join("missing.jsonl").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}
