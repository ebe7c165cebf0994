//! End-to-end checks of the command-line interface: exit codes, JSON
//! stability, certificate round-trips, and the shipped instance files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_advnet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn instances_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn write_instance(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("advnet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.json"));
    let out = run(&["instances", "emit", name, "--alphabet", "3", "--t", "1"]);
    assert!(out.status.success());
    std::fs::write(&path, stdout(&out)).unwrap();
    path
}

#[test]
fn validate_reports_a_summary() {
    let path = write_instance("diamond");
    let out = run(&["validate", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("4 vertices"));
    assert!(text.contains("min-cut to T: 2"));
}

#[test]
fn validate_rejects_malformed_input_with_exit_2() {
    let dir = std::env::temp_dir().join(format!("advnet-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"alphabet\": 3}").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_table_on_bypass() {
    let path = write_instance("bypass");
    let out = run(&["bound", path.to_str().unwrap(), "--which", "singleton"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("<= 1.000000"));
}

#[test]
fn scheme_verify_passes_and_certificate_roundtrips() {
    let dir = std::env::temp_dir().join(format!("advnet-cli-cert-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("diamond-cert.json");
    let out = run(&[
        "scheme",
        "diamond",
        "--q",
        "3",
        "--verify",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));
    assert!(stdout(&out).contains("0.630930"));

    // the emitted certificate re-verifies
    let out = run(&["scheme", "--verify-file", cert.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn scheme_failure_exits_with_1() {
    let out = run(&["scheme", "mirrored-diamond", "--q", "2", "--t", "2", "--verify"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn capacity_exact_on_diamond_q2() {
    let dir = std::env::temp_dir().join(format!("advnet-cli-cap-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("diamond2.json");
    let out = run(&["instances", "emit", "diamond", "--alphabet", "2", "--t", "1"]);
    std::fs::write(&path, stdout(&out)).unwrap();
    let out = run(&["capacity", path.to_str().unwrap(), "--exact", "--no-cache"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("max code size 1"));
    assert!(stdout(&out).contains("proved optimal"));
}

#[test]
fn capacity_budget_exhaustion_exits_with_3() {
    let path = write_instance("diamond");
    let out = run(&[
        "capacity",
        path.to_str().unwrap(),
        "--exact",
        "--no-cache",
        "--budget",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("lower bound only"));
}

#[test]
fn reduce_with_explicit_cuts() {
    let path = write_instance("crossover-restricted");
    let dir = std::env::temp_dir().join(format!("advnet-cli-chain-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let chain = dir.join("chain.json");
    let out = run(&[
        "reduce",
        path.to_str().unwrap(),
        "--cut1",
        "0,1,8",
        "--cut2",
        "4,9",
        "--terminal",
        "T1",
        "--emit-chain",
        chain.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("family-a-1"));
    let chain_text = std::fs::read_to_string(&chain).unwrap();
    let value: serde_json::Value = serde_json::from_str(&chain_text).unwrap();
    assert_eq!(value["stages"].as_array().unwrap().len(), 2);
}

#[test]
fn json_outputs_are_stable_across_runs() {
    let path = write_instance("crossover-restricted");
    let args = ["--json", "reduce", path.to_str().unwrap(), "--auto"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));

    let args = ["--json", "bound", path.to_str().unwrap()];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn curves_csv_output() {
    let out = run(&["curves", "--generalization", "2", "--n", "3", "--pstep", "0.05"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,scenario1,scenario2,gap");
    assert_eq!(lines.len(), 12);
    let row: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(row[0], "0.050000000");
    assert!((row[2].parse::<f64>().unwrap() - 5.140809129).abs() < 1e-6);
}

#[test]
fn cache_dir_is_honored() {
    let dir = std::env::temp_dir().join(format!("advnet-cli-cachedir-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let path = write_instance("diamond");
    let out = bin()
        .args(["capacity", path.to_str().unwrap(), "--exact"])
        .env("ADVNET_CACHE_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    // a second run hits the cache and prints the identical result
    let again = bin()
        .args(["capacity", path.to_str().unwrap(), "--exact"])
        .env("ADVNET_CACHE_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(stdout(&out), stdout(&again));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn shipped_instances_parse_and_match_builders() {
    let mapping: &[(&str, &str)] = &[
        ("diamond.json", "diamond"),
        ("mirrored-diamond.json", "mirrored-diamond"),
        ("bypass.json", "bypass"),
        ("crossover.json", "crossover"),
        ("crossover-full.json", "crossover-full"),
        ("crossover-restricted.json", "crossover-restricted"),
        ("hexagon.json", "hexagon"),
        ("interchange.json", "interchange"),
        ("family-a2.json", "a2"),
        ("family-b2.json", "b2"),
        ("family-b3.json", "b3"),
        ("family-c2.json", "c2"),
        ("family-d2.json", "d2"),
        ("family-e2.json", "e2"),
    ];
    for (file, name) in mapping {
        let path = instances_dir().join(file);
        let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {file}"));
        let inst = advnet::instance::parse_instance(&text).unwrap();
        let expected = advnet::builtin::by_name(name).unwrap();
        assert!(
            inst.network.same_shape(&expected),
            "{file} does not match the {name} builder"
        );
    }
}

/// A file whose edge list is not in precedence order: the validator
/// reorders it and file-relative cut ids must still resolve correctly.
#[test]
fn scrambled_edge_ids_are_remapped() {
    let dir = std::env::temp_dir().join(format!("advnet-cli-scram-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scrambled.json");
    // diamond with the terminal edges listed first
    std::fs::write(
        &path,
        serde_json::json!({
            "alphabet": 3,
            "t": 1,
            "vertices": ["S", "V1", "V2", "T"],
            "source": "S",
            "terminals": ["T"],
            "edges": [["V1", "T"], ["V2", "T"], ["S", "V1"], ["S", "V2"], ["S", "V2"]],
            "vulnerable": [2, 3, 4],
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("edge reorder map"));
    // cuts in file ids: sources {2,3,4} precede terminal edges {0,1}
    let out = run(&[
        "reduce",
        path.to_str().unwrap(),
        "--cut1",
        "2,3,4",
        "--cut2",
        "0,1",
        "--terminal",
        "T",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("family-a-1"));
}

#[test]
fn instances_list_names_everything() {
    let out = run(&["instances", "list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in ["diamond", "mirrored-diamond", "crossover", "hexagon", "interchange"] {
        assert!(text.contains(name));
    }
}
