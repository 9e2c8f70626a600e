use std::path::Path;
use std::process::Command;

fn drsub() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_drsub"));
    cmd.env_remove("DRSUB_OUTPUT_DIR");
    cmd
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

const SMALL: &str = r#"
horizon = 3
levels = 2
replicas = 2
timing = false

[instance]
kind = "revenue"
batch = 4

[instance.graph]
vertices = 6
"#;

#[test]
fn run_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    write(&cfg, SMALL);
    let out = dir.path().join("out");
    let status = drsub()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("replica_0.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "t,reward,cum_reward,comparator_cum,ratio,elapsed_ms");
    for line in &lines[1..] {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v[4], v[2] / v[3]);
        assert_eq!(v[5], 0.0);
    }
    assert!(out.join("aggregate.csv").exists());
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap();
    let resolved = &meta["replicas"][0]["resolved"];
    assert_eq!(resolved["levels"], 2);
    assert!(resolved["granularity"].as_u64().unwrap() >= 1);
    assert!(resolved["rounding_epsilon"].as_f64().is_some());
    assert_eq!(meta["config"]["instance"]["reference-p"], 1e-4);
}

#[test]
fn flags_override_config_and_env_sets_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    write(&cfg, SMALL);
    let env_dir = dir.path().join("from-env");
    let status = drsub()
        .env("DRSUB_OUTPUT_DIR", &env_dir)
        .args(["run", "--horizon", "5", "--replicas", "1", "--format", "json", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(env_dir.join("replica_0.json")).unwrap()).unwrap();
    assert_eq!(doc["records"].as_array().unwrap().len(), 5);
    assert_eq!(doc["metadata"]["replica"], 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    write(&bad, "algorithm = \"hypercube\"\n");
    let code = |args: &[&str], cfg: &Path| {
        drsub().args(args).arg(cfg).arg("--output").arg(dir.path()).status().unwrap().code()
    };
    assert_eq!(code(&["run", "--config"], &bad), Some(2));
    write(&bad, "horizon = 3\nunknown-key = 1\n");
    assert_eq!(code(&["run", "--config"], &bad), Some(2));
    assert_eq!(code(&["run", "--config"], &dir.path().join("missing.toml")), Some(3));
}

#[test]
fn verify_instances_passes() {
    let out = drsub().args(["verify", "instances"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("instances: pass"));
}

#[test]
fn gen_graph_and_hindsight() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let status = drsub()
        .args(["gen-graph", "--vertices", "5", "--edge-prob", "1.0", "--output"])
        .arg(&graph)
        .status()
        .unwrap();
    assert!(status.success());
    let cfg = dir.path().join("h.toml");
    write(
        &cfg,
        &format!(
            "horizon = 4\n[instance]\nkind = \"revenue\"\nbatch = 3\n[instance.graph]\npath = {:?}\n",
            graph
        ),
    );
    let out = drsub().args(["hindsight", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
    assert_eq!(v["point"].as_array().unwrap().len(), 5);
}
