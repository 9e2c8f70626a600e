use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::BenchResult;
use crate::runner::{mean_std, ExperimentOutcome, ReplicaOutcome, RoundRecord};

pub const OUTPUT_DIR_ENV: &str = "DRSUB_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

/// Flag beats the environment, which beats the config file.
pub fn resolve_output_dir(flag: Option<&Path>, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUTPUT_DIR_ENV).filter(|s| !s.is_empty()) {
        return PathBuf::from(p);
    }
    cfg.output.clone().unwrap_or_else(|| PathBuf::from("results"))
}

pub fn write_csv<W: Write>(out: W, records: &[RoundRecord]) -> BenchResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(["t", "reward", "cum_reward", "comparator_cum", "ratio", "elapsed_ms"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(out: W, metadata: &serde_json::Value, records: &[RoundRecord]) -> BenchResult<()> {
    let doc = json!({ "metadata": metadata, "records": records });
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn replica_metadata(cfg: &ExperimentConfig, rep: &ReplicaOutcome) -> serde_json::Value {
    json!({
        "replica": rep.replica,
        "master_seed": cfg.seed,
        "stream_seed": rep.stream_seed,
        "algorithm_seed": rep.algorithm_seed,
        "resolved": rep.params,
        "comparator": rep.comparator,
        "final_ratio": rep.final_ratio,
        "degenerate_ratio_rows": rep.degenerate_rows,
    })
}

pub fn experiment_metadata(cfg: &ExperimentConfig, outcome: &ExperimentOutcome) -> serde_json::Value {
    let replicas: Vec<_> = outcome.replicas.iter().map(|r| replica_metadata(cfg, r)).collect();
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "columns": ["t", "reward", "cum_reward", "comparator_cum", "ratio", "elapsed_ms"],
        "ratio_rule": "cum_reward / comparator_cum; 1 when comparator_cum <= 0 (counted in degenerate_ratio_rows)",
        "mean_final_ratio": outcome.mean_final_ratio,
        "std_final_ratio": outcome.std_final_ratio,
        "replicas": replicas,
    })
}

#[derive(Debug, Serialize)]
struct AggregateRow {
    t: usize,
    mean_ratio: f64,
    std_ratio: f64,
    mean_cum_reward: f64,
    mean_comparator_cum: f64,
}

/// Per-round mean and standard deviation across replicas.
pub fn write_aggregate<W: Write>(out: W, outcome: &ExperimentOutcome) -> BenchResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let rounds = outcome.replicas.iter().map(|r| r.records.len()).min().unwrap_or(0);
    for i in 0..rounds {
        let col = |f: fn(&RoundRecord) -> f64| -> Vec<f64> {
            outcome.replicas.iter().map(|r| f(&r.records[i])).collect()
        };
        let (mean_ratio, std_ratio) = mean_std(&col(|r| r.ratio));
        w.serialize(AggregateRow {
            t: i + 1,
            mean_ratio,
            std_ratio,
            mean_cum_reward: mean_std(&col(|r| r.cum_reward)).0,
            mean_comparator_cum: mean_std(&col(|r| r.comparator_cum)).0,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one file per replica, `aggregate.csv` and `metadata.json`.
/// Returns the replica file paths.
pub fn emit(
    dir: &Path,
    cfg: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    format: Format,
) -> BenchResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for rep in &outcome.replicas {
        let path = match format {
            Format::Csv => dir.join(format!("replica_{}.csv", rep.replica)),
            Format::Json => dir.join(format!("replica_{}.json", rep.replica)),
        };
        let file = BufWriter::new(File::create(&path)?);
        match format {
            Format::Csv => write_csv(file, &rep.records)?,
            Format::Json => write_json(file, &replica_metadata(cfg, rep), &rep.records)?,
        }
        paths.push(path);
    }
    write_aggregate(BufWriter::new(File::create(dir.join("aggregate.csv"))?), outcome)?;
    let mut meta = BufWriter::new(File::create(dir.join("metadata.json"))?);
    serde_json::to_writer_pretty(&mut meta, &experiment_metadata(cfg, outcome))?;
    meta.write_all(b"\n")?;
    meta.flush()?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(n: usize) -> Vec<RoundRecord> {
        (1..=n)
            .map(|t| RoundRecord {
                t,
                reward: 0.5,
                cum_reward: 0.5 * t as f64,
                comparator_cum: t as f64,
                ratio: 0.5,
                elapsed_ms: 0.0,
            })
            .collect()
    }

    #[test]
    fn csv_header_and_rows() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows(3)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,reward,cum_reward,comparator_cum,ratio,elapsed_ms");
        assert_eq!(lines[1], "1,0.5,0.5,1.0,0.5,0.0");
    }

    #[test]
    fn empty_csv_keeps_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,reward,cum_reward,comparator_cum,ratio,elapsed_ms\n"
        );
    }

    #[test]
    fn json_has_metadata_header() {
        let mut buf = Vec::new();
        write_json(&mut buf, &json!({"seed": 1}), &rows(2)).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["metadata"]["seed"], 1);
        assert_eq!(v["records"].as_array().unwrap().len(), 2);
    }
}
