use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use drsub_core::oracles::OloKind;
use drsub_core::ConvexBody;

use crate::error::{BenchError, BenchResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    DownClosed,
    General,
    Hypercube,
    DoublingDownClosed,
    DoublingGeneral,
}

impl Algorithm {
    pub fn needs_down_closed(self) -> bool {
        matches!(self, Algorithm::DownClosed | Algorithm::DoublingDownClosed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OracleChoice {
    Ascent,
    Leader,
}

impl From<OracleChoice> for OloKind {
    fn from(c: OracleChoice) -> Self {
        match c {
            OracleChoice::Ascent => OloKind::GradientAscent,
            OracleChoice::Leader => OloKind::PerturbedLeader,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "kebab-case", deny_unknown_fields)]
pub enum BodySpec {
    Hypercube,
    /// `Σ x_i ≤ budget`.
    Budget { budget: f64 },
    /// `min_total ≤ Σ x_i ≤ max_total`.
    Band { min_total: f64, max_total: f64 },
    /// `A x ≤ b` inside the cube.
    Polytope { rows: Vec<Vec<f64>>, rhs: Vec<f64> },
}

impl BodySpec {
    pub fn build(&self, n: usize) -> BenchResult<ConvexBody> {
        Ok(match self {
            BodySpec::Hypercube => ConvexBody::hypercube(n)?,
            BodySpec::Budget { budget } => ConvexBody::uniform_budget(n, *budget)?,
            BodySpec::Band {
                min_total,
                max_total,
            } => ConvexBody::total_band(n, *min_total, *max_total)?,
            BodySpec::Polytope { rows, rhs } => ConvexBody::polytope(rows.clone(), rhs.clone())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct GraphSpec {
    /// Edge-list file; when absent a random graph is generated.
    pub path: Option<PathBuf>,
    pub vertices: usize,
    pub edge_prob: f64,
    pub weight_min: f64,
    pub weight_max: f64,
    pub seed: u64,
}

impl Default for GraphSpec {
    fn default() -> Self {
        Self {
            path: None,
            vertices: 20,
            edge_prob: 0.3,
            weight_min: 0.5,
            weight_max: 1.5,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    Revenue {
        #[serde(default)]
        graph: GraphSpec,
        /// Activation probability used at desk scale.
        #[serde(default = "default_p")]
        p: f64,
        /// Probability of the original large-graph setting, kept for the record.
        #[serde(default = "reference_p_default")]
        reference_p: f64,
        #[serde(default = "default_batch")]
        batch: usize,
    },
    Quadratic {
        n: usize,
        /// Relative per-round perturbation of the base instance.
        #[serde(default = "default_jitter")]
        jitter: f64,
        #[serde(default)]
        instance_seed: u64,
    },
    Linear {
        weights: Vec<f64>,
    },
    Zero {
        n: usize,
    },
}

fn reference_p_default() -> f64 {
    1e-4
}

fn default_p() -> f64 {
    0.01
}

fn default_batch() -> usize {
    8
}

fn default_jitter() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HindsightMethod {
    Lattice,
    FrankWolfe,
    Ascent,
    Played,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct HindsightConfig {
    pub methods: Vec<HindsightMethod>,
    /// Brute-force grid `{0, 1/M, …, 1}`; default is the largest `M ≤ 100`
    /// with `(M+1)^n ≤ 10⁶`.
    pub grid: Option<usize>,
    pub fw_levels: usize,
    pub ascent_starts: usize,
    pub ascent_iterations: usize,
}

impl Default for HindsightConfig {
    fn default() -> Self {
        Self {
            methods: vec![
                HindsightMethod::Lattice,
                HindsightMethod::FrankWolfe,
                HindsightMethod::Ascent,
                HindsightMethod::Played,
            ],
            grid: None,
            fw_levels: 256,
            ascent_starts: 32,
            ascent_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub body: BodySpec,
    pub instance: InstanceSpec,
    pub horizon: usize,
    /// Meta-FW levels; default depends on the algorithm.
    pub levels: Option<usize>,
    /// Lattice granularity (vee oracles) or depth (hypercube).
    pub granularity: Option<usize>,
    pub sigma: f64,
    pub oracle: OracleChoice,
    pub seed: u64,
    pub replicas: usize,
    pub output: Option<PathBuf>,
    /// Write wall-clock times; off gives byte-identical reruns.
    pub timing: bool,
    pub hindsight: HindsightConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::DownClosed,
            body: BodySpec::Budget { budget: 1.0 },
            instance: InstanceSpec::Revenue {
                graph: GraphSpec::default(),
                p: default_p(),
                reference_p: reference_p_default(),
                batch: default_batch(),
            },
            horizon: 500,
            levels: None,
            granularity: None,
            sigma: 0.0,
            oracle: OracleChoice::Leader,
            seed: 42,
            replicas: 5,
            output: None,
            timing: true,
            hindsight: HindsightConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> BenchResult<Self> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> BenchResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> BenchResult<String> {
        toml::to_string_pretty(self).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn validate(&self) -> BenchResult<()> {
        if self.horizon == 0 {
            return Err(BenchError::Config("horizon must be positive".into()));
        }
        if self.replicas == 0 {
            return Err(BenchError::Config("replicas must be positive".into()));
        }
        if !(self.sigma >= 0.0) {
            return Err(BenchError::Config("sigma must be >= 0".into()));
        }
        if self.levels == Some(0) || self.granularity == Some(0) {
            return Err(BenchError::Config("levels and granularity must be positive".into()));
        }
        match (&self.algorithm, &self.body) {
            (Algorithm::Hypercube, BodySpec::Hypercube) => {}
            (Algorithm::Hypercube, _) => {
                return Err(BenchError::Config("the hypercube algorithm needs the hypercube body".into()))
            }
            (a, b) if a.needs_down_closed() => {
                if matches!(b, BodySpec::Band { min_total, .. } if *min_total > 0.0) {
                    return Err(BenchError::Config(
                        "the down-closed algorithm needs a down-closed body".into(),
                    ));
                }
            }
            _ => {}
        }
        if let InstanceSpec::Revenue { p, batch, graph, .. } = &self.instance {
            if !(*p > 0.0 && *p <= 0.5) {
                return Err(BenchError::Config(format!(
                    "p = {p} outside (0, 0.5]; larger p is not DR-submodular"
                )));
            }
            if graph.path.is_none() && *batch > graph.vertices {
                return Err(BenchError::Config("batch larger than the graph".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg = ExperimentConfig::from_toml_str(
            "algorithm = \"general\"\nhorizon = 50\n[body]\nkind = \"band\"\nmin-total = 0.1\nmax-total = 1.0\n",
        )
        .unwrap();
        assert_eq!(cfg.algorithm, Algorithm::General);
        assert_eq!(cfg.horizon, 50);
        assert_eq!(cfg.replicas, 5);
        cfg.validate().unwrap();
    }

    #[test]
    fn incompatible_pairs() {
        let mut cfg = ExperimentConfig {
            algorithm: Algorithm::Hypercube,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.algorithm = Algorithm::DownClosed;
        cfg.body = BodySpec::Band {
            min_total: 0.1,
            max_total: 1.0,
        };
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
    }
}
