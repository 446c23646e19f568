//! Run configuration file schema.
//!
//! A run config is a JSON document naming one data source plus training and
//! evaluation settings; command-line flags override individual fields.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use seriesforge::data::SineConfig;
use seriesforge::eval::ScorerBudget;
use seriesforge::training::TrainConfig;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowSpec {
    pub t: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

fn default_stride() -> usize {
    1
}

/// Exactly one data source per run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Sines(SineConfig),
    Csv {
        path: PathBuf,
        /// Cut a single long sequence into windows after loading.
        #[serde(default)]
        window: Option<WindowSpec>,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub replications: usize,
    pub base_seed: u64,
    pub discriminative_budget: ScorerBudget,
    pub predictive_budget: ScorerBudget,
    pub tsne_perplexity: f64,
    pub tsne_iterations: usize,
    /// Per-side cap on samples used for the embedding projections.
    pub max_embedding_samples: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            replications: 8,
            base_seed: 0,
            discriminative_budget: ScorerBudget::default(),
            predictive_budget: ScorerBudget::default(),
            tsne_perplexity: 30.0,
            tsne_iterations: 300,
            max_embedding_samples: 1000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub data: DataSource,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default = "default_generate_count")]
    pub generate_count: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_generate_count() -> usize {
    100
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
