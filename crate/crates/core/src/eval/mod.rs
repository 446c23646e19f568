//! Post-hoc quality metrics: discriminative and predictive scores, 2-D
//! embedding projections, and replicated reporting.

mod pca;
mod report;
mod scorers;
mod tsne;

pub use pca::pca_project;
pub use report::{run_replications, EvalReport, EvalSettings, MetricSummary};
pub use scorers::{discriminative_score, predictive_score, ScorerBudget};
pub use tsne::{tsne_project, TsneOptions, TsneResult};

use serde::{Deserialize, Serialize};

/// Origin tag for embedding rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceLabel {
    Real,
    Synthetic,
}

impl SourceLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceLabel::Real => "real",
            SourceLabel::Synthetic => "synthetic",
        }
    }
}

/// 2-D projection of pooled real and synthetic samples.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Embedding {
    pub coords: Vec<[f64; 2]>,
    pub labels: Vec<SourceLabel>,
}
