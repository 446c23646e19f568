//! The four-phase training schedule, score-based early stopping, and
//! checkpointing.

mod checkpoint;
mod config;
mod earlystop;
mod trainer;

pub use checkpoint::Checkpoint;
pub use config::{AblationFlags, EarlyStopConfig, GroupLearningRates, PhaseEpochs, TrainConfig};
pub use earlystop::{code_moment_gaps, EarlyStopState, EsRecord};
pub use trainer::{generate_synthetic, Phase4Record, TrainOutcome, Trainer};
