//! Training configuration.
//!
//! An "epoch" throughout this module is one optimizer update on one random
//! minibatch; phase budgets and the early-stop schedule count these updates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::ScorerBudget;
use crate::losses::{AutoencoderLossWeights, GeneratorLossWeights};
use crate::nets::BundleDims;

/// Toggles that remove one component each, for ablation runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationFlags {
    pub use_supervised_loss: bool,
    pub use_feature_discriminator: bool,
    pub use_ts_loss: bool,
    pub use_early_stopping: bool,
}

impl Default for AblationFlags {
    fn default() -> Self {
        Self {
            use_supervised_loss: true,
            use_feature_discriminator: true,
            use_ts_loss: true,
            use_early_stopping: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopConfig {
    /// Evaluate every this many joint-phase epochs.
    pub check_interval: usize,
    /// Fraction of the joint phase after which evaluations begin.
    pub start_fraction: f64,
    /// Budget of the quick in-training classifier.
    pub budget: ScorerBudget,
    /// Samples per side used for in-training evaluations.
    pub eval_samples: usize,
}

impl Default for EarlyStopConfig {
    fn default() -> Self {
        Self {
            check_interval: 500,
            start_fraction: 0.5,
            budget: ScorerBudget::quick(),
            eval_samples: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseEpochs {
    pub lossfn_autoencoder: usize,
    pub latent_autoencoder: usize,
    pub supervisor: usize,
    pub joint: usize,
}

impl Default for PhaseEpochs {
    fn default() -> Self {
        Self {
            lossfn_autoencoder: 1000,
            latent_autoencoder: 1000,
            supervisor: 600,
            joint: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupLearningRates {
    /// Both autoencoders.
    pub autoencoder: f64,
    /// Generator and supervisor.
    pub generator: f64,
    /// Both discriminators.
    pub discriminator: f64,
}

impl Default for GroupLearningRates {
    fn default() -> Self {
        Self {
            autoencoder: 1e-3,
            generator: 1e-3,
            discriminator: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub seed: u64,
    /// Window length T of the training sequences.
    pub window: usize,
    pub batch_size: usize,
    pub hidden_dim: usize,
    pub num_layers: usize,
    /// Latent width; defaults to `max(1, F/2)`.
    pub latent_dim: Option<usize>,
    /// Noise width; defaults to the latent width.
    pub noise_dim: Option<usize>,
    /// Code width of the loss autoencoder; defaults to `F`.
    pub code_dim: Option<usize>,
    pub time_stride: usize,
    pub epochs: PhaseEpochs,
    pub lr: GroupLearningRates,
    pub generator_weights: GeneratorLossWeights,
    pub autoencoder_weights: AutoencoderLossWeights,
    pub ablation: AblationFlags,
    pub early_stop: EarlyStopConfig,
    /// Discriminator rounds per generator update.
    pub disc_steps_per_gen: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            window: 24,
            batch_size: 32,
            hidden_dim: 24,
            num_layers: 3,
            latent_dim: None,
            noise_dim: None,
            code_dim: None,
            time_stride: 2,
            epochs: PhaseEpochs::default(),
            lr: GroupLearningRates::default(),
            generator_weights: GeneratorLossWeights::default(),
            autoencoder_weights: AutoencoderLossWeights::default(),
            ablation: AblationFlags::default(),
            early_stop: EarlyStopConfig::default(),
            disc_steps_per_gen: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0
            || self.batch_size == 0
            || self.hidden_dim == 0
            || self.num_layers == 0
            || self.time_stride == 0
            || self.disc_steps_per_gen == 0
        {
            return Err(Error::contract("train config counts must be positive"));
        }
        if self.epochs.lossfn_autoencoder == 0
            || self.epochs.latent_autoencoder == 0
            || self.epochs.supervisor == 0
            || self.epochs.joint == 0
        {
            return Err(Error::contract("phase epoch counts must be positive"));
        }
        if !(self.early_stop.start_fraction > 0.0 && self.early_stop.start_fraction <= 1.0) {
            return Err(Error::contract(format!(
                "early-stop start fraction must lie in (0, 1], got {}",
                self.early_stop.start_fraction
            )));
        }
        if self.early_stop.check_interval == 0 || self.early_stop.eval_samples == 0 {
            return Err(Error::contract("early-stop counts must be positive"));
        }
        if self.window % self.time_stride != 0 {
            return Err(Error::contract(format!(
                "time stride {} must divide window length {}",
                self.time_stride, self.window
            )));
        }
        for (lr, name) in [
            (self.lr.autoencoder, "autoencoder"),
            (self.lr.generator, "generator"),
            (self.lr.discriminator, "discriminator"),
        ] {
            if lr < 0.0 || !lr.is_finite() {
                return Err(Error::contract(format!(
                    "{name} learning rate must be finite and non-negative"
                )));
            }
        }
        Ok(())
    }

    /// Resolves network dimensions for the given feature count.
    pub fn dims_for(&self, feature_dim: usize) -> BundleDims {
        let latent = self.latent_dim.unwrap_or((feature_dim / 2).max(1));
        BundleDims {
            feature_dim,
            latent_dim: latent,
            hidden_dim: self.hidden_dim,
            num_layers: self.num_layers,
            code_dim: self.code_dim.unwrap_or(feature_dim),
            time_stride: self.time_stride,
            noise_dim: self.noise_dim.unwrap_or(latent),
        }
    }
}
