//! Multivariate sinusoid benchmark data.

use serde::{Deserialize, Serialize};

use crate::data::batch::SeriesBatch;
use crate::error::{Error, Result};
use crate::numkit::Rng;

/// Configuration for the sine benchmark: per sample and per dimension an
/// independent frequency and phase are drawn and the trace
/// `sin(2*pi*eta*t + theta)` is evaluated at `t = 0..T-1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SineConfig {
    #[serde(default = "default_dims")]
    pub dims: usize,
    pub t: usize,
    pub n: usize,
    #[serde(default = "default_freq_range")]
    pub freq_range: (f64, f64),
    #[serde(default = "default_phase_range")]
    pub phase_range: (f64, f64),
    pub seed: u64,
}

fn default_dims() -> usize {
    5
}

fn default_freq_range() -> (f64, f64) {
    (0.0, 1.0)
}

fn default_phase_range() -> (f64, f64) {
    (-std::f64::consts::PI, std::f64::consts::PI)
}

impl SineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 || self.t == 0 || self.n == 0 {
            return Err(Error::contract(
                "sine config dims, t and n must be positive",
            ));
        }
        if self.freq_range.0 > self.freq_range.1 {
            return Err(Error::contract(format!(
                "frequency range ({}, {}) has min > max",
                self.freq_range.0, self.freq_range.1
            )));
        }
        if self.phase_range.0 > self.phase_range.1 {
            return Err(Error::contract(format!(
                "phase range ({}, {}) has min > max",
                self.phase_range.0, self.phase_range.1
            )));
        }
        Ok(())
    }
}

/// Generates the sine batch (unscaled, values in `[-1, 1]`).
///
/// Draw order is fixed: for each sample, for each dimension, frequency then
/// phase, so a given seed always yields the same dataset.
pub fn generate_sines(cfg: &SineConfig) -> Result<SeriesBatch> {
    cfg.validate()?;
    let mut rng = Rng::from_seed(cfg.seed);
    let mut out = SeriesBatch::zeros(cfg.n, cfg.t, cfg.dims, false);
    for sample in 0..cfg.n {
        for dim in 0..cfg.dims {
            let eta = rng.uniform_range(cfg.freq_range.0, cfg.freq_range.1);
            let theta = rng.uniform_range(cfg.phase_range.0, cfg.phase_range.1);
            for t in 0..cfg.t {
                let v = (2.0 * std::f64::consts::PI * eta * t as f64 + theta).sin();
                out.set(sample, t, dim, v);
            }
        }
    }
    Ok(out)
}
