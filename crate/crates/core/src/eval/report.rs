//! Replicated scoring and the evaluation report.

use serde::{Deserialize, Serialize};

use crate::data::SeriesBatch;
use crate::error::{Error, Result};
use crate::eval::scorers::{discriminative_score, predictive_score, ScorerBudget};
use crate::numkit::Rng;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single replication.
    pub std: f64,
    pub raw: Vec<f64>,
}

impl MetricSummary {
    fn from_raw(raw: Vec<f64>) -> Self {
        let n = raw.len();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, raw }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EvalSettings {
    pub replications: usize,
    pub base_seed: u64,
    pub discriminative_budget: ScorerBudget,
    pub predictive_budget: ScorerBudget,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            replications: 8,
            base_seed: 0,
            discriminative_budget: ScorerBudget::default(),
            predictive_budget: ScorerBudget::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub discriminative: MetricSummary,
    pub predictive: MetricSummary,
    pub settings: EvalSettings,
}

/// Number of worker threads for replications: `SERIESFORGE_THREADS` when set,
/// otherwise 1.
fn thread_cap() -> usize {
    std::env::var("SERIESFORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(1)
}

/// Runs `replications` independent scorings with seeds
/// `base_seed .. base_seed + R - 1` and summarizes them. Replications are
/// independent, so they may run on multiple threads; results are collected
/// in seed order either way.
pub fn run_replications(
    real: &SeriesBatch,
    synthetic: &SeriesBatch,
    settings: &EvalSettings,
) -> Result<EvalReport> {
    if settings.replications == 0 {
        return Err(Error::contract("replications must be >= 1"));
    }
    let r = settings.replications;
    let mut scores: Vec<Result<(f64, f64)>> = Vec::with_capacity(r);

    let one = |rep: usize| -> Result<(f64, f64)> {
        let seed = settings.base_seed.wrapping_add(rep as u64);
        let mut rng = Rng::derive(seed, 0xD15C);
        let dis = discriminative_score(real, synthetic, &settings.discriminative_budget, &mut rng)?;
        let mut rng = Rng::derive(seed, 0x9BED);
        let pred = predictive_score(real, synthetic, &settings.predictive_budget, &mut rng)?;
        Ok((dis, pred))
    };

    let workers = thread_cap().min(r);
    if workers <= 1 {
        for rep in 0..r {
            scores.push(one(rep));
        }
    } else {
        let mut slots: Vec<Option<Result<(f64, f64)>>> = (0..r).map(|_| None).collect();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for chunk_start in (0..r).step_by(workers) {
                for rep in chunk_start..(chunk_start + workers).min(r) {
                    handles.push((rep, scope.spawn(move || one(rep))));
                }
                for (rep, handle) in handles.drain(..) {
                    slots[rep] = Some(handle.join().expect("replication thread panicked"));
                }
            }
        });
        scores.extend(slots.into_iter().map(|s| s.expect("slot filled")));
    }

    let mut dis_raw = Vec::with_capacity(r);
    let mut pred_raw = Vec::with_capacity(r);
    for s in scores {
        let (d, p) = s?;
        dis_raw.push(d);
        pred_raw.push(p);
    }

    Ok(EvalReport {
        discriminative: MetricSummary::from_raw(dis_raw),
        predictive: MetricSummary::from_raw(pred_raw),
        settings: *settings,
    })
}
