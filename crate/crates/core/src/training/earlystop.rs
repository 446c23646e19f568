//! Score-based early stopping.
//!
//! During the joint phase the model is evaluated periodically: a quick
//! classifier provides a discriminative score, and the code-space encoder
//! provides mean/std gaps between real and synthetic code batches. The two
//! are combined as `score = disScore + p1 * (mseMean + mseSTD)` where `p1`
//! balances the scales; it is computed once, at the first evaluation, and
//! never changes afterwards. The model and its synthetic batch are saved
//! whenever the combined score reaches a new minimum (ties save).

use serde::{Deserialize, Serialize};

use crate::data::SeriesBatch;
use crate::nets::NetworkBundle;

/// One evaluation record of the metrics log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EsRecord {
    pub epoch: usize,
    pub dis_score: f64,
    pub mse_mean: f64,
    pub mse_std: f64,
    pub p1: f64,
    pub score: f64,
    pub saved: bool,
}

#[derive(Default)]
pub struct EarlyStopState {
    pub p1: Option<f64>,
    pub total_error: Option<f64>,
    pub best_synthetic: Option<SeriesBatch>,
    pub best_params: Option<NetworkBundle>,
    pub log: Vec<EsRecord>,
    /// Set when the first evaluation found a zero moment gap, which would
    /// make `p1` a division by zero; `p1` is forced to 0 instead.
    pub degenerate_warning: bool,
}

impl EarlyStopState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies the scoring rule to one evaluation's metrics and records it.
    /// Returns whether this evaluation's model should be saved.
    pub fn update(&mut self, epoch: usize, dis_score: f64, mse_mean: f64, mse_std: f64) -> bool {
        if self.p1.is_none() {
            let denom = mse_mean + mse_std;
            if denom == 0.0 {
                self.p1 = Some(0.0);
                self.degenerate_warning = true;
            } else {
                self.p1 = Some(dis_score / denom);
            }
        }
        let p1 = self.p1.expect("set above");
        let score = dis_score + p1 * (mse_mean + mse_std);
        let save = match self.total_error {
            None => true,
            Some(total) => score <= total,
        };
        if save {
            self.total_error = Some(score);
        }
        self.log.push(EsRecord {
            epoch,
            dis_score,
            mse_mean,
            mse_std,
            p1,
            score,
            saved: save,
        });
        save
    }
}

/// Mean/std gaps between two code batches, the in-training counterparts of
/// the code-moment loss: `mse_mean` is the mean squared gap of per-position
/// batch means, `mse_std` the square root of the mean squared gap of
/// per-position population variances.
pub fn code_moment_gaps(real_codes: &SeriesBatch, syn_codes: &SeriesBatch) -> (f64, f64) {
    debug_assert_eq!(real_codes.timestamps(), syn_codes.timestamps());
    debug_assert_eq!(real_codes.features(), syn_codes.features());
    let (t, c) = (real_codes.timestamps(), real_codes.features());
    let positions = (t * c) as f64;

    let stats = |b: &SeriesBatch, t_i: usize, c_i: usize| -> (f64, f64) {
        let n = b.samples() as f64;
        let mut mean = 0.0;
        for s in 0..b.samples() {
            mean += b.get(s, t_i, c_i);
        }
        mean /= n;
        let mut var = 0.0;
        for s in 0..b.samples() {
            var += (b.get(s, t_i, c_i) - mean).powi(2);
        }
        (mean, var / n)
    };

    let mut mse_mean = 0.0;
    let mut mse_var = 0.0;
    for t_i in 0..t {
        for c_i in 0..c {
            let (mr, vr) = stats(real_codes, t_i, c_i);
            let (ms, vs) = stats(syn_codes, t_i, c_i);
            mse_mean += (mr - ms).powi(2);
            mse_var += (vr - vs).powi(2);
        }
    }
    mse_mean /= positions;
    mse_var /= positions;
    (mse_mean, mse_var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_call_sets_p1_and_saves() {
        let mut es = EarlyStopState::new();
        let saved = es.update(500, 0.2, 0.06, 0.04);
        assert!(saved);
        assert_eq!(es.p1, Some(2.0));
        assert_eq!(es.total_error, Some(0.4));
        assert_eq!(es.log.len(), 1);
        assert!((es.log[0].score - 0.4).abs() < 1e-15);
    }

    #[test]
    fn worse_score_does_not_save() {
        let mut es = EarlyStopState::new();
        es.update(500, 0.2, 0.06, 0.04);
        let saved = es.update(1000, 0.3, 0.05, 0.05);
        assert!(!saved);
        assert_eq!(es.total_error, Some(0.4));
        assert!(!es.log[1].saved);
        assert!((es.log[1].score - 0.5).abs() < 1e-15);
    }

    #[test]
    fn equal_score_saves_again() {
        let mut es = EarlyStopState::new();
        es.update(500, 0.2, 0.06, 0.04);
        let saved = es.update(1000, 0.2, 0.06, 0.04);
        assert!(saved, "ties must save");
    }

    #[test]
    fn p1_is_set_exactly_once() {
        let mut es = EarlyStopState::new();
        es.update(500, 0.2, 0.06, 0.04);
        es.update(1000, 0.9, 0.5, 0.5);
        es.update(1500, 0.1, 0.05, 0.05);
        assert!(es.log.iter().all(|r| r.p1 == 2.0));
    }

    #[test]
    fn total_error_is_non_increasing_over_saves() {
        let mut es = EarlyStopState::new();
        let metrics = [
            (0.2, 0.06, 0.04),
            (0.3, 0.05, 0.05),
            (0.1, 0.05, 0.05),
            (0.15, 0.02, 0.02),
        ];
        let mut last_total = f64::INFINITY;
        for (i, (d, m, s)) in metrics.iter().enumerate() {
            es.update((i + 1) * 500, *d, *m, *s);
            let total = es.total_error.unwrap();
            assert!(total <= last_total);
            last_total = total;
        }
    }

    #[test]
    fn zero_denominator_forces_p1_to_zero_with_warning() {
        let mut es = EarlyStopState::new();
        let saved = es.update(500, 0.2, 0.0, 0.0);
        assert!(saved);
        assert_eq!(es.p1, Some(0.0));
        assert!(es.degenerate_warning);
        assert_eq!(es.total_error, Some(0.2));
    }

    #[test]
    fn code_moment_gaps_hand_values() {
        // single position: real {1,3} (mean 2, var 1), synthetic {2,2}
        // (mean 2, var 0) -> mse_mean 0, mse_std sqrt(1) = 1
        let real = SeriesBatch::new(2, 1, 1, vec![1.0, 3.0], true).unwrap();
        let syn = SeriesBatch::new(2, 1, 1, vec![2.0, 2.0], true).unwrap();
        let (mm, ms) = code_moment_gaps(&real, &syn);
        assert!(mm.abs() < 1e-15);
        assert!((ms - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identical_codes_have_zero_gaps() {
        let mut b = SeriesBatch::zeros(4, 2, 3, true);
        for (i, v) in b.values_mut().iter_mut().enumerate() {
            *v = (i as f64 * 0.37).sin();
        }
        let (mm, ms) = code_moment_gaps(&b, &b);
        assert_eq!(mm, 0.0);
        assert_eq!(ms, 0.0);
    }
}
