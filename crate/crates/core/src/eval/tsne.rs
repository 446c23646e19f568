//! Exact t-SNE on flattened sequences.
//!
//! Dense O(n^2) affinities: Gaussian input kernels with per-point bandwidths
//! found by binary search on the perplexity target, symmetrized; Student-t
//! output kernel; KL objective minimized by gradient descent with momentum
//! and a short early-exaggeration phase.

use crate::data::SeriesBatch;
use crate::error::{Error, Result};
use crate::eval::{Embedding, SourceLabel};
use crate::numkit::Rng;

#[derive(Clone, Copy, Debug)]
pub struct TsneOptions {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
}

impl Default for TsneOptions {
    fn default() -> Self {
        Self {
            perplexity: 30.0,
            iterations: 300,
            learning_rate: 200.0,
            early_exaggeration: 4.0,
            exaggeration_iters: 50,
        }
    }
}

pub struct TsneResult {
    pub embedding: Embedding,
    /// KL(P || Q) against the un-exaggerated affinities, one value per
    /// iteration.
    pub kl_trace: Vec<f64>,
}

fn pairwise_sq_dists(rows: &[&[f64]]) -> Vec<f64> {
    let n = rows.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s: f64 = rows[i]
                .iter()
                .zip(rows[j])
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            d[i * n + j] = s;
            d[j * n + i] = s;
        }
    }
    d
}

/// Conditional affinities for one point at precision `beta`, returning the
/// Shannon entropy (nats) of the distribution.
fn row_affinities(dists: &[f64], i: usize, n: usize, beta: f64, out: &mut [f64]) -> f64 {
    let mut sum = 0.0;
    for j in 0..n {
        let p = if j == i {
            0.0
        } else {
            (-beta * dists[i * n + j]).exp()
        };
        out[j] = p;
        sum += p;
    }
    if sum <= 0.0 {
        return 0.0;
    }
    let mut entropy = 0.0;
    for p in out.iter_mut() {
        *p /= sum;
        if *p > 1e-12 {
            entropy -= *p * p.ln();
        }
    }
    entropy
}

/// Symmetrized joint affinities matching the perplexity target per point.
fn joint_affinities(dists: &[f64], n: usize, perplexity: f64) -> Vec<f64> {
    let target = perplexity.ln();
    let mut cond = vec![0.0; n * n];
    let mut row = vec![0.0; n];
    for i in 0..n {
        let mut beta = 1.0;
        let mut beta_min = f64::NEG_INFINITY;
        let mut beta_max = f64::INFINITY;
        for _ in 0..64 {
            let entropy = row_affinities(dists, i, n, beta, &mut row);
            let diff = entropy - target;
            if diff.abs() < 1e-7 {
                break;
            }
            if diff > 0.0 {
                beta_min = beta;
                beta = if beta_max.is_infinite() {
                    beta * 2.0
                } else {
                    0.5 * (beta + beta_max)
                };
            } else {
                beta_max = beta;
                beta = if beta_min.is_infinite() {
                    beta * 0.5
                } else {
                    0.5 * (beta + beta_min)
                };
            }
        }
        row_affinities(dists, i, n, beta, &mut row);
        cond[i * n..(i + 1) * n].copy_from_slice(&row);
    }

    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = ((cond[i * n + j] + cond[j * n + i]) / (2.0 * n as f64)).max(1e-12);
        }
    }
    for i in 0..n {
        p[i * n + i] = 1e-12;
    }
    p
}

/// Projects pooled real and synthetic samples to 2-D.
pub fn tsne_project(
    real: &SeriesBatch,
    synthetic: &SeriesBatch,
    opts: &TsneOptions,
    rng: &mut Rng,
) -> Result<TsneResult> {
    if real.timestamps() != synthetic.timestamps() || real.features() != synthetic.features() {
        return Err(Error::shape(
            "tsne_project",
            &[real.timestamps(), real.features()],
            &[synthetic.timestamps(), synthetic.features()],
        ));
    }
    let n = real.samples() + synthetic.samples();
    if (n as f64) < 3.0 * opts.perplexity {
        return Err(Error::contract(format!(
            "tsne_project needs pooled N >= 3 * perplexity ({}), got {n}",
            3.0 * opts.perplexity
        )));
    }

    let mut rows: Vec<&[f64]> = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..real.samples() {
        rows.push(real.sample(i));
        labels.push(SourceLabel::Real);
    }
    for i in 0..synthetic.samples() {
        rows.push(synthetic.sample(i));
        labels.push(SourceLabel::Synthetic);
    }

    let dists = pairwise_sq_dists(&rows);
    let p = joint_affinities(&dists, n, opts.perplexity);

    let mut y: Vec<f64> = (0..2 * n).map(|_| 1e-4 * rng.normal()).collect();
    let mut velocity = vec![0.0; 2 * n];
    let mut grad = vec![0.0; 2 * n];
    let mut q_unnorm = vec![0.0; n * n];
    let mut kl_trace = Vec::with_capacity(opts.iterations);

    for iter in 0..opts.iterations {
        // Student-t output affinities
        let mut q_sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let dy0 = y[2 * i] - y[2 * j];
                let dy1 = y[2 * i + 1] - y[2 * j + 1];
                let q = 1.0 / (1.0 + dy0 * dy0 + dy1 * dy1);
                q_unnorm[i * n + j] = q;
                q_unnorm[j * n + i] = q;
                q_sum += 2.0 * q;
            }
        }

        // KL against the true affinities
        let mut kl = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pij = p[i * n + j];
                let qij = (q_unnorm[i * n + j] / q_sum).max(1e-12);
                kl += pij * (pij / qij).ln();
            }
        }
        kl_trace.push(kl);

        let exaggeration = if iter < opts.exaggeration_iters {
            opts.early_exaggeration
        } else {
            1.0
        };
        grad.fill(0.0);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = q_unnorm[i * n + j];
                let coeff = 4.0 * (exaggeration * p[i * n + j] - q / q_sum) * q;
                grad[2 * i] += coeff * (y[2 * i] - y[2 * j]);
                grad[2 * i + 1] += coeff * (y[2 * i + 1] - y[2 * j + 1]);
            }
        }

        let momentum = if iter < 250 { 0.5 } else { 0.8 };
        for k in 0..2 * n {
            velocity[k] = momentum * velocity[k] - opts.learning_rate * grad[k];
            y[k] += velocity[k];
        }
    }

    let coords = (0..n).map(|i| [y[2 * i], y[2 * i + 1]]).collect();
    Ok(TsneResult {
        embedding: Embedding { coords, labels },
        kl_trace,
    })
}
