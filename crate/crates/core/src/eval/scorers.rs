//! Post-hoc discriminative and predictive scorers.
//!
//! Both scorers are single-layer GRU models trained under a fixed step
//! budget. Their dense output layers start at zero, so a zero-step budget
//! yields a constant 0.5 output: chance accuracy for the classifier and an
//! exact match for 0.5-valued data in the predictor.

use serde::{Deserialize, Serialize};

use crate::data::SeriesBatch;
use crate::error::{Error, Result};

use crate::nets::{Activation, NetworkSpec, Role, SeqNetwork};
use crate::numkit::{AdamParams, AdamState, Graph, Rng, Tensor, Var};

/// Training budget for a scorer network.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScorerBudget {
    pub steps: usize,
    pub batch_size: usize,
    /// GRU width; `None` resolves to `floor(T*F/4)` clamped to `[8, 64]`.
    pub hidden: Option<usize>,
    pub lr: f64,
}

impl Default for ScorerBudget {
    fn default() -> Self {
        Self {
            steps: 500,
            batch_size: 64,
            hidden: None,
            lr: 5e-3,
        }
    }
}

impl ScorerBudget {
    /// Reduced budget for in-training evaluations.
    pub fn quick() -> Self {
        Self {
            steps: 150,
            batch_size: 32,
            hidden: Some(8),
            lr: 5e-3,
        }
    }

    fn resolve_hidden(&self, t: usize, f: usize) -> usize {
        self.hidden.unwrap_or_else(|| (t * f / 4).clamp(8, 64))
    }
}

/// Label 1 for real rows, 0 for synthetic rows.
struct Pool<'a> {
    real: &'a SeriesBatch,
    synthetic: &'a SeriesBatch,
}

impl Pool<'_> {
    fn sample_step(&self, entry: (u8, usize), t: usize, k: usize) -> f64 {
        match entry.0 {
            1 => self.real.get(entry.1, t, k),
            _ => self.synthetic.get(entry.1, t, k),
        }
    }

    /// Per-timestep `(B, F)` tensors for the selected entries.
    fn step_tensors(&self, entries: &[(u8, usize)], t_len: usize, f: usize) -> Vec<Tensor> {
        (0..t_len)
            .map(|t| {
                Tensor::from_fn(&[entries.len(), f], |i| {
                    self.sample_step(entries[i / f], t, i % f)
                })
            })
            .collect()
    }
}

fn check_pair(real: &SeriesBatch, synthetic: &SeriesBatch) -> Result<()> {
    if real.timestamps() != synthetic.timestamps() || real.features() != synthetic.features() {
        return Err(Error::shape(
            "score",
            &[real.timestamps(), real.features()],
            &[synthetic.timestamps(), synthetic.features()],
        ));
    }
    Ok(())
}

/// Smoothing applied to classifier targets. Hard 0/1 targets have no
/// interior optimum: once the classes separate, the loss plateaus at zero
/// and Adam's scale-free updates walk the converged GRU into degeneracy.
/// Smoothed targets anchor the optimum at bounded logits.
const LABEL_SMOOTHING: f64 = 0.1;

/// Binary cross-entropy of sigmoid outputs against (smoothed) labels, with
/// the probabilities pulled a hair inside (0, 1) so the logs stay finite.
fn bce_loss(g: &mut Graph, p: Var, labels: Var) -> Result<Var> {
    let eps = 1e-7;
    let squashed = g.scale(p, 1.0 - 2.0 * eps)?;
    let p = g.add_scalar(squashed, eps)?;
    let rows = g.value(p).shape()[0];
    let ones = g.constant(Tensor::ones(&[rows, 1]));
    let ln_p = g.ln(p)?;
    let pos = g.mul(labels, ln_p)?;
    let inv_p = g.sub(ones, p)?;
    let ln_inv = g.ln(inv_p)?;
    let inv_labels = g.sub(ones, labels)?;
    let neg = g.mul(inv_labels, ln_inv)?;
    let s = g.add(pos, neg)?;
    let m = g.mean_all(s)?;
    g.scale(m, -1.0)
}

/// Scales all gradients by a common factor when their global L2 norm
/// exceeds `max_norm`.
fn clip_gradients(grads: &mut [Tensor], max_norm: f64) {
    let norm: f64 = grads
        .iter()
        .flat_map(|t| t.data())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let scale = max_norm / norm;
        for t in grads.iter_mut() {
            for v in t.data_mut() {
                *v *= scale;
            }
        }
    }
}

/// Per-sequence logit: mean over time of the per-step linear scores, which
/// is a dense readout of the time-averaged GRU state.
fn sequence_logits(g: &mut Graph, scores: &[Var]) -> Result<Var> {
    let mut acc = scores[0];
    for &s in &scores[1..] {
        acc = g.add(acc, s)?;
    }
    g.scale(acc, 1.0 / scores.len() as f64)
}

/// Classifier probability that each pooled entry is real.
fn classify(net: &SeqNetwork, pool: &Pool, entries: &[(u8, usize)], t: usize, f: usize) -> Vec<f64> {
    let steps = pool.step_tensors(entries, t, f);
    let mut g = Graph::new();
    let bound = net.bind(&mut g, false);
    let inputs: Vec<Var> = steps.into_iter().map(|s| g.constant(s)).collect();
    let scores = net
        .forward_bound(&mut g, &bound, &inputs)
        .expect("shapes fixed by scorer");
    let logits = sequence_logits(&mut g, &scores).expect("t >= 1");
    let p = g.sigmoid(logits).expect("elementwise");
    g.value(p).data().to_vec()
}

/// Trains a real-vs-synthetic classifier and returns `|accuracy - 0.5|` on a
/// held-out stratified split. 0 means indistinguishable, 0.5 perfectly
/// separable. A zero-step budget forces a constant 0.5 output, which is
/// chance accuracy on a balanced split. Deterministic given the RNG.
pub fn discriminative_score(
    real: &SeriesBatch,
    synthetic: &SeriesBatch,
    budget: &ScorerBudget,
    rng: &mut Rng,
) -> Result<f64> {
    check_pair(real, synthetic)?;
    if real.samples() < 10 || synthetic.samples() < 10 {
        return Err(Error::contract(format!(
            "discriminative_score needs at least 10 samples per side, got {} real / {} synthetic",
            real.samples(),
            synthetic.samples()
        )));
    }
    let (t, f) = (real.timestamps(), real.features());
    let pool = Pool { real, synthetic };

    // stratified 80/20 split
    let mut train: Vec<(u8, usize)> = Vec::new();
    let mut test: Vec<(u8, usize)> = Vec::new();
    for (label, count) in [(1u8, real.samples()), (0u8, synthetic.samples())] {
        let mut idx: Vec<usize> = (0..count).collect();
        rng.shuffle(&mut idx);
        let cut = (count * 4) / 5;
        train.extend(idx[..cut].iter().map(|&i| (label, i)));
        test.extend(idx[cut..].iter().map(|&i| (label, i)));
    }
    rng.shuffle(&mut train);

    let spec = NetworkSpec::plain(
        Role::Scorer,
        f,
        budget.resolve_hidden(t, f),
        1,
        1,
        Activation::Linear,
    );
    let mut net = SeqNetwork::init(spec, rng)?;
    if budget.steps == 0 {
        net.zero_output_layer();
    }
    let mut opt = AdamState::new(&net.params(), AdamParams::with_lr(budget.lr));

    let batch = budget.batch_size.min(train.len()).max(1);
    for _ in 0..budget.steps {
        let chosen: Vec<(u8, usize)> = (0..batch)
            .map(|_| train[rng.below(train.len())])
            .collect();
        let steps = pool.step_tensors(&chosen, t, f);
        let labels = Tensor::from_fn(&[batch, 1], |i| {
            LABEL_SMOOTHING + (1.0 - 2.0 * LABEL_SMOOTHING) * chosen[i].0 as f64
        });

        let mut g = Graph::new();
        let bound = net.bind(&mut g, true);
        let inputs: Vec<Var> = steps.into_iter().map(|s| g.constant(s)).collect();
        let scores = net.forward_bound(&mut g, &bound, &inputs)?;
        let logits = sequence_logits(&mut g, &scores)?;
        let p = g.sigmoid(logits)?;
        let label_var = g.constant(labels);
        let loss = bce_loss(&mut g, p, label_var)?;
        let grads = g.backward(loss)?;

        let vars = bound.vars();
        let mut grad_list: Vec<Tensor> = vars
            .iter()
            .zip(net.params())
            .map(|(&v, p)| grads.get_or_zero(v, p.shape()))
            .collect();
        clip_gradients(&mut grad_list, 1.0);
        opt.step(&mut net.params_mut(), &grad_list)?;
    }

    let probs = classify(&net, &pool, &test, t, f);
    let correct = probs
        .iter()
        .zip(&test)
        .filter(|(&p, &(label, _))| (p >= 0.5) == (label == 1))
        .count();
    let accuracy = correct as f64 / test.len() as f64;
    Ok((accuracy - 0.5).abs())
}

/// Trains a next-step forecaster on synthetic data and reports its mean
/// absolute error over every (sample, step, feature) prediction on real
/// data. Deterministic given the RNG.
pub fn predictive_score(
    real: &SeriesBatch,
    synthetic: &SeriesBatch,
    budget: &ScorerBudget,
    rng: &mut Rng,
) -> Result<f64> {
    check_pair(real, synthetic)?;
    let (t, f) = (real.timestamps(), real.features());
    if t < 2 {
        return Err(Error::contract(format!(
            "predictive_score needs at least 2 timestamps, got {t}"
        )));
    }

    let spec = NetworkSpec::plain(
        Role::Scorer,
        f,
        budget.resolve_hidden(t, f),
        1,
        f,
        Activation::Sigmoid,
    );
    let mut net = SeqNetwork::init(spec, rng)?;
    net.zero_output_layer();
    let mut opt = AdamState::new(&net.params(), AdamParams::with_lr(budget.lr));

    let batch = budget.batch_size.min(synthetic.samples()).max(1);
    for _ in 0..budget.steps {
        let chosen: Vec<usize> = (0..batch)
            .map(|_| rng.below(synthetic.samples()))
            .collect();
        let sel = synthetic.select(&chosen)?;
        let steps = sel.to_step_tensors();

        let mut g = Graph::new();
        let bound = net.bind(&mut g, true);
        let inputs: Vec<Var> = steps[..t - 1]
            .iter()
            .map(|s| g.constant(s.clone()))
            .collect();
        let preds = net.forward_bound(&mut g, &bound, &inputs)?;
        // one absolute-error term per predicted step, averaged over steps
        let mut acc: Option<Var> = None;
        for (i, &p) in preds.iter().enumerate() {
            let target = g.constant(steps[i + 1].clone());
            let d = g.sub(p, target)?;
            let a = g.abs(d)?;
            let m = g.mean_all(a)?;
            acc = Some(match acc {
                Some(v) => g.add(v, m)?,
                None => m,
            });
        }
        let total = acc.expect("t >= 2");
        let loss = g.scale(total, 1.0 / (t - 1) as f64)?;
        let grads = g.backward(loss)?;

        let vars = bound.vars();
        let mut grad_list: Vec<Tensor> = vars
            .iter()
            .zip(net.params())
            .map(|(&v, p)| grads.get_or_zero(v, p.shape()))
            .collect();
        clip_gradients(&mut grad_list, 1.0);
        opt.step(&mut net.params_mut(), &grad_list)?;
    }

    // test on real: MAE over all predictions
    let steps = real.to_step_tensors();
    let preds = net.forward_eager(&steps[..t - 1])?;
    let mut abs_sum = 0.0;
    let mut count = 0usize;
    for (i, p) in preds.iter().enumerate() {
        for (pv, tv) in p.data().iter().zip(steps[i + 1].data()) {
            abs_sum += (pv - tv).abs();
            count += 1;
        }
    }
    Ok(abs_sum / count as f64)
}
