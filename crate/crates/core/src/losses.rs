//! Differentiable training objectives.
//!
//! Every loss is a scalar graph node built from per-timestep `(batch, dim)`
//! nodes, so the same implementation serves training graphs and the eager
//! wrappers used by tests and reporting. Aggregation conventions:
//!
//! - reconstruction: mean over samples, sum over timestamps, of squared L2
//!   per timestep;
//! - supervision: mean over samples and valid positions of the squared L2
//!   between the target two steps ahead and the prediction;
//! - batch moments: absolute mean/variance gaps summed over timestamps and
//!   features (population variance);
//! - code moments: squared L2 gaps of per-position batch means and standard
//!   deviations, summed over the code time axis;
//! - least-squares adversarial terms: means over batch and time of squared
//!   residuals against target scores (real 1, fake 0, generator target 1).

use crate::data::SeriesBatch;
use crate::error::{Error, Result};
use crate::numkit::{Graph, Var};

/// Stabilizer added under the square root of the code-moment standard
/// deviation, keeping its gradient finite when a batch collapses.
pub const STD_EPS: f64 = 1e-10;

fn check_seq_pair(kind: &str, g: &Graph, a: &[Var], b: &[Var]) -> Result<(usize, usize)> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::shape(kind, &[a.len()], &[b.len()]));
    }
    let sa = g.value(a[0]).shape();
    let sb = g.value(b[0]).shape();
    if sa != sb {
        return Err(Error::shape(kind, sa, sb));
    }
    Ok((sa[0], sa[1]))
}

/// Mean over the batch of the per-timestep squared L2 residual, summed over
/// timestamps. Zero exactly when the reconstruction equals the input.
pub fn reconstruction_loss(g: &mut Graph, x: &[Var], x_rec: &[Var]) -> Result<Var> {
    let (rows, _) = check_seq_pair("reconstruction_loss", g, x, x_rec)?;
    let mut acc: Option<Var> = None;
    for (&a, &b) in x.iter().zip(x_rec) {
        let d = g.sub(a, b)?;
        let sq = g.square(d)?;
        let total = g.sum_all(sq)?;
        let per_sample = g.scale(total, 1.0 / rows as f64)?;
        acc = Some(match acc {
            Some(v) => g.add(v, per_sample)?,
            None => per_sample,
        });
    }
    Ok(acc.expect("non-empty sequence"))
}

/// Two-step-ahead supervision: position `t` of `predictions` is scored
/// against `targets[t + 2]`, averaged over the batch and the `T - 2` valid
/// positions. Requires `T >= 3`.
pub fn supervised_loss(g: &mut Graph, targets: &[Var], predictions: &[Var]) -> Result<Var> {
    let (rows, _) = check_seq_pair("supervised_loss", g, targets, predictions)?;
    let t_len = targets.len();
    if t_len < 3 {
        return Err(Error::contract(format!(
            "supervised_loss needs at least 3 timestamps, got {t_len}"
        )));
    }
    let valid = t_len - 2;
    let mut acc: Option<Var> = None;
    for t in 0..valid {
        let d = g.sub(targets[t + 2], predictions[t])?;
        let sq = g.square(d)?;
        let total = g.sum_all(sq)?;
        acc = Some(match acc {
            Some(v) => g.add(v, total)?,
            None => total,
        });
    }
    g.scale(acc.expect("valid positions"), 1.0 / (rows * valid) as f64)
}

fn batch_mean_and_var(g: &mut Graph, step: Var, rows: usize) -> Result<(Var, Var)> {
    let mean = g.reduce_mean(step, &[0])?;
    let centered_ref = g.broadcast(mean, rows)?;
    let centered = g.sub(step, centered_ref)?;
    let sq = g.square(centered)?;
    let var = g.reduce_mean(sq, &[0])?;
    Ok((mean, var))
}

/// Absolute gaps between per-timestamp, per-feature batch means and
/// population variances, summed over timestamps and features. The two
/// batches may have different sample counts.
pub fn moment_loss(g: &mut Graph, real: &[Var], synthetic: &[Var]) -> Result<Var> {
    if real.is_empty() || real.len() != synthetic.len() {
        return Err(Error::shape("moment_loss", &[real.len()], &[synthetic.len()]));
    }
    let f_real = g.value(real[0]).shape()[1];
    let f_syn = g.value(synthetic[0]).shape()[1];
    if f_real != f_syn {
        return Err(Error::shape("moment_loss", &[f_real], &[f_syn]));
    }
    let rows_real = g.value(real[0]).shape()[0];
    let rows_syn = g.value(synthetic[0]).shape()[0];

    let mut acc: Option<Var> = None;
    for (&r, &s) in real.iter().zip(synthetic) {
        let (mr, vr) = batch_mean_and_var(g, r, rows_real)?;
        let (ms, vs) = batch_mean_and_var(g, s, rows_syn)?;
        let dm = g.sub(mr, ms)?;
        let dm = g.abs(dm)?;
        let dm = g.sum_all(dm)?;
        let dv = g.sub(vr, vs)?;
        let dv = g.abs(dv)?;
        let dv = g.sum_all(dv)?;
        let both = g.add(dm, dv)?;
        acc = Some(match acc {
            Some(v) => g.add(v, both)?,
            None => both,
        });
    }
    Ok(acc.expect("non-empty sequence"))
}

/// Squared L2 gaps between per-position batch means and standard deviations
/// of two code batches, summed over the code time axis.
pub fn ts_feature_loss(g: &mut Graph, real: &[Var], synthetic: &[Var]) -> Result<Var> {
    if real.is_empty() || real.len() != synthetic.len() {
        return Err(Error::shape(
            "ts_feature_loss",
            &[real.len()],
            &[synthetic.len()],
        ));
    }
    let c_real = g.value(real[0]).shape()[1];
    let c_syn = g.value(synthetic[0]).shape()[1];
    if c_real != c_syn {
        return Err(Error::shape("ts_feature_loss", &[c_real], &[c_syn]));
    }
    let rows_real = g.value(real[0]).shape()[0];
    let rows_syn = g.value(synthetic[0]).shape()[0];

    let mut acc: Option<Var> = None;
    for (&r, &s) in real.iter().zip(synthetic) {
        let (mr, vr) = batch_mean_and_var(g, r, rows_real)?;
        let (ms, vs) = batch_mean_and_var(g, s, rows_syn)?;
        let sr = g.add_scalar(vr, STD_EPS)?;
        let sr = g.sqrt(sr)?;
        let ss = g.add_scalar(vs, STD_EPS)?;
        let ss = g.sqrt(ss)?;

        let dm = g.sub(mr, ms)?;
        let dm = g.square(dm)?;
        let dm = g.sum_all(dm)?;
        let ds = g.sub(sr, ss)?;
        let ds = g.square(ds)?;
        let ds = g.sum_all(ds)?;
        let both = g.add(dm, ds)?;
        acc = Some(match acc {
            Some(v) => g.add(v, both)?,
            None => both,
        });
    }
    Ok(acc.expect("non-empty sequence"))
}

fn lsgan_term(g: &mut Graph, scores: &[Var], target: f64) -> Result<Var> {
    if scores.is_empty() {
        return Err(Error::contract("lsgan term needs at least one timestep"));
    }
    let mut acc: Option<Var> = None;
    for &y in scores {
        let shifted = g.add_scalar(y, -target)?;
        let sq = g.square(shifted)?;
        let m = g.mean_all(sq)?;
        acc = Some(match acc {
            Some(v) => g.add(v, m)?,
            None => m,
        });
    }
    g.scale(acc.expect("non-empty"), 1.0 / scores.len() as f64)
}

/// `mean((y_real - 1)^2) + mean(y_fake^2)`, means over batch and time.
pub fn lsgan_discriminator_loss(g: &mut Graph, y_real: &[Var], y_fake: &[Var]) -> Result<Var> {
    let real_term = lsgan_term(g, y_real, 1.0)?;
    let fake_term = lsgan_term(g, y_fake, 0.0)?;
    g.add(real_term, fake_term)
}

/// `mean((y_fake - 1)^2)`: the generator-side least-squares term.
pub fn lsgan_generator_loss(g: &mut Graph, y_fake: &[Var]) -> Result<Var> {
    lsgan_term(g, y_fake, 1.0)
}

/// Weighted sum of scalar nodes; zero-weight terms are skipped entirely so
/// ablated losses cost nothing and contribute nothing.
pub fn weighted_sum(g: &mut Graph, terms: &[(Var, f64)]) -> Result<Var> {
    let mut acc: Option<Var> = None;
    for &(v, w) in terms {
        if w == 0.0 {
            continue;
        }
        let scaled = if w == 1.0 { v } else { g.scale(v, w)? };
        acc = Some(match acc {
            Some(a) => g.add(a, scaled)?,
            None => scaled,
        });
    }
    match acc {
        Some(v) => Ok(v),
        None => Ok(g.constant(crate::numkit::Tensor::scalar(0.0))),
    }
}

/// The five generator-side terms as plain numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeneratorLossTerms {
    pub adv_latent: f64,
    pub adv_feature: f64,
    pub supervised: f64,
    pub moment: f64,
    pub ts: f64,
}

/// Weights for the generator objective; all 1 by default, ablations zero
/// individual entries.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneratorLossWeights {
    pub adv_latent: f64,
    pub adv_feature: f64,
    pub supervised: f64,
    pub moment: f64,
    pub ts: f64,
}

impl Default for GeneratorLossWeights {
    fn default() -> Self {
        Self {
            adv_latent: 1.0,
            adv_feature: 1.0,
            supervised: 1.0,
            moment: 1.0,
            ts: 1.0,
        }
    }
}

pub fn generator_total_loss(t: &GeneratorLossTerms, w: &GeneratorLossWeights) -> f64 {
    w.adv_latent * t.adv_latent
        + w.adv_feature * t.adv_feature
        + w.supervised * t.supervised
        + w.moment * t.moment
        + w.ts * t.ts
}

/// Weights for the latent autoencoder objective.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AutoencoderLossWeights {
    pub reconstruction: f64,
    pub adversarial: f64,
}

impl Default for AutoencoderLossWeights {
    fn default() -> Self {
        Self {
            reconstruction: 1.0,
            adversarial: 1.0,
        }
    }
}

pub fn autoencoder_total_loss(recon: f64, adversarial: f64, w: &AutoencoderLossWeights) -> f64 {
    w.reconstruction * recon + w.adversarial * adversarial
}

/// Eager evaluation of the graph losses on concrete batches.
pub mod eager {
    use super::*;

    fn run2(
        batch_a: &SeriesBatch,
        batch_b: &SeriesBatch,
        f: impl Fn(&mut Graph, &[Var], &[Var]) -> Result<Var>,
    ) -> Result<f64> {
        let mut g = Graph::new();
        let a: Vec<Var> = batch_a
            .to_step_tensors()
            .into_iter()
            .map(|t| g.constant(t))
            .collect();
        let b: Vec<Var> = batch_b
            .to_step_tensors()
            .into_iter()
            .map(|t| g.constant(t))
            .collect();
        let loss = f(&mut g, &a, &b)?;
        Ok(g.value(loss).item())
    }

    pub fn reconstruction_loss(x: &SeriesBatch, x_rec: &SeriesBatch) -> Result<f64> {
        run2(x, x_rec, super::reconstruction_loss)
    }

    pub fn supervised_loss(targets: &SeriesBatch, predictions: &SeriesBatch) -> Result<f64> {
        run2(targets, predictions, super::supervised_loss)
    }

    pub fn moment_loss(real: &SeriesBatch, synthetic: &SeriesBatch) -> Result<f64> {
        run2(real, synthetic, super::moment_loss)
    }

    pub fn ts_feature_loss(real: &SeriesBatch, synthetic: &SeriesBatch) -> Result<f64> {
        run2(real, synthetic, super::ts_feature_loss)
    }

    pub fn lsgan_discriminator_loss(y_real: &SeriesBatch, y_fake: &SeriesBatch) -> Result<f64> {
        run2(y_real, y_fake, super::lsgan_discriminator_loss)
    }

    pub fn lsgan_generator_loss(y_fake: &SeriesBatch) -> Result<f64> {
        let mut g = Graph::new();
        let b: Vec<Var> = y_fake
            .to_step_tensors()
            .into_iter()
            .map(|t| g.constant(t))
            .collect();
        let loss = super::lsgan_generator_loss(&mut g, &b)?;
        Ok(g.value(loss).item())
    }
}
