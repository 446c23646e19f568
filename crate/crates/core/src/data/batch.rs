//! Batches of fixed-length multivariate sequences.

use crate::error::{Error, Result};
use crate::numkit::Tensor;

/// A `(N, T, F)` batch of sequences in row-major order. The `scaled` flag
/// marks batches whose values live in `[0, 1]` after min-max scaling; it also
/// tags latent, code, and score batches, which share this layout.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesBatch {
    n: usize,
    t: usize,
    f: usize,
    values: Vec<f64>,
    scaled: bool,
}

impl SeriesBatch {
    pub fn new(n: usize, t: usize, f: usize, values: Vec<f64>, scaled: bool) -> Result<Self> {
        if n == 0 || t == 0 || f == 0 {
            return Err(Error::contract(format!(
                "batch dimensions must be positive, got ({n}, {t}, {f})"
            )));
        }
        if values.len() != n * t * f {
            return Err(Error::contract(format!(
                "batch shape ({n}, {t}, {f}) implies {} values but {} were given",
                n * t * f,
                values.len()
            )));
        }
        Ok(Self {
            n,
            t,
            f,
            values,
            scaled,
        })
    }

    pub fn zeros(n: usize, t: usize, f: usize, scaled: bool) -> Self {
        Self {
            n,
            t,
            f,
            values: vec![0.0; n * t * f],
            scaled,
        }
    }

    pub fn samples(&self) -> usize {
        self.n
    }

    pub fn timestamps(&self) -> usize {
        self.t
    }

    pub fn features(&self) -> usize {
        self.f
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn set_scaled(&mut self, scaled: bool) {
        self.scaled = scaled;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, sample: usize, t: usize, feature: usize) -> f64 {
        self.values[(sample * self.t + t) * self.f + feature]
    }

    pub fn set(&mut self, sample: usize, t: usize, feature: usize, v: f64) {
        self.values[(sample * self.t + t) * self.f + feature] = v;
    }

    /// One sample's `(T, F)` block.
    pub fn sample(&self, i: usize) -> &[f64] {
        &self.values[i * self.t * self.f..(i + 1) * self.t * self.f]
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Per-timestep `(N, F)` matrices, the layout the tape operates on.
    pub fn to_step_tensors(&self) -> Vec<Tensor> {
        (0..self.t)
            .map(|t| {
                Tensor::from_fn(&[self.n, self.f], |i| {
                    let (s, k) = (i / self.f, i % self.f);
                    self.get(s, t, k)
                })
            })
            .collect()
    }

    /// Rebuilds a batch from per-timestep `(N, F)` matrices.
    pub fn from_step_tensors(steps: &[Tensor], scaled: bool) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::contract("from_step_tensors needs at least one step"));
        }
        let shape = steps[0].shape().to_vec();
        if shape.len() != 2 {
            return Err(Error::contract(format!(
                "per-timestep tensors must be rank 2, got {shape:?}"
            )));
        }
        for s in steps {
            if s.shape() != shape.as_slice() {
                return Err(Error::shape("from_step_tensors", &shape, s.shape()));
            }
        }
        let (n, f) = (shape[0], shape[1]);
        let t = steps.len();
        let mut out = Self::zeros(n, t, f, scaled);
        for (ti, step) in steps.iter().enumerate() {
            for s in 0..n {
                for k in 0..f {
                    out.set(s, ti, k, step.at2(s, k));
                }
            }
        }
        Ok(out)
    }

    /// New batch holding the selected samples, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::contract("select needs at least one index"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n) {
            return Err(Error::contract(format!(
                "sample index {bad} out of range for {} samples",
                self.n
            )));
        }
        let mut values = Vec::with_capacity(indices.len() * self.t * self.f);
        for &i in indices {
            values.extend_from_slice(self.sample(i));
        }
        Self::new(indices.len(), self.t, self.f, values, self.scaled)
    }

    /// First `count` samples.
    pub fn head(&self, count: usize) -> Result<Self> {
        let indices: Vec<usize> = (0..count.min(self.n)).collect();
        self.select(&indices)
    }

    /// Stacks two batches along the sample axis.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.t != other.t || self.f != other.f {
            return Err(Error::shape(
                "batch concat",
                &[self.t, self.f],
                &[other.t, other.f],
            ));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Self::new(self.n + other.n, self.t, self.f, values, self.scaled)
    }
}
