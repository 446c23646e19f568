//! Stacked-GRU sequence networks with a per-timestep dense head.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nets::gru::{bind_gru, gru_forward, BoundGru, GruParams};
use crate::numkit::{Graph, Rng, Tensor, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Sigmoid,
    Linear,
}

/// The roles a sequence network can play in the framework.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    LatentEncoder,
    LatentDecoder,
    LossFnEncoder,
    LossFnDecoder,
    Generator,
    Supervisor,
    LatentDiscriminator,
    FeatureDiscriminator,
    /// Post-hoc scorer networks (classifier / predictor) reuse the same
    /// machinery outside the adversarial bundle.
    Scorer,
}

impl Role {
    pub fn tag(&self) -> &'static str {
        match self {
            Role::LatentEncoder => "latent_encoder",
            Role::LatentDecoder => "latent_decoder",
            Role::LossFnEncoder => "lossfn_encoder",
            Role::LossFnDecoder => "lossfn_decoder",
            Role::Generator => "generator",
            Role::Supervisor => "supervisor",
            Role::LatentDiscriminator => "latent_discriminator",
            Role::FeatureDiscriminator => "feature_discriminator",
            Role::Scorer => "scorer",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub role: Role,
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub num_layers: usize,
    pub output_dim: usize,
    pub activation: Activation,
    /// Temporal factor for the code-space autoencoder: the encoder emits one
    /// output per `time_stride` input steps, the decoder repeats each code
    /// `time_stride` times before its GRU. 1 everywhere else.
    pub time_stride: usize,
}

impl NetworkSpec {
    pub fn plain(
        role: Role,
        input_dim: usize,
        hidden_dim: usize,
        num_layers: usize,
        output_dim: usize,
        activation: Activation,
    ) -> Self {
        Self {
            role,
            input_dim,
            hidden_dim,
            num_layers,
            output_dim,
            activation,
            time_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0
            || self.hidden_dim == 0
            || self.num_layers == 0
            || self.output_dim == 0
            || self.time_stride == 0
        {
            return Err(Error::contract(format!(
                "network spec for {} has a zero dimension",
                self.role.tag()
            )));
        }
        Ok(())
    }
}

/// Stacked GRU layers plus a dense output map applied at every emitted
/// timestep.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqNetwork {
    pub spec: NetworkSpec,
    pub layers: Vec<GruParams>,
    pub w_out: Tensor,
    pub b_out: Tensor,
}

/// A network's parameters registered as nodes of one graph.
pub struct BoundNet {
    pub layers: Vec<BoundGru>,
    pub w_out: Var,
    pub b_out: Var,
}

impl BoundNet {
    /// Same order as [`SeqNetwork::params`].
    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self.layers.iter().flat_map(|l| l.vars()).collect();
        out.push(self.w_out);
        out.push(self.b_out);
        out
    }
}

impl SeqNetwork {
    /// Initializes all weights uniform in `[-k, k]`, `k = 1/sqrt(hidden_dim)`,
    /// and all biases zero.
    pub fn init(spec: NetworkSpec, rng: &mut Rng) -> Result<Self> {
        spec.validate()?;
        let mut layers = Vec::with_capacity(spec.num_layers);
        for l in 0..spec.num_layers {
            let in_dim = if l == 0 { spec.input_dim } else { spec.hidden_dim };
            layers.push(GruParams::init(in_dim, spec.hidden_dim, rng));
        }
        let k = 1.0 / (spec.hidden_dim as f64).sqrt();
        let w_out =
            Tensor::from_fn(&[spec.hidden_dim, spec.output_dim], |_| rng.uniform_range(-k, k));
        let b_out = Tensor::zeros(&[spec.output_dim]);
        Ok(Self {
            spec,
            layers,
            w_out,
            b_out,
        })
    }

    /// Canonical parameter order: layers in depth order (gate order fixed by
    /// [`GruParams::params`]), then the output map.
    pub fn params(&self) -> Vec<&Tensor> {
        let mut out: Vec<&Tensor> = self.layers.iter().flat_map(|l| l.params()).collect();
        out.push(&self.w_out);
        out.push(&self.b_out);
        out
    }

    pub fn params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> =
            self.layers.iter_mut().flat_map(|l| l.params_mut()).collect();
        out.push(&mut self.w_out);
        out.push(&mut self.b_out);
        out
    }

    pub fn param_names(&self) -> Vec<String> {
        let tag = self.spec.role.tag();
        let mut out = Vec::new();
        for l in 0..self.layers.len() {
            for name in GruParams::param_names() {
                out.push(format!("{tag}.layer{l}.{name}"));
            }
        }
        out.push(format!("{tag}.out.w"));
        out.push(format!("{tag}.out.b"));
        out
    }

    /// Zeroes the dense output map; scorer networks start from a constant
    /// output this way.
    pub fn zero_output_layer(&mut self) {
        self.w_out = Tensor::zeros(self.w_out.shape());
        self.b_out = Tensor::zeros(self.b_out.shape());
    }

    pub fn bind(&self, graph: &mut Graph, trainable: bool) -> BoundNet {
        let layers = self
            .layers
            .iter()
            .map(|l| bind_gru(graph, l, trainable))
            .collect();
        let (w_out, b_out) = if trainable {
            (graph.param(self.w_out.clone()), graph.param(self.b_out.clone()))
        } else {
            (
                graph.constant(self.w_out.clone()),
                graph.constant(self.b_out.clone()),
            )
        };
        BoundNet {
            layers,
            w_out,
            b_out,
        }
    }

    /// Forward pass over per-timestep `(batch, input_dim)` nodes.
    ///
    /// The code-space encoder emits outputs only at timesteps that complete a
    /// stride (`t = stride-1, 2*stride-1, ...`); the code-space decoder first
    /// repeats each input `time_stride` times. All other roles map T inputs
    /// to T outputs.
    pub fn forward_bound(
        &self,
        graph: &mut Graph,
        bound: &BoundNet,
        inputs: &[Var],
    ) -> Result<Vec<Var>> {
        if inputs.is_empty() {
            return Err(Error::contract("network forward needs at least one step"));
        }
        let in_shape = graph.value(inputs[0]).shape().to_vec();
        if in_shape.len() != 2 || in_shape[1] != self.spec.input_dim {
            return Err(Error::shape(
                self.spec.role.tag(),
                &in_shape,
                &[in_shape[0], self.spec.input_dim],
            ));
        }
        let rows = in_shape[0];
        let stride = self.spec.time_stride;

        let mut seq: Vec<Var> = if self.spec.role == Role::LossFnDecoder && stride > 1 {
            let mut up = Vec::with_capacity(inputs.len() * stride);
            for &code in inputs {
                for _ in 0..stride {
                    up.push(code);
                }
            }
            up
        } else {
            inputs.to_vec()
        };

        for cell in &bound.layers {
            seq = gru_forward(graph, cell, &seq, None)?;
        }

        let emitted: Vec<Var> = if self.spec.role == Role::LossFnEncoder && stride > 1 {
            if seq.len() % stride != 0 {
                return Err(Error::contract(format!(
                    "time stride {stride} does not divide window length {}",
                    seq.len()
                )));
            }
            seq.iter()
                .skip(stride - 1)
                .step_by(stride)
                .copied()
                .collect()
        } else {
            seq
        };

        let mut out = Vec::with_capacity(emitted.len());
        for h in emitted {
            let hw = graph.matmul(h, bound.w_out)?;
            let bb = graph.broadcast(bound.b_out, rows)?;
            let pre = graph.add(hw, bb)?;
            let y = match self.spec.activation {
                Activation::Sigmoid => graph.sigmoid(pre)?,
                Activation::Linear => pre,
            };
            out.push(y);
        }
        Ok(out)
    }

    /// Forward pass on concrete tensors without gradient tracking.
    pub fn forward_eager(&self, inputs: &[Tensor]) -> Result<Vec<Tensor>> {
        let mut graph = Graph::new();
        let bound = self.bind(&mut graph, false);
        let vars: Vec<Var> = inputs.iter().map(|t| graph.constant(t.clone())).collect();
        let out = self.forward_bound(&mut graph, &bound, &vars)?;
        Ok(out.into_iter().map(|v| graph.value(v).clone()).collect())
    }
}
