//! The eight network roles wired together with consistent dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nets::seqnet::{Activation, NetworkSpec, Role, SeqNetwork};
use crate::numkit::Rng;

/// Shared dimensioning for a bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDims {
    pub feature_dim: usize,
    pub latent_dim: usize,
    pub hidden_dim: usize,
    pub num_layers: usize,
    /// Output width of the code-space encoder.
    pub code_dim: usize,
    /// Temporal compression factor of the code-space autoencoder.
    pub time_stride: usize,
    pub noise_dim: usize,
}

impl BundleDims {
    /// Defaults everything that is not pinned: latent and noise dims to
    /// `max(1, F/2)`, code dim to `F`, hidden 24, 3 layers, stride 2.
    pub fn defaults_for(feature_dim: usize) -> Self {
        let latent = (feature_dim / 2).max(1);
        Self {
            feature_dim,
            latent_dim: latent,
            hidden_dim: 24,
            num_layers: 3,
            code_dim: feature_dim,
            time_stride: 2,
            noise_dim: latent,
        }
    }

    pub fn validate(&self, window: usize) -> Result<()> {
        if self.feature_dim == 0
            || self.latent_dim == 0
            || self.hidden_dim == 0
            || self.num_layers == 0
            || self.code_dim == 0
            || self.time_stride == 0
            || self.noise_dim == 0
        {
            return Err(Error::contract("bundle dimensions must be positive"));
        }
        if window % self.time_stride != 0 {
            return Err(Error::contract(format!(
                "time stride {} must divide window length {window}",
                self.time_stride
            )));
        }
        Ok(())
    }
}

/// Parameters of all eight roles: the latent autoencoder pair, the
/// code-space autoencoder pair used for loss computation, generator,
/// supervisor, and the two discriminators.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkBundle {
    pub latent_encoder: SeqNetwork,
    pub latent_decoder: SeqNetwork,
    pub lossfn_encoder: SeqNetwork,
    pub lossfn_decoder: SeqNetwork,
    pub generator: SeqNetwork,
    pub supervisor: SeqNetwork,
    pub latent_discriminator: SeqNetwork,
    pub feature_discriminator: SeqNetwork,
}

impl NetworkBundle {
    /// Initializes every role from one RNG stream, in a fixed order.
    pub fn init(dims: &BundleDims, rng: &mut Rng) -> Result<Self> {
        let d = *dims;
        let spec = |role: Role, input: usize, output: usize, act: Activation, stride: usize| {
            NetworkSpec {
                role,
                input_dim: input,
                hidden_dim: d.hidden_dim,
                num_layers: d.num_layers,
                output_dim: output,
                activation: act,
                time_stride: stride,
            }
        };
        let bundle = Self {
            latent_encoder: SeqNetwork::init(
                spec(Role::LatentEncoder, d.feature_dim, d.latent_dim, Activation::Sigmoid, 1),
                rng,
            )?,
            latent_decoder: SeqNetwork::init(
                spec(Role::LatentDecoder, d.latent_dim, d.feature_dim, Activation::Sigmoid, 1),
                rng,
            )?,
            lossfn_encoder: SeqNetwork::init(
                spec(
                    Role::LossFnEncoder,
                    d.feature_dim,
                    d.code_dim,
                    Activation::Sigmoid,
                    d.time_stride,
                ),
                rng,
            )?,
            lossfn_decoder: SeqNetwork::init(
                spec(
                    Role::LossFnDecoder,
                    d.code_dim,
                    d.feature_dim,
                    Activation::Sigmoid,
                    d.time_stride,
                ),
                rng,
            )?,
            generator: SeqNetwork::init(
                spec(Role::Generator, d.noise_dim, d.latent_dim, Activation::Sigmoid, 1),
                rng,
            )?,
            supervisor: SeqNetwork::init(
                spec(Role::Supervisor, d.latent_dim, d.latent_dim, Activation::Sigmoid, 1),
                rng,
            )?,
            latent_discriminator: SeqNetwork::init(
                spec(Role::LatentDiscriminator, d.latent_dim, 1, Activation::Linear, 1),
                rng,
            )?,
            feature_discriminator: SeqNetwork::init(
                spec(Role::FeatureDiscriminator, d.feature_dim, 1, Activation::Linear, 1),
                rng,
            )?,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    /// Checks the dimension contracts that tie the roles together.
    pub fn validate(&self) -> Result<()> {
        let latent = self.latent_encoder.spec.output_dim;
        let feature = self.latent_decoder.spec.output_dim;
        let checks = [
            (self.latent_decoder.spec.input_dim, latent, "decoder input"),
            (self.generator.spec.output_dim, latent, "generator output"),
            (self.supervisor.spec.input_dim, latent, "supervisor input"),
            (self.supervisor.spec.output_dim, latent, "supervisor output"),
            (
                self.latent_discriminator.spec.input_dim,
                latent,
                "latent discriminator input",
            ),
            (self.latent_encoder.spec.input_dim, feature, "encoder input"),
            (
                self.lossfn_encoder.spec.input_dim,
                feature,
                "code encoder input",
            ),
            (
                self.feature_discriminator.spec.input_dim,
                feature,
                "feature discriminator input",
            ),
            (
                self.lossfn_decoder.spec.input_dim,
                self.lossfn_encoder.spec.output_dim,
                "code decoder input",
            ),
        ];
        for (got, want, what) in checks {
            if got != want {
                return Err(Error::contract(format!(
                    "bundle dimension mismatch: {what} is {got}, expected {want}"
                )));
            }
        }
        for d in [&self.latent_discriminator, &self.feature_discriminator] {
            if d.spec.output_dim != 1 || d.spec.activation != Activation::Linear {
                return Err(Error::contract(
                    "discriminators must emit one linear score per timestep",
                ));
            }
        }
        Ok(())
    }

    pub fn roles() -> [Role; 8] {
        [
            Role::LatentEncoder,
            Role::LatentDecoder,
            Role::LossFnEncoder,
            Role::LossFnDecoder,
            Role::Generator,
            Role::Supervisor,
            Role::LatentDiscriminator,
            Role::FeatureDiscriminator,
        ]
    }

    pub fn net(&self, role: Role) -> &SeqNetwork {
        match role {
            Role::LatentEncoder => &self.latent_encoder,
            Role::LatentDecoder => &self.latent_decoder,
            Role::LossFnEncoder => &self.lossfn_encoder,
            Role::LossFnDecoder => &self.lossfn_decoder,
            Role::Generator => &self.generator,
            Role::Supervisor => &self.supervisor,
            Role::LatentDiscriminator => &self.latent_discriminator,
            Role::FeatureDiscriminator => &self.feature_discriminator,
            Role::Scorer => panic!("scorers are not part of the bundle"),
        }
    }

    pub fn net_mut(&mut self, role: Role) -> &mut SeqNetwork {
        match role {
            Role::LatentEncoder => &mut self.latent_encoder,
            Role::LatentDecoder => &mut self.latent_decoder,
            Role::LossFnEncoder => &mut self.lossfn_encoder,
            Role::LossFnDecoder => &mut self.lossfn_decoder,
            Role::Generator => &mut self.generator,
            Role::Supervisor => &mut self.supervisor,
            Role::LatentDiscriminator => &mut self.latent_discriminator,
            Role::FeatureDiscriminator => &mut self.feature_discriminator,
            Role::Scorer => panic!("scorers are not part of the bundle"),
        }
    }

    /// All parameters with checkpoint names, in role order.
    pub fn named_params(&self) -> Vec<(String, &crate::numkit::Tensor)> {
        let mut out = Vec::new();
        for role in Self::roles() {
            let net = self.net(role);
            out.extend(net.param_names().into_iter().zip(net.params()));
        }
        out
    }
}
