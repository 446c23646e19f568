//! The four-phase training schedule.
//!
//! Phase 1 trains the code-space autoencoder on reconstruction alone. Phase
//! 2 trains the latent autoencoder on reconstruction plus least-squares
//! feedback from the feature discriminator (real: the data, fake: its
//! reconstruction). Phase 3 teacher-forces the supervisor to predict latent
//! vectors two steps ahead on real embeddings. Phase 4 trains everything but
//! the code-space autoencoder jointly: per epoch, a feature-discriminator
//! step (real: data and reconstructions, fake: decoded generator and
//! supervisor outputs), a latent-discriminator step (real: encoder outputs,
//! fake: generator and supervisor outputs), a combined generator+supervisor
//! step, and a latent-autoencoder step. Early stopping evaluates the model
//! periodically during phase 4 and keeps the best-scoring snapshot.
//!
//! One "epoch" is one minibatch update. Evaluation randomness is derived
//! from the seed and the epoch rather than drawn from the training stream,
//! so the parameter trajectory is identical with early stopping on or off.

use crate::data::{sample_noise, scaler_apply, scaler_fit, ScalerParams, SeriesBatch};
use crate::error::{Error, Result};
use crate::eval::discriminative_score;
use crate::losses::{
    lsgan_discriminator_loss, lsgan_generator_loss, moment_loss, reconstruction_loss,
    supervised_loss, ts_feature_loss, weighted_sum, AutoencoderLossWeights, GeneratorLossWeights,
};
use crate::nets::{BoundNet, BundleDims, NetworkBundle, SeqNetwork};
use crate::numkit::{AdamParams, AdamState, Graph, Rng, Tensor, Var};
use crate::training::checkpoint::Checkpoint;
use crate::training::config::TrainConfig;
use crate::training::earlystop::{code_moment_gaps, EarlyStopState, EsRecord};

/// Per-epoch loss values of the joint phase.
#[derive(Clone, Copy, Debug)]
pub struct Phase4Record {
    pub epoch: usize,
    pub feature_disc: Option<f64>,
    pub latent_disc: f64,
    pub generator: f64,
    pub autoencoder: f64,
}

/// Losses traced by phase 2, one entry per epoch.
#[derive(Clone, Debug, Default)]
pub struct Phase2Trace {
    pub reconstruction: Vec<f64>,
    pub adversarial: Vec<f64>,
    pub discriminator: Vec<f64>,
}

/// What a full run produces.
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    /// Best (early stopping) or final-epoch synthetic set, in scaled space.
    pub best_synthetic: SeriesBatch,
    pub es_log: Vec<EsRecord>,
    pub degenerate_warning: bool,
    pub trace: Vec<Phase4Record>,
}

struct Optimizers {
    latent_encoder: AdamState,
    latent_decoder: AdamState,
    lossfn_encoder: AdamState,
    lossfn_decoder: AdamState,
    generator: AdamState,
    supervisor: AdamState,
    latent_disc: AdamState,
    feature_disc: AdamState,
}

pub struct Trainer {
    cfg: TrainConfig,
    dims: BundleDims,
    bundle: NetworkBundle,
    opt: Optimizers,
    rng: Rng,
    scaler: ScalerParams,
    data: SeriesBatch,
    completed_phase: u8,
    epochs_done: usize,
}

fn ensure_finite(phase: &str, term: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            phase: phase.to_string(),
            term: term.to_string(),
        })
    }
}

/// Backward from `loss` and one Adam step per listed network.
fn apply_updates(
    graph: &Graph,
    loss: Var,
    updates: &mut [(&mut SeqNetwork, &BoundNet, &mut AdamState)],
) -> Result<f64> {
    let value = graph.value(loss).item();
    let grads = graph.backward(loss)?;
    for (net, bound, opt) in updates.iter_mut() {
        let vars = bound.vars();
        let grad_list: Vec<Tensor> = vars
            .iter()
            .zip(net.params())
            .map(|(&v, p)| grads.get_or_zero(v, p.shape()))
            .collect();
        opt.step(&mut net.params_mut(), &grad_list)?;
    }
    Ok(value)
}

fn constants(g: &mut Graph, steps: &[Tensor]) -> Vec<Var> {
    steps.iter().map(|t| g.constant(t.clone())).collect()
}

/// Noise through generator, supervisor, and decoder: the final synthetic
/// batch in scaled space.
pub fn generate_synthetic(
    bundle: &NetworkBundle,
    window: usize,
    count: usize,
    rng: &mut Rng,
) -> Result<SeriesBatch> {
    let noise_dim = bundle.generator.spec.input_dim;
    let z = sample_noise(count, window, noise_dim, rng);
    let latent = bundle.generator.forward_eager(&z.to_step_tensors())?;
    let refined = bundle.supervisor.forward_eager(&latent)?;
    let decoded = bundle.latent_decoder.forward_eager(&refined)?;
    SeriesBatch::from_step_tensors(&decoded, true)
}

impl Trainer {
    /// Fits the scaler on `data`, scales it, and initializes all networks
    /// and optimizer states. `data` must be unscaled and its window length
    /// must match the config.
    pub fn new(data: &SeriesBatch, cfg: TrainConfig) -> Result<Self> {
        cfg.validate()?;
        if data.is_scaled() {
            return Err(Error::contract(
                "trainer expects unscaled data and fits its own scaler",
            ));
        }
        if data.timestamps() != cfg.window {
            return Err(Error::contract(format!(
                "data window length {} does not match configured window {}",
                data.timestamps(),
                cfg.window
            )));
        }
        if cfg.ablation.use_early_stopping && data.samples() < 10 {
            return Err(Error::contract(
                "early stopping needs at least 10 samples for its evaluations",
            ));
        }
        let dims = cfg.dims_for(data.features());
        dims.validate(cfg.window)?;

        let scaler = scaler_fit(data);
        let scaled = scaler_apply(data, &scaler)?;
        let mut rng = Rng::from_seed(cfg.seed);
        let bundle = NetworkBundle::init(&dims, &mut rng)?;

        let opt = Optimizers {
            latent_encoder: AdamState::new(
                &bundle.latent_encoder.params(),
                AdamParams::with_lr(cfg.lr.autoencoder),
            ),
            latent_decoder: AdamState::new(
                &bundle.latent_decoder.params(),
                AdamParams::with_lr(cfg.lr.autoencoder),
            ),
            lossfn_encoder: AdamState::new(
                &bundle.lossfn_encoder.params(),
                AdamParams::with_lr(cfg.lr.autoencoder),
            ),
            lossfn_decoder: AdamState::new(
                &bundle.lossfn_decoder.params(),
                AdamParams::with_lr(cfg.lr.autoencoder),
            ),
            generator: AdamState::new(
                &bundle.generator.params(),
                AdamParams::with_lr(cfg.lr.generator),
            ),
            supervisor: AdamState::new(
                &bundle.supervisor.params(),
                AdamParams::with_lr(cfg.lr.generator),
            ),
            latent_disc: AdamState::new(
                &bundle.latent_discriminator.params(),
                AdamParams::with_lr(cfg.lr.discriminator),
            ),
            feature_disc: AdamState::new(
                &bundle.feature_discriminator.params(),
                AdamParams::with_lr(cfg.lr.discriminator),
            ),
        };

        Ok(Self {
            cfg,
            dims,
            bundle,
            opt,
            rng,
            scaler,
            data: scaled,
            completed_phase: 0,
            epochs_done: 0,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn bundle(&self) -> &NetworkBundle {
        &self.bundle
    }

    pub fn scaler(&self) -> &ScalerParams {
        &self.scaler
    }

    pub fn scaled_data(&self) -> &SeriesBatch {
        &self.data
    }

    pub fn completed_phase(&self) -> u8 {
        self.completed_phase
    }

    fn require_phase(&self, phase: u8) -> Result<()> {
        if self.completed_phase + 1 != phase {
            return Err(Error::contract(format!(
                "phase {phase} requires phase {} to be complete (currently at {})",
                phase - 1,
                self.completed_phase
            )));
        }
        Ok(())
    }

    fn draw_x(&mut self) -> Result<SeriesBatch> {
        let n = self.data.samples();
        let batch = self.cfg.batch_size.min(n);
        let idx: Vec<usize> = (0..batch).map(|_| self.rng.below(n)).collect();
        self.data.select(&idx)
    }

    fn draw_noise(&mut self, count: usize) -> SeriesBatch {
        sample_noise(count, self.cfg.window, self.dims.noise_dim, &mut self.rng)
    }

    fn effective_gen_weights(&self) -> GeneratorLossWeights {
        let mut w = self.cfg.generator_weights;
        if !self.cfg.ablation.use_supervised_loss {
            w.supervised = 0.0;
        }
        if !self.cfg.ablation.use_feature_discriminator {
            w.adv_feature = 0.0;
        }
        if !self.cfg.ablation.use_ts_loss {
            w.ts = 0.0;
        }
        w
    }

    fn effective_ae_weights(&self) -> AutoencoderLossWeights {
        let mut w = self.cfg.autoencoder_weights;
        if !self.cfg.ablation.use_feature_discriminator {
            w.adversarial = 0.0;
        }
        w
    }

    /// Scaled-space synthetic samples from the current model.
    pub fn generate(&self, count: usize, rng: &mut Rng) -> Result<SeriesBatch> {
        generate_synthetic(&self.bundle, self.cfg.window, count, rng)
    }

    /// Phase 1: code-space autoencoder on reconstruction loss only.
    pub fn phase1_train_lossfn_autoencoder(&mut self) -> Result<Vec<f64>> {
        self.require_phase(1)?;
        let mut trace = Vec::with_capacity(self.cfg.epochs.lossfn_autoencoder);
        for _ in 0..self.cfg.epochs.lossfn_autoencoder {
            let x = self.draw_x()?;
            let steps = x.to_step_tensors();

            let mut g = Graph::new();
            let b_enc = self.bundle.lossfn_encoder.bind(&mut g, true);
            let b_dec = self.bundle.lossfn_decoder.bind(&mut g, true);
            let x_vars = constants(&mut g, &steps);
            let codes = self
                .bundle
                .lossfn_encoder
                .forward_bound(&mut g, &b_enc, &x_vars)?;
            let recon = self
                .bundle
                .lossfn_decoder
                .forward_bound(&mut g, &b_dec, &codes)?;
            let loss = reconstruction_loss(&mut g, &x_vars, &recon)?;
            ensure_finite("phase1", "reconstruction", g.value(loss).item())?;

            let value = apply_updates(
                &g,
                loss,
                &mut [
                    (
                        &mut self.bundle.lossfn_encoder,
                        &b_enc,
                        &mut self.opt.lossfn_encoder,
                    ),
                    (
                        &mut self.bundle.lossfn_decoder,
                        &b_dec,
                        &mut self.opt.lossfn_decoder,
                    ),
                ],
            )?;
            trace.push(value);
            self.epochs_done += 1;
        }
        self.completed_phase = 1;
        Ok(trace)
    }

    /// One feature-discriminator update against a single fake source.
    fn feature_disc_step_pair(&mut self, x: &SeriesBatch, fake: &[Tensor]) -> Result<f64> {
        let mut g = Graph::new();
        let b_d = self.bundle.feature_discriminator.bind(&mut g, true);
        let x_vars = constants(&mut g, &x.to_step_tensors());
        let fake_vars = constants(&mut g, fake);
        let y_real = self
            .bundle
            .feature_discriminator
            .forward_bound(&mut g, &b_d, &x_vars)?;
        let y_fake = self
            .bundle
            .feature_discriminator
            .forward_bound(&mut g, &b_d, &fake_vars)?;
        let loss = lsgan_discriminator_loss(&mut g, &y_real, &y_fake)?;
        ensure_finite("phase2", "feature discriminator", g.value(loss).item())?;
        apply_updates(
            &g,
            loss,
            &mut [(
                &mut self.bundle.feature_discriminator,
                &b_d,
                &mut self.opt.feature_disc,
            )],
        )
    }

    /// One latent-autoencoder update: reconstruction plus (optionally) the
    /// adversarial push of reconstructions toward "real".
    fn latent_ae_step(&mut self, x: &SeriesBatch, phase: &str) -> Result<(f64, f64)> {
        let w = self.effective_ae_weights();
        let use_adv = w.adversarial != 0.0;

        let mut g = Graph::new();
        let b_enc = self.bundle.latent_encoder.bind(&mut g, true);
        let b_dec = self.bundle.latent_decoder.bind(&mut g, true);
        let b_d = if use_adv {
            Some(self.bundle.feature_discriminator.bind(&mut g, false))
        } else {
            None
        };
        let x_vars = constants(&mut g, &x.to_step_tensors());
        let latent = self
            .bundle
            .latent_encoder
            .forward_bound(&mut g, &b_enc, &x_vars)?;
        let recon = self
            .bundle
            .latent_decoder
            .forward_bound(&mut g, &b_dec, &latent)?;
        let l_rec = reconstruction_loss(&mut g, &x_vars, &recon)?;
        ensure_finite(phase, "reconstruction", g.value(l_rec).item())?;

        let mut adv_value = 0.0;
        let mut terms = vec![(l_rec, w.reconstruction)];
        if let Some(b_d) = &b_d {
            let scores = self
                .bundle
                .feature_discriminator
                .forward_bound(&mut g, b_d, &recon)?;
            let l_adv = lsgan_generator_loss(&mut g, &scores)?;
            adv_value = g.value(l_adv).item();
            ensure_finite(phase, "autoencoder adversarial", adv_value)?;
            terms.push((l_adv, w.adversarial));
        }
        let loss = weighted_sum(&mut g, &terms)?;

        let rec_value = g.value(l_rec).item();
        apply_updates(
            &g,
            loss,
            &mut [
                (
                    &mut self.bundle.latent_encoder,
                    &b_enc,
                    &mut self.opt.latent_encoder,
                ),
                (
                    &mut self.bundle.latent_decoder,
                    &b_dec,
                    &mut self.opt.latent_decoder,
                ),
            ],
        )?;
        Ok((rec_value, adv_value))
    }

    /// Phase 2: latent autoencoder with discriminator feedback on
    /// reconstructions.
    pub fn phase2_train_latent_autoencoder(&mut self) -> Result<Phase2Trace> {
        self.require_phase(2)?;
        let use_fd = self.cfg.ablation.use_feature_discriminator;
        let mut trace = Phase2Trace::default();
        for _ in 0..self.cfg.epochs.latent_autoencoder {
            let x = self.draw_x()?;
            if use_fd {
                let latent = self
                    .bundle
                    .latent_encoder
                    .forward_eager(&x.to_step_tensors())?;
                let recon = self.bundle.latent_decoder.forward_eager(&latent)?;
                let d_loss = self.feature_disc_step_pair(&x, &recon)?;
                trace.discriminator.push(d_loss);
            }
            let (rec, adv) = self.latent_ae_step(&x, "phase2")?;
            trace.reconstruction.push(rec);
            trace.adversarial.push(adv);
            self.epochs_done += 1;
        }
        self.completed_phase = 2;
        Ok(trace)
    }

    /// Phase 3: supervisor on real embeddings, encoder frozen.
    pub fn phase3_train_supervisor(&mut self) -> Result<Vec<f64>> {
        self.require_phase(3)?;
        if self.cfg.window < 3 {
            return Err(Error::contract(
                "supervisor training needs a window of at least 3 timestamps",
            ));
        }
        let mut trace = Vec::with_capacity(self.cfg.epochs.supervisor);
        for _ in 0..self.cfg.epochs.supervisor {
            let x = self.draw_x()?;
            let latent = self
                .bundle
                .latent_encoder
                .forward_eager(&x.to_step_tensors())?;

            let mut g = Graph::new();
            let b_sup = self.bundle.supervisor.bind(&mut g, true);
            let h_vars = constants(&mut g, &latent);
            let predicted = self
                .bundle
                .supervisor
                .forward_bound(&mut g, &b_sup, &h_vars)?;
            let loss = supervised_loss(&mut g, &h_vars, &predicted)?;
            ensure_finite("phase3", "supervised", g.value(loss).item())?;
            let value = apply_updates(
                &g,
                loss,
                &mut [(
                    &mut self.bundle.supervisor,
                    &b_sup,
                    &mut self.opt.supervisor,
                )],
            )?;
            trace.push(value);
            self.epochs_done += 1;
        }
        self.completed_phase = 3;
        Ok(trace)
    }

    /// Forward of the generation path as plain tensors (no gradients):
    /// reconstruction, generator latent, decoded generator output, supervisor
    /// latent, final synthetic.
    fn fakes_eager(
        &self,
        x: &SeriesBatch,
        z: &SeriesBatch,
    ) -> Result<(Vec<Tensor>, Vec<Tensor>, Vec<Tensor>, Vec<Tensor>, Vec<Tensor>)> {
        let latent = self
            .bundle
            .latent_encoder
            .forward_eager(&x.to_step_tensors())?;
        let x_rec = self.bundle.latent_decoder.forward_eager(&latent)?;
        let h_gen = self.bundle.generator.forward_eager(&z.to_step_tensors())?;
        let x_gen = self.bundle.latent_decoder.forward_eager(&h_gen)?;
        let h_sup = self.bundle.supervisor.forward_eager(&h_gen)?;
        let x_syn = self.bundle.latent_decoder.forward_eager(&h_sup)?;
        let _ = &latent;
        Ok((x_rec, h_gen, x_gen, h_sup, x_syn))
    }

    /// Phase-4 feature-discriminator step: real = data and reconstructions,
    /// fake = decoded generator and supervisor outputs, each pair averaged
    /// with equal weight.
    fn feature_disc_step_joint(&mut self, x: &SeriesBatch, z: &SeriesBatch) -> Result<f64> {
        let (x_rec, _, x_gen, _, x_syn) = self.fakes_eager(x, z)?;

        let mut g = Graph::new();
        let b_d = self.bundle.feature_discriminator.bind(&mut g, true);
        let x_vars = constants(&mut g, &x.to_step_tensors());
        let rec_vars = constants(&mut g, &x_rec);
        let gen_vars = constants(&mut g, &x_gen);
        let syn_vars = constants(&mut g, &x_syn);
        let d = &self.bundle.feature_discriminator;
        let y_x = d.forward_bound(&mut g, &b_d, &x_vars)?;
        let y_rec = d.forward_bound(&mut g, &b_d, &rec_vars)?;
        let y_gen = d.forward_bound(&mut g, &b_d, &gen_vars)?;
        let y_syn = d.forward_bound(&mut g, &b_d, &syn_vars)?;
        let pair_a = lsgan_discriminator_loss(&mut g, &y_x, &y_gen)?;
        let pair_b = lsgan_discriminator_loss(&mut g, &y_rec, &y_syn)?;
        let sum = g.add(pair_a, pair_b)?;
        let loss = g.scale(sum, 0.5)?;
        ensure_finite("phase4", "feature discriminator", g.value(loss).item())?;
        apply_updates(
            &g,
            loss,
            &mut [(
                &mut self.bundle.feature_discriminator,
                &b_d,
                &mut self.opt.feature_disc,
            )],
        )
    }

    /// Phase-4 latent-discriminator step: real = encoder outputs, fake =
    /// generator and supervisor latents averaged with equal weight.
    fn latent_disc_step(&mut self, x: &SeriesBatch, z: &SeriesBatch) -> Result<f64> {
        let h_real = self
            .bundle
            .latent_encoder
            .forward_eager(&x.to_step_tensors())?;
        let h_gen = self.bundle.generator.forward_eager(&z.to_step_tensors())?;
        let h_sup = self.bundle.supervisor.forward_eager(&h_gen)?;

        let mut g = Graph::new();
        let b_dh = self.bundle.latent_discriminator.bind(&mut g, true);
        let real_vars = constants(&mut g, &h_real);
        let gen_vars = constants(&mut g, &h_gen);
        let sup_vars = constants(&mut g, &h_sup);
        let dh = &self.bundle.latent_discriminator;
        let y_real = dh.forward_bound(&mut g, &b_dh, &real_vars)?;
        let y_gen = dh.forward_bound(&mut g, &b_dh, &gen_vars)?;
        let y_sup = dh.forward_bound(&mut g, &b_dh, &sup_vars)?;
        let pair_a = lsgan_discriminator_loss(&mut g, &y_real, &y_gen)?;
        let pair_b = lsgan_discriminator_loss(&mut g, &y_real, &y_sup)?;
        let sum = g.add(pair_a, pair_b)?;
        let loss = g.scale(sum, 0.5)?;
        ensure_finite("phase4", "latent discriminator", g.value(loss).item())?;
        apply_updates(
            &g,
            loss,
            &mut [(
                &mut self.bundle.latent_discriminator,
                &b_dh,
                &mut self.opt.latent_disc,
            )],
        )
    }

    /// Phase-4 combined generator + supervisor update.
    fn generator_step(&mut self, x: &SeriesBatch, z: &SeriesBatch) -> Result<f64> {
        let w = self.effective_gen_weights();
        let use_fd = w.adv_feature != 0.0;
        let use_ts = w.ts != 0.0;
        let use_sup = w.supervised != 0.0;

        let mut g = Graph::new();
        let b_gen = self.bundle.generator.bind(&mut g, true);
        let b_sup = self.bundle.supervisor.bind(&mut g, true);
        let b_dec = self.bundle.latent_decoder.bind(&mut g, false);
        let b_dh = self.bundle.latent_discriminator.bind(&mut g, false);
        let b_d = use_fd.then(|| self.bundle.feature_discriminator.bind(&mut g, false));
        let b_code = use_ts.then(|| self.bundle.lossfn_encoder.bind(&mut g, false));

        let z_vars = constants(&mut g, &z.to_step_tensors());
        let x_vars = constants(&mut g, &x.to_step_tensors());
        let h_gen = self
            .bundle
            .generator
            .forward_bound(&mut g, &b_gen, &z_vars)?;
        let h_sup = self
            .bundle
            .supervisor
            .forward_bound(&mut g, &b_sup, &h_gen)?;
        let x_gen = self
            .bundle
            .latent_decoder
            .forward_bound(&mut g, &b_dec, &h_gen)?;
        let x_syn = self
            .bundle
            .latent_decoder
            .forward_bound(&mut g, &b_dec, &h_sup)?;

        let mut named: Vec<(&str, Var, f64)> = Vec::new();

        let dh = &self.bundle.latent_discriminator;
        let y_gen = dh.forward_bound(&mut g, &b_dh, &h_gen)?;
        let y_sup = dh.forward_bound(&mut g, &b_dh, &h_sup)?;
        let adv_a = lsgan_generator_loss(&mut g, &y_gen)?;
        let adv_b = lsgan_generator_loss(&mut g, &y_sup)?;
        let s = g.add(adv_a, adv_b)?;
        let adv_latent = g.scale(s, 0.5)?;
        named.push(("adversarial latent", adv_latent, w.adv_latent));

        if let Some(b_d) = &b_d {
            let d = &self.bundle.feature_discriminator;
            let y_gen = d.forward_bound(&mut g, b_d, &x_gen)?;
            let y_syn = d.forward_bound(&mut g, b_d, &x_syn)?;
            let adv_a = lsgan_generator_loss(&mut g, &y_gen)?;
            let adv_b = lsgan_generator_loss(&mut g, &y_syn)?;
            let s = g.add(adv_a, adv_b)?;
            let adv_feature = g.scale(s, 0.5)?;
            named.push(("adversarial feature", adv_feature, w.adv_feature));
        }

        if use_sup {
            let h_real = self
                .bundle
                .latent_encoder
                .forward_eager(&x.to_step_tensors())?;
            let h_vars = constants(&mut g, &h_real);
            let predicted = self
                .bundle
                .supervisor
                .forward_bound(&mut g, &b_sup, &h_vars)?;
            let sup = supervised_loss(&mut g, &h_vars, &predicted)?;
            named.push(("supervised", sup, w.supervised));
        }

        let moment = moment_loss(&mut g, &x_vars, &x_syn)?;
        named.push(("moment", moment, w.moment));

        if let Some(b_code) = &b_code {
            let enc = &self.bundle.lossfn_encoder;
            let codes_real = enc.forward_eager(&x.to_step_tensors())?;
            let real_vars = constants(&mut g, &codes_real);
            let codes_syn = enc.forward_bound(&mut g, b_code, &x_syn)?;
            let ts = ts_feature_loss(&mut g, &real_vars, &codes_syn)?;
            named.push(("code moment", ts, w.ts));
        }

        for (name, var, weight) in &named {
            if *weight != 0.0 {
                ensure_finite("phase4", name, g.value(*var).item())?;
            }
        }
        let terms: Vec<(Var, f64)> = named.iter().map(|&(_, v, w)| (v, w)).collect();
        let loss = weighted_sum(&mut g, &terms)?;
        apply_updates(
            &g,
            loss,
            &mut [
                (&mut self.bundle.generator, &b_gen, &mut self.opt.generator),
                (&mut self.bundle.supervisor, &b_sup, &mut self.opt.supervisor),
            ],
        )
    }

    fn early_stop_evaluate(&self, epoch: usize, es: &mut EarlyStopState) -> Result<()> {
        let n_eval = self.cfg.early_stop.eval_samples.min(self.data.samples());
        let real_eval = self.data.head(n_eval)?;
        // evaluation noise is derived, not drawn from the training stream
        let mut noise_rng = Rng::derive(self.cfg.seed, 0xE5A1_0000 ^ epoch as u64);
        let synthetic = self.generate(n_eval, &mut noise_rng)?;

        let mut scorer_rng = Rng::derive(self.cfg.seed, 0xD15C);
        let dis = discriminative_score(
            &real_eval,
            &synthetic,
            &self.cfg.early_stop.budget,
            &mut scorer_rng,
        )?;

        let enc = &self.bundle.lossfn_encoder;
        let real_codes = SeriesBatch::from_step_tensors(
            &enc.forward_eager(&real_eval.to_step_tensors())?,
            true,
        )?;
        let syn_codes = SeriesBatch::from_step_tensors(
            &enc.forward_eager(&synthetic.to_step_tensors())?,
            true,
        )?;
        let (mse_mean, mse_std) = code_moment_gaps(&real_codes, &syn_codes);

        let save = es.update(epoch, dis, mse_mean, mse_std);
        if save {
            es.best_synthetic = Some(synthetic);
            es.best_params = Some(self.bundle.clone());
        }
        Ok(())
    }

    /// Phase 4: the joint adversarial loop with early stopping.
    pub fn phase4_joint_train(&mut self) -> Result<TrainOutcome> {
        self.require_phase(4)?;
        let epochs = self.cfg.epochs.joint;
        let use_fd = self.cfg.ablation.use_feature_discriminator;
        let use_es = self.cfg.ablation.use_early_stopping;
        let start_epoch =
            ((self.cfg.early_stop.start_fraction * epochs as f64).floor() as usize).max(1);
        let check = self.cfg.early_stop.check_interval;

        let mut es = EarlyStopState::new();
        let mut trace = Vec::with_capacity(epochs);

        for epoch in 1..=epochs {
            let mut feature_disc = None;
            let mut latent_disc = 0.0;
            for _ in 0..self.cfg.disc_steps_per_gen {
                let x = self.draw_x()?;
                let z = self.draw_noise(x.samples());
                if use_fd {
                    feature_disc = Some(self.feature_disc_step_joint(&x, &z)?);
                }
                latent_disc = self.latent_disc_step(&x, &z)?;
            }
            let x = self.draw_x()?;
            let z = self.draw_noise(x.samples());
            let generator = self.generator_step(&x, &z)?;
            let (autoencoder, _) = self.latent_ae_step(&x, "phase4")?;

            trace.push(Phase4Record {
                epoch,
                feature_disc,
                latent_disc,
                generator,
                autoencoder,
            });
            self.epochs_done += 1;

            if use_es && epoch >= start_epoch && epoch % check == 0 {
                self.early_stop_evaluate(epoch, &mut es)?;
            }
        }

        // keep the best scoring snapshot, or the final state without early
        // stopping
        let best_synthetic = match (&es.best_params, &es.best_synthetic) {
            (Some(params), Some(synthetic)) if use_es => {
                self.bundle = params.clone();
                synthetic.clone()
            }
            _ => {
                let mut rng = Rng::derive(self.cfg.seed, 0xF1AA_0001);
                let n_eval = self.cfg.early_stop.eval_samples.min(self.data.samples());
                self.generate(n_eval, &mut rng)?
            }
        };

        self.completed_phase = 4;
        Ok(TrainOutcome {
            checkpoint: self.checkpoint(),
            best_synthetic,
            degenerate_warning: es.degenerate_warning,
            es_log: es.log,
            trace,
        })
    }

    /// Runs all four phases in order.
    pub fn run_all(&mut self) -> Result<TrainOutcome> {
        self.phase1_train_lossfn_autoencoder()?;
        self.phase2_train_latent_autoencoder()?;
        self.phase3_train_supervisor()?;
        self.phase4_joint_train()
    }

    /// Snapshot of the complete training state.
    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            config: self.cfg.clone(),
            scaler: self.scaler.clone(),
            phase: self.completed_phase,
            epoch: self.epochs_done,
            feature_dim: self.data.features(),
            rng_seed: self.rng.seed(),
            rng_word_pos: self.rng.word_pos(),
            arrays: self
                .bundle
                .named_params()
                .into_iter()
                .map(|(n, t)| (n, t.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_sines, SineConfig};

    fn tiny_sines(n: usize, t: usize, f: usize, seed: u64) -> SeriesBatch {
        generate_sines(&SineConfig {
            dims: f,
            t,
            n,
            freq_range: (0.0, 1.0),
            phase_range: (-std::f64::consts::PI, std::f64::consts::PI),
            seed,
        })
        .unwrap()
    }

    fn tiny_config(seed: u64) -> TrainConfig {
        let mut cfg = TrainConfig {
            seed,
            window: 8,
            batch_size: 8,
            hidden_dim: 6,
            num_layers: 1,
            latent_dim: Some(2),
            time_stride: 2,
            ..Default::default()
        };
        cfg.epochs = crate::training::PhaseEpochs {
            lossfn_autoencoder: 30,
            latent_autoencoder: 30,
            supervisor: 30,
            joint: 20,
        };
        cfg.early_stop.check_interval = 10;
        cfg.early_stop.eval_samples = 16;
        cfg.early_stop.budget = crate::eval::ScorerBudget {
            steps: 10,
            batch_size: 8,
            hidden: Some(4),
            lr: 5e-3,
        };
        cfg
    }

    #[test]
    fn phases_enforce_ordering() {
        let data = tiny_sines(16, 8, 2, 1);
        let mut t = Trainer::new(&data, tiny_config(1)).unwrap();
        assert!(t.phase2_train_latent_autoencoder().is_err());
        assert!(t.phase3_train_supervisor().is_err());
        assert!(t.phase4_joint_train().is_err());
        t.phase1_train_lossfn_autoencoder().unwrap();
        assert!(t.phase1_train_lossfn_autoencoder().is_err());
        assert!(t.phase3_train_supervisor().is_err());
        t.phase2_train_latent_autoencoder().unwrap();
        t.phase3_train_supervisor().unwrap();
        t.phase4_joint_train().unwrap();
    }

    #[test]
    fn zero_learning_rate_keeps_parameters_fixed() {
        let data = tiny_sines(16, 8, 2, 2);
        let mut cfg = tiny_config(2);
        cfg.lr.autoencoder = 0.0;
        cfg.epochs.lossfn_autoencoder = 3;
        let mut t = Trainer::new(&data, cfg).unwrap();
        let before = t.bundle().lossfn_encoder.clone();
        let trace = t.phase1_train_lossfn_autoencoder().unwrap();
        assert_eq!(t.bundle().lossfn_encoder, before);
        // loss trace is flat except for minibatch noise; check first == any
        // repeated batch is unnecessary, just check values are finite
        assert!(trace.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn same_seed_reproduces_traces() {
        let data = tiny_sines(16, 8, 2, 3);
        let run = || {
            let mut t = Trainer::new(&data, tiny_config(3)).unwrap();
            let p1 = t.phase1_train_lossfn_autoencoder().unwrap();
            let p2 = t.phase2_train_latent_autoencoder().unwrap();
            let p3 = t.phase3_train_supervisor().unwrap();
            let out = t.phase4_joint_train().unwrap();
            (p1, p2.reconstruction, p3, out.es_log)
        };
        let (a1, a2, a3, a4) = run();
        let (b1, b2, b3, b4) = run();
        assert_eq!(a1, b1);
        assert_eq!(a2, b2);
        assert_eq!(a3, b3);
        assert_eq!(a4, b4);
    }

    #[test]
    fn code_autoencoder_is_frozen_after_phase1() {
        let data = tiny_sines(16, 8, 2, 4);
        let mut t = Trainer::new(&data, tiny_config(4)).unwrap();
        t.phase1_train_lossfn_autoencoder().unwrap();
        let enc = t.bundle().lossfn_encoder.clone();
        let dec = t.bundle().lossfn_decoder.clone();
        t.phase2_train_latent_autoencoder().unwrap();
        t.phase3_train_supervisor().unwrap();
        t.phase4_joint_train().unwrap();
        assert_eq!(t.bundle().lossfn_encoder, enc);
        assert_eq!(t.bundle().lossfn_decoder, dec);
    }

    #[test]
    fn supervisor_learns_constant_sequences() {
        // constant-in-time data: every latent trajectory is constant, so
        // two-step-ahead prediction can reach almost zero loss
        let mut data = SeriesBatch::zeros(12, 8, 2, false);
        let mut rng = Rng::from_seed(5);
        for s in 0..12 {
            for k in 0..2 {
                let v = rng.uniform_range(-1.0, 1.0);
                for t in 0..8 {
                    data.set(s, t, k, v);
                }
            }
        }
        let mut cfg = tiny_config(5);
        cfg.epochs.supervisor = 900;
        let mut t = Trainer::new(&data, cfg).unwrap();
        t.phase1_train_lossfn_autoencoder().unwrap();
        t.phase2_train_latent_autoencoder().unwrap();
        let trace = t.phase3_train_supervisor().unwrap();
        let last = *trace.last().unwrap();
        assert!(last < 1e-3, "supervised loss stayed at {last}");
    }

    #[test]
    fn supervisor_loss_trends_downward() {
        let data = tiny_sines(16, 8, 2, 6);
        let mut cfg = tiny_config(6);
        cfg.epochs.supervisor = 120;
        let mut t = Trainer::new(&data, cfg).unwrap();
        t.phase1_train_lossfn_autoencoder().unwrap();
        t.phase2_train_latent_autoencoder().unwrap();
        let trace = t.phase3_train_supervisor().unwrap();
        let head: f64 = trace[..20].iter().sum::<f64>() / 20.0;
        let tail: f64 = trace[trace.len() - 20..].iter().sum::<f64>() / 20.0;
        assert!(tail <= head, "supervised loss rose: {head} -> {tail}");
    }

    #[test]
    fn ablated_run_reduces_to_latent_only_gan() {
        let data = tiny_sines(16, 8, 2, 7);
        let mut cfg = tiny_config(7);
        cfg.ablation = crate::training::AblationFlags {
            use_supervised_loss: false,
            use_feature_discriminator: false,
            use_ts_loss: false,
            use_early_stopping: false,
        };
        let mut t = Trainer::new(&data, cfg).unwrap();
        t.phase1_train_lossfn_autoencoder().unwrap();
        let p2 = t.phase2_train_latent_autoencoder().unwrap();
        assert!(p2.discriminator.is_empty());
        assert!(p2.adversarial.iter().all(|&v| v == 0.0));
        t.phase3_train_supervisor().unwrap();
        let out = t.phase4_joint_train().unwrap();
        assert!(out.es_log.is_empty());
        assert!(out.trace.iter().all(|r| r.feature_disc.is_none()));
    }

    #[test]
    fn early_stopping_keeps_best_scoring_model() {
        let data = tiny_sines(24, 8, 2, 8);
        let mut cfg = tiny_config(8);
        cfg.epochs.joint = 30;
        cfg.early_stop.check_interval = 5;
        cfg.early_stop.start_fraction = 0.5;
        let mut t = Trainer::new(&data, cfg).unwrap();
        t.phase1_train_lossfn_autoencoder().unwrap();
        t.phase2_train_latent_autoencoder().unwrap();
        t.phase3_train_supervisor().unwrap();
        let out = t.phase4_joint_train().unwrap();

        assert!(!out.es_log.is_empty());
        // p1 constant across the log
        let p1 = out.es_log[0].p1;
        assert!(out.es_log.iter().all(|r| r.p1 == p1));
        // the minimum logged score was saved, and is <= the final logged one
        let best = out
            .es_log
            .iter()
            .map(|r| r.score)
            .fold(f64::INFINITY, f64::min);
        let saved_total = out
            .es_log
            .iter()
            .filter(|r| r.saved)
            .map(|r| r.score)
            .fold(f64::INFINITY, f64::min);
        assert!((best - saved_total).abs() < 1e-15);
        assert!(best <= out.es_log.last().unwrap().score);
    }

    #[test]
    fn disabled_early_stopping_returns_final_state() {
        let data = tiny_sines(24, 8, 2, 9);
        let mut cfg = tiny_config(9);
        cfg.epochs.joint = 12;
        cfg.early_stop.check_interval = 4;

        // run once with early stopping on
        let mut with_es = Trainer::new(&data, cfg.clone()).unwrap();
        with_es.phase1_train_lossfn_autoencoder().unwrap();
        with_es.phase2_train_latent_autoencoder().unwrap();
        with_es.phase3_train_supervisor().unwrap();
        let out_es = with_es.phase4_joint_train().unwrap();
        assert!(!out_es.es_log.is_empty());

        // and once with it off: the parameter trajectory must be identical,
        // and the returned checkpoint is the final-epoch state
        cfg.ablation.use_early_stopping = false;
        let mut without = Trainer::new(&data, cfg).unwrap();
        without.phase1_train_lossfn_autoencoder().unwrap();
        without.phase2_train_latent_autoencoder().unwrap();
        without.phase3_train_supervisor().unwrap();
        let out_plain = without.phase4_joint_train().unwrap();
        assert!(out_plain.es_log.is_empty());

        // compare final-epoch parameters: the ES run restored its best
        // snapshot, so compare against the non-ES run via a fresh trainer
        // that also ran with ES but inspects the trajectory end through the
        // trace (loss values must match exactly)
        for (a, b) in out_es.trace.iter().zip(&out_plain.trace) {
            assert_eq!(a.generator.to_bits(), b.generator.to_bits());
            assert_eq!(a.autoencoder.to_bits(), b.autoencoder.to_bits());
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let data = tiny_sines(16, 8, 2, 10);
        let mut t = Trainer::new(&data, tiny_config(10)).unwrap();
        t.phase1_train_lossfn_autoencoder().unwrap();
        t.phase2_train_latent_autoencoder().unwrap();
        t.phase3_train_supervisor().unwrap();
        t.phase4_joint_train().unwrap();
        let a = t.generate(5, &mut Rng::from_seed(77)).unwrap();
        let b = t.generate(5, &mut Rng::from_seed(77)).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.values().iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn checkpoint_round_trips_through_disk_and_regenerates() {
        let data = tiny_sines(16, 8, 2, 11);
        let mut t = Trainer::new(&data, tiny_config(11)).unwrap();
        t.phase1_train_lossfn_autoencoder().unwrap();
        t.phase2_train_latent_autoencoder().unwrap();
        t.phase3_train_supervisor().unwrap();
        let out = t.phase4_joint_train().unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ckpt");
        out.checkpoint.save(&path).unwrap();
        let loaded = Checkpoint::load(&path).unwrap();
        assert_eq!(loaded, out.checkpoint);

        let bundle = loaded.restore_bundle().unwrap();
        let direct = generate_synthetic(t.bundle(), 8, 4, &mut Rng::from_seed(5)).unwrap();
        let restored = generate_synthetic(&bundle, 8, 4, &mut Rng::from_seed(5)).unwrap();
        assert_eq!(direct.values(), restored.values());
    }

    #[test]
    fn scaled_input_is_rejected() {
        let mut data = tiny_sines(16, 8, 2, 12);
        data.set_scaled(true);
        assert!(Trainer::new(&data, tiny_config(12)).is_err());
    }
}
