//! Phase 1/2 convergence sweep: reconstruction losses must fall below 20%
//! of their initial value within 2000 steps.

use seriesforge::data::{generate_sines, SineConfig};
use seriesforge::training::{PhaseEpochs, TrainConfig, Trainer};

fn main() {
    let data = generate_sines(&SineConfig {
        dims: 5,
        t: 24,
        n: 500,
        freq_range: (0.0, 1.0),
        phase_range: (-std::f64::consts::PI, std::f64::consts::PI),
        seed: 42,
    })
    .unwrap();

    for (hidden, layers, lr, batch, code_dim) in [
        (12usize, 2usize, 3e-3, 64usize, 10usize),
        (16, 2, 3e-3, 64, 10),
        (16, 2, 3e-3, 32, 10),
        (24, 2, 3e-3, 64, 10),
        (16, 2, 5e-3, 64, 10),
        (16, 3, 3e-3, 64, 10),
    ] {
        let mut cfg = TrainConfig {
            seed: 1,
            window: 24,
            batch_size: batch,
            hidden_dim: hidden,
            num_layers: layers,
            latent_dim: Some(5),
            code_dim: Some(code_dim),
            time_stride: 2,
            ..Default::default()
        };
        cfg.epochs = PhaseEpochs {
            lossfn_autoencoder: 2000,
            latent_autoencoder: 2000,
            supervisor: 1,
            joint: 1,
        };
        cfg.lr.autoencoder = lr;

        let start = std::time::Instant::now();
        let mut t = Trainer::new(&data, cfg).unwrap();
        let p1 = t.phase1_train_lossfn_autoencoder().unwrap();
        let p2 = t.phase2_train_latent_autoencoder().unwrap();
        let head = |v: &[f64]| v[..10].iter().sum::<f64>() / 10.0;
        let tail = |v: &[f64]| v[v.len() - 10..].iter().sum::<f64>() / 10.0;
        let r1 = tail(&p1) / head(&p1);
        let r2 = tail(&p2.reconstruction) / head(&p2.reconstruction);
        println!(
            "hidden {hidden:2} layers {layers} lr {lr:.0e} batch {batch:2} code {code_dim:2} | p1 {:.2} -> {:.2} ({:.0}%) | p2 {:.2} -> {:.2} ({:.0}%) | {:?}",
            head(&p1), tail(&p1), 100.0 * r1,
            head(&p2.reconstruction), tail(&p2.reconstruction), 100.0 * r2,
            start.elapsed()
        );
    }
}
