//! Scratch harness for sizing desk-scale runs: times each phase and prints
//! the post-hoc scores of the trained model against an untrained baseline.
//!
//! Usage: cargo run -p seriesforge-cli --example desk_tune --release -- [seed]

use std::time::Instant;

use seriesforge::data::{generate_sines, scaler_apply, scaler_fit, SineConfig};
use seriesforge::eval::{discriminative_score, predictive_score, ScorerBudget};
use seriesforge::nets::NetworkBundle;
use seriesforge::numkit::Rng;
use seriesforge::training::{generate_synthetic, PhaseEpochs, TrainConfig, Trainer};

fn main() {
    let seed: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);

    let data = generate_sines(&SineConfig {
        dims: 5,
        t: 24,
        n: 500,
        freq_range: (0.0, 1.0),
        phase_range: (-std::f64::consts::PI, std::f64::consts::PI),
        seed: 42,
    })
    .unwrap();

    let mut cfg = TrainConfig {
        seed,
        window: 24,
        batch_size: 32,
        hidden_dim: 16,
        num_layers: 2,
        latent_dim: Some(5),
        code_dim: Some(10),
        time_stride: 2,
        ..Default::default()
    };
    cfg.epochs = PhaseEpochs {
        lossfn_autoencoder: 1500,
        latent_autoencoder: 2000,
        supervisor: 600,
        joint: 4000,
    };
    cfg.early_stop.check_interval = 250;
    cfg.lr.autoencoder = 5e-3;
    cfg.early_stop.eval_samples = 500;
    cfg.early_stop.budget = ScorerBudget {
        steps: 200,
        batch_size: 32,
        hidden: Some(8),
        lr: 5e-3,
    };

    let mut trainer = Trainer::new(&data, cfg.clone()).unwrap();

    let t0 = Instant::now();
    let p1 = trainer.phase1_train_lossfn_autoencoder().unwrap();
    println!(
        "phase1: {:?}  loss {:.4} -> {:.4}",
        t0.elapsed(),
        p1[0],
        p1[p1.len() - 1]
    );

    let t0 = Instant::now();
    let p2 = trainer.phase2_train_latent_autoencoder().unwrap();
    println!(
        "phase2: {:?}  recon {:.4} -> {:.4}",
        t0.elapsed(),
        p2.reconstruction[0],
        p2.reconstruction[p2.reconstruction.len() - 1]
    );

    let t0 = Instant::now();
    let p3 = trainer.phase3_train_supervisor().unwrap();
    println!(
        "phase3: {:?}  sup {:.6} -> {:.6}",
        t0.elapsed(),
        p3[0],
        p3[p3.len() - 1]
    );

    let t0 = Instant::now();
    let out = trainer.phase4_joint_train().unwrap();
    println!("phase4: {:?}", t0.elapsed());
    for r in &out.es_log {
        println!(
            "  eval epoch {:4}: dis {:.4} mseMean {:.6} mseSTD {:.6} score {:.4} saved {}",
            r.epoch, r.dis_score, r.mse_mean, r.mse_std, r.score, r.saved
        );
    }

    // score the saved model with the full-budget scorer
    let scaled = scaler_apply(&data, &scaler_fit(&data)).unwrap();
    let budget = ScorerBudget {
        steps: 800,
        batch_size: 64,
        hidden: Some(16),
        lr: 1e-3,
    };
    let t0 = Instant::now();
    let synthetic = out.best_synthetic.clone();
    let dis = discriminative_score(&scaled, &synthetic, &budget, &mut Rng::derive(seed, 0xACC)).unwrap();
    let pred = predictive_score(&scaled, &synthetic, &budget, &mut Rng::derive(seed, 0xACD)).unwrap();
    let pred_real =
        predictive_score(&scaled, &scaled, &budget, &mut Rng::derive(seed, 0xACD)).unwrap();
    println!(
        "scores (in {:?}): dis {:.4}  pred {:.4}  pred-on-real {:.4}",
        t0.elapsed(),
        dis,
        pred,
        pred_real
    );

    // untrained baseline
    let dims = cfg.dims_for(5);
    let mut rng = Rng::derive(seed, 0xBA5E);
    let untrained = NetworkBundle::init(&dims, &mut rng).unwrap();
    let fake = generate_synthetic(&untrained, 24, 500, &mut rng).unwrap();
    let dis_untrained =
        discriminative_score(&scaled, &fake, &budget, &mut Rng::derive(seed, 0xACC)).unwrap();
    println!("untrained baseline dis: {dis_untrained:.4}");
}
