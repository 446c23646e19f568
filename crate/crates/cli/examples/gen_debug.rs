//! Dumps distribution statistics of real, reconstructed, and synthetic
//! batches after a short desk run, to see what the classifier keys on.

use seriesforge::data::SeriesBatch;
use seriesforge::data::{generate_sines, SineConfig};
use seriesforge::eval::ScorerBudget;
use seriesforge::numkit::Rng;
use seriesforge::training::{PhaseEpochs, TrainConfig, Trainer};

fn stats(name: &str, b: &SeriesBatch) {
    let n = b.samples();
    let t = b.timestamps();
    let f = b.features();
    let total = b.values().len() as f64;
    let mean: f64 = b.values().iter().sum::<f64>() / total;
    let var: f64 = b.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / total;

    // per-sample temporal std and lag-1 autocorrelation, averaged
    let mut t_std = 0.0;
    let mut lag1 = 0.0;
    for s in 0..n {
        for k in 0..f {
            let series: Vec<f64> = (0..t).map(|j| b.get(s, j, k)).collect();
            let m = series.iter().sum::<f64>() / t as f64;
            let v = series.iter().map(|x| (x - m).powi(2)).sum::<f64>() / t as f64;
            t_std += v.sqrt();
            if v > 1e-12 {
                let cov: f64 = (1..t)
                    .map(|j| (series[j] - m) * (series[j - 1] - m))
                    .sum::<f64>()
                    / (t - 1) as f64;
                lag1 += cov / v;
            }
        }
    }
    t_std /= (n * f) as f64;
    lag1 /= (n * f) as f64;

    // mean absolute step-to-step jump
    let mut jump = 0.0;
    for s in 0..n {
        for k in 0..f {
            for j in 1..t {
                jump += (b.get(s, j, k) - b.get(s, j - 1, k)).abs();
            }
        }
    }
    jump /= (n * f * (t - 1)) as f64;

    println!(
        "{name:10} mean {mean:.4} std {:.4} | per-sample t-std {t_std:.4} lag1 {lag1:+.4} jump {jump:.4}",
        var.sqrt()
    );
}

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

    let mut cfg = TrainConfig {
        seed: 1,
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
        supervisor: 800,
        joint: 1200,
    };
    cfg.lr.autoencoder = 5e-3;
    cfg.early_stop.check_interval = 400;
    cfg.early_stop.eval_samples = 500;
    cfg.early_stop.budget = ScorerBudget {
        steps: 200,
        batch_size: 32,
        hidden: Some(8),
        lr: 5e-3,
    };

    let mut trainer = Trainer::new(&data, cfg).unwrap();
    trainer.phase1_train_lossfn_autoencoder().unwrap();
    trainer.phase2_train_latent_autoencoder().unwrap();
    trainer.phase3_train_supervisor().unwrap();
    let out = trainer.phase4_joint_train().unwrap();
    for r in &out.es_log {
        println!(
            "eval epoch {:4}: dis {:.4} score {:.4} saved {}",
            r.epoch, r.dis_score, r.score, r.saved
        );
    }

    let scaled = trainer.scaled_data().clone();
    stats("real", &scaled);

    // reconstruction of real data
    let latent = trainer
        .bundle()
        .latent_encoder
        .forward_eager(&scaled.to_step_tensors())
        .unwrap();
    let recon = trainer
        .bundle()
        .latent_decoder
        .forward_eager(&latent)
        .unwrap();
    let recon = SeriesBatch::from_step_tensors(&recon, true).unwrap();
    stats("recon", &recon);

    let synthetic = trainer.generate(500, &mut Rng::from_seed(123)).unwrap();
    stats("synthetic", &synthetic);

    // latent-space statistics
    let h_real = SeriesBatch::from_step_tensors(&latent, true).unwrap();
    stats("h real", &h_real);
    let z = seriesforge::data::sample_noise(500, 24, 5, &mut Rng::from_seed(5));
    let h_gen = trainer
        .bundle()
        .generator
        .forward_eager(&z.to_step_tensors())
        .unwrap();
    let h_gen_b = SeriesBatch::from_step_tensors(&h_gen, true).unwrap();
    stats("h gen", &h_gen_b);
    let h_sup = trainer
        .bundle()
        .supervisor
        .forward_eager(&h_gen)
        .unwrap();
    let h_sup_b = SeriesBatch::from_step_tensors(&h_sup, true).unwrap();
    stats("h sup", &h_sup_b);

    // one sample, feature 0, for eyeballing
    let show = |name: &str, b: &SeriesBatch| {
        let row: Vec<String> = (0..24).map(|j| format!("{:.2}", b.get(0, j, 0))).collect();
        println!("{name:10} {}", row.join(" "));
    };
    show("real", &scaled);
    show("recon", &recon);
    show("synthetic", &synthetic);
}
