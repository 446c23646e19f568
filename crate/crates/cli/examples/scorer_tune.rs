//! Scorer reliability sweep: a usable budget must separate sines from an
//! untrained generator's output (score near 0.5) while scoring two halves of
//! the same sine set near 0.

use seriesforge::data::{generate_sines, scaler_apply, scaler_fit, SineConfig};
use seriesforge::eval::{discriminative_score, ScorerBudget};
use seriesforge::nets::NetworkBundle;
use seriesforge::numkit::Rng;
use seriesforge::training::{generate_synthetic, TrainConfig};

fn main() {
    let data = generate_sines(&SineConfig {
        dims: 5,
        t: 24,
        n: 1000,
        freq_range: (0.0, 1.0),
        phase_range: (-std::f64::consts::PI, std::f64::consts::PI),
        seed: 42,
    })
    .unwrap();
    let scaled = scaler_apply(&data, &scaler_fit(&data)).unwrap();
    let half_a = scaled.select(&(0..500).collect::<Vec<_>>()).unwrap();
    let half_b = scaled.select(&(500..1000).collect::<Vec<_>>()).unwrap();

    let cfg = TrainConfig {
        hidden_dim: 12,
        num_layers: 2,
        latent_dim: Some(5),
        code_dim: Some(10),
        ..Default::default()
    };
    let dims = cfg.dims_for(5);

    for (steps, hidden, lr, batch) in [
        (200usize, 8usize, 5e-3, 32usize),
        (200, 16, 5e-3, 64),
        (200, 16, 2e-3, 64),
        (400, 16, 2e-3, 64),
        (800, 16, 1e-3, 64),
        (800, 30, 1e-3, 64),
        (400, 30, 2e-3, 64),
    ] {
        let budget = ScorerBudget {
            steps,
            batch_size: batch,
            hidden: Some(hidden),
            lr,
        };
        let mut same = Vec::new();
        let mut sep = Vec::new();
        for seed in 0..5u64 {
            let mut rng = Rng::derive(seed, 0xBA5E);
            let untrained = NetworkBundle::init(&dims, &mut rng).unwrap();
            let fake = generate_synthetic(&untrained, 24, 500, &mut rng).unwrap();
            same.push(
                discriminative_score(&half_a, &half_b, &budget, &mut Rng::derive(seed, 1))
                    .unwrap(),
            );
            sep.push(
                discriminative_score(&half_a, &fake, &budget, &mut Rng::derive(seed, 2)).unwrap(),
            );
        }
        let fmt = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.3}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!(
            "steps {steps:3} hidden {hidden:2} lr {lr:.0e} batch {batch:2} | same: {} | untrained: {}",
            fmt(&same),
            fmt(&sep)
        );
    }
}
