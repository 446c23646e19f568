//! Reproduces one failing scorer run and prints its training trajectory.

use seriesforge::data::{generate_sines, scaler_apply, scaler_fit, SineConfig};
use seriesforge::eval::ScorerBudget;
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

    let cfg = TrainConfig {
        hidden_dim: 12,
        num_layers: 2,
        latent_dim: Some(5),
        code_dim: Some(10),
        ..Default::default()
    };
    let dims = cfg.dims_for(5);

    for (seed, hidden, lr, steps) in [(4u64, 30usize, 1e-3, 800usize), (0, 30, 2e-3, 400), (1, 16, 1e-3, 800)] {
        let mut rng = Rng::derive(seed, 0xBA5E);
        let untrained = NetworkBundle::init(&dims, &mut rng).unwrap();
        let fake = generate_synthetic(&untrained, 24, 500, &mut rng).unwrap();

        // fake batch statistics
        let mean: f64 = fake.values().iter().sum::<f64>() / fake.values().len() as f64;
        let var: f64 = fake
            .values()
            .iter()
            .map(|v| (v - mean).powi(2))
            .sum::<f64>()
            / fake.values().len() as f64;
        println!(
            "seed {seed} hidden {hidden} lr {lr:.0e}: fake mean {mean:.4} std {:.4}",
            var.sqrt()
        );

        let budget = ScorerBudget {
            steps,
            batch_size: 64,
            hidden: Some(hidden),
            lr,
        };
        let score = seriesforge::eval::discriminative_score(
            &half_a,
            &fake,
            &budget,
            &mut Rng::derive(seed, 2),
        )
        .unwrap();
        println!("  score {score:.4}");

        // train manually with tracing via a second scorer run at increasing
        // budgets to see where it sits
        for s in [50usize, 100, 200, 400, 800] {
            let b = ScorerBudget {
                steps: s,
                batch_size: 64,
                hidden: Some(hidden),
                lr,
            };
            let sc = seriesforge::eval::discriminative_score(
                &half_a,
                &fake,
                &b,
                &mut Rng::derive(seed, 2),
            )
            .unwrap();
            print!("  steps {s}: {sc:.3}");
        }
        println!();
    }
}
