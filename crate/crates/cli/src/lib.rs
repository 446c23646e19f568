//! Command-line driver: `sines`, `train`, `generate`, `evaluate`.
//!
//! Every command is reproducible from its config file and seed. Exit codes:
//! 0 success, 2 configuration or validation failure, 3 training failure
//! (non-finite loss), 4 artifact corruption.

mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use seriesforge::data::{
    export_csv, generate_sines, load_csv, scaler_apply, scaler_fit, scaler_invert, window,
    SeriesBatch, SineConfig,
};
use seriesforge::eval::{
    pca_project, run_replications, tsne_project, Embedding, EvalSettings, TsneOptions,
};
use seriesforge::numkit::Rng;
use seriesforge::training::{generate_synthetic, Checkpoint, Trainer};
use seriesforge::Error;

pub use config::{DataSource, EvalConfig, RunConfig, WindowSpec};

#[derive(Parser)]
#[command(name = "seriesforge", version, about = "Synthetic time series training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AblateArg {
    /// Drop the two-step-ahead supervised loss.
    Supervised,
    /// Drop the feature discriminator (latent discriminator only).
    DualDisc,
    /// Drop the code-moment loss.
    TsLoss,
    /// Keep the final-epoch model instead of the best-scoring one.
    EarlyStop,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sinusoid benchmark dataset as CSV.
    Sines {
        /// JSON file with the sine settings (dims, t, n, ranges, seed).
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the four training phases and write checkpoint, metrics log, and
    /// the best synthetic set.
    Train {
        /// JSON run config (data source, training and eval settings).
        #[arg(long)]
        config: PathBuf,
        /// Override the training seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disable one component; repeatable.
        #[arg(long = "ablate", value_enum)]
        ablate: Vec<AblateArg>,
    },
    /// Sample synthetic sequences from a checkpoint.
    Generate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a synthetic dataset against a real one and export embeddings.
    Evaluate {
        /// Real dataset CSV.
        #[arg(long)]
        real: PathBuf,
        /// Synthetic dataset CSV.
        #[arg(long)]
        synthetic: PathBuf,
        /// Optional JSON eval settings.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the evaluation base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for report and embedding files.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Parses and executes a full command line, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version via "errors" that must exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Sines { config, seed, out } => cmd_sines(&config, seed, &out),
        Command::Train {
            config,
            seed,
            out,
            ablate,
        } => cmd_train(&config, seed, out, &ablate),
        Command::Generate {
            checkpoint,
            count,
            seed,
            out,
        } => cmd_generate(&checkpoint, count, seed, &out),
        Command::Evaluate {
            real,
            synthetic,
            config,
            seed,
            out,
        } => cmd_evaluate(&real, &synthetic, config.as_deref(), seed, &out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFinite { .. } => 3,
        Error::Corrupt(_) => 4,
        _ => 2,
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Contract(format!("cannot read config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Contract(format!("invalid config {}: {e}", path.display())))
}

fn cmd_sines(config: &Path, seed: Option<u64>, out: &Path) -> Result<(), Error> {
    let mut cfg: SineConfig = read_json(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let batch = generate_sines(&cfg)?;
    export_csv(&batch, out)?;
    println!(
        "wrote {} samples x {} timestamps x {} features to {}",
        batch.samples(),
        batch.timestamps(),
        batch.features(),
        out.display()
    );
    Ok(())
}

fn load_data(source: &DataSource) -> Result<SeriesBatch, Error> {
    match source {
        DataSource::Sines(cfg) => generate_sines(cfg),
        DataSource::Csv { path, window: spec } => {
            let batch = load_csv(path)?;
            match spec {
                Some(w) => window(&batch, w.t, w.stride),
                None => Ok(batch),
            }
        }
    }
}

fn apply_ablations(cfg: &mut RunConfig, ablate: &[AblateArg]) {
    for a in ablate {
        match a {
            AblateArg::Supervised => cfg.train.ablation.use_supervised_loss = false,
            AblateArg::DualDisc => cfg.train.ablation.use_feature_discriminator = false,
            AblateArg::TsLoss => cfg.train.ablation.use_ts_loss = false,
            AblateArg::EarlyStop => cfg.train.ablation.use_early_stopping = false,
        }
    }
}

fn cmd_train(
    config: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    ablate: &[AblateArg],
) -> Result<(), Error> {
    let mut run_cfg: RunConfig = read_json(config)?;
    if let Some(seed) = seed {
        run_cfg.train.seed = seed;
    }
    if let Some(out) = out {
        run_cfg.out_dir = out;
    }
    apply_ablations(&mut run_cfg, ablate);

    let data = load_data(&run_cfg.data)?;
    let mut trainer = Trainer::new(&data, run_cfg.train.clone())?;
    let outcome = trainer.run_all()?;

    std::fs::create_dir_all(&run_cfg.out_dir)?;
    let ckpt_path = run_cfg.out_dir.join("checkpoint.bin");
    outcome.checkpoint.save(&ckpt_path)?;

    let log_path = run_cfg.out_dir.join("earlystop_log.jsonl");
    let mut log = std::fs::File::create(&log_path)?;
    for record in &outcome.es_log {
        serde_json::to_writer(&mut log, record)?;
        log.write_all(b"\n")?;
    }

    let synthetic = scaler_invert(&outcome.best_synthetic, trainer.scaler())?;
    let syn_path = run_cfg.out_dir.join("synthetic_best.csv");
    export_csv(&synthetic, &syn_path)?;

    if outcome.degenerate_warning {
        eprintln!("warning: first evaluation had a zero moment gap; score weight p1 set to 0");
    }
    println!(
        "training complete: {} evaluations, artifacts in {}",
        outcome.es_log.len(),
        run_cfg.out_dir.display()
    );
    if let Some(best) = outcome.es_log.iter().filter(|r| r.saved).next_back() {
        println!(
            "best evaluation at epoch {}: score {:.6} (dis {:.4}, mseMean {:.6}, mseSTD {:.6})",
            best.epoch, best.score, best.dis_score, best.mse_mean, best.mse_std
        );
    }
    Ok(())
}

fn cmd_generate(checkpoint: &Path, count: usize, seed: u64, out: &Path) -> Result<(), Error> {
    if count == 0 {
        return Err(Error::Contract("generation count must be positive".into()));
    }
    let ckpt = Checkpoint::load(checkpoint)?;
    let bundle = ckpt.restore_bundle()?;
    let mut rng = Rng::derive(seed, 0x6E4E);
    let scaled = generate_synthetic(&bundle, ckpt.config.window, count, &mut rng)?;
    let batch = scaler_invert(&scaled, &ckpt.scaler)?;
    export_csv(&batch, out)?;
    println!(
        "wrote {} synthetic samples x {} timestamps x {} features to {}",
        batch.samples(),
        batch.timestamps(),
        batch.features(),
        out.display()
    );
    Ok(())
}

fn write_embedding_csv(path: &Path, method: &str, embedding: &Embedding) -> Result<(), Error> {
    let mut text = String::from("method,label,c1,c2\n");
    for (coord, label) in embedding.coords.iter().zip(&embedding.labels) {
        text.push_str(&format!(
            "{method},{},{},{}\n",
            label.as_str(),
            coord[0],
            coord[1]
        ));
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn cmd_evaluate(
    real_path: &Path,
    synthetic_path: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<(), Error> {
    let mut eval_cfg: EvalConfig = match config {
        Some(path) => read_json(path)?,
        None => EvalConfig::default(),
    };
    if let Some(seed) = seed {
        eval_cfg.base_seed = seed;
    }

    let real_raw = load_csv(real_path)?;
    let synthetic_raw = load_csv(synthetic_path)?;
    if real_raw.timestamps() != synthetic_raw.timestamps()
        || real_raw.features() != synthetic_raw.features()
    {
        return Err(Error::ShapeMismatch {
            kind: "evaluate".into(),
            left: vec![real_raw.timestamps(), real_raw.features()],
            right: vec![synthetic_raw.timestamps(), synthetic_raw.features()],
        });
    }

    // both sets are scaled with the real data's ranges
    let scaler = scaler_fit(&real_raw);
    let real = scaler_apply(&real_raw, &scaler)?;
    let synthetic = scaler_apply(&synthetic_raw, &scaler)?;

    let settings = EvalSettings {
        replications: eval_cfg.replications,
        base_seed: eval_cfg.base_seed,
        discriminative_budget: eval_cfg.discriminative_budget,
        predictive_budget: eval_cfg.predictive_budget,
    };
    let report = run_replications(&real, &synthetic, &settings)?;

    std::fs::create_dir_all(out)?;
    let report_path = out.join("report.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report)?)?;

    let cap = eval_cfg.max_embedding_samples;
    let real_emb = real.head(cap.min(real.samples()))?;
    let syn_emb = synthetic.head(cap.min(synthetic.samples()))?;
    let pca = pca_project(&real_emb, &syn_emb)?;
    write_embedding_csv(&out.join("embeddings_pca.csv"), "pca", &pca)?;

    let tsne_opts = TsneOptions {
        perplexity: eval_cfg.tsne_perplexity,
        iterations: eval_cfg.tsne_iterations,
        ..Default::default()
    };
    let mut tsne_rng = Rng::derive(eval_cfg.base_seed, 0x75E1);
    let tsne = tsne_project(&real_emb, &syn_emb, &tsne_opts, &mut tsne_rng)?;
    write_embedding_csv(&out.join("embeddings_tsne.csv"), "tsne", &tsne.embedding)?;

    println!(
        "discriminative {:.4} ± {:.4} | predictive {:.4} ± {:.4} ({} replications)",
        report.discriminative.mean,
        report.discriminative.std,
        report.predictive.mean,
        report.predictive.std,
        report.settings.replications
    );
    println!("report and embeddings written to {}", out.display());
    Ok(())
}
