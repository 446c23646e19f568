//! End-to-end command tests on desk-scale configs.

use std::path::Path;

use seriesforge_cli::run;

fn cli(args: &[&str]) -> i32 {
    let mut full = vec!["seriesforge"];
    full.extend_from_slice(args);
    run(full)
}

fn write_sine_config(path: &Path, n: usize, t: usize, dims: usize, seed: u64) {
    let json = format!(
        r#"{{"dims": {dims}, "t": {t}, "n": {n}, "seed": {seed}}}"#
    );
    std::fs::write(path, json).unwrap();
}

/// Small run config: sines data source plus a fast training setup.
fn write_run_config(path: &Path, out_dir: &Path, seed: u64) {
    let json = format!(
        r#"{{
  "data": {{"sines": {{"dims": 2, "t": 8, "n": 24, "seed": 1}}}},
  "train": {{
    "seed": {seed},
    "window": 8,
    "batch_size": 8,
    "hidden_dim": 6,
    "num_layers": 1,
    "latent_dim": 2,
    "time_stride": 2,
    "epochs": {{"lossfn_autoencoder": 20, "latent_autoencoder": 20, "supervisor": 20, "joint": 16}},
    "early_stop": {{
      "check_interval": 4,
      "start_fraction": 0.5,
      "budget": {{"steps": 10, "batch_size": 8, "hidden": 4, "lr": 0.005}},
      "eval_samples": 16
    }}
  }},
  "out_dir": {out:?}
}}"#,
        out = out_dir.display().to_string()
    );
    std::fs::write(path, json).unwrap();
}

#[test]
fn sines_writes_expected_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sines.json");
    write_sine_config(&cfg, 10, 24, 5, 3);
    let out = dir.path().join("data.csv");
    let code = cli(&["sines", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    // header + N * T rows
    assert_eq!(text.lines().count(), 1 + 10 * 24);
}

#[test]
fn sines_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sines.json");
    write_sine_config(&cfg, 6, 12, 3, 9);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    assert_eq!(cli(&["sines", "--config", cfg.to_str().unwrap(), "--out", out_a.to_str().unwrap()]), 0);
    assert_eq!(cli(&["sines", "--config", cfg.to_str().unwrap(), "--out", out_b.to_str().unwrap()]), 0);
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
}

#[test]
fn sines_rejects_inverted_range_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sines.json");
    std::fs::write(
        &cfg,
        r#"{"dims": 2, "t": 8, "n": 4, "seed": 1, "freq_range": [0.9, 0.1]}"#,
    )
    .unwrap();
    let out = dir.path().join("data.csv");
    let code = cli(&["sines", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn train_writes_all_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_dir = dir.path().join("out");
    write_run_config(&cfg, &out_dir, 5);
    let code = cli(&["train", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out_dir.join("checkpoint.bin").exists());
    assert!(out_dir.join("earlystop_log.jsonl").exists());
    assert!(out_dir.join("synthetic_best.csv").exists());
    let log = std::fs::read_to_string(out_dir.join("earlystop_log.jsonl")).unwrap();
    assert!(log.lines().count() >= 1);
}

#[test]
fn train_ablate_early_stop_leaves_empty_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_dir = dir.path().join("out");
    write_run_config(&cfg, &out_dir, 6);
    let code = cli(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--ablate",
        "early-stop",
    ]);
    assert_eq!(code, 0);
    let log = std::fs::read_to_string(out_dir.join("earlystop_log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 0);
}

#[test]
fn train_with_missing_dataset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"data": {"csv": {"path": "/nonexistent/data.csv"}}, "train": {"window": 8}}"#,
    )
    .unwrap();
    let code = cli(&["train", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn generate_is_deterministic_and_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_dir = dir.path().join("out");
    write_run_config(&cfg, &out_dir, 7);
    assert_eq!(cli(&["train", "--config", cfg.to_str().unwrap()]), 0);
    let ckpt = out_dir.join("checkpoint.bin");

    let gen_a = dir.path().join("gen_a.csv");
    let gen_b = dir.path().join("gen_b.csv");
    for out in [&gen_a, &gen_b] {
        let code = cli(&[
            "generate",
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--count",
            "10",
            "--seed",
            "42",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&gen_a).unwrap(), std::fs::read(&gen_b).unwrap());

    let batch = seriesforge::data::load_csv(&gen_a).unwrap();
    assert_eq!(batch.samples(), 10);
    assert_eq!(batch.timestamps(), 8);
    // decoded through a sigmoid and inverted with the training scaler, so
    // values stay inside the training data's observed range
    assert!(batch.values().iter().all(|&v| (-1.0..=1.0).contains(&v)));
}

#[test]
fn generate_with_corrupt_checkpoint_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("bad.ckpt");
    std::fs::write(&ckpt, b"SFCKPT01 garbage that is long enough to pass size checks").unwrap();
    let out = dir.path().join("gen.csv");
    let code = cli(&[
        "generate",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--count",
        "5",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 4);
}

#[test]
fn evaluate_real_against_itself_scores_low() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sines.json");
    write_sine_config(&cfg, 80, 8, 2, 11);
    let data = dir.path().join("data.csv");
    assert_eq!(cli(&["sines", "--config", cfg.to_str().unwrap(), "--out", data.to_str().unwrap()]), 0);

    // split the file into two halves by sample id
    let batch = seriesforge::data::load_csv(&data).unwrap();
    let first = batch.select(&(0..40).collect::<Vec<_>>()).unwrap();
    let second = batch.select(&(40..80).collect::<Vec<_>>()).unwrap();
    let real = dir.path().join("real.csv");
    let synthetic = dir.path().join("synthetic.csv");
    seriesforge::data::export_csv(&first, &real).unwrap();
    seriesforge::data::export_csv(&second, &synthetic).unwrap();

    let eval_cfg = dir.path().join("eval.json");
    std::fs::write(
        &eval_cfg,
        r#"{
  "replications": 2,
  "discriminative_budget": {"steps": 100, "batch_size": 16, "hidden": 8, "lr": 0.005},
  "predictive_budget": {"steps": 40, "batch_size": 16, "hidden": 8, "lr": 0.005},
  "tsne_perplexity": 10.0,
  "tsne_iterations": 60
}"#,
    )
    .unwrap();

    let out = dir.path().join("eval_out");
    let code = cli(&[
        "evaluate",
        "--real",
        real.to_str().unwrap(),
        "--synthetic",
        synthetic.to_str().unwrap(),
        "--config",
        eval_cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let dis = report["discriminative"]["mean"].as_f64().unwrap();
    assert!(dis <= 0.15, "same-distribution halves scored {dis}");
    assert!(report["discriminative"]["std"].is_number());
    assert!(report["predictive"]["mean"].is_number());
    assert_eq!(report["discriminative"]["raw"].as_array().unwrap().len(), 2);

    for name in ["embeddings_pca.csv", "embeddings_tsne.csv"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "method,label,c1,c2");
        assert_eq!(lines.count(), 80);
    }
}

#[test]
fn evaluate_with_missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval_out");
    let code = cli(&[
        "evaluate",
        "--real",
        "/nonexistent/real.csv",
        "--synthetic",
        "/nonexistent/syn.csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn evaluate_with_mismatched_shapes_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_a = dir.path().join("a.json");
    let cfg_b = dir.path().join("b.json");
    write_sine_config(&cfg_a, 12, 8, 2, 1);
    write_sine_config(&cfg_b, 12, 6, 2, 1);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(cli(&["sines", "--config", cfg_a.to_str().unwrap(), "--out", a.to_str().unwrap()]), 0);
    assert_eq!(cli(&["sines", "--config", cfg_b.to_str().unwrap(), "--out", b.to_str().unwrap()]), 0);
    let out = dir.path().join("eval_out");
    let code = cli(&[
        "evaluate",
        "--real",
        a.to_str().unwrap(),
        "--synthetic",
        b.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}
