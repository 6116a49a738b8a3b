//! End-to-end checks of the command-line interface: exit codes, output
//! files, and flag/config precedence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qperceptron::datasets::{write_optdigits, RawInstance};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qperceptron"))
}

fn toy_data(dir: &Path) -> PathBuf {
    let mut data = Vec::new();
    for k in 0..8u8 {
        let left: Vec<u8> = (0..64).map(|j| if j % 8 < 4 { 16 } else { k % 3 }).collect();
        let top: Vec<u8> = (0..64).map(|j| if j < 32 { 16 } else { k % 3 }).collect();
        data.push(RawInstance::new(left, 0).unwrap());
        data.push(RawInstance::new(top, 1).unwrap());
    }
    let path = dir.join("toy.tes");
    write_optdigits(&path, &data).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn stats_reports_counts_and_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_data(dir.path());
    let out = bin()
        .args(["stats", "--dataset", "digits", "--train-path"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("16 instances"), "{text}");
    assert!(text.contains("imbalance ratio: 1.000"), "{text}");
}

#[test]
fn missing_file_fails_with_diagnostic() {
    let out = bin()
        .args(["stats", "--dataset", "digits", "--train-path", "/no/such/file"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("error"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_flag_fails() {
    let out = bin().args(["train", "--bogus"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn encode_dumps_gate_lines() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_data(dir.path());
    let out = bin()
        .args(["encode", "--dataset", "digits", "--index", "0", "--train-path"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    for q in 0..6 {
        assert_eq!(lines.next(), Some(format!("H q{q}").as_str()));
    }
    assert!(text.lines().skip(6).all(|l| l.starts_with("MCZ ")), "{text}");
    assert!(stderr(&out).contains("gates"), "stats go to stderr");
}

#[test]
fn train_readout_round_trip_through_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_data(dir.path());
    let model = dir.path().join("model.txt");
    let out_base = dir.path().join("result");

    let out = bin()
        .args(["train", "--dataset", "digits", "--pos", "0", "--neg", "1", "--seed", "9"])
        .args(["--epochs", "6"])
        .arg("--train-path")
        .arg(&data)
        .arg("--model-out")
        .arg(&model)
        .arg("--out")
        .arg(&out_base)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("accuracy"), "{}", stdout(&out));
    assert!(model.exists());
    assert!(out_base.with_extension("json").exists());
    assert!(
        dir.path().join("result_readouts.csv").exists(),
        "single-task runs export a readout histogram"
    );

    let out = bin()
        .args(["readout", "--dataset", "digits", "--index", "0"])
        .arg("--train-path")
        .arg(&data)
        .arg("--model")
        .arg(&model)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("exact readout"), "{}", stdout(&out));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_data(dir.path());
    let config = dir.path().join("config.json");
    // The config asks for 1 epoch and seed 1; the flag overrides epochs.
    std::fs::write(
        &config,
        format!(
            r#"{{"train_path": {:?}, "hyperparams": {{"threshold": 0.5, "lr_pos": 0.05,
               "lr_neg": 0.05, "shots": 1000, "readout_mode": "exact", "epochs": 1,
               "early_stop": null, "seed": 1}}}}"#,
            data.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = bin()
        .args(["train", "--pos", "0", "--neg", "1", "--epochs", "4"])
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let epochs = stdout(&out).matches("epoch").count();
    assert_eq!(epochs, 4, "flag must override the config file: {}", stdout(&out));
}

#[test]
fn sampled_readout_histogram_lands_in_one_bin_for_degenerate_p() {
    let dir = tempfile::tempdir().unwrap();
    let data = toy_data(dir.path());
    let model = dir.path().join("model.txt");
    // Weights identical to instance 1's signs: readout of instance 1 is
    // exactly 1, so every sampled repeat reads 1.0.
    let train = bin()
        .args(["train", "--dataset", "digits", "--pos", "1", "--neg", "0", "--seed", "3"])
        .args(["--lr-neg", "1.0", "--epochs", "2"])
        .arg("--train-path")
        .arg(&data)
        .arg("--model-out")
        .arg(&model)
        .output()
        .unwrap();
    assert!(train.status.success(), "stderr: {}", stderr(&train));

    let hist = dir.path().join("hist.csv");
    let out = bin()
        .args(["readout", "--dataset", "digits", "--index", "0"])
        .args(["--readout-mode", "sampled", "--shots", "1000", "--repeats", "1000"])
        .args(["--seed", "5"])
        .arg("--train-path")
        .arg(&data)
        .arg("--model")
        .arg(&model)
        .arg("--out")
        .arg(&hist)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&hist).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bin_lower,count");
    // Instance 0 is orthogonal to instance 1's mask after training toward
    // class-0 patterns... the exact bin depends on the trained weights, so
    // only require a well-formed non-empty histogram totalling 1000.
    let total: usize = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 1000);
}
