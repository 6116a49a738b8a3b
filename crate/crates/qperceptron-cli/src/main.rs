//! Command-line front end: dataset statistics, circuit dumps, readouts,
//! and the training/experiment entry points.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qperceptron::datasets::{self, RawInstance};
use qperceptron::encoder;
use qperceptron::experiment::{
    self, DatasetKind, ExperimentConfig, ExperimentResult, ExportFormat, Outcome, TaskSpec,
    Validation,
};
use qperceptron::perceptron::{self, EarlyStop, EarlyStopMetric, ReadoutMode, TrainedModel};
use qperceptron::sim::RngStream;
use qperceptron::{Label, SignVector};

#[derive(Parser)]
#[command(name = "qperceptron", version, about = "Quantum perceptron image classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print instance counts, class counts, and the imbalance ratio.
    Stats(CommonOpts),
    /// Dump the state-preparation circuit for one dataset instance.
    Encode(EncodeOpts),
    /// Compute the readout of one dataset instance against a model.
    Readout(ReadoutOpts),
    /// Train a single binary classifier (pos vs neg, or pos vs rest).
    Train(TrainOpts),
    /// Train the full 10x10 one-vs-one accuracy grid.
    Ovo(CommonOpts),
    /// Train one one-vs-all classifier per class.
    Ova(CommonOpts),
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetArg {
    Digits,
    Semeion,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidationArg {
    Resubstitution,
    Holdout,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReadoutModeArg {
    Exact,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum EarlyStopArg {
    Accuracy,
    Recall,
    F1,
}

/// Flags shared by every subcommand. Precedence: built-in defaults, then
/// the --config file, then explicit flags.
#[derive(Args)]
struct CommonOpts {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    dataset: Option<DatasetArg>,
    /// Data file; under resubstitution this is the single train+test set.
    #[arg(long)]
    train_path: Option<PathBuf>,
    /// Held-out evaluation file (required for holdout validation).
    #[arg(long)]
    test_path: Option<PathBuf>,
    #[arg(long, value_enum)]
    validation: Option<ValidationArg>,
    /// Classification threshold on the readout, in (0, 1).
    #[arg(long)]
    threshold: Option<f64>,
    /// Fraction of eligible positions flipped on a false negative.
    #[arg(long)]
    lr_pos: Option<f64>,
    /// Fraction of eligible positions flipped on a false positive.
    #[arg(long)]
    lr_neg: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Shots per readout in sampled mode.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, value_enum)]
    readout_mode: Option<ReadoutModeArg>,
    /// Binarization cutoff (default: 10 for digits, 1 for semeion).
    #[arg(long)]
    cutoff: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    /// Metric watched for early stopping (with --early-stop-value).
    #[arg(long, value_enum, requires = "early_stop_value")]
    early_stop_metric: Option<EarlyStopArg>,
    #[arg(long, requires = "early_stop_metric")]
    early_stop_value: Option<f64>,
    /// Output base path; the format extension is appended.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct EncodeOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Zero-based instance index into the data file.
    #[arg(long)]
    index: usize,
}

#[derive(Args)]
struct ReadoutOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Zero-based instance index into the data file.
    #[arg(long)]
    index: usize,
    /// Model text record; absent means seeded random weights.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Number of independent readouts (sampled mode); with --out the
    /// readout distribution is written as a histogram CSV.
    #[arg(long, default_value_t = 1)]
    repeats: u64,
}

#[derive(Args)]
struct TrainOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Positive class, 0..=9.
    #[arg(long)]
    pos: u8,
    /// Negative class; omit to train against all other classes.
    #[arg(long)]
    neg: Option<u8>,
    /// Write the trained model as a plain text record.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

impl CommonOpts {
    /// Builds the effective configuration: defaults, overridden by the
    /// config file, overridden by flags.
    fn build_config(&self, task: TaskSpec) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        cfg.task = task;
        if let Some(d) = self.dataset {
            cfg.dataset = match d {
                DatasetArg::Digits => DatasetKind::Digits,
                DatasetArg::Semeion => DatasetKind::Semeion,
            };
        }
        if let Some(p) = &self.train_path {
            cfg.train_path = Some(p.clone());
        }
        if let Some(p) = &self.test_path {
            cfg.test_path = Some(p.clone());
        }
        if let Some(v) = self.validation {
            cfg.validation = match v {
                ValidationArg::Resubstitution => Validation::Resubstitution,
                ValidationArg::Holdout => Validation::Holdout,
            };
        }
        if let Some(t) = self.threshold {
            cfg.hyperparams.threshold = t;
        }
        if let Some(lr) = self.lr_pos {
            cfg.hyperparams.lr_pos = lr;
        }
        if let Some(lr) = self.lr_neg {
            cfg.hyperparams.lr_neg = lr;
        }
        if let Some(e) = self.epochs {
            cfg.hyperparams.epochs = e;
        }
        if let Some(s) = self.shots {
            cfg.hyperparams.shots = s;
        }
        if let Some(m) = self.readout_mode {
            cfg.hyperparams.readout_mode = match m {
                ReadoutModeArg::Exact => ReadoutMode::Exact,
                ReadoutModeArg::Sampled => ReadoutMode::Sampled,
            };
        }
        if let Some(c) = self.cutoff {
            cfg.binarize_cutoff = Some(c);
        }
        if let Some(s) = self.seed {
            cfg.hyperparams.seed = s;
        }
        if let (Some(metric), Some(value)) = (self.early_stop_metric, self.early_stop_value) {
            cfg.hyperparams.early_stop = Some(EarlyStop {
                metric: match metric {
                    EarlyStopArg::Accuracy => EarlyStopMetric::Accuracy,
                    EarlyStopArg::Recall => EarlyStopMetric::Recall,
                    EarlyStopArg::F1 => EarlyStopMetric::F1,
                },
                critical: value,
            });
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(f) = self.format {
            cfg.format = match f {
                FormatArg::Json => ExportFormat::Json,
                FormatArg::Csv => ExportFormat::Csv,
                FormatArg::Markdown => ExportFormat::Markdown,
            };
        }
        Ok(cfg)
    }

    /// Loads the instances of the primary data file (for stats/encode/
    /// readout, which operate on one file).
    fn load_primary(&self, cfg: &ExperimentConfig) -> anyhow::Result<Vec<RawInstance>> {
        let path = cfg
            .train_path
            .as_ref()
            .or(cfg.test_path.as_ref())
            .ok_or_else(|| anyhow!("no data path given (use --train-path)"))?;
        let data = match cfg.dataset {
            DatasetKind::Digits => datasets::load_optdigits(path)?,
            DatasetKind::Semeion => datasets::load_semeion(path)?,
        };
        Ok(data)
    }
}

fn print_stats(name: &str, data: &[RawInstance]) -> anyhow::Result<()> {
    let stats = datasets::dataset_stats(data)?;
    println!("{name}: {} instances", stats.total_instances);
    println!("  class counts: {:?}", stats.class_counts);
    println!("  imbalance ratio: {:.3}", stats.imbalance_ratio);
    Ok(())
}

fn cmd_stats(opts: &CommonOpts) -> anyhow::Result<()> {
    let cfg = opts.build_config(TaskSpec::Ovo)?;
    let mut combined = Vec::new();
    let mut any = false;
    for (label, path) in [("train", &cfg.train_path), ("test", &cfg.test_path)] {
        if let Some(path) = path {
            let data = match cfg.dataset {
                DatasetKind::Digits => datasets::load_optdigits(path)?,
                DatasetKind::Semeion => datasets::load_semeion(path)?,
            };
            print_stats(&format!("{label} ({})", path.display()), &data)?;
            combined.extend(data);
            any = true;
        }
    }
    if !any {
        bail!("no data path given (use --train-path and/or --test-path)");
    }
    if cfg.train_path.is_some() && cfg.test_path.is_some() {
        print_stats("combined", &combined)?;
    }
    Ok(())
}

fn cmd_encode(opts: &EncodeOpts) -> anyhow::Result<()> {
    let cfg = opts.common.build_config(TaskSpec::Ovo)?;
    let data = opts.common.load_primary(&cfg)?;
    let inst = data
        .get(opts.index)
        .ok_or_else(|| anyhow!("index {} out of range ({} instances)", opts.index, data.len()))?;
    let pattern = datasets::binarize(inst, cfg.effective_cutoff())?;
    let circuit = encoder::preparation_circuit(&pattern.to_signs())?;
    let stats = encoder::circuit_stats(&circuit);
    let dump = circuit.dump();
    match &cfg.out {
        Some(out) => std::fs::write(out, &dump)
            .with_context(|| format!("writing {}", out.display()))?,
        None => print!("{dump}"),
    }
    eprintln!(
        "instance {} (class {}): {} gates, {} layers, max control arity {}",
        opts.index, inst.class_label, stats.gate_count, stats.layer_count,
        stats.max_control_arity
    );
    Ok(())
}

fn load_or_init_weights(
    opts: &ReadoutOpts,
    cfg: &ExperimentConfig,
    dimension: usize,
) -> anyhow::Result<SignVector> {
    match &opts.model {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading model {}", path.display()))?;
            let model = TrainedModel::from_text(&text)?;
            if model.weights.len() != dimension {
                bail!(
                    "model dimension {} does not match pattern dimension {}",
                    model.weights.len(),
                    dimension
                );
            }
            Ok(model.weights)
        }
        None => {
            eprintln!("no --model given; using random weights from seed {}", cfg.hyperparams.seed);
            let mut rng = RngStream::new(cfg.hyperparams.seed);
            Ok(perceptron::random_weights(dimension, &mut rng)?)
        }
    }
}

fn cmd_readout(opts: &ReadoutOpts) -> anyhow::Result<()> {
    let cfg = opts.common.build_config(TaskSpec::Ovo)?;
    let data = opts.common.load_primary(&cfg)?;
    let inst = data
        .get(opts.index)
        .ok_or_else(|| anyhow!("index {} out of range ({} instances)", opts.index, data.len()))?;
    let input = datasets::binarize(inst, cfg.effective_cutoff())?.to_signs();
    let weights = load_or_init_weights(opts, &cfg, input.len())?;

    let exact = perceptron::exact_readout(&input, &weights)?;
    let mut rng = RngStream::new(cfg.hyperparams.seed);
    let readouts: Vec<f64> = match cfg.hyperparams.readout_mode {
        ReadoutMode::Exact => vec![exact; opts.repeats as usize],
        ReadoutMode::Sampled => (0..opts.repeats)
            .map(|_| {
                perceptron::sampled_readout(&input, &weights, cfg.hyperparams.shots, &mut rng)
            })
            .collect::<Result<_, _>>()?,
    };
    let mean = readouts.iter().sum::<f64>() / readouts.len() as f64;
    let label = match perceptron::classify(mean, cfg.hyperparams.threshold) {
        Label::Positive => "positive",
        Label::Negative => "negative",
    };
    println!("instance {} (class {})", opts.index, inst.class_label);
    println!("exact readout: {exact}");
    if opts.repeats > 1 || cfg.hyperparams.readout_mode == ReadoutMode::Sampled {
        println!(
            "mean of {} {} readouts: {mean}",
            opts.repeats,
            match cfg.hyperparams.readout_mode {
                ReadoutMode::Exact => "exact",
                ReadoutMode::Sampled => "sampled",
            }
        );
    }
    println!("classified {label} at threshold {}", cfg.hyperparams.threshold);

    if let Some(out) = &cfg.out {
        let mut csv = String::from("bin_lower,count\n");
        for (edge, count) in experiment::histogram(&readouts, experiment::HISTOGRAM_BINS) {
            csv.push_str(&format!("{edge},{count}\n"));
        }
        std::fs::write(out, csv).with_context(|| format!("writing {}", out.display()))?;
        eprintln!("wrote readout histogram to {}", out.display());
    }
    Ok(())
}

fn report_and_export(result: &ExperimentResult, cfg: &ExperimentConfig) -> anyhow::Result<()> {
    match &result.outcome {
        Outcome::Single { task } => {
            let m = &task.metrics;
            let fmt = |v: Option<f64>| v.map_or("NA".into(), |x| format!("{x:.3}"));
            println!(
                "pos {} vs {}: accuracy {}, recall {}, precision {}, f1 {}, auc {}",
                task.pos,
                task.neg.map_or("rest".into(), |n| n.to_string()),
                fmt(m.accuracy),
                fmt(m.recall),
                fmt(m.precision),
                fmt(m.f1),
                fmt(m.auc),
            );
            for rec in &task.history {
                println!(
                    "  epoch {:>3}: accuracy {}",
                    rec.epoch,
                    fmt(rec.accuracy)
                );
            }
        }
        Outcome::Ovo { accuracy_grid, .. } => {
            let off_diagonal: Vec<f64> = accuracy_grid
                .iter()
                .enumerate()
                .flat_map(|(p, row)| {
                    row.iter().enumerate().filter(move |(n, _)| *n != p).map(|(_, &a)| a)
                })
                .collect();
            let mean = off_diagonal.iter().sum::<f64>() / off_diagonal.len() as f64;
            println!("trained 90 pairs; mean off-diagonal accuracy {mean:.3}");
        }
        Outcome::Ova { rows } => {
            for row in rows {
                let m = &row.metrics;
                let fmt = |v: Option<f64>| v.map_or("NA".into(), |x| format!("{x:.3}"));
                println!(
                    "class {}: recall {}, accuracy {}, precision {}, f1 {}, auc {}",
                    row.pos,
                    fmt(m.recall),
                    fmt(m.accuracy),
                    fmt(m.precision),
                    fmt(m.f1),
                    fmt(m.auc),
                );
            }
        }
    }
    eprintln!("wall time: {:.2}s", result.wall_seconds);
    if let Some(out) = &cfg.out {
        let written = experiment::export_results(result, out, cfg.format)?;
        for path in written {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_train(opts: &TrainOpts) -> anyhow::Result<()> {
    let cfg = opts
        .common
        .build_config(TaskSpec::Single { pos: opts.pos, neg: opts.neg })?;
    let result = experiment::run_single(&cfg)?;
    report_and_export(&result, &cfg)?;
    if let Some(model_out) = &opts.model_out {
        let Outcome::Single { task } = &result.outcome else { unreachable!() };
        let weights = task
            .weights
            .clone()
            .ok_or_else(|| anyhow!("the trivial single-class task produces no model"))?;
        let model = TrainedModel {
            weights,
            history: task.history.clone(),
            hyperparams: cfg.hyperparams.clone(),
        };
        std::fs::write(model_out, model.to_text())
            .with_context(|| format!("writing {}", model_out.display()))?;
        eprintln!("wrote model to {}", model_out.display());
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Stats(opts) => cmd_stats(opts),
        Command::Encode(opts) => cmd_encode(opts),
        Command::Readout(opts) => cmd_readout(opts),
        Command::Train(opts) => cmd_train(opts),
        Command::Ovo(opts) => {
            let run = |cfg: &ExperimentConfig| -> anyhow::Result<()> {
                let result = experiment::run_ovo(cfg)?;
                report_and_export(&result, cfg)
            };
            opts.build_config(TaskSpec::Ovo).and_then(|cfg| run(&cfg))
        }
        Command::Ova(opts) => {
            let run = |cfg: &ExperimentConfig| -> anyhow::Result<()> {
                let result = experiment::run_ova(cfg)?;
                report_and_export(&result, cfg)
            };
            opts.build_config(TaskSpec::Ova).and_then(|cfg| run(&cfg))
        }
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
