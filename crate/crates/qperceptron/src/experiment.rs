//! Experiment orchestration: configuration, the OvO grid and OvA sweep,
//! validation protocols, and result serialization.
//!
//! Every run is deterministic for a fixed configuration: grid tasks draw
//! their seeds from the master seed and their task id, so results do not
//! depend on how the task pool schedules them.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{self, RawInstance, TaskMode};
use crate::error::{Error, Result};
use crate::metrics::{confusion, roc_auc, ConfusionMatrix, Label, MetricsReport};
use crate::pattern::SignVector;
use crate::perceptron::{self, EpochRecord, Hyperparams, LabeledPattern};
use crate::sim::derive_seed;

/// Bins used for exported readout histograms.
pub const HISTOGRAM_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Digits,
    Semeion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validation {
    /// Train and evaluate on the same instance set.
    Resubstitution,
    /// Train on the train split, evaluate on the held-out test split.
    Holdout,
}

/// What to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TaskSpec {
    /// One binary classifier: positive class vs one negative class, or vs
    /// the rest when `neg` is absent.
    Single { pos: u8, neg: Option<u8> },
    /// The full 10x10 one-vs-one accuracy grid.
    Ovo,
    /// Ten one-vs-all classifiers, one per positive class.
    Ova,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Json,
    Csv,
    Markdown,
}

/// Full experiment configuration. Flags override file values, which
/// override these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    pub train_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub validation: Validation,
    pub task: TaskSpec,
    pub hyperparams: Hyperparams,
    /// Binarization cutoff; when absent the dataset default applies
    /// (10 for digits, 1 for the already-binary Semeion attributes).
    pub binarize_cutoff: Option<u8>,
    pub out: Option<PathBuf>,
    pub format: ExportFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetKind::Digits,
            train_path: None,
            test_path: None,
            validation: Validation::Resubstitution,
            task: TaskSpec::Ovo,
            hyperparams: Hyperparams::default(),
            binarize_cutoff: None,
            out: None,
            format: ExportFormat::Json,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn effective_cutoff(&self) -> u8 {
        self.binarize_cutoff.unwrap_or(match self.dataset {
            DatasetKind::Digits => 10,
            DatasetKind::Semeion => 1,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.hyperparams.validate()?;
        match self.validation {
            Validation::Resubstitution => {
                if self.train_path.is_none() && self.test_path.is_none() {
                    return Err(Error::Config(
                        "resubstitution requires a data path".into(),
                    ));
                }
            }
            Validation::Holdout => {
                if self.train_path.is_none() || self.test_path.is_none() {
                    return Err(Error::Config(
                        "holdout requires both a train path and a test path".into(),
                    ));
                }
            }
        }
        if let TaskSpec::Single { pos, neg } = self.task {
            if pos > 9 || neg.is_some_and(|n| n > 9) {
                return Err(Error::Config("class indices must lie in 0..=9".into()));
            }
        }
        Ok(())
    }

    fn load(&self, path: &Path) -> Result<Vec<RawInstance>> {
        match self.dataset {
            DatasetKind::Digits => datasets::load_optdigits(path),
            DatasetKind::Semeion => datasets::load_semeion(path),
        }
    }

    /// Loads the (train, eval) instance sets for the validation protocol.
    /// Under resubstitution one file serves as both.
    pub fn load_splits(&self) -> Result<(Vec<RawInstance>, Vec<RawInstance>)> {
        self.validate()?;
        match self.validation {
            Validation::Resubstitution => {
                let path = self
                    .train_path
                    .as_ref()
                    .or(self.test_path.as_ref())
                    .expect("checked by validate");
                let data = self.load(path)?;
                Ok((data.clone(), data))
            }
            Validation::Holdout => {
                let train = self.load(self.train_path.as_ref().expect("validated"))?;
                let test = self.load(self.test_path.as_ref().expect("validated"))?;
                Ok((train, test))
            }
        }
    }
}

/// One trained binary task and its evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub pos: u8,
    /// The negative class for one-vs-one tasks; absent for one-vs-all.
    pub neg: Option<u8>,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
    pub history: Vec<EpochRecord>,
    /// Final weight signs; absent for the untrained diagonal tasks.
    pub weights: Option<SignVector>,
    /// Per-instance evaluation readouts; kept for single-task runs only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub readouts: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Outcome {
    Single {
        task: TaskReport,
    },
    Ovo {
        /// `accuracy_grid[pos][neg]`; the diagonal is fixed at 1.0.
        accuracy_grid: Vec<Vec<f64>>,
        tasks: Vec<TaskReport>,
    },
    Ova {
        rows: Vec<TaskReport>,
    },
}

/// Result record with full provenance. Wall time is reported on stderr by
/// the CLI but kept out of serialized artifacts so identical runs export
/// byte-identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub outcome: Outcome,
    #[serde(skip, default)]
    pub wall_seconds: f64,
}

/// Trivial single-class task: every instance is the positive class and is
/// assigned it by definition, with no training.
fn diagonal_report(pos: u8, count: usize) -> TaskReport {
    let cm = ConfusionMatrix::from_counts(count, 0, 0, 0);
    TaskReport {
        pos,
        neg: Some(pos),
        confusion: cm,
        metrics: MetricsReport::from_confusion(&cm, None),
        history: Vec::new(),
        weights: None,
        readouts: None,
    }
}

fn labels_of(set: &[LabeledPattern]) -> Vec<Label> {
    set.iter().map(|lp| lp.label).collect()
}

fn run_task(
    train_insts: &[RawInstance],
    eval_insts: &[RawInstance],
    mode: TaskMode,
    cutoff: u8,
    hp: &Hyperparams,
    keep_readouts: bool,
) -> Result<TaskReport> {
    if let TaskMode::OneVsOne { pos, neg } = mode {
        if pos == neg {
            let task = datasets::select_task(eval_insts, mode, cutoff)?;
            return Ok(diagonal_report(pos, task.len()));
        }
    }
    let train_set = datasets::select_task(train_insts, mode, cutoff)?;
    let eval_set = datasets::select_task(eval_insts, mode, cutoff)?;

    let model = perceptron::train(&train_set, hp)?;
    let evaluation = perceptron::evaluate(&model, &eval_set)?;
    let truths = labels_of(&eval_set);
    let cm = confusion(&evaluation.predictions, &truths)?;
    let auc = roc_auc(&evaluation.readouts, &truths)?;

    let (pos, neg) = match mode {
        TaskMode::OneVsOne { pos, neg } => (pos, Some(neg)),
        TaskMode::OneVsAll { pos } => (pos, None),
    };
    Ok(TaskReport {
        pos,
        neg,
        confusion: cm,
        metrics: MetricsReport::from_confusion(&cm, auc),
        history: model.history,
        weights: Some(model.weights),
        readouts: keep_readouts.then_some(evaluation.readouts),
    })
}

/// Trains and evaluates the single task named by the configuration.
pub fn run_single(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let TaskSpec::Single { pos, neg } = cfg.task else {
        return Err(Error::Config("run_single requires a single task".into()));
    };
    let (train_insts, eval_insts) = cfg.load_splits()?;
    let mode = match neg {
        Some(neg) => TaskMode::OneVsOne { pos, neg },
        None => TaskMode::OneVsAll { pos },
    };
    let task = run_task(
        &train_insts,
        &eval_insts,
        mode,
        cfg.effective_cutoff(),
        &cfg.hyperparams,
        true,
    )?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        seed: cfg.hyperparams.seed,
        outcome: Outcome::Single { task },
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Task id feeding the per-task seed derivation.
fn ovo_task_id(pos: u8, neg: u8) -> u64 {
    u64::from(pos) * 10 + u64::from(neg)
}

fn ova_task_id(pos: u8) -> u64 {
    100 + u64::from(pos)
}

/// Trains all 90 ordered class pairs in parallel and assembles the 10x10
/// accuracy grid; diagonal entries are fixed at 1.0. Each ordered pair is
/// trained independently; a (pos, neg) model is never reused for the
/// (neg, pos) task.
pub fn run_ovo(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    if cfg.task != TaskSpec::Ovo {
        return Err(Error::Config("run_ovo requires the ovo task".into()));
    }
    let (train_insts, eval_insts) = cfg.load_splits()?;
    let cutoff = cfg.effective_cutoff();
    let master = cfg.hyperparams.seed;

    let pairs: Vec<(u8, u8)> = (0u8..10)
        .flat_map(|pos| (0u8..10).map(move |neg| (pos, neg)))
        .filter(|(pos, neg)| pos != neg)
        .collect();

    let mut tasks: Vec<TaskReport> = pairs
        .par_iter()
        .map(|&(pos, neg)| {
            let hp = Hyperparams {
                seed: derive_seed(master, ovo_task_id(pos, neg)),
                ..cfg.hyperparams.clone()
            };
            run_task(
                &train_insts,
                &eval_insts,
                TaskMode::OneVsOne { pos, neg },
                cutoff,
                &hp,
                false,
            )
        })
        .collect::<Result<_>>()?;
    // Order-normalize before export; parallel collect already preserves
    // input order, this pins it independently of the iterator used.
    tasks.sort_by_key(|t| (t.pos, t.neg));

    let mut grid = vec![vec![1.0f64; 10]; 10];
    for task in &tasks {
        let neg = task.neg.expect("ovo task") as usize;
        grid[task.pos as usize][neg] = task
            .metrics
            .accuracy
            .expect("non-empty evaluation set");
    }

    Ok(ExperimentResult {
        config: cfg.clone(),
        seed: master,
        outcome: Outcome::Ovo { accuracy_grid: grid, tasks },
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Trains the ten one-vs-rest classifiers in parallel, one row per class.
pub fn run_ova(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    if cfg.task != TaskSpec::Ova {
        return Err(Error::Config("run_ova requires the ova task".into()));
    }
    let (train_insts, eval_insts) = cfg.load_splits()?;
    let cutoff = cfg.effective_cutoff();
    let master = cfg.hyperparams.seed;

    let mut rows: Vec<TaskReport> = (0u8..10)
        .into_par_iter()
        .map(|pos| {
            let hp = Hyperparams {
                seed: derive_seed(master, ova_task_id(pos)),
                ..cfg.hyperparams.clone()
            };
            run_task(
                &train_insts,
                &eval_insts,
                TaskMode::OneVsAll { pos },
                cutoff,
                &hp,
                false,
            )
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|t| t.pos);

    Ok(ExperimentResult {
        config: cfg.clone(),
        seed: master,
        outcome: Outcome::Ova { rows },
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

fn fmt_metric(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.3}"),
        None => "NA".to_string(),
    }
}

fn csv_of(result: &ExperimentResult) -> String {
    match &result.outcome {
        Outcome::Ovo { accuracy_grid, .. } => {
            let mut out = String::from("pos\\neg,0,1,2,3,4,5,6,7,8,9\n");
            for (pos, row) in accuracy_grid.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|a| format!("{a:.3}")).collect();
                out.push_str(&format!("{pos},{}\n", cells.join(",")));
            }
            out
        }
        Outcome::Ova { rows } => {
            let mut out = String::from("class,recall,accuracy,precision,f1,auc\n");
            for row in rows {
                let m = &row.metrics;
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.pos,
                    fmt_metric(m.recall),
                    fmt_metric(m.accuracy),
                    fmt_metric(m.precision),
                    fmt_metric(m.f1),
                    fmt_metric(m.auc),
                ));
            }
            out
        }
        Outcome::Single { task } => {
            let mut out = String::from(
                "pos,neg,tp,fp,fn,tn,recall,accuracy,precision,f1,auc\n",
            );
            let m = &task.metrics;
            let neg = task.neg.map_or("rest".to_string(), |n| n.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                task.pos,
                neg,
                task.confusion.true_positives,
                task.confusion.false_positives,
                task.confusion.false_negatives,
                task.confusion.true_negatives,
                fmt_metric(m.recall),
                fmt_metric(m.accuracy),
                fmt_metric(m.precision),
                fmt_metric(m.f1),
                fmt_metric(m.auc),
            ));
            out
        }
    }
}

fn markdown_of(result: &ExperimentResult) -> String {
    match &result.outcome {
        Outcome::Ovo { accuracy_grid, .. } => {
            let mut out = String::from(
                "| pos\\neg | 0 | 1 | 2 | 3 | 4 | 5 | 6 | 7 | 8 | 9 |\n\
                 |---|---|---|---|---|---|---|---|---|---|---|\n",
            );
            for (pos, row) in accuracy_grid.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|a| format!("{a:.3}")).collect();
                out.push_str(&format!("| {pos} | {} |\n", cells.join(" | ")));
            }
            out
        }
        Outcome::Ova { rows } => {
            let mut out = String::from(
                "| class | recall | accuracy | precision | f1 | auc |\n\
                 |---|---|---|---|---|---|\n",
            );
            for row in rows {
                let m = &row.metrics;
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    row.pos,
                    fmt_metric(m.recall),
                    fmt_metric(m.accuracy),
                    fmt_metric(m.precision),
                    fmt_metric(m.f1),
                    fmt_metric(m.auc),
                ));
            }
            out
        }
        Outcome::Single { task } => {
            let m = &task.metrics;
            let neg = task.neg.map_or("rest".to_string(), |n| n.to_string());
            format!(
                "| pos | neg | recall | accuracy | precision | f1 | auc |\n\
                 |---|---|---|---|---|---|---|\n\
                 | {} | {} | {} | {} | {} | {} | {} |\n",
                task.pos,
                neg,
                fmt_metric(m.recall),
                fmt_metric(m.accuracy),
                fmt_metric(m.precision),
                fmt_metric(m.f1),
                fmt_metric(m.auc),
            )
        }
    }
}

/// Bins values from [0, 1] into equal-width bins and returns the occupied
/// bins as (lower edge, count), in ascending order. A value of exactly 1.0
/// lands in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, usize)> {
    assert!(bins >= 1);
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v * bins as f64) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(i, c)| (i as f64 / bins as f64, c))
        .collect()
}

fn histogram_csv(values: &[f64]) -> String {
    let mut out = String::from("bin_lower,count\n");
    for (edge, count) in histogram(values, HISTOGRAM_BINS) {
        out.push_str(&format!("{edge},{count}\n"));
    }
    out
}

/// Writes the result in the requested format next to `out_base` and
/// returns the paths written. JSON keeps full provenance; CSV and
/// markdown mirror the table layouts. Single-task runs additionally get a
/// readout histogram CSV.
pub fn export_results(
    result: &ExperimentResult,
    out_base: impl AsRef<Path>,
    format: ExportFormat,
) -> Result<Vec<PathBuf>> {
    let out_base = out_base.as_ref();
    if let Some(dir) = out_base.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut written = Vec::new();
    let path = |ext: &str| out_base.with_extension(ext);
    match format {
        ExportFormat::Json => {
            let mut text = serde_json::to_string_pretty(result)?;
            text.push('\n');
            fs::write(path("json"), text)?;
            written.push(path("json"));
        }
        ExportFormat::Csv => {
            fs::write(path("csv"), csv_of(result))?;
            written.push(path("csv"));
        }
        ExportFormat::Markdown => {
            fs::write(path("md"), markdown_of(result))?;
            written.push(path("md"));
        }
    }
    if let Outcome::Single { task } = &result.outcome {
        if let Some(readouts) = &task.readouts {
            let hist_path = out_base.with_file_name(format!(
                "{}_readouts.csv",
                out_base.file_name().and_then(|s| s.to_str()).unwrap_or("result")
            ));
            fs::write(&hist_path, histogram_csv(readouts))?;
            written.push(hist_path);
        }
    }
    Ok(written)
}

/// Reads back a JSON result exported by [`export_results`].
pub fn import_results_json(path: impl AsRef<Path>) -> Result<ExperimentResult> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
