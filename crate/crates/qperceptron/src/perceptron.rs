//! Thresholded readout classification and online ±1 weight training.
//!
//! The readout of a (pattern, weights) pair is the ancilla's probability of
//! measuring 1 after the classifier circuit runs: `(dot(w, i) / m)^2`. The
//! positive class is assigned when the readout falls strictly below the
//! threshold. Training walks the data online, flipping a learning-rate
//! proportional number of weight entries on every misclassification.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoder::perceptron_circuit;
use crate::error::{Error, Result};
use crate::metrics::{confusion, roc_auc, Label, MetricsReport};
use crate::pattern::{dot, BitPattern, SignVector};
use crate::sim::{run, sample_ones, RngStream};

/// How a readout is produced during training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutMode {
    /// Exact ancilla probability from the statevector.
    Exact,
    /// Fraction of 1s over a finite number of measured shots.
    Sampled,
}

/// Metric a training run may watch for early stopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EarlyStopMetric {
    Accuracy,
    Recall,
    F1,
}

/// Stop training once `metric` reaches `critical` on the training set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStop {
    pub metric: EarlyStopMetric,
    pub critical: f64,
}

/// Training and readout hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Classification threshold on the readout, strictly inside (0, 1).
    pub threshold: f64,
    /// Fraction of eligible positions flipped on a false negative.
    pub lr_pos: f64,
    /// Fraction of eligible positions flipped on a false positive.
    pub lr_neg: f64,
    /// Shots per readout in sampled mode.
    pub shots: u64,
    pub readout_mode: ReadoutMode,
    pub epochs: usize,
    pub early_stop: Option<EarlyStop>,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            lr_pos: 0.05,
            lr_neg: 0.05,
            shots: 1000,
            readout_mode: ReadoutMode::Exact,
            epochs: 10,
            early_stop: None,
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidHyperparams(format!(
                "threshold {} must lie strictly inside (0, 1)",
                self.threshold
            )));
        }
        for (name, lr) in [("lr_pos", self.lr_pos), ("lr_neg", self.lr_neg)] {
            if !(lr > 0.0 && lr <= 1.0) {
                return Err(Error::InvalidHyperparams(format!(
                    "{name} {lr} must lie in (0, 1]"
                )));
            }
        }
        if self.shots == 0 {
            return Err(Error::InvalidHyperparams("shots must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidHyperparams("epochs must be >= 1".into()));
        }
        if let Some(stop) = &self.early_stop {
            if !(stop.critical > 0.0 && stop.critical <= 1.0) {
                return Err(Error::InvalidHyperparams(format!(
                    "early-stop critical value {} must lie in (0, 1]",
                    stop.critical
                )));
            }
        }
        Ok(())
    }
}

/// A training or evaluation instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPattern {
    pub pattern: BitPattern,
    pub label: Label,
}

/// Training-set measures recorded after each epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
}

/// A trained weight vector with its per-epoch history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub weights: SignVector,
    pub history: Vec<EpochRecord>,
    pub hyperparams: Hyperparams,
}

/// Predictions and raw readouts over a dataset, in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub predictions: Vec<Label>,
    pub readouts: Vec<f64>,
}

impl Evaluation {
    pub fn metrics(&self, truths: &[Label]) -> Result<MetricsReport> {
        let cm = confusion(&self.predictions, truths)?;
        let auc = roc_auc(&self.readouts, truths)?;
        Ok(MetricsReport::from_confusion(&cm, auc))
    }
}

/// Uniform i.i.d. random weight vector in `{-1, +1}^m`.
pub fn random_weights(m: usize, rng: &mut RngStream) -> Result<SignVector> {
    SignVector::new((0..m).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())
}

/// Exact readout: runs the classifier circuit and returns the ancilla's
/// probability of 1, which equals `(dot(w, i) / m)^2`.
pub fn exact_readout(input: &SignVector, weights: &SignVector) -> Result<f64> {
    let circuit = perceptron_circuit(input, weights)?;
    let state = run(&circuit)?;
    state.prob_one(input.num_qubits())
}

/// Measured readout: fraction of 1s over `shots` ancilla measurements.
pub fn sampled_readout(
    input: &SignVector,
    weights: &SignVector,
    shots: u64,
    rng: &mut RngStream,
) -> Result<f64> {
    let p = exact_readout(input, weights)?;
    Ok(sample_ones(p, shots, rng) as f64 / shots as f64)
}

/// Positive iff the readout is strictly below the threshold.
pub fn classify(readout: f64, threshold: f64) -> Label {
    if readout < threshold {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Number of positions to flip: ceil(rate * pool), guarded against the
/// float noise of exact multiples (0.05 * 40 must give 2, not 3).
fn flip_count(rate: f64, pool: usize) -> usize {
    if pool == 0 {
        return 0;
    }
    let raw = rate * pool as f64;
    ((raw - 1e-9).ceil() as usize).clamp(1, pool)
}

/// One misclassification update. Returns the new weight vector.
///
/// False positive (the true label is negative): the squared overlap must
/// grow, so a `lr_neg` fraction of the positions where `weights` disagrees
/// with `input` is flipped into agreement; each flip raises the dot by 2.
///
/// False negative (the true label is positive): the squared overlap must
/// shrink toward zero, so flips move the dot toward 0 from whichever side
/// it is on, capped at `|dot| / 2` flips so the dot never crosses zero
/// (the readout is a squared overlap; overshooting past zero would raise
/// it again).
pub fn update_weights(
    weights: &SignVector,
    input: &SignVector,
    true_label: Label,
    hp: &Hyperparams,
    rng: &mut RngStream,
) -> Result<SignVector> {
    if weights.len() != input.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: input.len(),
        });
    }
    let mut new_signs = weights.signs().to_vec();
    match true_label {
        Label::Negative => {
            let disagree: Vec<usize> = (0..weights.len())
                .filter(|&j| weights.signs()[j] != input.signs()[j])
                .collect();
            let f = flip_count(hp.lr_neg, disagree.len());
            for &j in disagree.as_slice().choose_multiple(rng, f) {
                new_signs[j] = input.signs()[j];
            }
        }
        Label::Positive => {
            let d = dot(weights, input)?;
            if d == 0 {
                return Ok(weights.clone());
            }
            let pool: Vec<usize> = (0..weights.len())
                .filter(|&j| {
                    let agrees = weights.signs()[j] == input.signs()[j];
                    if d > 0 {
                        agrees
                    } else {
                        !agrees
                    }
                })
                .collect();
            let f = flip_count(hp.lr_pos, pool.len()).min(d.unsigned_abs() as usize / 2);
            for &j in pool.as_slice().choose_multiple(rng, f) {
                new_signs[j] = -new_signs[j];
            }
        }
    }
    Ok(SignVector::new(new_signs).expect("flips preserve sign-vector invariants"))
}

fn readout_for(
    input: &SignVector,
    weights: &SignVector,
    hp: &Hyperparams,
    rng: &mut RngStream,
) -> Result<f64> {
    match hp.readout_mode {
        ReadoutMode::Exact => exact_readout(input, weights),
        ReadoutMode::Sampled => sampled_readout(input, weights, hp.shots, rng),
    }
}

/// Trains a weight vector online.
///
/// Weights start uniformly random in `{-1, +1}^m` from the seed. Each epoch
/// shuffles the data (seeded), walks it once updating on every
/// misclassification, then records training-set metrics (computed with
/// exact readouts so the history is deterministic in sampled mode too).
/// Training ends after `epochs` epochs or as soon as the early-stop metric
/// reaches its critical value.
pub fn train(data: &[LabeledPattern], hp: &Hyperparams) -> Result<TrainedModel> {
    hp.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("training set is empty".into()));
    }
    let m = data[0].pattern.len();
    for lp in data {
        if lp.pattern.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: lp.pattern.len(),
            });
        }
    }

    let inputs: Vec<SignVector> = data.iter().map(|lp| lp.pattern.to_signs()).collect();
    let truths: Vec<Label> = data.iter().map(|lp| lp.label).collect();

    let mut rng = RngStream::new(hp.seed);
    let mut weights = random_weights(m, &mut rng)?;

    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut history = Vec::new();

    for epoch in 1..=hp.epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let readout = readout_for(&inputs[idx], &weights, hp, &mut rng)?;
            if classify(readout, hp.threshold) != truths[idx] {
                weights = update_weights(&weights, &inputs[idx], truths[idx], hp, &mut rng)?;
            }
        }

        let predictions: Vec<Label> = inputs
            .iter()
            .map(|i| Ok(classify(exact_readout(i, &weights)?, hp.threshold)))
            .collect::<Result<_>>()?;
        let cm = confusion(&predictions, &truths)?;
        history.push(EpochRecord {
            epoch,
            accuracy: cm.accuracy(),
            recall: cm.tpr(),
            precision: cm.ppv(),
            f1: cm.f1(),
        });

        if let Some(stop) = &hp.early_stop {
            let value = match stop.metric {
                EarlyStopMetric::Accuracy => cm.accuracy(),
                EarlyStopMetric::Recall => cm.tpr(),
                EarlyStopMetric::F1 => cm.f1(),
            };
            if value.is_some_and(|v| v >= stop.critical) {
                break;
            }
        }
    }

    Ok(TrainedModel {
        weights,
        history,
        hyperparams: hp.clone(),
    })
}

/// Evaluates a model with exact readouts; pure and repeatable.
pub fn evaluate(model: &TrainedModel, data: &[LabeledPattern]) -> Result<Evaluation> {
    let mut predictions = Vec::with_capacity(data.len());
    let mut readouts = Vec::with_capacity(data.len());
    for lp in data {
        let r = exact_readout(&lp.pattern.to_signs(), &model.weights)?;
        predictions.push(classify(r, model.hyperparams.threshold));
        readouts.push(r);
    }
    Ok(Evaluation { predictions, readouts })
}

/// Evaluates with measured readouts, drawing shot noise from `rng`.
pub fn evaluate_sampled(
    model: &TrainedModel,
    data: &[LabeledPattern],
    shots: u64,
    rng: &mut RngStream,
) -> Result<Evaluation> {
    let mut predictions = Vec::with_capacity(data.len());
    let mut readouts = Vec::with_capacity(data.len());
    for lp in data {
        let r = sampled_readout(&lp.pattern.to_signs(), &model.weights, shots, rng)?;
        predictions.push(classify(r, model.hyperparams.threshold));
        readouts.push(r);
    }
    Ok(Evaluation { predictions, readouts })
}

impl TrainedModel {
    /// Plain-text model record: dimension, ±1 weight entries, hyperparams.
    pub fn to_text(&self) -> String {
        let hp = &self.hyperparams;
        let mut out = String::new();
        let _ = writeln!(out, "dimension {}", self.weights.len());
        let entries: Vec<String> = self.weights.signs().iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "weights {}", entries.join(" "));
        let _ = writeln!(out, "threshold {}", hp.threshold);
        let _ = writeln!(out, "lr_pos {}", hp.lr_pos);
        let _ = writeln!(out, "lr_neg {}", hp.lr_neg);
        let _ = writeln!(out, "shots {}", hp.shots);
        let _ = writeln!(
            out,
            "readout_mode {}",
            match hp.readout_mode {
                ReadoutMode::Exact => "exact",
                ReadoutMode::Sampled => "sampled",
            }
        );
        let _ = writeln!(out, "epochs {}", hp.epochs);
        if let Some(stop) = &hp.early_stop {
            let name = match stop.metric {
                EarlyStopMetric::Accuracy => "accuracy",
                EarlyStopMetric::Recall => "recall",
                EarlyStopMetric::F1 => "f1",
            };
            let _ = writeln!(out, "early_stop {name} {}", stop.critical);
        }
        let _ = writeln!(out, "seed {}", hp.seed);
        out
    }

    /// Parses a record produced by [`TrainedModel::to_text`]. The history
    /// is not part of the record and comes back empty.
    pub fn from_text(text: &str) -> Result<TrainedModel> {
        let mut dimension: Option<usize> = None;
        let mut weights: Option<SignVector> = None;
        let mut hp = Hyperparams::default();

        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(' ')
                .ok_or_else(|| Error::ModelFormat(format!("bad line: {line}")))?;
            let bad = |what: &str| Error::ModelFormat(format!("bad {what}: {rest}"));
            match key {
                "dimension" => dimension = Some(rest.parse().map_err(|_| bad("dimension"))?),
                "weights" => {
                    let signs: Vec<i8> = rest
                        .split_whitespace()
                        .map(|t| t.parse::<i8>().map_err(|_| bad("weight entry")))
                        .collect::<Result<_>>()?;
                    weights = Some(SignVector::new(signs).map_err(|e| {
                        Error::ModelFormat(format!("weights: {e}"))
                    })?);
                }
                "threshold" => hp.threshold = rest.parse().map_err(|_| bad("threshold"))?,
                "lr_pos" => hp.lr_pos = rest.parse().map_err(|_| bad("lr_pos"))?,
                "lr_neg" => hp.lr_neg = rest.parse().map_err(|_| bad("lr_neg"))?,
                "shots" => hp.shots = rest.parse().map_err(|_| bad("shots"))?,
                "readout_mode" => {
                    hp.readout_mode = match rest {
                        "exact" => ReadoutMode::Exact,
                        "sampled" => ReadoutMode::Sampled,
                        _ => return Err(bad("readout_mode")),
                    }
                }
                "epochs" => hp.epochs = rest.parse().map_err(|_| bad("epochs"))?,
                "early_stop" => {
                    let (name, value) = rest
                        .split_once(' ')
                        .ok_or_else(|| bad("early_stop"))?;
                    let metric = match name {
                        "accuracy" => EarlyStopMetric::Accuracy,
                        "recall" => EarlyStopMetric::Recall,
                        "f1" => EarlyStopMetric::F1,
                        _ => return Err(bad("early_stop metric")),
                    };
                    hp.early_stop = Some(EarlyStop {
                        metric,
                        critical: value.parse().map_err(|_| bad("early_stop value"))?,
                    });
                }
                "seed" => hp.seed = rest.parse().map_err(|_| bad("seed"))?,
                _ => return Err(Error::ModelFormat(format!("unknown key: {key}"))),
            }
        }

        let weights = weights.ok_or_else(|| Error::ModelFormat("missing weights".into()))?;
        if let Some(d) = dimension {
            if d != weights.len() {
                return Err(Error::ModelFormat(format!(
                    "dimension {d} does not match {} weight entries",
                    weights.len()
                )));
            }
        }
        hp.validate()?;
        Ok(TrainedModel {
            weights,
            history: Vec::new(),
            hyperparams: hp,
        })
    }
}
