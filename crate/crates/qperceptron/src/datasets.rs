//! Loaders for the two digit datasets, binarization, and task selection.
//!
//! Both file layouts follow the datasets' public repository formats:
//! optdigits lines carry 64 comma-separated attributes in 0..=16 plus a
//! class label; Semeion lines carry 256 whitespace-separated binary pixels
//! (possibly written as decimals like `0.0000`) followed by a one-hot
//! ten-entry label block.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Label;
use crate::pattern::BitPattern;
use crate::perceptron::LabeledPattern;

pub const OPTDIGITS_ATTRIBUTES: usize = 64;
pub const SEMEION_ATTRIBUTES: usize = 256;

/// One dataset row: raw attribute values and the digit class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInstance {
    pub attributes: Vec<u8>,
    pub class_label: u8,
}

impl RawInstance {
    /// Validates attribute count (64 or 256), value ranges (0..=16 for 64
    /// attributes, binary for 256) and the class label.
    pub fn new(attributes: Vec<u8>, class_label: u8) -> Result<Self> {
        let max = match attributes.len() {
            OPTDIGITS_ATTRIBUTES => 16,
            SEMEION_ATTRIBUTES => 1,
            n => {
                return Err(Error::InvalidPattern(format!(
                    "instance has {n} attributes (expected 64 or 256)"
                )))
            }
        };
        if let Some(bad) = attributes.iter().find(|&&v| v > max) {
            return Err(Error::InvalidPattern(format!(
                "attribute value {bad} exceeds {max}"
            )));
        }
        if class_label > 9 {
            return Err(Error::InvalidPattern(format!(
                "class label {class_label} outside 0..=9"
            )));
        }
        Ok(Self { attributes, class_label })
    }
}

/// Class balance summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total_instances: usize,
    pub class_counts: [usize; 10],
    /// Majority class count over minority class count, among the classes
    /// that appear at all.
    pub imbalance_ratio: f64,
}

/// Parses an optdigits partition file: one instance per line, 65
/// comma-separated integers (64 attributes then the class label).
pub fn load_optdigits(path: impl AsRef<Path>) -> Result<Vec<RawInstance>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path)?;
    let mut instances = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != OPTDIGITS_ATTRIBUTES + 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("expected 65 comma-separated fields, found {}", fields.len()),
            });
        }
        let mut values = Vec::with_capacity(OPTDIGITS_ATTRIBUTES + 1);
        for field in &fields {
            let v: u8 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("not an integer: {field:?}"),
            })?;
            values.push(v);
        }
        let class_label = values.pop().expect("65 fields");
        instances.push(RawInstance::new(values, class_label).map_err(|e| Error::Validation {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: e.to_string(),
        })?);
    }
    Ok(instances)
}

/// Parses the Semeion file: 256 whitespace-separated binary pixels then a
/// ten-entry one-hot class block per line. Pixels may be written in
/// decimal form (`0.0000`); each value must round to exactly 0 or 1 within
/// 1e-9.
pub fn load_semeion(path: impl AsRef<Path>) -> Result<Vec<RawInstance>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path)?;
    let mut instances = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let validation_err = |msg: String| Error::Validation {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg,
        };

        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != SEMEION_ATTRIBUTES + 10 {
            return Err(parse_err(format!(
                "expected 266 whitespace-separated fields, found {}",
                tokens.len()
            )));
        }
        let mut bits = Vec::with_capacity(SEMEION_ATTRIBUTES + 10);
        for token in &tokens {
            let v: f64 = token
                .parse()
                .map_err(|_| parse_err(format!("not a number: {token:?}")))?;
            let rounded = v.round();
            if (v - rounded).abs() > 1e-9 || !(rounded == 0.0 || rounded == 1.0) {
                return Err(validation_err(format!("value {token:?} is not binary")));
            }
            bits.push(rounded as u8);
        }
        let label_block = bits.split_off(SEMEION_ATTRIBUTES);
        let ones: Vec<usize> = label_block
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
            .collect();
        let class_label = match ones.as_slice() {
            [single] => *single as u8,
            _ => {
                return Err(validation_err(format!(
                    "label block has {} ones (expected exactly one)",
                    ones.len()
                )))
            }
        };
        instances.push(
            RawInstance::new(bits, class_label)
                .map_err(|e| validation_err(e.to_string()))?,
        );
    }
    Ok(instances)
}

/// Serializes instances back to the optdigits line format.
pub fn write_optdigits(path: impl AsRef<Path>, instances: &[RawInstance]) -> Result<()> {
    let mut out = String::new();
    for inst in instances {
        let fields: Vec<String> = inst
            .attributes
            .iter()
            .map(|v| v.to_string())
            .chain(std::iter::once(inst.class_label.to_string()))
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Serializes instances back to the Semeion line format.
pub fn write_semeion(path: impl AsRef<Path>, instances: &[RawInstance]) -> Result<()> {
    let mut out = String::new();
    for inst in instances {
        let mut fields: Vec<String> =
            inst.attributes.iter().map(|v| format!("{:.4}", f64::from(*v))).collect();
        for class in 0u8..10 {
            fields.push(if class == inst.class_label { "1" } else { "0" }.to_string());
        }
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Thresholds raw attributes into bits: values below the cutoff become 0,
/// the rest become 1. Cutoff 1 is the identity on already-binary data.
pub fn binarize(inst: &RawInstance, cutoff: u8) -> Result<BitPattern> {
    BitPattern::new(
        inst.attributes
            .iter()
            .map(|&v| u8::from(v >= cutoff))
            .collect(),
    )
}

/// Binary task construction over a ten-class dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskMode {
    /// Positive class versus one negative class. With `pos == neg` every
    /// instance of the class is kept and labeled positive (the trivial
    /// single-class task on the grid diagonal).
    OneVsOne { pos: u8, neg: u8 },
    /// Positive class versus all other classes.
    OneVsAll { pos: u8 },
}

/// Filters and labels instances for a binary task, binarizing with the
/// given cutoff. Input order is preserved.
pub fn select_task(
    data: &[RawInstance],
    mode: TaskMode,
    cutoff: u8,
) -> Result<Vec<LabeledPattern>> {
    let mut selected = Vec::new();
    for inst in data {
        let label = match mode {
            TaskMode::OneVsOne { pos, neg } => {
                if inst.class_label == pos {
                    Some(Label::Positive)
                } else if inst.class_label == neg {
                    Some(Label::Negative)
                } else {
                    None
                }
            }
            TaskMode::OneVsAll { pos } => Some(if inst.class_label == pos {
                Label::Positive
            } else {
                Label::Negative
            }),
        };
        if let Some(label) = label {
            selected.push(LabeledPattern {
                pattern: binarize(inst, cutoff)?,
                label,
            });
        }
    }
    if selected.is_empty() {
        return Err(Error::EmptyInput(format!("task {mode:?} selects no instances")));
    }
    Ok(selected)
}

/// Per-class counts and the majority/minority ratio.
pub fn dataset_stats(data: &[RawInstance]) -> Result<DatasetStats> {
    if data.is_empty() {
        return Err(Error::EmptyInput("dataset is empty".into()));
    }
    let mut class_counts = [0usize; 10];
    for inst in data {
        class_counts[inst.class_label as usize] += 1;
    }
    let present = class_counts.iter().copied().filter(|&c| c > 0);
    let max = present.clone().max().expect("non-empty");
    let min = present.min().expect("non-empty");
    Ok(DatasetStats {
        total_instances: data.len(),
        class_counts,
        imbalance_ratio: max as f64 / min as f64,
    })
}

/// Resolves a dataset path for tests and the acceptance suite: the
/// `QPERCEPTRON_DATA` directory when set, otherwise `data/` at the
/// workspace root.
pub fn default_data_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("QPERCEPTRON_DATA") {
        return PathBuf::from(dir);
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn optdigits_line(fill: u8, label: u8) -> String {
        let mut fields = vec![fill.to_string(); OPTDIGITS_ATTRIBUTES];
        fields.push(label.to_string());
        fields.join(",")
    }

    fn semeion_line(fill: u8, class: u8) -> String {
        let mut fields = vec![format!("{fill}.0000"); SEMEION_ATTRIBUTES];
        for c in 0..10 {
            fields.push(if c == class { "1" } else { "0" }.to_string());
        }
        fields.join(" ")
    }

    #[test]
    fn optdigits_parses_well_formed_lines() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("toy.tes");
        let content = format!("{}\n{}\n", optdigits_line(3, 7), optdigits_line(16, 0));
        std::fs::write(&path, content).unwrap();
        let data = load_optdigits(&path).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data[0].attributes.len(), 64);
        assert_eq!(data[0].class_label, 7);
        assert_eq!(data[1].attributes[0], 16);
    }

    #[test]
    fn optdigits_reports_line_numbers_on_errors() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.tes");
        std::fs::write(&path, format!("{}\n1,2,3\n", optdigits_line(0, 1))).unwrap();
        match load_optdigits(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        let path = dir.path().join("range.tes");
        std::fs::write(&path, format!("{}\n", optdigits_line(17, 1))).unwrap();
        assert!(matches!(load_optdigits(&path), Err(Error::Validation { line: 1, .. })));
    }

    #[test]
    fn semeion_decodes_one_hot_labels() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("toy.data");
        let content = format!("{}\n{}\n", semeion_line(1, 4), semeion_line(0, 9));
        std::fs::write(&path, content).unwrap();
        let data = load_semeion(&path).unwrap();
        assert_eq!(data.len(), 2);
        assert_eq!(data[0].class_label, 4);
        assert_eq!(data[1].class_label, 9);
        assert!(data[0].attributes.iter().all(|&b| b == 1));
    }

    #[test]
    fn semeion_rejects_double_ones_in_label_block() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("double.data");
        let mut fields = vec!["0".to_string(); SEMEION_ATTRIBUTES];
        fields.extend(["1", "0", "0", "1", "0", "0", "0", "0", "0", "0"].map(String::from));
        std::fs::write(&path, fields.join(" ")).unwrap();
        assert!(matches!(
            load_semeion(&path),
            Err(Error::Validation { line: 1, .. })
        ));
    }

    #[test]
    fn semeion_rejects_non_binary_pixels() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("half.data");
        let mut fields = vec!["0.5".to_string()];
        fields.extend(vec!["0".to_string(); SEMEION_ATTRIBUTES - 1]);
        fields.extend(["0", "0", "0", "0", "0", "0", "0", "0", "0", "1"].map(String::from));
        std::fs::write(&path, fields.join(" ")).unwrap();
        assert!(matches!(
            load_semeion(&path),
            Err(Error::Validation { line: 1, .. })
        ));
    }

    #[test]
    fn loaders_round_trip_through_writers() {
        let dir = tempdir().unwrap();
        let opt: Vec<RawInstance> = (0..6)
            .map(|k| {
                RawInstance::new(
                    (0..64).map(|j| ((j + k) % 17) as u8).collect(),
                    (k % 10) as u8,
                )
                .unwrap()
            })
            .collect();
        let path = dir.path().join("rt.tra");
        write_optdigits(&path, &opt).unwrap();
        assert_eq!(load_optdigits(&path).unwrap(), opt);

        let sem: Vec<RawInstance> = (0..4)
            .map(|k| {
                RawInstance::new(
                    (0..256).map(|j| ((j + k) % 2) as u8).collect(),
                    (k % 10) as u8,
                )
                .unwrap()
            })
            .collect();
        let path = dir.path().join("rt.data");
        write_semeion(&path, &sem).unwrap();
        assert_eq!(load_semeion(&path).unwrap(), sem);
    }

    #[test]
    fn binarize_uses_strictly_less_than_cutoff() {
        let mut attrs = vec![0u8; 64];
        attrs[0] = 9;
        attrs[1] = 10;
        attrs[2] = 16;
        let inst = RawInstance::new(attrs, 0).unwrap();
        let bits = binarize(&inst, 10).unwrap();
        assert_eq!(&bits.bits()[..4], &[0, 1, 1, 0]);
    }

    #[test]
    fn binarize_all_zero_and_semeion_identity() {
        let zero = RawInstance::new(vec![0; 64], 3).unwrap();
        assert!(binarize(&zero, 10).unwrap().bits().iter().all(|&b| b == 0));

        let sem = RawInstance::new((0..256).map(|j| (j % 2) as u8).collect(), 1).unwrap();
        let bits = binarize(&sem, 1).unwrap();
        assert_eq!(bits.bits(), sem.attributes.as_slice());
    }

    #[test]
    fn binarize_is_idempotent_on_its_own_output() {
        let inst = RawInstance::new((0..64).map(|j| (j % 17) as u8).collect(), 0).unwrap();
        for cutoff in [1u8, 5, 10, 16] {
            let once = binarize(&inst, cutoff).unwrap();
            let again = RawInstance::new(once.bits().to_vec(), 0);
            // 64 binary attributes are still within the optdigits range.
            let twice = binarize(&again.unwrap(), 1).unwrap();
            assert_eq!(once, twice);
        }
    }

    fn toy_tenclass() -> Vec<RawInstance> {
        // Ten classes with counts 3,3,...,3 except class 0 gets 5.
        let mut data = Vec::new();
        for class in 0u8..10 {
            let copies = if class == 0 { 5 } else { 3 };
            for k in 0..copies {
                data.push(
                    RawInstance::new(vec![(class + k) % 17; 64], class).unwrap(),
                );
            }
        }
        data
    }

    #[test]
    fn select_ovo_filters_and_labels() {
        let data = toy_tenclass();
        let task = select_task(&data, TaskMode::OneVsOne { pos: 3, neg: 0 }, 10).unwrap();
        assert_eq!(task.len(), 8);
        assert_eq!(task.iter().filter(|lp| lp.label == Label::Positive).count(), 3);
    }

    #[test]
    fn select_ova_labels_everything() {
        let data = toy_tenclass();
        let task = select_task(&data, TaskMode::OneVsAll { pos: 0 }, 10).unwrap();
        assert_eq!(task.len(), data.len());
        assert_eq!(task.iter().filter(|lp| lp.label == Label::Positive).count(), 5);
    }

    #[test]
    fn diagonal_task_keeps_one_class_all_positive() {
        let data = toy_tenclass();
        let task = select_task(&data, TaskMode::OneVsOne { pos: 4, neg: 4 }, 10).unwrap();
        assert_eq!(task.len(), 3);
        assert!(task.iter().all(|lp| lp.label == Label::Positive));
    }

    #[test]
    fn select_task_rejects_empty_selection() {
        let data = vec![RawInstance::new(vec![0; 64], 1).unwrap()];
        assert!(matches!(
            select_task(&data, TaskMode::OneVsOne { pos: 2, neg: 3 }, 10),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn stats_of_balanced_set_are_one() {
        let data: Vec<RawInstance> = (0..10)
            .flat_map(|c| {
                (0..4).map(move |_| RawInstance::new(vec![0; 64], c).unwrap())
            })
            .collect();
        let stats = dataset_stats(&data).unwrap();
        assert_eq!(stats.total_instances, 40);
        assert_eq!(stats.imbalance_ratio, 1.0);
    }

    #[test]
    fn stats_ratio_is_majority_over_minority() {
        let stats = dataset_stats(&toy_tenclass()).unwrap();
        assert_eq!(stats.total_instances, 32);
        assert_eq!(stats.class_counts[0], 5);
        assert!((stats.imbalance_ratio - 5.0 / 3.0).abs() < 1e-12);
    }
}
