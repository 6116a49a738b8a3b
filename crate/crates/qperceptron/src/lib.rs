//! Quantum perceptron binary classifier for binary-attribute images.
//!
//! A pattern of `m = 2^N` bits becomes a ±1 sign vector carried in the
//! amplitude signs of an `N`-qubit uniform superposition. Loading the input
//! state, applying the weight vector's inverse preparation, and toggling an
//! ancilla off the all-ones component leaves the ancilla reading 1 with
//! probability `(w·i / m)^2`, the squared normalized overlap of weights and
//! input. Thresholding that readout gives a binary classifier whose ±1
//! weight vector is trained online by sign flips.
//!
//! Modules:
//! - [`pattern`]: bit patterns, sign vectors, integer inner products.
//! - [`sim`]: dense statevector simulation of H/X/MCZ/MCX circuits with
//!   exact probabilities and seeded shot sampling.
//! - [`encoder`]: compiles sign vectors into state-preparation circuits and
//!   assembles the full classifier circuit.
//! - [`perceptron`]: readout, thresholded classification, online training.
//! - [`datasets`]: optdigits / Semeion loaders, binarization, task
//!   selection.
//! - [`metrics`]: confusion matrices, accuracy/TPR/PPV/F1, ROC AUC.
//! - [`experiment`]: configuration, OvO grids, OvA sweeps, serialization.

pub mod datasets;
pub mod encoder;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod pattern;
pub mod perceptron;
pub mod sim;

pub use error::{Error, Result};
pub use metrics::Label;
pub use pattern::{dot, BitPattern, SignVector};
pub use perceptron::{Hyperparams, LabeledPattern, TrainedModel};
pub use sim::{Gate, QuantumCircuit, RngStream, StateVector};
