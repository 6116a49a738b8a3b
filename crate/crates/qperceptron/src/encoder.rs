//! Compiles ±1 sign vectors into state-preparation circuits.
//!
//! A sign vector of length `m = 2^N` describes the target amplitude signs of
//! a uniform-magnitude superposition over `N` qubits. Such states are
//! prepared by Hadamards on every qubit followed by multi-controlled Z gates
//! that flip exactly the basis states whose sign must become negative.
//!
//! The same gate set, read in reverse order around a Hadamard layer, maps a
//! prepared state back to `|1...1>`, which is what connects the ancilla
//! readout to the inner product of two sign vectors.

use crate::error::{Error, Result};
use crate::pattern::SignVector;
use crate::sim::{Gate, QuantumCircuit};

/// MCZ gate sequence realizing a sign pattern, plus whether the whole
/// vector was negated first.
///
/// The sign at basis index 0 cannot be flipped by an MCZ over a non-empty
/// qubit set, so a leading -1 is normalized away by negating the entire
/// target vector; the resulting state differs only by a global phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledEncoding {
    pub sign_gates: Vec<Gate>,
    pub global_flip: bool,
}

/// Compiles the MCZ sequence whose product maps the all-(+1) sign pattern
/// to `signs` (normalized so index 0 carries +1).
///
/// Qubit subsets are visited in increasing cardinality, ties broken by the
/// subset's basis index; a gate is emitted whenever the working sign at the
/// subset's own index still disagrees with the target. Each subset is
/// visited after all of its proper subsets, so at most one MCZ per subset
/// is ever needed and the working pattern ends exactly on target.
pub fn compile_signs(signs: &SignVector) -> CompiledEncoding {
    let m = signs.len();
    let global_flip = signs.signs()[0] < 0;
    let target: Vec<i8> = if global_flip {
        signs.signs().iter().map(|&s| -s).collect()
    } else {
        signs.signs().to_vec()
    };

    let mut masks: Vec<usize> = (1..m).collect();
    masks.sort_unstable_by_key(|&s| (s.count_ones(), s));

    let mut cur = vec![1i8; m];
    let mut sign_gates = Vec::new();
    for mask in masks {
        if cur[mask] != target[mask] {
            let qubits: Vec<usize> =
                (0..usize::BITS as usize).filter(|q| mask >> q & 1 == 1).collect();
            sign_gates.push(Gate::mcz(qubits).expect("mask is non-empty"));
            for (j, c) in cur.iter_mut().enumerate().skip(mask) {
                if j & mask == mask {
                    *c = -*c;
                }
            }
        }
    }
    debug_assert_eq!(cur, target);

    CompiledEncoding { sign_gates, global_flip }
}

/// Circuit preparing the uniform-magnitude state with amplitude signs
/// `signs` from `|0...0>`: Hadamards on all `N` qubits, then the compiled
/// MCZ sequence. The prepared amplitudes are `g * signs[j] / sqrt(m)` with
/// `g = -1` when the encoding was globally flipped.
pub fn preparation_circuit(signs: &SignVector) -> Result<QuantumCircuit> {
    let n = signs.num_qubits();
    let mut circuit = QuantumCircuit::new(n)?;
    circuit.extend((0..n).map(Gate::h))?;
    circuit.extend(compile_signs(signs).sign_gates)?;
    Ok(circuit)
}

/// Circuit mapping the prepared state of `signs` to `|1...1>` (up to global
/// phase): the compiled MCZ sequence, Hadamards on all qubits, then X on
/// all qubits.
pub fn inversion_circuit(signs: &SignVector) -> Result<QuantumCircuit> {
    let n = signs.num_qubits();
    let mut circuit = QuantumCircuit::new(n)?;
    circuit.extend(compile_signs(signs).sign_gates)?;
    circuit.extend((0..n).map(Gate::h))?;
    circuit.extend((0..n).map(Gate::x))?;
    Ok(circuit)
}

/// Full classifier circuit over `N + 1` qubits: prepare the input state,
/// apply the weight inversion on the `N` encoding qubits, then toggle the
/// ancilla (qubit `N`) with an X controlled on all encoding qubits.
///
/// After running, the ancilla's probability of reading 1 equals
/// `(dot(weights, input) / m)^2`.
pub fn perceptron_circuit(input: &SignVector, weights: &SignVector) -> Result<QuantumCircuit> {
    if input.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: input.len(),
            found: weights.len(),
        });
    }
    let n = input.num_qubits();
    let mut circuit = QuantumCircuit::new(n + 1)?;
    circuit.extend(preparation_circuit(input)?.gates().to_vec())?;
    circuit.extend(inversion_circuit(weights)?.gates().to_vec())?;
    circuit.push(Gate::mcx((0..n).collect::<Vec<_>>(), n)?)?;
    Ok(circuit)
}

/// Size figures for a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitStats {
    pub gate_count: usize,
    /// Greedy left-to-right layering depth; gates sharing any qubit cannot
    /// share a layer.
    pub layer_count: usize,
    pub max_control_arity: usize,
}

pub fn circuit_stats(circuit: &QuantumCircuit) -> CircuitStats {
    let mut qubit_depth = vec![0usize; circuit.num_qubits()];
    let mut layer_count = 0;
    let mut max_control_arity = 0;
    for gate in circuit.gates() {
        let layer = gate
            .qubits()
            .iter()
            .map(|&q| qubit_depth[q])
            .max()
            .unwrap_or(0)
            + 1;
        for q in gate.qubits() {
            qubit_depth[q] = layer;
        }
        layer_count = layer_count.max(layer);
        max_control_arity = max_control_arity.max(gate.control_arity());
    }
    CircuitStats {
        gate_count: circuit.gates().len(),
        layer_count,
        max_control_arity,
    }
}
