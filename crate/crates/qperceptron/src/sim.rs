//! Dense statevector simulation of H / X / multi-controlled-Z /
//! multi-controlled-X circuits.
//!
//! Qubit `q` is bit `q` of the basis-state index (qubit 0 is least
//! significant), so basis state `|j>` of an `N`-qubit register corresponds
//! to pixel `j` of a pattern. Registers are capped at 16 qubits; every
//! register used by the classifier is at most 9.

use std::fmt;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest supported register.
pub const MAX_QUBITS: usize = 16;

/// Tolerance for norm and amplitude equality checks. Double precision over
/// a few hundred gates stays orders of magnitude below this.
pub const NORM_TOL: f64 = 1e-12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// One gate of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    /// Hadamard on one qubit.
    H { target: usize },
    /// NOT on one qubit.
    X { target: usize },
    /// Z on the non-empty qubit set: negates amplitudes of basis states
    /// whose bits include every listed qubit.
    Mcz { qubits: Vec<usize> },
    /// NOT on `target`, applied where every control bit is set.
    Mcx { controls: Vec<usize>, target: usize },
}

impl Gate {
    pub fn h(target: usize) -> Gate {
        Gate::H { target }
    }

    pub fn x(target: usize) -> Gate {
        Gate::X { target }
    }

    /// Multi-controlled Z over a qubit set; sorted and deduplicated.
    pub fn mcz(qubits: impl Into<Vec<usize>>) -> Result<Gate> {
        let mut qubits = qubits.into();
        qubits.sort_unstable();
        qubits.dedup();
        if qubits.is_empty() {
            return Err(Error::InvalidGate("MCZ requires a non-empty qubit set".into()));
        }
        Ok(Gate::Mcz { qubits })
    }

    /// Multi-controlled X; controls must be non-empty and exclude the target.
    pub fn mcx(controls: impl Into<Vec<usize>>, target: usize) -> Result<Gate> {
        let mut controls = controls.into();
        controls.sort_unstable();
        controls.dedup();
        if controls.is_empty() {
            return Err(Error::InvalidGate("MCX requires a non-empty control set".into()));
        }
        if controls.contains(&target) {
            return Err(Error::InvalidGate(format!(
                "MCX target q{target} overlaps its control set"
            )));
        }
        Ok(Gate::Mcx { controls, target })
    }

    /// Largest qubit index the gate touches.
    pub fn max_index(&self) -> usize {
        match self {
            Gate::H { target } | Gate::X { target } => *target,
            Gate::Mcz { qubits } => *qubits.last().expect("non-empty"),
            Gate::Mcx { controls, target } => {
                (*target).max(*controls.last().expect("non-empty"))
            }
        }
    }

    /// Every qubit the gate touches (controls and targets alike).
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H { target } | Gate::X { target } => vec![*target],
            Gate::Mcz { qubits } => qubits.clone(),
            Gate::Mcx { controls, target } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
        }
    }

    /// Size of the MCZ qubit set or MCX control set; 0 for H and X.
    pub fn control_arity(&self) -> usize {
        match self {
            Gate::H { .. } | Gate::X { .. } => 0,
            Gate::Mcz { qubits } => qubits.len(),
            Gate::Mcx { controls, .. } => controls.len(),
        }
    }
}

impl fmt::Display for Gate {
    /// One-gate-per-line dump format: `H q0`, `X q3`, `MCZ q0 q2 q5`,
    /// `MCX q0 q1 q2 q3 -> q6`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H { target } => write!(f, "H q{target}"),
            Gate::X { target } => write!(f, "X q{target}"),
            Gate::Mcz { qubits } => {
                write!(f, "MCZ")?;
                for q in qubits {
                    write!(f, " q{q}")?;
                }
                Ok(())
            }
            Gate::Mcx { controls, target } => {
                write!(f, "MCX")?;
                for q in controls {
                    write!(f, " q{q}")?;
                }
                write!(f, " -> q{target}")
            }
        }
    }
}

/// An ordered gate list over a fixed-size register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(num_qubits));
        }
        Ok(Self {
            num_qubits,
            gates: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if gate.max_index() >= self.num_qubits {
            return Err(Error::GateIndex {
                gate: gate.to_string(),
                num_qubits: self.num_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Textual dump, one gate per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

/// Full complex amplitude vector of a register; unit norm.
#[derive(Debug, Clone)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros state `|0...0>` of an `n`-qubit register.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Capacity(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits: n, amps })
    }

    /// A state with explicit amplitudes; the length must be a power of two
    /// within capacity and the norm must be 1 within [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() || dim > (1 << MAX_QUBITS) {
            return Err(Error::Capacity(dim));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidGate(format!(
                "state norm^2 = {norm_sq} is not 1"
            )));
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies one gate in place. Norm is preserved.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        if gate.max_index() >= self.num_qubits {
            return Err(Error::GateIndex {
                gate: gate.to_string(),
                num_qubits: self.num_qubits,
            });
        }
        let dim = self.amps.len();
        match gate {
            Gate::H { target } => {
                let bit = 1usize << target;
                for j in 0..dim {
                    if j & bit == 0 {
                        let a = self.amps[j];
                        let b = self.amps[j | bit];
                        self.amps[j] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[j | bit] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::X { target } => {
                let bit = 1usize << target;
                for j in 0..dim {
                    if j & bit == 0 {
                        self.amps.swap(j, j | bit);
                    }
                }
            }
            Gate::Mcz { qubits } => {
                let mask = bitmask(qubits);
                for j in 0..dim {
                    if j & mask == mask {
                        self.amps[j] = -self.amps[j];
                    }
                }
            }
            Gate::Mcx { controls, target } => {
                let cmask = bitmask(controls);
                let bit = 1usize << target;
                for j in 0..dim {
                    if j & cmask == cmask && j & bit == 0 {
                        self.amps.swap(j, j | bit);
                    }
                }
            }
        }
        Ok(())
    }

    /// Probability of measuring qubit `q` as 1: the squared-magnitude sum
    /// over basis states with bit `q` set.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        if q >= self.num_qubits {
            return Err(Error::GateIndex {
                gate: format!("measure q{q}"),
                num_qubits: self.num_qubits,
            });
        }
        let bit = 1usize << q;
        let p: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(j, _)| j & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        // Accumulation noise can land a hair outside [0, 1].
        Ok(p.clamp(0.0, 1.0))
    }
}

fn bitmask(qubits: &[usize]) -> usize {
    qubits.iter().fold(0usize, |m, &q| m | (1 << q))
}

/// Runs a circuit from `|0...0>` and returns the final state.
pub fn run(circuit: &QuantumCircuit) -> Result<StateVector> {
    let mut state = StateVector::new(circuit.num_qubits())?;
    for gate in circuit.gates() {
        state.apply_gate(gate)?;
    }
    Ok(state)
}

/// Seeded deterministic random stream. Identical seeds yield identical
/// draw sequences on every platform.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Derives an independent per-task seed from the master seed, so grid
/// results do not depend on task scheduling order. SplitMix64 finalizer.
pub fn derive_seed(master: u64, task_id: u64) -> u64 {
    let mut z = master
        .wrapping_add(task_id.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counts successes over `shots` Bernoulli(`p`) draws from `rng`.
///
/// Panics if `p` is outside `[0, 1]` or `shots` is zero.
pub fn sample_ones(p: f64, shots: u64, rng: &mut RngStream) -> u64 {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0,1]");
    assert!(shots >= 1, "at least one shot required");
    let mut ones = 0u64;
    for _ in 0..shots {
        let u = rand::Rng::gen::<f64>(rng); // uniform in [0, 1)
        if u < p {
            ones += 1;
        }
    }
    ones
}
