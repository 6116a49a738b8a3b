//! Binary image patterns and their ±1 sign encodings.
//!
//! A pattern of `m = 2^N` bits maps to a sign vector with entries in
//! `{-1, +1}` (bit 0 becomes +1, bit 1 becomes -1). Sign vectors are the
//! classical objects the quantum encoder loads into amplitude signs, and
//! their integer inner product is what the ancilla readout measures, up to
//! normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A flattened binary image: `m` bits, `m = 2^N`, row-major from the
/// top-left pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitPattern {
    bits: Vec<u8>,
}

impl BitPattern {
    /// Builds a pattern, rejecting lengths that are not powers of two
    /// (with at least two entries) and entries other than 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        let m = bits.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidPattern(format!(
                "length {m} is not a power of two >= 2"
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidPattern(format!(
                "entry {bad} is not a bit (expected 0 or 1)"
            )));
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length is always >= 2
    }

    /// Number of register qubits needed to index the pattern: `N = log2(m)`.
    pub fn num_qubits(&self) -> usize {
        self.bits.len().trailing_zeros() as usize
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Maps bits to signs: bit 0 -> +1, bit 1 -> -1.
    pub fn to_signs(&self) -> SignVector {
        SignVector {
            signs: self.bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect(),
        }
    }
}

/// A ±1 vector of power-of-two length; the sign pattern of an encoded state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    /// Builds a sign vector, rejecting invalid lengths and entries other
    /// than -1 or +1.
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        let m = signs.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::InvalidPattern(format!(
                "length {m} is not a power of two >= 2"
            )));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidPattern(format!(
                "entry {bad} is not a sign (expected -1 or +1)"
            )));
        }
        Ok(Self { signs })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn num_qubits(&self) -> usize {
        self.signs.len().trailing_zeros() as usize
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// The entrywise negation. The encoded quantum states differ only by a
    /// global phase, so readouts are unaffected.
    pub fn negated(&self) -> SignVector {
        SignVector {
            signs: self.signs.iter().map(|&s| -s).collect(),
        }
    }

    /// Inverse of [`BitPattern::to_signs`]: +1 -> bit 0, -1 -> bit 1.
    pub fn to_bits(&self) -> BitPattern {
        BitPattern {
            bits: self.signs.iter().map(|&s| if s > 0 { 0 } else { 1 }).collect(),
        }
    }
}

/// Integer inner product of two equal-length sign vectors.
///
/// The result lies in `[-m, m]` and has the parity of `m`.
pub fn dot(a: &SignVector, b: &SignVector) -> Result<i64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.signs
        .iter()
        .zip(&b.signs)
        .map(|(&x, &y)| i64::from(x) * i64::from(y))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signs(v: &[i8]) -> SignVector {
        SignVector::new(v.to_vec()).expect("valid signs")
    }

    #[test]
    fn rejects_non_power_of_two_length() {
        assert!(matches!(
            BitPattern::new(vec![0, 1, 0]),
            Err(Error::InvalidPattern(_))
        ));
        assert!(matches!(
            SignVector::new(vec![1, -1, 1]),
            Err(Error::InvalidPattern(_))
        ));
        assert!(matches!(BitPattern::new(vec![]), Err(Error::InvalidPattern(_))));
        assert!(matches!(BitPattern::new(vec![1]), Err(Error::InvalidPattern(_))));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            BitPattern::new(vec![0, 2, 0, 0]),
            Err(Error::InvalidPattern(_))
        ));
        assert!(matches!(
            SignVector::new(vec![1, 0, 1, 1]),
            Err(Error::InvalidPattern(_))
        ));
    }

    #[test]
    fn all_zero_maps_to_all_plus_one() {
        let p = BitPattern::new(vec![0, 0, 0, 0]).unwrap();
        assert_eq!(p.to_signs().signs(), &[1, 1, 1, 1]);
    }

    #[test]
    fn alternating_bits_map_by_convention() {
        let p = BitPattern::new(vec![1, 0, 1, 0]).unwrap();
        assert_eq!(p.to_signs().signs(), &[-1, 1, -1, 1]);
    }

    #[test]
    fn sign_mapping_round_trips_all_length_four_patterns() {
        for code in 0u8..16 {
            let bits: Vec<u8> = (0..4).map(|j| (code >> j) & 1).collect();
            let p = BitPattern::new(bits).unwrap();
            assert_eq!(p.to_signs().to_bits(), p);
        }
    }

    #[test]
    fn dot_of_vector_with_itself_is_length() {
        let a = signs(&[1, -1, -1, 1]);
        assert_eq!(dot(&a, &a).unwrap(), 4);
    }

    #[test]
    fn dot_orthogonal_is_zero() {
        let a = signs(&[1, 1, 1, 1]);
        let b = signs(&[1, -1, 1, -1]);
        assert_eq!(dot(&a, &b).unwrap(), 0);
    }

    #[test]
    fn dot_single_disagreement() {
        // Direct summation: 1 + 1 - 1 + 1 = 2.
        let a = signs(&[1, 1, 1, 1]);
        let b = signs(&[1, 1, -1, 1]);
        assert_eq!(dot(&a, &b).unwrap(), 2);
    }

    #[test]
    fn dot_length_mismatch_is_an_error() {
        let a = signs(&[1, 1]);
        let b = signs(&[1, 1, 1, 1]);
        assert!(matches!(
            dot(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, found: 4 })
        ));
    }

    #[test]
    fn dot_bounds_and_negation_antisymmetry() {
        // |dot| <= m, dot(a,a) = m, dot(a,-b) = -dot(a,b) over all m=8 pairs
        // of a small deterministic family.
        let family: Vec<SignVector> = (0u16..256)
            .step_by(17)
            .map(|code| {
                SignVector::new((0..8).map(|j| if (code >> j) & 1 == 0 { 1 } else { -1 }).collect())
                    .unwrap()
            })
            .collect();
        for a in &family {
            assert_eq!(dot(a, a).unwrap(), 8);
            for b in &family {
                let d = dot(a, b).unwrap();
                assert!(d.abs() <= 8);
                assert_eq!(d % 2, 0, "parity of m");
                assert_eq!(dot(a, &b.negated()).unwrap(), -d);
            }
        }
    }
}
