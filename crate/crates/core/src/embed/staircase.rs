use serde::{Deserialize, Serialize};

use super::check_dim;
use crate::measure::canonicalize;
use crate::{DiscreteMeasure, Error, Point, Result};

/// Width-`S` ReLU encoder `x ↦ (ReLU(x − t_j))_j` for a finite alphabet.
///
/// Invariant: `t_1 < ℓ_1 < t_2 < ℓ_2 < … < t_S < ℓ_S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseParams {
    alphabet: Vec<f64>,
    thresholds: Vec<f64>,
}

impl StaircaseParams {
    pub fn new(alphabet: Vec<f64>, thresholds: Vec<f64>) -> Result<Self> {
        check_dim(alphabet.len(), thresholds.len())?;
        if alphabet.is_empty() {
            return Err(Error::precondition("alphabet must be non-empty"));
        }
        if alphabet.iter().chain(&thresholds).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("staircase parameters"));
        }
        let interleaved: Vec<f64> = thresholds
            .iter()
            .zip(&alphabet)
            .flat_map(|(&t, &l)| [t, l])
            .collect();
        if interleaved.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition(
                "thresholds must strictly interleave the sorted alphabet",
            ));
        }
        Ok(StaircaseParams {
            alphabet,
            thresholds,
        })
    }

    /// Midpoint thresholds; `t_1` sits half a gap below `ℓ_1` (a unit gap
    /// for a singleton alphabet).
    pub fn with_midpoints(alphabet: Vec<f64>) -> Result<Self> {
        let mut thresholds = Vec::with_capacity(alphabet.len());
        if let Some(&first) = alphabet.first() {
            let gap = alphabet.get(1).map_or(1.0, |&second| second - first);
            thresholds.push(first - gap / 2.0);
        }
        thresholds.extend(alphabet.windows(2).map(|w| (w[0] + w[1]) / 2.0));
        StaircaseParams::new(alphabet, thresholds)
    }

    pub fn alphabet(&self) -> &[f64] {
        &self.alphabet
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    fn letter_index(&self, x: f64) -> Option<usize> {
        self.alphabet
            .binary_search_by(|l| l.total_cmp(&x))
            .ok()
            .filter(|&i| self.alphabet[i] == x)
    }

    /// Dense weight vector over the alphabet.
    pub fn dense_weights(&self, m: &DiscreteMeasure) -> Result<Vec<f64>> {
        check_dim(1, m.dim())?;
        let mut w = vec![0.0; self.len()];
        for (p, wi) in canonicalize(m).atoms() {
            let x = p.coords()[0];
            let j = self.letter_index(x).ok_or_else(|| {
                Error::precondition(format!("support point {x} is not in the alphabet"))
            })?;
            w[j] += wi;
        }
        Ok(w)
    }
}

/// Component `j` is `Σ_i w_i ReLU(x_i − t_j)`.
pub fn staircase_embed(m: &DiscreteMeasure, p: &StaircaseParams) -> Result<Vec<f64>> {
    let w = p.dense_weights(m)?;
    Ok(p.thresholds
        .iter()
        .map(|&t| {
            p.alphabet
                .iter()
                .zip(&w)
                .map(|(&l, &wi)| wi * (l - t).max(0.0))
                .sum()
        })
        .collect())
}

/// Dense alphabet weights recovered by back-substitution from the last
/// component down.
pub fn staircase_decode_weights(moments: &[f64], p: &StaircaseParams) -> Result<Vec<f64>> {
    check_dim(p.len(), moments.len())?;
    let s = p.len();
    let mut w = vec![0.0; s];
    for j in (0..s).rev() {
        let t = p.thresholds[j];
        let known: f64 = (j + 1..s).map(|i| w[i] * (p.alphabet[i] - t)).sum();
        w[j] = (moments[j] - known) / (p.alphabet[j] - t);
    }
    Ok(w)
}

/// The unique alphabet-supported measure with the given staircase moments.
pub fn staircase_decode(moments: &[f64], p: &StaircaseParams) -> Result<DiscreteMeasure> {
    let w = staircase_decode_weights(moments, p)?;
    let points = p.alphabet.iter().map(|&l| Point::scalar(l)).collect::<Result<_>>()?;
    Ok(canonicalize(&DiscreteMeasure::new(1, points, w)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> StaircaseParams {
        StaircaseParams::new(vec![1.0, 2.0, 3.0], vec![0.5, 1.5, 2.5]).unwrap()
    }

    #[test]
    fn single_letter_embedding() {
        let m = DiscreteMeasure::from_scalar_atoms(&[(1.0, 1.0)]).unwrap();
        assert_eq!(staircase_embed(&m, &abc()).unwrap(), vec![0.5, 0.0, 0.0]);
        assert_eq!(staircase_embed(&DiscreteMeasure::zero(1), &abc()).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn zero_moments_decode_to_zero_measure() {
        assert!(staircase_decode(&[0.0; 3], &abc()).unwrap().is_empty());
    }

    #[test]
    fn round_trip_of_signed_measure() {
        let p = abc();
        let m = DiscreteMeasure::from_scalar_atoms(&[(1.0, 2.0), (3.0, -1.0)]).unwrap();
        let back = staircase_decode_weights(&staircase_embed(&m, &p).unwrap(), &p).unwrap();
        let expect = [2.0, 0.0, -1.0];
        for (a, b) in back.iter().zip(expect) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn last_component_isolates_last_letter() {
        let p = abc();
        let moments = [0.0, 0.0, 1.25];
        let w = staircase_decode_weights(&moments, &p).unwrap();
        assert_eq!(w[2], 1.25 / (3.0 - 2.5));
    }

    #[test]
    fn off_alphabet_support_rejected() {
        let m = DiscreteMeasure::from_scalar_atoms(&[(1.5, 1.0)]).unwrap();
        assert!(staircase_embed(&m, &abc()).is_err());
    }

    #[test]
    fn interleaving_enforced() {
        assert!(StaircaseParams::new(vec![1.0, 2.0], vec![0.5, 2.0]).is_err());
        assert!(StaircaseParams::new(vec![2.0, 1.0], vec![0.5, 1.5]).is_err());
        let p = StaircaseParams::with_midpoints(vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(p.thresholds(), &[0.5, 1.5, 3.0]);
        let single = StaircaseParams::with_midpoints(vec![3.0]).unwrap();
        assert_eq!(single.thresholds(), &[2.5]);
    }
}
