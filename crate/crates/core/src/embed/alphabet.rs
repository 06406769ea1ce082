use crate::{Error, Result};

/// Largest number of weight vectors [`alphabet_min_gap`] will enumerate.
const ENUMERATION_LIMIT: u64 = 1 << 24;

/// `(α, α², …, α^depth)` with `α = 1/(n+1)`.
pub fn sigma_alpha_alphabet(n: usize, depth: usize) -> Vec<f64> {
    let alpha = 1.0 / (n as f64 + 1.0);
    std::iter::successors(Some(alpha), |a| Some(a * alpha))
        .take(depth)
        .collect()
}

/// Smallest gap between the moments `Σ_i w_i f(ℓ_i)` over all weight vectors
/// `w ∈ {0, …, max_weight}^S`. Zero iff two distinct vectors collide.
pub fn alphabet_min_gap<F>(alphabet: &[f64], max_weight: usize, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let base = max_weight as u64 + 1;
    let total = base
        .checked_pow(alphabet.len() as u32)
        .filter(|&t| t <= ENUMERATION_LIMIT)
        .ok_or(Error::SupportTooLarge {
            size: alphabet.len(),
            limit: (ENUMERATION_LIMIT as f64).log(base as f64) as usize,
        })?;
    let values: Vec<f64> = alphabet.iter().map(|&l| f(l)).collect();
    let mut sums: Vec<f64> = (0..total)
        .map(|mut code| {
            let mut s = 0.0;
            for v in &values {
                s += (code % base) as f64 * v;
                code /= base;
            }
            s
        })
        .collect();
    sums.sort_by(f64::total_cmp);
    Ok(sums
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves() {
        assert_eq!(sigma_alpha_alphabet(1, 3), vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn collision_detected() {
        // (1, 1, 0) and (0, 0, 1) both give 3.
        assert_eq!(alphabet_min_gap(&[1.0, 2.0, 3.0], 1, |x| x).unwrap(), 0.0);
    }

    #[test]
    fn enumeration_limit() {
        assert!(alphabet_min_gap(&[0.5; 40], 2, |x| x).is_err());
    }
}
