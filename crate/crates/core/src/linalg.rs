//! Small dense linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

/// Singular values sorted in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// σ_max / σ_min of a square matrix; infinite when singular.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Number of singular values above `tol · σ_max`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&hi) = s.first() else { return 0 };
    if hi == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol * hi).count()
}

/// Unit vector minimizing `‖m v‖`, i.e. the right singular vector of the
/// smallest singular value. Wide matrices are padded with zero rows so the
/// decomposition sees the full column space.
pub fn null_vector(m: &DMatrix<f64>) -> DVector<f64> {
    let (r, c) = m.shape();
    let square = if r < c {
        let mut padded = DMatrix::zeros(c, c);
        padded.view_mut((0, 0), (r, c)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    v_t.row(idx).transpose()
}

/// Singular values `(σ_1, σ_2)` of the two-column matrix `[u v]`.
///
/// Computed from the Gram data so that bitwise-equal columns give exactly
/// `σ_2 = 0`.
pub fn two_column_singular_values(u: &[f64], v: &[f64]) -> (f64, f64) {
    debug_assert_eq!(u.len(), v.len());
    let uu: f64 = u.iter().map(|x| x * x).sum();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let (a, b, aa) = if uu >= vv { (u, v, uu) } else { (v, u, vv) };
    if aa == 0.0 {
        return (0.0, 0.0);
    }
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let coef = ab / aa;
    let ww: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let r = y - coef * x;
            r * r
        })
        .sum();
    // |det [a b]^T[a b]|^{1/2} = ‖a‖·‖b − proj_a b‖
    let area = aa.sqrt() * ww.sqrt();
    let trace = uu + vv;
    let disc = (trace * trace - 4.0 * area * area).max(0.0).sqrt();
    let s1 = ((trace + disc) / 2.0).sqrt();
    let s2 = if s1 > 0.0 { area / s1 } else { 0.0 };
    (s1, s2.min(s1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::Seed;

    fn random_matrix(r: usize, c: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = Seed(seed).rng();
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn null_vector_of_affine_stack() {
        let m = DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 2.0, 1.0, 1.0, 1.0]);
        let v = null_vector(&m);
        assert!((&m * &v).norm() < 1e-12);
        let scaled = &v / v[0];
        assert!((scaled[1] + 2.0).abs() < 1e-12);
        assert!((scaled[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn null_vector_random_wide() {
        for seed in 0..20 {
            let m = random_matrix(4, 5, seed);
            let v = null_vector(&m);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!((&m * &v).norm() < 1e-10);
        }
    }

    #[test]
    fn rank_and_condition() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert_eq!(rank(&id, 1e-12), 4);
        assert_eq!(condition_number(&id), 1.0);
        let mut sing = random_matrix(3, 3, 5);
        let row = sing.row(0).clone_owned();
        sing.set_row(2, &row);
        assert_eq!(rank(&sing, 1e-12), 2);
        assert!(condition_number(&sing) > 1e12);
    }

    #[test]
    fn two_column_matches_full_svd() {
        let mut rng = Seed(3).rng();
        for _ in 0..200 {
            let n = rng.random_range(2..12);
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (s1, s2) = two_column_singular_values(&u, &v);
            let mut data = u.clone();
            data.extend_from_slice(&v);
            let full = singular_values(&DMatrix::from_column_slice(n, 2, &data));
            assert!((s1 - full[0]).abs() <= 1e-10 * full[0]);
            assert!((s2 - full[1]).abs() <= 1e-9 * full[0]);
        }
    }

    #[test]
    fn equal_columns_are_exactly_singular() {
        let u = [0.3, -1.7, 2.2, 1e-3];
        let (s1, s2) = two_column_singular_values(&u, &u);
        assert!(s1 > 0.0);
        assert_eq!(s2, 0.0);
    }
}
