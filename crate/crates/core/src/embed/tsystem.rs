use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::check_dim;
use crate::linalg::condition_number;
use crate::measure::canonicalize;
use crate::{DiscreteMeasure, Error, Result};

/// Condition numbers below this are declared invertible.
pub const INVERTIBLE_CONDITION: f64 = 1e15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TSystemKind {
    /// `τ_i(x) = x^i`, `i = 1..=k`, on `(0, ∞)`.
    Monomial { degree: usize },
    /// `τ_i(x) = sigmoid(x + b_i)` on `ℝ`.
    SigmoidShift { shifts: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TSystem {
    kind: TSystemKind,
}

impl TSystem {
    pub fn monomial(degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::precondition("monomial T-system needs degree >= 1"));
        }
        Ok(TSystem {
            kind: TSystemKind::Monomial { degree },
        })
    }

    pub fn sigmoid_shift(shifts: Vec<f64>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::precondition("sigmoid T-system needs at least one shift"));
        }
        if shifts.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("T-system shifts"));
        }
        if !pairwise_distinct(&shifts) {
            return Err(Error::precondition("sigmoid shifts must be pairwise distinct"));
        }
        Ok(TSystem {
            kind: TSystemKind::SigmoidShift { shifts },
        })
    }

    pub fn kind(&self) -> &TSystemKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            TSystemKind::Monomial { degree } => *degree,
            TSystemKind::SigmoidShift { shifts } => shifts.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> &'static str {
        match self.kind {
            TSystemKind::Monomial { .. } => "(0, inf)",
            TSystemKind::SigmoidShift { .. } => "(-inf, inf)",
        }
    }

    fn in_domain(&self, x: f64) -> bool {
        match self.kind {
            TSystemKind::Monomial { .. } => x > 0.0 && x.is_finite(),
            TSystemKind::SigmoidShift { .. } => x.is_finite(),
        }
    }

    /// `τ_i(x)` for `i` in `0..len()`.
    pub fn eval(&self, i: usize, x: f64) -> f64 {
        match &self.kind {
            TSystemKind::Monomial { .. } => x.powi(i as i32 + 1),
            TSystemKind::SigmoidShift { shifts } => crate::Activation::Sigmoid.apply(x + shifts[i]),
        }
    }

    fn check_points(&self, xs: &[f64]) -> Result<()> {
        if let Some(x) = xs.iter().find(|&&x| !self.in_domain(x)) {
            return Err(Error::precondition(format!(
                "point {x} outside T-system domain {}",
                self.domain()
            )));
        }
        Ok(())
    }
}

fn pairwise_distinct(xs: &[f64]) -> bool {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.windows(2).all(|w| w[0] != w[1])
}

/// `[τ_i(x_j)]`, rows indexed by function, columns by point.
pub fn tsystem_matrix(t: &TSystem, xs: &[f64]) -> Result<DMatrix<f64>> {
    check_dim(t.len(), xs.len())?;
    t.check_points(xs)?;
    if !pairwise_distinct(xs) {
        return Err(Error::precondition("evaluation points must be pairwise distinct"));
    }
    Ok(DMatrix::from_fn(t.len(), xs.len(), |i, j| t.eval(i, xs[j])))
}

pub fn is_invertible(m: &DMatrix<f64>) -> bool {
    condition_number(m) < INVERTIBLE_CONDITION
}

/// Component `i` is `Σ_j w_j τ_i(x_j)`. Injective on measures with at most
/// `len()/2` atoms in the domain.
pub fn tsystem_embed(m: &DiscreteMeasure, t: &TSystem) -> Result<Vec<f64>> {
    check_dim(1, m.dim())?;
    let m = canonicalize(m);
    let limit = t.len() / 2;
    if m.len() > limit {
        return Err(Error::SupportTooLarge {
            size: m.len(),
            limit,
        });
    }
    let xs: Vec<f64> = m.points().iter().map(|p| p.coords()[0]).collect();
    t.check_points(&xs)?;
    Ok((0..t.len())
        .map(|i| xs.iter().zip(m.weights()).map(|(&x, w)| w * t.eval(i, x)).sum())
        .collect())
}
