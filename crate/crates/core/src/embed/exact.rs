//! Exact evaluation of moment differences for piecewise-polynomial nets.
//!
//! Every `f64` is a dyadic rational, so for ReLU-type activations the value
//! `Σ w_i σ(a·x_i + b)` of a measure under a given net is a rational number
//! that can be computed without rounding. Floating-point evaluation of two
//! embeddings that agree mathematically can still differ by an ulp; these
//! routines settle such cases exactly.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{check_dim, ShallowNetParams};
use crate::activation::LEAKY_SLOPE;
use crate::measure::canonicalize;
use crate::{Activation, DiscreteMeasure, Result};

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite by construction")
}

fn apply_exact(act: Activation, z: BigRational) -> Option<BigRational> {
    let v = match act {
        Activation::Relu => {
            if z.is_negative() {
                BigRational::zero()
            } else {
                z
            }
        }
        Activation::LeakyRelu => {
            if z.is_negative() {
                z * rat(LEAKY_SLOPE)
            } else {
                z
            }
        }
        Activation::HardTanh => {
            let one = BigRational::one();
            if z > one {
                one
            } else if z < -one.clone() {
                -one
            } else {
                z
            }
        }
        Activation::Identity => z,
        Activation::Square => z.clone() * z,
        _ => return None,
    };
    Some(v)
}

/// True when [`exact_moment_difference`] supports the activation.
pub fn supports(act: Activation) -> bool {
    apply_exact(act, BigRational::zero()).is_some()
}

/// `embed(m1) − embed(m2)` computed in exact rational arithmetic and rounded
/// once to `f64`. `None` for activations that are not piecewise polynomial.
pub fn exact_moment_difference(
    net: &ShallowNetParams,
    m1: &DiscreteMeasure,
    m2: &DiscreteMeasure,
) -> Result<Option<Vec<f64>>> {
    check_dim(net.dim(), m1.dim())?;
    check_dim(net.dim(), m2.dim())?;
    let act = net.activation();
    if !supports(act) {
        return Ok(None);
    }
    let atoms: Vec<(Vec<BigRational>, BigRational)> = canonicalize(m1)
        .atoms()
        .map(|(p, w)| (p.coords().iter().map(|&c| rat(c)).collect(), rat(w)))
        .chain(
            canonicalize(m2)
                .atoms()
                .map(|(p, w)| (p.coords().iter().map(|&c| rat(c)).collect(), -rat(w))),
        )
        .collect();
    let mut out = Vec::with_capacity(net.width());
    for j in 0..net.width() {
        let row: Vec<BigRational> = net.row(j).iter().map(|&a| rat(a)).collect();
        let bias = rat(net.bias()[j]);
        let mut acc = BigRational::zero();
        for (x, w) in &atoms {
            let z = row.iter().zip(x).fold(bias.clone(), |s, (a, xi)| s + a * xi);
            let v = apply_exact(act, z).expect("checked above");
            acc += w * v;
        }
        out.push(to_f64(&acc));
    }
    Ok(Some(out))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("ratio of big integers always converts")
}
