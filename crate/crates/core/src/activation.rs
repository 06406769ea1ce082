//! Scalar activations with derivatives and a regularity class.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Slope of leaky-ReLU on the negative half-line.
pub const LEAKY_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regularity {
    AnalyticNonPolynomial,
    PiecewiseLinear,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Activation {
    Tanh,
    Sigmoid,
    Sin,
    Cos,
    Silu,
    Mish,
    Relu,
    LeakyRelu,
    HardTanh,
    Identity,
    Square,
}

impl Activation {
    pub const ALL: [Activation; 11] = [
        Activation::Tanh,
        Activation::Sigmoid,
        Activation::Sin,
        Activation::Cos,
        Activation::Silu,
        Activation::Mish,
        Activation::Relu,
        Activation::LeakyRelu,
        Activation::HardTanh,
        Activation::Identity,
        Activation::Square,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Sigmoid => "sigmoid",
            Activation::Sin => "sin",
            Activation::Cos => "cos",
            Activation::Silu => "silu",
            Activation::Mish => "mish",
            Activation::Relu => "relu",
            Activation::LeakyRelu => "leaky_relu",
            Activation::HardTanh => "hardtanh",
            Activation::Identity => "identity",
            Activation::Square => "square",
        }
    }

    pub fn from_name(name: &str) -> Result<Activation, Error> {
        let lower = name.trim().to_ascii_lowercase();
        let act = match lower.as_str() {
            "swish" => Activation::Silu,
            "leaky-relu" | "leakyrelu" => Activation::LeakyRelu,
            "hard-tanh" | "hard_tanh" => Activation::HardTanh,
            other => Activation::ALL
                .into_iter()
                .find(|a| a.name() == other)
                .ok_or_else(|| Error::UnknownActivation(name.to_string()))?,
        };
        Ok(act)
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => sigmoid(x),
            Activation::Sin => x.sin(),
            Activation::Cos => x.cos(),
            Activation::Silu => x * sigmoid(x),
            Activation::Mish => x * softplus(x).tanh(),
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    x
                } else {
                    LEAKY_SLOPE * x
                }
            }
            Activation::HardTanh => x.clamp(-1.0, 1.0),
            Activation::Identity => x,
            Activation::Square => x * x,
        }
    }

    /// First derivative. At kinks of piecewise-linear entries this is the
    /// right-hand limit.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            Activation::Sin => x.cos(),
            Activation::Cos => -x.sin(),
            Activation::Silu => {
                let s = sigmoid(x);
                s * (1.0 + x * (1.0 - s))
            }
            Activation::Mish => {
                let t = softplus(x).tanh();
                t + x * (1.0 - t * t) * sigmoid(x)
            }
            Activation::Relu => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    1.0
                } else {
                    LEAKY_SLOPE
                }
            }
            Activation::HardTanh => {
                if (-1.0..1.0).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
            Activation::Square => 2.0 * x,
        }
    }

    pub fn regularity(self) -> Regularity {
        match self {
            Activation::Tanh
            | Activation::Sigmoid
            | Activation::Sin
            | Activation::Cos
            | Activation::Silu
            | Activation::Mish => Regularity::AnalyticNonPolynomial,
            Activation::Relu | Activation::LeakyRelu | Activation::HardTanh => {
                Regularity::PiecewiseLinear
            }
            Activation::Identity | Activation::Square => Regularity::Polynomial,
        }
    }

    /// Continuous and not a polynomial.
    pub fn is_discriminatory(self) -> bool {
        self.regularity() != Regularity::Polynomial
    }

    pub fn is_piecewise_linear(self) -> bool {
        self.regularity() == Regularity::PiecewiseLinear
    }

    pub fn is_analytic(self) -> bool {
        self.regularity() == Regularity::AnalyticNonPolynomial
    }

    /// Breakpoints of piecewise-linear entries.
    pub fn kinks(self) -> &'static [f64] {
        match self {
            Activation::Relu | Activation::LeakyRelu => &[0.0],
            Activation::HardTanh => &[-1.0, 1.0],
            _ => &[],
        }
    }
}

pub fn catalog() -> Vec<Activation> {
    Activation::ALL.to_vec()
}

pub fn is_discriminatory(a: Activation) -> bool {
    a.is_discriminatory()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Activation::from_name(s)
    }
}

impl From<Activation> for String {
    fn from(a: Activation) -> String {
        a.name().to_string()
    }
}

impl TryFrom<String> for Activation {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Activation::from_name(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::Seed;

    #[test]
    fn catalog_contents() {
        let names: Vec<_> = catalog().iter().map(|a| a.name()).collect();
        for required in [
            "tanh", "sigmoid", "sin", "cos", "silu", "relu", "leaky_relu", "hardtanh",
            "identity", "square",
        ] {
            assert!(names.contains(&required), "missing {required}");
        }
        assert_eq!(Activation::Tanh.regularity(), Regularity::AnalyticNonPolynomial);
        assert_eq!(Activation::HardTanh.regularity(), Regularity::PiecewiseLinear);
        assert_eq!(Activation::Square.regularity(), Regularity::Polynomial);
    }

    #[test]
    fn point_values() {
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.5);
        assert_eq!(Activation::Relu.apply(-1.0), 0.0);
        assert_eq!(Activation::Relu.derivative(1.0), 1.0);
        assert_eq!(Activation::Relu.derivative(0.0), 1.0);
        assert_eq!(Activation::HardTanh.derivative(1.0), 0.0);
        assert_eq!(Activation::HardTanh.derivative(-1.0), 1.0);
        assert_eq!(Activation::LeakyRelu.apply(-2.0), -0.02);
    }

    #[test]
    fn discriminatory_classification() {
        assert!(is_discriminatory(Activation::Relu));
        assert!(is_discriminatory(Activation::Sin));
        assert!(!is_discriminatory(Activation::Square));
        assert!(!is_discriminatory(Activation::Identity));
    }

    #[test]
    fn names_round_trip() {
        for a in catalog() {
            assert_eq!(Activation::from_name(a.name()).unwrap(), a);
        }
        assert_eq!(Activation::from_name("Swish").unwrap(), Activation::Silu);
        assert!(Activation::from_name("gelu").is_err());
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-5;
        let mut rng = Seed(11).rng();
        for a in catalog() {
            let mut checked = 0;
            while checked < 100 {
                let x: f64 = rng.random_range(-5.0..5.0);
                if a.kinks().iter().any(|k| (x - k).abs() < 1e-3) {
                    continue;
                }
                let fd = (a.apply(x + h) - a.apply(x - h)) / (2.0 * h);
                assert!(
                    (a.derivative(x) - fd).abs() <= 1e-5,
                    "{a} at {x}: {} vs {fd}",
                    a.derivative(x)
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn piecewise_linear_entries_are_locally_linear() {
        let mut rng = Seed(12).rng();
        let delta = 1e-4;
        for a in catalog().into_iter().filter(|a| a.is_piecewise_linear()) {
            for _ in 0..200 {
                let x: f64 = rng.random_range(-5.0..5.0);
                if a.kinks().iter().any(|k| (x - k).abs() < 2.0 * delta) {
                    continue;
                }
                let second = a.apply(x + delta) + a.apply(x - delta) - 2.0 * a.apply(x);
                assert!(second.abs() <= 1e-15, "{a} at {x}: {second}");
            }
            for &k in a.kinks() {
                let left = a.apply(k - 1e-12);
                let right = a.apply(k + 1e-12);
                assert!((left - right).abs() < 1e-11, "{a} discontinuous at {k}");
            }
        }
    }
}
