//! Empirical bi-Lipschitz ratios of shallow moment embeddings.
//!
//! Each instance is a pair of `n`-point sets in `ℝ^d` that agree in all but
//! `n_Δ` columns. The ratio `‖f̂(X1) − f̂(X2)‖ / W_p(X1, X2)` is recorded for
//! every activation and every width prefix of one master parameter draw;
//! `c` and `C` are its minimum and maximum over instances.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sinkhorn_default, wasserstein_exact, EXACT_SUPPORT_LIMIT};
use crate::embed::exact::{exact_moment_difference, supports};
use crate::embed::{norm, sample_shallow_net, ShallowNetParams};
use crate::witness::pwl_counterexample_sets;
use crate::{Activation, DiscreteMeasure, Error, Result, Seed};

pub const RATIO_CSV_HEADER: &str = "activation,m,c,C,c_over_C";

// Float gaps below this multiple of the embedding scale are recomputed exactly.
const EXACT_REFINE_GAP: f64 = 1e-9;
const INJECTION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransportMethod {
    Exact,
    Sinkhorn,
}

/// Invariants: `0 < rho_min < rho_max ≤ 1`, `instances ≥ 1`, widths and
/// activations nonempty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiLipschitzConfig {
    pub d: usize,
    pub n: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub instances: usize,
    pub widths: Vec<usize>,
    pub activations: Vec<Activation>,
    pub seed: Seed,
    /// Wasserstein exponent of the denominator.
    pub p: u32,
    pub transport: TransportMethod,
    /// Adds one constructed set-split instance per piecewise-linear activation.
    pub inject_counterexample: bool,
}

impl BiLipschitzConfig {
    /// Desk-scale defaults: `ρ ∈ [0.02, 1]`, 10^4 instances, widths
    /// `{1, 4, 16, 64}`, five activations, exact `W_1`.
    pub fn new(d: usize, n: usize, seed: Seed) -> Self {
        BiLipschitzConfig {
            d,
            n,
            rho_min: 0.02,
            rho_max: 1.0,
            instances: 10_000,
            widths: vec![1, 4, 16, 64],
            activations: vec![
                Activation::Relu,
                Activation::HardTanh,
                Activation::Tanh,
                Activation::Sigmoid,
                Activation::Silu,
            ],
            seed,
            p: 1,
            transport: TransportMethod::Exact,
            inject_counterexample: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(Error::precondition("d and n must be positive"));
        }
        if !(0.0 < self.rho_min && self.rho_min < self.rho_max && self.rho_max <= 1.0) {
            return Err(Error::precondition(format!(
                "need 0 < rho_min < rho_max <= 1, got [{}, {}]",
                self.rho_min, self.rho_max
            )));
        }
        if self.instances == 0 {
            return Err(Error::precondition("instances must be at least 1"));
        }
        if self.widths.is_empty() || self.widths.contains(&0) {
            return Err(Error::precondition("widths must be nonempty and positive"));
        }
        if self.activations.is_empty() {
            return Err(Error::precondition("at least one activation is required"));
        }
        if self.p != 1 && self.p != 2 {
            return Err(Error::precondition(format!("exponent p must be 1 or 2, got {}", self.p)));
        }
        if self.transport == TransportMethod::Exact && self.n > EXACT_SUPPORT_LIMIT {
            return Err(Error::SupportTooLarge {
                size: self.n,
                limit: EXACT_SUPPORT_LIMIT,
            });
        }
        Ok(())
    }
}

/// Invariants: `0 ≤ c ≤ C`, `c_over_c == c / C` (0 when `C == 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub activation: Activation,
    pub m: usize,
    pub c: f64,
    #[serde(rename = "C")]
    pub c_upper: f64,
    #[serde(rename = "c_over_C")]
    pub c_over_c: f64,
}

impl RatioRecord {
    fn new(activation: Activation, m: usize, c: f64, c_upper: f64) -> Self {
        let c_over_c = if c_upper == 0.0 { 0.0 } else { c / c_upper };
        RatioRecord {
            activation,
            m,
            c,
            c_upper,
            c_over_c,
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.activation, self.m, self.c, self.c_upper, self.c_over_c)
    }
}

pub fn ratio_records_csv(records: &[RatioRecord]) -> String {
    let mut out = String::from(RATIO_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

/// Columns where the two sets differ, and the columns they share.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub(crate) diff1: Vec<Vec<f64>>,
    pub(crate) diff2: Vec<Vec<f64>>,
    pub(crate) shared: Vec<Vec<f64>>,
}

impl Instance {
    fn sets(&self) -> (DiscreteMeasure, DiscreteMeasure) {
        let d = self.shared.first().or(self.diff1.first()).map_or(0, Vec::len);
        let side = |diff: &[Vec<f64>]| {
            DiscreteMeasure::from_atoms(d, diff.iter().chain(&self.shared).map(|x| (1.0, x.clone())))
                .expect("finite coordinates")
        };
        (side(&self.diff1), side(&self.diff2))
    }

    fn differing(&self) -> (DiscreteMeasure, DiscreteMeasure) {
        let d = self.diff1[0].len();
        let side = |diff: &[Vec<f64>]| {
            DiscreteMeasure::from_atoms(d, diff.iter().map(|x| (1.0, x.clone()))).expect("finite coordinates")
        };
        (side(&self.diff1), side(&self.diff2))
    }
}

fn normal_columns(rng: &mut impl Rng, count: usize, d: usize, law: &Normal<f64>) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..d).map(|_| law.sample(rng)).collect()).collect()
}

/// `n_Δ ~ U{1..n}`, `ρ ~ U[ρ_min, ρ_max]`; differing columns `U ∓ ρV/2` with
/// `U` scaled so every entry of `X1`, `X2` has unit variance; shared columns
/// standard normal.
pub(crate) fn sample_instance(cfg: &BiLipschitzConfig, seed: Seed) -> Instance {
    let mut rng = seed.rng();
    let (d, n) = (cfg.d, cfg.n);
    let n_delta = rng.random_range(1..=n);
    let rho = rng.random_range(cfg.rho_min..=cfg.rho_max);
    let (lo, hi) = (cfg.rho_min, cfg.rho_max);
    let std_u = (1.0 - (hi * hi + hi * lo + lo * lo) / 12.0).sqrt();
    let law_u = Normal::new(0.0, std_u).expect("finite std");
    let unit = Normal::new(0.0, 1.0).expect("finite std");
    let u = normal_columns(&mut rng, n_delta, d, &law_u);
    let v = normal_columns(&mut rng, n_delta, d, &unit);
    let shared = normal_columns(&mut rng, n - n_delta, d, &unit);
    let shift = |sign: f64| -> Vec<Vec<f64>> {
        u.iter()
            .zip(&v)
            .map(|(uc, vc)| uc.iter().zip(vc).map(|(a, b)| a + sign * rho * b / 2.0).collect())
            .collect()
    };
    Instance {
        diff1: shift(-1.0),
        diff2: shift(1.0),
        shared,
    }
}

/// The set-split counterexample of `net`, padded with standard-normal
/// shared columns to `n` points.
fn injected_instance(cfg: &BiLipschitzConfig, net: &ShallowNetParams) -> Result<Instance> {
    let cx = pwl_counterexample_sets(net, cfg.seed.child(INJECTION_STREAM))?;
    let expand = |m: &DiscreteMeasure| -> Vec<Vec<f64>> {
        m.atoms()
            .flat_map(|(p, w)| std::iter::repeat_n(p.coords().to_vec(), w.round() as usize))
            .collect()
    };
    let mut rng = cfg.seed.child(INJECTION_STREAM - 1).rng();
    let shared = (0..cfg.n - 2)
        .map(|_| (0..cfg.d).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    Ok(Instance {
        diff1: expand(&cx.m1),
        diff2: expand(&cx.m2),
        shared,
    })
}

fn transport_distance(cfg: &BiLipschitzConfig, inst: &Instance) -> Result<f64> {
    let (x1, x2) = inst.sets();
    match cfg.transport {
        TransportMethod::Exact => wasserstein_exact(&x1, &x2, cfg.p),
        TransportMethod::Sinkhorn => Ok(sinkhorn_default(&x1, &x2, cfg.p)?.value),
    }
}

/// `‖f̂_m(X1) − f̂_m(X2)‖` for every requested prefix width `m`. Shared
/// columns cancel and are not evaluated.
fn embedding_gaps(net: &ShallowNetParams, inst: &Instance, widths: &[usize]) -> Result<Vec<f64>> {
    let mut diff = vec![0.0; net.width()];
    let mut scale = 1.0;
    for (x1, x2) in inst.diff1.iter().zip(&inst.diff2) {
        let (f1, f2) = (net.forward(x1), net.forward(x2));
        scale += norm(&f1) + norm(&f2);
        for ((acc, a), b) in diff.iter_mut().zip(&f1).zip(&f2) {
            *acc += a - b;
        }
    }
    widths
        .iter()
        .map(|&m| {
            let gap = norm(&diff[..m]);
            if gap > EXACT_REFINE_GAP * scale || !supports(net.activation()) {
                return Ok(gap);
            }
            let (d1, d2) = inst.differing();
            let exact = exact_moment_difference(&net.prefix(m)?, &d1, &d2)?.expect("activation supported");
            Ok(norm(&exact))
        })
        .collect()
}

/// One [`RatioRecord`] per `(activation, m)`, in configuration order.
///
/// The master net is drawn from `seed.child(0)` at the largest width and
/// shared by every activation; instance `i` uses `seed.child(i + 1)`.
pub fn bilipschitz_experiment(cfg: &BiLipschitzConfig) -> Result<Vec<RatioRecord>> {
    cfg.validate()?;
    let max_width = *cfg.widths.iter().max().expect("validated nonempty");
    let master = sample_shallow_net(max_width, cfg.d, cfg.activations[0], cfg.seed.child(0), 1.0)?;
    let nets: Vec<ShallowNetParams> = cfg.activations.iter().map(|&a| master.with_activation(a)).collect();

    // ratios[i][a * widths + w]
    let mut ratios: Vec<Vec<f64>> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let inst = sample_instance(cfg, cfg.seed.child(i as u64 + 1));
            instance_ratios(cfg, &nets, &inst)
        })
        .collect::<Result<_>>()?;

    if cfg.inject_counterexample && cfg.n >= 2 {
        for (a, net) in nets.iter().enumerate() {
            if !net.activation().is_piecewise_linear() {
                continue;
            }
            let inst = injected_instance(cfg, net)?;
            let w = transport_distance(cfg, &inst)?;
            let gaps = embedding_gaps(net, &inst, &cfg.widths)?;
            let mut row = vec![f64::NAN; nets.len() * cfg.widths.len()];
            for (k, g) in gaps.into_iter().enumerate() {
                row[a * cfg.widths.len() + k] = g / w;
            }
            ratios.push(row);
        }
    }

    let mut records = Vec::with_capacity(nets.len() * cfg.widths.len());
    for (a, &act) in cfg.activations.iter().enumerate() {
        for (k, &m) in cfg.widths.iter().enumerate() {
            let col = a * cfg.widths.len() + k;
            let (lo, hi) = ratios
                .iter()
                .map(|r| r[col])
                .filter(|r| !r.is_nan())
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
            records.push(RatioRecord::new(act, m, if lo.is_finite() { lo } else { 0.0 }, hi));
        }
    }
    Ok(records)
}

fn instance_ratios(cfg: &BiLipschitzConfig, nets: &[ShallowNetParams], inst: &Instance) -> Result<Vec<f64>> {
    let w = transport_distance(cfg, inst)?;
    let mut row = Vec::with_capacity(nets.len() * cfg.widths.len());
    for net in nets {
        let gaps = embedding_gaps(net, inst, &cfg.widths)?;
        // Degenerate instances with identical sets carry no ratio.
        row.extend(gaps.into_iter().map(|g| if w > 0.0 { g / w } else { f64::NAN }));
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::moment_embed;

    fn small(seed: u64) -> BiLipschitzConfig {
        BiLipschitzConfig {
            instances: 200,
            ..BiLipschitzConfig::new(3, 10, Seed(seed))
        }
    }

    #[test]
    fn validation() {
        let ok = small(0);
        assert!(ok.validate().is_ok());
        assert!(BiLipschitzConfig { rho_min: 0.0, ..ok.clone() }.validate().is_err());
        assert!(BiLipschitzConfig { rho_max: 1.5, ..ok.clone() }.validate().is_err());
        assert!(BiLipschitzConfig { rho_min: 0.5, rho_max: 0.5, ..ok.clone() }.validate().is_err());
        assert!(BiLipschitzConfig { instances: 0, ..ok.clone() }.validate().is_err());
        assert!(BiLipschitzConfig { n: 17, ..ok.clone() }.validate().is_err());
        assert!(BiLipschitzConfig {
            n: 17,
            transport: TransportMethod::Sinkhorn,
            ..ok
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn instance_moments() {
        let cfg = BiLipschitzConfig::new(3, 10, Seed(4));
        let (mut sum, mut sq, mut count) = (0.0, 0.0, 0usize);
        let (mut delta_ratio, mut delta_count) = (0.0, 0usize);
        for i in 0..4000 {
            let mut rng = Seed(i).rng();
            let _n_delta: usize = rng.random_range(1..=cfg.n);
            let rho: f64 = rng.random_range(cfg.rho_min..=cfg.rho_max);
            let inst = sample_instance(&cfg, Seed(i));
            assert_eq!(inst.diff1.len() + inst.shared.len(), cfg.n);
            assert!(!inst.diff1.is_empty());
            for col in inst.diff1.iter().chain(&inst.diff2).chain(&inst.shared) {
                for &x in col {
                    sum += x;
                    sq += x * x;
                    count += 1;
                }
            }
            for (a, b) in inst.diff1.iter().zip(&inst.diff2) {
                for (x, y) in a.iter().zip(b) {
                    delta_ratio += ((y - x) / rho).powi(2);
                    delta_count += 1;
                }
            }
        }
        let mean = sum / count as f64;
        let std = (sq / count as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 0.02, "{mean}");
        assert!((std - 1.0).abs() < 0.02, "{std}");
        // Given ρ, each entry of ΔX has standard deviation ρ.
        assert!(((delta_ratio / delta_count as f64).sqrt() - 1.0).abs() < 0.03);
    }

    #[test]
    fn single_instance_matches_direct_evaluation() {
        let cfg = BiLipschitzConfig {
            instances: 1,
            activations: vec![Activation::Tanh],
            widths: vec![1, 7],
            inject_counterexample: false,
            ..BiLipschitzConfig::new(2, 5, Seed(11))
        };
        let records = bilipschitz_experiment(&cfg).unwrap();
        let inst = sample_instance(&cfg, cfg.seed.child(1));
        let (x1, x2) = inst.sets();
        let w = wasserstein_exact(&x1, &x2, 1).unwrap();
        let master = sample_shallow_net(7, 2, Activation::Tanh, cfg.seed.child(0), 1.0).unwrap();
        for (rec, m) in records.iter().zip([1, 7]) {
            let net = master.prefix(m).unwrap();
            let e1 = moment_embed(&x1, &net).unwrap();
            let e2 = moment_embed(&x2, &net).unwrap();
            let expected = crate::embed::dist(&e1, &e2) / w;
            assert!((rec.c - expected).abs() <= 1e-12 * expected.max(1.0), "{} vs {expected}", rec.c);
            assert_eq!(rec.c, rec.c_upper);
            assert_eq!(rec.c_over_c, 1.0);
        }
    }

    #[test]
    fn dichotomy_and_reproducibility() {
        let cfg = small(7);
        let a = bilipschitz_experiment(&cfg).unwrap();
        let b = bilipschitz_experiment(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 20);
        for r in &a {
            assert!(0.0 <= r.c && r.c <= r.c_upper);
            if r.activation.is_piecewise_linear() {
                assert_eq!(r.c_over_c, 0.0, "{r:?}");
            } else {
                assert!(r.c_over_c > 0.0, "{r:?}");
            }
        }
    }

    #[test]
    fn csv_layout() {
        let recs = [RatioRecord::new(Activation::Relu, 4, 0.0, 2.5), RatioRecord::new(Activation::Tanh, 1, 1.0, 4.0)];
        assert_eq!(ratio_records_csv(&recs), "activation,m,c,C,c_over_C\nrelu,4,0,2.5,0\ntanh,1,1,4,0.25\n");
        assert_eq!(RatioRecord::new(Activation::Relu, 1, 0.0, 0.0).c_over_c, 0.0);
    }
}
