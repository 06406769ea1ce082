//! Constructive non-injectivity witnesses for piecewise-linear moment maps.
//!
//! Each construction places atoms inside one linear region of the net, where
//! the feature map is affine, and balances them so that every affine function
//! has the same integral against both measures.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::region::{find_linear_region, interval_is_linear, is_locally_linear, MAX_REGION_ATTEMPTS};
use crate::embed::{moment_embed, norm, ShallowNetParams};
use crate::linalg::null_vector;
use crate::measure::measures_equal;
use crate::{DiscreteMeasure, Error, Point, Result, Seed};

const SET_SPLIT_GAP: f64 = 1e-12;
const AFFINE_GAP: f64 = 1e-10;
const INTEGER_GAP: f64 = 1e-9;
const NULL_RESIDUAL_TOL: f64 = 1e-10;
const GENERATOR_ATTEMPTS: usize = 64;
const MAX_INTEGER_EXP: u32 = 40;
const INTERVAL_PIECES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleKind {
    SetSplit,
    AffineDependence,
    IntegerShift,
    Pigeonhole,
}

impl CounterexampleKind {
    /// Relative bound on `moment_gap`, scaled by `max(1, embedding norm)`.
    pub fn gap_bound(self) -> f64 {
        match self {
            CounterexampleKind::SetSplit => SET_SPLIT_GAP,
            CounterexampleKind::AffineDependence | CounterexampleKind::Pigeonhole => AFFINE_GAP,
            CounterexampleKind::IntegerShift => INTEGER_GAP,
        }
    }
}

/// How the signed null vector is divided between the two measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRule {
    /// Positive weights to `m1`, negated negative weights to `m2`.
    #[default]
    Sign,
    /// First `⌈(d+2)/2⌉` atoms to `m1`, the rest negated to `m2`.
    Index,
}

/// Where the net was verified to be affine: a ball, or a segment
/// `anchor ± t·direction`, `t ∈ [0, radius]`, for unit `direction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexamplePair {
    pub m1: DiscreteMeasure,
    pub m2: DiscreteMeasure,
    pub kind: CounterexampleKind,
    pub region_anchor: Point,
    pub region_radius: f64,
    pub region_direction: Option<Point>,
    pub moment_gap: f64,
    pub embedding_scale: f64,
}

impl CounterexamplePair {
    /// `moment_gap ≤ bound · max(1, embedding norm)`.
    pub fn gap_within_bound(&self) -> bool {
        self.moment_gap <= self.kind.gap_bound() * self.embedding_scale
    }

    /// Re-runs the linear-region test on the recorded region and checks that
    /// every support point lies inside it.
    pub fn verify_region(&self, net: &ShallowNetParams, probes: usize, seed: Seed) -> bool {
        let anchor = self.region_anchor.coords();
        let slack = self.region_radius * (1.0 + 1e-12);
        let supports = self.m1.points().iter().chain(self.m2.points());
        match &self.region_direction {
            None => {
                supports.into_iter().all(|p| crate::embed::dist(p.coords(), anchor) <= slack)
                    && is_locally_linear(net, &self.region_anchor, self.region_radius, probes, seed)
            }
            Some(dir) => {
                let u = dir.coords();
                let on_segment = supports.into_iter().all(|p| {
                    let t: f64 = p.coords().iter().zip(anchor).zip(u).map(|((x, a), u)| (x - a) * u).sum();
                    let off: Vec<f64> = anchor.iter().zip(u).map(|(a, u)| a + t * u).collect();
                    t.abs() <= slack && crate::embed::dist(&off, p.coords()) <= 1e-12 * (1.0 + t.abs())
                });
                let line = restrict_to_line(net, anchor, u);
                on_segment && is_locally_linear(&line, &Point::zeros(1), self.region_radius, probes, seed)
            }
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("finite values serialize")
    }
}

/// The one-dimensional net `t ↦ σ(A(anchor + t·u) + b)`.
fn restrict_to_line(net: &ShallowNetParams, anchor: &[f64], u: &[f64]) -> ShallowNetParams {
    let col: Vec<f64> = (0..net.width())
        .map(|j| net.row(j).iter().zip(u).map(|(a, u)| a * u).sum())
        .collect();
    let bias = net.pre_activation(anchor);
    ShallowNetParams::new(net.width(), 1, col, bias, net.activation()).expect("finite restriction")
}

fn require_pwl(net: &ShallowNetParams) -> Result<()> {
    if !net.activation().is_piecewise_linear() {
        return Err(Error::precondition(format!(
            "counterexamples need a piecewise-linear activation, got {}",
            net.activation()
        )));
    }
    Ok(())
}

struct Region {
    anchor: Point,
    radius: f64,
    direction: Option<Point>,
}

fn assemble(
    net: &ShallowNetParams,
    m1: DiscreteMeasure,
    m2: DiscreteMeasure,
    kind: CounterexampleKind,
    region: Region,
) -> Result<CounterexamplePair> {
    if measures_equal(&m1, &m2)? {
        return Err(Error::precondition("constructed measures coincide"));
    }
    let (e1, e2) = (moment_embed(&m1, net)?, moment_embed(&m2, net)?);
    let gap = crate::embed::dist(&e1, &e2);
    Ok(CounterexamplePair {
        m1,
        m2,
        kind,
        region_anchor: region.anchor,
        region_radius: region.radius,
        region_direction: region.direction,
        moment_gap: gap,
        embedding_scale: norm(&e1).max(norm(&e2)).max(1.0),
    })
}

fn checked(pair: CounterexamplePair) -> Result<CounterexamplePair> {
    if pair.gap_within_bound() {
        Ok(pair)
    } else {
        Err(Error::precondition(format!(
            "moment gap {:e} exceeds the {:?} bound; atoms are not in one linear region",
            pair.moment_gap, pair.kind
        )))
    }
}

/// `{{x0, x0}}` against `{{x0 − ε·dir, x0 + ε·dir}}`.
pub fn set_split_pair(net: &ShallowNetParams, x0: &Point, dir: &[f64], eps: f64) -> Result<CounterexamplePair> {
    require_pwl(net)?;
    crate::embed::check_dim(net.dim(), x0.dim())?;
    crate::embed::check_dim(net.dim(), dir.len())?;
    if eps.is_nan() || eps <= 0.0 || norm(dir) == 0.0 {
        return Err(Error::precondition("eps and dir must be nonzero"));
    }
    let x = x0.coords();
    let lo: Vec<f64> = x.iter().zip(dir).map(|(x, u)| x - eps * u).collect();
    let hi: Vec<f64> = x.iter().zip(dir).map(|(x, u)| x + eps * u).collect();
    let m1 = DiscreteMeasure::from_atoms(x.len(), [(2.0, x.to_vec())])?;
    let m2 = DiscreteMeasure::from_atoms(x.len(), [(1.0, lo), (1.0, hi)])?;
    let region = Region {
        anchor: x0.clone(),
        radius: eps * norm(dir),
        direction: None,
    };
    checked(assemble(net, m1, m2, CounterexampleKind::SetSplit, region)?)
}

fn snap(x: f64, grid: f64) -> f64 {
    (x / grid).round() * grid
}

/// Finds a linear region and splits a doubled atom at its centre.
///
/// Centre and offset are rounded to a common dyadic grid, so
/// `x0 ± offset` are exact and sum to `2·x0` without rounding.
pub fn pwl_counterexample_sets(net: &ShallowNetParams, seed: Seed) -> Result<CounterexamplePair> {
    require_pwl(net)?;
    let d = net.dim();
    for attempt in 0..GENERATOR_ATTEMPTS {
        let s = seed.child(attempt as u64);
        let (x0, r) = find_linear_region(net, s, MAX_REGION_ATTEMPTS)?;
        let grid = 2f64.powi((r / (16.0 * (d as f64).sqrt())).log2().floor() as i32);
        let centre: Vec<f64> = x0.coords().iter().map(|&x| snap(x, grid)).collect();
        let mut rng = s.child(u64::MAX).rng();
        let u = super::region::random_unit(&mut rng, d);
        let offset: Vec<f64> = u.iter().map(|&v| snap(v * r / 2.0, grid)).collect();
        if norm(&offset) == 0.0 {
            continue;
        }
        let radius = r - crate::embed::dist(&centre, x0.coords());
        let lo: Vec<f64> = centre.iter().zip(&offset).map(|(c, o)| c - o).collect();
        let hi: Vec<f64> = centre.iter().zip(&offset).map(|(c, o)| c + o).collect();
        let m1 = DiscreteMeasure::from_atoms(d, [(2.0, centre.clone())])?;
        let m2 = DiscreteMeasure::from_atoms(d, [(1.0, lo), (1.0, hi)])?;
        let region = Region {
            anchor: Point::new(centre)?,
            radius,
            direction: None,
        };
        let pair = assemble(net, m1, m2, CounterexampleKind::SetSplit, region)?;
        if pair.gap_within_bound() {
            return Ok(pair);
        }
    }
    Err(Error::SearchFailed {
        what: "set-split counterexample",
        attempts: GENERATOR_ATTEMPTS,
    })
}

/// Null vector `w` of `[X; 1]` for points `x_1, …, x_{d+2}`, scaled so the
/// smallest nonzero `|w_j|` is 1 and the first nonzero entry is positive.
pub fn affine_null_weights(points: &[Point]) -> Result<Vec<f64>> {
    let Some(d) = points.first().map(Point::dim) else {
        return Err(Error::precondition("no points"));
    };
    let k = points.len();
    if k < d + 2 {
        return Err(Error::precondition(format!("need at least {} points, got {k}", d + 2)));
    }
    let mut mat = DMatrix::zeros(d + 1, k);
    for (j, p) in points.iter().enumerate() {
        crate::embed::check_dim(d, p.dim())?;
        for (i, &c) in p.coords().iter().enumerate() {
            mat[(i, j)] = c;
        }
        mat[(d, j)] = 1.0;
    }
    let v = null_vector(&mat);
    let scale = mat.abs().max().max(1.0);
    if (&mat * &v).norm() > NULL_RESIDUAL_TOL * scale {
        return Err(Error::SearchFailed {
            what: "affine null vector",
            attempts: 1,
        });
    }
    let big = v.amax();
    let tiny = 1e-12 * big;
    let smallest = v.iter().map(|w| w.abs()).filter(|&w| w > tiny).fold(f64::INFINITY, f64::min);
    let sign = v.iter().find(|w| w.abs() > tiny).map_or(1.0, |w| w.signum());
    Ok(v.iter()
        .map(|&w| if w.abs() > tiny { sign * w / smallest } else { 0.0 })
        .collect())
}

fn split_measures(points: &[Point], w: &[f64], rule: SplitRule) -> Result<(DiscreteMeasure, DiscreteMeasure)> {
    let d = points[0].dim();
    let k = match rule {
        SplitRule::Sign => None,
        SplitRule::Index => Some((d + 2).div_ceil(2)),
    };
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (j, (p, &wj)) in points.iter().zip(w).enumerate() {
        if wj == 0.0 {
            continue;
        }
        let to_left = match k {
            None => wj > 0.0,
            Some(k) => j < k,
        };
        if to_left {
            left.push((wj, p.coords().to_vec()));
        } else {
            right.push((-wj, p.coords().to_vec()));
        }
    }
    Ok((DiscreteMeasure::from_atoms(d, left)?, DiscreteMeasure::from_atoms(d, right)?))
}

/// Splits the affine dependence of `points` (all inside the ball
/// `B(anchor, radius)` on which the net is affine) into two measures.
pub fn affine_dependence_pair(
    net: &ShallowNetParams,
    points: &[Point],
    anchor: &Point,
    radius: f64,
    split: SplitRule,
) -> Result<CounterexamplePair> {
    require_pwl(net)?;
    let w = affine_null_weights(points)?;
    let (m1, m2) = split_measures(points, &w, split)?;
    let region = Region {
        anchor: anchor.clone(),
        radius,
        direction: None,
    };
    checked(assemble(net, m1, m2, CounterexampleKind::AffineDependence, region)?)
}

fn uniform_in_ball(rng: &mut impl Rng, centre: &[f64], radius: f64) -> Vec<f64> {
    let u = super::region::random_unit(rng, centre.len());
    let r = radius * rng.random::<f64>().powf(1.0 / centre.len() as f64);
    centre.iter().zip(u).map(|(c, u)| c + r * u).collect()
}

/// Samples `d + 2` points in a linear region and balances them with the
/// null vector of `[X; 1]`.
pub fn pwl_counterexample_measures(net: &ShallowNetParams, seed: Seed, split: SplitRule) -> Result<CounterexamplePair> {
    require_pwl(net)?;
    let d = net.dim();
    for attempt in 0..GENERATOR_ATTEMPTS {
        let s = seed.child(attempt as u64);
        let (x0, r) = find_linear_region(net, s, MAX_REGION_ATTEMPTS)?;
        let mut rng = s.child(u64::MAX).rng();
        let points = (0..d + 2)
            .map(|_| Point::new(uniform_in_ball(&mut rng, x0.coords(), r / 2.0)))
            .collect::<Result<Vec<_>>>()?;
        let Ok(w) = affine_null_weights(&points) else { continue };
        let (m1, m2) = split_measures(&points, &w, split)?;
        let region = Region {
            anchor: x0,
            radius: r,
            direction: None,
        };
        let Ok(pair) = assemble(net, m1, m2, CounterexampleKind::AffineDependence, region) else {
            continue;
        };
        if pair.gap_within_bound() {
            return Ok(pair);
        }
    }
    Err(Error::SearchFailed {
        what: "affine-dependence counterexample",
        attempts: GENERATOR_ATTEMPTS,
    })
}

fn axis_point(d: usize, t: f64) -> Vec<f64> {
    let mut x = vec![0.0; d];
    x[d - 1] = t;
    x
}

/// `{{2N, 2N}}` against `{{N, 3N}}` for the first `N = 1, 2, 4, …` such that
/// the net is affine on `[N, 3N]`. For `d > 1` the integers sit on the last
/// coordinate axis.
pub fn pwl_counterexample_integers(net: &ShallowNetParams) -> Result<CounterexamplePair> {
    require_pwl(net)?;
    let d = net.dim();
    let axis = axis_point(d, 1.0);
    let line = restrict_to_line(net, &vec![0.0; d], &axis);
    for k in 0..=MAX_INTEGER_EXP {
        let n = 2f64.powi(k as i32);
        if !interval_is_linear(&line, n, 3.0 * n, INTERVAL_PIECES) {
            continue;
        }
        let m1 = DiscreteMeasure::from_atoms(d, [(2.0, axis_point(d, 2.0 * n))])?;
        let m2 = DiscreteMeasure::from_atoms(d, [(1.0, axis_point(d, n)), (1.0, axis_point(d, 3.0 * n))])?;
        let region = Region {
            anchor: Point::new(axis_point(d, 2.0 * n))?,
            radius: n,
            direction: Some(Point::new(axis.clone())?),
        };
        let pair = assemble(net, m1, m2, CounterexampleKind::IntegerShift, region)?;
        if pair.gap_within_bound() {
            return Ok(pair);
        }
    }
    Err(Error::SearchFailed {
        what: "integer-shift counterexample",
        attempts: MAX_INTEGER_EXP as usize + 1,
    })
}

/// Three consecutive letters of a one-dimensional alphabet that share a
/// linear piece of the net, balanced by their affine dependence. Such a
/// triple exists whenever the alphabet outnumbers twice the number of
/// linear pieces.
pub fn pwl_counterexample_alphabet(net: &ShallowNetParams, alphabet: &[f64]) -> Result<CounterexamplePair> {
    require_pwl(net)?;
    crate::embed::check_dim(1, net.dim())?;
    let mut letters = alphabet.to_vec();
    letters.sort_by(f64::total_cmp);
    letters.dedup();
    for w in letters.windows(3) {
        let (lo, hi) = (w[0], w[2]);
        if !interval_is_linear(net, lo, hi, INTERVAL_PIECES) {
            continue;
        }
        let points = w.iter().map(|&x| Point::scalar(x)).collect::<Result<Vec<_>>>()?;
        let weights = affine_null_weights(&points)?;
        let (m1, m2) = split_measures(&points, &weights, SplitRule::Sign)?;
        let region = Region {
            anchor: Point::scalar((lo + hi) / 2.0)?,
            radius: (hi - lo) / 2.0,
            direction: Some(Point::scalar(1.0)?),
        };
        let pair = assemble(net, m1, m2, CounterexampleKind::Pigeonhole, region)?;
        if pair.gap_within_bound() {
            return Ok(pair);
        }
    }
    Err(Error::SearchFailed {
        what: "alphabet counterexample",
        attempts: letters.len().saturating_sub(2),
    })
}
