//! Points, multisets and finitely supported signed measures.
//!
//! A [`DiscreteMeasure`] is `Σ w_i δ_{x_i}` with real (possibly negative)
//! weights. Its canonical form merges atoms whose coordinates are bitwise
//! equal, drops zero weights and sorts the support lexicographically, so two
//! measures are equal exactly when their canonical forms are identical.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point of `ℝ^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Point(coords))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Lexicographic total order on coordinates (`f64::total_cmp`).
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        lex_cmp(&self.0, &other.0)
    }

    fn bitwise_eq(&self, other: &Point) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    a.len().cmp(&b.len())
}

/// Unordered collection of points, repetitions allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiset {
    elements: Vec<Point>,
    dim: usize,
    max_size: Option<usize>,
}

impl Multiset {
    pub fn new(dim: usize, elements: Vec<Point>) -> Result<Self> {
        for p in &elements {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        Ok(Multiset {
            elements,
            dim,
            max_size: None,
        })
    }

    /// Multiset in `S_{≤n}`. The bound counts element occurrences, before
    /// repeated points are merged.
    pub fn with_bound(dim: usize, elements: Vec<Point>, max_size: usize) -> Result<Self> {
        if elements.len() > max_size {
            return Err(Error::precondition(format!(
                "multiset has {} elements, bound is {max_size}",
                elements.len()
            )));
        }
        let mut m = Multiset::new(dim, elements)?;
        m.max_size = Some(max_size);
        Ok(m)
    }

    /// Convenience constructor for one-dimensional multisets.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        let pts = xs.iter().map(|&x| Point::scalar(x)).collect::<Result<_>>()?;
        Multiset::new(1, pts)
    }

    pub fn elements(&self) -> &[Point] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max_size(&self) -> Option<usize> {
        self.max_size
    }
}

/// Finitely supported signed measure `Σ w_i δ_{x_i}` on `ℝ^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::precondition(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("measure weights"));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
        }
        Ok(DiscreteMeasure {
            dim,
            points,
            weights,
        })
    }

    pub fn zero(dim: usize) -> Self {
        DiscreteMeasure {
            dim,
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    /// Builds a measure from `(weight, coords)` atoms.
    pub fn from_atoms<I>(dim: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Vec<f64>)>,
    {
        let (weights, points): (Vec<f64>, Vec<Vec<f64>>) = atoms.into_iter().unzip();
        let points = points.into_iter().map(Point::new).collect::<Result<_>>()?;
        DiscreteMeasure::new(dim, points, weights)
    }

    /// One-dimensional measure from `(point, weight)` pairs.
    pub fn from_scalar_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        DiscreteMeasure::from_atoms(1, atoms.iter().map(|&(x, w)| (w, vec![x])))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
    }

    /// Sum of measures, realized as concatenation of atoms.
    pub fn concat(&self, other: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        check_dims(self, other)?;
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        let mut weights = self.weights.clone();
        weights.extend(&other.weights);
        Ok(DiscreteMeasure {
            dim: self.dim,
            points,
            weights,
        })
    }

    pub fn scaled(&self, factor: f64) -> DiscreteMeasure {
        DiscreteMeasure {
            dim: self.dim,
            points: self.points.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    pub fn canonicalize(&self) -> DiscreteMeasure {
        canonicalize(self)
    }

    /// Line-based text format: `d n` followed by `n` lines `w x_1 … x_d`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.dim, self.len());
        for (p, w) in self.atoms() {
            write!(s, "{w:?}").unwrap();
            for c in p.coords() {
                write!(s, " {c:?}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<DiscreteMeasure> {
        parse_measure(text, Path::new("<measure>"))
    }

    pub fn read(path: &Path) -> Result<DiscreteMeasure> {
        let text = std::fs::read_to_string(path)?;
        parse_measure(&text, path)
    }
}

fn parse_measure(text: &str, path: &Path) -> Result<DiscreteMeasure> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing `d n` header"))?;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(path, hline + 1, format!("bad header: {e}")))?;
    let [dim, n] = head[..] else {
        return Err(Error::parse(path, hline + 1, "header must be `d n`"));
    };
    let mut atoms = Vec::with_capacity(n);
    for (idx, line) in lines {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(path, idx + 1, format!("bad number: {e}")))?;
        if vals.len() != dim + 1 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected {} values, found {}", dim + 1, vals.len()),
            ));
        }
        atoms.push((vals[0], vals[1..].to_vec()));
    }
    if atoms.len() != n {
        return Err(Error::parse(
            path,
            hline + 1,
            format!("header declares {n} atoms, found {}", atoms.len()),
        ));
    }
    DiscreteMeasure::from_atoms(dim, atoms)
}

fn check_dims(a: &DiscreteMeasure, b: &DiscreteMeasure) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    Ok(())
}

/// Unit weight per occurrence, then canonicalized.
pub fn from_multiset(s: &Multiset) -> DiscreteMeasure {
    let m = DiscreteMeasure {
        dim: s.dim,
        points: s.elements.clone(),
        weights: vec![1.0; s.len()],
    };
    canonicalize(&m)
}

/// Merge bitwise-equal points, drop zero weights, sort the support.
///
/// Atoms are sorted by `(coords, weight)` before merging, so the merged
/// weights do not depend on the input order.
pub fn canonicalize(m: &DiscreteMeasure) -> DiscreteMeasure {
    let mut idx: Vec<usize> = (0..m.len()).collect();
    idx.sort_by(|&i, &j| {
        m.points[i]
            .lex_cmp(&m.points[j])
            .then(m.weights[i].total_cmp(&m.weights[j]))
    });
    let mut points: Vec<Point> = Vec::with_capacity(m.len());
    let mut weights: Vec<f64> = Vec::with_capacity(m.len());
    for i in idx {
        match points.last() {
            Some(last) if last.bitwise_eq(&m.points[i]) => {
                *weights.last_mut().unwrap() += m.weights[i];
            }
            _ => {
                points.push(m.points[i].clone());
                weights.push(m.weights[i]);
            }
        }
    }
    let (points, weights) = points
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w != 0.0)
        .unzip();
    DiscreteMeasure {
        dim: m.dim,
        points,
        weights,
    }
}

/// Exact equality of canonical forms.
pub fn measures_equal(m1: &DiscreteMeasure, m2: &DiscreteMeasure) -> Result<bool> {
    check_dims(m1, m2)?;
    let (a, b) = (canonicalize(m1), canonicalize(m2));
    Ok(a.len() == b.len()
        && a.atoms()
            .zip(b.atoms())
            .all(|((p, w), (q, v))| p.bitwise_eq(q) && w == v))
}
