//! Vertex probing and integer labels.
//!
//! A vertex `p` is compared with every admissible neighbour `p + delta`,
//! `delta` ranging over [`probe_offsets`]. The winner `c` defines the
//! displacement `d = c - p`, and the label is `0` when no component of `d`
//! is negative, otherwise the largest 1-based index `i` with `d_i < 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SlmError};
use crate::geometry::{probe_offsets, Point, SearchBox, Spacing};

/// Whether the run looks for the smallest or the largest objective value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Minimize => a < b,
            Sense::Maximize => a > b,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        }
    }
}

impl std::str::FromStr for Sense {
    type Err = SlmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minimize" => Ok(Sense::Minimize),
            "max" | "maximize" => Ok(Sense::Maximize),
            other => Err(SlmError::InvalidConfig(format!("unknown sense '{other}'"))),
        }
    }
}

/// Evaluates `f` at `p`, rejecting non-finite results.
pub fn evaluate<F>(f: &F, p: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let value = f(p);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(SlmError::NonFiniteObjective {
            point: p.to_vec(),
            value,
        })
    }
}

/// Outcome of probing one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub target: Point,
    pub target_value: f64,
    pub origin_value: f64,
    pub evaluations: usize,
}

/// Finds the best point among `p` and its in-domain neighbours at offsets `s`.
///
/// Ties keep `p`, then the earliest offset.
pub fn probe<F>(f: &F, p: &Point, s: &Spacing, domain: &SearchBox, sense: Sense) -> Result<Probe>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    if p.dim() != domain.dim() || s.len() != domain.dim() {
        return Err(SlmError::DimensionMismatch {
            expected: domain.dim(),
            got: if p.dim() != domain.dim() { p.dim() } else { s.len() },
        });
    }
    let origin_value = evaluate(f, p)?;
    let mut evaluations = 1;
    let mut best: Option<(Point, f64)> = None;

    for delta in probe_offsets(s) {
        let q = p.offset(&delta);
        if !domain.contains(&q) {
            continue;
        }
        let v = evaluate(f, &q)?;
        evaluations += 1;
        let incumbent = best.as_ref().map_or(origin_value, |(_, bv)| *bv);
        if sense.better(v, incumbent) {
            best = Some((q, v));
        }
    }

    let (target, target_value) = best.unwrap_or_else(|| (p.clone(), origin_value));
    Ok(Probe {
        target,
        target_value,
        origin_value,
        evaluations,
    })
}

/// Integer label of a displacement vector, in `0..=n`.
pub fn label_of(displacement: &[f64]) -> usize {
    displacement.iter().rposition(|&d| d < 0.0).map_or(0, |i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledVertex {
    pub point: Point,
    pub probe_target: Point,
    pub displacement: Vec<f64>,
    pub label: usize,
    /// Objective at `point`.
    pub value: f64,
    /// Objective at `probe_target`.
    pub target_value: f64,
    pub evaluations: usize,
}

impl LabeledVertex {
    pub fn moved(&self) -> bool {
        self.displacement.iter().any(|&d| d != 0.0)
    }
}

/// Probes and labels every grid point, preserving grid order.
///
/// `s` is the probe spacing, i.e. half the spacing of the grid being labelled.
pub fn label_grid<F>(f: &F, grid: &[Point], s: &Spacing, domain: &SearchBox, sense: Sense) -> Result<Vec<LabeledVertex>>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    grid.iter()
        .map(|p| {
            let pr = probe(f, p, s, domain, sense)?;
            let displacement = pr.target.minus(p);
            Ok(LabeledVertex {
                point: p.clone(),
                label: label_of(&displacement),
                displacement,
                probe_target: pr.target,
                value: pr.origin_value,
                target_value: pr.target_value,
                evaluations: pr.evaluations,
            })
        })
        .collect()
}
