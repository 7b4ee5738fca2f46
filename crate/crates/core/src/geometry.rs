//! Boxes, grids, cells and probe offsets.
//!
//! Every enumeration here is lexicographic with the first coordinate most
//! significant, so downstream tie-breaks are deterministic.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SlmError};

/// A point in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self + delta`, componentwise.
    pub fn offset(&self, delta: &[f64]) -> Point {
        Point(self.0.iter().zip(delta).map(|(a, d)| a + d).collect())
    }

    /// `self - other`, componentwise.
    pub fn minus(&self, other: &[f64]) -> Vec<f64> {
        self.0.iter().zip(other).map(|(a, b)| a - b).collect()
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

/// Per-dimension grid spacing. All components are strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spacing(Vec<f64>);

impl Spacing {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.is_empty() {
            return Err(SlmError::InvalidConfig(
                "spacing must have at least one component".into(),
            ));
        }
        if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(SlmError::InvalidConfig(format!(
                "spacing component {bad} is not positive"
            )));
        }
        Ok(Spacing(s))
    }

    pub fn halved(&self) -> Spacing {
        Spacing(self.0.iter().map(|v| v / 2.0).collect())
    }

    pub fn max_component(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Deref for Spacing {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A closed axis-aligned box `[lo_0, hi_0] x ... x [lo_{n-1}, hi_{n-1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(SlmError::InvalidBox("box must have at least one dimension".into()));
        }
        if lo.len() != hi.len() {
            return Err(SlmError::InvalidBox(format!(
                "lower bounds have {} entries, upper bounds {}",
                lo.len(),
                hi.len()
            )));
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(SlmError::InvalidBox(format!(
                    "dimension {i}: need finite lo < hi, got [{a}, {b}]"
                )));
            }
        }
        Ok(SearchBox { lo, hi })
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).collect()
    }

    pub fn max_width(&self) -> f64 {
        self.widths().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mid(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (a + b) / 2.0).collect()
    }

    pub fn volume(&self) -> f64 {
        self.widths().iter().product()
    }

    pub fn center(&self) -> Point {
        Point(self.mid())
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// True when `other` lies inside `self` (closed containment).
    pub fn contains_box(&self, other: &SearchBox) -> bool {
        self.contains(&other.lo) && self.contains(&other.hi)
    }

    /// Componentwise projection onto the box.
    pub fn clamp(&self, p: &[f64]) -> Point {
        Point(
            p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(x, (a, b))| x.clamp(*a, *b))
                .collect(),
        )
    }

    /// The `2^n` corners in lexicographic order of the lo/hi choice vector.
    pub fn corners(&self) -> Vec<Point> {
        let n = self.dim();
        (0..1usize << n)
            .map(|code| {
                Point(
                    (0..n)
                        .map(|i| {
                            if (code >> (n - 1 - i)) & 1 == 1 {
                                self.hi[i]
                            } else {
                                self.lo[i]
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// The `3^n` midpoint grid and its `2^n` half-size cells.
    pub fn subdivide(&self) -> Subdivision {
        let n = self.dim();
        let mid = self.mid();
        let levels: Vec<[f64; 3]> = (0..n).map(|i| [self.lo[i], mid[i], self.hi[i]]).collect();

        let grid = (0..3usize.pow(n as u32))
            .map(|code| {
                let digits = base3_digits(code, n);
                Point(digits.iter().enumerate().map(|(i, &d)| levels[i][d]).collect())
            })
            .collect();

        let cells = (0..1usize << n)
            .map(|half| {
                let bits: Vec<usize> = (0..n).map(|i| (half >> (n - 1 - i)) & 1).collect();
                let lo = bits.iter().enumerate().map(|(i, &b)| levels[i][b]).collect();
                let hi = bits.iter().enumerate().map(|(i, &b)| levels[i][b + 1]).collect();
                let vertex_indices = (0..1usize << n)
                    .map(|corner| {
                        (0..n).fold(0, |acc, i| {
                            let c = (corner >> (n - 1 - i)) & 1;
                            acc * 3 + bits[i] + c
                        })
                    })
                    .collect();
                Cell {
                    bounds: SearchBox { lo, hi },
                    vertex_indices,
                }
            })
            .collect();

        Subdivision { grid, cells }
    }
}

/// A subbox of the current generation together with the grid indices of its
/// `2^n` corners (listed in [`SearchBox::corners`] order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub bounds: SearchBox,
    pub vertex_indices: Vec<usize>,
}

impl Cell {
    /// The single cell spanning `bounds`, whose vertices are the box corners
    /// indexed `0..2^n`.
    pub fn whole(bounds: SearchBox) -> Cell {
        let vertex_indices = (0..1usize << bounds.dim()).collect();
        Cell { bounds, vertex_indices }
    }
}

#[derive(Debug, Clone)]
pub struct Subdivision {
    pub grid: Vec<Point>,
    pub cells: Vec<Cell>,
}

/// Initial grid spacing: the full box width in every dimension.
pub fn initial_spacing(b: &SearchBox) -> Spacing {
    Spacing(b.widths())
}

/// All displacement vectors with components in `{-s_i, 0, +s_i}` except the
/// zero vector, `3^n - 1` of them, lexicographic over `-, 0, +`.
pub fn probe_offsets(s: &Spacing) -> Vec<Vec<f64>> {
    let n = s.len();
    let center = (3usize.pow(n as u32) - 1) / 2;
    (0..3usize.pow(n as u32))
        .filter(|&code| code != center)
        .map(|code| {
            base3_digits(code, n)
                .iter()
                .zip(s.iter())
                .map(|(&d, &step)| match d {
                    0 => -step,
                    1 => 0.0,
                    _ => step,
                })
                .collect()
        })
        .collect()
}

fn base3_digits(mut code: usize, n: usize) -> Vec<usize> {
    let mut digits = vec![0; n];
    for slot in digits.iter_mut().rev() {
        *slot = code % 3;
        code /= 3;
    }
    digits
}
