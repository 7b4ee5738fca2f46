//! Printed probe rows shared by the table and acceptance tests.
#![allow(dead_code)]

use slm_core::objectives::{rosenbrock, sphere};

/// `(vertex, probe target, label)`.
pub type Row = ((f64, f64), (f64, f64), usize);

pub struct Table {
    pub name: &'static str,
    pub f: fn(&[f64]) -> f64,
    /// Domain is `[-half, half]^2`.
    pub half: f64,
    pub probe_step: f64,
    pub rows: &'static [Row],
}

pub const TABLES: [Table; 5] = [
    Table {
        name: "sphere initial",
        f: sphere,
        half: 2.0,
        probe_step: 2.0,
        rows: &[
            ((-2.0, 2.0), (0.0, 0.0), 2),
            ((2.0, 2.0), (0.0, 0.0), 2),
            ((-2.0, -2.0), (0.0, 0.0), 0),
            ((2.0, -2.0), (0.0, 0.0), 1),
        ],
    },
    Table {
        name: "sphere first",
        f: sphere,
        half: 2.0,
        probe_step: 1.0,
        rows: &[
            ((-2.0, 2.0), (-1.0, 1.0), 2),
            ((2.0, 2.0), (1.0, 1.0), 2),
            ((-2.0, -2.0), (-1.0, -1.0), 0),
            ((2.0, -2.0), (1.0, -1.0), 1),
            ((2.0, 0.0), (1.0, 0.0), 1),
            ((0.0, 2.0), (0.0, 1.0), 2),
            ((-2.0, 0.0), (-1.0, 0.0), 0),
            ((0.0, -2.0), (0.0, -1.0), 0),
        ],
    },
    Table {
        name: "sphere second",
        f: sphere,
        half: 2.0,
        probe_step: 0.5,
        rows: &[
            ((-1.0, 1.0), (-0.5, 0.5), 2),
            ((1.0, 1.0), (0.5, 0.5), 2),
            ((-1.0, -1.0), (-0.5, -0.5), 0),
            ((1.0, -1.0), (0.5, -0.5), 1),
            ((1.0, 0.0), (0.5, 0.5), 1),
            ((0.0, 1.0), (0.0, 0.5), 2),
            ((-1.0, 0.0), (-0.5, 0.5), 0),
            ((0.0, -1.0), (0.0, -0.5), 0),
            ((0.0, 0.0), (0.0, 0.5), 0),
            ((-1.0, 2.0), (-0.5, 1.5), 2),
            ((2.0, 2.0), (1.5, 1.5), 2),
            ((-2.0, 1.0), (-1.5, 0.5), 2),
        ],
    },
    Table {
        name: "rosenbrock initial",
        f: rosenbrock,
        half: 2.048,
        probe_step: 2.048,
        rows: &[
            ((2.048, 2.048), (0.0, 0.0), 2),
            ((2.048, -2.048), (0.0, 0.0), 1),
            ((-2.048, -2.048), (0.0, 0.0), 0),
            ((-2.048, 2.048), (0.0, 0.0), 2),
        ],
    },
    // The rows from (1.024, 0) and (0, 1.024) are left out: a neighbour
    // beats the printed target (see tables.rs).
    Table {
        name: "rosenbrock second",
        f: rosenbrock,
        half: 2.048,
        probe_step: 0.512,
        rows: &[
            ((1.024, 2.048), (1.536, 2.048), 0),
            ((2.048, 1.024), (1.536, 1.536), 1),
            ((1.024, 1.024), (1.024, 1.024), 0),
        ],
    },
];

/// Plain 3x3 stencil argmin, origin first so it wins ties.
pub fn oracle(f: fn(&[f64]) -> f64, p: (f64, f64), s: f64, lo: f64, hi: f64) -> (f64, f64) {
    let mut best = (p, f(&[p.0, p.1]));
    for i in [-1.0, 0.0, 1.0] {
        for j in [-1.0, 0.0, 1.0] {
            let q = (p.0 + i * s, p.1 + j * s);
            if q.0 < lo || q.0 > hi || q.1 < lo || q.1 > hi {
                continue;
            }
            let v = f(&[q.0, q.1]);
            if v < best.1 {
                best = (q, v);
            }
        }
    }
    best.0
}

pub fn oracle_label(p: (f64, f64), t: (f64, f64)) -> usize {
    if t.1 - p.1 < 0.0 {
        2
    } else if t.0 - p.0 < 0.0 {
        1
    } else {
        0
    }
}
