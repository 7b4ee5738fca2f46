//! The generation loop.
//!
//! Generation 0 labels the corners of the domain, treated as a single cell.
//! Every later generation labels the `3^n` midpoint grid of the box chosen
//! by its predecessor, keeps a completely labelled cell and recurses into
//! it. Grid spacing halves every generation; the run stops once the largest
//! spacing component is at or below the tolerance.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SlmError};
use crate::geometry::{initial_spacing, Cell, Point, SearchBox, Spacing};
use crate::labeling::{label_grid, LabeledVertex, Sense};

pub const DEFAULT_MAX_GENERATIONS: usize = 60;
pub const DEFAULT_CELL_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlmConfig {
    pub sense: Sense,
    /// Stop once every spacing component is `<= tolerance`.
    pub tolerance: f64,
    pub max_generations: usize,
    /// Refine every completely labelled cell instead of only the best one.
    pub explore_all: bool,
    /// Upper bound on cells refined simultaneously when `explore_all` is set.
    pub cell_budget: usize,
}

impl SlmConfig {
    pub fn new(sense: Sense, tolerance: f64) -> Self {
        SlmConfig {
            sense,
            tolerance,
            max_generations: DEFAULT_MAX_GENERATIONS,
            explore_all: false,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }

    pub fn explore_all(mut self, budget: usize) -> Self {
        self.explore_all = true;
        self.cell_budget = budget;
        self
    }

    pub fn max_generations(mut self, cap: usize) -> Self {
        self.max_generations = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(SlmError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_generations == 0 {
            return Err(SlmError::InvalidConfig("max_generations must be at least 1".into()));
        }
        if self.cell_budget == 0 {
            return Err(SlmError::InvalidConfig("cell_budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceReached,
    GenerationCap,
    NoCompleteCellExhausted,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ToleranceReached => "tolerance_reached",
            Termination::GenerationCap => "generation_cap",
            Termination::NoCompleteCellExhausted => "no_complete_cell_exhausted",
        }
    }
}

/// One labelled box of one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub index: usize,
    pub bounds: SearchBox,
    /// Grid spacing of this generation; vertices were probed at half of it.
    pub spacing: Spacing,
    pub vertices: Vec<LabeledVertex>,
    pub complete_cells: Vec<Cell>,
    pub chosen: Option<Cell>,
    pub fallback_used: bool,
    pub evaluations: usize,
    /// Best value seen anywhere in the run up to and including this record.
    pub best_so_far: f64,
}

impl GenerationRecord {
    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    /// Best point among this record's vertices and probe targets.
    pub fn best_point(&self, sense: Sense) -> Option<(Point, f64)> {
        let mut best: Option<(&Point, f64)> = None;
        for v in &self.vertices {
            for (p, val) in [(&v.point, v.value), (&v.probe_target, v.target_value)] {
                if best.is_none_or(|(_, b)| sense.better(val, b)) {
                    best = Some((p, val));
                }
            }
        }
        best.map(|(p, v)| (p.clone(), v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_point: Point,
    pub best_value: f64,
    /// One representative per surviving cell, best first. Empty unless
    /// `explore_all` was set.
    pub candidates: Vec<(Point, f64)>,
    pub generations: Vec<GenerationRecord>,
    pub evaluations: usize,
    pub termination: Termination,
}

impl RunResult {
    /// Number of subdivision generations performed (index of the last one).
    pub fn generation_count(&self) -> usize {
        self.generations.last().map_or(0, |g| g.index)
    }

    /// Boxes chosen for refinement, one per generation, following the main
    /// (best-first) branch.
    pub fn chosen_boxes(&self) -> Vec<SearchBox> {
        let mut out = Vec::new();
        let mut current: Option<&SearchBox> = None;
        for g in &self.generations {
            if let Some(cur) = current {
                if g.bounds != *cur {
                    continue;
                }
            } else if g.index != 0 {
                continue;
            }
            match &g.chosen {
                Some(c) => {
                    out.push(c.bounds.clone());
                    current = Some(&c.bounds);
                }
                None => break,
            }
        }
        out
    }
}

/// Cells whose vertex labels cover `0..=n`, in input order.
pub fn complete_cells(cells: &[Cell], labels: &[usize], n: usize) -> Vec<Cell> {
    cells
        .iter()
        .filter(|c| {
            let mut seen = vec![false; n + 1];
            for &i in &c.vertex_indices {
                if let Some(slot) = seen.get_mut(labels[i]) {
                    *slot = true;
                }
            }
            seen.iter().all(|&s| s)
        })
        .cloned()
        .collect()
}

fn best_vertex_value(cell: &Cell, vertices: &[LabeledVertex], sense: Sense) -> f64 {
    cell.vertex_indices
        .iter()
        .map(|&i| vertices[i].value)
        .reduce(|a, b| if sense.better(b, a) { b } else { a })
        .expect("cells have at least two vertices")
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Orders cells best first: by best vertex value, then lower corner.
fn rank_cells(cells: &mut [(Cell, f64)], sense: Sense) {
    cells.sort_by(|(ca, va), (cb, vb)| {
        let by_value = match sense {
            Sense::Minimize => va.total_cmp(vb),
            Sense::Maximize => vb.total_cmp(va),
        };
        by_value.then_with(|| lex_cmp(ca.bounds.lo(), cb.bounds.lo()))
    });
}

/// The complete cell whose best vertex is best; ties go to the
/// lexicographically smallest lower corner.
pub fn select_cell(complete: &[Cell], vertices: &[LabeledVertex], sense: Sense) -> Option<Cell> {
    let mut ranked: Vec<(Cell, f64)> = complete
        .iter()
        .map(|c| (c.clone(), best_vertex_value(c, vertices, sense)))
        .collect();
    rank_cells(&mut ranked, sense);
    ranked.into_iter().next().map(|(c, _)| c)
}

/// First cell containing the best-valued vertex.
fn fallback_cell(cells: &[Cell], vertices: &[LabeledVertex], sense: Sense) -> Cell {
    let best = (1..vertices.len()).fold(0, |b, i| {
        if sense.better(vertices[i].value, vertices[b].value) {
            i
        } else {
            b
        }
    });
    cells
        .iter()
        .find(|c| c.vertex_indices.contains(&best))
        .expect("every grid vertex belongs to a cell")
        .clone()
}

/// Number of halvings needed to bring the widest side down to `tolerance`.
pub fn generation_bound(domain: &SearchBox, tolerance: f64) -> usize {
    let mut width = domain.max_width();
    let mut k = 0;
    while width > tolerance {
        width /= 2.0;
        k += 1;
    }
    k
}

struct Branch {
    bounds: SearchBox,
}

struct Tracker {
    sense: Sense,
    best: Option<(Point, f64)>,
}

impl Tracker {
    fn offer(&mut self, p: &Point, v: f64) {
        if self.best.as_ref().is_none_or(|(_, b)| self.sense.better(v, *b)) {
            self.best = Some((p.clone(), v));
        }
    }
}

fn is_degenerate(b: &SearchBox) -> bool {
    b.lo().iter().zip(b.hi()).any(|(lo, hi)| lo >= hi)
}

/// Runs the subdividing labelling method on `f` over `domain`.
pub fn run_slm<F>(f: &F, domain: &SearchBox, config: &SlmConfig) -> Result<RunResult>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    config.validate()?;
    let n = domain.dim();
    let sense = config.sense;

    let mut spacing = initial_spacing(domain);
    let mut frontier = vec![Branch { bounds: domain.clone() }];
    let mut generations: Vec<GenerationRecord> = Vec::new();
    let mut tracker = Tracker { sense, best: None };
    let mut evaluations = 0usize;
    let mut index = 0usize;

    let termination = loop {
        let probe_spacing = spacing.halved();
        let mut children: Vec<(Cell, f64)> = Vec::new();
        let first_record = generations.len();

        for branch in &frontier {
            let (grid, cells) = if index == 0 {
                (branch.bounds.corners(), vec![Cell::whole(branch.bounds.clone())])
            } else {
                let sub = branch.bounds.subdivide();
                (sub.grid, sub.cells)
            };

            let vertices = label_grid(f, &grid, &probe_spacing, domain, sense).map_err(|e| SlmError::AtGeneration {
                generation: index,
                source: Box::new(e),
            })?;
            let spent: usize = vertices.iter().map(|v| v.evaluations).sum();
            evaluations += spent;
            for v in &vertices {
                tracker.offer(&v.point, v.value);
                tracker.offer(&v.probe_target, v.target_value);
            }

            let labels: Vec<usize> = vertices.iter().map(|v| v.label).collect();
            let complete = complete_cells(&cells, &labels, n);
            let (chosen, fallback_used) = match select_cell(&complete, &vertices, sense) {
                Some(c) => (c, false),
                None => (fallback_cell(&cells, &vertices, sense), true),
            };

            if config.explore_all && !fallback_used {
                children.extend(
                    complete
                        .iter()
                        .map(|c| (c.clone(), best_vertex_value(c, &vertices, sense))),
                );
            } else {
                let v = best_vertex_value(&chosen, &vertices, sense);
                children.push((chosen.clone(), v));
            }

            generations.push(GenerationRecord {
                index,
                bounds: branch.bounds.clone(),
                spacing: spacing.clone(),
                vertices,
                complete_cells: complete,
                chosen: Some(chosen),
                fallback_used,
                evaluations: spent,
                best_so_far: tracker.best.as_ref().map_or(f64::NAN, |(_, b)| *b),
            });
        }

        if spacing.max_component() <= config.tolerance {
            break Termination::ToleranceReached;
        }
        if index >= config.max_generations {
            break Termination::GenerationCap;
        }

        rank_cells(&mut children, sense);
        children.truncate(if config.explore_all { config.cell_budget } else { 1 });

        if children.iter().any(|(c, _)| is_degenerate(&c.bounds)) {
            for g in &mut generations[first_record..] {
                g.chosen = None;
            }
            break Termination::NoCompleteCellExhausted;
        }

        frontier = children.into_iter().map(|(c, _)| Branch { bounds: c.bounds }).collect();
        spacing = spacing.halved();
        index += 1;
    };

    let candidates = if config.explore_all {
        collect_candidates(&generations, index, sense)
    } else {
        Vec::new()
    };

    let (best_point, best_value) = tracker.best.expect("generation 0 evaluates at least one point");
    Ok(RunResult {
        best_point,
        best_value,
        candidates,
        generations,
        evaluations,
        termination,
    })
}

fn collect_candidates(generations: &[GenerationRecord], last: usize, sense: Sense) -> Vec<(Point, f64)> {
    let mut out: Vec<(Point, f64)> = Vec::new();
    for g in generations.iter().filter(|g| g.index == last) {
        if let Some((p, v)) = g.best_point(sense) {
            if !out.iter().any(|(q, _)| *q == p) {
                out.push((p, v));
            }
        }
    }
    out.sort_by(|(pa, va), (pb, vb)| {
        let by_value = match sense {
            Sense::Minimize => va.total_cmp(vb),
            Sense::Maximize => vb.total_cmp(va),
        };
        by_value.then_with(|| lex_cmp(pa, pb))
    });
    out
}
