//! Seeded comparison optimizers: random search, random search-walk and
//! simulated annealing.
//!
//! Randomness comes from ChaCha8 seeded with [`SeedableRng::seed_from_u64`].
//! Uniform reals are built directly from the top 53 bits of `next_u64`, so a
//! given seed yields the same sequence on every platform and independently
//! of `rand`'s distribution implementations.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlmError};
use crate::geometry::{Point, SearchBox};
use crate::labeling::{evaluate, Sense};
use crate::objectives::ObjectiveSpec;

/// Samples drawn to calibrate the initial annealing temperature.
pub const CALIBRATION_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub iterations: usize,
    pub seed: u64,
    pub initial_point: Option<Point>,
    /// Proposal half-width at the first iteration, as a fraction of the
    /// domain width.
    pub step_scale_initial: f64,
    /// Proposal half-width at the last iteration.
    pub step_scale_final: f64,
    /// `None` calibrates from the value spread of a few uniform samples.
    pub temperature_initial: Option<f64>,
    pub cooling_ratio: f64,
}

impl BaselineConfig {
    pub fn new(iterations: usize, seed: u64) -> Self {
        BaselineConfig {
            iterations,
            seed,
            initial_point: None,
            step_scale_initial: 0.5,
            step_scale_final: 0.01,
            temperature_initial: None,
            cooling_ratio: 0.95,
        }
    }

    pub fn with_initial(mut self, p: Point) -> Self {
        self.initial_point = Some(p);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SlmError::InvalidConfig(m));
        if self.iterations == 0 {
            return bad("iterations must be at least 1".into());
        }
        let (s0, s1) = (self.step_scale_initial, self.step_scale_final);
        if !(s0.is_finite() && s1.is_finite() && s1 <= s0 && s1 >= 0.0 && (s1 > 0.0 || s0 == 0.0)) {
            return bad(format!(
                "need 0 < step_scale_final <= step_scale_initial, got {s1} and {s0}"
            ));
        }
        if let Some(t) = self.temperature_initial {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("temperature_initial must be positive, got {t}"));
            }
        }
        if !(self.cooling_ratio > 0.0 && self.cooling_ratio < 1.0) {
            return bad(format!("cooling_ratio must lie in (0, 1), got {}", self.cooling_ratio));
        }
        Ok(())
    }

    /// Proposal scale (fraction of width) at iteration `t`, decaying
    /// geometrically from the initial to the final value.
    pub fn step_scale(&self, t: usize) -> f64 {
        if self.step_scale_initial == 0.0 {
            return 0.0;
        }
        if self.iterations <= 1 {
            return self.step_scale_initial;
        }
        let frac = t as f64 / (self.iterations - 1) as f64;
        self.step_scale_initial * (self.step_scale_final / self.step_scale_initial).powf(frac)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimRunResult {
    pub best_point: Point,
    pub best_value: f64,
    pub evaluations: usize,
    /// `(iteration, best value so far)` after every iteration.
    pub trajectory: Option<Vec<(usize, f64)>>,
    /// Starting point actually used by the walk methods.
    pub start: Option<Point>,
    /// Set when the requested start lay outside the domain and was clamped.
    pub start_clamped: bool,
    /// Worsening moves accepted (simulated annealing only).
    pub accepted_worse: usize,
}

/// Seeded uniform source.
pub struct Uniform01(ChaCha8Rng);

impl Uniform01 {
    pub fn new(seed: u64) -> Self {
        Uniform01(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn point_in(&mut self, b: &SearchBox) -> Point {
        Point(
            b.lo()
                .iter()
                .zip(b.hi())
                .map(|(lo, hi)| lo + self.next_f64() * (hi - lo))
                .collect(),
        )
    }
}

struct Best {
    sense: Sense,
    point: Point,
    value: f64,
}

impl Best {
    fn offer(&mut self, p: &Point, v: f64) {
        if self.sense.better(v, self.value) {
            self.point = p.clone();
            self.value = v;
        }
    }
}

/// Pure uniform sampling over the domain.
pub fn random_search(spec: &ObjectiveSpec, cfg: &BaselineConfig) -> Result<OptimRunResult> {
    cfg.validate()?;
    let f = &*spec.evaluator;
    let mut rng = Uniform01::new(cfg.seed);
    let first = rng.point_in(&spec.domain);
    let first_value = evaluate(f, &first)?;
    let mut best = Best {
        sense: spec.sense,
        point: first,
        value: first_value,
    };
    let mut trajectory = vec![(0, first_value)];
    for t in 1..cfg.iterations {
        let p = rng.point_in(&spec.domain);
        let v = evaluate(f, &p)?;
        best.offer(&p, v);
        trajectory.push((t, best.value));
    }
    Ok(OptimRunResult {
        best_point: best.point,
        best_value: best.value,
        evaluations: cfg.iterations,
        trajectory: Some(trajectory),
        start: None,
        start_clamped: false,
        accepted_worse: 0,
    })
}

fn start_point(spec: &ObjectiveSpec, cfg: &BaselineConfig) -> Result<(Point, bool)> {
    match &cfg.initial_point {
        Some(p) => {
            if p.dim() != spec.domain.dim() {
                return Err(SlmError::DimensionMismatch {
                    expected: spec.domain.dim(),
                    got: p.dim(),
                });
            }
            let clamped = spec.domain.clamp(p);
            let moved = clamped != *p;
            Ok((clamped, moved))
        }
        None => Ok((spec.domain.center(), false)),
    }
}

fn propose(rng: &mut Uniform01, x: &Point, widths: &[f64], scale: f64, domain: &SearchBox) -> Point {
    let stepped: Vec<f64> = x
        .iter()
        .zip(widths)
        .map(|(xi, w)| {
            let u = 2.0 * rng.next_f64() - 1.0;
            xi + u * scale * w
        })
        .collect();
    domain.clamp(&stepped)
}

/// Greedy random walk with a geometrically shrinking proposal box.
pub fn random_search_walk(spec: &ObjectiveSpec, cfg: &BaselineConfig) -> Result<OptimRunResult> {
    cfg.validate()?;
    let f = &*spec.evaluator;
    let mut rng = Uniform01::new(cfg.seed);
    let widths = spec.domain.widths();
    let (start, start_clamped) = start_point(spec, cfg)?;
    let start_value = evaluate(f, &start)?;
    let mut best = Best {
        sense: spec.sense,
        point: start.clone(),
        value: start_value,
    };
    let mut trajectory = Vec::with_capacity(cfg.iterations);
    for t in 0..cfg.iterations {
        let q = propose(&mut rng, &best.point, &widths, cfg.step_scale(t), &spec.domain);
        let v = evaluate(f, &q)?;
        best.offer(&q, v);
        trajectory.push((t, best.value));
    }
    Ok(OptimRunResult {
        best_point: best.point,
        best_value: best.value,
        evaluations: cfg.iterations + 1,
        trajectory: Some(trajectory),
        start: Some(start),
        start_clamped,
        accepted_worse: 0,
    })
}

/// Metropolis acceptance with geometric cooling; returns the best point ever
/// visited.
pub fn simulated_annealing(spec: &ObjectiveSpec, cfg: &BaselineConfig) -> Result<OptimRunResult> {
    cfg.validate()?;
    let f = &*spec.evaluator;
    let mut rng = Uniform01::new(cfg.seed);
    let widths = spec.domain.widths();
    let mut evaluations = 0;

    let mut temperature = match cfg.temperature_initial {
        Some(t) => t,
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for _ in 0..CALIBRATION_SAMPLES {
                let v = evaluate(f, &rng.point_in(&spec.domain))?;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            evaluations += CALIBRATION_SAMPLES;
            if hi > lo {
                hi - lo
            } else {
                1.0
            }
        }
    };

    let (start, start_clamped) = start_point(spec, cfg)?;
    let mut current_value = evaluate(f, &start)?;
    evaluations += 1;
    let mut current = start.clone();
    let mut best = Best {
        sense: spec.sense,
        point: start.clone(),
        value: current_value,
    };
    let mut accepted_worse = 0;
    let mut trajectory = Vec::with_capacity(cfg.iterations);

    for t in 0..cfg.iterations {
        let q = propose(&mut rng, &current, &widths, cfg.step_scale(t), &spec.domain);
        let v = evaluate(f, &q)?;
        evaluations += 1;
        // positive delta = worse under the run's sense
        let delta = match spec.sense {
            Sense::Minimize => v - current_value,
            Sense::Maximize => current_value - v,
        };
        let accept = delta <= 0.0 || rng.next_f64() < (-delta / temperature).exp();
        if accept {
            if delta > 0.0 {
                accepted_worse += 1;
            }
            current = q;
            current_value = v;
            best.offer(&current, current_value);
        }
        temperature *= cfg.cooling_ratio;
        trajectory.push((t, best.value));
    }

    Ok(OptimRunResult {
        best_point: best.point,
        best_value: best.value,
        evaluations,
        trajectory: Some(trajectory),
        start: Some(start),
        start_clamped,
        accepted_worse,
    })
}
