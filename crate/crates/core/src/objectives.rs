//! Benchmark objectives and the name registry.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SlmError};
use crate::geometry::{Point, SearchBox};
use crate::labeling::Sense;

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `x0^2 + (x1 - 0.4)^2`. Minimum 0 at `(0, 0.4)`.
pub fn sphere(x: &[f64]) -> f64 {
    x[0] * x[0] + (x[1] - 0.4) * (x[1] - 0.4)
}

/// `cos(pi x0 / 2) - sin(pi x1 / 2)`, periodic with period 4 in both
/// arguments, range `[-2, 2]`.
pub fn trig(x: &[f64]) -> f64 {
    (FRAC_PI_2 * x[0]).cos() - (FRAC_PI_2 * x[1]).sin()
}

/// De Jong f2: `100 (x0^2 - x1)^2 + (1 - x0)^2`. Minimum 0 at `(1, 1)`.
pub fn rosenbrock(x: &[f64]) -> f64 {
    let a = x[0] * x[0] - x[1];
    let b = 1.0 - x[0];
    100.0 * a * a + b * b
}

const FOXHOLE_LEVELS: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];

/// Foxhole centre `i` (0-based): the first coordinate cycles through the five
/// levels, the second advances one level every five holes.
pub fn shekel_coeff(i: usize) -> Result<(f64, f64)> {
    if i >= 25 {
        return Err(SlmError::ShekelIndex(i));
    }
    Ok((FOXHOLE_LEVELS[i % 5], FOXHOLE_LEVELS[i / 5]))
}

/// De Jong f5 (Shekel's foxholes):
/// `1 / (0.002 + sum_{i=0}^{24} 1 / (i + 1 + sum_j (x_j - a_ij)^6))`.
///
/// Hole `i` carries the weight `i + 1`, which keeps every denominator
/// positive and puts the deepest hole at `(-32, -32)` with value ~0.998004.
pub fn shekel(x: &[f64]) -> f64 {
    let inner: f64 = (0..25)
        .map(|i| {
            let (a0, a1) = (FOXHOLE_LEVELS[i % 5], FOXHOLE_LEVELS[i / 5]);
            let dist6 = (x[0] - a0).powi(6) + (x[1] - a1).powi(6);
            1.0 / ((i + 1) as f64 + dist6)
        })
        .sum();
    1.0 / (0.002 + inner)
}

/// A named objective with its domain, optimisation sense and known optima.
#[derive(Clone)]
pub struct ObjectiveSpec {
    pub name: String,
    pub dimension: usize,
    pub domain: SearchBox,
    pub sense: Sense,
    pub known_optima: Vec<(Point, f64)>,
    /// Human-readable description of the optimum set.
    pub optima_description: String,
    pub evaluator: Evaluator,
}

impl ObjectiveSpec {
    pub fn new(
        name: impl Into<String>,
        domain: SearchBox,
        sense: Sense,
        known_optima: Vec<Point>,
        evaluator: Evaluator,
    ) -> Result<Self> {
        let name = name.into();
        let known_optima = known_optima
            .into_iter()
            .map(|p| {
                if !domain.contains(&p) {
                    return Err(SlmError::InvalidConfig(format!(
                        "{name}: known optimum {:?} lies outside the domain",
                        p.0
                    )));
                }
                let v = evaluator(&p);
                Ok((p, v))
            })
            .collect::<Result<Vec<_>>>()?;
        let optima_description = describe_points(&known_optima);
        Ok(ObjectiveSpec {
            name,
            dimension: domain.dim(),
            domain,
            sense,
            known_optima,
            optima_description,
            evaluator,
        })
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.optima_description = d.into();
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("sense", &self.sense)
            .field("known_optima", &self.known_optima)
            .finish_non_exhaustive()
    }
}

fn describe_points(optima: &[(Point, f64)]) -> String {
    optima
        .iter()
        .map(|(p, v)| {
            let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            format!("({}) = {}", coords.join(", "), v)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Objectives addressable by name.
#[derive(Debug, Clone)]
pub struct Registry {
    specs: Vec<ObjectiveSpec>,
}

pub const BUILTIN_NAMES: [&str; 5] = ["sphere_min", "trig", "sphere_max", "rosenbrock", "shekel"];

impl Registry {
    /// The five built-in objectives.
    pub fn builtin() -> Self {
        let sq = |r: f64| SearchBox::cube(2, -r, r).expect("static domain");
        let p = |x: f64, y: f64| Point(vec![x, y]);

        let trig_optima = [-6.0, -2.0, 2.0, 6.0]
            .iter()
            .flat_map(|&x| [-7.0, -3.0, 1.0, 5.0].map(|y| p(x, y)))
            .collect();

        let specs = vec![
            ObjectiveSpec::new(
                "sphere_min",
                sq(2.0),
                Sense::Minimize,
                vec![p(0.0, 0.4)],
                Arc::new(sphere),
            ),
            ObjectiveSpec::new("trig", sq(7.0), Sense::Minimize, trig_optima, Arc::new(trig))
                .map(|s| s.with_description("(±4k1 ± 2, 4k2 + 1) inside [-7,7]^2, value -2")),
            ObjectiveSpec::new(
                "sphere_max",
                sq(2.0),
                Sense::Maximize,
                vec![p(-2.0, -2.0)],
                Arc::new(sphere),
            ),
            ObjectiveSpec::new(
                "rosenbrock",
                sq(2.048),
                Sense::Minimize,
                vec![p(1.0, 1.0)],
                Arc::new(rosenbrock),
            ),
            ObjectiveSpec::new(
                "shekel",
                sq(65.536),
                Sense::Minimize,
                vec![p(-32.0, -32.0)],
                Arc::new(shekel),
            ),
        ];
        Registry {
            specs: specs
                .into_iter()
                .collect::<Result<_>>()
                .expect("builtin objectives are valid"),
        }
    }

    /// Adds or replaces an objective.
    pub fn register(&mut self, spec: ObjectiveSpec) {
        match self.specs.iter_mut().find(|s| s.name == spec.name) {
            Some(slot) => *slot = spec,
            None => self.specs.push(spec),
        }
    }

    pub fn lookup(&self, name: &str) -> Result<&ObjectiveSpec> {
        self.specs
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| SlmError::UnknownObjective {
                name: name.to_string(),
                available: self.names(),
            })
    }

    pub fn names(&self) -> Vec<String> {
        self.specs.iter().map(|s| s.name.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObjectiveSpec> {
        self.specs.iter()
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Shorthand for [`Registry::builtin`].
pub fn registry() -> Registry {
    Registry::builtin()
}
