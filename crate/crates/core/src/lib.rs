//! Derivative-free global optimization by subdividing labeling.
//!
//! The method labels the vertices of a grid over a box by the direction in
//! which a local probe finds improvement, keeps a cell whose vertex labels
//! cover `{0, 1, ..., n}`, halves it, and repeats until the grid spacing
//! reaches a tolerance.
//!
//! Besides the optimizer ([`engine::run_slm`]) the crate ships the five
//! benchmark objectives it is usually exercised on ([`objectives`]), three
//! seeded baselines ([`baselines`]), a benchmark harness that produces
//! comparison tables ([`bench`]) and a renderer for 2-D generation traces
//! ([`trace`]).
//!
//! ```
//! use slm_core::{engine::{run_slm, SlmConfig}, objectives, labeling::Sense};
//!
//! let registry = objectives::registry();
//! let spec = registry.lookup("sphere_min").unwrap();
//! let cfg = SlmConfig::new(Sense::Minimize, 0.0625);
//! let result = run_slm(&*spec.evaluator, &spec.domain, &cfg).unwrap();
//! assert!((result.best_point[1] - 0.4).abs() <= 0.0625);
//! ```

pub mod baselines;
pub mod bench;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod labeling;
pub mod objectives;
pub mod trace;

pub use error::{Result, SlmError};
pub use geometry::{Point, SearchBox, Spacing};
