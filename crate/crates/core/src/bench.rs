//! Algorithm x objective benchmark runs and their tabular output.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::baselines::{random_search, random_search_walk, simulated_annealing, BaselineConfig};
use crate::engine::{run_slm, SlmConfig, DEFAULT_CELL_BUDGET, DEFAULT_MAX_GENERATIONS};
use crate::error::{Result, SlmError};
use crate::geometry::Point;
use crate::objectives::{ObjectiveSpec, Registry};

/// Default budgets of the comparison runs.
pub const RS_ITERATIONS: usize = 1000;
pub const RSW_ITERATIONS: usize = 500;
pub const SA_ITERATIONS: usize = 150;
/// Default SLM tolerance is the widest domain side divided by `2^10`.
pub const SLM_TOLERANCE_HALVINGS: i32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Slm,
    Rs,
    Rsw,
    Sa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Slm, Algorithm::Rs, Algorithm::Rsw, Algorithm::Sa];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Slm => "slm",
            Algorithm::Rs => "rs",
            Algorithm::Rsw => "rsw",
            Algorithm::Sa => "sa",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Slm => "SLM",
            Algorithm::Rs => "RS",
            Algorithm::Rsw => "RSW",
            Algorithm::Sa => "SA",
        }
    }
}

impl FromStr for Algorithm {
    type Err = SlmError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SlmError::InvalidConfig(format!("unknown algorithm '{s}' (expected slm, rs, rsw or sa)")))
    }
}

/// SLM knobs that do not depend on the objective; `tolerance: None` means
/// the widest side over `2^10`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlmSettings {
    pub tolerance: Option<f64>,
    pub max_generations: usize,
    pub explore_all: bool,
    pub cell_budget: usize,
}

impl Default for SlmSettings {
    fn default() -> Self {
        SlmSettings {
            tolerance: None,
            max_generations: DEFAULT_MAX_GENERATIONS,
            explore_all: false,
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }
}

impl SlmSettings {
    pub fn config_for(&self, spec: &ObjectiveSpec) -> SlmConfig {
        let tolerance = self
            .tolerance
            .unwrap_or_else(|| spec.domain.max_width() / 2f64.powi(SLM_TOLERANCE_HALVINGS));
        SlmConfig {
            sense: spec.sense,
            tolerance,
            max_generations: self.max_generations,
            explore_all: self.explore_all,
            cell_budget: self.cell_budget,
        }
    }
}

/// One algorithm with its settings. The baseline seed is overwritten per
/// repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AlgorithmSpec {
    Slm(SlmSettings),
    Rs(BaselineConfig),
    Rsw(BaselineConfig),
    Sa(BaselineConfig),
}

impl AlgorithmSpec {
    pub fn default_for(a: Algorithm) -> Self {
        match a {
            Algorithm::Slm => AlgorithmSpec::Slm(SlmSettings::default()),
            Algorithm::Rs => AlgorithmSpec::Rs(BaselineConfig::new(RS_ITERATIONS, 0)),
            Algorithm::Rsw => AlgorithmSpec::Rsw(BaselineConfig::new(RSW_ITERATIONS, 0)),
            Algorithm::Sa => AlgorithmSpec::Sa(BaselineConfig::new(SA_ITERATIONS, 0)),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmSpec::Slm(_) => Algorithm::Slm,
            AlgorithmSpec::Rs(_) => Algorithm::Rs,
            AlgorithmSpec::Rsw(_) => Algorithm::Rsw,
            AlgorithmSpec::Sa(_) => Algorithm::Sa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Markdown,
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = SlmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            "csv" => Ok(OutputFormat::Csv),
            "json-lines" | "jsonl" => Ok(OutputFormat::JsonLines),
            other => Err(SlmError::InvalidConfig(format!(
                "unknown output format '{other}' (expected markdown, csv or json-lines)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub objectives: Vec<String>,
    pub algorithms: Vec<AlgorithmSpec>,
    /// Baseline seeds run over `0..repeats`.
    pub repeats: u64,
    pub output_format: OutputFormat,
}

impl BenchSpec {
    /// Every listed objective against all four algorithms with default
    /// budgets.
    pub fn with_defaults(objectives: Vec<String>) -> Self {
        BenchSpec {
            objectives,
            algorithms: Algorithm::ALL.into_iter().map(AlgorithmSpec::default_for).collect(),
            repeats: 1,
            output_format: OutputFormat::Markdown,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: String,
    pub objective: String,
    pub iterations: usize,
    pub found_point: Point,
    pub found_value: f64,
    /// Componentwise absolute distance to the nearest known optimum.
    pub deviation: Vec<f64>,
    pub wall_time: Duration,
    pub seed: u64,
}

/// Componentwise `|found - o|` for the known optimum `o` closest to `found`
/// in Euclidean distance. Empty when no optimum is known.
pub fn deviation(found: &[f64], optima: &[Point]) -> Vec<f64> {
    let dist2 = |o: &Point| found.iter().zip(o.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    optima
        .iter()
        .min_by(|a, b| dist2(a).total_cmp(&dist2(b)))
        .map(|o| found.iter().zip(o.iter()).map(|(a, b)| (a - b).abs()).collect())
        .unwrap_or_default()
}

fn run_one(alg: &AlgorithmSpec, spec: &ObjectiveSpec, seed: u64) -> Result<(usize, Point, f64)> {
    let seeded = |cfg: &BaselineConfig| BaselineConfig { seed, ..cfg.clone() };
    Ok(match alg {
        AlgorithmSpec::Slm(s) => {
            let r = run_slm(&*spec.evaluator, &spec.domain, &s.config_for(spec))?;
            (r.generation_count(), r.best_point, r.best_value)
        }
        AlgorithmSpec::Rs(c) => {
            let r = random_search(spec, &seeded(c))?;
            (c.iterations, r.best_point, r.best_value)
        }
        AlgorithmSpec::Rsw(c) => {
            let r = random_search_walk(spec, &seeded(c))?;
            (c.iterations, r.best_point, r.best_value)
        }
        AlgorithmSpec::Sa(c) => {
            let r = simulated_annealing(spec, &seeded(c))?;
            (c.iterations, r.best_point, r.best_value)
        }
    })
}

/// Runs every (objective, algorithm, seed) triple, objective-major.
///
/// SLM is deterministic, so it runs once per objective and its row is
/// repeated for every seed.
pub fn run_bench(spec: &BenchSpec, registry: &Registry) -> Result<Vec<BenchRow>> {
    if spec.repeats == 0 {
        return Err(SlmError::InvalidConfig("repeats must be at least 1".into()));
    }
    let objectives = spec
        .objectives
        .iter()
        .map(|name| registry.lookup(name))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for obj in objectives {
        let optima: Vec<Point> = obj.known_optima.iter().map(|(p, _)| p.clone()).collect();
        for alg in &spec.algorithms {
            let mut cached: Option<(usize, Point, f64, Duration)> = None;
            for seed in 0..spec.repeats {
                let (iterations, point, value, wall_time) = match (&cached, alg) {
                    (Some(c), AlgorithmSpec::Slm(_)) => c.clone(),
                    _ => {
                        let started = Instant::now();
                        let (it, p, v) = run_one(alg, obj, seed)?;
                        let out = (it, p, v, started.elapsed());
                        cached = Some(out.clone());
                        out
                    }
                };
                rows.push(BenchRow {
                    algorithm: alg.algorithm().name().to_string(),
                    objective: obj.name.clone(),
                    iterations,
                    deviation: deviation(&point, &optima),
                    found_point: point,
                    found_value: value,
                    wall_time,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: [&str; 8] = [
    "algorithm",
    "objective",
    "iterations",
    "found_point",
    "found_value",
    "deviation",
    "wall_time_ms",
    "seed",
];

/// Exact decimal milliseconds of a duration (nanosecond resolution).
fn duration_ms(d: Duration) -> String {
    let nanos = d.as_nanos();
    format!("{}.{:06}", nanos / 1_000_000, nanos % 1_000_000)
}

fn parse_duration_ms(s: &str) -> Result<Duration> {
    let bad = || SlmError::InvalidConfig(format!("bad wall_time_ms '{s}'"));
    let (whole, frac) = s.split_once('.').unwrap_or((s, "0"));
    if frac.len() > 6 {
        return Err(bad());
    }
    let ms: u64 = whole.parse().map_err(|_| bad())?;
    let sub: u64 = format!("{frac:0<6}").parse().map_err(|_| bad())?;
    Ok(Duration::from_nanos(ms * 1_000_000 + sub))
}

fn join_coords(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn split_coords(s: &str) -> Result<Vec<f64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|c| {
            c.parse::<f64>()
                .map_err(|_| SlmError::InvalidConfig(format!("bad coordinate '{c}'")))
        })
        .collect()
}

/// Short decimal for human-facing tables: at most 8 fractional digits,
/// trailing zeros dropped.
pub fn fmt_short(x: f64) -> String {
    let s = format!("{x:.8}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn fmt_tuple(v: &[f64]) -> String {
    format!("({})", v.iter().map(|x| fmt_short(*x)).collect::<Vec<_>>().join(", "))
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    algorithm: String,
    objective: String,
    iterations: usize,
    found_point: Vec<f64>,
    found_value: f64,
    deviation: Vec<f64>,
    wall_time_ms: f64,
    seed: u64,
}

/// Renders rows as markdown tables (one per objective), CSV or JSON lines.
pub fn emit_table(rows: &[BenchRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Markdown => emit_markdown(rows),
        OutputFormat::Csv => emit_csv(rows),
        OutputFormat::JsonLines => rows
            .iter()
            .map(|r| {
                let j = JsonRow {
                    algorithm: r.algorithm.clone(),
                    objective: r.objective.clone(),
                    iterations: r.iterations,
                    found_point: r.found_point.0.clone(),
                    found_value: r.found_value,
                    deviation: r.deviation.clone(),
                    wall_time_ms: r.wall_time.as_nanos() as f64 / 1e6,
                    seed: r.seed,
                };
                serde_json::to_string(&j).expect("rows serialize") + "\n"
            })
            .collect(),
    }
}

fn emit_markdown(rows: &[BenchRow]) -> String {
    let mut objectives: Vec<&str> = Vec::new();
    for r in rows {
        if !objectives.contains(&r.objective.as_str()) {
            objectives.push(&r.objective);
        }
    }
    let mut out = String::new();
    for (k, obj) in objectives.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let group: Vec<&BenchRow> = rows.iter().filter(|r| r.objective == *obj).collect();
        let _ = writeln!(out, "### {obj}\n");
        out.push_str("| Algorithm | Iterations | Optimal point | Deviation |\n");
        out.push_str("|---|---|---|---|\n");
        for r in &group {
            let label = r
                .algorithm
                .parse::<Algorithm>()
                .map(|a| a.label().to_string())
                .unwrap_or_else(|_| r.algorithm.clone());
            let repeated = group.iter().filter(|o| o.algorithm == r.algorithm).count() > 1;
            let label = if repeated {
                format!("{label} (seed {})", r.seed)
            } else {
                label
            };
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                label.replace('|', "\\|"),
                r.iterations,
                fmt_tuple(&r.found_point),
                fmt_tuple(&r.deviation)
            );
        }
    }
    out
}

fn emit_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.algorithm.clone(),
            r.objective.clone(),
            r.iterations.to_string(),
            join_coords(&r.found_point),
            r.found_value.to_string(),
            join_coords(&r.deviation),
            duration_ms(r.wall_time),
            r.seed.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Parses the CSV produced by [`emit_table`].
pub fn rows_from_csv(text: &str) -> Result<Vec<BenchRow>> {
    let bad = |e: csv::Error| SlmError::InvalidConfig(format!("malformed csv: {e}"));
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(bad)?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(SlmError::InvalidConfig(format!("unexpected csv header {header:?}")));
    }
    let num = |s: &str| -> Result<u64> {
        s.parse()
            .map_err(|_| SlmError::InvalidConfig(format!("bad integer '{s}'")))
    };
    rd.records()
        .map(|rec| {
            let rec = rec.map_err(bad)?;
            Ok(BenchRow {
                algorithm: rec[0].to_string(),
                objective: rec[1].to_string(),
                iterations: num(&rec[2])? as usize,
                found_point: Point(split_coords(&rec[3])?),
                found_value: rec[4]
                    .parse()
                    .map_err(|_| SlmError::InvalidConfig(format!("bad value '{}'", &rec[4])))?,
                deviation: split_coords(&rec[5])?,
                wall_time: parse_duration_ms(&rec[6])?,
                seed: num(&rec[7])?,
            })
        })
        .collect()
}
