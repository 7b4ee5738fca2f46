//! The `slm` command line: `optimize`, `bench`, `trace` and `list-functions`.
//!
//! Every flag can also come from a `--config` file of `key = value` lines
//! (`#` starts a comment) keyed by flag name without the leading `--`; flags given on
//! the command line win over file values.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use slm_core::baselines::{random_search, random_search_walk, simulated_annealing, BaselineConfig, OptimRunResult};
use slm_core::bench::{
    deviation, emit_table, fmt_short, run_bench, Algorithm, AlgorithmSpec, BenchRow, BenchSpec, OutputFormat,
    SlmSettings, RSW_ITERATIONS, RS_ITERATIONS, SA_ITERATIONS,
};
use slm_core::engine::run_slm;
use slm_core::objectives::{ObjectiveSpec, Registry};
use slm_core::trace::{SvgStyle, TraceDocument};
use slm_core::{Point, SearchBox, SlmError};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "slm",
    version,
    about = "Subdividing labeling optimizer, baselines and benchmark tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one method on one objective and print the result.
    Optimize(Flags),
    /// Run a method x objective matrix and print the comparison table.
    Bench(Flags),
    /// Run SLM and write per-generation tables and SVG drawings to a directory.
    Trace(Flags),
    /// List the built-in objectives with their domains and known optima.
    ListFunctions,
}

#[derive(Debug, Args)]
struct Flags {
    /// Objective name (bench: comma-separated list, default all).
    #[arg(long)]
    function: Option<String>,
    /// slm, rs, rsw or sa (bench: comma-separated list, default all).
    #[arg(long)]
    method: Option<String>,
    /// SLM tolerance on the grid spacing [default: widest side / 2^10].
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    #[arg(long)]
    max_generations: Option<usize>,
    /// Refine every completely labelled cell.
    #[arg(long)]
    explore_all: bool,
    /// Baseline budget [default: rs 1000, rsw 500, sa 150].
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Bench seeds 0..repeats.
    #[arg(long)]
    repeats: Option<u64>,
    /// Start point for rsw and sa, e.g. `14.0356,14.0356`.
    #[arg(long, allow_hyphen_values = true)]
    initial: Option<String>,
    /// markdown, csv or json-lines.
    #[arg(long)]
    format: Option<String>,
    /// Output file (trace: output directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid value '{value}' for --{key}: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("unknown function '{name}' (available: {})", available.join(", "))]
    UnknownObjective { name: String, available: Vec<String> },
    #[error("unknown method '{0}' (expected slm, rs, rsw or sa)")]
    UnknownMethod(String),
    #[error("config file {path}: {msg}")]
    Config { path: String, msg: String },
    #[error("cannot write {path}: {msg}")]
    Output { path: String, msg: String },
    #[error(transparent)]
    Run(SlmError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Run(_) => 1,
            CliError::Usage(_) | CliError::InvalidValue { .. } => 2,
            CliError::UnknownObjective { .. } => 3,
            CliError::UnknownMethod(_) => 4,
            CliError::Config { .. } => 5,
            CliError::Output { .. } => 6,
        }
    }
}

impl From<SlmError> for CliError {
    fn from(e: SlmError) -> Self {
        match e {
            SlmError::UnknownObjective { name, available } => CliError::UnknownObjective { name, available },
            e => CliError::Run(e),
        }
    }
}

const KEYS: [&str; 11] = [
    "function",
    "method",
    "tol",
    "max-generations",
    "explore-all",
    "iterations",
    "seed",
    "repeats",
    "initial",
    "format",
    "out",
];

#[derive(Debug, Clone)]
enum Origin {
    Flag,
    File { path: String, line: usize },
}

#[derive(Debug, Clone)]
struct Value {
    text: String,
    origin: Origin,
}

/// Flags merged over config-file values, keyed by flag name.
#[derive(Debug, Default)]
struct Settings(BTreeMap<&'static str, Value>);

impl Settings {
    fn load(flags: &Flags) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = &flags.config {
            for (key, text, line) in read_config(path)? {
                let origin = Origin::File {
                    path: path.display().to_string(),
                    line,
                };
                map.insert(key, Value { text, origin });
            }
        }
        let given: [(&'static str, Option<String>); 11] = [
            ("function", flags.function.clone()),
            ("method", flags.method.clone()),
            ("tol", flags.tol.map(|v| v.to_string())),
            ("max-generations", flags.max_generations.map(|v| v.to_string())),
            ("explore-all", flags.explore_all.then(|| "true".to_string())),
            ("iterations", flags.iterations.map(|v| v.to_string())),
            ("seed", flags.seed.map(|v| v.to_string())),
            ("repeats", flags.repeats.map(|v| v.to_string())),
            ("initial", flags.initial.clone()),
            ("format", flags.format.clone()),
            ("out", flags.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, text) in given {
            if let Some(text) = text {
                map.insert(
                    key,
                    Value {
                        text,
                        origin: Origin::Flag,
                    },
                );
            }
        }
        Ok(Settings(map))
    }

    fn restrict(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        match self.0.iter().find(|(k, _)| !allowed.contains(k)) {
            None => Ok(()),
            Some((key, v)) => Err(match &v.origin {
                Origin::Flag => CliError::Usage(format!("--{key} is not used by {command}")),
                Origin::File { path, line } => CliError::Config {
                    path: path.clone(),
                    msg: format!("line {line}: '{key}' is not used by {command}"),
                },
            }),
        }
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(|v| v.text.as_str())
    }

    fn required(&self, key: &str, command: &str) -> Result<&str, CliError> {
        self.text(key)
            .ok_or_else(|| CliError::Usage(format!("{command} requires --{key}")))
    }

    fn parse_with<T, E: Display>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<Option<T>, CliError> {
        let Some(v) = self.0.get(key) else {
            return Ok(None);
        };
        parse(&v.text).map(Some).map_err(|e| match &v.origin {
            Origin::Flag => CliError::InvalidValue {
                key: key.to_string(),
                value: v.text.clone(),
                reason: e.to_string(),
            },
            Origin::File { path, line } => CliError::Config {
                path: path.clone(),
                msg: format!("line {line}: invalid {key} '{}': {e}", v.text),
            },
        })
    }

    fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.parse_with(key, |s| s.trim().parse::<T>())
    }
}

fn read_config(path: &Path) -> Result<Vec<(&'static str, String, usize)>, CliError> {
    let shown = path.display().to_string();
    let config_err = |msg: String| CliError::Config {
        path: shown.clone(),
        msg,
    };
    let text = fs::read_to_string(path).map_err(|e| config_err(e.to_string()))?;
    let mut out: Vec<(&'static str, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(format!("line {}: expected 'key = value'", i + 1)))?;
        let key = key.trim();
        let key = KEYS
            .into_iter()
            .find(|k| *k == key || k.replace('-', "_") == key)
            .ok_or_else(|| config_err(format!("line {}: unknown key '{key}'", i + 1)))?;
        if out.iter().any(|(k, _, _)| *k == key) {
            return Err(config_err(format!("line {}: duplicate key '{key}'", i + 1)));
        }
        out.push((key, value.trim().to_string(), i + 1));
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("'{}': {e}", c.trim())))
        .collect::<Result<Vec<_>, _>>()
        .map(Point)
}

fn parse_method(s: &str) -> Result<Algorithm, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::UnknownMethod(s.trim().to_string()))
}

fn list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn lookup<'a>(reg: &'a Registry, name: &str) -> Result<&'a ObjectiveSpec, CliError> {
    Ok(reg.lookup(name)?)
}

fn slm_settings(s: &Settings) -> Result<SlmSettings, CliError> {
    let mut out = SlmSettings {
        tolerance: s.get("tol")?,
        explore_all: s.get("explore-all")?.unwrap_or(false),
        ..SlmSettings::default()
    };
    if let Some(cap) = s.get("max-generations")? {
        out.max_generations = cap;
    }
    Ok(out)
}

fn baseline_config(s: &Settings, method: Algorithm, seed: u64) -> Result<BaselineConfig, CliError> {
    let default = match method {
        Algorithm::Rs => RS_ITERATIONS,
        Algorithm::Rsw => RSW_ITERATIONS,
        _ => SA_ITERATIONS,
    };
    let mut cfg = BaselineConfig::new(s.get("iterations")?.unwrap_or(default), seed);
    if method != Algorithm::Rs {
        cfg.initial_point = s.parse_with("initial", parse_point)?;
    }
    Ok(cfg)
}

fn write_payload(path: Option<&str>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Output {
            path: p.to_string(),
            msg: e.to_string(),
        }),
        None => out
            .write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Output {
                path: "stdout".into(),
                msg: e.to_string(),
            }),
    }
}

fn coords(p: &[f64]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

fn box_text(b: &SearchBox) -> String {
    b.lo()
        .iter()
        .zip(b.hi())
        .map(|(lo, hi)| format!("[{}, {}]", fmt_short(*lo), fmt_short(*hi)))
        .collect::<Vec<_>>()
        .join(" x ")
}

const SLM_ONLY: [&str; 3] = ["tol", "max-generations", "explore-all"];
const BASELINE_ONLY: [&str; 3] = ["iterations", "seed", "initial"];

fn optimize(s: &Settings, reg: &Registry, out: &mut dyn Write) -> Result<(), CliError> {
    s.restrict(
        "optimize",
        &[
            "function",
            "method",
            "tol",
            "max-generations",
            "explore-all",
            "iterations",
            "seed",
            "initial",
            "format",
            "out",
        ],
    )?;
    let spec = lookup(reg, s.required("function", "optimize")?)?;
    let method = parse_method(s.text("method").unwrap_or("slm"))?;
    let foreign = if method == Algorithm::Slm {
        &BASELINE_ONLY
    } else {
        &SLM_ONLY
    };
    if let Some(k) = foreign.iter().find(|k| s.has(k)) {
        return Err(CliError::Usage(format!(
            "--{k} does not apply to method {}",
            method.name()
        )));
    }
    let format = s.get::<OutputFormat>("format")?;
    let seed = s.get::<u64>("seed")?.unwrap_or(0);

    let started = Instant::now();
    let mut text = format!("function {}\nmethod {}\n", spec.name, method.name());
    let (iterations, point, value) = if method == Algorithm::Slm {
        let cfg = slm_settings(s)?.config_for(spec);
        let run = run_slm(&*spec.evaluator, &spec.domain, &cfg)?;
        text.push_str(&format!("tolerance {}\n", cfg.tolerance));
        text.push_str(&format!(
            "best_point {}\nbest_value {}\n",
            coords(&run.best_point),
            run.best_value
        ));
        text.push_str(&format!(
            "iterations {}\nevaluations {}\ntermination {}\n",
            run.generation_count(),
            run.evaluations,
            run.termination.as_str()
        ));
        for (p, v) in &run.candidates {
            text.push_str(&format!("candidate {} {}\n", coords(p), v));
        }
        (run.generation_count(), run.best_point, run.best_value)
    } else {
        let cfg = baseline_config(s, method, seed)?;
        let run: OptimRunResult = match method {
            Algorithm::Rs => random_search(spec, &cfg)?,
            Algorithm::Rsw => random_search_walk(spec, &cfg)?,
            _ => simulated_annealing(spec, &cfg)?,
        };
        text.push_str(&format!("seed {seed}\n"));
        if let Some(start) = &run.start {
            let note = if run.start_clamped {
                " (clamped into the domain)"
            } else {
                ""
            };
            text.push_str(&format!("start {}{note}\n", coords(start)));
        }
        text.push_str(&format!(
            "best_point {}\nbest_value {}\n",
            coords(&run.best_point),
            run.best_value
        ));
        text.push_str(&format!(
            "iterations {}\nevaluations {}\n",
            cfg.iterations, run.evaluations
        ));
        if method == Algorithm::Sa {
            text.push_str(&format!("accepted_worse {}\n", run.accepted_worse));
        }
        (cfg.iterations, run.best_point, run.best_value)
    };

    if let Some(format) = format {
        let optima: Vec<Point> = spec.known_optima.iter().map(|(p, _)| p.clone()).collect();
        let row = BenchRow {
            algorithm: method.name().to_string(),
            objective: spec.name.clone(),
            iterations,
            deviation: deviation(&point, &optima),
            found_point: point,
            found_value: value,
            wall_time: started.elapsed(),
            seed: if method == Algorithm::Slm { 0 } else { seed },
        };
        text = emit_table(&[row], format);
    }
    write_payload(s.text("out"), &text, out)
}

fn bench(s: &Settings, reg: &Registry, out: &mut dyn Write) -> Result<(), CliError> {
    s.restrict(
        "bench",
        &[
            "function",
            "method",
            "tol",
            "max-generations",
            "explore-all",
            "iterations",
            "repeats",
            "initial",
            "format",
            "out",
        ],
    )?;
    let objectives: Vec<String> = match s.text("function") {
        Some(names) => list(names).into_iter().map(String::from).collect(),
        None => reg.names(),
    };
    for name in &objectives {
        lookup(reg, name)?;
    }
    let methods = match s.text("method") {
        Some(m) => list(m).into_iter().map(parse_method).collect::<Result<Vec<_>, _>>()?,
        None => Algorithm::ALL.to_vec(),
    };
    let algorithms = methods
        .into_iter()
        .map(|m| {
            Ok(match m {
                Algorithm::Slm => AlgorithmSpec::Slm(slm_settings(s)?),
                Algorithm::Rs => AlgorithmSpec::Rs(baseline_config(s, m, 0)?),
                Algorithm::Rsw => AlgorithmSpec::Rsw(baseline_config(s, m, 0)?),
                Algorithm::Sa => AlgorithmSpec::Sa(baseline_config(s, m, 0)?),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let spec = BenchSpec {
        objectives,
        algorithms,
        repeats: s.get("repeats")?.unwrap_or(1),
        output_format: s.get("format")?.unwrap_or(OutputFormat::Markdown),
    };
    let rows = run_bench(&spec, reg)?;
    write_payload(s.text("out"), &emit_table(&rows, spec.output_format), out)
}

fn trace(s: &Settings, reg: &Registry, out: &mut dyn Write) -> Result<(), CliError> {
    s.restrict(
        "trace",
        &["function", "method", "tol", "max-generations", "explore-all", "out"],
    )?;
    let spec = lookup(reg, s.required("function", "trace")?)?;
    if let Some(m) = s.text("method") {
        if parse_method(m)? != Algorithm::Slm {
            return Err(CliError::Usage("trace only supports --method slm".into()));
        }
    }
    let dir = PathBuf::from(s.required("out", "trace")?);
    let cfg = slm_settings(s)?.config_for(spec);
    let run = run_slm(&*spec.evaluator, &spec.domain, &cfg)?;
    let doc = TraceDocument::build(&spec.name, &cfg, &run, &SvgStyle::default());

    let output_err = |p: &Path, e: std::io::Error| CliError::Output {
        path: p.display().to_string(),
        msg: e.to_string(),
    };
    fs::create_dir_all(&dir).map_err(|e| output_err(&dir, e))?;
    let txt = dir.join("trace.txt");
    fs::write(&txt, doc.text()).map_err(|e| output_err(&txt, e))?;
    let svgs = doc.svg_files();
    for (name, svg) in &svgs {
        let p = dir.join(name);
        fs::write(&p, svg).map_err(|e| output_err(&p, e))?;
    }
    let summary = format!(
        "wrote trace.txt and {} svg files to {}\nbest_point {}\nbest_value {}\n",
        svgs.len(),
        dir.display(),
        coords(&run.best_point),
        run.best_value
    );
    write_payload(None, &summary, out)
}

fn list_functions(reg: &Registry, out: &mut dyn Write) -> Result<(), CliError> {
    let text: String = reg
        .iter()
        .map(|s| {
            format!(
                "{:<11} {:<8} {}  optima {}\n",
                s.name,
                s.sense.as_str(),
                box_text(&s.domain),
                s.optima_description
            )
        })
        .collect();
    write_payload(None, &text, out)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let reg = Registry::builtin();
    match cli.command {
        Command::Optimize(f) => optimize(&Settings::load(&f)?, &reg, out),
        Command::Bench(f) => bench(&Settings::load(&f)?, &reg, out),
        Command::Trace(f) => trace(&Settings::load(&f)?, &reg, out),
        Command::ListFunctions => list_functions(&reg, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status. Payload goes to `out`, a one-line diagnostic to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                "a subcommand is required: optimize, bench, trace or list-functions".to_string()
            } else {
                let rendered = e.to_string();
                let first = rendered
                    .lines()
                    .find(|l| !l.trim().is_empty())
                    .unwrap_or("invalid arguments");
                first.trim_start_matches("error: ").to_string()
            };
            let _ = writeln!(err, "slm: {msg}");
            return 2;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "slm: {e}");
            e.exit_code()
        }
    }
}
