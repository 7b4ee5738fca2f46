//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the summary is always printed; exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::TABLES;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use slm_core::baselines::{random_search, random_search_walk, simulated_annealing, BaselineConfig};
use slm_core::bench::{emit_table, run_bench, BenchSpec, OutputFormat};
use slm_core::engine::{run_slm, RunResult, SlmConfig};
use slm_core::geometry::{Point, SearchBox, Spacing};
use slm_core::labeling::{label_of, probe, Sense};
use slm_core::objectives::{registry, rosenbrock, shekel, sphere, ObjectiveSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn slm(name: &str, tol: f64, explore: bool) -> (ObjectiveSpec, RunResult) {
    let spec = registry().lookup(name).unwrap().clone();
    let mut cfg = SlmConfig::new(spec.sense, tol);
    if explore {
        cfg = cfg.explore_all(slm_core::engine::DEFAULT_CELL_BUDGET);
    }
    let run = run_slm(&*spec.evaluator, &spec.domain, &cfg).unwrap();
    (spec, run)
}

fn within(p: &[f64], q: &[f64], tol: f64) -> bool {
    p.iter().zip(q).all(|(a, b)| (a - b).abs() <= tol)
}

fn labeling_oracle() -> Outcome {
    let mut n = 0;
    for t in &TABLES {
        let dom = SearchBox::cube(2, -t.half, t.half).unwrap();
        let sp = Spacing::new(vec![t.probe_step; 2]).unwrap();
        for &(p, target, label) in t.rows {
            let pr = probe(&t.f, &Point(vec![p.0, p.1]), &sp, &dom, Sense::Minimize).map_err(|e| e.to_string())?;
            let got = label_of(&pr.target.minus(&[p.0, p.1]));
            ensure(
                pr.target.0 == [target.0, target.1] && got == label,
                format!(
                    "{}: {p:?} gave {:?} label {got}, expected {target:?} label {label}",
                    t.name, pr.target.0
                ),
            )?;
            n += 1;
        }
    }
    Ok(format!("{n} rows exact"))
}

fn sphere_min() -> Outcome {
    let (_, run) = slm("sphere_min", 0.0625, false);
    let g = run.generation_count();
    ensure(
        within(&run.best_point, &[0.0, 0.4], 0.0625),
        format!("best {:?}", run.best_point.0),
    )?;
    ensure((5..=8).contains(&g), format!("{g} generations"))?;
    Ok(format!("best {:?} in {g} generations", run.best_point.0))
}

fn sphere_trajectory() -> Outcome {
    let (_, run) = slm("sphere_min", 0.0625, false);
    let boxes = run.chosen_boxes();
    let want = [
        SearchBox::cube(2, -2.0, 2.0).unwrap(),
        SearchBox::cube(2, 0.0, 2.0).unwrap(),
        SearchBox::cube(2, 0.0, 1.0).unwrap(),
    ];
    ensure(
        boxes.len() >= 3 && boxes[..3] == want,
        format!("chosen boxes {:?}", &boxes[..boxes.len().min(3)]),
    )?;
    Ok("[-2,2]^2 -> [0,2]^2 -> [0,1]^2".into())
}

fn sphere_max() -> Outcome {
    let (_, run) = slm("sphere_max", 0.01, false);
    ensure(
        within(&run.best_point, &[-2.0, -2.0], 0.01),
        format!("best {:?}", run.best_point.0),
    )?;
    Ok(format!("best {:?}", run.best_point.0))
}

fn rosenbrock_min() -> Outcome {
    let (_, run) = slm("rosenbrock", 0.008, false);
    ensure(
        within(&run.best_point, &[1.0, 1.0], 0.05),
        format!("best {:?}", run.best_point.0),
    )?;
    Ok(format!("best {:?} value {:.3e}", run.best_point.0, run.best_value))
}

fn shekel_min() -> Outcome {
    let (_, run) = slm("shekel", 0.5, false);
    ensure(
        within(&run.best_point, &[-32.0, -32.0], 0.5),
        format!("best {:?}", run.best_point.0),
    )?;
    ensure(
        (run.best_value - 0.998004).abs() <= 0.05,
        format!("value {}", run.best_value),
    )?;
    Ok(format!("best {:?} value {:.6}", run.best_point.0, run.best_value))
}

fn trig_family() -> Outcome {
    let (_, run) = slm("trig", 14.0 / 128.0, true);
    let family: Vec<[f64; 2]> = [-6.0, -2.0, 2.0, 6.0]
        .iter()
        .flat_map(|&x| [-3.0, 1.0, 5.0].map(|y| [x, y]))
        .collect();
    let near = |p: &Point| {
        family
            .iter()
            .any(|m| ((p[0] - m[0]).powi(2) + (p[1] - m[1]).powi(2)).sqrt() <= 0.25)
    };
    let good: Vec<&(Point, f64)> = run.candidates.iter().filter(|(p, v)| near(p) && *v <= -1.85).collect();
    let summary = format!(
        "{} of {} candidates near the family with value <= -1.85 (best {:?} = {:.4})",
        good.len(),
        run.candidates.len(),
        run.best_point.0,
        run.best_value
    );
    ensure(good.len() >= 4, summary.clone())?;
    Ok(summary)
}

fn generation_schedule() -> Outcome {
    let spec = registry().lookup("sphere_min").unwrap().clone();
    let width = spec.domain.max_width();
    for k in 3..=12 {
        let cfg = SlmConfig::new(spec.sense, width / 2f64.powi(k));
        let run = run_slm(&*spec.evaluator, &spec.domain, &cfg).map_err(|e| e.to_string())?;
        ensure(
            run.generation_count() == k as usize,
            format!("k={k}: {} generations", run.generation_count()),
        )?;
    }
    Ok("generation count equals k for k = 3..12".into())
}

fn spot_values() -> Outcome {
    ensure(sphere(&[0.0, 0.4]) == 0.0, "sphere(0, 0.4) != 0")?;
    ensure(rosenbrock(&[1.0, 1.0]) == 0.0, "rosenbrock(1, 1) != 0")?;
    let s = shekel(&[-32.0, -32.0]);
    ensure((s - 0.998004).abs() <= 1e-4, format!("shekel(-32, -32) = {s}"))?;
    let far = shekel(&[1000.0, 1000.0]);
    ensure((far - 500.0).abs() <= 1.0, format!("shekel far field = {far}"))?;
    Ok(format!("shekel(-32,-32) = {s:.6}, far field {far:.3}"))
}

fn baseline_quality() -> Outcome {
    let spec = registry().lookup("sphere_min").unwrap().clone();
    let close = |p: &Point| ((p[0]).powi(2) + (p[1] - 0.4).powi(2)).sqrt() <= 0.1;
    let (mut rs, mut rsw, mut sa) = (0, 0, 0);
    for seed in 0..100 {
        let r = random_search(&spec, &BaselineConfig::new(1000, seed)).map_err(|e| e.to_string())?;
        rs += (r.best_value <= 0.05) as usize;
        let w = random_search_walk(
            &spec,
            &BaselineConfig::new(500, seed).with_initial(Point(vec![14.0356, 14.0356])),
        )
        .map_err(|e| e.to_string())?;
        rsw += close(&w.best_point) as usize;
        let a = simulated_annealing(&spec, &BaselineConfig::new(150, seed)).map_err(|e| e.to_string())?;
        sa += close(&a.best_point) as usize;
    }
    let summary = format!("RS {rs}/100, RSW {rsw}/100, SA {sa}/100");
    ensure(rs >= 90 && rsw >= 90 && sa >= 80, summary.clone())?;
    Ok(summary)
}

fn mask_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|l| {
            let mut fields: Vec<&str> = l.split(',').collect();
            let n = fields.len();
            if n >= 2 {
                fields[n - 2] = "*";
            }
            fields.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn bench_determinism() -> Outcome {
    let reg = registry();
    let mut spec = BenchSpec::with_defaults(reg.names());
    spec.repeats = 2;
    let once = || -> Result<Vec<String>, String> {
        let rows = run_bench(&spec, &reg).map_err(|e| e.to_string())?;
        let jsonl: String = emit_table(&rows, OutputFormat::JsonLines)
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v["wall_time_ms"] = serde_json::Value::Null;
                v.to_string() + "\n"
            })
            .collect();
        Ok(vec![
            emit_table(&rows, OutputFormat::Markdown),
            mask_wall_time(&emit_table(&rows, OutputFormat::Csv)),
            jsonl,
        ])
    };
    let a = once()?;
    let b = once()?;
    ensure(a == b, "bench output differs between runs")?;
    Ok(format!(
        "{} bytes identical across two runs",
        a.iter().map(String::len).sum::<usize>()
    ))
}

fn invariant_suite() -> Outcome {
    let reg = registry();
    let specs: Vec<ObjectiveSpec> = reg.iter().cloned().collect();
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    // A sub-box of a builtin domain, two corners drawn in unit coordinates.
    let strategy = (0..specs.len(), prop::collection::vec(0.0..1.0f64, 4), 1..7i32);
    runner
        .run(&strategy, |(i, u, k)| {
            let spec = &specs[i];
            let d = &spec.domain;
            let (lo, hi): (Vec<f64>, Vec<f64>) = (0..2)
                .map(|j| {
                    let a = d.lo()[j] + u[j] * d.widths()[j];
                    let b = d.lo()[j] + u[j + 2] * d.widths()[j];
                    let (a, b) = (a.min(b), a.max(b));
                    (a, b.max(a + 1e-3 * d.widths()[j]).min(d.hi()[j]).max(a + 1e-9))
                })
                .unzip();
            let b = SearchBox::new(lo, hi).unwrap();
            let cfg = SlmConfig::new(spec.sense, b.max_width() / 2f64.powi(k));
            let run = run_slm(&*spec.evaluator, &b, &cfg).unwrap();
            for g in &run.generations {
                prop_assert!(g.evaluations <= 81);
                for v in &g.vertices {
                    prop_assert!(v.label <= 2);
                    prop_assert!(!spec.sense.better(v.value, v.target_value));
                }
            }
            for w in run.generations.windows(2) {
                prop_assert!(!spec.sense.better(w[0].best_so_far, w[1].best_so_far));
                prop_assert!(w[0].bounds.contains_box(&w[1].bounds));
                if w[0].index > 0 {
                    for (a, c) in w[0].bounds.widths().iter().zip(w[1].bounds.widths()) {
                        prop_assert!((a / 2.0 - c).abs() <= 1e-12 * a);
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("1000 cases over random sub-boxes of the builtins".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("labeling oracle", Duration::from_secs(1), labeling_oracle),
        ("sphere minimum", Duration::from_millis(100), sphere_min),
        ("sphere box trajectory", Duration::from_millis(100), sphere_trajectory),
        ("sphere maximum", Duration::from_millis(100), sphere_max),
        ("rosenbrock minimum", Duration::from_millis(500), rosenbrock_min),
        ("shekel minimum", Duration::from_secs(1), shekel_min),
        ("trig minimizer family", Duration::from_secs(1), trig_family),
        ("generation count schedule", Duration::from_secs(1), generation_schedule),
        ("objective spot values", Duration::from_millis(100), spot_values),
        ("baseline quality", Duration::from_secs(30), baseline_quality),
        ("bench determinism", Duration::from_secs(5), bench_determinism),
        ("invariant suite", Duration::from_secs(30), invariant_suite),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = check();
        let elapsed = started.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *limit => Err(format!("{msg}; took {elapsed:?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({elapsed:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
