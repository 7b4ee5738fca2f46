use std::fs;
use std::process::Command;

fn slm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_slm")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn value_after<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).map(str::trim))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

fn parse_coords(s: &str) -> Vec<f64> {
    s.trim_matches(|c| c == '(' || c == ')')
        .split(", ")
        .map(|c| c.parse().unwrap())
        .collect()
}

#[test]
fn optimize_sphere_slm() {
    let (code, out, err) = slm(&[
        "optimize",
        "--function",
        "sphere_min",
        "--method",
        "slm",
        "--tol",
        "0.0625",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(err.is_empty());
    let p = parse_coords(value_after(&out, "best_point"));
    assert!(p[0].abs() <= 0.0625 && (p[1] - 0.4).abs() <= 0.0625, "{p:?}");
    assert_eq!(value_after(&out, "iterations"), "6");
    assert!(out.contains("evaluations "));
}

#[test]
fn optimize_baselines() {
    let (code, out, _) = slm(&[
        "optimize",
        "--function",
        "sphere_min",
        "--method",
        "rsw",
        "--initial",
        "14.0356,14.0356",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("start (2, 2) (clamped into the domain)"));
    assert_eq!(value_after(&out, "iterations"), "500");
    assert_eq!(value_after(&out, "evaluations"), "501");

    let (code, out, _) = slm(&[
        "optimize",
        "--function",
        "sphere_min",
        "--method",
        "sa",
        "--iterations",
        "40",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("accepted_worse "));

    let (code, out, _) = slm(&[
        "optimize",
        "--function",
        "rosenbrock",
        "--method",
        "rs",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "algorithm,objective,iterations,found_point,found_value,deviation,wall_time_ms,seed"
    );
    assert!(lines[1].starts_with("rs,rosenbrock,1000,"));
}

#[test]
fn list_functions_names_five() {
    let (code, out, _) = slm(&["list-functions"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = out.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, ["sphere_min", "trig", "sphere_max", "rosenbrock", "shekel"]);
}

#[test]
fn missing_config_names_path() {
    let (code, out, err) = slm(&["bench", "--config", "missing.file"]);
    assert_ne!(code, 0);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("missing.file"), "{err}");
}

#[test]
fn distinct_exit_codes() {
    let cases: [(&[&str], i32); 6] = [
        (&["optimize", "--function", "nosuch"], 3),
        (&["optimize", "--function", "trig", "--method", "gd"], 4),
        (&["bench", "--config", "/nonexistent/cfg"], 5),
        (
            &["optimize", "--function", "trig", "--out", "/nonexistent/dir/x.txt"],
            6,
        ),
        (&["optimize", "--function", "trig", "--bogus"], 2),
        (&["optimize", "--function", "trig", "--tol", "-1"], 1),
    ];
    for (args, want) in cases {
        let (code, out, err) = slm(args);
        assert_eq!(code, want, "{args:?}: {err}");
        assert!(out.is_empty(), "{args:?}");
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("slm: "));
    }
    let (_, _, err) = slm(&["optimize", "--function", "nosuch"]);
    assert!(err.contains("sphere_min") && err.contains("shekel"));
}

#[test]
fn irrelevant_flags_rejected() {
    let (code, _, err) = slm(&["optimize", "--function", "trig", "--method", "rs", "--tol", "0.1"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, err) = slm(&["optimize", "--function", "trig", "--repeats", "3"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# archived run\nfunction = sphere_min\nmethod = slm\ntol = 0.5  # coarse\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let (code, out, err) = slm(&["optimize", "--config", cfg]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(value_after(&out, "tolerance"), "0.5");

    let (code, out, _) = slm(&["optimize", "--config", cfg, "--tol", "0.0625"]);
    assert_eq!(code, 0);
    assert_eq!(value_after(&out, "tolerance"), "0.0625");

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "function = sphere_min\ntol = fast\n").unwrap();
    let (code, _, err) = slm(&["optimize", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 5);
    assert!(err.contains("line 2"), "{err}");

    fs::write(&bad, "colour = blue\n").unwrap();
    let (code, _, err) = slm(&["optimize", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 5);
    assert!(err.contains("colour"), "{err}");
}

#[test]
fn bench_is_deterministic_and_writes_file() {
    let args = [
        "bench",
        "--function",
        "sphere_min,rosenbrock",
        "--repeats",
        "2",
        "--format",
        "markdown",
    ];
    let (code, a, err) = slm(&args);
    assert_eq!(code, 0, "{err}");
    let (_, b, _) = slm(&args);
    assert_eq!(a, b);
    assert!(a.contains("### sphere_min") && a.contains("### rosenbrock"));
    assert!(a.contains("| RS (seed 1) | 1000 |"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.jsonl");
    let (code, out, _) = slm(&[
        "bench",
        "--function",
        "shekel",
        "--method",
        "slm,sa",
        "--format",
        "json-lines",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("\"wall_time_ms\"")));
}

#[test]
fn trace_writes_tables_and_svgs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("trace");
    let (code, out, err) = slm(&[
        "trace",
        "--function",
        "sphere_min",
        "--tol",
        "0.0625",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("wrote trace.txt and 7 svg files"));
    let txt = fs::read_to_string(out_dir.join("trace.txt")).unwrap();
    assert!(txt.starts_with("objective sphere_min\nsense minimize\ntolerance 0.0625\n"));
    for k in 0..=6 {
        let svg = fs::read_to_string(out_dir.join(format!("gen-{k}.svg"))).unwrap();
        assert!(svg.contains("<svg"));
    }

    let (code, _, _) = slm(&["trace", "--function", "sphere_min"]);
    assert_eq!(code, 2);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, err) = slm(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("optimize") && err.is_empty());
}

#[test]
fn library_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = slm_cli::run(["slm", "list-functions"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 5);
    assert!(err.is_empty());
}
