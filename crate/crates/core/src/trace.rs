//! Per-generation tables and SVG drawings of a run.
//!
//! The SVG legend maps labels to marker colours and marks the chosen cell
//! with a translucent fill; it is embedded in every document.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::bench::fmt_short;
use crate::engine::{GenerationRecord, RunResult, SlmConfig};
use crate::error::{Result, SlmError};
use crate::geometry::SearchBox;

fn tuple(v: &[f64]) -> String {
    format!("({})", v.iter().map(|x| fmt_short(*x)).collect::<Vec<_>>().join(", "))
}

fn box_text(b: &SearchBox) -> String {
    b.lo()
        .iter()
        .zip(b.hi())
        .map(|(lo, hi)| format!("[{}, {}]", fmt_short(*lo), fmt_short(*hi)))
        .collect::<Vec<_>>()
        .join(" x ")
}

/// Text table of one generation: a few header lines followed by
/// `point | probe_target | label` rows in grid order.
pub fn render_generation_table(g: &GenerationRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "generation {}", g.index);
    let _ = writeln!(
        out,
        "spacing h = {}, probe step = {}",
        tuple(&g.spacing),
        tuple(&g.spacing.halved())
    );
    let _ = writeln!(out, "box {}", box_text(&g.bounds));
    match &g.chosen {
        Some(c) => {
            let _ = writeln!(out, "chosen cell {}", box_text(&c.bounds));
        }
        None => out.push_str("chosen cell none\n"),
    }
    if g.fallback_used {
        out.push_str("fallback: no completely labelled cell, descended into the cell of the best vertex\n");
    }
    if g.vertices.is_empty() {
        return out;
    }
    out.push_str("point | probe_target | label\n");
    for v in &g.vertices {
        let _ = writeln!(out, "{} | {} | {}", tuple(&v.point), tuple(&v.probe_target), v.label);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    /// Width and height of the square plot area in px.
    pub size: f64,
    pub margin: f64,
    pub marker_radius: f64,
    /// Marker colours for labels 0, 1, 2.
    pub label_colors: [String; 3],
    pub chosen_fill: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            size: 480.0,
            margin: 40.0,
            marker_radius: 5.0,
            label_colors: ["#1f77b4".into(), "#d62728".into(), "#2ca02c".into()],
            chosen_fill: "#ffbf00".into(),
        }
    }
}

struct Viewport {
    x0: f64,
    y0: f64,
    scale_x: f64,
    scale_y: f64,
    margin: f64,
    size: f64,
}

impl Viewport {
    fn x(&self, x: f64) -> f64 {
        self.margin + (x - self.x0) * self.scale_x
    }

    fn y(&self, y: f64) -> f64 {
        self.margin + self.size - (y - self.y0) * self.scale_y
    }
}

/// Standalone SVG of a 2-D generation: box outline, chosen cell, one arrow
/// per moved vertex and one marker per vertex coloured by label.
pub fn render_generation_svg(g: &GenerationRecord, style: &SvgStyle) -> Result<String> {
    if g.dim() != 2 {
        return Err(SlmError::UnsupportedDimension(g.dim()));
    }
    let (mut x0, mut y0) = (g.bounds.lo()[0], g.bounds.lo()[1]);
    let (mut x1, mut y1) = (g.bounds.hi()[0], g.bounds.hi()[1]);
    for v in &g.vertices {
        for p in [&v.point, &v.probe_target] {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
    }
    let vp = Viewport {
        x0,
        y0,
        scale_x: style.size / (x1 - x0),
        scale_y: style.size / (y1 - y0),
        margin: style.margin,
        size: style.size,
    };
    let total = style.size + 2.0 * style.margin;
    let legend_h = 70.0;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">",
        w = total,
        h = total + legend_h
    );
    let _ = writeln!(
        s,
        "<title>generation {} of a subdividing labelling run</title>",
        g.index
    );
    s.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 6 6\" refX=\"6\" refY=\"3\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#555555\"/></marker></defs>\n",
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{total:.0}\" height=\"{:.0}\" fill=\"white\"/>",
        total + legend_h
    );

    let rect = |b: &SearchBox| {
        let (lx, hy) = (vp.x(b.lo()[0]), vp.y(b.hi()[1]));
        let (hx, ly) = (vp.x(b.hi()[0]), vp.y(b.lo()[1]));
        (lx, hy, hx - lx, ly - hy)
    };
    let (x, y, w, h) = rect(&g.bounds);
    let _ = writeln!(
        s,
        "<rect class=\"box\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>"
    );
    if let Some(c) = &g.chosen {
        let (x, y, w, h) = rect(&c.bounds);
        let _ = writeln!(
            s,
            "<rect class=\"chosen-cell\" x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{}\" fill-opacity=\"0.3\" stroke=\"{}\"/>",
            style.chosen_fill, style.chosen_fill
        );
    }

    s.push_str("<g class=\"probes\">\n");
    for v in g.vertices.iter().filter(|v| v.moved()) {
        let _ = writeln!(
            s,
            "<line class=\"probe\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#555555\" marker-end=\"url(#arrow)\"/>",
            vp.x(v.point[0]),
            vp.y(v.point[1]),
            vp.x(v.probe_target[0]),
            vp.y(v.probe_target[1])
        );
    }
    s.push_str("</g>\n<g class=\"vertices\">\n");
    for v in &g.vertices {
        let color = &style.label_colors[v.label.min(2)];
        let _ = writeln!(
            s,
            "<circle class=\"vertex label-{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{}\" fill=\"{}\"/>",
            v.label,
            vp.x(v.point[0]),
            vp.y(v.point[1]),
            style.marker_radius,
            color
        );
    }
    s.push_str("</g>\n");

    let top = total + 10.0;
    s.push_str("<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n");
    for (k, color) in style.label_colors.iter().enumerate() {
        let lx = style.margin + 90.0 * k as f64;
        let _ = writeln!(
            s,
            "<rect class=\"legend-swatch\" x=\"{lx:.0}\" y=\"{top:.0}\" width=\"10\" height=\"10\" fill=\"{color}\"/><text x=\"{:.0}\" y=\"{:.0}\">label {k}</text>",
            lx + 14.0,
            top + 10.0
        );
    }
    let _ = writeln!(
        s,
        "<rect class=\"legend-swatch\" x=\"{:.0}\" y=\"{top:.0}\" width=\"10\" height=\"10\" fill=\"{}\" fill-opacity=\"0.3\"/><text x=\"{:.0}\" y=\"{:.0}\">chosen cell</text>",
        style.margin + 270.0,
        style.chosen_fill,
        style.margin + 284.0,
        top + 10.0
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.0}\" y=\"{:.0}\">h = {}, box {}</text>",
        style.margin,
        top + 32.0,
        tuple(&g.spacing),
        box_text(&g.bounds)
    );
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub index: usize,
    pub table: String,
    /// Absent for runs that are not 2-D.
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceDocument {
    pub objective: String,
    pub config: SlmConfig,
    pub entries: Vec<TraceEntry>,
}

impl TraceDocument {
    pub fn build(objective: &str, config: &SlmConfig, run: &RunResult, style: &SvgStyle) -> Self {
        let entries = run
            .generations
            .iter()
            .map(|g| TraceEntry {
                index: g.index,
                table: render_generation_table(g),
                svg: render_generation_svg(g, style).ok(),
            })
            .collect();
        TraceDocument {
            objective: objective.to_string(),
            config: config.clone(),
            entries,
        }
    }

    /// All tables, preceded by the run metadata.
    pub fn text(&self) -> String {
        let mut out = format!(
            "objective {}\nsense {}\ntolerance {}\n",
            self.objective,
            self.config.sense.as_str(),
            self.config.tolerance
        );
        for e in &self.entries {
            out.push('\n');
            out.push_str(&e.table);
        }
        out
    }

    /// `(file name, svg)` per drawable entry: `gen-<k>.svg`, with a `-<j>`
    /// suffix for further boxes of the same generation (explore-all runs).
    pub fn svg_files(&self) -> Vec<(String, String)> {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        self.entries
            .iter()
            .filter_map(|e| {
                let svg = e.svg.as_ref()?;
                let j = seen.entry(e.index).or_insert(0);
                let name = match *j {
                    0 => format!("gen-{}.svg", e.index),
                    j => format!("gen-{}-{j}.svg", e.index),
                };
                *j += 1;
                Some((name, svg.clone()))
            })
            .collect()
    }
}
