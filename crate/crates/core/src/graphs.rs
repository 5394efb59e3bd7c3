//! Transition graphs of (quasi-)stochastic matrices and their DOT/SVG renderings.
//!
//! Inputs sit in the left column and outputs in the right. Negative weights
//! are drawn dashed in blue, positive ones solid in red, on a colormap that is
//! symmetric about zero.

use std::fmt::Write as _;

use thiserror::Error;

use crate::qprcore::{QuasiStochasticMatrix, QuasiVector, RVector};

pub const DEFAULT_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("representation mismatch: `{left}` vs `{right}`")]
    RepMismatch { left: String, right: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Retrodictive,
}

impl Direction {
    pub fn tag(&self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Retrodictive => "retrodictive",
        }
    }
}

/// Edge between input node `input` and output node `output`. Forward edges
/// run input → output; retrodictive ones output → input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub input: usize,
    pub output: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionGraph {
    pub rep: String,
    pub labels: Vec<String>,
    pub edges: Vec<Edge>,
    pub input_bubbles: Option<RVector>,
    pub output_bubbles: Option<RVector>,
    pub direction: Direction,
}

impl TransitionGraph {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Largest deviation from one of the summed weights leaving each source node.
    pub fn source_sum_defect(&self) -> f64 {
        let mut sums = vec![0.0; self.n()];
        for e in &self.edges {
            let source = match self.direction {
                Direction::Forward => e.input,
                Direction::Retrodictive => e.output,
            };
            sums[source] += e.weight;
        }
        sums.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check(s: &QuasiStochasticMatrix, v: &QuasiVector) -> Result<(), GraphError> {
    if s.rep != v.rep {
        return Err(GraphError::RepMismatch {
            left: s.rep.clone(),
            right: v.rep.clone(),
        });
    }
    if s.n() != v.len() {
        return Err(GraphError::DimensionMismatch {
            expected: s.n(),
            found: v.len(),
        });
    }
    Ok(())
}

/// Forward graph of `S` with output bubbles from the image of the maximally
/// mixed state.
pub fn forward_graph(
    s: &QuasiStochasticMatrix,
    image_of_uniform: &QuasiVector,
) -> Result<TransitionGraph, GraphError> {
    check(s, image_of_uniform)?;
    let n = s.n();
    let edges = (0..n)
        .flat_map(|a| {
            (0..n).map(move |b| Edge {
                input: a,
                output: b,
                weight: s.entries[(b, a)],
            })
        })
        .collect();
    Ok(TransitionGraph {
        rep: s.rep.clone(),
        labels: default_labels(n),
        edges,
        input_bubbles: None,
        output_bubbles: Some(image_of_uniform.entries.clone()),
        direction: Direction::Forward,
    })
}

/// Retrodictive graph of `Ŝ` (columns indexed by outputs) with the prior on
/// the inputs.
pub fn retro_graph(
    s_hat: &QuasiStochasticMatrix,
    prior: &QuasiVector,
) -> Result<TransitionGraph, GraphError> {
    check(s_hat, prior)?;
    let n = s_hat.n();
    let edges = (0..n)
        .flat_map(|b| {
            (0..n).map(move |a| Edge {
                input: a,
                output: b,
                weight: s_hat.entries[(a, b)],
            })
        })
        .collect();
    Ok(TransitionGraph {
        rep: s_hat.rep.clone(),
        labels: default_labels(n),
        edges,
        input_bubbles: Some(prior.entries.clone()),
        output_bubbles: None,
        direction: Direction::Retrodictive,
    })
}

impl TransitionGraph {
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.labels.len() {
            self.labels = labels;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelStyle {
    /// Node names only.
    Name,
    /// Node names with bubble values.
    NameAndValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitOptions {
    /// Edges with `|w| <= cutoff` are omitted.
    pub cutoff: f64,
    /// Colormap half-range; defaults to the largest emitted `|w|`.
    pub w_max: Option<f64>,
    pub labels: LabelStyle,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            cutoff: DEFAULT_CUTOFF,
            w_max: None,
            labels: LabelStyle::NameAndValue,
        }
    }
}

pub fn emitted_edges<'a>(g: &'a TransitionGraph, opts: &EmitOptions) -> Vec<&'a Edge> {
    g.edges
        .iter()
        .filter(|e| e.weight.abs() > opts.cutoff)
        .collect()
}

fn color_range(edges: &[&Edge], opts: &EmitOptions) -> f64 {
    opts.w_max
        .filter(|w| *w > 0.0 && w.is_finite())
        .unwrap_or_else(|| {
            let m = edges.iter().map(|e| e.weight.abs()).fold(0.0, f64::max);
            if m > 0.0 {
                m
            } else {
                1.0
            }
        })
}

const COOL: (f64, f64, f64) = (33.0, 102.0, 172.0);
const WARM: (f64, f64, f64) = (178.0, 24.0, 43.0);

/// Blue–white–red color for `w` on `[-w_max, w_max]`.
pub fn diverging_color(w: f64, w_max: f64) -> String {
    let t = (w / w_max).clamp(-1.0, 1.0);
    let end = if t < 0.0 { COOL } else { WARM };
    let a = t.abs();
    let mix = |e: f64| (255.0 + (e - 255.0) * a).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(end.0), mix(end.1), mix(end.2))
}

fn edge_style(w: f64) -> &'static str {
    if w < 0.0 {
        "dashed"
    } else {
        "solid"
    }
}

fn bubble_scale(v: &Option<RVector>) -> f64 {
    v.as_ref()
        .map(|b| b.amax())
        .filter(|m| *m > 0.0)
        .unwrap_or(1.0)
}

fn dot_node_label(name: &str, bubble: Option<f64>, style: LabelStyle) -> String {
    let name = escape(name);
    match (bubble, style) {
        (Some(b), LabelStyle::NameAndValue) => format!("{name}\\n{b:.4}"),
        _ => name,
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn emit_dot(g: &TransitionGraph, opts: &EmitOptions) -> String {
    let edges = emitted_edges(g, opts);
    let w_max = color_range(&edges, opts);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "digraph \"{} {}\" {{",
        g.direction.tag(),
        escape(&g.rep)
    );
    out.push_str("  rankdir=LR;\n  splines=line;\n");
    out.push_str("  node [shape=circle, style=filled, fontname=\"Helvetica\", fontsize=10];\n");
    out.push_str("  edge [fontname=\"Helvetica\", fontsize=9];\n");

    for (side, bubbles) in [("in", &g.input_bubbles), ("out", &g.output_bubbles)] {
        let scale = bubble_scale(bubbles);
        out.push_str("  { rank=same;\n");
        for (i, name) in g.labels.iter().enumerate() {
            let b = bubbles.as_ref().map(|v| v[i]);
            let fill = b.map_or("#ffffff".to_string(), |x| diverging_color(x, scale));
            let label = if side == "out" {
                format!("{name}'")
            } else {
                name.clone()
            };
            let _ = writeln!(
                out,
                "    {side}{i} [label=\"{}\", fillcolor=\"{fill}\"];",
                dot_node_label(&label, b, opts.labels)
            );
        }
        out.push_str("  }\n");
    }

    let back = g.direction == Direction::Retrodictive;
    for e in edges {
        let _ = writeln!(
            out,
            "  in{} -> out{} [label=\"{:.4}\", color=\"{}\", style={}, penwidth={:.2}{}];",
            e.input,
            e.output,
            e.weight,
            diverging_color(e.weight, w_max),
            edge_style(e.weight),
            0.5 + 2.5 * (e.weight.abs() / w_max).min(1.0),
            if back { ", dir=back" } else { "" }
        );
    }
    out.push_str("}\n");
    out
}

const LEFT_X: f64 = 140.0;
const RIGHT_X: f64 = 460.0;
const TOP_Y: f64 = 90.0;
const STEP_Y: f64 = 80.0;
const RADIUS: f64 = 22.0;
const WIDTH: f64 = 600.0;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn emit_svg(g: &TransitionGraph, opts: &EmitOptions) -> String {
    let edges = emitted_edges(g, opts);
    let w_max = color_range(&edges, opts);
    let n = g.n();
    let height = TOP_Y + STEP_Y * n as f64 + 60.0;
    let y = |i: usize| TOP_Y + STEP_Y * i as f64;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH:.0} {height:.0}\" font-family=\"Helvetica, Arial, sans-serif\">"
    );
    let _ = writeln!(
        out,
        "  <title>{} transition graph ({})</title>",
        g.direction.tag(),
        xml_escape(&g.rep)
    );
    out.push_str("  <defs>\n");
    let _ = writeln!(
        out,
        "    <linearGradient id=\"legend\" x1=\"0\" y1=\"0\" x2=\"1\" y2=\"0\">\n      <stop offset=\"0\" stop-color=\"{}\"/>\n      <stop offset=\"0.5\" stop-color=\"#ffffff\"/>\n      <stop offset=\"1\" stop-color=\"{}\"/>\n    </linearGradient>",
        diverging_color(-w_max, w_max),
        diverging_color(w_max, w_max)
    );
    out.push_str("    <marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">\n      <polygon points=\"0,0 10,5 0,10\" fill=\"#444444\"/>\n    </marker>\n");
    out.push_str("  </defs>\n");

    // legend strip spanning [-w_max, +w_max]
    out.push_str("  <g id=\"legend-strip\">\n");
    let _ = writeln!(
        out,
        "    <rect x=\"200\" y=\"20\" width=\"200\" height=\"12\" fill=\"url(#legend)\" stroke=\"#888888\" stroke-width=\"0.5\"/>"
    );
    for (x, v) in [(200.0, -w_max), (300.0, 0.0), (400.0, w_max)] {
        let _ = writeln!(
            out,
            "    <text x=\"{x:.0}\" y=\"46\" font-size=\"10\" text-anchor=\"middle\">{v:+.4}</text>"
        );
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"edges\" fill=\"none\">\n");
    let back = g.direction == Direction::Retrodictive;
    for e in &edges {
        let (x1, y1, x2, y2) = if back {
            (RIGHT_X - RADIUS, y(e.output), LEFT_X + RADIUS, y(e.input))
        } else {
            (LEFT_X + RADIUS, y(e.input), RIGHT_X - RADIUS, y(e.output))
        };
        let dash = if e.weight < 0.0 {
            " stroke-dasharray=\"6,4\""
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "    <path d=\"M {x1:.1} {y1:.1} L {x2:.1} {y2:.1}\" stroke=\"{}\" stroke-width=\"{:.2}\"{dash} marker-end=\"url(#arrow)\"><title>{:.6}</title></path>",
            diverging_color(e.weight, w_max),
            0.75 + 2.75 * (e.weight.abs() / w_max).min(1.0),
            e.weight
        );
    }
    out.push_str("  </g>\n");

    out.push_str("  <g id=\"nodes\" stroke=\"#333333\" stroke-width=\"1\">\n");
    for (x, side, bubbles) in [
        (LEFT_X, "", &g.input_bubbles),
        (RIGHT_X, "'", &g.output_bubbles),
    ] {
        let scale = bubble_scale(bubbles);
        for (i, name) in g.labels.iter().enumerate() {
            let b = bubbles.as_ref().map(|v| v[i]);
            let fill = b.map_or("#ffffff".to_string(), |v| diverging_color(v, scale));
            let _ = writeln!(
                out,
                "    <circle cx=\"{x:.1}\" cy=\"{:.1}\" r=\"{RADIUS:.1}\" fill=\"{fill}\"/>",
                y(i)
            );
            let _ = writeln!(
                out,
                "    <text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" stroke=\"none\">{}{side}</text>",
                y(i) + 4.0,
                xml_escape(name)
            );
            if let (Some(v), LabelStyle::NameAndValue) = (b, opts.labels) {
                let _ = writeln!(
                    out,
                    "    <text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"9\" text-anchor=\"middle\" stroke=\"none\">{v:.4}</text>",
                    y(i) + RADIUS + 12.0
                );
            }
        }
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

/// True when all entries agree within `tol`.
pub fn uniform_within(v: &RVector, tol: f64) -> bool {
    v.max() - v.min() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::RMatrix;

    fn identity_graph() -> TransitionGraph {
        let s = QuasiStochasticMatrix::new("dw-qubit", RMatrix::identity(4, 4));
        let v = QuasiVector::new("dw-qubit", vec![0.25; 4]);
        forward_graph(&s, &v).unwrap()
    }

    #[test]
    fn identity_dot() {
        let g = identity_graph();
        assert!(g.source_sum_defect() < 1e-15);
        let dot = emit_dot(&g, &EmitOptions::default());
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert_eq!(dot.matches("style=solid").count(), 4);
        assert!(!dot.contains("dashed"));
        assert!(uniform_within(g.output_bubbles.as_ref().unwrap(), 1e-15));
    }

    #[test]
    fn identity_svg_counts() {
        let svg = emit_svg(&identity_graph(), &EmitOptions::default());
        assert_eq!(svg.matches("<circle").count(), 8);
        assert_eq!(svg.matches("<path").count(), 4);
    }

    #[test]
    fn cutoff_above_one_drops_everything() {
        let opts = EmitOptions {
            cutoff: 1.1,
            ..Default::default()
        };
        let g = identity_graph();
        assert_eq!(emit_dot(&g, &opts).matches(" -> ").count(), 0);
        assert_eq!(emit_svg(&g, &opts).matches("<path").count(), 0);
    }

    #[test]
    fn colormap_is_symmetric() {
        assert_eq!(diverging_color(0.0, 1.0), "#ffffff");
        assert_eq!(diverging_color(1.0, 1.0), "#b2182b");
        assert_eq!(diverging_color(-1.0, 1.0), "#2166ac");
        let svg = emit_svg(&identity_graph(), &EmitOptions::default());
        assert!(svg.contains("-1.0000") && svg.contains("+1.0000"));
    }

    #[test]
    fn negative_edges_are_dashed() {
        let s =
            QuasiStochasticMatrix::new("x", RMatrix::from_row_slice(2, 2, &[1.5, 0.0, -0.5, 1.0]));
        let v = QuasiVector::new("x", vec![0.75, 0.25]);
        let g = forward_graph(&s, &v).unwrap();
        let dot = emit_dot(&g, &EmitOptions::default());
        assert_eq!(dot.matches("style=dashed").count(), 1);
        let svg = emit_svg(&g, &EmitOptions::default());
        assert_eq!(svg.matches("stroke-dasharray").count(), 1);
    }

    #[test]
    fn rep_mismatch() {
        let s = QuasiStochasticMatrix::new("a", RMatrix::identity(2, 2));
        let v = QuasiVector::new("b", vec![0.5, 0.5]);
        assert!(matches!(
            retro_graph(&s, &v),
            Err(GraphError::RepMismatch { .. })
        ));
    }
}
