//! Illustrative SVG rendering of a disc embedding.
//!
//! Rim vertices are spaced on a circle in rim order; interior vertices are
//! placed by barycentric relaxation towards the average of their
//! neighbours. The picture is a reading aid only — the combinatorial
//! certificate is the artifact the verifiers check.

use linkage_core::embedding::{DiscEmbedding, EdgeKind};
use linkage_core::graph::VertexId;
use std::collections::BTreeMap;
use std::fmt::Write;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 60.0;
const RELAX_ROUNDS: usize = 120;

pub fn render(emb: &DiscEmbedding, label: impl Fn(VertexId) -> String) -> String {
    let radius = SIZE / 2.0 - MARGIN;
    let centre = SIZE / 2.0;
    let m = emb.rim.len() as f64;
    let mut pos: BTreeMap<VertexId, (f64, f64)> = BTreeMap::new();
    for (p, &x) in emb.rim.iter().enumerate() {
        let angle = std::f64::consts::TAU * (p as f64) / m - std::f64::consts::FRAC_PI_2;
        pos.insert(
            x,
            (centre + radius * angle.cos(), centre + radius * angle.sin()),
        );
    }

    let interior: Vec<VertexId> = emb
        .rotation
        .keys()
        .copied()
        .filter(|x| !pos.contains_key(x))
        .collect();
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in &emb.edges {
        adj.entry(e.a).or_default().push(e.b);
        adj.entry(e.b).or_default().push(e.a);
    }
    for &x in &interior {
        pos.insert(x, (centre, centre));
    }
    for _ in 0..RELAX_ROUNDS {
        for &x in &interior {
            let ns = &adj[&x];
            if ns.is_empty() {
                continue;
            }
            let (mut sx, mut sy) = (0.0, 0.0);
            for n in ns {
                let (nx, ny) = pos[n];
                sx += nx;
                sy += ny;
            }
            pos.insert(x, (sx / ns.len() as f64, sy / ns.len() as f64));
        }
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(
        svg,
        "  <circle cx=\"{centre}\" cy=\"{centre}\" r=\"{}\" fill=\"none\" stroke=\"#ccc\" stroke-dasharray=\"4 4\"/>",
        radius + MARGIN / 2.0
    );
    for e in &emb.edges {
        let (x1, y1) = pos[&e.a];
        let (x2, y2) = pos[&e.b];
        let (stroke, marker) = match e.kind {
            EdgeKind::Graph => ("#1f4e8c", " marker-end=\"url(#arrow)\""),
            EdgeKind::Rim => ("#bbb", ""),
        };
        let _ = writeln!(
            svg,
            "  <line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"{stroke}\"{marker}/>"
        );
    }
    let _ = writeln!(
        svg,
        "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#1f4e8c\"/></marker></defs>"
    );
    for (&x, &(px, py)) in &pos {
        let on_rim = emb.rim.contains(&x);
        let fill = if on_rim { "#d97706" } else { "#444" };
        let _ = writeln!(
            svg,
            "  <circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"5\" fill=\"{fill}\"/>"
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" font-family=\"monospace\">{}</text>",
            px + 7.0,
            py - 7.0,
            label(x)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
