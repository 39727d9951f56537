//! Seeded instance generators for the test suites and the CLI.
//!
//! All randomness flows from a ChaCha stream seeded by the caller, and all
//! candidate sets are drawn from ordered collections, so a given seed
//! always produces the same instance on every platform.

use crate::graph::{v, Digraph, VertexId};
use crate::instance::{Instance, Strictness};
use crate::normalize::GeneralInstance;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// What [`gen_random_canonical`] and friends should aim for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Vertex-count target. Exact for the random generators; the drawable
    /// generator stops growing once it reaches it.
    pub n: usize,
    /// Edge probability used wherever edges are sampled independently.
    pub density: f64,
    /// Number of sources (ignored by [`gen_general`]).
    pub k: usize,
    /// Number of sinks (ignored by [`gen_general`]).
    pub l: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(n: usize, density: f64, k: usize, l: usize, seed: u64) -> Self {
        GenConfig {
            n,
            density,
            k,
            l,
            seed,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("infeasible generator configuration: {0}")]
    InfeasibleConfig(String),
}

/// Uniform-ish random strict instance: vertex ids double as topological
/// positions (sources first, sinks last), edges sampled forward, then
/// degrees repaired upward until the instance is canonical. The terminal
/// sequences are random permutations of the source and sink vertices.
pub fn gen_random_canonical(cfg: &GenConfig) -> Result<Instance, GenError> {
    let (n, k, l) = (cfg.n, cfg.k, cfg.l);
    if k == 0 || l == 0 {
        return Err(GenError::InfeasibleConfig(
            "k and l must be positive".into(),
        ));
    }
    if n < k + l {
        return Err(GenError::InfeasibleConfig(format!(
            "n = {n} cannot hold {k} sources and {l} sinks"
        )));
    }
    if n > k + l && (k < 2 || l < 2) {
        return Err(GenError::InfeasibleConfig(
            "internal vertices need two sources and two sinks to feed their degrees".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = n as u32;
    let (k, l) = (k as u32, l as u32);
    let is_source = |x: u32| x < k;
    let is_sink = |x: u32| x >= n - l;

    let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
    for x in 0..n {
        for y in x + 1..n {
            if !is_sink(x) && !is_source(y) && rng.gen_bool(cfg.density) {
                edges.insert((x, y));
            }
        }
    }
    // Degree repair, in id order so the result is seed-determined.
    for w in k..n - l {
        while edges.iter().filter(|&&(_, y)| y == w).count() < 2 {
            let cands: Vec<u32> = (0..w)
                .filter(|&x| !is_sink(x) && !edges.contains(&(x, w)))
                .collect();
            edges.insert((cands[rng.gen_range(0..cands.len())], w));
        }
        while edges.iter().filter(|&&(x, _)| x == w).count() < 2 {
            let cands: Vec<u32> = (w + 1..n)
                .filter(|&y| !is_source(y) && !edges.contains(&(w, y)))
                .collect();
            edges.insert((w, cands[rng.gen_range(0..cands.len())]));
        }
    }
    for s in 0..k {
        if !edges.iter().any(|&(x, _)| x == s) {
            let cands: Vec<u32> = (k..n).filter(|&y| !is_source(y)).collect();
            edges.insert((s, cands[rng.gen_range(0..cands.len())]));
        }
    }
    for t in n - l..n {
        if !edges.iter().any(|&(_, y)| y == t) {
            let cands: Vec<u32> = (0..n - l).collect();
            edges.insert((cands[rng.gen_range(0..cands.len())], t));
        }
    }

    let g = Digraph::new((0..n).map(v), edges.iter().map(|&(x, y)| (v(x), v(y))))
        .expect("forward edges on distinct ids");
    let mut sources: Vec<VertexId> = (0..k).map(v).collect();
    let mut sinks: Vec<VertexId> = (n - l..n).map(v).collect();
    sources.shuffle(&mut rng);
    sinks.shuffle(&mut rng);
    let inst = Instance::new(g, sources, sinks, Strictness::Strict);
    debug_assert!(inst.validate().is_ok(), "{}", inst.validate());
    Ok(inst)
}

/// Random drawable (cross-free) strict instance, built by running the
/// structural characterization backwards: start from an edgeless seed,
/// repeatedly either glue a fresh block onto an end of the terminal
/// sequences (optionally wiring the shared corner pair) or blow an
/// interior source with out-degree two up into a fan, then discard
/// isolated terminals.
pub fn gen_drawable(cfg: &GenConfig) -> Result<Instance, GenError> {
    if cfg.n < 4 {
        return Err(GenError::InfeasibleConfig(
            "drawable instances need at least four vertices".into(),
        ));
    }
    for attempt in 0..64u64 {
        let mut rng =
            ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(attempt.wrapping_mul(0x9e37)));
        if let Some(inst) = try_drawable(cfg, &mut rng) {
            debug_assert!(inst.validate().is_ok(), "{}", inst.validate());
            return Ok(inst);
        }
    }
    Err(GenError::InfeasibleConfig(
        "drawable growth kept collapsing; raise n or density".into(),
    ))
}

struct Growth {
    next_id: u32,
    edges: BTreeSet<(VertexId, VertexId)>,
    vertices: BTreeSet<VertexId>,
    /// Vertices with at least one incident edge; isolated terminals are
    /// discarded at the end, so only these count toward the size target.
    touched: BTreeSet<VertexId>,
    sources: Vec<VertexId>,
    sinks: Vec<VertexId>,
}

impl Growth {
    fn fresh(&mut self) -> VertexId {
        let x = v(self.next_id);
        self.next_id += 1;
        self.vertices.insert(x);
        x
    }

    fn add_edge(&mut self, a: VertexId, b: VertexId) {
        self.edges.insert((a, b));
        self.touched.insert(a);
        self.touched.insert(b);
    }
}

fn try_drawable(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Option<Instance> {
    let mut gr = Growth {
        next_id: 0,
        edges: BTreeSet::new(),
        vertices: BTreeSet::new(),
        touched: BTreeSet::new(),
        sources: Vec::new(),
        sinks: Vec::new(),
    };
    for _ in 0..rng.gen_range(1..=3) {
        let s = gr.fresh();
        gr.sources.push(s);
    }
    for _ in 0..rng.gen_range(1..=3) {
        let t = gr.fresh();
        gr.sinks.push(t);
    }

    // Growth steps often add no vertices (corner edges, empty fans), so the
    // runaway guard is generous.
    let mut guard = 0;
    while gr.touched.len() < cfg.n && guard < 64 * cfg.n {
        guard += 1;
        let fans = fan_candidates(&gr);
        let do_fan = !fans.is_empty() && rng.gen_bool(0.5);
        if do_fan {
            let m = fans[rng.gen_range(0..fans.len())];
            grow_fan(&mut gr, m, rng.gen_range(0..=2), rng);
        } else {
            grow_glue(&mut gr, rng);
        }
    }

    // Drop terminals that never picked up an edge.
    let touched = &gr.touched;
    let sources: Vec<VertexId> = gr
        .sources
        .iter()
        .copied()
        .filter(|s| touched.contains(s))
        .collect();
    let sinks: Vec<VertexId> = gr
        .sinks
        .iter()
        .copied()
        .filter(|t| touched.contains(t))
        .collect();
    if sources.is_empty() || sinks.is_empty() {
        return None;
    }
    let g = Digraph::new(touched.iter().copied(), gr.edges.iter().copied())
        .expect("growth keeps edges simple");
    let inst = Instance::new(g, sources, sinks, Strictness::Strict);
    if inst.validate().is_ok() {
        Some(inst)
    } else {
        None
    }
}

/// Interior source positions whose vertex already has out-degree two, i.e.
/// where a fan expansion is legal.
fn fan_candidates(gr: &Growth) -> Vec<usize> {
    if gr.sources.len() < 3 {
        return Vec::new();
    }
    let mut out_deg: std::collections::BTreeMap<VertexId, usize> = Default::default();
    for &(a, _) in &gr.edges {
        *out_deg.entry(a).or_default() += 1;
    }
    (1..gr.sources.len() - 1)
        .filter(|&m| out_deg.get(&gr.sources[m]).is_some_and(|&d| d >= 2))
        .collect()
}

/// Turns the source at position `m` into an internal fan apex: its two rim
/// neighbours and `extra` fresh sources all feed it.
fn grow_fan(gr: &mut Growth, m: usize, extra: usize, rng: &mut ChaCha8Rng) {
    let apex = gr.sources[m];
    let left = gr.sources[m - 1];
    let right = gr.sources[m + 1];
    gr.add_edge(left, apex);
    gr.add_edge(right, apex);
    let mut replacement = Vec::new();
    for _ in 0..extra {
        let w = gr.fresh();
        gr.add_edge(w, apex);
        replacement.push(w);
    }
    if replacement.len() > 1 && rng.gen_bool(0.5) {
        replacement.reverse();
    }
    gr.sources.splice(m..=m, replacement);
}

/// Glues a fresh block onto the left or right end of both terminal
/// sequences, sharing the corner source/sink pair, and usually wires that
/// shared pair with an edge.
fn grow_glue(gr: &mut Growth, rng: &mut ChaCha8Rng) {
    let at_right = rng.gen_bool(0.5);
    let (shared_s, shared_t) = if at_right {
        (*gr.sources.last().unwrap(), *gr.sinks.last().unwrap())
    } else {
        (gr.sources[0], gr.sinks[0])
    };
    if rng.gen_bool(0.8) {
        gr.add_edge(shared_s, shared_t);
    }
    let extra_s = rng.gen_range(0..=2);
    let extra_t = rng.gen_range(0..=2);
    let new_s: Vec<VertexId> = (0..extra_s).map(|_| gr.fresh()).collect();
    let new_t: Vec<VertexId> = (0..extra_t).map(|_| gr.fresh()).collect();
    if at_right {
        gr.sources.extend(&new_s);
        gr.sinks.extend(&new_t);
    } else {
        gr.sources.splice(0..0, new_s.iter().rev().copied());
        gr.sinks.splice(0..0, new_t.iter().rev().copied());
    }
}

/// Random general four-terminal instance: a random DAG (ids double as
/// topological positions) with four distinct random terminals and no
/// canonical-form guarantees whatsoever.
pub fn gen_general(cfg: &GenConfig) -> Result<GeneralInstance, GenError> {
    if cfg.n < 4 {
        return Err(GenError::InfeasibleConfig(
            "four distinct terminals need at least four vertices".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n as u32;
    let mut edges = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(cfg.density) {
                edges.push((v(x), v(y)));
            }
        }
    }
    let graph = Digraph::new((0..n).map(v), edges).expect("forward edges on distinct ids");
    let mut picks: Vec<u32> = (0..n).collect();
    picks.shuffle(&mut rng);
    Ok(GeneralInstance {
        graph,
        a: v(picks[0]),
        b: v(picks[1]),
        c: v(picks[2]),
        d: v(picks[3]),
    })
}
