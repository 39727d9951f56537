//! Reduction of general four-terminal instances to canonical form.
//!
//! A general instance asks for vertex-disjoint dipaths a -> c and b -> d in
//! an arbitrary acyclic digraph. Normalization deletes and contracts until
//! either the answer becomes trivial or the remaining graph is a strict
//! canonical instance with sources (a, b) and sinks (d, c) -- in that
//! terminal order a cross is exactly the requested linkage. Every step is
//! recorded so certificates can be replayed back to the input graph.

use crate::cross::CrossCertificate;
use crate::dipath::Dipath;
use crate::graph::{Digraph, Direction, GraphError, VertexId};
use crate::instance::{Instance, Strictness};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Arbitrary acyclic digraph with four distinct terminals; asks whether
/// vertex-disjoint dipaths a -> c and b -> d exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralInstance {
    pub graph: Digraph,
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
    pub d: VertexId,
}

impl GeneralInstance {
    pub fn terminals(&self) -> [VertexId; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

/// Why a vertex or edge was removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RemovalReason {
    /// Not forward-reachable from {a, b}.
    Unreachable,
    /// Does not reach {c, d}.
    CoUnreachable,
    /// In-edge of a path start: never usable.
    StartInEdge,
    /// Out-edge of a path end: never usable.
    EndOutEdge,
}

/// One recorded reduction step, in application order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReductionStep {
    DeleteVertex {
        vertex: VertexId,
        reason: RemovalReason,
    },
    DeleteEdge {
        from: VertexId,
        to: VertexId,
        reason: RemovalReason,
    },
    /// The edge (from, to) is contracted onto `survivor`, which is one of
    /// its endpoints; the other endpoint disappears and its remaining
    /// incident edges are redirected to the survivor.
    ContractEdge {
        from: VertexId,
        to: VertexId,
        survivor: VertexId,
    },
}

pub type ReductionTrace = Vec<ReductionStep>;

/// A verdict reached during reduction, before any solver runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialVerdict {
    NoLinkage { reason: NoLinkageReason },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoLinkageReason {
    /// A terminal fell off every a/b -> c/d dipath and was deleted.
    TerminalCutOff(VertexId),
    /// A path start lost its last out-edge.
    StartDeadEnd(VertexId),
    /// A path end lost its last in-edge.
    EndDeadEnd(VertexId),
}

/// Result of [`normalize`].
///
/// When `trivial_verdict` is `None` the `instance` is strict-canonical with
/// sources `(a, b)` and sinks `(d, c)`, so a cross there is precisely a
/// disjoint (a -> c, b -> d) linkage. When a verdict is present the
/// instance field holds the partially reduced leftover and must not be
/// solved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kernel {
    pub instance: Instance,
    pub trace: ReductionTrace,
    pub trivial_verdict: Option<TrivialVerdict>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("input graph has a directed cycle: {cycle:?}")]
    CyclicInput { cycle: Vec<VertexId> },
    #[error("terminals are not four distinct vertices of the graph")]
    BadTerminals,
    #[error("certificate does not replay through the reduction trace")]
    TraceMismatch,
}

/// Exhaustively applies answer-preserving reductions, in a fixed order with
/// a rescan after every step, so equal inputs yield equal kernels.
pub fn normalize(gi: &GeneralInstance) -> Result<Kernel, NormalizeError> {
    let terms = gi.terminals();
    let term_set: BTreeSet<VertexId> = terms.iter().copied().collect();
    if term_set.len() != 4 || terms.iter().any(|&t| !gi.graph.contains(t)) {
        return Err(NormalizeError::BadTerminals);
    }
    if let Err(GraphError::CyclicGraph { cycle }) = gi.graph.topological_order() {
        return Err(NormalizeError::CyclicInput { cycle });
    }

    let mut g = gi.graph.clone();
    let mut trace = ReductionTrace::new();
    let verdict = loop {
        if let Some(v) = dead_end(&g, gi) {
            break Some(v);
        }
        if let Some(step) = reachability_step(&g, gi) {
            match step {
                Ok(step) => {
                    g = apply_step(&g, &step);
                    trace.push(step);
                    continue;
                }
                Err(reason) => break Some(reason),
            }
        }
        if let Some(step) = terminal_edge_step(&g, gi) {
            g = apply_step(&g, &step);
            trace.push(step);
            continue;
        }
        if let Some(step) = contraction_step(&g, &term_set) {
            g = apply_step(&g, &step);
            trace.push(step);
            continue;
        }
        break None;
    };

    let verdict = verdict.map(|reason| TrivialVerdict::NoLinkage { reason });
    let (strictness, sources, sinks) = if verdict.is_none() {
        (Strictness::Strict, vec![gi.a, gi.b], vec![gi.d, gi.c])
    } else {
        // Leftover snapshot only; terminals may already be gone.
        let keep = |t: VertexId| g.contains(t);
        (
            Strictness::Relaxed,
            [gi.a, gi.b].into_iter().filter(|&t| keep(t)).collect(),
            [gi.d, gi.c].into_iter().filter(|&t| keep(t)).collect(),
        )
    };
    let instance = Instance::new(g, sources, sinks, strictness);
    if verdict.is_none() {
        debug_assert!(
            instance.validate().is_ok(),
            "kernel must be strict-canonical: {}",
            instance.validate()
        );
    }
    Ok(Kernel {
        instance,
        trace,
        trivial_verdict: verdict,
    })
}

/// A terminal that can no longer lie on any a/b -> c/d dipath.
fn dead_end(g: &Digraph, gi: &GeneralInstance) -> Option<NoLinkageReason> {
    for t in gi.terminals() {
        if !g.contains(t) {
            return Some(NoLinkageReason::TerminalCutOff(t));
        }
    }
    for s in [gi.a, gi.b] {
        if g.out_degree(s) == 0 {
            return Some(NoLinkageReason::StartDeadEnd(s));
        }
    }
    for t in [gi.c, gi.d] {
        if g.in_degree(t) == 0 {
            return Some(NoLinkageReason::EndDeadEnd(t));
        }
    }
    None
}

/// Smallest vertex outside every {a,b} -> {c,d} corridor, or a no-linkage
/// reason if that vertex is a terminal.
fn reachability_step(
    g: &Digraph,
    gi: &GeneralInstance,
) -> Option<Result<ReductionStep, NoLinkageReason>> {
    let starts: BTreeSet<VertexId> = [gi.a, gi.b].into();
    let ends: BTreeSet<VertexId> = [gi.c, gi.d].into();
    let fwd = g
        .reach_set(&starts, Direction::Forward)
        .expect("valid roots");
    let bwd = g
        .reach_set(&ends, Direction::Backward)
        .expect("valid roots");
    for x in g.vertices() {
        let (in_fwd, in_bwd) = (fwd.contains(&x), bwd.contains(&x));
        if in_fwd && in_bwd {
            continue;
        }
        if gi.terminals().contains(&x) {
            return Some(Err(NoLinkageReason::TerminalCutOff(x)));
        }
        let reason = if !in_fwd {
            RemovalReason::Unreachable
        } else {
            RemovalReason::CoUnreachable
        };
        return Some(Ok(ReductionStep::DeleteVertex { vertex: x, reason }));
    }
    None
}

/// Smallest edge entering a path start or leaving a path end.
fn terminal_edge_step(g: &Digraph, gi: &GeneralInstance) -> Option<ReductionStep> {
    for (u, w) in g.edges() {
        if w == gi.a || w == gi.b {
            return Some(ReductionStep::DeleteEdge {
                from: u,
                to: w,
                reason: RemovalReason::StartInEdge,
            });
        }
        if u == gi.c || u == gi.d {
            return Some(ReductionStep::DeleteEdge {
                from: u,
                to: w,
                reason: RemovalReason::EndOutEdge,
            });
        }
    }
    None
}

/// Smallest non-terminal vertex with in-degree one (contract its in-edge)
/// or, failing that, out-degree one (contract its out-edge). Any dipath
/// through the contracted edge survives the merge, and the merge creates
/// no new terminal connections, so the linkage answer is preserved.
fn contraction_step(g: &Digraph, terminals: &BTreeSet<VertexId>) -> Option<ReductionStep> {
    for w in g.vertices().filter(|w| !terminals.contains(w)) {
        if g.in_degree(w) == 1 {
            let u = g.in_neighbours(w).next().unwrap();
            return Some(ReductionStep::ContractEdge {
                from: u,
                to: w,
                survivor: u,
            });
        }
    }
    for w in g.vertices().filter(|w| !terminals.contains(w)) {
        if g.out_degree(w) == 1 {
            let z = g.out_neighbours(w).next().unwrap();
            return Some(ReductionStep::ContractEdge {
                from: w,
                to: z,
                survivor: z,
            });
        }
    }
    None
}

/// Applies one step to a graph. Public so traces can be replayed and
/// audited independently of [`normalize`].
pub fn apply_step(g: &Digraph, step: &ReductionStep) -> Digraph {
    match *step {
        ReductionStep::DeleteVertex { vertex, .. } => {
            let keep: BTreeSet<VertexId> = g.vertices().filter(|&x| x != vertex).collect();
            g.restrict(&keep)
        }
        ReductionStep::DeleteEdge { from, to, .. } => g.without_edge(from, to),
        ReductionStep::ContractEdge { from, to, survivor } => {
            let gone = if survivor == from { to } else { from };
            debug_assert!(g.has_edge(from, to));
            let vertices: Vec<VertexId> = g.vertices().filter(|&x| x != gone).collect();
            let edges: BTreeSet<(VertexId, VertexId)> = g
                .edges()
                .filter(|&(u, w)| u != gone && w != gone)
                .chain(
                    g.out_neighbours(gone)
                        .filter(|&w| w != survivor)
                        .map(|w| (survivor, w)),
                )
                .chain(
                    g.in_neighbours(gone)
                        .filter(|&u| u != survivor)
                        .map(|u| (u, survivor)),
                )
                .collect();
            Digraph::new(vertices, edges).expect("contraction of a DAG edge stays loop-free")
        }
    }
}

/// Replays a whole trace from the original graph.
pub fn replay_trace(g: &Digraph, trace: &ReductionTrace) -> Digraph {
    trace.iter().fold(g.clone(), |g, step| apply_step(&g, step))
}

/// Translates a kernel cross back into disjoint dipaths (a -> c, b -> d)
/// of the original graph by undoing the trace last step first. Deletions
/// never touch a valid kernel path; each contraction may force the
/// swallowed vertex back into one path.
pub fn lift_linkage(
    gi: &GeneralInstance,
    kernel: &Kernel,
    cross: &CrossCertificate,
) -> Result<(Dipath, Dipath), NormalizeError> {
    // Pre-step graphs: graphs[idx] is the graph the trace's step idx acted on.
    let mut graphs = Vec::with_capacity(kernel.trace.len());
    let mut g = gi.graph.clone();
    for step in &kernel.trace {
        graphs.push(g.clone());
        g = apply_step(&g, step);
    }

    let (mut path_ac, mut path_bd) = if cross.p.first() == gi.a {
        (cross.p.clone(), cross.p_other.clone())
    } else {
        (cross.p_other.clone(), cross.p.clone())
    };
    if path_ac.first() != gi.a
        || path_ac.last() != gi.c
        || path_bd.first() != gi.b
        || path_bd.last() != gi.d
    {
        return Err(NormalizeError::TraceMismatch);
    }

    for (step, pre) in kernel.trace.iter().zip(graphs.iter()).rev() {
        if let ReductionStep::ContractEdge { from, to, survivor } = *step {
            let gone = if survivor == from { to } else { from };
            for path in [&mut path_ac, &mut path_bd] {
                *path = expand_contraction(path, pre, survivor, gone)?;
            }
        }
    }
    for path in [&path_ac, &path_bd] {
        if !path.is_valid_in(&gi.graph) {
            return Err(NormalizeError::TraceMismatch);
        }
    }
    if !path_ac.is_disjoint_from(&path_bd) {
        return Err(NormalizeError::TraceMismatch);
    }
    Ok((path_ac, path_bd))
}

/// Rewrites one path so it is valid in the graph before a contraction that
/// merged `gone` into `survivor`: wherever the path uses a pre-image edge
/// that only exists through `gone`, the vertex is re-inserted.
fn expand_contraction(
    path: &Dipath,
    pre: &Digraph,
    survivor: VertexId,
    gone: VertexId,
) -> Result<Dipath, NormalizeError> {
    let Some(pos) = path.0.iter().position(|&x| x == survivor) else {
        return Ok(path.clone());
    };
    let mut vs = path.0.clone();
    if pos + 1 < vs.len() && !pre.has_edge(survivor, vs[pos + 1]) {
        if pre.has_edge(survivor, gone) && pre.has_edge(gone, vs[pos + 1]) {
            vs.insert(pos + 1, gone);
        } else {
            return Err(NormalizeError::TraceMismatch);
        }
    }
    if pos > 0 && !pre.has_edge(vs[pos - 1], survivor) {
        if pre.has_edge(vs[pos - 1], gone) && pre.has_edge(gone, survivor) {
            vs.insert(pos, gone);
        } else {
            return Err(NormalizeError::TraceMismatch);
        }
    }
    Ok(Dipath::new(vs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::v;
    use crate::oracle::dag_two_disjoint_paths;

    /// a=0, b=1, x=2, y=3, c=4, d=5 with a->x->c and b->y->d.
    fn chain_pair() -> GeneralInstance {
        let g = Digraph::new(
            ids(6),
            [(v(0), v(2)), (v(2), v(4)), (v(1), v(3)), (v(3), v(5))],
        )
        .unwrap();
        GeneralInstance {
            graph: g,
            a: v(0),
            b: v(1),
            c: v(4),
            d: v(5),
        }
    }

    fn ids(n: u32) -> Vec<VertexId> {
        (0..n).map(v).collect()
    }

    #[test]
    fn chains_contract_to_edges() {
        let gi = chain_pair();
        let kernel = normalize(&gi).unwrap();
        assert!(kernel.trivial_verdict.is_none());
        let inst = &kernel.instance;
        assert_eq!(inst.sources, vec![v(0), v(1)]);
        assert_eq!(inst.sinks, vec![v(5), v(4)]);
        assert_eq!(inst.graph.vertex_count(), 4);
        assert!(inst.graph.has_edge(v(0), v(4)));
        assert!(inst.graph.has_edge(v(1), v(5)));
        assert_eq!(replay_trace(&gi.graph, &kernel.trace), inst.graph);
    }

    #[test]
    fn unreachable_clutter_is_deleted() {
        let mut gi = chain_pair();
        // A reachable vertex whose only useful edge enters b, plus a
        // stranded successor.
        gi.graph = Digraph::new(
            ids(8),
            [
                (v(0), v(2)),
                (v(2), v(4)),
                (v(1), v(3)),
                (v(3), v(5)),
                (v(0), v(6)),
                (v(6), v(1)),
                (v(6), v(7)),
            ],
        )
        .unwrap();
        let kernel = normalize(&gi).unwrap();
        assert!(kernel.trivial_verdict.is_none());
        assert!(!kernel.instance.graph.contains(v(6)));
        assert!(!kernel.instance.graph.contains(v(7)));
        assert!(kernel.trace.iter().any(|s| matches!(
            s,
            ReductionStep::DeleteEdge {
                to,
                reason: RemovalReason::StartInEdge,
                ..
            } if *to == v(1)
        )));
    }

    #[test]
    fn missing_connection_yields_no_linkage() {
        // a reaches only d; b reaches only c. The kernel is still fine for
        // the solver (it will report no cross), but cutting a off entirely
        // must produce a verdict.
        let g = Digraph::new(ids(5), [(v(1), v(3)), (v(1), v(4))]).unwrap();
        let gi = GeneralInstance {
            graph: g,
            a: v(0),
            b: v(1),
            c: v(3),
            d: v(4),
        };
        let kernel = normalize(&gi).unwrap();
        assert_eq!(
            kernel.trivial_verdict,
            Some(TrivialVerdict::NoLinkage {
                reason: NoLinkageReason::StartDeadEnd(v(0))
            })
        );
    }

    #[test]
    fn rejects_bad_terminals_and_cycles() {
        let g = Digraph::new(ids(4), [(v(0), v(1))]).unwrap();
        let gi = GeneralInstance {
            graph: g,
            a: v(0),
            b: v(0),
            c: v(2),
            d: v(3),
        };
        assert_eq!(normalize(&gi), Err(NormalizeError::BadTerminals));

        let g = Digraph::new(ids(6), [(v(4), v(5)), (v(5), v(4)), (v(0), v(2))]).unwrap();
        let gi = GeneralInstance {
            graph: g,
            a: v(0),
            b: v(1),
            c: v(2),
            d: v(3),
        };
        assert!(matches!(
            normalize(&gi),
            Err(NormalizeError::CyclicInput { .. })
        ));
    }

    #[test]
    fn lift_restores_paths_through_contractions() {
        let gi = chain_pair();
        let kernel = normalize(&gi).unwrap();
        let cross = CrossCertificate::from_paths(
            &kernel.instance,
            Dipath::new(vec![v(0), v(4)]),
            Dipath::new(vec![v(1), v(5)]),
        );
        assert!(crate::cross::verify_cross(&kernel.instance, &cross).accepted());
        let (p_ac, p_bd) = lift_linkage(&gi, &kernel, &cross).unwrap();
        assert_eq!(p_ac, Dipath::new(vec![v(0), v(2), v(4)]));
        assert_eq!(p_bd, Dipath::new(vec![v(1), v(3), v(5)]));
    }

    #[test]
    fn normalize_preserves_the_linkage_answer_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut kernels_with_verdict = 0;
        for round in 0..300 {
            let n = rng.gen_range(4..11u32);
            let mut edges = Vec::new();
            for x in 0..n {
                for y in x + 1..n {
                    if rng.gen_bool(0.35) {
                        edges.push((v(x), v(y)));
                    }
                }
            }
            let g = Digraph::new(ids(n), edges).unwrap();
            let mut picks: Vec<u32> = (0..n).collect();
            for i in 0..4 {
                let j = rng.gen_range(i..picks.len());
                picks.swap(i, j);
            }
            let gi = GeneralInstance {
                graph: g,
                a: v(picks[0]),
                b: v(picks[1]),
                c: v(picks[2]),
                d: v(picks[3]),
            };
            let truth = dag_two_disjoint_paths(&gi.graph, gi.a, gi.b, gi.c, gi.d).is_some();
            let kernel = normalize(&gi).unwrap();
            match &kernel.trivial_verdict {
                Some(TrivialVerdict::NoLinkage { .. }) => {
                    kernels_with_verdict += 1;
                    assert!(!truth, "round {round}: verdict contradicts oracle");
                }
                None => {
                    let ki = &kernel.instance;
                    let after = dag_two_disjoint_paths(
                        &ki.graph,
                        ki.sources[0],
                        ki.sources[1],
                        ki.sinks[1],
                        ki.sinks[0],
                    )
                    .is_some();
                    assert_eq!(truth, after, "round {round}: answer changed");
                }
            }
        }
        assert!(kernels_with_verdict > 0, "test never exercised verdicts");
    }
}
