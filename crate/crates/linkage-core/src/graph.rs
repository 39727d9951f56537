//! Loop-free, parallel-free digraphs with deterministic iteration order.
//!
//! All adjacency structures are backed by B-tree maps keyed by [`VertexId`],
//! so every traversal and every derived set is a pure function of the input.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

/// Opaque vertex identifier with a stable total order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge at {0}")]
    LoopEdge(VertexId),
    #[error("parallel edge ({0}, {1})")]
    ParallelEdge(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("graph contains a directed cycle: {cycle:?}")]
    CyclicGraph { cycle: Vec<VertexId> },
}

/// Direction selector for [`Digraph::reach_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Finite digraph without loops or parallel edges.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    out: BTreeMap<VertexId, BTreeSet<VertexId>>,
    inn: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Digraph{{V:{:?}, E:{:?}}}",
            self.vertices().collect::<Vec<_>>(),
            self.edges().collect::<Vec<_>>()
        )
    }
}

impl Digraph {
    /// Builds a digraph from explicit vertex and edge lists.
    ///
    /// Loops, repeated edges, and edges touching undeclared vertices are
    /// rejected.
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut out: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        let mut inn: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
        for v in vertices {
            out.entry(v).or_default();
            inn.entry(v).or_default();
        }
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::LoopEdge(u));
            }
            if !out.contains_key(&u) {
                return Err(GraphError::UnknownVertex(u));
            }
            if !out.contains_key(&v) {
                return Err(GraphError::UnknownVertex(v));
            }
            if !out.get_mut(&u).unwrap().insert(v) {
                return Err(GraphError::ParallelEdge(u, v));
            }
            inn.get_mut(&v).unwrap().insert(u);
        }
        Ok(Digraph { out, inn })
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.values().map(|s| s.len()).sum()
    }

    /// |V| + |E|, the induction measure of the solver.
    pub fn size_measure(&self) -> usize {
        self.vertex_count() + self.edge_count()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.out.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.out.get(&u).is_some_and(|s| s.contains(&v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.out.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices().collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.out
            .iter()
            .flat_map(|(&u, succ)| succ.iter().map(move |&v| (u, v)))
    }

    pub fn out_neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out.get(&v).into_iter().flatten().copied()
    }

    pub fn in_neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.inn.get(&v).into_iter().flatten().copied()
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out.get(&v).map_or(0, |s| s.len())
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.inn.get(&v).map_or(0, |s| s.len())
    }

    /// Subgraph induced by `keep`.
    pub fn restrict(&self, keep: &BTreeSet<VertexId>) -> Digraph {
        let vertices = self.vertices().filter(|v| keep.contains(v));
        let edges = self
            .edges()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v));
        Digraph::new(vertices, edges).expect("restriction of a valid digraph is valid")
    }

    /// Copy with one edge removed.
    pub fn without_edge(&self, u: VertexId, v: VertexId) -> Digraph {
        let edges = self.edges().filter(|&e| e != (u, v));
        Digraph::new(self.vertices(), edges).expect("edge removal keeps the digraph valid")
    }

    /// Topological order, deterministic: among ready vertices the smallest
    /// `VertexId` is emitted first.
    pub fn topological_order(&self) -> Result<Vec<VertexId>, GraphError> {
        let mut indeg: BTreeMap<VertexId, usize> =
            self.vertices().map(|v| (v, self.in_degree(v))).collect();
        let mut ready: BTreeSet<VertexId> = indeg
            .iter()
            .filter(|&(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut order = Vec::with_capacity(self.vertex_count());
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(v);
            for w in self.out_neighbours(v) {
                let d = indeg.get_mut(&w).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(w);
                }
            }
        }
        if order.len() == self.vertex_count() {
            Ok(order)
        } else {
            let placed: BTreeSet<VertexId> = order.iter().copied().collect();
            Err(GraphError::CyclicGraph {
                cycle: self.find_cycle_among(&placed),
            })
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    /// Extracts one directed cycle among the vertices not in `placed`
    /// (every such vertex lies on or leads into a cycle).
    fn find_cycle_among(&self, placed: &BTreeSet<VertexId>) -> Vec<VertexId> {
        let start = self
            .vertices()
            .find(|v| !placed.contains(v))
            .expect("a cycle exists");
        // Walk forward always taking the smallest unplaced successor; within
        // the unplaced subgraph every vertex has such a successor, so the walk
        // must revisit a vertex, closing a cycle.
        let mut seen_at: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut walk = vec![start];
        seen_at.insert(start, 0);
        loop {
            let cur = *walk.last().unwrap();
            let next = self
                .out_neighbours(cur)
                .find(|w| !placed.contains(w))
                .expect("unplaced vertex keeps an unplaced successor");
            if let Some(&pos) = seen_at.get(&next) {
                let mut cycle = walk[pos..].to_vec();
                // Canonical rotation: start the cycle at its smallest vertex.
                let min_pos = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, v)| **v)
                    .map(|(i, _)| i)
                    .unwrap();
                cycle.rotate_left(min_pos);
                return cycle;
            }
            seen_at.insert(next, walk.len());
            walk.push(next);
        }
    }

    /// All vertices reachable from `roots` (Forward), or co-reaching `roots`
    /// (Backward), by dipaths of length >= 0.
    pub fn reach_set(
        &self,
        roots: &BTreeSet<VertexId>,
        direction: Direction,
    ) -> Result<BTreeSet<VertexId>, GraphError> {
        for &r in roots {
            if !self.contains(r) {
                return Err(GraphError::UnknownVertex(r));
            }
        }
        let mut seen: BTreeSet<VertexId> = roots.clone();
        let mut queue: VecDeque<VertexId> = roots.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            let next: Vec<VertexId> = match direction {
                Direction::Forward => self.out_neighbours(v).collect(),
                Direction::Backward => self.in_neighbours(v).collect(),
            };
            for w in next {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        Ok(seen)
    }
}

/// Convenience for tests and fixtures: `v(3)` instead of `VertexId(3)`.
pub fn v(id: u32) -> VertexId {
    VertexId(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rejects_loops_and_parallels() {
        assert_eq!(
            Digraph::new([v(0)], [(v(0), v(0))]),
            Err(GraphError::LoopEdge(v(0)))
        );
        assert_eq!(
            Digraph::new([v(0), v(1)], [(v(0), v(1)), (v(0), v(1))]),
            Err(GraphError::ParallelEdge(v(0), v(1)))
        );
        assert_eq!(
            Digraph::new([v(0)], [(v(0), v(1))]),
            Err(GraphError::UnknownVertex(v(1)))
        );
    }

    #[test]
    fn topological_order_fan() {
        // I_fan: s1,s2 -> v -> t1,t2 with ids s1=0, s2=1, v=2, t1=3, t2=4.
        let inst = fixtures::i_fan();
        assert_eq!(
            inst.graph.topological_order().unwrap(),
            vec![v(0), v(1), v(2), v(3), v(4)]
        );
    }

    #[test]
    fn topological_order_two_cycle() {
        let g = Digraph::new([v(0), v(1)], [(v(0), v(1)), (v(1), v(0))]).unwrap();
        assert_eq!(
            g.topological_order(),
            Err(GraphError::CyclicGraph {
                cycle: vec![v(0), v(1)]
            })
        );
    }

    #[test]
    fn topological_order_planar4_scan() {
        let inst = fixtures::i_planar4();
        let order = inst.graph.topological_order().unwrap();
        let pos: std::collections::BTreeMap<_, _> =
            order.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        for (a, b) in inst.graph.edges() {
            assert!(pos[&a] < pos[&b], "edge {a}->{b} violates the order");
        }
        assert_eq!(order.len(), inst.graph.vertex_count());
    }

    #[test]
    fn reach_set_fan() {
        let inst = fixtures::i_fan();
        let fwd = inst
            .graph
            .reach_set(&[v(1)].into(), Direction::Forward)
            .unwrap();
        assert_eq!(fwd, [v(1), v(2), v(3), v(4)].into());
        let bwd = inst
            .graph
            .reach_set(&[v(3)].into(), Direction::Backward)
            .unwrap();
        assert_eq!(bwd, [v(0), v(1), v(2), v(3)].into());
    }

    #[test]
    fn reach_set_planar4_forward() {
        let inst = fixtures::i_planar4();
        let fwd = inst
            .graph
            .reach_set(&[v(0)].into(), Direction::Forward)
            .unwrap();
        // s1 reaches u, v and both sinks.
        assert_eq!(fwd, [v(0), v(2), v(3), v(4), v(5)].into());
    }

    #[test]
    fn reach_set_unknown_root() {
        let inst = fixtures::i_fan();
        assert_eq!(
            inst.graph.reach_set(&[v(99)].into(), Direction::Forward),
            Err(GraphError::UnknownVertex(v(99)))
        );
    }

    #[test]
    fn reach_set_monotone_idempotent_dual() {
        // Exhaustive duality check over all digraphs on 4 labelled vertices
        // would be large; sample deterministic random graphs instead and
        // check all three properties pairwise.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..8u32);
            let verts: Vec<VertexId> = (0..n).map(v).collect();
            let mut edges = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if a != b && rng.gen_bool(0.3) {
                        edges.push((v(a), v(b)));
                    }
                }
            }
            let g = Digraph::new(verts.clone(), edges).unwrap();
            for &r in &verts {
                let fwd = g.reach_set(&[r].into(), Direction::Forward).unwrap();
                assert!(fwd.contains(&r));
                let again = g.reach_set(&fwd, Direction::Forward).unwrap();
                assert_eq!(fwd, again);
                for &w in &verts {
                    let bwd = g.reach_set(&[w].into(), Direction::Backward).unwrap();
                    assert_eq!(fwd.contains(&w), bwd.contains(&r));
                }
            }
        }
    }
}
