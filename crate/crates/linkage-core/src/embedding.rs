//! Disc embeddings as rotation systems, their verifier, and the
//! constructors used by the solver.
//!
//! Drawability in a closed disc with the terminals on the boundary is
//! operationalized combinatorially: the graph is augmented with a rim cycle
//! through the terminals in prescribed order, and the certificate is a
//! rotation system of the augmented graph in which every connected component
//! satisfies V - E + F = 2 and the rim bounds a face. Rim edges are
//! distinct objects from graph edges, so a graph edge joining two rim
//! neighbours coexists with its rim copy without parallel-edge ambiguity.

use crate::graph::VertexId;
use crate::instance::Instance;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// An edge of the underlying digraph, directed `a -> b`.
    Graph,
    /// An artificial boundary edge.
    Rim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbEdge {
    pub a: VertexId,
    pub b: VertexId,
    pub kind: EdgeKind,
}

impl EmbEdge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.a == x || self.b == x
    }
}

/// One traversal side of an edge: `forward` runs `a -> b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dart {
    pub edge: EdgeId,
    pub forward: bool,
}

/// A closed face walk, as the sequence of darts traversed.
pub type Face = Vec<Dart>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("instance has edges, base embedding needs an edgeless graph")]
    NonemptyEdges,
    #[error("shared rim edge ({0}, {1}) missing from a side")]
    RimMismatch(VertexId, VertexId),
    #[error("vertex {0} is not on the rim between the expected sources")]
    NotOnRim(VertexId),
    #[error("malformed rotation: {0}")]
    MalformedRotation(String),
    #[error("no interior face joins {0} and {1}")]
    NoFaceForChord(VertexId, VertexId),
}

/// Rotation system over the graph plus rim edges, with the rim cycle.
///
/// `rim_edges[p]` joins `rim[p]` and `rim[(p+1) % rim.len()]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscEmbedding {
    pub edges: Vec<EmbEdge>,
    pub rotation: BTreeMap<VertexId, Vec<EdgeId>>,
    pub rim: Vec<VertexId>,
    pub rim_edges: Vec<EdgeId>,
}

impl DiscEmbedding {
    /// Terminal boundary order prescribed by the theorem:
    /// s_1..s_k, t_l..t_1.
    pub fn prescribed_rim(inst: &Instance) -> Vec<VertexId> {
        let mut rim = inst.sources.clone();
        rim.extend(inst.sinks.iter().rev().copied());
        rim
    }

    fn dart_target(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge];
        if d.forward {
            e.b
        } else {
            e.a
        }
    }

    fn check_rotation(&self) -> Result<(), EmbeddingError> {
        let mut seen: BTreeMap<EdgeId, BTreeSet<VertexId>> = BTreeMap::new();
        for (&x, rot) in &self.rotation {
            for &e in rot {
                let Some(edge) = self.edges.get(e) else {
                    return Err(EmbeddingError::MalformedRotation(format!(
                        "unknown edge id {e} at {x}"
                    )));
                };
                if !edge.touches(x) {
                    return Err(EmbeddingError::MalformedRotation(format!(
                        "edge {e} in rotation of non-endpoint {x}"
                    )));
                }
                if !seen.entry(e).or_default().insert(x) {
                    return Err(EmbeddingError::MalformedRotation(format!(
                        "edge {e} listed twice at {x}"
                    )));
                }
            }
        }
        for (id, edge) in self.edges.iter().enumerate() {
            let ends = seen.remove(&id).unwrap_or_default();
            if ends != BTreeSet::from([edge.a, edge.b]) {
                return Err(EmbeddingError::MalformedRotation(format!(
                    "edge {id} not present in both endpoint rotations"
                )));
            }
        }
        Ok(())
    }

    /// Face tracing by the next-edge-after rule: arriving at `w` via edge
    /// `e`, leave via the successor of `e` in the rotation at `w`.
    pub fn trace_faces(&self) -> Result<Vec<Face>, EmbeddingError> {
        self.check_rotation()?;
        let mut used: BTreeSet<Dart> = BTreeSet::new();
        let mut faces = Vec::new();
        let all_darts = (0..self.edges.len()).flat_map(|e| {
            [
                Dart {
                    edge: e,
                    forward: true,
                },
                Dart {
                    edge: e,
                    forward: false,
                },
            ]
        });
        for start in all_darts {
            if used.contains(&start) {
                continue;
            }
            let mut face = Vec::new();
            let mut d = start;
            loop {
                used.insert(d);
                face.push(d);
                let w = self.dart_target(d);
                let rot = &self.rotation[&w];
                let pos = rot.iter().position(|&e| e == d.edge).unwrap();
                let next_edge = rot[(pos + 1) % rot.len()];
                d = Dart {
                    edge: next_edge,
                    forward: self.edges[next_edge].a == w,
                };
                if d == start {
                    break;
                }
            }
            faces.push(face);
        }
        Ok(faces)
    }

    /// Index into a face list of the face bounded by exactly the rim cycle.
    pub fn rim_face_index(&self, faces: &[Face]) -> Option<usize> {
        let rim_set: BTreeSet<EdgeId> = self.rim_edges.iter().copied().collect();
        faces.iter().position(|f| {
            f.len() == self.rim_edges.len()
                && f.iter().map(|d| d.edge).collect::<BTreeSet<_>>() == rim_set
        })
    }

    /// Connected components of the augmented graph, as vertex -> component id.
    fn components(&self) -> BTreeMap<VertexId, usize> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &x in self.rotation.keys() {
            adj.entry(x).or_default();
        }
        for e in &self.edges {
            adj.entry(e.a).or_default().push(e.b);
            adj.entry(e.b).or_default().push(e.a);
        }
        let mut comp: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut next = 0usize;
        let keys: Vec<VertexId> = adj.keys().copied().collect();
        for x in keys {
            if comp.contains_key(&x) {
                continue;
            }
            let id = next;
            next += 1;
            let mut queue = VecDeque::from([x]);
            comp.insert(x, id);
            while let Some(y) = queue.pop_front() {
                for &z in &adj[&y] {
                    if let std::collections::btree_map::Entry::Vacant(slot) = comp.entry(z) {
                        slot.insert(id);
                        queue.push_back(z);
                    }
                }
            }
        }
        comp
    }
}

/// One reason an embedding certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingFailure {
    MalformedRotation(String),
    /// Graph-kind edges differ from the instance's edge set.
    GraphEdgeMismatch,
    /// Rotation vertex set differs from the instance's vertex set.
    VertexSetMismatch,
    RimOrderMismatch {
        expected: Vec<VertexId>,
        found: Vec<VertexId>,
    },
    /// Rim edge list inconsistent with the rim cycle, or rim-kind edges
    /// not exactly the declared rim edges.
    RimEdgesInconsistent,
    EulerCheckFailed {
        component_vertices: usize,
        component_edges: usize,
        component_faces: usize,
    },
    RimNotAFace,
}

impl fmt::Display for EmbeddingFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeddingFailure::MalformedRotation(m) => write!(f, "malformed rotation: {m}"),
            EmbeddingFailure::GraphEdgeMismatch => write!(f, "graph edges not covered exactly"),
            EmbeddingFailure::VertexSetMismatch => write!(f, "vertex sets differ"),
            EmbeddingFailure::RimOrderMismatch { expected, found } => {
                write!(
                    f,
                    "rim order mismatch: expected {expected:?}, found {found:?}"
                )
            }
            EmbeddingFailure::RimEdgesInconsistent => write!(f, "rim edges inconsistent"),
            EmbeddingFailure::EulerCheckFailed {
                component_vertices,
                component_edges,
                component_faces,
            } => write!(
                f,
                "Euler check failed: V={component_vertices} E={component_edges} F={component_faces}"
            ),
            EmbeddingFailure::RimNotAFace => write!(f, "rim does not bound a traced face"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub failures: Vec<EmbeddingFailure>,
}

impl EmbeddingReport {
    pub fn accepted(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Independent check of a disc embedding against an instance.
pub fn verify_embedding(inst: &Instance, emb: &DiscEmbedding) -> EmbeddingReport {
    let mut report = EmbeddingReport::default();

    // (a) edge and vertex cover.
    let graph_edges: BTreeSet<(VertexId, VertexId)> = emb
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::Graph)
        .map(|e| (e.a, e.b))
        .collect();
    let expected_edges: BTreeSet<(VertexId, VertexId)> = inst.graph.edges().collect();
    let graph_edge_count = emb
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::Graph)
        .count();
    if graph_edges != expected_edges || graph_edge_count != expected_edges.len() {
        report.failures.push(EmbeddingFailure::GraphEdgeMismatch);
    }
    let rot_verts: BTreeSet<VertexId> = emb.rotation.keys().copied().collect();
    if rot_verts != inst.graph.vertex_set() {
        report.failures.push(EmbeddingFailure::VertexSetMismatch);
    }

    // (d) rim order.
    let expected_rim = DiscEmbedding::prescribed_rim(inst);
    if emb.rim != expected_rim {
        report.failures.push(EmbeddingFailure::RimOrderMismatch {
            expected: expected_rim,
            found: emb.rim.clone(),
        });
    }

    // Rim edge bookkeeping.
    let m = emb.rim.len();
    let rim_ok = emb.rim_edges.len() == m
        && emb.rim_edges.iter().enumerate().all(|(p, &e)| {
            emb.edges.get(e).is_some_and(|edge| {
                edge.kind == EdgeKind::Rim
                    && BTreeSet::from([edge.a, edge.b])
                        == BTreeSet::from([emb.rim[p], emb.rim[(p + 1) % m]])
            })
        })
        && emb
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EdgeKind::Rim)
            .map(|(id, _)| id)
            .collect::<BTreeSet<_>>()
            == emb.rim_edges.iter().copied().collect::<BTreeSet<_>>()
        && emb.rim_edges.iter().collect::<BTreeSet<_>>().len() == m;
    if !rim_ok {
        report.failures.push(EmbeddingFailure::RimEdgesInconsistent);
    }

    // (b) + (c): face tracing, Euler per component, rim face.
    let faces = match emb.trace_faces() {
        Ok(fs) => fs,
        Err(e) => {
            report
                .failures
                .push(EmbeddingFailure::MalformedRotation(e.to_string()));
            return report;
        }
    };
    let comp = emb.components();
    let comp_count = comp.values().copied().collect::<BTreeSet<_>>().len();
    let mut verts_of = vec![0usize; comp_count];
    let mut edges_of = vec![0usize; comp_count];
    let mut faces_of = vec![0usize; comp_count];
    for (&x, &c) in &comp {
        let _ = x;
        verts_of[c] += 1;
    }
    for e in &emb.edges {
        edges_of[comp[&e.a]] += 1;
    }
    for f in &faces {
        let c = comp[&emb.edges[f[0].edge].a];
        faces_of[c] += 1;
    }
    for c in 0..comp_count {
        let (vc, ec, fc) = (verts_of[c], edges_of[c], faces_of[c]);
        let euler_ok = if ec == 0 {
            vc == 1 // isolated vertex: sphere with one face, not traced
        } else {
            vc as i64 - ec as i64 + fc as i64 == 2
        };
        if !euler_ok {
            report.failures.push(EmbeddingFailure::EulerCheckFailed {
                component_vertices: vc,
                component_edges: ec,
                component_faces: fc,
            });
        }
    }
    if rim_ok && emb.rim_face_index(&faces).is_none() {
        report.failures.push(EmbeddingFailure::RimNotAFace);
    }
    report
}

/// Embedding of an edgeless instance: the augmented graph is exactly the
/// rim cycle.
pub fn base_embedding(inst: &Instance) -> Result<DiscEmbedding, EmbeddingError> {
    if inst.graph.edge_count() != 0 {
        return Err(EmbeddingError::NonemptyEdges);
    }
    let rim = DiscEmbedding::prescribed_rim(inst);
    Ok(rim_only_embedding(&rim))
}

/// Rotation-system cycle through `rim`; rim length 2 uses two
/// distinguished parallel rim edges.
fn rim_only_embedding(rim: &[VertexId]) -> DiscEmbedding {
    let m = rim.len();
    debug_assert!(m >= 2, "rim needs at least one source and one sink");
    let edges: Vec<EmbEdge> = (0..m)
        .map(|p| EmbEdge {
            a: rim[p],
            b: rim[(p + 1) % m],
            kind: EdgeKind::Rim,
        })
        .collect();
    let rotation = (0..m).map(|p| (rim[p], vec![(p + m - 1) % m, p])).collect();
    DiscEmbedding {
        edges,
        rotation,
        rim: rim.to_vec(),
        rim_edges: (0..m).collect(),
    }
}

/// Inserts edge `u -> w` (or a rim edge) into the first traced face, in
/// deterministic order, that has corners at both `u` and `w` and is not the
/// rim face. Splits that face in two, preserving planarity and the rim face.
fn insert_chord(
    emb: &mut DiscEmbedding,
    u: VertexId,
    w: VertexId,
    kind: EdgeKind,
) -> Result<(), EmbeddingError> {
    let faces = emb.trace_faces()?;
    let rim_face = emb.rim_face_index(&faces);
    for (fi, face) in faces.iter().enumerate() {
        if Some(fi) == rim_face {
            continue;
        }
        let corner_u = face.iter().position(|&d| emb.dart_target(d) == u);
        let corner_w = face.iter().position(|&d| emb.dart_target(d) == w);
        let (Some(cu), Some(cw)) = (corner_u, corner_w) else {
            continue;
        };
        let new_id = emb.edges.len();
        emb.edges.push(EmbEdge { a: u, b: w, kind });
        let arr_u = face[cu].edge;
        let arr_w = face[cw].edge;
        for (x, arrived_via) in [(u, arr_u), (w, arr_w)] {
            let rot = emb.rotation.get_mut(&x).unwrap();
            let pos = rot.iter().position(|&e| e == arrived_via).unwrap();
            rot.insert(pos + 1, new_id);
        }
        return Ok(());
    }
    Err(EmbeddingError::NoFaceForChord(u, w))
}

/// Identifies two discs along their shared rim edge {s_i, t_j}, removes the
/// seam edge, and optionally re-inserts the directed graph edge s_i -> t_j
/// along the former seam.
///
/// `left` has terminal sequences (s_1..s_i), (t_1..t_j); `right` has
/// (s_i..s_k), (t_j..t_l); s_i and t_j are their only shared vertices.
pub fn glue_embeddings(
    left: &DiscEmbedding,
    right: &DiscEmbedding,
    shared: (VertexId, VertexId),
    st_edge: bool,
) -> Result<DiscEmbedding, EmbeddingError> {
    let (si, tj) = shared;
    let lm = left.rim.len();
    let rm = right.rim.len();
    // Left rim must run ..., s_i, t_j, ...; right rim must start at s_i and
    // end at t_j so its wrap edge is the seam.
    let lpos = left
        .rim
        .iter()
        .position(|&x| x == si)
        .ok_or(EmbeddingError::RimMismatch(si, tj))?;
    if left.rim[(lpos + 1) % lm] != tj
        || right.rim.first() != Some(&si)
        || right.rim.last() != Some(&tj)
    {
        return Err(EmbeddingError::RimMismatch(si, tj));
    }
    let seam_left = left.rim_edges[lpos];
    let seam_right = right.rim_edges[rm - 1];

    // Re-number: left edges keep their ids minus the seam, right edges are
    // appended. usize::MAX marks the dropped seam edges.
    let mut edges: Vec<EmbEdge> = Vec::with_capacity(left.edges.len() + right.edges.len() - 2);
    let mut left_map = vec![usize::MAX; left.edges.len()];
    for (id, e) in left.edges.iter().enumerate() {
        if id != seam_left {
            left_map[id] = edges.len();
            edges.push(*e);
        }
    }
    let mut right_map = vec![usize::MAX; right.edges.len()];
    for (id, e) in right.edges.iter().enumerate() {
        if id != seam_right {
            right_map[id] = edges.len();
            edges.push(*e);
        }
    }

    let mut rotation: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    for (&x, rot) in &left.rotation {
        if x == si || x == tj {
            continue;
        }
        rotation.insert(x, rot.iter().map(|&e| left_map[e]).collect());
    }
    for (&x, rot) in &right.rotation {
        if x == si || x == tj {
            continue;
        }
        debug_assert!(!rotation.contains_key(&x), "discs share only the seam ends");
        rotation.insert(x, rot.iter().map(|&e| right_map[e]).collect());
    }
    // At the shared vertices, replace the seam edge in the left rotation by
    // the right rotation read cyclically from just after its seam edge.
    for x in [si, tj] {
        let lrot = &left.rotation[&x];
        let rrot = &right.rotation[&x];
        let rpos = rrot
            .iter()
            .position(|&e| e == seam_right)
            .ok_or(EmbeddingError::RimMismatch(si, tj))?;
        let mut spliced = Vec::with_capacity(lrot.len() + rrot.len() - 2);
        for &e in lrot {
            if e == seam_left {
                for off in 1..rrot.len() {
                    spliced.push(right_map[rrot[(rpos + off) % rrot.len()]]);
                }
            } else {
                spliced.push(left_map[e]);
            }
        }
        rotation.insert(x, spliced);
    }

    // Combined rim: s_1..s_i, (right rim minus its first vertex), t_{j-1}..t_1.
    let mut rim: Vec<VertexId> = left.rim[..=lpos].to_vec();
    rim.extend_from_slice(&right.rim[1..]);
    rim.extend_from_slice(&left.rim[lpos + 2..]);
    let mut rim_edge_ids: Vec<EdgeId> = left.rim_edges[..lpos]
        .iter()
        .map(|&e| left_map[e])
        .collect();
    rim_edge_ids.extend(right.rim_edges[..rm - 1].iter().map(|&e| right_map[e]));
    rim_edge_ids.extend(left.rim_edges[lpos + 1..].iter().map(|&e| left_map[e]));

    let mut glued = DiscEmbedding {
        edges,
        rotation,
        rim,
        rim_edges: rim_edge_ids,
    };
    if st_edge {
        insert_chord(&mut glued, si, tj, EdgeKind::Graph)?;
    }
    Ok(glued)
}

/// Moves the fan vertex `v` off the rim into the interior, re-inserts the
/// deleted intermediate sources on the rim in its place, and draws the fan
/// edges into `v` without crossings.
///
/// `emb` embeds the contracted instance, with `v` on the rim between `s_h`
/// and `s_j`. `intermediates` are the deleted sources s_{h+1}..s_{j-1} in
/// sequence order; `fan_edges` are the source endpoints of the edges into
/// `v` to draw (s_h and s_j plus the intermediates with an edge to `v`).
pub fn extend_embedding_fan(
    emb: &DiscEmbedding,
    v: VertexId,
    s_h: VertexId,
    s_j: VertexId,
    intermediates: &[VertexId],
    fan_edges: &[VertexId],
) -> Result<DiscEmbedding, EmbeddingError> {
    let m = emb.rim.len();
    let vpos = emb
        .rim
        .iter()
        .position(|&x| x == v)
        .ok_or(EmbeddingError::NotOnRim(v))?;
    if emb.rim[(vpos + m - 1) % m] != s_h || emb.rim[(vpos + 1) % m] != s_j {
        return Err(EmbeddingError::NotOnRim(v));
    }
    let p_edge = emb.rim_edges[(vpos + m - 1) % m]; // {s_h, v}
    let q_edge = emb.rim_edges[vpos]; // {v, s_j}

    // Drop the two rim edges at v, keep everything else.
    let mut edges = Vec::with_capacity(emb.edges.len());
    let mut map = vec![usize::MAX; emb.edges.len()];
    for (id, e) in emb.edges.iter().enumerate() {
        if id != p_edge && id != q_edge {
            map[id] = edges.len();
            edges.push(*e);
        }
    }
    // New rim path s_h, w_1, .., w_c, s_j.
    let mut path = vec![s_h];
    path.extend_from_slice(intermediates);
    path.push(s_j);
    let new_rim_ids: Vec<EdgeId> = (0..path.len() - 1)
        .map(|p| {
            edges.push(EmbEdge {
                a: path[p],
                b: path[p + 1],
                kind: EdgeKind::Rim,
            });
            edges.len() - 1
        })
        .collect();

    let mut rotation: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    for (&x, rot) in &emb.rotation {
        let new_rot: Vec<EdgeId> = rot
            .iter()
            .map(|&e| {
                if e == p_edge {
                    if x == s_h {
                        new_rim_ids[0]
                    } else {
                        usize::MAX // dropped at v
                    }
                } else if e == q_edge {
                    if x == s_j {
                        *new_rim_ids.last().unwrap()
                    } else {
                        usize::MAX
                    }
                } else {
                    map[e]
                }
            })
            .filter(|&e| e != usize::MAX)
            .collect();
        rotation.insert(x, new_rot);
    }
    for (idx, &w) in intermediates.iter().enumerate() {
        rotation.insert(w, vec![new_rim_ids[idx], new_rim_ids[idx + 1]]);
    }

    // Rim: replace v with the intermediates.
    let mut rim: Vec<VertexId> = Vec::with_capacity(m - 1 + intermediates.len());
    let mut rim_edge_ids: Vec<EdgeId> = Vec::with_capacity(rim.capacity());
    for p in 0..m {
        if p == vpos {
            rim.extend_from_slice(intermediates);
            rim_edge_ids.extend(&new_rim_ids[1..]);
            continue;
        }
        rim.push(emb.rim[p]);
        if p == (vpos + m - 1) % m {
            rim_edge_ids.push(new_rim_ids[0]);
        } else {
            rim_edge_ids.push(map[emb.rim_edges[p]]);
        }
    }
    // Canonical start: the combined rim should begin at the same vertex the
    // old one did, unless v itself was first.
    let mut extended = DiscEmbedding {
        edges,
        rotation,
        rim,
        rim_edges: rim_edge_ids,
    };

    for &s in fan_edges {
        insert_chord(&mut extended, s, v, EdgeKind::Graph)?;
    }
    Ok(extended)
}

/// Normalizes the rim to start at a given vertex (rotating `rim` and
/// `rim_edges` together). Used by the solver so emitted embeddings start at
/// s_1.
pub fn rotate_rim_to_start(emb: &mut DiscEmbedding, first: VertexId) {
    if let Some(pos) = emb.rim.iter().position(|&x| x == first) {
        emb.rim.rotate_left(pos);
        emb.rim_edges.rotate_left(pos);
    }
}
