//! Small named instances used throughout the test suites and documentation.
//!
//! Vertex ids are assigned left to right: sources first, then internal
//! vertices, then sinks.

use crate::graph::{v, Digraph, VertexId};
use crate::instance::{Instance, Strictness};

/// s1,s2 -> v -> t1,t2. Drawable; every S-T dipath passes through `v`.
///
/// Ids: s1=0, s2=1, v=2, t1=3, t2=4.
pub fn i_fan() -> Instance {
    let g = Digraph::new(
        (0..5).map(v),
        [(v(0), v(2)), (v(1), v(2)), (v(2), v(3)), (v(2), v(4))],
    )
    .unwrap();
    Instance::new(g, vec![v(0), v(1)], vec![v(3), v(4)], Strictness::Strict)
}

/// Two crossing single-edge dipaths: s1->t2, s2->t1.
///
/// Ids: s1=0, s2=1, t1=2, t2=3.
pub fn i_cross() -> Instance {
    let g = Digraph::new((0..4).map(v), [(v(0), v(3)), (v(1), v(2))]).unwrap();
    Instance::new(g, vec![v(0), v(1)], vec![v(2), v(3)], Strictness::Strict)
}

/// Drawable instance with two internal vertices u, v.
///
/// Ids: s1=0, s2=1, u=2, v=3, t1=4, t2=5.
/// Edges: s1->u, s2->u, u->v, s2->v, u->t1, v->t1, v->t2.
pub fn i_planar4() -> Instance {
    let g = Digraph::new(
        (0..6).map(v),
        [
            (v(0), v(2)),
            (v(1), v(2)),
            (v(2), v(3)),
            (v(1), v(3)),
            (v(2), v(4)),
            (v(3), v(4)),
            (v(3), v(5)),
        ],
    )
    .unwrap();
    Instance::new(g, vec![v(0), v(1)], vec![v(4), v(5)], Strictness::Strict)
}

/// Drawable instance with an S-T edge s1->t1 next to a fan.
///
/// Ids: s1=0, s2=1, v=2, t1=3, t2=4.
/// Edges: s1->t1, s1->v, s2->v, v->t1, v->t2.
pub fn i_glue() -> Instance {
    let g = Digraph::new(
        (0..5).map(v),
        [
            (v(0), v(3)),
            (v(0), v(2)),
            (v(1), v(2)),
            (v(2), v(3)),
            (v(2), v(4)),
        ],
    )
    .unwrap();
    Instance::new(g, vec![v(0), v(1)], vec![v(3), v(4)], Strictness::Strict)
}

/// Three sources with a non-contiguous fan at v; contains a cross.
///
/// Ids: s1=0, s2=1, s3=2, v=3, u=4, t1=5, t2=6.
/// Edges: s1->v, s3->v, v->u, v->t1, s2->u, u->t1, u->t2.
pub fn i_fan3() -> Instance {
    let g = Digraph::new(
        (0..7).map(v),
        [
            (v(0), v(3)),
            (v(2), v(3)),
            (v(3), v(4)),
            (v(3), v(5)),
            (v(1), v(4)),
            (v(4), v(5)),
            (v(4), v(6)),
        ],
    )
    .unwrap();
    Instance::new(
        g,
        vec![v(0), v(1), v(2)],
        vec![v(5), v(6)],
        Strictness::Strict,
    )
}

/// Complete bipartite orientation from {s1,s2} to {t1,t2}.
///
/// Ids: s1=0, s2=1, t1=2, t2=3.
pub fn i_k22() -> Instance {
    let g = Digraph::new(
        (0..4).map(v),
        [(v(0), v(2)), (v(0), v(3)), (v(1), v(2)), (v(1), v(3))],
    )
    .unwrap();
    Instance::new(g, vec![v(0), v(1)], vec![v(2), v(3)], Strictness::Strict)
}

/// All strict fixtures, for sweep-style tests.
pub fn all_strict() -> Vec<Instance> {
    vec![i_fan(), i_cross(), i_planar4(), i_glue(), i_fan3(), i_k22()]
}

/// Readable names matching [`all_strict`] order.
pub fn all_strict_names() -> Vec<&'static str> {
    vec!["i_fan", "i_cross", "i_planar4", "i_glue", "i_fan3", "i_k22"]
}

/// Vertices 0..n in id order, convenience for tests.
pub fn ids(n: u32) -> Vec<VertexId> {
    (0..n).map(v).collect()
}
