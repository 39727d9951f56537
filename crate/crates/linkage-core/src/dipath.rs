//! Directed paths.

use crate::graph::{Digraph, VertexId};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A nonempty directed path, stored as its vertex sequence.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dipath(pub Vec<VertexId>);

impl fmt::Debug for Dipath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dipath{:?}", self.0)
    }
}

impl Dipath {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty());
        Dipath(vertices)
    }

    pub fn single(x: VertexId) -> Self {
        Dipath(vec![x])
    }

    pub fn first(&self) -> VertexId {
        *self.0.first().expect("dipath is nonempty")
    }

    pub fn last(&self) -> VertexId {
        *self.0.last().expect("dipath is nonempty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.0.contains(&x)
    }

    /// Valid in `g`: nonempty, consecutive pairs are edges, no repeats.
    pub fn is_valid_in(&self, g: &Digraph) -> bool {
        if self.0.is_empty() {
            return false;
        }
        let mut seen = std::collections::BTreeSet::new();
        for &x in &self.0 {
            if !g.contains(x) || !seen.insert(x) {
                return false;
            }
        }
        self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    pub fn is_disjoint_from(&self, other: &Dipath) -> bool {
        self.0.iter().all(|x| !other.contains(*x))
    }

    /// New path with `x` prepended.
    pub fn prepended(&self, x: VertexId) -> Dipath {
        let mut vs = Vec::with_capacity(self.len() + 1);
        vs.push(x);
        vs.extend_from_slice(&self.0);
        Dipath(vs)
    }

    /// Concatenation where `self` ends at the vertex `other` starts at.
    pub fn joined(&self, other: &Dipath) -> Dipath {
        debug_assert_eq!(self.last(), other.first());
        let mut vs = self.0.clone();
        vs.extend_from_slice(&other.0[1..]);
        Dipath(vs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::v;

    #[test]
    fn validity() {
        let g = fixtures::i_fan().graph;
        assert!(Dipath::new(vec![v(0), v(2), v(3)]).is_valid_in(&g));
        assert!(!Dipath::new(vec![v(0), v(3)]).is_valid_in(&g));
        assert!(!Dipath::new(vec![v(0), v(2), v(3), v(3)]).is_valid_in(&g));
        assert!(Dipath::single(v(0)).is_valid_in(&g));
        assert!(!Dipath::single(v(42)).is_valid_in(&g));
    }

    #[test]
    fn join_and_prepend() {
        let a = Dipath::new(vec![v(0), v(2)]);
        let b = Dipath::new(vec![v(2), v(3)]);
        assert_eq!(a.joined(&b), Dipath::new(vec![v(0), v(2), v(3)]));
        assert_eq!(b.prepended(v(0)), Dipath::new(vec![v(0), v(2), v(3)]));
    }
}
