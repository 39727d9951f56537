//! Canonical linkage instances: a digraph plus ordered terminal sequences.

use crate::graph::{Digraph, VertexId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// How strictly the terminal/degree conditions are enforced.
///
/// `Strict` is the public entry contract. `Relaxed` admits isolated
/// terminals, which arise inside the recursion when a reduction strands a
/// source or sink with no remaining edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strictness {
    Strict,
    Relaxed,
}

/// A digraph with ordered source and sink sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub graph: Digraph,
    pub sources: Vec<VertexId>,
    pub sinks: Vec<VertexId>,
    pub strictness: Strictness,
}

/// One violated validity condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Cyclic {
        cycle: Vec<VertexId>,
    },
    DuplicateTerminal(VertexId),
    SourceSinkOverlap(VertexId),
    TerminalNotInGraph(VertexId),
    SourceHasInEdge(VertexId),
    SinkHasOutEdge(VertexId),
    /// An in-degree-0 (resp. out-degree-0) non-isolated vertex missing from
    /// the source (resp. sink) sequence.
    MissingSource(VertexId),
    MissingSink(VertexId),
    IsolatedVertexUnlisted(VertexId),
    InternalInDegree {
        vertex: VertexId,
        degree: usize,
    },
    InternalOutDegree {
        vertex: VertexId,
        degree: usize,
    },
    /// Strict mode only: an isolated vertex cannot satisfy both the source
    /// and sink exactness conditions.
    IsolatedVertexInStrict(VertexId),
    EmptySources,
    EmptySinks,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cyclic { cycle } => write!(f, "graph has a directed cycle {cycle:?}"),
            Violation::DuplicateTerminal(x) => write!(f, "terminal {x} listed twice"),
            Violation::SourceSinkOverlap(x) => write!(f, "{x} is both a source and a sink"),
            Violation::TerminalNotInGraph(x) => write!(f, "terminal {x} is not a vertex"),
            Violation::SourceHasInEdge(x) => write!(f, "source {x} has an in-edge"),
            Violation::SinkHasOutEdge(x) => write!(f, "sink {x} has an out-edge"),
            Violation::MissingSource(x) => write!(f, "in-degree-0 vertex {x} not listed as source"),
            Violation::MissingSink(x) => write!(f, "out-degree-0 vertex {x} not listed as sink"),
            Violation::IsolatedVertexUnlisted(x) => {
                write!(f, "isolated vertex {x} not listed as a terminal")
            }
            Violation::InternalInDegree { vertex, degree } => {
                write!(f, "internal vertex {vertex} has in-degree {degree}")
            }
            Violation::InternalOutDegree { vertex, degree } => {
                write!(f, "internal vertex {vertex} has out-degree {degree}")
            }
            Violation::IsolatedVertexInStrict(x) => {
                write!(f, "isolated vertex {x} is also a sink, S and T overlap")
            }
            Violation::EmptySources => write!(f, "source sequence is empty"),
            Violation::EmptySinks => write!(f, "sink sequence is empty"),
        }
    }
}

/// Result of [`Instance::validate`]: empty iff the instance satisfies its
/// declared strictness mode.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, viol) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{viol}")?;
        }
        Ok(())
    }
}

impl Instance {
    pub fn new(
        graph: Digraph,
        sources: Vec<VertexId>,
        sinks: Vec<VertexId>,
        strictness: Strictness,
    ) -> Self {
        Instance {
            graph,
            sources,
            sinks,
            strictness,
        }
    }

    /// The internal vertex set C = V \ (S u T).
    pub fn core_set(&self) -> BTreeSet<VertexId> {
        let terminals: BTreeSet<VertexId> = self
            .sources
            .iter()
            .chain(self.sinks.iter())
            .copied()
            .collect();
        self.graph
            .vertices()
            .filter(|x| !terminals.contains(x))
            .collect()
    }

    pub fn is_source(&self, x: VertexId) -> bool {
        self.sources.contains(&x)
    }

    pub fn is_sink(&self, x: VertexId) -> bool {
        self.sinks.contains(&x)
    }

    /// 1-based index of `x` in the source sequence.
    pub fn source_index(&self, x: VertexId) -> Option<usize> {
        self.sources.iter().position(|&s| s == x).map(|p| p + 1)
    }

    /// 1-based index of `x` in the sink sequence.
    pub fn sink_index(&self, x: VertexId) -> Option<usize> {
        self.sinks.iter().position(|&t| t == x).map(|p| p + 1)
    }

    /// Checks every validity condition of the declared strictness mode and
    /// reports all violations (never fails).
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let g = &self.graph;

        if let Err(crate::graph::GraphError::CyclicGraph { cycle }) = g.topological_order() {
            report.violations.push(Violation::Cyclic { cycle });
        }
        if self.sources.is_empty() {
            report.violations.push(Violation::EmptySources);
        }
        if self.sinks.is_empty() {
            report.violations.push(Violation::EmptySinks);
        }

        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for &x in self.sources.iter().chain(self.sinks.iter()) {
            if !seen.insert(x) {
                report.violations.push(Violation::DuplicateTerminal(x));
            }
            if !g.contains(x) {
                report.violations.push(Violation::TerminalNotInGraph(x));
            }
        }
        let src_set: BTreeSet<VertexId> = self.sources.iter().copied().collect();
        let sink_set: BTreeSet<VertexId> = self.sinks.iter().copied().collect();
        for &x in src_set.intersection(&sink_set) {
            report.violations.push(Violation::SourceSinkOverlap(x));
        }

        for x in g.vertices() {
            let ind = g.in_degree(x);
            let outd = g.out_degree(x);
            let isolated = ind == 0 && outd == 0;
            let listed_src = src_set.contains(&x);
            let listed_sink = sink_set.contains(&x);
            if listed_src && ind > 0 {
                report.violations.push(Violation::SourceHasInEdge(x));
            }
            if listed_sink && outd > 0 {
                report.violations.push(Violation::SinkHasOutEdge(x));
            }
            if isolated {
                match self.strictness {
                    Strictness::Strict => {
                        // An isolated vertex is simultaneously a source and a
                        // sink; exact source/sink sets cannot both hold.
                        report.violations.push(Violation::IsolatedVertexInStrict(x));
                    }
                    Strictness::Relaxed => {
                        if !listed_src && !listed_sink {
                            report.violations.push(Violation::IsolatedVertexUnlisted(x));
                        }
                    }
                }
                continue;
            }
            if ind == 0 && !listed_src {
                report.violations.push(Violation::MissingSource(x));
            }
            if outd == 0 && !listed_sink {
                report.violations.push(Violation::MissingSink(x));
            }
            if !listed_src && !listed_sink {
                if ind < 2 {
                    report.violations.push(Violation::InternalInDegree {
                        vertex: x,
                        degree: ind,
                    });
                }
                if outd < 2 {
                    report.violations.push(Violation::InternalOutDegree {
                        vertex: x,
                        degree: outd,
                    });
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::v;

    #[test]
    fn fan_is_strict_valid() {
        assert!(fixtures::i_fan().validate().is_ok());
    }

    #[test]
    fn fan_missing_edge_breaks_degree() {
        let mut inst = fixtures::i_fan();
        inst.graph = inst.graph.without_edge(v(1), v(2));
        let report = inst.validate();
        assert!(report.violations.contains(&Violation::InternalInDegree {
            vertex: v(2),
            degree: 1
        }));
    }

    #[test]
    fn isolated_vertex_relaxed_vs_strict() {
        let g = Digraph::new([v(0), v(1), v(2), v(3), v(9)], [(v(0), v(2)), (v(1), v(3))]).unwrap();
        let relaxed = Instance::new(
            g.clone(),
            vec![v(0), v(1), v(9)],
            vec![v(2), v(3)],
            Strictness::Relaxed,
        );
        assert!(relaxed.validate().is_ok());
        let strict = Instance::new(
            g,
            vec![v(0), v(1), v(9)],
            vec![v(2), v(3)],
            Strictness::Strict,
        );
        let report = strict.validate();
        assert!(report
            .violations
            .contains(&Violation::IsolatedVertexInStrict(v(9))));
    }

    #[test]
    fn all_fixtures_validate() {
        for inst in fixtures::all_strict() {
            assert!(inst.validate().is_ok(), "{:?}", inst.validate());
        }
    }

    #[test]
    fn every_vertex_on_a_terminal_path_in_strict_instances() {
        use crate::graph::Direction;
        for inst in fixtures::all_strict() {
            let srcs: BTreeSet<VertexId> = inst.sources.iter().copied().collect();
            let sinks: BTreeSet<VertexId> = inst.sinks.iter().copied().collect();
            let fwd = inst.graph.reach_set(&srcs, Direction::Forward).unwrap();
            let bwd = inst.graph.reach_set(&sinks, Direction::Backward).unwrap();
            for x in inst.graph.vertices() {
                assert!(
                    fwd.contains(&x) && bwd.contains(&x),
                    "{x} off all S-T paths"
                );
            }
        }
    }
}
