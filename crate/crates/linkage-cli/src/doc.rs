//! On-disk document formats and their mapping onto the solver types.
//!
//! Graphs travel as JSON with explicit *ordered* terminal arrays — terminal
//! order carries meaning here, so sets would be wrong. A minimal DOT import
//! is accepted as an alternative input syntax. Certificates are
//! self-contained: they can be checked against the graph document alone.

use linkage_core::cross::CrossCertificate;
use linkage_core::dipath::Dipath;
use linkage_core::embedding::{DiscEmbedding, EdgeKind, EmbEdge};
use linkage_core::graph::{Digraph, VertexId};
use linkage_core::instance::{Instance, Strictness};
use linkage_core::normalize::{GeneralInstance, ReductionStep, ReductionTrace, RemovalReason};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const GRAPH_FORMAT: &str = "linkage-graph/1";
pub const CERT_FORMAT: &str = "linkage-cert/1";

#[derive(Debug)]
pub struct DocError(pub String);

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn err(msg: impl Into<String>) -> DocError {
    DocError(msg.into())
}

// ---------------------------------------------------------------------------
// Graph documents.

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TerminalsDoc {
    pub a: String,
    pub b: String,
    pub c: String,
    pub d: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphDocument {
    pub format: String,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    /// Ordered source sequence (canonical mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<Vec<String>>,
    /// Ordered sink sequence (canonical mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sinks: Option<Vec<String>>,
    /// Four named terminals (general mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<TerminalsDoc>,
}

/// Bidirectional label <-> vertex-id mapping; ids are positions in the
/// document's vertex list.
pub struct LabelMap {
    labels: Vec<String>,
    ids: BTreeMap<String, VertexId>,
}

impl LabelMap {
    pub fn new(labels: &[String]) -> Result<Self, DocError> {
        let mut ids = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if ids.insert(l.clone(), VertexId(i as u32)).is_some() {
                return Err(err(format!("duplicate vertex label {l:?}")));
            }
        }
        Ok(LabelMap {
            labels: labels.to_vec(),
            ids,
        })
    }

    pub fn id(&self, label: &str) -> Result<VertexId, DocError> {
        self.ids
            .get(label)
            .copied()
            .ok_or_else(|| err(format!("unknown vertex label {label:?}")))
    }

    pub fn label(&self, x: VertexId) -> Result<&str, DocError> {
        self.labels
            .get(x.0 as usize)
            .map(String::as_str)
            .ok_or_else(|| err(format!("vertex {x} has no label")))
    }

    pub fn labels_of(
        &self,
        xs: impl IntoIterator<Item = VertexId>,
    ) -> Result<Vec<String>, DocError> {
        xs.into_iter()
            .map(|x| self.label(x).map(str::to_owned))
            .collect()
    }

    pub fn path(&self, labels: &[String]) -> Result<Dipath, DocError> {
        if labels.is_empty() {
            return Err(err("empty path"));
        }
        Ok(Dipath::new(
            labels
                .iter()
                .map(|l| self.id(l))
                .collect::<Result<Vec<_>, _>>()?,
        ))
    }
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        if text.trim_start().starts_with("digraph") {
            return parse_dot(text);
        }
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| err(format!("graph document: {e}")))?;
        if doc.format != GRAPH_FORMAT {
            return Err(err(format!(
                "unsupported graph format {:?}, expected {GRAPH_FORMAT:?}",
                doc.format
            )));
        }
        Ok(doc)
    }

    pub fn serialize(&self) -> String {
        let mut s = serde_json::to_string(self).expect("graph documents serialize");
        s.push('\n');
        s
    }

    pub fn label_map(&self) -> Result<LabelMap, DocError> {
        LabelMap::new(&self.vertices)
    }

    fn digraph(&self, map: &LabelMap) -> Result<Digraph, DocError> {
        let edges = self
            .edges
            .iter()
            .map(|(a, b)| Ok((map.id(a)?, map.id(b)?)))
            .collect::<Result<Vec<_>, DocError>>()?;
        Digraph::new((0..self.vertices.len() as u32).map(VertexId), edges)
            .map_err(|e| err(format!("graph: {e}")))
    }

    /// Canonical-mode view: ordered sources and sinks must be present.
    pub fn to_instance(&self) -> Result<(Instance, LabelMap), DocError> {
        let map = self.label_map()?;
        let graph = self.digraph(&map)?;
        let sources = self
            .sources
            .as_ref()
            .ok_or_else(|| err("canonical mode needs a sources array"))?;
        let sinks = self
            .sinks
            .as_ref()
            .ok_or_else(|| err("canonical mode needs a sinks array"))?;
        let sources = sources
            .iter()
            .map(|l| map.id(l))
            .collect::<Result<Vec<_>, _>>()?;
        let sinks = sinks
            .iter()
            .map(|l| map.id(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((
            Instance::new(graph, sources, sinks, Strictness::Strict),
            map,
        ))
    }

    /// General-mode view: the four terminals must be present.
    pub fn to_general(&self) -> Result<(GeneralInstance, LabelMap), DocError> {
        let map = self.label_map()?;
        let graph = self.digraph(&map)?;
        let t = self
            .terminals
            .as_ref()
            .ok_or_else(|| err("general mode needs a terminals object"))?;
        Ok((
            GeneralInstance {
                graph,
                a: map.id(&t.a)?,
                b: map.id(&t.b)?,
                c: map.id(&t.c)?,
                d: map.id(&t.d)?,
            },
            map,
        ))
    }

    pub fn is_general(&self) -> bool {
        self.terminals.is_some() && self.sources.is_none()
    }

    pub fn from_instance(inst: &Instance, labels: &LabelMap) -> Result<Self, DocError> {
        Ok(GraphDocument {
            format: GRAPH_FORMAT.to_string(),
            vertices: labels.labels_of(inst.graph.vertices())?,
            edges: inst
                .graph
                .edges()
                .map(|(a, b)| Ok((labels.label(a)?.to_owned(), labels.label(b)?.to_owned())))
                .collect::<Result<Vec<_>, DocError>>()?,
            sources: Some(labels.labels_of(inst.sources.iter().copied())?),
            sinks: Some(labels.labels_of(inst.sinks.iter().copied())?),
            terminals: None,
        })
    }
}

/// Fresh labels v0, v1, .. for a graph produced in memory.
pub fn default_labels(n: usize) -> LabelMap {
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    LabelMap::new(&labels).expect("generated labels are unique")
}

// ---------------------------------------------------------------------------
// Minimal DOT import.
//
// Accepts `digraph name { ... }` with statements `a -> b;` and
// `a [role=source, index=1];`. Role/index attributes build the ordered
// terminal sequences.

fn parse_dot(text: &str) -> Result<GraphDocument, DocError> {
    let open = text.find('{').ok_or_else(|| err("dot: missing '{'"))?;
    let close = text.rfind('}').ok_or_else(|| err("dot: missing '}'"))?;
    let body = &text[open + 1..close];
    let mut vertices: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut sources: Vec<(u64, String)> = Vec::new();
    let mut sinks: Vec<(u64, String)> = Vec::new();
    let declare = |name: &str, vertices: &mut Vec<String>| {
        if !vertices.iter().any(|v| v == name) {
            vertices.push(name.to_string());
        }
    };
    for stmt in body.split(';') {
        let stmt = stmt.trim();
        if stmt.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = stmt.split_once("->") {
            let (a, b) = (lhs.trim(), rhs.trim());
            if a.is_empty() || b.is_empty() || b.contains("->") {
                return Err(err(format!("dot: malformed edge statement {stmt:?}")));
            }
            declare(a, &mut vertices);
            declare(b, &mut vertices);
            edges.push((a.to_string(), b.to_string()));
            continue;
        }
        // Node statement, optionally with [attr=value, ...].
        let (name, attrs) = match stmt.split_once('[') {
            Some((n, rest)) => {
                let rest = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("dot: unterminated attributes in {stmt:?}")))?;
                (n.trim(), rest)
            }
            None => (stmt, ""),
        };
        if name.is_empty() {
            return Err(err(format!("dot: malformed statement {stmt:?}")));
        }
        declare(name, &mut vertices);
        let mut role = None;
        let mut index = None;
        for attr in attrs.split(',') {
            let attr = attr.trim();
            if attr.is_empty() {
                continue;
            }
            let (k, v) = attr
                .split_once('=')
                .ok_or_else(|| err(format!("dot: malformed attribute {attr:?}")))?;
            match (k.trim(), v.trim().trim_matches('"')) {
                ("role", r) => role = Some(r.to_string()),
                ("index", n) => {
                    index = Some(
                        n.parse::<u64>()
                            .map_err(|_| err(format!("dot: bad index {n:?}")))?,
                    )
                }
                _ => {}
            }
        }
        match role.as_deref() {
            Some("source") => sources.push((index.unwrap_or(u64::MAX), name.to_string())),
            Some("sink") => sinks.push((index.unwrap_or(u64::MAX), name.to_string())),
            Some(other) => return Err(err(format!("dot: unknown role {other:?}"))),
            None => {}
        }
    }
    sources.sort();
    sinks.sort();
    Ok(GraphDocument {
        format: GRAPH_FORMAT.to_string(),
        vertices,
        edges,
        sources: Some(sources.into_iter().map(|(_, n)| n).collect()),
        sinks: Some(sinks.into_iter().map(|(_, n)| n).collect()),
        terminals: None,
    })
}

// ---------------------------------------------------------------------------
// Certificate documents.

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateDocument {
    pub format: String,
    #[serde(flatten)]
    pub payload: CertPayload,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertPayload {
    Cross {
        p: Vec<String>,
        p_other: Vec<String>,
        i: usize,
        j: usize,
        i_other: usize,
        j_other: usize,
    },
    Embedding {
        /// (a, b, kind) with kind "graph" or "rim"; ids are list positions.
        edges: Vec<(String, String, String)>,
        rotation: BTreeMap<String, Vec<usize>>,
        rim: Vec<String>,
        rim_edges: Vec<usize>,
    },
    Linkage {
        path_ac: Vec<String>,
        path_bd: Vec<String>,
        trace: Vec<TraceStepDoc>,
    },
    NoLinkage {
        reason: String,
        trace: Vec<TraceStepDoc>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum TraceStepDoc {
    DeleteVertex {
        vertex: String,
        reason: String,
    },
    DeleteEdge {
        from: String,
        to: String,
        reason: String,
    },
    ContractEdge {
        from: String,
        to: String,
        survivor: String,
    },
}

impl CertificateDocument {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        let doc: CertificateDocument =
            serde_json::from_str(text).map_err(|e| err(format!("certificate document: {e}")))?;
        if doc.format != CERT_FORMAT {
            return Err(err(format!(
                "unsupported certificate format {:?}, expected {CERT_FORMAT:?}",
                doc.format
            )));
        }
        Ok(doc)
    }

    pub fn serialize(&self) -> String {
        let mut s = serde_json::to_string(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn of(payload: CertPayload) -> Self {
        CertificateDocument {
            format: CERT_FORMAT.to_string(),
            payload,
        }
    }
}

fn reason_str(r: RemovalReason) -> &'static str {
    match r {
        RemovalReason::Unreachable => "unreachable",
        RemovalReason::CoUnreachable => "co-unreachable",
        RemovalReason::StartInEdge => "start-in-edge",
        RemovalReason::EndOutEdge => "end-out-edge",
    }
}

pub fn trace_to_doc(trace: &ReductionTrace, map: &LabelMap) -> Result<Vec<TraceStepDoc>, DocError> {
    trace
        .iter()
        .map(|step| {
            Ok(match *step {
                ReductionStep::DeleteVertex { vertex, reason } => TraceStepDoc::DeleteVertex {
                    vertex: map.label(vertex)?.to_owned(),
                    reason: reason_str(reason).to_owned(),
                },
                ReductionStep::DeleteEdge { from, to, reason } => TraceStepDoc::DeleteEdge {
                    from: map.label(from)?.to_owned(),
                    to: map.label(to)?.to_owned(),
                    reason: reason_str(reason).to_owned(),
                },
                ReductionStep::ContractEdge { from, to, survivor } => TraceStepDoc::ContractEdge {
                    from: map.label(from)?.to_owned(),
                    to: map.label(to)?.to_owned(),
                    survivor: map.label(survivor)?.to_owned(),
                },
            })
        })
        .collect()
}

pub fn cross_to_doc(cross: &CrossCertificate, map: &LabelMap) -> Result<CertPayload, DocError> {
    Ok(CertPayload::Cross {
        p: map.labels_of(cross.p.0.iter().copied())?,
        p_other: map.labels_of(cross.p_other.0.iter().copied())?,
        i: cross.i,
        j: cross.j,
        i_other: cross.i_other,
        j_other: cross.j_other,
    })
}

pub fn doc_to_cross(payload: &CertPayload, map: &LabelMap) -> Result<CrossCertificate, DocError> {
    let CertPayload::Cross {
        p,
        p_other,
        i,
        j,
        i_other,
        j_other,
    } = payload
    else {
        return Err(err("expected a cross certificate"));
    };
    Ok(CrossCertificate {
        p: map.path(p)?,
        p_other: map.path(p_other)?,
        i: *i,
        j: *j,
        i_other: *i_other,
        j_other: *j_other,
    })
}

pub fn embedding_to_doc(emb: &DiscEmbedding, map: &LabelMap) -> Result<CertPayload, DocError> {
    let edges = emb
        .edges
        .iter()
        .map(|e| {
            let kind = match e.kind {
                EdgeKind::Graph => "graph",
                EdgeKind::Rim => "rim",
            };
            Ok((
                map.label(e.a)?.to_owned(),
                map.label(e.b)?.to_owned(),
                kind.to_owned(),
            ))
        })
        .collect::<Result<Vec<_>, DocError>>()?;
    let rotation = emb
        .rotation
        .iter()
        .map(|(&x, rot)| Ok((map.label(x)?.to_owned(), rot.clone())))
        .collect::<Result<BTreeMap<_, _>, DocError>>()?;
    Ok(CertPayload::Embedding {
        edges,
        rotation,
        rim: map.labels_of(emb.rim.iter().copied())?,
        rim_edges: emb.rim_edges.clone(),
    })
}

pub fn doc_to_embedding(payload: &CertPayload, map: &LabelMap) -> Result<DiscEmbedding, DocError> {
    let CertPayload::Embedding {
        edges,
        rotation,
        rim,
        rim_edges,
    } = payload
    else {
        return Err(err("expected an embedding certificate"));
    };
    let edges = edges
        .iter()
        .map(|(a, b, kind)| {
            let kind = match kind.as_str() {
                "graph" => EdgeKind::Graph,
                "rim" => EdgeKind::Rim,
                other => return Err(err(format!("unknown edge kind {other:?}"))),
            };
            Ok(EmbEdge {
                a: map.id(a)?,
                b: map.id(b)?,
                kind,
            })
        })
        .collect::<Result<Vec<_>, DocError>>()?;
    let rotation = rotation
        .iter()
        .map(|(l, rot)| Ok((map.id(l)?, rot.clone())))
        .collect::<Result<BTreeMap<_, _>, DocError>>()?;
    let rim = rim
        .iter()
        .map(|l| map.id(l))
        .collect::<Result<Vec<_>, DocError>>()?;
    Ok(DiscEmbedding {
        edges,
        rotation,
        rim,
        rim_edges: rim_edges.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use linkage_core::fixtures;

    #[test]
    fn graph_documents_round_trip() {
        let map = default_labels(5);
        let doc = GraphDocument::from_instance(&fixtures::i_fan(), &map).unwrap();
        let text = doc.serialize();
        let back = GraphDocument::parse(&text).unwrap();
        assert_eq!(doc, back);
        assert_eq!(back.serialize(), text);
    }

    #[test]
    fn instances_survive_the_document_round_trip() {
        for inst in fixtures::all_strict() {
            let map = default_labels(inst.graph.vertex_count());
            let doc = GraphDocument::from_instance(&inst, &map).unwrap();
            let (back, _) = doc.to_instance().unwrap();
            assert_eq!(back.sources, inst.sources);
            assert_eq!(back.sinks, inst.sinks);
            assert_eq!(
                back.graph.edges().collect::<Vec<_>>(),
                inst.graph.edges().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn dot_import_builds_ordered_terminals() {
        let text = "digraph g {\n  t2 [role=sink, index=2];\n  t1 [role=sink, index=1];\n  s1 [role=source, index=1];\n  s2 [role=source, index=2];\n  s1 -> v; s2 -> v; v -> t1; v -> t2;\n}\n";
        let doc = GraphDocument::parse(text).unwrap();
        assert_eq!(
            doc.sources.as_deref(),
            Some(&["s1".to_string(), "s2".to_string()][..])
        );
        assert_eq!(
            doc.sinks.as_deref(),
            Some(&["t1".to_string(), "t2".to_string()][..])
        );
        assert_eq!(doc.edges.len(), 4);
        let (inst, _) = doc.to_instance().unwrap();
        assert!(inst.validate().is_ok());
    }

    #[test]
    fn dot_rejects_malformed_statements() {
        assert!(GraphDocument::parse("digraph g { a -> ; }").is_err());
        assert!(GraphDocument::parse("digraph g { a [role=chorus]; }").is_err());
        assert!(GraphDocument::parse("digraph g { a [role=source").is_err());
    }

    #[test]
    fn certificate_documents_round_trip() {
        let inst = fixtures::i_cross();
        let map = default_labels(4);
        let cross = match linkage_core::engine::solve(&inst).unwrap() {
            linkage_core::engine::SolveOutcome::Cross(c) => c,
            other => panic!("expected a cross, got {other:?}"),
        };
        let doc = CertificateDocument::of(cross_to_doc(&cross, &map).unwrap());
        let back = CertificateDocument::parse(&doc.serialize()).unwrap();
        assert_eq!(doc, back);
        let lifted = doc_to_cross(&back.payload, &map).unwrap();
        assert_eq!(lifted.p, cross.p);
        assert_eq!(lifted.i_other, cross.i_other);

        let emb = match linkage_core::engine::solve(&fixtures::i_fan()).unwrap() {
            linkage_core::engine::SolveOutcome::Embedding(e) => e,
            other => panic!("expected an embedding, got {other:?}"),
        };
        let map5 = default_labels(5);
        let edoc = CertificateDocument::of(embedding_to_doc(&emb, &map5).unwrap());
        let eback = CertificateDocument::parse(&edoc.serialize()).unwrap();
        let lifted = doc_to_embedding(&eback.payload, &map5).unwrap();
        assert_eq!(lifted.rim, emb.rim);
        assert_eq!(lifted.rotation, emb.rotation);
        assert_eq!(lifted.rim_edges, emb.rim_edges);
    }

    #[test]
    fn unknown_formats_are_refused() {
        assert!(GraphDocument::parse(
            "{\"format\":\"linkage-graph/9\",\"vertices\":[],\"edges\":[]}"
        )
        .is_err());
        assert!(CertificateDocument::parse("{\"format\":\"x\",\"kind\":\"cross\",\"p\":[],\"p_other\":[],\"i\":1,\"j\":1,\"i_other\":1,\"j_other\":1}").is_err());
    }
}
