//! Certifying solver for the 2-linkage / cross dichotomy in acyclic
//! digraphs.
//!
//! For a canonical instance (sources and sinks are exactly the terminal
//! sequences, every internal vertex has in- and out-degree at least two)
//! the solver returns exactly one of:
//!
//! * a [`cross::CrossCertificate`]: two vertex-disjoint terminal dipaths
//!   whose source and sink indices are inversely ordered, or
//! * a [`embedding::DiscEmbedding`]: a planar rotation system of the graph
//!   plus a rim cycle witnessing that the graph can be drawn in a closed
//!   disc with the terminals on the boundary in prescribed order.
//!
//! Both certificate kinds come with independent verifiers, and the
//! [`oracle`] module provides exhaustive ground truth for small instances.
//! General four-terminal instances are reduced to canonical form by
//! [`normalize`] and certificates are lifted back through the reduction
//! trace.

pub mod cross;
pub mod dipath;
pub mod embedding;
pub mod engine;
pub mod fixtures;
pub mod generator;
pub mod graph;
pub mod instance;
pub mod normalize;
pub mod oracle;
