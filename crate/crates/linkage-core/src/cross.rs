//! Cross certificates and their verifier.
//!
//! A cross is a pair of vertex-disjoint dipaths between the terminal
//! sequences whose source and sink indices are inversely ordered.

use crate::dipath::Dipath;
use crate::instance::Instance;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Two disjoint terminal-to-terminal dipaths in inverted index pattern.
///
/// Indices are 1-based positions in the instance's terminal sequences:
/// `p` runs from `sources[i-1]` to `sinks[j-1]`, `p_other` from
/// `sources[i_other-1]` to `sinks[j_other-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCertificate {
    pub p: Dipath,
    pub p_other: Dipath,
    pub i: usize,
    pub j: usize,
    pub i_other: usize,
    pub j_other: usize,
}

impl CrossCertificate {
    /// Builds the certificate with indices looked up from the instance; the
    /// caller guarantees both paths run terminal-to-terminal.
    pub fn from_paths(inst: &Instance, p: Dipath, p_other: Dipath) -> Self {
        let i = inst
            .source_index(p.first())
            .expect("path starts at a source");
        let j = inst.sink_index(p.last()).expect("path ends at a sink");
        let i_other = inst
            .source_index(p_other.first())
            .expect("path starts at a source");
        let j_other = inst
            .sink_index(p_other.last())
            .expect("path ends at a sink");
        CrossCertificate {
            p,
            p_other,
            i,
            j,
            i_other,
            j_other,
        }
    }

    pub fn pattern_inverted(&self) -> bool {
        (self.i < self.i_other && self.j > self.j_other)
            || (self.i > self.i_other && self.j < self.j_other)
    }
}

/// One reason a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossFailure {
    NotADipath { which: Which },
    WrongSourceEndpoint { which: Which },
    WrongSinkEndpoint { which: Which },
    NotDisjoint,
    PatternNotInverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

/// Verifier outcome: empty failure list means accept.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrossReport {
    pub failures: Vec<CrossFailure>,
}

impl CrossReport {
    pub fn accepted(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CrossReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            write!(f, "accept")
        } else {
            write!(f, "reject: {:?}", self.failures)
        }
    }
}

/// Independent check of a cross certificate against an instance.
pub fn verify_cross(inst: &Instance, cert: &CrossCertificate) -> CrossReport {
    let mut report = CrossReport::default();
    for (which, path, i, j) in [
        (Which::First, &cert.p, cert.i, cert.j),
        (Which::Second, &cert.p_other, cert.i_other, cert.j_other),
    ] {
        if !path.is_valid_in(&inst.graph) {
            report.failures.push(CrossFailure::NotADipath { which });
            continue;
        }
        if inst.source_index(path.first()) != Some(i) {
            report
                .failures
                .push(CrossFailure::WrongSourceEndpoint { which });
        }
        if inst.sink_index(path.last()) != Some(j) {
            report
                .failures
                .push(CrossFailure::WrongSinkEndpoint { which });
        }
    }
    if !cert.p.is_disjoint_from(&cert.p_other) {
        report.failures.push(CrossFailure::NotDisjoint);
    }
    if !cert.pattern_inverted() {
        report.failures.push(CrossFailure::PatternNotInverted);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::v;

    #[test]
    fn accepts_the_cross_fixture() {
        let inst = fixtures::i_cross();
        let cert = CrossCertificate::from_paths(
            &inst,
            Dipath::new(vec![v(0), v(3)]),
            Dipath::new(vec![v(1), v(2)]),
        );
        assert_eq!(cert.i, 1);
        assert_eq!(cert.j, 2);
        assert_eq!(cert.i_other, 2);
        assert_eq!(cert.j_other, 1);
        assert!(verify_cross(&inst, &cert).accepted());
    }

    #[test]
    fn rejects_invalid_path() {
        let inst = fixtures::i_cross();
        let cert = CrossCertificate {
            p: Dipath::new(vec![v(0), v(3)]),
            p_other: Dipath::new(vec![v(1), v(42)]),
            i: 1,
            j: 2,
            i_other: 2,
            j_other: 1,
        };
        let report = verify_cross(&inst, &cert);
        assert!(report.failures.contains(&CrossFailure::NotADipath {
            which: Which::Second
        }));
    }

    #[test]
    fn rejects_parallel_pattern_on_k22() {
        let inst = fixtures::i_k22();
        let cert = CrossCertificate::from_paths(
            &inst,
            Dipath::new(vec![v(0), v(2)]),
            Dipath::new(vec![v(1), v(3)]),
        );
        let report = verify_cross(&inst, &cert);
        assert_eq!(report.failures, vec![CrossFailure::PatternNotInverted]);
    }

    #[test]
    fn rejects_non_disjoint_paths() {
        let inst = fixtures::i_fan();
        let cert = CrossCertificate {
            p: Dipath::new(vec![v(0), v(2), v(4)]),
            p_other: Dipath::new(vec![v(1), v(2), v(3)]),
            i: 1,
            j: 2,
            i_other: 2,
            j_other: 1,
        };
        let report = verify_cross(&inst, &cert);
        assert_eq!(report.failures, vec![CrossFailure::NotDisjoint]);
    }
}
