//! `linkage` — certifying solver for the 2-linkage / cross dichotomy in
//! acyclic digraphs.
//!
//! Exit codes are part of the contract:
//! 0  embedding emitted / no linkage / certificate accepted
//! 2  invalid input (parse or validation failure)
//! 10 cross emitted / linkage found
//! 11 certificate rejected by the verifier

mod doc;
mod svg;

use clap::{Parser, Subcommand};
use doc::{
    cross_to_doc, default_labels, doc_to_cross, doc_to_embedding, embedding_to_doc, trace_to_doc,
    CertPayload, CertificateDocument, DocError, GraphDocument, LabelMap,
};
use linkage_core::cross::verify_cross;
use linkage_core::embedding::verify_embedding;
use linkage_core::engine::{solve, EngineError, SolveOutcome};
use linkage_core::generator::{gen_drawable, gen_general, gen_random_canonical, GenConfig};
use linkage_core::normalize::{lift_linkage, normalize, NoLinkageReason, TrivialVerdict};
use linkage_core::oracle::{brute_force_cross, dag_two_disjoint_paths};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 2;
const EXIT_CROSS: u8 = 10;
const EXIT_REJECTED: u8 = 11;

#[derive(Parser)]
#[command(
    name = "linkage",
    version,
    about = "Certifying 2-linkage / cross solver for acyclic digraphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance; emits a certificate document.
    Solve {
        /// Graph document (JSON or DOT); "-" reads standard input.
        input: PathBuf,
        /// Treat the document as a canonical instance (ordered sources/sinks).
        #[arg(long, conflicts_with = "general")]
        strict: bool,
        /// Treat the document as a general four-terminal instance.
        #[arg(long)]
        general: bool,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render an (illustrative) SVG of an emitted embedding.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check a certificate document against a graph document.
    Verify {
        graph: PathBuf,
        certificate: PathBuf,
    },
    /// Ground-truth search, guarded by --max-vertices.
    Oracle {
        input: PathBuf,
        /// Refuse exhaustive search above this size.
        #[arg(long, default_value_t = 14)]
        max_vertices: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an instance document.
    Gen {
        /// canonical | drawable | general
        #[arg(long, default_value = "canonical")]
        mode: String,
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 0.35)]
        density: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a general instance to canonical form; emits the kernel,
    /// the reduction trace, and any trivial verdict.
    Normalize {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            diag("input-error", &e.0);
            EXIT_INVALID
        }
    };
    ExitCode::from(code)
}

/// One machine-readable diagnostic line on standard error.
fn diag(code: &str, message: &str) {
    eprintln!(
        "{}",
        serde_json::json!({"level": "error", "code": code, "message": message})
    );
}

fn read_input(path: &Path) -> Result<String, DocError> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| DocError(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read_to_string(path).map_err(|e| DocError(format!("{}: {e}", path.display())))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), DocError> {
    match out {
        Some(path) => {
            std::fs::write(path, content).map_err(|e| DocError(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn reason_label(reason: &NoLinkageReason, map: &LabelMap) -> Result<String, DocError> {
    Ok(match reason {
        NoLinkageReason::TerminalCutOff(x) => format!("terminal-cut-off:{}", map.label(*x)?),
        NoLinkageReason::StartDeadEnd(x) => format!("start-dead-end:{}", map.label(*x)?),
        NoLinkageReason::EndDeadEnd(x) => format!("end-dead-end:{}", map.label(*x)?),
    })
}

fn run(cmd: Cmd) -> Result<u8, DocError> {
    match cmd {
        Cmd::Solve {
            input,
            strict,
            general,
            out,
            svg,
        } => cmd_solve(&input, strict, general, &out, &svg),
        Cmd::Verify { graph, certificate } => cmd_verify(&graph, &certificate),
        Cmd::Oracle {
            input,
            max_vertices,
            out,
        } => cmd_oracle(&input, max_vertices, &out),
        Cmd::Gen {
            mode,
            n,
            density,
            k,
            l,
            seed,
            out,
        } => cmd_gen(&mode, GenConfig::new(n, density, k, l, seed), &out),
        Cmd::Normalize { input, out } => cmd_normalize(&input, &out),
    }
}

fn cmd_solve(
    input: &Path,
    strict: bool,
    general: bool,
    out: &Option<PathBuf>,
    svg_out: &Option<PathBuf>,
) -> Result<u8, DocError> {
    let gdoc = GraphDocument::parse(&read_input(input)?)?;
    let general_mode = if general {
        true
    } else if strict {
        false
    } else {
        gdoc.is_general()
    };
    if general_mode {
        return solve_general(&gdoc, out);
    }
    let (inst, map) = gdoc.to_instance()?;
    match solve(&inst) {
        Ok(SolveOutcome::Cross(cross)) => {
            let doc = CertificateDocument::of(cross_to_doc(&cross, &map)?);
            write_output(out, &doc.serialize())?;
            Ok(EXIT_CROSS)
        }
        Ok(SolveOutcome::Embedding(emb)) => {
            let doc = CertificateDocument::of(embedding_to_doc(&emb, &map)?);
            write_output(out, &doc.serialize())?;
            if let Some(path) = svg_out {
                let picture = svg::render(&emb, |x| map.label(x).unwrap_or("?").to_owned());
                std::fs::write(path, picture)
                    .map_err(|e| DocError(format!("{}: {e}", path.display())))?;
            }
            Ok(EXIT_OK)
        }
        Err(EngineError::InvalidInstance(report)) => {
            for violation in &report.violations {
                diag("invalid-instance", &violation.to_string());
            }
            Ok(EXIT_INVALID)
        }
        Err(e) => Err(DocError(e.to_string())),
    }
}

fn solve_general(gdoc: &GraphDocument, out: &Option<PathBuf>) -> Result<u8, DocError> {
    let (gi, map) = gdoc.to_general()?;
    let kernel = match normalize(&gi) {
        Ok(k) => k,
        Err(e) => {
            diag("invalid-instance", &e.to_string());
            return Ok(EXIT_INVALID);
        }
    };
    let trace = trace_to_doc(&kernel.trace, &map)?;
    if let Some(TrivialVerdict::NoLinkage { reason }) = &kernel.trivial_verdict {
        let doc = CertificateDocument::of(CertPayload::NoLinkage {
            reason: reason_label(reason, &map)?,
            trace,
        });
        write_output(out, &doc.serialize())?;
        return Ok(EXIT_OK);
    }
    match solve(&kernel.instance).map_err(|e| DocError(e.to_string()))? {
        SolveOutcome::Cross(cross) => {
            let (p_ac, p_bd) =
                lift_linkage(&gi, &kernel, &cross).map_err(|e| DocError(e.to_string()))?;
            let doc = CertificateDocument::of(CertPayload::Linkage {
                path_ac: map.labels_of(p_ac.0.iter().copied())?,
                path_bd: map.labels_of(p_bd.0.iter().copied())?,
                trace,
            });
            write_output(out, &doc.serialize())?;
            Ok(EXIT_CROSS)
        }
        SolveOutcome::Embedding(_) => {
            let doc = CertificateDocument::of(CertPayload::NoLinkage {
                reason: "kernel-drawable".to_string(),
                trace,
            });
            write_output(out, &doc.serialize())?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_verify(graph: &Path, certificate: &Path) -> Result<u8, DocError> {
    let gdoc = GraphDocument::parse(&read_input(graph)?)?;
    let cdoc = CertificateDocument::parse(&read_input(certificate)?)?;
    match &cdoc.payload {
        CertPayload::Cross { .. } => {
            let (inst, map) = gdoc.to_instance()?;
            let cross = match doc_to_cross(&cdoc.payload, &map) {
                Ok(c) => c,
                Err(e) => {
                    diag("reject", &format!("paths not present in graph: {e}"));
                    return Ok(EXIT_REJECTED);
                }
            };
            let report = verify_cross(&inst, &cross);
            if report.accepted() {
                Ok(EXIT_OK)
            } else {
                diag("reject", &report.to_string());
                Ok(EXIT_REJECTED)
            }
        }
        CertPayload::Embedding { .. } => {
            let (inst, map) = gdoc.to_instance()?;
            let emb = match doc_to_embedding(&cdoc.payload, &map) {
                Ok(e) => e,
                Err(e) => {
                    diag("reject", &e.to_string());
                    return Ok(EXIT_REJECTED);
                }
            };
            let report = verify_embedding(&inst, &emb);
            if report.accepted() {
                Ok(EXIT_OK)
            } else {
                for failure in &report.failures {
                    diag("reject", &failure.to_string());
                }
                Ok(EXIT_REJECTED)
            }
        }
        CertPayload::Linkage {
            path_ac, path_bd, ..
        } => {
            if !gdoc.is_general() && gdoc.terminals.is_none() {
                diag(
                    "kind-mismatch",
                    "linkage certificate needs a general-mode graph",
                );
                return Ok(EXIT_INVALID);
            }
            let (gi, map) = gdoc.to_general()?;
            let (p_ac, p_bd) = (map.path(path_ac)?, map.path(path_bd)?);
            let ok = p_ac.is_valid_in(&gi.graph)
                && p_bd.is_valid_in(&gi.graph)
                && p_ac.is_disjoint_from(&p_bd)
                && p_ac.first() == gi.a
                && p_ac.last() == gi.c
                && p_bd.first() == gi.b
                && p_bd.last() == gi.d;
            if ok {
                Ok(EXIT_OK)
            } else {
                diag(
                    "reject",
                    "paths are not a valid disjoint a->c / b->d linkage",
                );
                Ok(EXIT_REJECTED)
            }
        }
        CertPayload::NoLinkage { .. } => {
            if gdoc.terminals.is_none() {
                diag(
                    "kind-mismatch",
                    "no-linkage certificate needs a general-mode graph",
                );
                return Ok(EXIT_INVALID);
            }
            let (gi, _) = gdoc.to_general()?;
            // A negative claim is checked by re-deciding the instance.
            match dag_two_disjoint_paths(&gi.graph, gi.a, gi.b, gi.c, gi.d) {
                None => Ok(EXIT_OK),
                Some(_) => {
                    diag("reject", "a linkage exists");
                    Ok(EXIT_REJECTED)
                }
            }
        }
    }
}

fn cmd_oracle(input: &Path, max_vertices: usize, out: &Option<PathBuf>) -> Result<u8, DocError> {
    let gdoc = GraphDocument::parse(&read_input(input)?)?;
    if gdoc.vertices.len() > max_vertices {
        diag(
            "too-large",
            &format!(
                "{} vertices exceed --max-vertices {max_vertices}",
                gdoc.vertices.len()
            ),
        );
        return Ok(EXIT_INVALID);
    }
    if gdoc.is_general() {
        let (gi, map) = gdoc.to_general()?;
        return match dag_two_disjoint_paths(&gi.graph, gi.a, gi.b, gi.c, gi.d) {
            Some((p_ac, p_bd)) => {
                let doc = CertificateDocument::of(CertPayload::Linkage {
                    path_ac: map.labels_of(p_ac.0.iter().copied())?,
                    path_bd: map.labels_of(p_bd.0.iter().copied())?,
                    trace: Vec::new(),
                });
                write_output(out, &doc.serialize())?;
                Ok(EXIT_CROSS)
            }
            None => {
                let doc = CertificateDocument::of(CertPayload::NoLinkage {
                    reason: "exhaustive".to_string(),
                    trace: Vec::new(),
                });
                write_output(out, &doc.serialize())?;
                Ok(EXIT_OK)
            }
        };
    }
    let (inst, map) = gdoc.to_instance()?;
    match brute_force_cross(&inst, 5_000_000).map_err(|e| DocError(e.to_string()))? {
        Some(cross) => {
            let doc = CertificateDocument::of(cross_to_doc(&cross, &map)?);
            write_output(out, &doc.serialize())?;
            Ok(EXIT_CROSS)
        }
        None => {
            write_output(out, "{\"oracle\":\"no-cross\"}\n")?;
            Ok(EXIT_OK)
        }
    }
}

fn cmd_gen(mode: &str, cfg: GenConfig, out: &Option<PathBuf>) -> Result<u8, DocError> {
    let doc = match mode {
        "canonical" => {
            let inst = gen_random_canonical(&cfg).map_err(|e| DocError(e.to_string()))?;
            let map = default_labels(inst.graph.vertex_count());
            GraphDocument::from_instance(&inst, &map)?
        }
        "drawable" => {
            let inst = gen_drawable(&cfg).map_err(|e| DocError(e.to_string()))?;
            // Growth ids are sparse after dropping isolated terminals, so
            // label by the ids themselves.
            let max_id = inst.graph.vertices().map(|x| x.0).max().unwrap_or(0);
            let map = default_labels(max_id as usize + 1);
            GraphDocument::from_instance(&inst, &map)?
        }
        "general" => {
            let gi = gen_general(&cfg).map_err(|e| DocError(e.to_string()))?;
            let map = default_labels(gi.graph.vertex_count());
            GraphDocument {
                format: doc::GRAPH_FORMAT.to_string(),
                vertices: map.labels_of(gi.graph.vertices())?,
                edges: gi
                    .graph
                    .edges()
                    .map(|(a, b)| Ok((map.label(a)?.to_owned(), map.label(b)?.to_owned())))
                    .collect::<Result<Vec<_>, DocError>>()?,
                sources: None,
                sinks: None,
                terminals: Some(doc::TerminalsDoc {
                    a: map.label(gi.a)?.to_owned(),
                    b: map.label(gi.b)?.to_owned(),
                    c: map.label(gi.c)?.to_owned(),
                    d: map.label(gi.d)?.to_owned(),
                }),
            }
        }
        other => return Err(DocError(format!("unknown --mode {other:?}"))),
    };
    write_output(out, &doc.serialize())?;
    Ok(EXIT_OK)
}

fn cmd_normalize(input: &Path, out: &Option<PathBuf>) -> Result<u8, DocError> {
    let gdoc = GraphDocument::parse(&read_input(input)?)?;
    let (gi, map) = gdoc.to_general()?;
    let kernel = match normalize(&gi) {
        Ok(k) => k,
        Err(e) => {
            diag("invalid-instance", &e.to_string());
            return Ok(EXIT_INVALID);
        }
    };
    let kernel_doc = GraphDocument::from_instance(&kernel.instance, &map)?;
    let verdict = match &kernel.trivial_verdict {
        Some(TrivialVerdict::NoLinkage { reason }) => {
            serde_json::json!({"kind": "no-linkage", "reason": reason_label(reason, &map)?})
        }
        None => serde_json::Value::Null,
    };
    let doc = serde_json::json!({
        "format": "linkage-kernel/1",
        "kernel": kernel_doc,
        "trace": trace_to_doc(&kernel.trace, &map)?,
        "verdict": verdict,
    });
    write_output(out, &format!("{doc}\n"))?;
    Ok(EXIT_OK)
}
