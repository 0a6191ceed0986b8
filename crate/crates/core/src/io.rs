//! Hamiltonian files, JSON/text reports and DOT export.
//!
//! A `.ham` file holds one term per line as `<coefficient> <pauli>` or a bare
//! `<pauli>` (coefficient 1). `#` starts a comment. Terms may carry a sign,
//! repeated terms are summed and identity terms go to the identity
//! coefficient.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat::{build_graph, CliquePartition};
use crate::contextuality::{decide, GraphForm, Quadruple, Verdict};
use crate::measures::{measure, Hamiltonian, MeasureError, MeasureOptions, MeasureReport, PNorm};
use crate::pauli::SignedPauli;
use crate::scalar::Scalar;
use crate::trees::{
    determining_set, validate, witness_from_quadruple, DeterminingSet, DeterminingTree, TreeError,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no terms found")]
    Empty,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFile<T: Scalar = f64> {
    pub path: Option<PathBuf>,
    pub label: String,
    /// Comment text with the leading `#` and surrounding blanks removed.
    pub comments: Vec<String>,
    pub hamiltonian: Hamiltonian<T>,
}

impl<T: Scalar> HamiltonianFile<T> {
    /// The verdict named by an `expect: contextual` or
    /// `expect: noncontextual` comment, if any.
    pub fn expected_contextual(&self) -> Option<bool> {
        self.comments
            .iter()
            .find_map(|c| match c.strip_prefix("expect:")?.trim() {
                "contextual" => Some(true),
                "noncontextual" => Some(false),
                _ => None,
            })
    }
}

pub fn parse_hamiltonian_str<T: Scalar>(
    text: &str,
    label: &str,
) -> Result<HamiltonianFile<T>, IoError> {
    let mut comments = Vec::new();
    let mut terms: Vec<(T, SignedPauli)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| IoError::Parse { line, message };
        let content = match raw.split_once('#') {
            Some((body, comment)) => {
                comments.push(comment.trim().to_string());
                body
            }
            None => raw,
        };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let (coeff, pauli) = match tokens.as_slice() {
            [] => continue,
            [p] => (T::one(), *p),
            [c, p] => (
                c.parse::<T>()
                    .map_err(|_| err(format!("cannot parse coefficient {c:?}")))?,
                *p,
            ),
            _ => {
                return Err(err(format!(
                    "expected `<coefficient> <pauli>`, found {:?}",
                    content.trim()
                )))
            }
        };
        if !coeff.is_finite() {
            return Err(err(format!("coefficient {coeff} is not finite")));
        }
        let p = SignedPauli::parse(pauli).map_err(|e| err(e.to_string()))?;
        if let Some((_, first)) = terms.first() {
            if first.n_qubits() != p.n_qubits() {
                return Err(err(format!(
                    "term {pauli} has {} qubits, expected {}",
                    p.n_qubits(),
                    first.n_qubits()
                )));
            }
        }
        terms.push((coeff, p));
    }
    let n = terms.first().ok_or(IoError::Empty)?.1.n_qubits();
    Ok(HamiltonianFile {
        path: None,
        label: label.to_string(),
        comments,
        hamiltonian: Hamiltonian::from_terms(n, terms)?,
    })
}

pub fn parse_hamiltonian_file<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<HamiltonianFile<T>, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let label = path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    let mut file = parse_hamiltonian_str(&text, &label)?;
    file.path = Some(path.to_path_buf());
    Ok(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputMetadata {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub n_qubits: usize,
    pub n_terms: usize,
    pub identity_coeff: f64,
    pub terms: Vec<String>,
    pub coeffs: Vec<f64>,
}

/// The verdict with operator labels alongside indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum VerdictReport {
    Noncontextual {
        partition: CliquePartition,
        universal_ops: Vec<String>,
        clique_ops: Vec<Vec<String>>,
    },
    Contextual {
        form: GraphForm,
        quadruple: Quadruple,
        /// Labels of `A, B, C, D`.
        operators: [String; 4],
    },
}

impl VerdictReport {
    fn new(v: &Verdict, labels: &[String]) -> Self {
        let name = |i: &usize| labels[*i].clone();
        match v {
            Verdict::Noncontextual { partition } => VerdictReport::Noncontextual {
                universal_ops: partition.universal.iter().map(name).collect(),
                clique_ops: partition
                    .cliques
                    .iter()
                    .map(|c| c.iter().map(name).collect())
                    .collect(),
                partition: partition.clone(),
            },
            Verdict::Contextual { quadruple, form } => VerdictReport::Contextual {
                form: *form,
                quadruple: *quadruple,
                operators: quadruple.indices().map(|i| name(&i)),
            },
        }
    }

    pub fn is_contextual(&self) -> bool {
        matches!(self, VerdictReport::Contextual { .. })
    }

    pub fn to_verdict(&self) -> Verdict {
        match self {
            VerdictReport::Noncontextual { partition, .. } => Verdict::Noncontextual {
                partition: partition.clone(),
            },
            VerdictReport::Contextual {
                form, quadruple, ..
            } => Verdict::Contextual {
                quadruple: *quadruple,
                form: *form,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub tree: DeterminingTree,
    pub determining_set: DeterminingSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_us: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub input: InputMetadata,
    pub verdict: VerdictReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measures: Option<MeasureReport<f64>>,
    pub timing: Timing,
}

impl ReportDocument {
    /// 0 for noncontextual, 1 for contextual.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.verdict.is_contextual())
    }

    /// Re-checks the embedded verdict, witness tree and measures against
    /// `h`.
    pub fn verify(&self, h: &Hamiltonian<f64>) -> Result<(), String> {
        if !self.verdict.to_verdict().check(h.terms()) {
            return Err("verdict certificate does not hold".into());
        }
        if let Some(w) = &self.witness {
            validate(&w.tree, h.terms()).map_err(|v| v.to_string())?;
            if determining_set(&w.tree) != w.determining_set {
                return Err("reported determining set does not match the tree".into());
            }
        }
        if let Some(m) = &self.measures {
            m.verify(h)?;
        }
        Ok(())
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let i = &self.input;
        let _ = writeln!(
            out,
            "{}: {} qubits, {} terms",
            i.label, i.n_qubits, i.n_terms
        );
        match &self.verdict {
            VerdictReport::Contextual {
                form, operators, ..
            } => {
                let [a, b, c, d] = operators;
                let _ = writeln!(out, "contextual: yes ({form}: A={a} B={b} C={c} D={d})");
            }
            VerdictReport::Noncontextual {
                universal_ops,
                clique_ops,
                ..
            } => {
                let _ = writeln!(out, "contextual: no");
                let _ = writeln!(out, "universal: {{{}}}", universal_ops.join(", "));
                for (k, c) in clique_ops.iter().enumerate() {
                    let _ = writeln!(out, "clique {}: {{{}}}", k + 1, c.join(", "));
                }
            }
        }
        if let Some(w) = &self.witness {
            let ds: Vec<String> = w.determining_set.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "witness (determining set {{{}}}):", ds.join(", "));
            for line in w.tree.to_text().lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        if let Some(m) = &self.measures {
            let names = |set: &[usize]| {
                set.iter()
                    .map(|&k| i.terms[k].clone())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(out, "method: {}", m.method);
            let _ = writeln!(
                out,
                "CD0 = {} ({:.6}), remove {{{}}}",
                m.cd0,
                m.cd0_f64(),
                names(&m.decontextualizing_set)
            );
            for d in m.distances.iter().filter(|d| d.p != PNorm::Zero) {
                let _ = writeln!(
                    out,
                    "CD{} = {:.6}, remove {{{}}}",
                    d.p,
                    d.value,
                    names(&d.decontextualizing_set)
                );
            }
        }
        let _ = writeln!(out, "time: {} us", self.timing.total_us);
        out
    }
}

fn metadata(file: &HamiltonianFile<f64>) -> InputMetadata {
    let h = &file.hamiltonian;
    InputMetadata {
        label: file.label.clone(),
        path: file.path.as_ref().map(|p| p.display().to_string()),
        n_qubits: h.n_qubits(),
        n_terms: h.len(),
        identity_coeff: h.identity_coeff(),
        terms: h.terms().labels(),
        coeffs: h.coeffs().to_vec(),
    }
}

fn elapsed_us(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_micros()).unwrap_or(u64::MAX)
}

fn document(
    file: &HamiltonianFile<f64>,
    verdict: &Verdict,
    witness: Option<WitnessReport>,
    measures: Option<MeasureReport<f64>>,
    start: Instant,
) -> ReportDocument {
    let input = metadata(file);
    ReportDocument {
        schema_version: SCHEMA_VERSION,
        verdict: VerdictReport::new(verdict, &input.terms),
        input,
        witness,
        measures,
        timing: Timing {
            total_us: elapsed_us(start),
        },
    }
}

/// Verdict with its quadruple or clique partition.
pub fn run_check(file: &HamiltonianFile<f64>) -> ReportDocument {
    let start = Instant::now();
    let verdict = decide(&build_graph(file.hamiltonian.terms()));
    document(file, &verdict, None, None, start)
}

/// Verdict plus, for contextual input, a validated `-𝟙` tree with empty
/// determining set. Noncontextual input is certified by the partition in
/// the verdict.
pub fn run_witness(file: &HamiltonianFile<f64>) -> Result<ReportDocument, IoError> {
    let start = Instant::now();
    let terms = file.hamiltonian.terms();
    let verdict = decide(&build_graph(terms));
    let witness = match &verdict {
        Verdict::Contextual { quadruple, form } => {
            let tree = witness_from_quadruple(*form, quadruple.ops(terms))?;
            validate(&tree, terms).map_err(TreeError::from)?;
            Some(WitnessReport {
                determining_set: determining_set(&tree),
                tree,
            })
        }
        Verdict::Noncontextual { .. } => None,
    };
    Ok(document(file, &verdict, witness, None, start))
}

/// Verdict plus `CD_0` and the requested `CD_p`.
pub fn run_measure(
    file: &HamiltonianFile<f64>,
    ps: &[PNorm],
    opts: &MeasureOptions,
) -> Result<ReportDocument, IoError> {
    let start = Instant::now();
    let verdict = decide(&build_graph(file.hamiltonian.terms()));
    let report = measure(&file.hamiltonian, ps, opts)?;
    Ok(document(file, &verdict, None, Some(report), start))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The compatibility graph in DOT. Edges join commuting pairs. A
/// contextual quadruple is drawn in red; otherwise each clique of the
/// partition, and the universal operators, get their own cluster.
pub fn export_dot<T: Scalar>(file: &HamiltonianFile<T>) -> String {
    let s = file.hamiltonian.terms();
    let g = build_graph(s);
    let verdict = decide(&g);
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", dot_escape(&file.label));
    let _ = writeln!(out, "  node [shape=box, fontname=\"monospace\"];");
    let highlighted: Vec<usize> = match &verdict {
        Verdict::Contextual { quadruple, .. } => quadruple.indices().to_vec(),
        Verdict::Noncontextual { .. } => Vec::new(),
    };
    let node = |out: &mut String, i: usize, indent: &str| {
        let extra = if highlighted.contains(&i) {
            ", color=red, penwidth=2"
        } else {
            ""
        };
        let _ = writeln!(out, "{indent}n{i} [label=\"{}\"{extra}];", s.get(i));
    };
    match &verdict {
        Verdict::Noncontextual { partition } => {
            let groups = std::iter::once(("universal".to_string(), &partition.universal)).chain(
                partition
                    .cliques
                    .iter()
                    .enumerate()
                    .map(|(k, c)| (format!("clique {}", k + 1), c)),
            );
            for (k, (name, members)) in groups.enumerate() {
                if members.is_empty() {
                    continue;
                }
                let _ = writeln!(out, "  subgraph cluster_{k} {{");
                let _ = writeln!(out, "    label=\"{name}\";");
                members.iter().for_each(|&i| node(&mut out, i, "    "));
                let _ = writeln!(out, "  }}");
            }
        }
        Verdict::Contextual { form, .. } => {
            let _ = writeln!(out, "  label=\"contextual ({form})\";");
            (0..s.len()).for_each(|i| node(&mut out, i, "  "));
        }
    }
    for (i, j) in g.edges() {
        let extra = if highlighted.contains(&i) && highlighted.contains(&j) {
            " [color=red, penwidth=2]"
        } else {
            ""
        };
        let _ = writeln!(out, "  n{i} -- n{j}{extra};");
    }
    out.push_str("}\n");
    out
}
