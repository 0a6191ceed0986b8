//! Compatibility graphs, universally-commuting operators and the
//! clique-partition test.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{PauliError, PauliOp, SignedPauli};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("operator {0} appears more than once")]
    Duplicate(String),
    #[error("the identity is not allowed in a Pauli set")]
    Identity,
    #[error("operator {0} carries a sign; sets hold unsigned measurements")]
    Signed(String),
}

/// An ordered set of distinct, non-identity Pauli operators of equal size.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PauliSet {
    n_qubits: usize,
    ops: Vec<PauliOp>,
}

impl PauliSet {
    /// Builds a set, inferring the qubit count from the first operator. An
    /// empty list gives an empty set on zero qubits.
    pub fn new(ops: Vec<PauliOp>) -> Result<Self, SetError> {
        let n = ops.first().map_or(0, PauliOp::n_qubits);
        Self::with_qubits(n, ops)
    }

    pub fn with_qubits(n_qubits: usize, ops: Vec<PauliOp>) -> Result<Self, SetError> {
        let mut seen = HashSet::with_capacity(ops.len());
        for op in &ops {
            if op.n_qubits() != n_qubits {
                return Err(PauliError::DimensionMismatch {
                    left: n_qubits,
                    right: op.n_qubits(),
                }
                .into());
            }
            if op.is_identity() {
                return Err(SetError::Identity);
            }
            if !seen.insert(op) {
                return Err(SetError::Duplicate(op.to_string()));
            }
        }
        Ok(PauliSet { n_qubits, ops })
    }

    /// Parses unsigned Pauli strings, e.g. `["XI", "IX"]`.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, SetError> {
        let ops = items
            .iter()
            .map(|s| {
                let sp = SignedPauli::parse(s.as_ref())?;
                if sp.sign.is_negative() {
                    return Err(SetError::Signed(sp.to_string()));
                }
                Ok(sp.op)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.ops
    }

    pub fn get(&self, i: usize) -> &PauliOp {
        &self.ops[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PauliOp> {
        self.ops.iter()
    }

    pub fn contains(&self, op: &PauliOp) -> bool {
        self.ops.contains(op)
    }

    pub fn index_of(&self, op: &PauliOp) -> Option<usize> {
        self.ops.iter().position(|o| o == op)
    }

    /// The operators at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PauliSet {
        PauliSet {
            n_qubits: self.n_qubits,
            ops: indices.iter().map(|&i| self.ops[i].clone()).collect(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.ops.iter().map(ToString::to_string).collect()
    }
}

impl<'a> IntoIterator for &'a PauliSet {
    type Item = &'a PauliOp;
    type IntoIter = std::slice::Iter<'a, PauliOp>;

    fn into_iter(self) -> Self::IntoIter {
        self.ops.iter()
    }
}

/// Fixed-size bit set used for adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn intersect_with(&mut self, other: &BitSet) {
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= b);
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// First element of `self xor other`.
    pub(crate) fn first_difference(&self, other: &BitSet) -> Option<usize> {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| *a != *b)
            .map(|(wi, (a, b))| wi * 64 + (a ^ b).trailing_zeros() as usize)
    }
}

/// The commutation graph of a [`PauliSet`]: vertices are set indices, edges
/// join commuting operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityGraph {
    set: PauliSet,
    rows: Vec<BitSet>,
}

impl CompatibilityGraph {
    pub fn set(&self) -> &PauliSet {
        &self.set
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[i].iter()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count()
    }

    pub(crate) fn row(&self, i: usize) -> &BitSet {
        &self.rows[i]
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|i| {
                self.neighbors(i)
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }

    /// Indices of operators commuting with every other operator.
    pub fn universal(&self) -> Vec<usize> {
        let n = self.len();
        (0..n).filter(|&i| self.degree(i) + 1 == n).collect()
    }
}

pub fn build_graph(s: &PauliSet) -> CompatibilityGraph {
    let n = s.len();
    let mut rows = vec![BitSet::new(n); n];
    for i in 0..n {
        for j in i + 1..n {
            if s.ops[i].commutes_with(&s.ops[j]) {
                rows[i].insert(j);
                rows[j].insert(i);
            }
        }
    }
    CompatibilityGraph {
        set: s.clone(),
        rows,
    }
}

/// Splits `s` into `(t, removed)` where `removed` holds the operators that
/// commute with every other element. One pass is enough: a removed operator
/// commutes with everything, so its removal never makes a survivor universal.
pub fn strip_universal(s: &PauliSet) -> (PauliSet, PauliSet) {
    let g = build_graph(s);
    let universal = g.universal();
    let kept: Vec<usize> = (0..s.len()).filter(|i| !universal.contains(i)).collect();
    (s.subset(&kept), s.subset(&universal))
}

/// Universal operators plus fully-anticommuting cliques of fully-commuting
/// operators. Indices refer to the set the partition was computed over.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CliquePartition {
    pub universal: Vec<usize>,
    pub cliques: Vec<Vec<usize>>,
}

/// Three indices on which commutation is not transitive: `a` commutes with
/// `b` and `c`, while `b` and `c` anticommute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

/// Partitions an already-stripped set into cliques, or returns a triple
/// showing that commutation is not an equivalence relation on it.
pub fn clique_partition(t: &PauliSet) -> Result<CliquePartition, FailureWitness> {
    let g = build_graph(t);
    let all: Vec<usize> = (0..t.len()).collect();
    partition_vertices(&g, &all)
}

/// Clique partition of the subgraph induced on `vertices` (ascending). Each
/// unassigned vertex opens a clique equal to its closed neighbourhood; every
/// member must share that neighbourhood exactly.
pub(crate) fn partition_vertices(
    g: &CompatibilityGraph,
    vertices: &[usize],
) -> Result<CliquePartition, FailureWitness> {
    let n = g.len();
    let mut active = BitSet::new(n);
    vertices.iter().for_each(|&v| active.insert(v));
    let closed = |v: usize| {
        let mut row = g.row(v).clone();
        row.insert(v);
        row.intersect_with(&active);
        row
    };

    let mut assigned = BitSet::new(n);
    let mut cliques = Vec::new();
    for &v in vertices {
        if assigned.contains(v) {
            continue;
        }
        let nv = closed(v);
        for u in nv.iter() {
            if u == v {
                continue;
            }
            let nu = closed(u);
            if let Some(w) = nv.first_difference(&nu) {
                return Err(if nv.contains(w) {
                    FailureWitness { a: v, b: u, c: w }
                } else {
                    FailureWitness { a: u, b: v, c: w }
                });
            }
        }
        let clique: Vec<usize> = nv.iter().collect();
        clique.iter().for_each(|&u| assigned.insert(u));
        cliques.push(clique);
    }
    Ok(CliquePartition {
        universal: Vec::new(),
        cliques,
    })
}
