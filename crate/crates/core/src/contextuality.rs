//! Strong-contextuality decision for Pauli sets.
//!
//! After removing universally-commuting operators, a set is noncontextual
//! exactly when commutation is transitive on what remains. A failing triple
//! `(A; B, C)` plus any `D` anticommuting with `A` forms one of three
//! four-operator compatibility patterns, each of which is contextual on its
//! own. The search is `O(|S|^3)` in the worst case.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat::{
    build_graph, partition_vertices, CliquePartition, CompatibilityGraph, PauliSet,
};
use crate::pauli::{commuting_product, PauliOp, Sign, SignedPauli};

/// The three contextual compatibility patterns on labelled nodes `A, B, C, D`.
/// All three have the non-edges `A–D` and `B–C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphForm {
    /// `A–B, A–C`
    Form1,
    /// `A–B, A–C, B–D`
    Form2,
    /// `A–B, A–C, B–D, C–D`: the 4-cycle.
    Form3,
}

impl GraphForm {
    pub const ALL: [GraphForm; 3] = [GraphForm::Form1, GraphForm::Form2, GraphForm::Form3];

    /// Edges as pairs of label positions (`0 = A`, ..., `3 = D`).
    pub fn edges(self) -> &'static [(usize, usize)] {
        match self {
            GraphForm::Form1 => &[(0, 1), (0, 2)],
            GraphForm::Form2 => &[(0, 1), (0, 2), (1, 3)],
            GraphForm::Form3 => &[(0, 1), (0, 2), (1, 3), (2, 3)],
        }
    }

    /// Whether the four labelled operators have exactly this pattern.
    pub fn matches(self, ops: [&PauliOp; 4]) -> bool {
        (0..4).all(|i| {
            (i + 1..4).all(|j| {
                let edge = self.edges().contains(&(i, j));
                ops[i].commutes_with(ops[j]) == edge
            })
        })
    }

    /// Chordal forms have no induced cycle longer than three.
    pub fn is_chordal(self) -> bool {
        self != GraphForm::Form3
    }
}

impl fmt::Display for GraphForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GraphForm::Form1 => "Form1",
            GraphForm::Form2 => "Form2",
            GraphForm::Form3 => "Form3",
        };
        f.write_str(s)
    }
}

/// Indices of the labelled operators `A, B, C, D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quadruple {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl Quadruple {
    pub fn indices(&self) -> [usize; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn ops<'a>(&self, s: &'a PauliSet) -> [&'a PauliOp; 4] {
        self.indices().map(|i| s.get(i))
    }
}

/// Outcome of [`is_contextual`]. Indices refer to the analysed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// `partition.universal` lists the universally-commuting operators and
    /// `partition.cliques` the clique structure of the remainder.
    Noncontextual { partition: CliquePartition },
    Contextual {
        quadruple: Quadruple,
        form: GraphForm,
    },
}

impl Verdict {
    pub fn is_contextual(&self) -> bool {
        matches!(self, Verdict::Contextual { .. })
    }

    /// Re-checks the verdict's witness against `s`: the quadruple must match
    /// its form, or the partition must satisfy the clique invariants.
    pub fn check(&self, s: &PauliSet) -> bool {
        match self {
            Verdict::Contextual { quadruple, form } => form.matches(quadruple.ops(s)),
            Verdict::Noncontextual { partition } => partition_is_sound(s, partition),
        }
    }
}

/// Checks the clique-partition invariants exhaustively over `s`.
pub fn partition_is_sound(s: &PauliSet, p: &CliquePartition) -> bool {
    let mut seen = vec![false; s.len()];
    for &i in p.universal.iter().chain(p.cliques.iter().flatten()) {
        if i >= s.len() || std::mem::replace(&mut seen[i], true) {
            return false;
        }
    }
    if seen.iter().any(|&x| !x) {
        return false;
    }
    let commute = |i: usize, j: usize| s.get(i).commutes_with(s.get(j));
    let universal_ok = p
        .universal
        .iter()
        .all(|&u| (0..s.len()).all(|j| commute(u, j)));
    let cliques_ok = p.cliques.iter().enumerate().all(|(ci, c)| {
        c.iter().all(|&i| c.iter().all(|&j| commute(i, j)))
            && p.cliques[ci + 1..]
                .iter()
                .all(|other| c.iter().all(|&i| other.iter().all(|&j| !commute(i, j))))
    });
    universal_ok && cliques_ok
}

/// Decides strong contextuality of `s`.
pub fn is_contextual(s: &PauliSet) -> Verdict {
    decide(&build_graph(s))
}

/// As [`is_contextual`], reusing a prebuilt graph.
pub fn decide(g: &CompatibilityGraph) -> Verdict {
    let universal = g.universal();
    let mut is_universal = vec![false; g.len()];
    universal.iter().for_each(|&u| is_universal[u] = true);
    let rest: Vec<usize> = (0..g.len()).filter(|&i| !is_universal[i]).collect();

    match partition_vertices(g, &rest) {
        Ok(mut partition) => {
            partition.universal = universal;
            Verdict::Noncontextual { partition }
        }
        Err(w) => {
            // `a` is not universal, so some survivor anticommutes with it.
            let d = rest
                .iter()
                .copied()
                .find(|&d| d != w.a && !g.adjacent(w.a, d))
                .expect("a non-universal operator anticommutes with another survivor");
            let (b, c) = match (g.adjacent(w.b, d), g.adjacent(w.c, d)) {
                (false, true) => (w.c, w.b),
                _ => (w.b, w.c),
            };
            let form = match (g.adjacent(b, d), g.adjacent(c, d)) {
                (false, false) => GraphForm::Form1,
                (true, false) => GraphForm::Form2,
                _ => GraphForm::Form3,
            };
            Verdict::Contextual {
                quadruple: Quadruple { a: w.a, b, c, d },
                form,
            }
        }
    }
}

/// A matched form with the positions of `A, B, C, D` in the caller's input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub form: GraphForm,
    pub labels: [usize; 4],
}

fn permutations4() -> impl Iterator<Item = [usize; 4]> {
    (0..256usize)
        .map(|k| [k >> 6 & 3, k >> 4 & 3, k >> 2 & 3, k & 3])
        .filter(|p| (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])))
}

/// Tries all 24 labellings of four operators against the three forms.
/// Returns `None` when the quadruple is not contextual on its own.
pub fn classify_quadruple(ops: [&PauliOp; 4]) -> Option<Classification> {
    for labels in permutations4() {
        let labelled = labels.map(|i| ops[i]);
        if let Some(form) = GraphForm::ALL.into_iter().find(|f| f.matches(labelled)) {
            return Some(Classification { form, labels });
        }
    }
    None
}

/// A ±1 outcome for each measurement.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment(HashMap<PauliOp, Sign>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// All-`+1` assignment over `s`.
    pub fn ones(s: &PauliSet) -> Self {
        Assignment(s.iter().map(|p| (p.clone(), Sign::Plus)).collect())
    }

    /// Assignment whose bit `i` of `mask` sets `s[i]` to `-1`.
    pub fn from_mask(s: &PauliSet, mask: u64) -> Self {
        Assignment(
            s.iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), Sign::from_negative(mask >> i & 1 == 1)))
                .collect(),
        )
    }

    pub fn set(&mut self, op: PauliOp, value: Sign) {
        self.0.insert(op, value);
    }

    pub fn get(&self, op: &PauliOp) -> Option<Sign> {
        self.0.get(op).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(PauliOp, Sign)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (PauliOp, Sign)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("closure did not reach a fixpoint within {0} rounds")]
    BudgetExhausted(usize),
    #[error("oracle is limited to 63 operators, got {0}")]
    TooManyOperators(usize),
}

/// Round budget that can never be exhausted on `n` qubits: each round adds at
/// least one of the `4^n` Paulis.
pub fn default_oracle_budget(n_qubits: usize) -> usize {
    2usize.saturating_mul(4usize.saturating_pow(n_qubits as u32))
}

/// Brute-force contextuality test for small sets.
///
/// For each of the `2^|s|` joint assignments, closes the value map under
/// products of commuting pairs (binary determining trees suffice) and looks
/// for an operator forced to both `+1` and `-1`. The set is contextual iff
/// every assignment reaches a contradiction.
pub fn assignment_closure_oracle(s: &PauliSet, max_rounds: usize) -> Result<bool, OracleError> {
    if s.len() > 63 {
        return Err(OracleError::TooManyOperators(s.len()));
    }
    let outcomes: Vec<Result<bool, OracleError>> = (0..1u64 << s.len())
        .into_par_iter()
        .map(|mask| closure_contradicts(s, mask, max_rounds))
        .collect();
    let mut all = true;
    for o in outcomes {
        all &= o?;
    }
    Ok(all)
}

/// Whether the assignment encoded by `mask` closes to a contradiction.
fn closure_contradicts(s: &PauliSet, mask: u64, max_rounds: usize) -> Result<bool, OracleError> {
    let mut values: HashMap<PauliOp, Sign> = HashMap::new();
    let mut known: Vec<PauliOp> = Vec::new();
    for (i, p) in s.iter().enumerate() {
        values.insert(p.clone(), Sign::from_negative(mask >> i & 1 == 1));
        known.push(p.clone());
    }
    let mut frontier = 0;
    let mut rounds = 0;
    while frontier < known.len() {
        if rounds == max_rounds {
            return Err(OracleError::BudgetExhausted(max_rounds));
        }
        rounds += 1;
        let end = known.len();
        for i in frontier..end {
            for j in 0..i {
                let (p, q) = (&known[i], &known[j]);
                if !p.commutes_with(q) {
                    continue;
                }
                let prod =
                    commuting_product(&SignedPauli::plus(p.clone()), &SignedPauli::plus(q.clone()))
                        .expect("commuting operands");
                let value = prod.sign * values[p] * values[q];
                match values.get(&prod.op) {
                    Some(&v) if v != value => return Ok(true),
                    Some(_) => {}
                    None => {
                        values.insert(prod.op.clone(), value);
                        known.push(prod.op);
                    }
                }
            }
        }
        frontier = end;
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> PauliSet {
        PauliSet::parse(items).unwrap()
    }

    fn ops(items: [&str; 4]) -> [PauliOp; 4] {
        items.map(|s| s.parse().unwrap())
    }

    #[test]
    fn permutations_are_all_distinct() {
        let perms: Vec<[usize; 4]> = permutations4().collect();
        let mut sorted = perms.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 24);
        assert!(perms.iter().all(|p| {
            let mut q = *p;
            q.sort();
            q == [0, 1, 2, 3]
        }));
    }

    #[test]
    fn peres_mermin_is_form3() {
        let s = set(&["XI", "IX", "ZI", "IZ"]);
        let v = is_contextual(&s);
        assert_eq!(
            v,
            Verdict::Contextual {
                quadruple: Quadruple {
                    a: 1,
                    b: 0,
                    c: 2,
                    d: 3
                },
                form: GraphForm::Form3
            }
        );
        assert!(v.check(&s));
    }

    #[test]
    fn deuteron_two_is_noncontextual() {
        let s = set(&["ZI", "IZ", "XX", "YY"]);
        let v = is_contextual(&s);
        let Verdict::Noncontextual { partition } = &v else {
            panic!("{v:?}")
        };
        assert!(partition.universal.is_empty());
        assert_eq!(partition.cliques, vec![vec![0, 1], vec![2, 3]]);
        assert!(v.check(&s));
    }

    #[test]
    fn form1_example() {
        let s = set(&["ZZ", "ZI", "XX", "YI"]);
        assert_eq!(
            is_contextual(&s),
            Verdict::Contextual {
                quadruple: Quadruple {
                    a: 0,
                    b: 1,
                    c: 2,
                    d: 3
                },
                form: GraphForm::Form1
            }
        );
    }

    #[test]
    fn disjoint_cliques_are_noncontextual() {
        assert!(!is_contextual(&set(&["XX", "ZZ", "XZ", "ZX"])).is_contextual());
    }

    #[test]
    fn universal_operators_are_reported() {
        let v = is_contextual(&set(&["IX", "ZI", "IZ"]));
        let Verdict::Noncontextual { partition } = v else {
            panic!()
        };
        assert_eq!(partition.universal, vec![1]);
        assert_eq!(partition.cliques, vec![vec![0], vec![2]]);
    }

    #[test]
    fn classification() {
        let q = ops(["ZZ", "ZI", "XX", "IY"]);
        let c = classify_quadruple([&q[0], &q[1], &q[2], &q[3]]).unwrap();
        assert_eq!(c.form, GraphForm::Form2);
        assert_eq!(c.labels, [0, 1, 2, 3]);

        let q = ops(["XI", "IX", "ZI", "IZ"]);
        let c = classify_quadruple([&q[0], &q[1], &q[2], &q[3]]).unwrap();
        assert_eq!(c.form, GraphForm::Form3);
        assert!(c.form.matches(c.labels.map(|i| &q[i])));

        let q = ops(["XI", "YI", "ZI", "IX"]);
        assert_eq!(classify_quadruple([&q[0], &q[1], &q[2], &q[3]]), None);
    }

    #[test]
    fn form_patterns_share_non_edges() {
        for f in GraphForm::ALL {
            assert!(!f.edges().contains(&(0, 3)));
            assert!(!f.edges().contains(&(1, 2)));
        }
        assert!(GraphForm::Form1.is_chordal() && GraphForm::Form2.is_chordal());
        assert!(!GraphForm::Form3.is_chordal());
    }

    #[test]
    fn oracle_examples() {
        let budget = default_oracle_budget(2);
        assert!(assignment_closure_oracle(&set(&["XI", "IX", "ZI", "IZ"]), budget).unwrap());
        assert!(!assignment_closure_oracle(&set(&["XI", "IX"]), budget).unwrap());
        assert!(!assignment_closure_oracle(&set(&["XX", "ZZ", "XZ", "ZX"]), budget).unwrap());
        assert!(assignment_closure_oracle(&set(&["ZZ", "ZI", "XX", "YI"]), budget).unwrap());
    }

    #[test]
    fn oracle_budget_error() {
        let s = set(&["XI", "IX", "ZI", "IZ"]);
        // Closure needs more than zero rounds.
        assert_eq!(
            assignment_closure_oracle(&s, 0),
            Err(OracleError::BudgetExhausted(0))
        );
    }
}
