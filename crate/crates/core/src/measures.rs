//! Contextuality measures of weighted Pauli sets.
//!
//! A decontextualizing set `S'` is a subset of the terms whose removal leaves
//! a noncontextual set. For `p >= 1`, `CD_p` is the smallest value of
//! `‖h_{S'}‖_p / ‖h‖_p` over all decontextualizing sets, with `p = ∞`
//! meaning the max-coefficient ratio. `CD_0` is the smallest fraction of
//! terms removed, ignoring coefficients. `CSep` is `CD_2`.
//!
//! The exact search is a branch-and-bound over kept subsets that relies on
//! noncontextuality being hereditary. The greedy heuristic gives an upper
//! bound at any size.
//!
//! Identity terms are carried in [`Hamiltonian::identity_coeff`] and never
//! counted in `|S|`. Zero-coefficient terms count for `CD_0` and weigh
//! nothing for `p >= 1`, so a contextual set can have `CD_p = 0` when all of
//! its obstructions involve zero-weight terms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::compat::{PauliSet, SetError};
use crate::contextuality::is_contextual;
use crate::pauli::{PauliError, PauliOp, SignedPauli};
use crate::scalar::Scalar;

/// Default term limit for the exact search.
pub const DEFAULT_EXACT_CAP: usize = 24;

/// Hard limit of the exact search, which keeps subsets in a `u64` mask.
pub const MAX_EXACT_TERMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("{terms} terms but {coeffs} coefficients")]
    LengthMismatch { terms: usize, coeffs: usize },
    #[error("coefficient of term {index} is not finite")]
    NonFinite { index: usize },
    #[error(
        "exact search is limited to {cap} terms, got {len}; use the greedy method or raise the cap"
    )]
    OverCap { len: usize, cap: usize },
    #[error("p = {0} is not supported; use 0, a value >= 1, or inf")]
    InvalidP(String),
    #[error("p >= 1 distances need at least one nonzero coefficient")]
    ZeroCoefficients,
}

/// `H = identity_coeff·𝟙 + Σ coeffs[i]·terms[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian<T: Scalar> {
    terms: PauliSet,
    coeffs: Vec<T>,
    identity_coeff: T,
}

impl<T: Scalar> Hamiltonian<T> {
    pub fn new(terms: PauliSet, coeffs: Vec<T>, identity_coeff: T) -> Result<Self, MeasureError> {
        if terms.len() != coeffs.len() {
            return Err(MeasureError::LengthMismatch {
                terms: terms.len(),
                coeffs: coeffs.len(),
            });
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(MeasureError::NonFinite { index });
        }
        if !identity_coeff.is_finite() {
            return Err(MeasureError::NonFinite { index: terms.len() });
        }
        Ok(Hamiltonian {
            terms,
            coeffs,
            identity_coeff,
        })
    }

    /// Builds from signed terms on `n_qubits` qubits. Signs fold into the
    /// coefficients, repeated terms are summed in first-occurrence order and
    /// identity terms go to the identity coefficient.
    pub fn from_terms<I>(n_qubits: usize, items: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (T, SignedPauli)>,
    {
        let mut ops: Vec<PauliOp> = Vec::new();
        let mut coeffs: Vec<T> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut identity = T::zero();
        for (i, (c, p)) in items.into_iter().enumerate() {
            if p.n_qubits() != n_qubits {
                return Err(PauliError::DimensionMismatch {
                    left: n_qubits,
                    right: p.n_qubits(),
                }
                .into());
            }
            if !c.is_finite() {
                return Err(MeasureError::NonFinite { index: i });
            }
            let c = if p.sign.is_negative() { -c } else { c };
            if p.op.is_identity() {
                identity = identity + c;
            } else if let Some(&k) = index.get(&p.op) {
                coeffs[k] = coeffs[k] + c;
            } else {
                index.insert(p.op.clone(), ops.len());
                ops.push(p.op);
                coeffs.push(c);
            }
        }
        Hamiltonian::new(PauliSet::with_qubits(n_qubits, ops)?, coeffs, identity)
    }

    /// Parses `(coefficient, term)` pairs; the qubit count comes from the
    /// first term.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(T, S)]) -> Result<Self, MeasureError> {
        let parsed = pairs
            .iter()
            .map(|(c, s)| Ok((*c, SignedPauli::parse(s.as_ref())?)))
            .collect::<Result<Vec<_>, PauliError>>()?;
        let n = parsed.first().map_or(0, |(_, p)| p.n_qubits());
        Hamiltonian::from_terms(n, parsed)
    }

    /// Every term with coefficient one.
    pub fn unit(terms: PauliSet) -> Self {
        let coeffs = vec![T::one(); terms.len()];
        Hamiltonian {
            terms,
            coeffs,
            identity_coeff: T::zero(),
        }
    }

    pub fn terms(&self) -> &PauliSet {
        &self.terms
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn identity_coeff(&self) -> T {
        self.identity_coeff
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.terms.n_qubits()
    }

    /// Drops zero-coefficient terms.
    pub fn prune_zeros(&self) -> Self {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| !self.coeffs[i].is_zero())
            .collect();
        self.restrict(&keep)
    }

    /// The Hamiltonian on the given term indices.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        Hamiltonian {
            terms: self.terms.subset(indices),
            coeffs: indices.iter().map(|&i| self.coeffs[i]).collect(),
            identity_coeff: self.identity_coeff,
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        Hamiltonian {
            terms: self.terms.clone(),
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
            identity_coeff: self.identity_coeff * factor,
        }
    }

    /// Relabels qubits so that new qubit `q` is old qubit `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Self {
        let ops = self.terms.iter().map(|p| p.permute_qubits(perm)).collect();
        Hamiltonian {
            terms: PauliSet::with_qubits(self.n_qubits(), ops)
                .expect("permutation preserves distinctness"),
            coeffs: self.coeffs.clone(),
            identity_coeff: self.identity_coeff,
        }
    }
}

/// The exponent of a contextual p-distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    /// Term count, ignoring coefficients.
    Zero,
    /// Finite `p >= 1`.
    Finite(f64),
    /// Max-coefficient ratio.
    Infinity,
}

impl PNorm {
    pub fn new(p: f64) -> Result<Self, MeasureError> {
        if p == 0.0 {
            Ok(PNorm::Zero)
        } else if p == f64::INFINITY {
            Ok(PNorm::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(PNorm::Finite(p))
        } else {
            Err(MeasureError::InvalidP(p.to_string()))
        }
    }

    pub fn csep() -> Self {
        PNorm::Finite(2.0)
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::Zero => f.write_str("0"),
            PNorm::Finite(p) => write!(f, "{p}"),
            PNorm::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PNorm {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(PNorm::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| MeasureError::InvalidP(t.to_string()))
                .and_then(PNorm::new),
        }
    }
}

impl Serialize for PNorm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PNorm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Exact,
    Greedy,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "greedy" => Ok(Method::Greedy),
            other => Err(format!(
                "unknown method {other:?}; expected exact or greedy"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    pub method: Method,
    pub exact_cap: usize,
    pub seed: u64,
    /// Greedy starts; the first uses index-order tie-breaking.
    pub restarts: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            method: Method::Exact,
            exact_cap: DEFAULT_EXACT_CAP,
            seed: 0,
            restarts: 16,
        }
    }
}

/// One p-distance and the decontextualizing set that achieves it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PDistance<T> {
    pub p: PNorm,
    pub value: T,
    pub decontextualizing_set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport<T> {
    pub method: Method,
    pub n_terms: usize,
    #[serde(with = "ratio_text")]
    pub cd0: Ratio<usize>,
    /// A smallest-cardinality decontextualizing set (for greedy, the one
    /// found).
    pub decontextualizing_set: Vec<usize>,
    /// Complement of `decontextualizing_set`.
    pub kept_subset: Vec<usize>,
    /// One entry per requested `p`, in request order.
    pub distances: Vec<PDistance<T>>,
}

mod ratio_text {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<usize>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<usize>, D::Error> {
        let s = String::deserialize(d)?;
        let (n, m) = s
            .split_once('/')
            .ok_or_else(|| serde::de::Error::custom("expected n/d"))?;
        let n: usize = n.trim().parse().map_err(serde::de::Error::custom)?;
        let m: usize = m.trim().parse().map_err(serde::de::Error::custom)?;
        if m == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(n, m))
    }
}

impl<T: Scalar> MeasureReport<T> {
    pub fn cd0_f64(&self) -> f64 {
        *self.cd0.numer() as f64 / *self.cd0.denom() as f64
    }

    pub fn distance(&self, p: PNorm) -> Option<T> {
        self.distances.iter().find(|d| d.p == p).map(|d| d.value)
    }

    /// `CD_2`, when it was requested.
    pub fn csep(&self) -> Option<T> {
        self.distance(PNorm::csep())
    }

    /// Re-derives every reported quantity from `h`: each decontextualizing
    /// set leaves a noncontextual complement, `cd0` matches the reported
    /// set's size and each distance matches its set's norm ratio.
    pub fn verify(&self, h: &Hamiltonian<T>) -> Result<(), String> {
        let n = h.len();
        if self.n_terms != n {
            return Err(format!(
                "report covers {} terms, Hamiltonian has {n}",
                self.n_terms
            ));
        }
        let check_set = |set: &[usize]| -> Result<(), String> {
            if set.iter().any(|&i| i >= n) || set.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("malformed index set {set:?}"));
            }
            let kept = complement(set, n);
            if is_contextual(&h.terms.subset(&kept)).is_contextual() {
                return Err(format!("removing {set:?} leaves a contextual set"));
            }
            Ok(())
        };
        check_set(&self.decontextualizing_set)?;
        if self.kept_subset != complement(&self.decontextualizing_set, n) {
            return Err("kept subset is not the complement of the decontextualizing set".into());
        }
        if self.cd0 != cardinality_ratio(self.decontextualizing_set.len(), n) {
            return Err(format!(
                "cd0 {} does not match |S'| = {}",
                self.cd0,
                self.decontextualizing_set.len()
            ));
        }
        for d in &self.distances {
            check_set(&d.decontextualizing_set)?;
            let expected = ratio_of(h, d.p, &d.decontextualizing_set)?;
            let tol = T::from_f64_lossy(1e-9).max(T::epsilon() * T::from_f64_lossy(64.0));
            if (expected - d.value).abs() > tol {
                return Err(format!(
                    "p = {}: reported {} but the set gives {}",
                    d.p, d.value, expected
                ));
            }
        }
        Ok(())
    }
}

fn complement(set: &[usize], n: usize) -> Vec<usize> {
    let mut removed = vec![false; n];
    set.iter().for_each(|&i| removed[i] = true);
    (0..n).filter(|&i| !removed[i]).collect()
}

fn cardinality_ratio(removed: usize, n: usize) -> Ratio<usize> {
    if n == 0 {
        Ratio::new_raw(0, 1)
    } else {
        Ratio::new(removed, n)
    }
}

/// The norm ratio carried by `removed` under exponent `p`.
pub fn ratio_of<T: Scalar>(h: &Hamiltonian<T>, p: PNorm, removed: &[usize]) -> Result<T, String> {
    if p == PNorm::Zero {
        let r = cardinality_ratio(removed.len(), h.len());
        return Ok(T::from_f64_lossy(*r.numer() as f64 / *r.denom() as f64));
    }
    let w = Weights::new(h, p);
    if w.total().is_zero() {
        return Err(MeasureError::ZeroCoefficients.to_string());
    }
    let cost = removed
        .iter()
        .fold(T::zero(), |acc, &i| w.combine(acc, w.of(i)));
    Ok(w.ratio(cost))
}

/// Per-term costs and how they combine under a given exponent.
struct Weights<T> {
    p: PNorm,
    w: Vec<T>,
}

impl<T: Scalar> Weights<T> {
    fn new(h: &Hamiltonian<T>, p: PNorm) -> Self {
        let w = match p {
            PNorm::Zero => vec![T::one(); h.len()],
            PNorm::Finite(e) => h
                .coeffs
                .iter()
                .map(|c| c.abs().powf(T::from_f64_lossy(e)))
                .collect(),
            PNorm::Infinity => h.coeffs.iter().map(|c| c.abs()).collect(),
        };
        Weights { p, w }
    }

    fn of(&self, i: usize) -> T {
        self.w[i]
    }

    fn combine(&self, acc: T, w: T) -> T {
        match self.p {
            PNorm::Infinity => acc.max(w),
            _ => acc + w,
        }
    }

    fn total(&self) -> T {
        self.w
            .iter()
            .fold(T::zero(), |acc, &w| self.combine(acc, w))
    }

    fn ratio(&self, cost: T) -> T {
        let r = cost / self.total();
        match self.p {
            PNorm::Finite(e) => r.powf(T::from_f64_lossy(1.0 / e)),
            _ => r,
        }
    }
}

/// Pairwise commutation as bit rows, for sets of at most 64 operators.
pub(crate) struct MaskGraph {
    rows: Vec<u64>,
}

impl MaskGraph {
    pub(crate) fn new(s: &PauliSet) -> Self {
        assert!(s.len() <= MAX_EXACT_TERMS);
        let rows = (0..s.len())
            .map(|i| {
                (0..s.len())
                    .filter(|&j| j != i && s.get(i).commutes_with(s.get(j)))
                    .fold(0u64, |r, j| r | 1 << j)
            })
            .collect();
        MaskGraph { rows }
    }

    fn closed(&self, v: usize) -> u64 {
        self.rows[v] | 1 << v
    }

    /// Noncontextuality of the subset `mask`: after dropping operators that
    /// commute with the whole subset, every closed neighbourhood must equal
    /// the neighbourhoods of its members.
    pub(crate) fn noncontextual(&self, mask: u64) -> bool {
        let mut rest = mask;
        for v in bits(mask) {
            if self.closed(v) & mask == mask {
                rest &= !(1 << v);
            }
        }
        let mut open = rest;
        while open != 0 {
            let v = open.trailing_zeros() as usize;
            let nv = self.closed(v) & rest;
            if bits(nv).any(|u| self.closed(u) & rest != nv) {
                return false;
            }
            open &= !nv;
        }
        true
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            i
        })
    })
}

fn mask_to_indices(m: u64) -> Vec<usize> {
    bits(m).collect()
}

fn all_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Branch-and-bound over kept subsets, visiting terms in `order` and trying
/// to keep each before removing it. Returns the removed mask of the first
/// minimum-cost completion found.
fn branch_and_bound<T: Scalar>(
    g: &MaskGraph,
    w: &Weights<T>,
    order: &[usize],
    upper: Option<T>,
) -> u64 {
    struct Search<'a, T> {
        g: &'a MaskGraph,
        w: &'a Weights<T>,
        order: &'a [usize],
        upper: Option<T>,
        best: Option<(T, u64)>,
    }

    impl<T: Scalar> Search<'_, T> {
        fn worse(&self, cost: T) -> bool {
            self.best.is_some_and(|(b, _)| cost >= b) || self.upper.is_some_and(|u| cost > u)
        }

        fn run(&mut self, pos: usize, kept: u64, removed: u64, cost: T) {
            if self.worse(cost) {
                return;
            }
            if pos == self.order.len() {
                self.best = Some((cost, removed));
                return;
            }
            let i = self.order[pos];
            let bit = 1u64 << i;
            if self.g.noncontextual(kept | bit) {
                self.run(pos + 1, kept | bit, removed, cost);
            }
            let next = self.w.combine(cost, self.w.of(i));
            self.run(pos + 1, kept, removed | bit, next);
        }
    }

    let mut s = Search {
        g,
        w,
        order,
        upper,
        best: None,
    };
    s.run(0, 0, 0, T::zero());
    s.best
        .map(|(_, r)| r)
        .expect("removing everything is always feasible")
}

fn check_cap(len: usize, cap: usize) -> Result<(), MeasureError> {
    let cap = cap.min(MAX_EXACT_TERMS);
    if len > cap {
        Err(MeasureError::OverCap { len, cap })
    } else {
        Ok(())
    }
}

/// A maximum-cardinality noncontextual subset, lexicographically smallest
/// among ties.
pub fn max_noncontextual_subset(s: &PauliSet, cap: usize) -> Result<Vec<usize>, MeasureError> {
    check_cap(s.len(), cap)?;
    let h = Hamiltonian::<f64>::unit(s.clone());
    let w = Weights::new(&h, PNorm::Zero);
    let order: Vec<usize> = (0..s.len()).collect();
    let removed = branch_and_bound(&MaskGraph::new(s), &w, &order, None);
    Ok(mask_to_indices(all_mask(s.len()) & !removed))
}

/// Exact minimiser of the `p` cost; the returned set is the removed one.
fn exact_removed<T: Scalar>(h: &Hamiltonian<T>, g: &MaskGraph, p: PNorm) -> Vec<usize> {
    let w = Weights::new(h, p);
    let mut order: Vec<usize> = (0..h.len()).collect();
    if p != PNorm::Zero {
        // Heavy terms first tightens the bound early.
        order.sort_by(|&a, &b| w.of(b).partial_cmp(&w.of(a)).unwrap_or(Ordering::Equal));
    }
    mask_to_indices(branch_and_bound(g, &w, &order, None))
}

/// Greedy max-clique on the subgraph induced by `candidates`, grown from
/// `seed` (which must be a clique): repeatedly take the candidate commuting
/// with everything taken so far that has most neighbours among the
/// remaining candidates. `rank` breaks ties (lower wins).
fn greedy_clique(s: &PauliSet, seed: &[usize], candidates: &[usize], rank: &[usize]) -> Vec<usize> {
    let commute = |u: usize, v: usize| s.get(u).commutes_with(s.get(v));
    let mut clique = seed.to_vec();
    let mut cand: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&u| !seed.contains(&u) && seed.iter().all(|&v| commute(u, v)))
        .collect();
    while !cand.is_empty() {
        let degree = |v: usize| cand.iter().filter(|&&u| u != v && commute(u, v)).count();
        let &v = cand
            .iter()
            .max_by(|&&a, &&b| degree(a).cmp(&degree(b)).then(rank[b].cmp(&rank[a])))
            .expect("non-empty");
        clique.push(v);
        cand.retain(|&u| u != v && commute(u, v));
    }
    clique.sort_unstable();
    clique
}

/// One greedy pass with tie-breaking ranks `rank`. Operators commuting with
/// the whole set are left out of the clique steps and rejoin at the end.
fn greedy_once(s: &PauliSet, rank: &[usize]) -> Vec<usize> {
    let universal = crate::compat::build_graph(s).universal();
    let core: Vec<usize> = (0..s.len()).filter(|i| !universal.contains(i)).collect();
    let diagonal: Vec<usize> = core
        .iter()
        .copied()
        .filter(|&i| s.get(i).is_diagonal())
        .collect();
    let first = greedy_clique(s, &[], &core, rank);
    let mut chosen = if diagonal.len() >= first.len() {
        greedy_clique(s, &diagonal, &core, rank)
    } else {
        first
    };

    loop {
        let candidates: Vec<usize> = core
            .iter()
            .copied()
            .filter(|&i| {
                !chosen.contains(&i) && chosen.iter().all(|&c| !s.get(i).commutes_with(s.get(c)))
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        chosen.extend(greedy_clique(s, &[], &candidates, rank));
    }

    let mut rest: Vec<usize> = (0..s.len()).filter(|i| !chosen.contains(i)).collect();
    rest.sort_by_key(|&i| rank[i]);
    for i in rest {
        if chosen.iter().all(|&c| s.get(i).commutes_with(s.get(c))) {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Tie-breaking ranks for each greedy start: identity for the first, a
/// seeded shuffle for the rest.
fn restart_ranks(n: usize, seed: u64, restarts: usize) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..restarts.max(1))
        .map(|k| {
            let mut r: Vec<usize> = (0..n).collect();
            if k > 0 {
                r.shuffle(&mut rng);
            }
            r
        })
        .collect()
}

fn greedy_runs(s: &PauliSet, seed: u64, restarts: usize) -> Vec<Vec<usize>> {
    let runs: Vec<Vec<usize>> = restart_ranks(s.len(), seed, restarts)
        .par_iter()
        .map(|r| greedy_once(s, r))
        .collect();
    for kept in &runs {
        assert!(
            !is_contextual(&s.subset(kept)).is_contextual(),
            "greedy produced a contextual subset"
        );
    }
    runs
}

/// A large noncontextual subset built greedily: a big commuting clique
/// (the diagonal terms when they are at least as many), then cliques that
/// anticommute with everything chosen so far, then any operator commuting
/// with all of the chosen ones. Runs `restarts` starts from `seed` and
/// returns the largest result.
pub fn greedy_noncontextual(s: &PauliSet, seed: u64, restarts: usize) -> Vec<usize> {
    greedy_runs(s, seed, restarts)
        .into_iter()
        .rev()
        .max_by_key(|k| k.len())
        .unwrap_or_default()
}

/// `CD_p` of `h` for a single `p`.
pub fn cd_p<T: Scalar>(
    h: &Hamiltonian<T>,
    p: PNorm,
    method: Method,
) -> Result<MeasureReport<T>, MeasureError> {
    measure(
        h,
        &[p],
        &MeasureOptions {
            method,
            ..MeasureOptions::default()
        },
    )
}

/// `CD_0` plus every requested `CD_p`, each with its own decontextualizing
/// set.
pub fn measure<T: Scalar>(
    h: &Hamiltonian<T>,
    ps: &[PNorm],
    opts: &MeasureOptions,
) -> Result<MeasureReport<T>, MeasureError> {
    let n = h.len();
    if ps.iter().any(|&p| p != PNorm::Zero) && Weights::new(h, PNorm::Infinity).total().is_zero() {
        return Err(MeasureError::ZeroCoefficients);
    }
    let best_for = |p: PNorm| -> Result<Vec<usize>, MeasureError> {
        match opts.method {
            Method::Exact => Ok(exact_removed(h, &MaskGraph::new(&h.terms), p)),
            Method::Greedy => unreachable!("handled below"),
        }
    };

    let removed_for: Vec<(PNorm, Vec<usize>)> = match opts.method {
        Method::Exact => {
            check_cap(n, opts.exact_cap)?;
            let mut out = vec![(PNorm::Zero, best_for(PNorm::Zero)?)];
            for &p in ps.iter().filter(|&&p| p != PNorm::Zero) {
                out.push((p, best_for(p)?));
            }
            out
        }
        Method::Greedy => {
            let runs: Vec<Vec<usize>> = greedy_runs(&h.terms, opts.seed, opts.restarts)
                .into_iter()
                .map(|k| complement(&k, n))
                .collect();
            let mut out = Vec::new();
            for p in
                std::iter::once(PNorm::Zero).chain(ps.iter().copied().filter(|&p| p != PNorm::Zero))
            {
                let w = Weights::new(h, p);
                let cost =
                    |r: &Vec<usize>| r.iter().fold(T::zero(), |acc, &i| w.combine(acc, w.of(i)));
                let best = runs
                    .iter()
                    .min_by(|a, b| cost(a).partial_cmp(&cost(b)).unwrap_or(Ordering::Equal))
                    .cloned()
                    .unwrap_or_default();
                out.push((p, best));
            }
            out
        }
    };

    let zero_set = removed_for[0].1.clone();
    let distances = ps
        .iter()
        .map(|&p| {
            let set = removed_for
                .iter()
                .find(|(q, _)| *q == p)
                .expect("every p computed")
                .1
                .clone();
            let value = ratio_of(h, p, &set).map_err(|_| MeasureError::ZeroCoefficients)?;
            Ok(PDistance {
                p,
                value,
                decontextualizing_set: set,
            })
        })
        .collect::<Result<Vec<_>, MeasureError>>()?;
    Ok(MeasureReport {
        method: opts.method,
        n_terms: n,
        cd0: cardinality_ratio(zero_set.len(), n),
        kept_subset: complement(&zero_set, n),
        decontextualizing_set: zero_set,
        distances,
    })
}
