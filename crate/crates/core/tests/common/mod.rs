//! Shared oracles and generators for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use pauli_contextuality::compat::PauliSet;
use pauli_contextuality::pauli::{commuting_product, PauliOp, SignedPauli};
use pauli_contextuality::trees::DeterminingTree;
use pauli_contextuality::Hamiltonian64;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture_paths() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixtures_dir())
        .expect("fixtures directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "ham"))
        .collect();
    v.sort();
    v
}

pub fn op(s: &str) -> PauliOp {
    s.parse().expect("valid Pauli")
}

pub fn set(items: &[&str]) -> PauliSet {
    PauliSet::parse(items).expect("valid set")
}

fn single(c: char) -> DMatrix<Complex64> {
    let (o, z, i) = (
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    let m = match c {
        'I' => [o, z, z, o],
        'X' => [z, o, o, z],
        'Y' => [z, -i, i, z],
        'Z' => [o, z, z, -o],
        _ => unreachable!(),
    };
    DMatrix::from_row_slice(2, 2, &m)
}

/// Dense matrix of `p`, with the leftmost letter as the most significant
/// tensor factor.
pub fn dense(p: &PauliOp) -> DMatrix<Complex64> {
    p.to_string()
        .chars()
        .fold(DMatrix::identity(1, 1), |acc, c| acc.kronecker(&single(c)))
}

pub fn dense_signed(p: &SignedPauli) -> DMatrix<Complex64> {
    dense(&p.op) * Complex64::new(f64::from(p.sign.to_i8()), 0.0)
}

pub fn dense_hamiltonian(h: &Hamiltonian64) -> DMatrix<Complex64> {
    let dim = 1usize << h.n_qubits();
    let mut m = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(h.identity_coeff(), 0.0);
    for (p, &c) in h.terms().iter().zip(h.coeffs()) {
        m += dense(p) * Complex64::new(c, 0.0);
    }
    m
}

pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_op<R: Rng>(rng: &mut R, n: usize) -> PauliOp {
    let s: String = (0..n)
        .map(|_| *LETTERS.choose(rng).expect("non-empty"))
        .collect();
    op(&s)
}

pub fn random_non_identity<R: Rng>(rng: &mut R, n: usize) -> PauliOp {
    loop {
        let p = random_op(rng, n);
        if !p.is_identity() {
            return p;
        }
    }
}

/// A random set of distinct non-identity operators of size at most `max`.
pub fn random_set<R: Rng>(rng: &mut R, n: usize, max: usize) -> PauliSet {
    let k = rng.random_range(1..=max);
    let mut ops: Vec<PauliOp> = Vec::new();
    while ops.len() < k {
        let p = random_non_identity(rng, n);
        if !ops.contains(&p) {
            ops.push(p);
        }
    }
    PauliSet::with_qubits(n, ops).expect("distinct")
}

/// Every non-identity Pauli on `n` qubits, in lexicographic order.
pub fn all_non_identity(n: usize) -> Vec<PauliOp> {
    let mut out = Vec::new();
    for code in 1..4usize.pow(n as u32) {
        let s: String = (0..n).rev().map(|q| LETTERS[code >> (2 * q) & 3]).collect();
        out.push(op(&s));
    }
    out.sort();
    out
}

/// All subsets of `items` with `1..=max` elements.
pub fn subsets_up_to<T: Clone>(items: &[T], max: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(
        items: &[T],
        start: usize,
        max: usize,
        cur: &mut Vec<T>,
        out: &mut Vec<Vec<T>>,
    ) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, i + 1, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, 0, max, &mut Vec::new(), &mut out);
    out
}

/// A random valid determining tree whose leaves come from `pool`. Every
/// node has two or three children up to `depth`.
pub fn random_tree<R: Rng>(rng: &mut R, pool: &[PauliOp], depth: usize) -> DeterminingTree {
    if depth == 0 || rng.random_bool(0.3) {
        return DeterminingTree::leaf(pool.choose(rng).expect("non-empty pool").clone());
    }
    let k = rng.random_range(2..=3);
    let mut children: Vec<DeterminingTree> = Vec::new();
    for _ in 0..32 {
        if children.len() == k {
            break;
        }
        let c = random_tree(rng, pool, depth - 1);
        if children
            .iter()
            .all(|o| o.root().op.commutes_with(&c.root().op))
        {
            children.push(c);
        }
    }
    if children.len() < 2 {
        // A repeated leaf always commutes with itself.
        let c = children
            .pop()
            .unwrap_or_else(|| DeterminingTree::leaf(pool[0].clone()));
        children = vec![c.clone(), c];
    }
    DeterminingTree::from_children(children).expect("siblings commute")
}

/// A random operator `f` and a pool of operators commuting with it that
/// contains `f` itself.
pub fn commuting_pool<R: Rng>(rng: &mut R, n: usize, size: usize) -> (PauliOp, Vec<PauliOp>) {
    let f = random_non_identity(rng, n);
    let mut pool = vec![f.clone()];
    while pool.len() < size {
        let p = random_non_identity(rng, n);
        if p.commutes_with(&f) {
            pool.push(p);
        }
    }
    (f, pool)
}

/// Product of signed Paulis that pairwise commute.
pub fn product(items: &[SignedPauli]) -> SignedPauli {
    items[1..].iter().fold(items[0].clone(), |acc, p| {
        commuting_product(&acc, p).expect("commuting")
    })
}
