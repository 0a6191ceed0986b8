//! Determining trees: checkable witnesses that a set of measurements fixes
//! the outcome of some operator.
//!
//! A tree is valid over a universe `S` when siblings pairwise commute, every
//! parent equals the product of its children (sign included) and every leaf
//! is `+P` for some `P` in `S`. The leaves with odd multiplicity form the
//! determining set; the value forced on the root is the product of their
//! outcomes.
//!
//! Children are kept in canonical (sorted) order. Since siblings commute the
//! order carries no meaning.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat::PauliSet;
use crate::contextuality::{Assignment, GraphForm};
use crate::pauli::{commuting_product, PauliError, PauliOp, Sign, SignedPauli};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "TreeRepr", from = "TreeRepr")]
#[derive(PartialOrd, Ord, Hash)]
pub struct DeterminingTree {
    root: SignedPauli,
    children: Vec<DeterminingTree>,
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    sign: Sign,
    pauli: PauliOp,
    #[serde(default)]
    children: Vec<DeterminingTree>,
}

impl From<DeterminingTree> for TreeRepr {
    fn from(t: DeterminingTree) -> Self {
        TreeRepr {
            sign: t.root.sign,
            pauli: t.root.op,
            children: t.children,
        }
    }
}

impl From<TreeRepr> for DeterminingTree {
    fn from(r: TreeRepr) -> Self {
        DeterminingTree::node(SignedPauli::new(r.sign, r.pauli), r.children)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("tree is not binary")]
    NotBinary,
    #[error("assignment has no value for leaf {0}")]
    IncompleteAssignment(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn contract(msg: impl Into<String>) -> TreeError {
    TreeError::Contract(msg.into())
}

/// The first node that breaks a validity rule, located by the child indices
/// leading to it from the root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node at path {path:?}: {kind}")]
pub struct Violation {
    pub path: Vec<usize>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    SiblingsAnticommute {
        first: usize,
        second: usize,
    },
    ProductMismatch {
        expected: Box<SignedPauli>,
        found: Box<SignedPauli>,
    },
    LeafNotInUniverse(PauliOp),
    NegativeLeaf(SignedPauli),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} qubits, found {found}")
            }
            ViolationKind::SiblingsAnticommute { first, second } => {
                write!(f, "children {first} and {second} anticommute")
            }
            ViolationKind::ProductMismatch { expected, found } => {
                write!(f, "children multiply to {expected} but the node is {found}")
            }
            ViolationKind::LeafNotInUniverse(op) => {
                write!(f, "leaf {op} is not in the measurement set")
            }
            ViolationKind::NegativeLeaf(p) => write!(f, "leaf {p} carries a negative sign"),
        }
    }
}

impl DeterminingTree {
    /// A single-node tree `+op`.
    pub fn leaf(op: PauliOp) -> Self {
        DeterminingTree {
            root: SignedPauli::plus(op),
            children: Vec::new(),
        }
    }

    /// A node with the given label and children. No checks are made; see
    /// [`validate`].
    pub fn node(root: SignedPauli, mut children: Vec<DeterminingTree>) -> Self {
        children.sort();
        DeterminingTree { root, children }
    }

    /// A node whose label is the product of `children`, which must pairwise
    /// commute.
    pub fn from_children(children: Vec<DeterminingTree>) -> Result<Self, TreeError> {
        let root = children_product(&children)?;
        Ok(DeterminingTree::node(root, children))
    }

    pub fn root(&self) -> &SignedPauli {
        &self.root
    }

    pub fn children(&self) -> &[DeterminingTree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.root.n_qubits()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(DeterminingTree::node_count)
            .sum::<usize>()
    }

    /// Every internal node has exactly two children.
    pub fn is_binary(&self) -> bool {
        (self.is_leaf() || self.children.len() == 2)
            && self.children.iter().all(DeterminingTree::is_binary)
    }

    /// Leaf labels in depth-first order.
    pub fn leaves(&self) -> Vec<&SignedPauli> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a SignedPauli>) {
        if self.is_leaf() {
            out.push(&self.root);
        }
        self.children.iter().for_each(|c| c.collect_leaves(out));
    }

    /// Multiplicity of each unsigned leaf operator.
    pub fn leaf_multiset(&self) -> BTreeMap<PauliOp, usize> {
        let mut m = BTreeMap::new();
        for leaf in self.leaves() {
            *m.entry(leaf.op.clone()).or_insert(0) += 1;
        }
        m
    }

    /// Indented text form: one node per line, two spaces per level, explicit
    /// signs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(0, &mut out);
        out
    }

    fn write_text(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&self.root.to_explicit_string());
        out.push('\n');
        self.children
            .iter()
            .for_each(|c| c.write_text(depth + 1, out));
    }

    /// Parses the output of [`to_text`](Self::to_text).
    pub fn parse_text(text: &str) -> Result<Self, TreeError> {
        // Stack of (depth, label, finished children).
        let mut stack: Vec<(usize, SignedPauli, Vec<DeterminingTree>)> = Vec::new();
        let mut root_seen = false;
        for (lineno, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
            if line.trim().is_empty() {
                continue;
            }
            let indent = line.len() - line.trim_start_matches(' ').len();
            let parse_err = |message: String| TreeError::Parse {
                line: lineno,
                message,
            };
            if indent % 2 != 0 {
                return Err(parse_err(
                    "indentation must be a multiple of two spaces".into(),
                ));
            }
            let depth = indent / 2;
            let label = SignedPauli::parse(line.trim()).map_err(|e| parse_err(e.to_string()))?;
            if depth == 0 && root_seen {
                return Err(parse_err("more than one root".into()));
            }
            if depth > stack.len() || (depth > 0 && stack.is_empty()) {
                return Err(parse_err("node is indented too deeply".into()));
            }
            fold_stack(&mut stack, depth);
            root_seen = true;
            stack.push((depth, label, Vec::new()));
        }
        if stack.is_empty() {
            return Err(TreeError::Parse {
                line: 0,
                message: "empty tree".into(),
            });
        }
        fold_stack(&mut stack, 1);
        let (_, root, children) = stack.pop().expect("root");
        Ok(DeterminingTree::node(root, children))
    }
}

/// Pops finished nodes deeper than or equal to `depth` into their parents.
fn fold_stack(stack: &mut Vec<(usize, SignedPauli, Vec<DeterminingTree>)>, depth: usize) {
    while stack.last().is_some_and(|(d, _, _)| *d >= depth) && stack.len() > 1 {
        let (_, label, children) = stack.pop().expect("non-empty");
        stack
            .last_mut()
            .expect("parent")
            .2
            .push(DeterminingTree::node(label, children));
    }
}

impl fmt::Display for DeterminingTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn children_product(children: &[DeterminingTree]) -> Result<SignedPauli, TreeError> {
    let first = children
        .first()
        .ok_or_else(|| contract("a parent needs at least one child"))?;
    for (i, a) in children.iter().enumerate() {
        for b in &children[i + 1..] {
            if !a.root.op.commutes_with(&b.root.op) {
                return Err(PauliError::Anticommuting {
                    left: a.root.to_string(),
                    right: b.root.to_string(),
                }
                .into());
            }
        }
    }
    children[1..].iter().try_fold(first.root.clone(), |acc, c| {
        Ok(commuting_product(&acc, &c.root)?)
    })
}

/// Checks sibling commutation and parent products at every node.
pub fn check_structure(tree: &DeterminingTree) -> Result<(), Violation> {
    check_node(tree, None, tree.n_qubits(), &mut Vec::new())
}

/// Full validity over `universe`: structure plus every leaf being `+P` with
/// `P` in the universe.
pub fn validate(tree: &DeterminingTree, universe: &PauliSet) -> Result<(), Violation> {
    let n = if universe.is_empty() {
        tree.n_qubits()
    } else {
        universe.n_qubits()
    };
    check_node(tree, Some(universe), n, &mut Vec::new())
}

fn check_node(
    t: &DeterminingTree,
    universe: Option<&PauliSet>,
    n: usize,
    path: &mut Vec<usize>,
) -> Result<(), Violation> {
    let fail = |path: &Vec<usize>, kind| {
        Err(Violation {
            path: path.clone(),
            kind,
        })
    };
    if t.root.n_qubits() != n {
        return fail(
            path,
            ViolationKind::DimensionMismatch {
                expected: n,
                found: t.root.n_qubits(),
            },
        );
    }
    if t.is_leaf() {
        if let Some(u) = universe {
            if t.root.sign.is_negative() {
                return fail(path, ViolationKind::NegativeLeaf(t.root.clone()));
            }
            if !u.contains(&t.root.op) {
                return fail(path, ViolationKind::LeafNotInUniverse(t.root.op.clone()));
            }
        }
        return Ok(());
    }
    for (i, c) in t.children.iter().enumerate() {
        if c.root.n_qubits() != n {
            path.push(i);
            return fail(
                path,
                ViolationKind::DimensionMismatch {
                    expected: n,
                    found: c.root.n_qubits(),
                },
            );
        }
    }
    for i in 0..t.children.len() {
        for j in i + 1..t.children.len() {
            if !t.children[i].root.op.commutes_with(&t.children[j].root.op) {
                return fail(
                    path,
                    ViolationKind::SiblingsAnticommute {
                        first: i,
                        second: j,
                    },
                );
            }
        }
    }
    let product = children_product(&t.children).expect("siblings commute");
    if product != t.root {
        return fail(
            path,
            ViolationKind::ProductMismatch {
                expected: Box::new(product),
                found: Box::new(t.root.clone()),
            },
        );
    }
    for (i, c) in t.children.iter().enumerate() {
        path.push(i);
        check_node(c, universe, n, path)?;
        path.pop();
    }
    Ok(())
}

/// Leaves of odd multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DeterminingSet(BTreeSet<PauliOp>);

impl DeterminingSet {
    pub fn contains(&self, op: &PauliOp) -> bool {
        self.0.contains(op)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PauliOp> {
        self.0.iter()
    }
}

impl FromIterator<PauliOp> for DeterminingSet {
    fn from_iter<I: IntoIterator<Item = PauliOp>>(iter: I) -> Self {
        DeterminingSet(iter.into_iter().collect())
    }
}

pub fn determining_set(tree: &DeterminingTree) -> DeterminingSet {
    let mut odd = BTreeSet::new();
    for leaf in tree.leaves() {
        if !odd.remove(&leaf.op) {
            odd.insert(leaf.op.clone());
        }
    }
    DeterminingSet(odd)
}

fn leaf_value(a: &Assignment, op: &PauliOp) -> Result<Sign, TreeError> {
    a.get(op)
        .ok_or_else(|| TreeError::IncompleteAssignment(op.to_string()))
}

/// The outcome forced on the (signed) root label: the product of leaf signs
/// times the product of the assigned outcomes over the determining set.
pub fn evaluate(tree: &DeterminingTree, assignment: &Assignment) -> Result<Sign, TreeError> {
    let leaves = tree.leaves();
    let mut value = Sign::Plus;
    for leaf in &leaves {
        leaf_value(assignment, &leaf.op)?;
        value = value * leaf.sign;
    }
    for op in determining_set(tree).iter() {
        value = value * leaf_value(assignment, op)?;
    }
    Ok(value)
}

/// The same outcome as [`evaluate`], computed as the product over every leaf
/// with multiplicity.
pub fn evaluate_by_leaves(
    tree: &DeterminingTree,
    assignment: &Assignment,
) -> Result<Sign, TreeError> {
    tree.leaves().into_iter().try_fold(Sign::Plus, |acc, leaf| {
        Ok(acc * leaf.sign * leaf_value(assignment, &leaf.op)?)
    })
}

/// An equivalent tree in which every internal node has exactly two
/// children. A parent of `m > 2` children keeps its last child and gains a
/// new child for the product of the others, recursively; single-child nodes
/// are collapsed onto their child.
pub fn binarize(tree: &DeterminingTree) -> DeterminingTree {
    let mut children: Vec<DeterminingTree> = tree.children.iter().map(binarize).collect();
    match children.len() {
        0 => tree.clone(),
        1 => children.pop().expect("one child"),
        2 => DeterminingTree::node(tree.root.clone(), children),
        _ => {
            let last = children.pop().expect("non-empty");
            let rest = cascade(children);
            DeterminingTree::node(tree.root.clone(), vec![rest, last])
        }
    }
}

fn cascade(mut children: Vec<DeterminingTree>) -> DeterminingTree {
    if children.len() == 1 {
        return children.pop().expect("one child");
    }
    let last = children.pop().expect("non-empty");
    let rest = cascade(children);
    let root = commuting_product(&rest.root, &last.root).expect("children of a valid node commute");
    DeterminingTree::node(root, vec![rest, last])
}

fn node_at<'a>(t: &'a DeterminingTree, path: &[usize]) -> &'a DeterminingTree {
    path.iter().fold(t, |n, &i| &n.children[i])
}

fn node_at_mut<'a>(t: &'a mut DeterminingTree, path: &[usize]) -> &'a mut DeterminingTree {
    path.iter().fold(t, |n, &i| &mut n.children[i])
}

/// Path to the shallowest node equal to `f` that sits at depth two or more.
fn shallowest_deep_occurrence(t: &DeterminingTree, f: &SignedPauli) -> Option<Vec<usize>> {
    let mut queue: VecDeque<Vec<usize>> = VecDeque::from([Vec::new()]);
    while let Some(path) = queue.pop_front() {
        let node = node_at(t, &path);
        if path.len() >= 2 && node.root == *f {
            return Some(path);
        }
        for i in 0..node.children.len() {
            let mut p = path.clone();
            p.push(i);
            queue.push_back(p);
        }
    }
    None
}

/// Moves every occurrence of `f` up to be a child of the root, for an `f`
/// commuting with every leaf. The root and the leaf multiset are unchanged.
///
/// Each step rewrites a grandparent `G -> {P, S}`, `P -> {f, Q}` into
/// `G -> {f, M}`, `M -> {Q, S}`. When `G` is the root, `P` is replaced by
/// `f` and `Q` directly, so the root may end up with more than two children.
pub fn hoist_universal(
    tree: &DeterminingTree,
    f: &SignedPauli,
) -> Result<DeterminingTree, TreeError> {
    if !tree.is_binary() {
        return Err(TreeError::NotBinary);
    }
    if f.n_qubits() != tree.n_qubits() {
        return Err(PauliError::DimensionMismatch {
            left: tree.n_qubits(),
            right: f.n_qubits(),
        }
        .into());
    }
    if let Some(leaf) = tree
        .leaves()
        .into_iter()
        .find(|l| !l.op.commutes_with(&f.op))
    {
        return Err(contract(format!("{f} anticommutes with leaf {leaf}")));
    }

    let mut t = tree.clone();
    let limit = 4 * t.node_count() * t.node_count() + 16;
    for _ in 0..limit {
        let Some(path) = shallowest_deep_occurrence(&t, f) else {
            return Ok(t);
        };
        let (g_path, p_idx, f_idx) = (
            &path[..path.len() - 2],
            path[path.len() - 2],
            path[path.len() - 1],
        );
        let g = node_at_mut(&mut t, g_path);
        let parent = g.children.remove(p_idx);
        let mut pc = parent.children;
        let f_node = pc.remove(f_idx);
        let q = pc
            .pop()
            .ok_or_else(|| contract("parent of the hoisted node has one child"))?;
        if g_path.is_empty() {
            g.children.push(f_node);
            g.children.push(q);
        } else {
            let s = g
                .children
                .pop()
                .ok_or_else(|| contract("grandparent has one child"))?;
            let m = DeterminingTree::from_children(vec![q, s])?;
            g.children = vec![f_node, m];
        }
        g.children.sort();
    }
    Err(contract("hoisting did not terminate"))
}

/// Joins trees for `A` and `-A` with equal determining sets under a root
/// `-𝟙`, giving a tree with empty determining set.
pub fn merge_identity_witness(
    tau: &DeterminingTree,
    tau_prime: &DeterminingTree,
) -> Result<DeterminingTree, TreeError> {
    if tau_prime.root != -&tau.root {
        return Err(contract(format!(
            "roots {} and {} are not negatives of each other",
            tau.root, tau_prime.root
        )));
    }
    check_structure(tau)?;
    check_structure(tau_prime)?;
    if determining_set(tau) != determining_set(tau_prime) {
        return Err(contract("determining sets differ"));
    }
    Ok(DeterminingTree::node(
        SignedPauli::minus_identity(tau.n_qubits()),
        vec![tau.clone(), tau_prime.clone()],
    ))
}

/// Splits a `-𝟙` tree with empty determining set into trees for `+A` and
/// `-A` (in that order) with equal determining sets. Non-binary input is
/// binarized first.
pub fn split_identity_witness(
    tree: &DeterminingTree,
) -> Result<(DeterminingTree, DeterminingTree), TreeError> {
    if *tree.root() != SignedPauli::minus_identity(tree.n_qubits()) {
        return Err(contract(format!("root is {}, not -𝟙", tree.root)));
    }
    check_structure(tree)?;
    if !determining_set(tree).is_empty() {
        return Err(contract("determining set is not empty"));
    }
    let b = binarize(tree);
    let [x, y] = <[DeterminingTree; 2]>::try_from(b.children)
        .map_err(|_| contract("root of the binarized tree does not have two children"))?;
    if y.root != -&x.root {
        return Err(contract("children of -𝟙 are not of the form A, -A"));
    }
    if determining_set(&x) != determining_set(&y) {
        return Err(contract("halves have different determining sets"));
    }
    Ok(if x.root.sign.is_negative() {
        (y, x)
    } else {
        (x, y)
    })
}

/// From trees `tau` for `A` and `tau_prime` for `-A` sharing determining set
/// `D`, and a `b` in `D`, builds a tree for `-b` whose determining set is
/// exactly `{b}`.
///
/// Walks the path `A = C0, C1, ..., Cd = b` in (binarized) `tau`. With `Ci'`
/// the sibling of `Ci` and `tau_i` its subtree, `T0 = tau_prime` and
/// `Ti = -Ci -> {T(i-1), tau_i}`.
pub fn negated_leaf_witness(
    tau: &DeterminingTree,
    tau_prime: &DeterminingTree,
    b: &PauliOp,
) -> Result<DeterminingTree, TreeError> {
    if tau_prime.root != -&tau.root {
        return Err(contract(format!(
            "roots {} and {} are not negatives of each other",
            tau.root, tau_prime.root
        )));
    }
    check_structure(tau)?;
    check_structure(tau_prime)?;
    let shared = determining_set(tau);
    if shared != determining_set(tau_prime) {
        return Err(contract("determining sets differ"));
    }
    if !shared.contains(b) {
        return Err(contract(format!(
            "{b} is not in the shared determining set"
        )));
    }

    let tau = binarize(tau);
    let path = leaf_path(&tau, b).ok_or_else(|| contract(format!("{b} is not a leaf")))?;
    let mut acc = tau_prime.clone();
    let mut node = &tau;
    for &i in &path {
        let on_path = &node.children[i];
        let sibling = node.children[1 - i].clone();
        acc = DeterminingTree::node(-&on_path.root, vec![acc, sibling]);
        node = on_path;
    }
    debug_assert!(check_structure(&acc).is_ok());
    Ok(acc)
}

fn leaf_path(t: &DeterminingTree, b: &PauliOp) -> Option<Vec<usize>> {
    if t.is_leaf() {
        return (t.root.op == *b).then(Vec::new);
    }
    t.children.iter().enumerate().find_map(|(i, c)| {
        leaf_path(c, b).map(|mut p| {
            p.insert(0, i);
            p
        })
    })
}

/// A `-𝟙` tree with empty determining set over a contextual quadruple. The
/// operators may be given in any order; they are relabelled to match
/// `form`.
///
/// Each construction pairs a tree for some `R` with one for `-R`, both using
/// the same odd leaves:
/// - Form1: `((AB)D)C` and `((AC)D)B`
/// - Form2: `(AC)D` and `((BD)C)(AB)`
/// - Form3: `(AB)(CD)` and `(AC)(BD)`
pub fn witness_from_quadruple(
    form: GraphForm,
    ops: [&PauliOp; 4],
) -> Result<DeterminingTree, TreeError> {
    let n = ops[0].n_qubits();
    if let Some(bad) = ops.iter().find(|o| o.n_qubits() != n) {
        return Err(PauliError::DimensionMismatch {
            left: n,
            right: bad.n_qubits(),
        }
        .into());
    }
    let labels = (0..256usize)
        .map(|k| [k >> 6 & 3, k >> 4 & 3, k >> 2 & 3, k & 3])
        .filter(|p| (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])))
        .find(|p| form.matches(p.map(|i| ops[i])))
        .ok_or_else(|| {
            contract(format!(
                "operators do not have the {form} compatibility pattern"
            ))
        })?;
    let [a, b, c, d] = labels.map(|i| DeterminingTree::leaf(ops[i].clone()));
    let join = |x: &DeterminingTree, y: &DeterminingTree| {
        DeterminingTree::from_children(vec![x.clone(), y.clone()])
    };

    let (r, r_neg) = match form {
        GraphForm::Form1 => {
            let left = join(&join(&join(&a, &b)?, &d)?, &c)?;
            let right = join(&join(&join(&a, &c)?, &d)?, &b)?;
            (left, right)
        }
        GraphForm::Form2 => {
            let left = join(&join(&a, &c)?, &d)?;
            let right = join(&join(&join(&b, &d)?, &c)?, &join(&a, &b)?)?;
            (left, right)
        }
        GraphForm::Form3 => {
            let left = join(&join(&a, &b)?, &join(&c, &d)?)?;
            let right = join(&join(&a, &c)?, &join(&b, &d)?)?;
            (left, right)
        }
    };
    merge_identity_witness(&r, &r_neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(s: &str) -> SignedPauli {
        s.parse().unwrap()
    }

    fn op(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn leaf(s: &str) -> DeterminingTree {
        DeterminingTree::leaf(op(s))
    }

    fn pm() -> PauliSet {
        PauliSet::parse(&["XI", "IX", "ZI", "IZ"]).unwrap()
    }

    /// `+YY -> {+XZ -> {XI, IZ}, +ZX -> {ZI, IX}}`
    fn fig_plus() -> DeterminingTree {
        DeterminingTree::node(
            sp("YY"),
            vec![
                DeterminingTree::node(sp("XZ"), vec![leaf("XI"), leaf("IZ")]),
                DeterminingTree::node(sp("ZX"), vec![leaf("ZI"), leaf("IX")]),
            ],
        )
    }

    /// `-YY -> {+XX -> {XI, IX}, +ZZ -> {ZI, IZ}}`
    fn fig_minus() -> DeterminingTree {
        DeterminingTree::node(
            sp("-YY"),
            vec![
                DeterminingTree::node(sp("XX"), vec![leaf("XI"), leaf("IX")]),
                DeterminingTree::node(sp("ZZ"), vec![leaf("ZI"), leaf("IZ")]),
            ],
        )
    }

    #[test]
    fn peres_mermin_trees_validate() {
        assert_eq!(validate(&fig_plus(), &pm()), Ok(()));
        assert_eq!(validate(&fig_minus(), &pm()), Ok(()));
        let all: DeterminingSet = pm().iter().cloned().collect();
        assert_eq!(determining_set(&fig_plus()), all);
        assert_eq!(determining_set(&fig_minus()), all);
    }

    #[test]
    fn anticommuting_siblings_are_reported() {
        let t = DeterminingTree::node(
            sp("YY"),
            vec![
                DeterminingTree::node(sp("XZ"), vec![leaf("XI"), leaf("IZ")]),
                DeterminingTree::node(sp("XZ"), vec![leaf("XI"), leaf("IZ")]),
            ],
        );
        // XZ and XZ commute, so build a genuine anticommuting pair instead.
        assert!(validate(&t, &pm()).is_err());
        let t = DeterminingTree::node(sp("YI"), vec![leaf("XI"), leaf("ZI")]);
        let v = validate(&t, &pm()).unwrap_err();
        assert_eq!(v.path, Vec::<usize>::new());
        assert_eq!(
            v.kind,
            ViolationKind::SiblingsAnticommute {
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn flipped_root_sign_is_reported() {
        let t = DeterminingTree::node(-fig_plus().root().clone(), fig_plus().children().to_vec());
        let v = validate(&t, &pm()).unwrap_err();
        assert_eq!(
            v.kind,
            ViolationKind::ProductMismatch {
                expected: Box::new(sp("YY")),
                found: Box::new(sp("-YY"))
            }
        );

        let mut inner = fig_plus();
        inner.children[1].root = sp("-ZX");
        let v = validate(&inner, &pm()).unwrap_err();
        assert!(matches!(v.kind, ViolationKind::ProductMismatch { .. }));
    }

    #[test]
    fn leaves_must_be_positive_members() {
        let t = DeterminingTree::node(sp("XX"), vec![leaf("XI"), leaf("IX")]);
        let u = PauliSet::parse(&["XI"]).unwrap();
        let v = validate(&t, &u).unwrap_err();
        assert_eq!(v.path, vec![0]);
        assert_eq!(v.kind, ViolationKind::LeafNotInUniverse(op("IX")));

        let t = DeterminingTree::node(
            sp("-XX"),
            vec![DeterminingTree::node(sp("-XI"), vec![]), leaf("IX")],
        );
        assert!(check_structure(&t).is_ok());
        let v = validate(&t, &pm()).unwrap_err();
        assert_eq!(v.kind, ViolationKind::NegativeLeaf(sp("-XI")));
    }

    #[test]
    fn single_node_determining_set() {
        assert_eq!(
            determining_set(&leaf("XI")).iter().collect::<Vec<_>>(),
            vec![&op("XI")]
        );
    }

    #[test]
    fn evaluation() {
        let t = fig_plus();
        assert_eq!(evaluate(&t, &Assignment::ones(&pm())), Ok(Sign::Plus));
        let mut a = Assignment::ones(&pm());
        a.set(op("XI"), Sign::Minus);
        assert_eq!(evaluate(&t, &a), Ok(Sign::Minus));
        assert_eq!(evaluate_by_leaves(&t, &a), Ok(Sign::Minus));

        let mut partial = Assignment::new();
        partial.set(op("XI"), Sign::Plus);
        assert_eq!(
            evaluate(&t, &partial),
            Err(TreeError::IncompleteAssignment("IZ".into()))
        );
    }

    #[test]
    fn identity_witness_evaluates_to_plus() {
        let w = merge_identity_witness(&fig_plus(), &fig_minus()).unwrap();
        assert!(determining_set(&w).is_empty());
        for mask in 0..16 {
            assert_eq!(
                evaluate(&w, &Assignment::from_mask(&pm(), mask)),
                Ok(Sign::Plus)
            );
        }
    }

    #[test]
    fn binarize_cascades() {
        let t = DeterminingTree::node(sp("ZZZ"), vec![leaf("ZII"), leaf("IZI"), leaf("IIZ")]);
        let b = binarize(&t);
        assert!(b.is_binary());
        assert_eq!(b.root(), t.root());
        assert_eq!(b.leaf_multiset(), t.leaf_multiset());
        assert!(check_structure(&b).is_ok());
        let inner: Vec<_> = b
            .children()
            .iter()
            .filter(|c| !c.is_leaf())
            .map(|c| c.root().clone())
            .collect();
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].sign, Sign::Plus);
        assert_eq!(inner[0].op.weight(), 2);

        assert_eq!(binarize(&fig_plus()), fig_plus());
    }

    #[test]
    fn binarize_collapses_unary_nodes() {
        let t = DeterminingTree::node(
            sp("XX"),
            vec![DeterminingTree::node(
                sp("XX"),
                vec![leaf("XI"), leaf("IX")],
            )],
        );
        let b = binarize(&t);
        assert_eq!(
            b,
            DeterminingTree::node(sp("XX"), vec![leaf("XI"), leaf("IX")])
        );
    }

    #[test]
    fn hoisting() {
        // ZII is a deep leaf and commutes with every leaf.
        let t = DeterminingTree::from_children(vec![
            DeterminingTree::from_children(vec![
                DeterminingTree::from_children(vec![leaf("ZIII"), leaf("IXII")]).unwrap(),
                leaf("IIXI"),
            ])
            .unwrap(),
            leaf("IIIX"),
        ])
        .unwrap();
        let f = sp("ZIII");
        let h = hoist_universal(&t, &f).unwrap();
        assert!(check_structure(&h).is_ok());
        assert_eq!(h.root(), t.root());
        assert_eq!(h.leaf_multiset(), t.leaf_multiset());
        assert!(h.children().iter().any(|c| c.root() == &f));
        assert_eq!(shallowest_deep_occurrence(&h, &f), None);

        let no_f = fig_plus();
        assert_eq!(hoist_universal(&no_f, &sp("II")).unwrap(), no_f);

        assert!(matches!(
            hoist_universal(&fig_plus(), &sp("XI")),
            Err(TreeError::Contract(_))
        ));
    }

    #[test]
    fn merge_rejects_mismatches() {
        let other = DeterminingTree::node(
            sp("-YY"),
            vec![DeterminingTree::node(sp("-YI"), vec![]), leaf("IY")],
        );
        assert!(matches!(
            merge_identity_witness(&fig_plus(), &other),
            Err(TreeError::Contract(_))
        ));
        assert!(matches!(
            merge_identity_witness(&leaf("XI"), &DeterminingTree::node(sp("-IX"), vec![])),
            Err(TreeError::Contract(_))
        ));
    }

    #[test]
    fn split_round_trip() {
        let w = merge_identity_witness(&fig_plus(), &fig_minus()).unwrap();
        let (p, m) = split_identity_witness(&w).unwrap();
        assert_eq!(p, fig_plus());
        assert_eq!(m, fig_minus());
        assert_eq!(determining_set(&p), determining_set(&m));

        let other = DeterminingTree::node(
            sp("-YY"),
            vec![DeterminingTree::node(sp("-YI"), vec![]), leaf("IY")],
        );
        let bad = DeterminingTree::node(sp("-II"), vec![fig_plus(), other]);
        assert!(matches!(
            split_identity_witness(&bad),
            Err(TreeError::Contract(_))
        ));
    }

    #[test]
    fn negated_leaf_from_peres_mermin() {
        let t = negated_leaf_witness(&fig_plus(), &fig_minus(), &op("XI")).unwrap();
        assert_eq!(t.root(), &sp("-XI"));
        assert_eq!(validate(&t, &pm()), Ok(()));
        let ds = determining_set(&t);
        assert_eq!(ds.iter().collect::<Vec<_>>(), vec![&op("XI")]);
        let m = t.leaf_multiset();
        assert_eq!(m[&op("XI")], 1);
        assert!(["IX", "ZI", "IZ"].iter().all(|s| m[&op(s)] == 2));
        // The intermediate node is -XZ.
        assert!(t.children().iter().any(|c| c.root() == &sp("-XZ")));

        let t = negated_leaf_witness(&fig_plus(), &fig_minus(), &op("IZ")).unwrap();
        assert_eq!(t.root(), &sp("-IZ"));
        assert_eq!(validate(&t, &pm()), Ok(()));

        assert!(matches!(
            negated_leaf_witness(&fig_plus(), &fig_minus(), &op("XX")),
            Err(TreeError::Contract(_))
        ));
    }

    #[test]
    fn quadruple_witnesses() {
        for (form, items) in [
            (GraphForm::Form3, ["XI", "IX", "ZI", "IZ"]),
            (GraphForm::Form1, ["ZZ", "ZI", "XX", "YI"]),
            (GraphForm::Form2, ["ZZ", "ZI", "XX", "IY"]),
        ] {
            let s = PauliSet::parse(&items).unwrap();
            let ops = [s.get(0), s.get(1), s.get(2), s.get(3)];
            let w = witness_from_quadruple(form, ops).unwrap();
            assert_eq!(validate(&w, &s), Ok(()), "{form}");
            assert_eq!(w.root(), &SignedPauli::minus_identity(2));
            assert!(determining_set(&w).is_empty());
        }
        let s = PauliSet::parse(&["XI", "IX", "ZI", "IZ"]).unwrap();
        let w = witness_from_quadruple(GraphForm::Form3, [s.get(0), s.get(1), s.get(2), s.get(3)])
            .unwrap();
        let halves: Vec<_> = w.children().iter().map(|c| c.root().clone()).collect();
        assert_eq!(halves, vec![sp("YY"), sp("-YY")]);
        assert!(matches!(
            witness_from_quadruple(GraphForm::Form1, [s.get(0), s.get(1), s.get(2), s.get(3)]),
            Err(TreeError::Contract(_))
        ));
    }

    #[test]
    fn text_and_json_forms_round_trip() {
        let w = merge_identity_witness(&fig_plus(), &fig_minus()).unwrap();
        let text = w.to_text();
        assert!(text.starts_with("-II\n  +YY\n    +XZ\n"));
        assert_eq!(DeterminingTree::parse_text(&text).unwrap(), w);
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.starts_with(r#"{"sign":-1,"pauli":"II","children":["#));
        assert_eq!(serde_json::from_str::<DeterminingTree>(&json).unwrap(), w);

        assert!(matches!(
            DeterminingTree::parse_text("+XX\n +XI\n"),
            Err(TreeError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            DeterminingTree::parse_text("+XX\n    +XI\n"),
            Err(TreeError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            DeterminingTree::parse_text("+XX\n+XI\n"),
            Err(TreeError::Parse { line: 2, .. })
        ));
    }
}
