//! Strong contextuality of Pauli measurement sets.
//!
//! - [`pauli`]: signed Pauli operators, commutation and products.
//! - [`compat`]: compatibility graphs and the clique-partition test.
//! - [`contextuality`]: the decision procedure with witness quadruples, plus
//!   a brute-force assignment oracle for cross-checking.
//! - [`trees`]: determining trees, their validation and rewrites.
//! - [`measures`]: CD_p distances by exact search or greedy heuristic.
//! - [`io`]: Hamiltonian files, JSON reports and DOT export.
//!
//! ```
//! use pauli_contextuality::{cd_p, is_contextual, validate, witness_from_quadruple};
//! use pauli_contextuality::{Hamiltonian64, Method, PNorm, PauliSet, Verdict};
//!
//! let s = PauliSet::parse(&["XI", "IX", "ZI", "IZ"]).unwrap();
//! let Verdict::Contextual { quadruple, form } = is_contextual(&s) else {
//!     unreachable!()
//! };
//! let tree = witness_from_quadruple(form, quadruple.ops(&s)).unwrap();
//! validate(&tree, &s).unwrap();
//!
//! let h = Hamiltonian64::from_pairs(&[(0.3, "XI"), (0.1, "IX"), (0.2, "ZI"), (0.4, "IZ")]).unwrap();
//! let r = cd_p(&h, PNorm::Finite(1.0), Method::Exact).unwrap();
//! assert_eq!(r.cd0.to_string(), "1/4");
//! assert!((r.distances[0].value - 0.1).abs() < 1e-12);
//! ```

pub mod compat;
pub mod contextuality;
pub mod io;
pub mod measures;
pub mod pauli;
pub mod scalar;
pub mod trees;

pub use compat::{
    build_graph, clique_partition, strip_universal, CliquePartition, CompatibilityGraph, PauliSet,
};
pub use contextuality::{assignment_closure_oracle, is_contextual, GraphForm, Quadruple, Verdict};
pub use measures::{
    cd_p, greedy_noncontextual, max_noncontextual_subset, Hamiltonian, MeasureReport, Method, PNorm,
};
pub use pauli::{commutes, multiply, PauliOp, Sign, SignedPauli};
pub use scalar::Scalar;
pub use trees::{determining_set, validate, witness_from_quadruple, DeterminingTree};

/// Exact ratio type used for CD₀.
pub type Ratio = num_rational::Ratio<usize>;

pub type Hamiltonian64 = Hamiltonian<f64>;
pub type Hamiltonian32 = Hamiltonian<f32>;
pub type MeasureReport64 = MeasureReport<f64>;
pub type MeasureReport32 = MeasureReport<f32>;
