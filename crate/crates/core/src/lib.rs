//! Polynomial-time aggregation of exponentially many inequalities.
//!
//! The crate evaluates, in closed form, the combined effect of all odd-cycle
//! inequalities of a graph (maximum independent set) and of all mobius-cycle
//! inequalities of a 3-CNF formula, through traces of walk matrices built from
//! exponential slack kernels. Supporting pieces:
//!
//! * [`jproduct`]: join products of small dense tensors, used to express the
//!   derivatives of matrix powers;
//! * [`expsup`]: finite superpositions of exponentials approximating general
//!   kernels such as `1/s`;
//! * [`polyalg`] and [`proofkernel`]: exact rational polynomials and a checker
//!   for positivity proofs, including sums of squares modulo a variety;
//! * [`oracles`]: brute-force ground truth for every closed form.

pub mod error;
pub mod expsup;
pub mod formulation;
pub mod instances;
pub mod jproduct;
pub mod linalg;
pub mod mobiusagg;
pub mod oracles;
pub mod polyalg;
pub mod proofkernel;
pub mod walkagg;

pub use error::{Error, Result};

pub use instances::{parse_cnf, parse_graph, Clause, CnfFormula, Graph, InteriorPoint, Literal};
pub use num_complex::Complex64;
pub use polyalg::Polynomial;
