//! 3-ranks of class groups of quadratic fields, at scale.
//!
//! The crate computes r₃(D) for fundamental discriminants of both signs and
//! verifies a family of classical counting statements against the computed
//! tables at finite height:
//!
//! - [`arith`] — sieves, fundamental-discriminant predicates, and the
//!   congruence-restricted discriminant sets `S_λ(X, m, N)`;
//! - [`rank3`] — the 3-rank engine via GL₂(ℤ)-classes of binary cubic forms;
//! - [`bqf`] — an independent class-group oracle for D < 0 (reduced
//!   quadratic forms, Gauss composition, direct 3-torsion counting);
//! - [`family`] — good pairs, normalization of linear families, the sets
//!   T(X) and Tᵢ(X), and the image map onto fundamental discriminants;
//! - [`stats`] — mean-value and density predictions (Cohen–Lenstra,
//!   Nakagawa–Horie, the density lower bound, the squarefree Euler product)
//!   with empirical comparisons;
//! - [`search`] — witness engines for simultaneous small 3-rank;
//! - [`store`] — rank-table CSV files and the persistent cache;
//! - [`acceptance`] — the end-to-end verification suites behind
//!   `threerank verify` and the `acceptance` test target.

pub mod acceptance;
pub mod arith;
pub mod bqf;
pub mod error;
pub mod family;
pub mod rank3;
pub mod search;
pub mod stats;
pub mod store;

pub use arith::{CongruenceClass, FundamentalDiscriminant, Sign};
pub use error::{Error, Result};
pub use family::{FamilySpec, LinearPolynomial, NormalizedFamily};
pub use rank3::BinaryCubicForm;
pub use search::{IntegerValuedPolynomial, WitnessReport};
pub use stats::DensityReport;
pub use store::{RankRecord, RankTable};
