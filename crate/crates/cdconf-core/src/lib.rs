//! Pseudoconformal analysis over quaternions and octonions.

// `!(x < y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod calculus;
pub mod contour;
pub mod domains;
pub mod exec;
pub mod linalg;
pub mod moebius;
pub mod normal;
pub mod phrase;
pub mod suites;

pub use algebra::CdNumber;
pub use exec::Exec;
