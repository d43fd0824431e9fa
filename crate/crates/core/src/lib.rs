//! Scalar rational inner functions (finite Blaschke products) realized as
//! unitary colligations, and the Schur algorithm carried out directly on the
//! colligation matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`rational`] works at the function level: Blaschke products, coefficient
//!   representations and the classical Schur transform.
//! * [`colligation`] holds the unitary colligation type `U = [A B; C D]`, its
//!   characteristic function `S(z) = A + zB(I - zD)^{-1}C`, minimality tests,
//!   time-domain simulation and unitary equivalence.
//! * [`hessenberg`] provides row matching by complex reflectors and the
//!   reduction to special lower/upper Hessenberg form by a state gauge.
//! * [`redheffer`] couples colligations through a feedback channel and builds
//!   the inverse-Schur colligation.
//! * [`schur_state`] runs the Schur algorithm on colligation matrices and
//!   builds colligations directly from Schur parameters.
//! * [`realization`] constructs the model colligation on the
//!   reproducing-kernel space of a Blaschke product.

// `!(x < bound)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod colligation;
pub mod error;
pub mod hessenberg;
pub mod json;
pub mod linalg;
pub mod random;
pub mod rational;
pub mod realization;
pub mod redheffer;
pub mod schur_state;
pub mod tol;

pub use colligation::{MinimalityReport, UnitaryColligation};
pub use error::{Error, Result};
pub use hessenberg::{HessenbergCertificate, Orientation};
pub use linalg::{CMatrix, C64};
pub use rational::{BlaschkeProduct, RationalInner, SchurParameterSequence};
pub use realization::KernelBasis;
pub use redheffer::{PartitionedColligation, SchurSection};
pub use schur_state::SchurStateTrace;
