//! Theta functions, the Sklyanin difference operators acting on even theta
//! functions, the invariant metric with its reproducing kernel and
//! biorthogonal bases, and the elliptic hypergeometric objects they produce.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ellhyp;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod metric;
pub mod operators;
pub mod sampling;
pub mod space;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use theta::{EtaKind, ModularContext, C64};
