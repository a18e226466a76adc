//! Nonlinear semigroups generated by accretive operators via the
//! Crandall-Liggett exponential formula, together with explicit
//! rate-of-convergence certificates for the small-time (Plant) and
//! large-time (Reich) resolvent/semigroup asymptotics, and a numerical
//! harness that verifies every certificate on concrete operator instances.
//!
//! The crate is organized along the objects of the theory:
//!
//! * [`space`] — finite-dimensional normed spaces (euclidean, ℓ_p) with
//!   duality map, semi-inner product and convexity/continuity moduli;
//! * [`operator`] — accretive operator instances with resolvents, Yosida
//!   approximates and range data;
//! * [`semigroup`] — evaluation of S(t)x by resolvent iteration with
//!   certified iteration counts;
//! * [`rates`] — the rate calculators producing [`rates::RateCertificate`]s;
//! * [`verify`] — grid-based empirical verification of certificates and of
//!   the lemma-level inequalities behind them;
//! * [`problem`] — declarative experiment descriptions loaded from JSON.

// Guards of the form `!(x > 0.0)` are deliberate: they reject NaN along
// with the out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod operator;
pub mod problem;
pub mod rates;
mod scalar_root;
pub mod semigroup;
pub mod space;
pub mod vector;
pub mod verify;

pub use error::{Error, Result};
pub use operator::{OperatorInstance, RangeData, ScalarFn};
pub use semigroup::SemigroupEvaluator;
pub use space::SpaceInstance;
pub use vector::Vector;
