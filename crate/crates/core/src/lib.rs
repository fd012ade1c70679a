//! Numerical laboratory for `-div(a(x) grad u / (1+|u|)^theta) = f` with
//! homogeneous Dirichlet data: the regularity phase diagram in the
//! `(theta, m)` plane, the flux-linearizing transform, a radial finite
//! element solver, and checks of the a priori estimates on discrete
//! solutions.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod format;
pub mod radial;
pub mod regimes;
pub mod transform;

pub use error::{Error, Result};
