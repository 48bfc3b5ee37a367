//! Numerics for the XX0 spin chain: Toeplitz/Hankel partition functions, free energies,
//! the phase diagram, Tracy-Widom asymptotics, an exact sector-evolution oracle and a
//! nonintersecting-walk Monte Carlo.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod chainoracle;
pub mod cli;
pub mod detcore;
pub mod linalg;
pub mod nibmsim;
pub mod partition;
pub mod phase;
pub mod quadrature;
pub mod specfun;
pub mod tracywidom;
pub mod validation;

pub use error::{Error, Result};
