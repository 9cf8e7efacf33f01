//! Numerical toolkit for complex Hessian operators on the unit ball of `C^n`.
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod battery;
pub mod capacity;
pub mod catalog;
pub mod error;
pub mod hermitian;
pub mod inequality;
pub mod integration;
pub mod operator;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
