//! Exact decision procedures for symmetric, weak and weakly symmetric
//! continuity of piecewise functions at a point.
//!
//! Numbers live in a real quadratic field `ℚ(√d)`, so every branch
//! choice, sign and limit is decided without floating point. The
//! [`oracle`] module is the one place that uses floats, as an
//! independent falsifier.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::large_enum_variant)]

extern crate alloc;

pub mod checker;
pub mod field;
pub mod func;
pub mod limits;
pub mod oracle;
pub mod sets;
pub mod theorems;

pub use field::{ExtReal, FieldElement, FieldError, Rational};
pub use func::{combine, Branch, Combinator, Expr, FnFamily, PiecewiseFn};
pub use sets::{HSetDescriptor, Region, Side, StructuredSet};
