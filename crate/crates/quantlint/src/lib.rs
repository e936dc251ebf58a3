//! quantlint checks programs written in a small imperative language whose
//! variables carry units of measure and, optionally, named kinds of quantity.
//!
//! Two values with the same unit (say, newton metres) may still denote
//! different physical entities (torque is not work). The checker therefore
//! runs two passes: a dimensional-analysis pass over exponent vectors, and a
//! named-quantity pass that tracks which entity each expression denotes. A
//! companion lint enforces the discipline that general multiplication is
//! confined to functions declaring a named return quantity, so that names in
//! the main block are always known.

// Diagnostics carry exact rational payloads and only exist on failure
// paths, so their size is not worth boxing away.
#![allow(clippy::result_large_err)]
#![allow(clippy::large_enum_variant)]

pub mod diag;
pub mod dim_check;
pub mod dims;
pub mod driver;
pub mod lint;
pub mod quant_check;
pub mod quantity;
pub mod rational;
pub mod syntax;

pub use quantity::{assign_op, diamond, triangle, AssignResult, QuantEnv, QuantName};
pub use syntax::{parse, pretty};
