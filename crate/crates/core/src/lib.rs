//! Exterior calculus on coordinate spaces, with relativistic particle,
//! string and membrane engines built on it.
//!
//! The algebraic layer ([`exterior`], [`poly`], [`fields`], [`forms`],
//! [`chains`]) is generic over exact rationals and `f64`. The dynamics
//! ([`worldline`], [`string`], [`membrane`]) run in `f64`.

// Negated comparisons are how inputs reject NaN; index loops mirror the
// component formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chains;
pub mod elliptic;
pub mod error;
pub mod exterior;
pub mod fields;
pub mod forms;
pub mod membrane;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod string;
pub mod worldline;

pub use error::{Error, Result};
pub use exterior::{KForm, KVector, Metric, MultiIndex};
pub use fields::{NumericField, ScalarField, SmoothMap};
pub use forms::FieldForm;
pub use poly::PolyField;
pub use scalar::{rat, Rational, Scalar};
