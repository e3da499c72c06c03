//! Ergodic constants, explosive solutions and Dirichlet problems for
//! `-|u'|^α F(D²u) + |u'|^β + λ|u|^α u = f` on intervals and radial balls.

// `!(x > y)` is used on purpose so that NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barriers;
pub mod ergodic;
pub mod error;
pub mod grid;
pub mod model;
pub mod num;
pub mod solve;
pub mod verify;

pub use error::{Error, Result};
pub use num::{odd_pow, Real};

/// `f64` instantiations.
pub type Params = model::EquationParams<f64>;
pub type Validated = model::ValidatedParams<f64>;
pub type Domain = model::Domain1D<f64>;
pub type ForcingF64 = model::Forcing<f64>;
pub type GridF64 = grid::Grid<f64>;
pub type Field = grid::GridField<f64>;
