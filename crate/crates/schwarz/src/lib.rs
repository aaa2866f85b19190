//! Exact computer algebra for Schwarzian conditions on linear differential
//! operators: pullback and gauge symmetries, Calabi-Yau structure tests,
//! Schwarzian series solvers, mirror maps and Yukawa couplings.
//!
//! All arithmetic is over ℚ with arbitrary precision; identities are decided
//! exactly, either as rational-function identities or coefficientwise up to a
//! tracked truncation order.

pub mod bivariate;
pub mod casebook;
pub mod cy;
pub mod diffop;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod mirror;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod schwarzian;
pub mod series;

pub use bivariate::{resultant_in_second_var, BiPoly};
pub use diffop::{DiffOperator, Gauge, SeriesOperator};
pub use error::{Error, Result};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::{q, qf, Q};
pub use series::Series;
