//! Symbolic computation for countable linear orders.

pub mod baf;
pub mod classify;
pub mod cnf;
pub mod dense;
pub mod ordinals;
pub mod points;
pub mod slice;
pub mod terms;

pub use cnf::Cnf;
pub use terms::Term;
