//! Reference oracles for tests: a dense tableau simplex and brute-force
//! enumeration over binary assignments. Independent of the production solver
//! apart from sharing the instance type.

pub mod enumerate;
pub mod tableau;

pub use enumerate::{enumerate_binaries, enumerate_groups, EnumerationResult, Fixings};
pub use tableau::{solve_dense, solve_instance, DenseLp, TableauOutcome};
