//! Generic sparse MILP model, LP relaxation and branch-and-bound.

pub mod bnb;
pub mod error;
pub mod instance;
pub mod lp;
pub mod lp_format;

pub use bnb::{relative_gap, solve_milp, solve_milp_from, MilpSolution, MilpStatus, SolverSettings};
pub use error::MilpError;
pub use instance::{Constraint, MilpInstance, Sense, VarId, VarKind, Variable, Violation};
pub use lp::{solve_lp, LpOutcome, LpSolution};
pub use lp_format::{read_solution, write_lp, write_solution};
