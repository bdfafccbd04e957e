//! Linear models for desk-scale planning problems.
//!
//! [`LinearModel`] holds named variables and sparse rows, [`emit_lp`] /
//! [`parse_lp`] move models through CPLEX LP text, and [`solve`] runs the
//! bundled dense simplex (continuous) or exhaustive branch-and-bound
//! (at most [`MAX_INTEGER_VARIABLES`] integer variables).

pub mod lp_format;
pub mod model;
mod simplex;
pub mod solve;

pub use lp_format::{emit_lp, format_number, parse_lp, parse_lp_str, write_lp_string, LpFormatError};
pub use model::{lp_name, Bounds, CanonicalModel, ConstrId, Constraint, LinearModel, ModelError, Sense, VarId, Variable};
pub use solve::{solve, Mode, Solution, SolveError, SolveOptions, Status, MAX_CONTINUOUS_VARIABLES, MAX_INTEGER_VARIABLES};
