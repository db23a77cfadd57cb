//! LP presolve engine with a reinforcement-learning harness that learns
//! which presolvers to run, in what order, and when to stop.

pub mod cli;
pub mod cost;
pub mod env;
pub mod harness;
pub mod instancegen;
pub mod lp;
pub mod mps;
pub mod nn;
pub mod policy;
pub mod presolve;
pub mod simplex;
pub mod trainer;

pub use cost::{CostMode, CostModel};
pub use lp::{LpError, LpProblem, Solution, Status};
pub use presolve::{PresolveStack, PresolverId};
