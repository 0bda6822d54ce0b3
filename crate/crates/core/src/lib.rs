//! Exact solver for the knapsack problem (KP) and bounded knapsack problem
//! (BKP): core-based dynamic programming over non-dominated states with lazy
//! sorting, combinatorial upper bounds, surrogate relaxation with cardinality
//! constraints, divisibility-based capacity tightening, item aggregation and
//! multiplicity reduction, fixing-by-dominance, and mask-based solution
//! recovery. Ships with reference oracles, deterministic instance
//! generators, and batch helpers.

pub mod batch;
pub mod bounds;
pub mod heuristics;
pub mod recovery;
pub mod solver;
pub mod reduce;
pub mod states;
pub mod surrogate;
pub mod testgen;
pub mod error;
pub mod generator;
pub mod instance;
pub mod oracle;
pub mod prep;
pub mod ratio;
pub mod rng;

pub use error::{Error, Result};
pub use instance::{evaluate_solution, parse_instance, sniff_format, write_instance};
pub use instance::{Evaluation, Format, Instance, Item, Solution};

pub use solver::{solve, solve_no_surrogate, Features, SolveResult, SolveStats, SolverConfig, FEATURE_NAMES};
