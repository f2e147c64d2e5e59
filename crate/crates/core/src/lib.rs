//! Adaptive mesh selection for systems of initial value problems.
//!
//! The one-step method builds a degree-`r` polynomial on each mesh interval
//! by `r + 1` sweeps of approximate Picard iteration. The controller chooses
//! each mesh point from a divided-difference estimate of the local error
//! coefficient, so that the local error of every step stays near a
//! prescribed `eps` for small `eps`. The cost is `2r^2 + 3r + 1`
//! right-hand side evaluations per step.
//!
//! ```
//! use adaptmesh::{adapt_mesh_solve, oracle, SolverConfig};
//!
//! let test = oracle::make_test_problem(0.1).unwrap();
//! let traj = adapt_mesh_solve(&test.problem, &SolverConfig::new(1e-2, 1)).unwrap();
//! assert_eq!(traj.intervals(), 33);
//! ```
//!
//! Membership of `f` in the smoothness class the error bounds require
//! (Lipschitz in `y`, `C^r` near the solution) is assumed, not checked.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod interp;
pub mod meshctl;
pub mod oracle;
pub mod picard;
pub mod problem;
pub mod state;
pub mod trajectory;

pub use config::{AuxStepRule, CoefficientPreset, SolverConfig};
pub use error::{Error, Result};
pub use meshctl::{
    adapt_mesh_gen_solve, adapt_mesh_solve, auxiliary_point, fixed_mesh_solve, local_coefficient,
    uniform_mesh, OneStepMethod, PicardMethod,
};
pub use picard::{picard_local_step, picard_piece};
pub use problem::IvpProblem;
pub use state::{norm_max, StateVector, UNIT_ROUNDOFF};
pub use trajectory::{evaluate_piece, PolynomialPiece, StepRecord, Trajectory};
