//! Smoothing-Newton solvers for the linear complementarity problem
//! `0 <= x ⊥ Mx + q >= 0`.
//!
//! The smoothing parameter `r` is treated as an extra unknown driven to zero
//! by an augmentation equation, so no continuation schedule is needed. Two
//! smoothings are provided: the rational θ-function `t/(t+r)` ([`MethodKind::Tlcp`])
//! and softplus ([`MethodKind::SoftLcp`]). A fixed-`r` θ variant
//! ([`MethodKind::Tlcp2`]), an interior-point method and the generalized Newton
//! iteration for absolute value equations serve as baselines.
//!
//! ```
//! use smoothlcp::{solve, DenseMatrix, LcpProblem, MethodKind, SolverOptions};
//!
//! let p = LcpProblem::new(DenseMatrix::identity(3), vec![-1.0, 2.0, -0.5]).unwrap();
//! let (report, _) = solve(&p, MethodKind::Tlcp, &SolverOptions::default(), None, None).unwrap();
//! assert!(report.converged());
//! assert!((report.x[0] - 1.0).abs() < 1e-6);
//! ```

pub mod baselines;
pub mod error;
pub mod linalg;
pub mod model;
pub mod newton;
pub mod problems;
pub mod smoothing;
pub mod systems;

pub use error::{LcpError, Result};
pub use linalg::{lu_solve, mat_vec, DenseMatrix, LuFactors};
pub use model::{
    AugmentedIterate, LcpProblem, SolveReport, SolveStatus, SolverOptions, DEFAULT_RHO,
};
pub use newton::{solve, IterationTrace, MethodKind, StepRecord};
pub use smoothing::ThetaBranch;
