//! Comparison solvers: a reference interior-point method for LCP and the
//! generalized Newton iteration for absolute value equations.

mod gn;
mod ipm;

pub use gn::{solve_gn_ave, GnReport};
pub use ipm::{solve_ipm, IpmIterate, IPM_CENTERING, IPM_FRACTION_TO_BOUNDARY, IPM_LABEL};
