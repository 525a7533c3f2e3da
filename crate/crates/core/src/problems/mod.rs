//! Problem builders and random generators for the benchmark families.

mod ave;
mod obstacle;
mod ode;
mod pmatrix;
mod rng;
mod svd;

pub use ave::{
    gen_ave_general, gen_ave_unique, solve_ave_via_lcp, AveProblem, AveSolveReport, PlantedAve,
    AVE_FAILURE_TOL, AVE_LCP_TOL_RATIO,
};
pub use obstacle::{
    build_obstacle, build_obstacle_with, three_bump_obstacle, ObstacleProblem, ObstacleSolution,
    ObstacleSpec,
};
pub use ode::{build_ode_lcp, rk4_reference, sup_gap, OdeLcp, OdeSpec, ODE_HORIZON};
pub use pmatrix::gen_pmatrix_lcp;
pub use rng::Rng;
pub use svd::min_singular_value;

use crate::linalg::dot;
use crate::model::LcpProblem;

/// An LCP together with a known solution pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedLcp {
    pub problem: LcpProblem,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl PlantedLcp {
    /// Largest violation among `Mx + q = z`, `x, z >= 0` and `xᵀz = 0`.
    pub fn certificate_error(&self) -> f64 {
        let w = self
            .problem
            .linear_residual(&self.x, &self.z)
            .expect("planted dims");
        let lin = crate::linalg::norm_inf(&w);
        let neg = self.x.iter().chain(&self.z).fold(0.0_f64, |m, v| m.max(-v));
        lin.max(neg).max(dot(&self.x, &self.z).abs())
    }
}
