//! Damped Newton driver with Armijo backtracking for the enlarged smoothing
//! systems, where the smoothing parameter `r` is an unknown rather than a
//! schedule.
//!
//! Each iteration solves `F(X) + ∇F(X) d = 0` and accepts `X + ς^j d` for the
//! smallest `j` with `Θ(X + ς^j d) <= (1 − 2τς^j) Θ(X)`, `Θ = ½‖F‖²`.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{LcpError, Result};
use crate::linalg::{dot, lu_solve};
use crate::model::{
    meets_tolerance, residual_metrics, AugmentedIterate, LcpProblem, SolveReport, SolveStatus,
    SolverOptions,
};
use crate::systems::{assemble, assemble_tlcp2, EnlargedResidual, SmoothingKind};

/// Smallest `r` handed to the residual assemblers.
pub const R_FLOOR: f64 = 1e-12;

/// Fixed smoothing parameter of the `θ(x) + θ(z) − θ(x+z)` reformulation.
pub const TLCP2_FIXED_R: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    /// θ-smoothing with `r` as unknown.
    Tlcp,
    /// Soft-max smoothing with `r` as unknown.
    SoftLcp,
    /// Fixed-r reformulation `θ_r(x) + θ_r(z) − θ_r(x + z) = 0`.
    Tlcp2,
}

impl MethodKind {
    pub fn name(&self) -> &'static str {
        match self {
            MethodKind::Tlcp => "tlcp",
            MethodKind::SoftLcp => "soft",
            MethodKind::Tlcp2 => "tlcp2",
        }
    }
}

/// One accepted Newton step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub iter: usize,
    /// Merit before the step.
    pub theta_before: f64,
    /// Merit at the accepted point.
    pub theta_after: f64,
    pub alpha: f64,
    pub backtracks: usize,
    /// `r` at the accepted point.
    pub r: f64,
    /// `‖F‖∞` at the accepted point.
    pub res_inf: f64,
    /// Set when the step drove `r` below [`R_FLOOR`] and it was clamped.
    pub r_clamped: bool,
}

impl StepRecord {
    /// The Armijo inequality as it was tested at acceptance.
    pub fn satisfies_armijo(&self, tau: f64) -> bool {
        self.theta_after <= (1.0 - 2.0 * tau * self.alpha) * self.theta_before
    }
}

/// Accepted steps plus the packed iterates they connect (`points.len() == steps.len() + 1`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationTrace {
    pub steps: Vec<StepRecord>,
    pub points: Vec<Vec<f64>>,
}

impl IterationTrace {
    /// CSV with columns `iter,theta,alpha,r,res_inf` (merit after each step).
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,theta,alpha,r,res_inf\n");
        for st in &self.steps {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{:e}",
                st.iter, st.theta_after, st.alpha, st.r, st.res_inf
            );
        }
        s
    }
}

/// Result of a line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmijoStep {
    pub alpha: f64,
    pub backtracks: usize,
    /// Merit at the accepted trial point.
    pub merit: f64,
}

/// Backtracking search along `d` from `x`, where `theta0 = Θ(x)`.
///
/// `merit` may return a non-finite value for points where the residual is
/// undefined; such trials are rejected.
pub fn armijo_search(
    mut merit: impl FnMut(&[f64]) -> f64,
    x: &[f64],
    theta0: f64,
    d: &[f64],
    opts: &SolverOptions,
) -> Result<ArmijoStep> {
    if x.len() != d.len() {
        return Err(LcpError::DimensionMismatch(format!(
            "direction of length {} for point of length {}",
            d.len(),
            x.len()
        )));
    }
    let mut alpha = 1.0;
    let mut trial = vec![0.0; x.len()];
    for j in 0..=opts.max_backtracks {
        for ((t, xi), di) in trial.iter_mut().zip(x).zip(d) {
            *t = xi + alpha * di;
        }
        let theta = merit(&trial);
        if theta.is_finite() && theta <= (1.0 - 2.0 * opts.tau * alpha) * theta0 {
            return Ok(ArmijoStep {
                alpha,
                backtracks: j,
                merit: theta,
            });
        }
        alpha *= opts.sigma;
    }
    Err(LcpError::LineSearchFailed(opts.max_backtracks))
}

/// `x = z = 1`, `r = ⟨x, z⟩/n = 1`.
pub fn default_start(p: &LcpProblem) -> AugmentedIterate {
    let n = p.dim();
    AugmentedIterate {
        x: vec![1.0; n],
        z: vec![1.0; n],
        r: 1.0,
    }
}

/// User start: requires `x0, z0 > 0`; sets `r = ⟨x0, z0⟩/n`.
pub fn start_from(p: &LcpProblem, x0: &[f64], z0: &[f64]) -> Result<AugmentedIterate> {
    p.check_pair(x0, z0)?;
    if x0.iter().chain(z0).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(LcpError::InvalidOptions(
            "starting point must be strictly positive".into(),
        ));
    }
    let r = dot(x0, z0) / p.dim() as f64;
    AugmentedIterate::new(x0.to_vec(), z0.to_vec(), r)
}

/// Merit function and residual of `method` at a packed point.
///
/// Packed points are `[x; z; r]` for the augmented methods and `[x; z]` for
/// [`MethodKind::Tlcp2`]. `r` below [`R_FLOOR`] is clamped first.
pub fn evaluate(
    p: &LcpProblem,
    method: MethodKind,
    opts: &SolverOptions,
    packed: &[f64],
) -> Result<EnlargedResidual> {
    let n = p.dim();
    match method {
        MethodKind::Tlcp2 => {
            if packed.len() != 2 * n {
                return Err(LcpError::DimensionMismatch("packed TLCP2 point".into()));
            }
            assemble_tlcp2(
                p,
                &packed[..n],
                &packed[n..],
                TLCP2_FIXED_R,
                opts.theta_branch,
            )
        }
        MethodKind::Tlcp | MethodKind::SoftLcp => {
            if packed.len() != 2 * n + 1 {
                return Err(LcpError::DimensionMismatch("packed augmented point".into()));
            }
            let it = AugmentedIterate {
                x: packed[..n].to_vec(),
                z: packed[n..2 * n].to_vec(),
                r: packed[2 * n].max(R_FLOOR),
            };
            let kind = if method == MethodKind::Tlcp {
                SmoothingKind::Theta
            } else {
                SmoothingKind::Soft
            };
            assemble(kind, p, &it, opts)
        }
    }
}

/// `Θ = ½‖F‖²` at a packed point; `+∞` where the residual is undefined.
pub fn merit(p: &LcpProblem, method: MethodKind, opts: &SolverOptions, packed: &[f64]) -> f64 {
    match evaluate(p, method, opts, packed) {
        Ok(sys) => {
            let m = sys.merit();
            if m.is_finite() {
                m
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Runs `method` on `p`. Starting values default to all-ones.
///
/// Returns `Err` only for malformed input; runtime failures are reported
/// through [`SolveReport::status`].
pub fn solve(
    p: &LcpProblem,
    method: MethodKind,
    opts: &SolverOptions,
    x0: Option<&[f64]>,
    z0: Option<&[f64]>,
) -> Result<(SolveReport, IterationTrace)> {
    opts.validate()?;
    let start = match (x0, z0) {
        (None, None) => default_start(p),
        (Some(x0), Some(z0)) => start_from(p, x0, z0)?,
        (Some(x0), None) => start_from(p, x0, &vec![1.0; p.dim()])?,
        (None, Some(z0)) => start_from(p, &vec![1.0; p.dim()], z0)?,
    };
    let clock = Instant::now();
    let n = p.dim();
    let mut point = start.pack();
    if method == MethodKind::Tlcp2 {
        point.pop();
    }

    let mut trace = IterationTrace {
        steps: Vec::new(),
        points: vec![point.clone()],
    };
    let mut backtrack_total = 0;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;

    loop {
        let sys = match evaluate(p, method, opts, &point) {
            Ok(sys) => sys,
            Err(_) => {
                status = SolveStatus::SingularJacobian;
                break;
            }
        };
        if sys.residual_inf() <= opts.tol
            && meets_tolerance(p, &point[..n], &point[n..2 * n], opts.tol)?
        {
            status = SolveStatus::Converged;
            break;
        }
        if iterations == opts.max_newton {
            break;
        }
        let rhs: Vec<f64> = sys.f.iter().map(|v| -v).collect();
        let d = match lu_solve(&sys.jac, &rhs) {
            Ok(d) => d,
            Err(_) => {
                status = SolveStatus::SingularJacobian;
                break;
            }
        };
        let theta0 = sys.merit();
        let step = match armijo_search(|t| merit(p, method, opts, t), &point, theta0, &d, opts) {
            Ok(s) => s,
            Err(_) => {
                status = SolveStatus::LineSearchFailed;
                break;
            }
        };
        for (xi, di) in point.iter_mut().zip(&d) {
            *xi += step.alpha * di;
        }
        let mut r_clamped = false;
        if method != MethodKind::Tlcp2 && point[2 * n] < R_FLOOR {
            point[2 * n] = R_FLOOR;
            r_clamped = true;
        }
        iterations += 1;
        backtrack_total += step.backtracks;
        let res_inf = evaluate(p, method, opts, &point).map_or(f64::INFINITY, |s| s.residual_inf());
        trace.steps.push(StepRecord {
            iter: iterations,
            theta_before: theta0,
            theta_after: step.merit,
            alpha: step.alpha,
            backtracks: step.backtracks,
            r: if method == MethodKind::Tlcp2 {
                TLCP2_FIXED_R
            } else {
                point[2 * n]
            },
            res_inf,
            r_clamped,
        });
        trace.points.push(point.clone());
    }

    let x = point[..n].to_vec();
    let z = point[n..2 * n].to_vec();
    let (comp_err, feas_err) = residual_metrics(p, &x, &z)?;
    let r_final = if method == MethodKind::Tlcp2 {
        TLCP2_FIXED_R
    } else {
        point[2 * n]
    };
    let report = SolveReport {
        x,
        z,
        r_final,
        comp_err,
        feas_err,
        iterations,
        backtrack_total,
        wall_time: clock.elapsed(),
        status,
    };
    Ok((report, trace))
}
