use std::time::Instant;

use crate::error::Result;
use crate::linalg::{dot, lu_solve, DenseMatrix};
use crate::model::{
    meets_tolerance, residual_metrics, LcpProblem, SolveReport, SolveStatus, SolverOptions,
};

/// Name used for this solver in every report.
pub const IPM_LABEL: &str = "reference IPM";
pub const IPM_CENTERING: f64 = 0.2;
pub const IPM_FRACTION_TO_BOUNDARY: f64 = 0.9995;

/// Accepted interior iterate and the centering target used to reach it.
#[derive(Debug, Clone, PartialEq)]
pub struct IpmIterate {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub mu: f64,
}

fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, d)| **d < 0.0)
        .map(|(vi, di)| -vi / di)
        .fold(f64::INFINITY, f64::min)
}

/// Infeasible primal-dual path following from `x = z = 1`.
///
/// Each iteration takes a Newton step on `Mx + q − z = 0`, `x∘z = σμ𝟏` with
/// `μ = xᵀz/n`, damped to `0.9995` of the largest step keeping `(x, z) > 0`.
/// `r_final` reports the last `μ`.
pub fn solve_ipm(p: &LcpProblem, opts: &SolverOptions) -> Result<(SolveReport, Vec<IpmIterate>)> {
    opts.validate()?;
    let clock = Instant::now();
    let n = p.dim();
    let mut x = vec![1.0; n];
    let mut z = vec![1.0; n];
    let mut history = vec![IpmIterate {
        x: x.clone(),
        z: z.clone(),
        mu: dot(&x, &z) / n as f64,
    }];
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    loop {
        if meets_tolerance(p, &x, &z, opts.tol)? {
            status = SolveStatus::Converged;
            break;
        }
        if iterations == opts.max_newton {
            break;
        }
        let mu = dot(&x, &z) / n as f64;
        let target = IPM_CENTERING * mu;
        let w = p.linear_residual(&x, &z)?;
        let m = p.m();
        let jac = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => m[(i, j)],
            (true, false) => {
                if j - n == i {
                    -1.0
                } else {
                    0.0
                }
            }
            (false, true) => {
                if i - n == j {
                    z[j]
                } else {
                    0.0
                }
            }
            (false, false) => {
                if i == j {
                    x[i - n]
                } else {
                    0.0
                }
            }
        });
        let mut rhs: Vec<f64> = w.iter().map(|v| -v).collect();
        rhs.extend(x.iter().zip(&z).map(|(xi, zi)| target - xi * zi));
        let d = match lu_solve(&jac, &rhs) {
            Ok(d) => d,
            Err(_) => {
                status = SolveStatus::SingularJacobian;
                break;
            }
        };
        let (dx, dz) = d.split_at(n);
        let alpha = (IPM_FRACTION_TO_BOUNDARY * max_step(&x, dx).min(max_step(&z, dz))).min(1.0);
        for i in 0..n {
            x[i] += alpha * dx[i];
            z[i] += alpha * dz[i];
        }
        iterations += 1;
        history.push(IpmIterate {
            x: x.clone(),
            z: z.clone(),
            mu: target,
        });
    }
    let (comp_err, feas_err) = residual_metrics(p, &x, &z)?;
    let report = SolveReport {
        r_final: dot(&x, &z) / n as f64,
        x,
        z,
        comp_err,
        feas_err,
        iterations,
        backtrack_total: 0,
        wall_time: clock.elapsed(),
        status,
    };
    Ok((report, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_negative_q() {
        let p = LcpProblem::new(DenseMatrix::identity(4), vec![-1.0; 4]).unwrap();
        let (rep, hist) = solve_ipm(&p, &SolverOptions::default()).unwrap();
        assert!(rep.converged());
        for (xi, zi) in rep.x.iter().zip(&rep.z) {
            assert!((xi - 1.0).abs() < 1e-6);
            assert!(zi.abs() < 1e-6);
        }
        for it in &hist {
            assert!(it.x.iter().chain(&it.z).all(|v| *v > 0.0));
        }
    }

    #[test]
    fn identity_positive_q() {
        let p = LcpProblem::new(DenseMatrix::identity(3), vec![1.0; 3]).unwrap();
        let (rep, _) = solve_ipm(&p, &SolverOptions::default()).unwrap();
        assert!(rep.converged());
        assert!(rep.x.iter().all(|v| v.abs() < 1e-6));
    }
}
