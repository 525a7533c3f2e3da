use crate::error::Result;
use crate::linalg::{lu_solve, LuFactors};
use crate::model::{SolveStatus, SolverOptions};
use crate::problems::AveProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct GnReport {
    pub x: Vec<f64>,
    /// Corrective iterations, excluding the starting solve.
    pub iterations: usize,
    /// LU factorizations performed, including the one for a defaulted start.
    pub factorizations: usize,
    pub residual_inf: f64,
    pub status: SolveStatus,
}

impl GnReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Generalized Newton iteration `(A − diag(sign(xᵏ))) xᵏ⁺¹ = b`.
///
/// Without `x0` the iteration starts from the solution of `A x = b`.
/// Stops once `‖Ax − |x| − b‖∞ <= opts.tol` or after `opts.max_newton` corrections.
pub fn solve_gn_ave(p: &AveProblem, x0: Option<&[f64]>, opts: &SolverOptions) -> Result<GnReport> {
    opts.validate()?;
    let n = p.dim();
    let mut factorizations = 0;
    let mut x = match x0 {
        Some(x0) => {
            if x0.len() != n {
                return Err(crate::error::LcpError::DimensionMismatch("GN start".into()));
            }
            x0.to_vec()
        }
        None => {
            factorizations += 1;
            lu_solve(&p.a, &p.b)?
        }
    };
    let mut iterations = 0;
    let status = loop {
        let res = p.residual_inf(&x)?;
        if res <= opts.tol {
            break SolveStatus::Converged;
        }
        if iterations == opts.max_newton {
            break SolveStatus::MaxIterations;
        }
        let mut j = p.a.clone();
        for i in 0..n {
            j[(i, i)] -= sign(x[i]);
        }
        factorizations += 1;
        let next = LuFactors::factor(&j).and_then(|lu| lu.solve(&p.b));
        iterations += 1;
        match next {
            Ok(v) => x = v,
            Err(_) => break SolveStatus::SingularJacobian,
        }
    };
    let residual_inf = p.residual_inf(&x)?;
    Ok(GnReport {
        x,
        iterations,
        factorizations,
        residual_inf,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn scalar_hand_iteration() {
        let p = AveProblem::new(DenseMatrix::from_diag(&[3.0]), vec![-4.0]).unwrap();
        let rep = solve_gn_ave(&p, None, &SolverOptions::default()).unwrap();
        assert!(rep.converged());
        assert_eq!(rep.iterations, 1);
        assert!((rep.x[0] + 1.0).abs() < 1e-15);
        assert_eq!(rep.factorizations, 2);
    }

    #[test]
    fn solution_start_takes_no_iterations() {
        let p = AveProblem::new(DenseMatrix::from_diag(&[3.0]), vec![-4.0]).unwrap();
        let rep = solve_gn_ave(&p, Some(&[-1.0]), &SolverOptions::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.factorizations, 0);
    }
}
