use crate::error::{LcpError, Result};
use crate::linalg::{mat_vec, norm_inf, DenseMatrix, LuFactors};
use crate::model::{LcpProblem, SolveReport, SolverOptions};
use crate::newton::{solve, MethodKind};
use crate::problems::{min_singular_value, Rng};

/// Threshold on `|Ax − |x| − b|ᵢ` above which a run (or a component) counts as unsolved.
pub const AVE_FAILURE_TOL: f64 = 1e-6;

/// Ratio between the inner LCP tolerance and the requested tolerance in
/// [`solve_ave_via_lcp`]; the AVE residual is `(A − I)` times the LCP one.
pub const AVE_LCP_TOL_RATIO: f64 = 1e-2;

/// Absolute value equation `A x − |x| = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AveProblem {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
}

impl AveProblem {
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        if !a.is_square() || a.rows() != b.len() {
            return Err(LcpError::DimensionMismatch(format!(
                "AVE with {}x{} matrix and rhs of length {}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        if a.entries().iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(LcpError::NonFinite("AVE data"));
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `A x − |x| − b`.
    pub fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ax = mat_vec(&self.a, x)?;
        Ok(ax
            .iter()
            .zip(x)
            .zip(&self.b)
            .map(|((ai, xi), bi)| ai - xi.abs() - bi)
            .collect())
    }

    pub fn residual_inf(&self, x: &[f64]) -> Result<f64> {
        Ok(norm_inf(&self.residual(x)?))
    }

    /// Components with `|Ax − |x| − b|ᵢ > 1e-6`.
    pub fn nnz(&self, x: &[f64]) -> Result<usize> {
        Ok(self
            .residual(x)?
            .iter()
            .filter(|r| !(r.abs() <= AVE_FAILURE_TOL))
            .count())
    }

    /// Equivalent LCP `x⁺ = M x⁻ + q` with `M = (A − I)⁻¹(A + I)`, `q = (A − I)⁻¹ b`.
    ///
    /// The LCP unknown `x` plays the role of `x⁻` and `z` that of `x⁺`.
    pub fn to_lcp(&self) -> Result<LcpProblem> {
        let n = self.dim();
        let eye = DenseMatrix::identity(n);
        let lu = LuFactors::factor(&self.a.add_scaled(-1.0, &eye)?)?;
        let m = lu.solve_matrix(&self.a.add_scaled(1.0, &eye)?)?;
        let q = lu.solve(&self.b)?;
        LcpProblem::new(m, q)
    }

    /// `x = x⁺ − x⁻` from an LCP pair `(x⁻, x⁺)`.
    pub fn x_from_lcp_pair(x_minus: &[f64], x_plus: &[f64]) -> Vec<f64> {
        x_plus.iter().zip(x_minus).map(|(p, m)| p - m).collect()
    }
}

/// An AVE with the solution used to build its right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedAve {
    pub problem: AveProblem,
    pub x: Vec<f64>,
}

fn planted(a: DenseMatrix, x: Vec<f64>) -> Result<PlantedAve> {
    let ax = mat_vec(&a, &x)?;
    let b = ax.iter().zip(&x).map(|(ai, xi)| ai - xi.abs()).collect();
    Ok(PlantedAve {
        problem: AveProblem::new(a, b)?,
        x,
    })
}

fn invertible_shift(a: &DenseMatrix) -> bool {
    let eye = DenseMatrix::identity(a.rows());
    a.add_scaled(-1.0, &eye)
        .map(|s| LuFactors::factor(&s).is_ok())
        .unwrap_or(false)
}

/// Uniquely solvable AVE: `A = R/(σ_min(R)·u)` with `R` uniform on `[−10, 10]`
/// and `u` uniform on `(0, 1)`, so every singular value of `A` exceeds 1.
pub fn gen_ave_unique(n: usize, rng: &mut Rng) -> Result<PlantedAve> {
    if n == 0 {
        return Err(LcpError::EmptyVector);
    }
    loop {
        let r = DenseMatrix::from_fn(n, n, |_, _| rng.uniform_in(-10.0, 10.0));
        let smin = match min_singular_value(&r) {
            Ok(s) if s >= 1e-10 => s,
            Ok(_) | Err(LcpError::SingularMatrix { .. }) | Err(LcpError::NoConvergence(_)) => {
                continue
            }
            Err(e) => return Err(e),
        };
        let u = loop {
            let u = rng.uniform();
            if u > 0.0 {
                break u;
            }
        };
        let a = r.scale(1.0 / (smin * u));
        let x: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        return planted(a, x);
    }
}

/// General AVE: `A = 10(U − U')`, `x = u − u'` with `U, U', u, u'` uniform on `[0, 1)`.
/// Draws where `A − I` is numerically singular are discarded.
pub fn gen_ave_general(n: usize, rng: &mut Rng) -> Result<PlantedAve> {
    if n == 0 {
        return Err(LcpError::EmptyVector);
    }
    loop {
        let a = DenseMatrix::from_fn(n, n, |_, _| 10.0 * (rng.uniform() - rng.uniform()));
        let x: Vec<f64> = (0..n).map(|_| rng.uniform() - rng.uniform()).collect();
        if invertible_shift(&a) {
            return planted(a, x);
        }
    }
}

/// AVE solved through its LCP reformulation.
#[derive(Debug, Clone, PartialEq)]
pub struct AveSolveReport {
    pub x: Vec<f64>,
    pub residual_inf: f64,
    pub nnz: usize,
    pub lcp: SolveReport,
}

impl AveSolveReport {
    pub fn failed(&self) -> bool {
        !(self.residual_inf <= AVE_FAILURE_TOL)
    }
}

pub fn solve_ave_via_lcp(
    ave: &AveProblem,
    method: MethodKind,
    opts: &SolverOptions,
) -> Result<AveSolveReport> {
    let lcp = ave.to_lcp()?;
    let inner = opts.with_tol(opts.tol * AVE_LCP_TOL_RATIO);
    let (report, _) = solve(&lcp, method, &inner, None, None)?;
    let x = AveProblem::x_from_lcp_pair(&report.x, &report.z);
    let res = ave.residual(&x)?;
    let nnz = res.iter().filter(|r| !(r.abs() <= AVE_FAILURE_TOL)).count();
    let residual_inf = if res.iter().all(|r| r.is_finite()) {
        norm_inf(&res)
    } else {
        f64::INFINITY
    };
    Ok(AveSolveReport {
        x,
        residual_inf,
        nnz,
        lcp: report,
    })
}
