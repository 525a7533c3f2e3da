//! Problem, iterate, option and report types shared by every solver.

use std::fmt;
use std::time::Duration;

use crate::error::{LcpError, Result};
use crate::linalg::{dot, mat_vec, norm2, DenseMatrix};
use crate::smoothing::ThetaBranch;

/// The complementarity problem `0 <= x ⊥ (M x + q) >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpProblem {
    m: DenseMatrix,
    q: Vec<f64>,
}

impl LcpProblem {
    pub fn new(m: DenseMatrix, q: Vec<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(LcpError::DimensionMismatch(format!(
                "M must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if q.len() != m.rows() {
            return Err(LcpError::DimensionMismatch(format!(
                "q has length {} but M is {}x{}",
                q.len(),
                m.rows(),
                m.cols()
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(LcpError::NonFinite("q"));
        }
        Ok(Self { m, q })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn m(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `M x + q - z`.
    pub fn linear_residual(&self, x: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        self.check_pair(x, z)?;
        let mut w = mat_vec(&self.m, x)?;
        for ((wi, qi), zi) in w.iter_mut().zip(&self.q).zip(z) {
            *wi += qi - zi;
        }
        Ok(w)
    }

    pub(crate) fn check_pair(&self, x: &[f64], z: &[f64]) -> Result<()> {
        let n = self.dim();
        if x.len() != n || z.len() != n {
            return Err(LcpError::DimensionMismatch(format!(
                "iterate lengths ({}, {}) for problem of size {n}",
                x.len(),
                z.len()
            )));
        }
        Ok(())
    }

    /// Plain-text serialization: a `# family seed` header line followed by M and q.
    pub fn to_text(&self, family: &str, seed: u64) -> String {
        format!(
            "# {family} {seed}\n{}{}",
            self.m.to_text(),
            crate::linalg::vector_to_text(&self.q)
        )
    }

    /// Parses the format written by [`LcpProblem::to_text`]; returns the header too.
    pub fn from_text(text: &str) -> Result<(Self, String)> {
        let (header, body) = match text.strip_prefix('#') {
            Some(rest) => {
                let (h, b) = rest.split_once('\n').unwrap_or((rest, ""));
                (h.trim().to_string(), b)
            }
            None => (String::new(), text),
        };
        let mut tokens = body.split_whitespace();
        let rows: usize = next_parsed(&mut tokens)?;
        let cols: usize = next_parsed(&mut tokens)?;
        let entries = (0..rows * cols)
            .map(|_| next_parsed(&mut tokens))
            .collect::<Result<Vec<f64>>>()?;
        let n: usize = next_parsed(&mut tokens)?;
        let q = (0..n)
            .map(|_| next_parsed(&mut tokens))
            .collect::<Result<Vec<f64>>>()?;
        Ok((
            Self::new(DenseMatrix::new(rows, cols, entries)?, q)?,
            header,
        ))
    }
}

fn next_parsed<'a, T: std::str::FromStr>(tokens: &mut impl Iterator<Item = &'a str>) -> Result<T> {
    let tok = tokens
        .next()
        .ok_or_else(|| LcpError::Parse("unexpected end of input".into()))?;
    tok.parse()
        .map_err(|_| LcpError::Parse(format!("bad token `{tok}`")))
}

/// Enlarged unknown `(x, z, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedIterate {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub r: f64,
}

impl AugmentedIterate {
    pub fn new(x: Vec<f64>, z: Vec<f64>, r: f64) -> Result<Self> {
        if x.len() != z.len() {
            return Err(LcpError::DimensionMismatch(format!(
                "x has length {} but z has length {}",
                x.len(),
                z.len()
            )));
        }
        if x.iter()
            .chain(&z)
            .chain(std::iter::once(&r))
            .any(|v| !v.is_finite())
        {
            return Err(LcpError::NonFinite("iterate"));
        }
        Ok(Self { x, z, r })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Flattens to `[x; z; r]`.
    pub fn pack(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.dim() + 1);
        v.extend_from_slice(&self.x);
        v.extend_from_slice(&self.z);
        v.push(self.r);
        v
    }

    /// Inverse of [`AugmentedIterate::pack`]; `v` must have odd length.
    pub fn unpack(v: &[f64]) -> Result<Self> {
        if v.len() % 2 == 0 {
            return Err(LcpError::DimensionMismatch(format!(
                "packed iterate must have odd length, got {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        Self::new(v[..n].to_vec(), v[n..2 * n].to_vec(), v[2 * n])
    }
}

/// Default `ρ` of the soft-max system.
pub const DEFAULT_RHO: f64 = 10.0;

/// Parameters of the smoothing-Newton drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Weight of the `εr` term that keeps the augmented Jacobian nonsingular at r = 0.
    pub epsilon: f64,
    /// Scale in `max(0, x - ρz)`.
    pub rho: f64,
    /// Negative-argument branch of `θ_r` used by the θ-smoothed systems.
    pub theta_branch: ThetaBranch,
    /// Armijo slope, in (0, 1/2).
    pub tau: f64,
    /// Backtracking ratio, in (0, 1).
    pub sigma: f64,
    pub tol: f64,
    pub max_newton: usize,
    pub max_backtracks: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            rho: DEFAULT_RHO,
            theta_branch: ThetaBranch::Scaled,
            tau: 1e-4,
            sigma: 0.5,
            tol: 1e-6,
            max_newton: 200,
            max_backtracks: 40,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(LcpError::InvalidOptions(what.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be > 0");
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho must be > 0");
        }
        if !(self.tau > 0.0 && self.tau < 0.5) {
            return bad("tau must lie in (0, 1/2)");
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad("sigma must lie in (0, 1)");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad("tol must be > 0");
        }
        if self.max_newton == 0 {
            return bad("max_newton must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    SingularJacobian,
    LineSearchFailed,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "Converged",
            SolveStatus::MaxIterations => "MaxIterations",
            SolveStatus::SingularJacobian => "SingularJacobian",
            SolveStatus::LineSearchFailed => "LineSearchFailed",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a single solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub r_final: f64,
    /// `|xᵀz|`
    pub comp_err: f64,
    /// `‖Mx + q − z‖₂`
    pub feas_err: f64,
    pub iterations: usize,
    pub backtrack_total: usize,
    pub wall_time: Duration,
    pub status: SolveStatus,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Returns `(|xᵀz|, ‖Mx + q − z‖₂)`.
pub fn residual_metrics(p: &LcpProblem, x: &[f64], z: &[f64]) -> Result<(f64, f64)> {
    let w = p.linear_residual(x, z)?;
    Ok((dot(x, z).abs(), norm2(&w)))
}

/// True when the pair meets every component of the convergence contract at `tol`.
pub fn meets_tolerance(p: &LcpProblem, x: &[f64], z: &[f64], tol: f64) -> Result<bool> {
    let (comp, feas) = residual_metrics(p, x, z)?;
    let min = x.iter().chain(z).fold(f64::INFINITY, |m, v| m.min(*v));
    Ok(comp <= tol && feas <= tol && min >= -tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_problem(q: f64, n: usize) -> LcpProblem {
        LcpProblem::new(DenseMatrix::identity(n), vec![q; n]).unwrap()
    }

    #[test]
    fn metrics_on_exact_solutions() {
        let p = identity_problem(-1.0, 2);
        assert_eq!(
            residual_metrics(&p, &[1.0, 1.0], &[0.0, 0.0]).unwrap(),
            (0.0, 0.0)
        );
        let p = identity_problem(1.0, 2);
        assert_eq!(
            residual_metrics(&p, &[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn metrics_direct_evaluation() {
        let p = identity_problem(-1.0, 2);
        let (c, f) = residual_metrics(&p, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(c, 2.0);
        assert!((f - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn problem_shape_checks() {
        assert!(LcpProblem::new(DenseMatrix::zeros(2, 3), vec![0.0; 2]).is_err());
        assert!(LcpProblem::new(DenseMatrix::identity(2), vec![0.0; 3]).is_err());
        let p = identity_problem(1.0, 2);
        assert!(residual_metrics(&p, &[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn iterate_pack_round_trip() {
        let it = AugmentedIterate::new(vec![1.0, 2.0], vec![3.0, 4.0], 0.5).unwrap();
        assert_eq!(it.pack(), vec![1.0, 2.0, 3.0, 4.0, 0.5]);
        assert_eq!(AugmentedIterate::unpack(&it.pack()).unwrap(), it);
        assert!(AugmentedIterate::unpack(&[1.0, 2.0]).is_err());
        assert!(AugmentedIterate::new(vec![1.0], vec![1.0, 2.0], 1.0).is_err());
        assert!(AugmentedIterate::new(vec![f64::INFINITY], vec![1.0], 1.0).is_err());
    }

    #[test]
    fn option_ranges() {
        assert!(SolverOptions::default().validate().is_ok());
        let bad = [
            SolverOptions {
                tau: 0.5,
                ..Default::default()
            },
            SolverOptions {
                tau: 0.0,
                ..Default::default()
            },
            SolverOptions {
                sigma: 1.0,
                ..Default::default()
            },
            SolverOptions {
                epsilon: 0.0,
                ..Default::default()
            },
            SolverOptions {
                rho: -1.0,
                ..Default::default()
            },
            SolverOptions {
                tol: 0.0,
                ..Default::default()
            },
        ];
        for o in bad {
            assert!(o.validate().is_err(), "{o:?}");
        }
    }

    #[test]
    fn problem_text_round_trip() {
        let m = DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let p = LcpProblem::new(m, vec![-1.0, 0.5]).unwrap();
        let text = p.to_text("obstacle", 3);
        let (back, header) = LcpProblem::from_text(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(header, "obstacle 3");
    }
}
