//! Residuals and Jacobians of the enlarged smoothing systems.
//!
//! The unknown is packed as `[x; z; r]` (length `2n + 1`). Rows `0..n` hold the
//! linear part `Mx + q − z`, rows `n..2n` the smoothed complementarity block, and
//! the last row the augmentation scalar
//! `½‖x⁻‖² + ½‖z⁻‖² + r² + εr`, whose only root with `r >= 0` is `r = 0`
//! together with `x, z >= 0`.

use crate::error::{LcpError, Result};
use crate::linalg::DenseMatrix;
use crate::model::{AugmentedIterate, LcpProblem, SolverOptions};
use crate::smoothing::{softplus, ThetaBranch};

/// Residual vector and Jacobian of one of the smoothing systems.
#[derive(Debug, Clone, PartialEq)]
pub struct EnlargedResidual {
    pub f: Vec<f64>,
    pub jac: DenseMatrix,
}

impl EnlargedResidual {
    /// Merit `½‖f‖²`.
    pub fn merit(&self) -> f64 {
        0.5 * self.f.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn residual_inf(&self) -> f64 {
        crate::linalg::norm_inf(&self.f)
    }
}

/// Componentwise negative part `min(vᵢ, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegPart(Vec<f64>);

impl NegPart {
    pub fn of(v: &[f64]) -> Self {
        Self(v.iter().map(|&x| x.min(0.0)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// `½‖v⁻‖²`
    pub fn half_sq_norm(&self) -> f64 {
        0.5 * self.0.iter().map(|v| v * v).sum::<f64>()
    }
}

/// Which smoothed complementarity block sits in rows `n..2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmoothingKind {
    /// `r (θ_r(x) + θ_r(z) − 1)`
    Theta,
    /// `x − r log(1 + e^((x − ρz)/r))`
    Soft,
}

pub fn assemble(
    kind: SmoothingKind,
    p: &LcpProblem,
    it: &AugmentedIterate,
    opts: &SolverOptions,
) -> Result<EnlargedResidual> {
    match kind {
        SmoothingKind::Theta => assemble_theta(p, it, opts),
        SmoothingKind::Soft => assemble_soft(p, it, opts),
    }
}

/// θ-smoothed enlarged system.
///
/// For `t >= 0` the r-column entry `θ_r(x) + θ_r(z) − 1 + r(∂_rθ_r(x) + ∂_rθ_r(z))`
/// reduces to `x²/(x+r)² + z²/(z+r)² − 1`.
pub fn assemble_theta(
    p: &LcpProblem,
    it: &AugmentedIterate,
    opts: &SolverOptions,
) -> Result<EnlargedResidual> {
    let th = opts.theta_branch;
    assemble_with(p, it, opts, |x, z, r| {
        let tx = th.eval(x, r);
        let tz = th.eval(z, r);
        let value = r * (tx.value + tz.value - 1.0);
        let dr = tx.value + tz.value - 1.0 + r * (tx.d_dr + tz.d_dr);
        (value, r * tx.d_dt, r * tz.d_dt, dr)
    })
}

/// Soft-max smoothed enlarged system, evaluated through the overflow-safe softplus.
pub fn assemble_soft(
    p: &LcpProblem,
    it: &AugmentedIterate,
    opts: &SolverOptions,
) -> Result<EnlargedResidual> {
    let rho = opts.rho;
    assemble_with(p, it, opts, |x, z, r| {
        let sp = softplus(x - rho * z, r);
        // ∂x = 1/(1 + e^(u/r)), ∂z = ρ e^(u/r)/(1 + e^(u/r)), ∂r = −(log(1+e^s) − s σ(s))
        (x - sp.value, 1.0 - sp.d_du, rho * sp.d_du, -sp.d_dr)
    })
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(LcpError::NonPositiveR(r))
    }
}

/// Shared assembly; `block(x_i, z_i, r)` returns `(value, ∂x, ∂z, ∂r)` of row `n + i`.
fn assemble_with(
    p: &LcpProblem,
    it: &AugmentedIterate,
    opts: &SolverOptions,
    block: impl Fn(f64, f64, f64) -> (f64, f64, f64, f64),
) -> Result<EnlargedResidual> {
    check_r(it.r)?;
    p.check_pair(&it.x, &it.z)?;
    let n = p.dim();
    let dim = 2 * n + 1;
    let r = it.r;
    let mut f = Vec::with_capacity(dim);
    f.extend(p.linear_residual(&it.x, &it.z)?);
    let mut jac = DenseMatrix::zeros(dim, dim);
    linear_rows(p, &mut jac);

    for i in 0..n {
        let (value, dx, dz, dr) = block(it.x[i], it.z[i], r);
        f.push(value);
        jac[(n + i, i)] = dx;
        jac[(n + i, n + i)] = dz;
        jac[(n + i, 2 * n)] = dr;
    }

    let xm = NegPart::of(&it.x);
    let zm = NegPart::of(&it.z);
    f.push(xm.half_sq_norm() + zm.half_sq_norm() + r * r + opts.epsilon * r);
    for i in 0..n {
        jac[(2 * n, i)] = xm.as_slice()[i];
        jac[(2 * n, n + i)] = zm.as_slice()[i];
    }
    jac[(2 * n, 2 * n)] = 2.0 * r + opts.epsilon;
    Ok(EnlargedResidual { f, jac })
}

/// Fills `[M, −I]` into the first `n` rows.
fn linear_rows(p: &LcpProblem, jac: &mut DenseMatrix) {
    let n = p.dim();
    for i in 0..n {
        for j in 0..n {
            jac[(i, j)] = p.m()[(i, j)];
        }
        jac[(i, n + i)] = -1.0;
    }
}

/// Fixed-r reformulation `[Mx + q − z; θ_r(x) + θ_r(z) − θ_r(x + z)]`, a square
/// `2n` system with unknown `[x; z]`.
pub fn assemble_tlcp2(
    p: &LcpProblem,
    x: &[f64],
    z: &[f64],
    r_fixed: f64,
    th: ThetaBranch,
) -> Result<EnlargedResidual> {
    check_r(r_fixed)?;
    p.check_pair(x, z)?;
    let n = p.dim();
    let mut f = p.linear_residual(x, z)?;
    let mut jac = DenseMatrix::zeros(2 * n, 2 * n);
    linear_rows(p, &mut jac);
    for i in 0..n {
        let tx = th.eval(x[i], r_fixed);
        let tz = th.eval(z[i], r_fixed);
        let ts = th.eval(x[i] + z[i], r_fixed);
        f.push(tx.value + tz.value - ts.value);
        jac[(n + i, i)] = tx.d_dt - ts.d_dt;
        jac[(n + i, n + i)] = tz.d_dt - ts.d_dt;
    }
    Ok(EnlargedResidual { f, jac })
}

/// Distances between assembled Jacobians at a solution and their `r → 0` limit.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitJacobianReport {
    /// `(r, max-norm gap)` in the order of the input sequence.
    pub gaps: Vec<(f64, f64)>,
    /// The limit `[[M, −I, 0], [φ(Z*), φ(X*), 0], [0, 0, ε]]`.
    pub limit: DenseMatrix,
}

impl LimitJacobianReport {
    pub fn is_monotone_decreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn final_gap(&self) -> f64 {
        self.gaps.last().map_or(f64::NAN, |g| g.1)
    }
}

/// Indicator `φ(t) = 1` for `t ≠ 0`, else `0`.
#[inline]
pub fn phi(t: f64) -> f64 {
    if t != 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Builds the limit matrix `[[M, −I, 0], [φ(Z*), φ(X*), 0], [0, 0, ε]]`.
pub fn limit_jacobian(
    p: &LcpProblem,
    x_star: &[f64],
    z_star: &[f64],
    eps: f64,
) -> Result<DenseMatrix> {
    p.check_pair(x_star, z_star)?;
    let n = p.dim();
    let mut lim = DenseMatrix::zeros(2 * n + 1, 2 * n + 1);
    linear_rows(p, &mut lim);
    for i in 0..n {
        lim[(n + i, i)] = phi(z_star[i]);
        lim[(n + i, n + i)] = phi(x_star[i]);
    }
    lim[(2 * n, 2 * n)] = eps;
    Ok(lim)
}

/// Evaluates the Jacobian of `kind` at `(x*, z*, r)` for each `r` in `r_seq` and
/// measures its max-norm distance to the limit matrix.
///
/// For [`SmoothingKind::Soft`] the `φ(X*)` block carries the factor `ρ`.
pub fn limit_jacobian_check(
    kind: SmoothingKind,
    p: &LcpProblem,
    x_star: &[f64],
    z_star: &[f64],
    opts: &SolverOptions,
    r_seq: &[f64],
) -> Result<LimitJacobianReport> {
    p.check_pair(x_star, z_star)?;
    if let Some((index, sum)) = x_star
        .iter()
        .zip(z_star)
        .map(|(a, b)| a + b)
        .enumerate()
        .find(|(_, s)| *s <= 1e-8)
    {
        return Err(LcpError::StrictComplementarityViolated { index, sum });
    }
    let mut limit = limit_jacobian(p, x_star, z_star, opts.epsilon)?;
    if kind == SmoothingKind::Soft {
        let n = p.dim();
        for i in 0..n {
            limit[(n + i, n + i)] *= opts.rho;
        }
    }
    let mut gaps = Vec::with_capacity(r_seq.len());
    for &r in r_seq {
        let it = AugmentedIterate::new(x_star.to_vec(), z_star.to_vec(), r)?;
        let sys = assemble(kind, p, &it, opts)?;
        gaps.push((r, sys.jac.max_abs_diff(&limit)?));
    }
    Ok(LimitJacobianReport { gaps, limit })
}
