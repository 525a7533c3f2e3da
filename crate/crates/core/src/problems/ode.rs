use crate::error::{LcpError, Result};
use crate::linalg::{norm_inf, DenseMatrix, LuFactors};
use crate::model::LcpProblem;

/// Length of the integration interval `[0, T]`.
pub const ODE_HORIZON: f64 = 5.0;

/// Backward second-difference discretization of
/// `x'' − |x| = −2 − t`, `x(0) = −1`, `x'(0) = 1` on `[0, 5]`,
/// written as `N₁ x⁺ − N₂ x⁻ = q̃` with `x = x⁺ − x⁻` on the nodes `t_i = i h`, `i = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSpec {
    pub n: usize,
    pub h: f64,
    pub n1: DenseMatrix,
    pub n2: DenseMatrix,
    pub q_tilde: Vec<f64>,
}

impl OdeSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(LcpError::InvalidOptions(format!(
                "ODE grid needs n >= 3, got {n}"
            )));
        }
        let h = ODE_HORIZON / n as f64;
        if h >= 1.0 {
            return Err(LcpError::InvalidOptions(format!(
                "ODE step h = {h} must be below 1"
            )));
        }
        let h2 = h * h;
        let band = |shift: f64| {
            DenseMatrix::from_fn(n, n, move |i, j| match i as isize - j as isize {
                0 if i == 0 => (2.0 + shift) / h2,
                0 => (1.0 + shift) / h2,
                1 => -2.0 / h2,
                2 => 1.0 / h2,
                _ => 0.0,
            })
        };
        let mut q_tilde: Vec<f64> = (1..=n).map(|i| -(2.0 + i as f64 * h)).collect();
        q_tilde[0] -= (2.0 - 2.0 * h) / h2;
        q_tilde[1] += 1.0 / h2;
        Ok(Self {
            n,
            h,
            n1: band(-h2),
            n2: band(h2),
            q_tilde,
        })
    }

    /// Nodes `t_1, …, t_n`.
    pub fn times(&self) -> Vec<f64> {
        (1..=self.n).map(|i| i as f64 * self.h).collect()
    }

    /// Largest residual of the difference equations at the nodes, with the
    /// boundary data substituted for `x_0` and the ghost value `x_{−1}`.
    pub fn scheme_residual(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(LcpError::DimensionMismatch("ODE trajectory".into()));
        }
        let h = self.h;
        let x0 = -1.0;
        let ghost = x[0] - 2.0 * h;
        let at = |k: isize| match k {
            -1 => ghost,
            0 => x0,
            k => x[k as usize - 1],
        };
        let mut worst = 0.0_f64;
        for i in 1..=self.n as isize {
            let lhs = (at(i - 2) - 2.0 * at(i - 1) + at(i)) / (h * h) - at(i).abs();
            let rhs = -2.0 - i as f64 * h;
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }
}

/// Standard LCP `M = N₁⁻¹ N₂`, `q = N₁⁻¹ q̃` in the unknowns `x = x⁻`, `z = x⁺`.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeLcp {
    pub spec: OdeSpec,
    pub problem: LcpProblem,
}

impl OdeLcp {
    /// `x = x⁺ − x⁻` from an LCP pair.
    pub fn reconstruct(&self, x_lcp: &[f64], z_lcp: &[f64]) -> Result<Vec<f64>> {
        if x_lcp.len() != self.spec.n || z_lcp.len() != self.spec.n {
            return Err(LcpError::DimensionMismatch("ODE LCP pair".into()));
        }
        Ok(z_lcp.iter().zip(x_lcp).map(|(p, m)| p - m).collect())
    }
}

pub fn build_ode_lcp(n: usize) -> Result<OdeLcp> {
    let spec = OdeSpec::new(n)?;
    let lu = LuFactors::factor(&spec.n1)?;
    let m = lu.solve_matrix(&spec.n2)?;
    let q = lu.solve(&spec.q_tilde)?;
    Ok(OdeLcp {
        problem: LcpProblem::new(m, q)?,
        spec,
    })
}

/// Fixed-step RK4 solution of the same initial value problem, sampled at `times`
/// (sorted, non-negative).
pub fn rk4_reference(times: &[f64], step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(LcpError::InvalidOptions(format!(
            "RK4 step must be positive, got {step}"
        )));
    }
    let rhs = |t: f64, y: [f64; 2]| [y[1], y[0].abs() - 2.0 - t];
    let mut t = 0.0_f64;
    let mut y = [-1.0, 1.0];
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target < t - 1e-12 {
            return Err(LcpError::InvalidOptions(
                "RK4 sample times must be sorted".into(),
            ));
        }
        while target - t > 1e-12 {
            let dt = step.min(target - t);
            let k1 = rhs(t, y);
            let k2 = rhs(
                t + dt / 2.0,
                [y[0] + dt / 2.0 * k1[0], y[1] + dt / 2.0 * k1[1]],
            );
            let k3 = rhs(
                t + dt / 2.0,
                [y[0] + dt / 2.0 * k2[0], y[1] + dt / 2.0 * k2[1]],
            );
            let k4 = rhs(t + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
            for c in 0..2 {
                y[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            t += dt;
        }
        out.push(y[0]);
    }
    Ok(out)
}

/// Sup-norm distance between two sampled trajectories.
pub fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm_inf(&d)
}
