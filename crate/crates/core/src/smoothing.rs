//! Scalar smoothing primitives: the rational θ-function `t/(t+r)` and the
//! overflow-safe softplus / soft-max, each with the partial derivatives used by
//! the Newton Jacobians.

use crate::error::{LcpError, Result};

/// Value and partials of `θ_r(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEval {
    pub value: f64,
    pub d_dt: f64,
    pub d_dr: f64,
}

/// Value and partials of `r·log(1 + e^(u/r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftplusEval {
    pub value: f64,
    pub d_du: f64,
    pub d_dr: f64,
}

/// `θ_r(t) = t/(t+r)` for `t >= 0`, `t` for `t < 0`.
///
/// At the kink `t = 0` the derivative reported is the right derivative `1/r`.
#[inline]
pub fn theta1(t: f64, r: f64) -> ThetaEval {
    debug_assert!(r > 0.0);
    if t >= 0.0 {
        let s = t + r;
        let s2 = s * s;
        ThetaEval {
            value: t / s,
            d_dt: r / s2,
            d_dr: -t / s2,
        }
    } else {
        ThetaEval {
            value: t,
            d_dt: 1.0,
            d_dr: 0.0,
        }
    }
}

/// `θ(t/r)`: same as [`theta1`] for `t >= 0`, `t/r` for `t < 0`.
///
/// Continuously differentiable at `t = 0` (slope `1/r` on both sides).
#[inline]
pub fn theta1_scaled(t: f64, r: f64) -> ThetaEval {
    debug_assert!(r > 0.0);
    if t >= 0.0 {
        theta1(t, r)
    } else {
        ThetaEval {
            value: t / r,
            d_dt: 1.0 / r,
            d_dr: -t / (r * r),
        }
    }
}

/// Extension of `θ_r` to negative arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaBranch {
    /// `θ_r(t) = t` for `t < 0`, see [`theta1`].
    Literal,
    /// `θ_r(t) = t/r` for `t < 0`, see [`theta1_scaled`].
    #[default]
    Scaled,
}

impl ThetaBranch {
    #[inline]
    pub fn eval(self, t: f64, r: f64) -> ThetaEval {
        match self {
            ThetaBranch::Literal => theta1(t, r),
            ThetaBranch::Scaled => theta1_scaled(t, r),
        }
    }
}

/// `r (θ_r(x) + θ_r(z) − 1)`; vanishes exactly on the hyperbola `x z = r²` for `x, z >= 0`.
#[inline]
pub fn theta1_pair_residual(x: f64, z: f64, r: f64) -> f64 {
    r * (theta1(x, r).value + theta1(z, r).value - 1.0)
}

/// Logistic function `1/(1 + e^(−s))`, evaluated without overflow.
#[inline]
pub fn logistic(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// Smooth approximation of `max(u, 0)`, computed as
/// `max(u, 0) + r·log(1 + e^(−|u|/r))` so that it never overflows.
#[inline]
pub fn softplus(u: f64, r: f64) -> SoftplusEval {
    debug_assert!(r > 0.0);
    let s = u / r;
    let a = s.abs();
    let tail = (-a).exp();
    let log_term = tail.ln_1p();
    SoftplusEval {
        value: u.max(0.0) + r * log_term,
        d_du: logistic(s),
        // log(1 + e^s) − s·σ(s) is even in s
        d_dr: log_term + a * tail / (1.0 + tail),
    }
}

/// Soft-max `r·log Σ e^(vᵢ/r)`, shifted by the maximum before exponentiation.
///
/// Satisfies `max vᵢ <= softmax_n(v, r) <= max vᵢ + r·log n`.
pub fn softmax_n(v: &[f64], r: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(LcpError::EmptyVector);
    }
    if !(r > 0.0) {
        return Err(LcpError::NonPositiveR(r));
    }
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = v.iter().map(|&x| ((x - m) / r).exp()).sum();
    Ok(m + r * sum.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_examples() {
        for r in [1e-6, 0.3, 1.0, 50.0] {
            assert_eq!(theta1(0.0, r).value, 0.0);
            assert_eq!(theta1(r, r).value, 0.5);
        }
        let t = theta1(-2.0, 0.5);
        assert_eq!(t.value, -2.0);
        assert_eq!(t.d_dt, 1.0);
        assert_eq!(t.d_dr, 0.0);
    }

    #[test]
    fn scaled_branch_is_c1_at_zero() {
        let r = 0.25;
        let left = theta1_scaled(-1e-12, r);
        let right = theta1_scaled(0.0, r);
        assert!((left.d_dt - right.d_dt).abs() < 1e-9);
        assert_eq!(theta1_scaled(-2.0, 0.5).value, -4.0);
        assert_eq!(theta1_scaled(3.0, 0.5), theta1(3.0, 0.5));
        assert_eq!(ThetaBranch::Literal.eval(-2.0, 0.5).value, -2.0);
        assert_eq!(ThetaBranch::default(), ThetaBranch::Scaled);
    }

    #[test]
    fn theta_kink_uses_right_branch() {
        let t = theta1(0.0, 0.25);
        assert_eq!(t.d_dt, 4.0);
        assert_eq!(t.d_dr, 0.0);
    }

    #[test]
    fn pair_residual_examples() {
        assert_eq!(theta1_pair_residual(1.0, 1.0, 1.0), 0.0);
        assert!((theta1_pair_residual(2.0, 3.0, 1.0) - 5.0 / 12.0).abs() < 1e-15);
        // x z = r²
        let r = 0.1;
        assert!(theta1_pair_residual(4.0, r * r / 4.0, r).abs() < 1e-15);
    }

    #[test]
    fn softplus_examples() {
        for r in [1e-3, 0.5, 2.0] {
            assert!((softplus(0.0, r).value - r * std::f64::consts::LN_2).abs() < 1e-16);
        }
        let big = softplus(10.0, 1e-3);
        assert!((big.value - 10.0).abs() <= 1e-12);
        assert!((big.d_du - 1.0).abs() <= 1e-12);
        let small = softplus(-10.0, 1e-3);
        assert!(small.value.abs() <= 1e-12);
        assert!(small.d_du.abs() <= 1e-12);
    }

    #[test]
    fn softplus_no_overflow_far_from_kink() {
        let e = softplus(5.0, 1e-5); // u/r = 5e5, far past exp overflow
        assert_eq!(e.value, 5.0);
        assert_eq!(e.d_du, 1.0);
        assert_eq!(e.d_dr, 0.0);
        let e = softplus(-5.0, 1e-5);
        assert_eq!(e.value, 0.0);
        assert_eq!(e.d_du, 0.0);
    }

    #[test]
    fn softplus_r_derivative_matches_naive_formula() {
        // log(1+e^s) − s e^s/(1+e^s) in the moderate range where it is safe
        for &(u, r) in &[(0.3, 1.0), (-0.7, 0.4), (2.0, 1.5), (0.0, 0.2)] {
            let s: f64 = u / r;
            let naive = (1.0 + s.exp()).ln() - s * s.exp() / (1.0 + s.exp());
            assert!((softplus(u, r).d_dr - naive).abs() < 1e-14);
        }
    }

    #[test]
    fn softmax_examples() {
        let v = vec![2.5; 7];
        let r = 0.3;
        assert!((softmax_n(&v, r).unwrap() - (2.5 + r * 7f64.ln())).abs() < 1e-14);
        assert!((softmax_n(&[0.0, 1.0], 1.0).unwrap() - (1.0 + 1f64.exp()).ln()).abs() < 1e-14);
        assert!((softmax_n(&[0.0, 1.0], 1.0).unwrap() - 1.3133).abs() < 1e-4);
        assert_eq!(softmax_n(&[5.0], 0.01).unwrap(), 5.0);
        assert_eq!(softmax_n(&[5.0], 100.0).unwrap(), 5.0);
        assert_eq!(softmax_n(&[], 1.0), Err(LcpError::EmptyVector));
        assert!(softmax_n(&[1.0], 0.0).is_err());
    }

    #[test]
    fn softmax_large_arguments_stay_finite() {
        let v = [1e3, 999.0, -1e3];
        let s = softmax_n(&v, 1e-3).unwrap();
        assert_eq!(s, 1e3);
    }
}
