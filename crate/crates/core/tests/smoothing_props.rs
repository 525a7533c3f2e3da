use proptest::prelude::*;
use smoothlcp::smoothing::{softmax_n, softplus, theta1, theta1_scaled, ThetaBranch};

fn central(f: impl Fn(f64) -> f64, at: f64) -> f64 {
    let h = 1e-6 * (1.0 + at.abs());
    (f(at + h) - f(at - h)) / (2.0 * h)
}

fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (1.0 + analytic.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn theta_monotone_on_nonnegatives(t1 in 0.0..1e3f64, dt in 1e-6..1e3f64, r in 1e-3..1e2f64) {
        prop_assert!(theta1(t1, r).value < theta1(t1 + dt, r).value);
    }

    #[test]
    fn theta_below_one(t in -1e6..1e12f64, r in 1e-6..1e3f64) {
        prop_assert!(theta1(t, r).value < 1.0);
        prop_assert!(theta1_scaled(t, r).value < 1.0);
    }

    #[test]
    fn theta_subadditive(x in 0.0..1e4f64, z in 0.0..1e4f64, r in 1e-4..1e2f64) {
        prop_assert!(theta1(x, r).value + theta1(z, r).value >= theta1(x + z, r).value);
    }

    #[test]
    fn theta_pair_on_hyperbola(lx in -4.0..4.0f64, lr in -3.0..2.0f64) {
        let x = 10f64.powf(lx);
        let r = 10f64.powf(lr);
        let z = r * r / x;
        prop_assert!((theta1(x, r).value + theta1(z, r).value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn softplus_uniform_bound(u in -1e3..1e3f64, r in 1e-6..1e2f64) {
        let gap = softplus(u, r).value - u.max(0.0);
        prop_assert!(gap >= 0.0);
        prop_assert!(gap <= r * std::f64::consts::LN_2 * (1.0 + 1e-15));
    }

    #[test]
    fn softmax_bound(v in prop::collection::vec(-1e3..1e3f64, 1..60), r in 1e-4..1e2f64) {
        let g = softmax_n(&v, r).unwrap();
        let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(g >= m);
        prop_assert!(g - m <= r * (v.len() as f64).ln());
    }

    #[test]
    fn theta_derivatives_match_fd(t in -50.0..50.0f64, r in 1e-2..10.0f64) {
        prop_assume!(t.abs() > 1e-3);
        for branch in [ThetaBranch::Literal, ThetaBranch::Scaled] {
            let e = branch.eval(t, r);
            prop_assert!(rel_err(e.d_dt, central(|s| branch.eval(s, r).value, t)) <= 1e-5);
            prop_assert!(rel_err(e.d_dr, central(|s| branch.eval(t, s).value, r)) <= 1e-5);
        }
    }

    #[test]
    fn softplus_derivatives_match_fd(u in -20.0..20.0f64, r in 5e-2..10.0f64) {
        let e = softplus(u, r);
        prop_assert!(rel_err(e.d_du, central(|s| softplus(s, r).value, u)) <= 1e-5);
        prop_assert!(rel_err(e.d_dr, central(|s| softplus(u, s).value, r)) <= 1e-5);
    }
}

#[test]
fn theta_tends_to_one() {
    for r in [1e-3, 1.0, 1e3] {
        assert!(theta1(1e9 * r, r).value > 1.0 - 1e-8);
    }
}
