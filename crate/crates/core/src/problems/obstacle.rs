use crate::error::{LcpError, Result};
use crate::linalg::{mat_vec, DenseMatrix};
use crate::model::LcpProblem;

/// Obstacle made of three parabolic bumps, the largest centred at 0.41.
pub fn three_bump_obstacle(x: f64) -> f64 {
    let a = 0.8 - 20.0 * (x - 0.2).powi(2);
    let b = 1.0 - 20.0 * (x - 0.75).powi(2);
    let c = 1.2 - 30.0 * (x - 0.41).powi(2);
    a.max(b.max(c))
}

/// Discretization data of the 1-D obstacle problem on `[0, 1]` with `u(0) = u(1) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSpec {
    pub n_interior: usize,
    /// Constant load.
    pub f: f64,
    /// Obstacle sampled at the interior nodes.
    pub g: Vec<f64>,
    pub h: f64,
}

impl ObstacleSpec {
    /// Interior node coordinates `i h`, `i = 1..=n`.
    pub fn grid(&self) -> Vec<f64> {
        (1..=self.n_interior).map(|i| i as f64 * self.h).collect()
    }
}

/// LCP in the gap `x = u − g`: `M = tridiag(−1, 2, −1)/h²`, `q = M g − f`,
/// so that `Mx + q = Mu − f` is the contact force.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleProblem {
    pub spec: ObstacleSpec,
    pub problem: LcpProblem,
}

/// Membrane profile recovered from an LCP solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSolution {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub g: Vec<f64>,
}

impl ObstacleSolution {
    /// Nodes where the membrane touches the obstacle, `u_i − g_i <= 1e-6 (1 + |g_i|)`.
    pub fn contact_count(&self) -> usize {
        self.u
            .iter()
            .zip(&self.g)
            .filter(|(u, g)| *u - *g <= 1e-6 * (1.0 + g.abs()))
            .count()
    }

    /// `min_i (u_i − g_i)`.
    pub fn min_gap(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.g)
            .map(|(u, g)| u - g)
            .fold(f64::INFINITY, f64::min)
    }
}

impl ObstacleProblem {
    /// `u = x + g` on the interior nodes.
    pub fn solution(&self, x: &[f64]) -> Result<ObstacleSolution> {
        if x.len() != self.spec.n_interior {
            return Err(LcpError::DimensionMismatch("obstacle gap vector".into()));
        }
        Ok(ObstacleSolution {
            grid: self.spec.grid(),
            u: x.iter().zip(&self.spec.g).map(|(xi, gi)| xi + gi).collect(),
            g: self.spec.g.clone(),
        })
    }
}

/// The three-bump obstacle with unit load on `n_interior` interior nodes.
pub fn build_obstacle(n_interior: usize) -> Result<ObstacleProblem> {
    build_obstacle_with(n_interior, three_bump_obstacle, 1.0)
}

pub fn build_obstacle_with(
    n_interior: usize,
    g: impl Fn(f64) -> f64,
    f: f64,
) -> Result<ObstacleProblem> {
    if n_interior < 2 {
        return Err(LcpError::InvalidOptions(format!(
            "obstacle grid needs at least 2 interior nodes, got {n_interior}"
        )));
    }
    let n = n_interior;
    let h = 1.0 / (n as f64 + 1.0);
    let inv_h2 = 1.0 / (h * h);
    let m = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * inv_h2
        } else if i.abs_diff(j) == 1 {
            -inv_h2
        } else {
            0.0
        }
    });
    let samples: Vec<f64> = (1..=n).map(|i| g(i as f64 * h)).collect();
    let q: Vec<f64> = mat_vec(&m, &samples)?.into_iter().map(|v| v - f).collect();
    Ok(ObstacleProblem {
        spec: ObstacleSpec {
            n_interior: n,
            f,
            g: samples,
            h,
        },
        problem: LcpProblem::new(m, q)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, lu_solve};
    use crate::problems::Rng;

    #[test]
    fn band_pattern_5x5() {
        let ob = build_obstacle_with(5, |_| 0.0, 1.0).unwrap();
        let s = 36.0; // h = 1/6
        let expected = DenseMatrix::from_rows(&[
            vec![2.0 * s, -s, 0.0, 0.0, 0.0],
            vec![-s, 2.0 * s, -s, 0.0, 0.0],
            vec![0.0, -s, 2.0 * s, -s, 0.0],
            vec![0.0, 0.0, -s, 2.0 * s, -s],
            vec![0.0, 0.0, 0.0, -s, 2.0 * s],
        ])
        .unwrap();
        assert!(ob.problem.m().max_abs_diff(&expected).unwrap() < 1e-12);
        assert_eq!(ob.problem.q(), &[-1.0; 5]);
    }

    #[test]
    fn matrix_is_positive_definite() {
        let ob = build_obstacle(50).unwrap();
        let mut rng = Rng::new(3);
        for _ in 0..10 {
            let v: Vec<f64> = (0..50).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            assert!(dot(&v, &mat_vec(ob.problem.m(), &v).unwrap()) > 0.0);
        }
    }

    #[test]
    fn zero_obstacle_linear_solution_is_positive() {
        // with g = 0 the free membrane solves M u = 1, which is strictly positive
        let ob = build_obstacle_with(20, |_| 0.0, 1.0).unwrap();
        let u = lu_solve(ob.problem.m(), &[1.0; 20]).unwrap();
        assert!(u.iter().all(|&v| v > 0.0));
        let sol = ob.solution(&u).unwrap();
        assert_eq!(sol.contact_count(), 0);
    }

    #[test]
    fn obstacle_shape() {
        assert!((three_bump_obstacle(0.41) - 1.2).abs() < 1e-15);
        assert!(three_bump_obstacle(0.0).abs() < 1e-15);
        assert!(three_bump_obstacle(1.0) < 0.0);
    }

    #[test]
    fn too_small_grid_rejected() {
        assert!(build_obstacle(1).is_err());
        assert!(build_obstacle(2).is_ok());
    }
}
