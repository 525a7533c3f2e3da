use crate::linalg::{mat_vec, DenseMatrix};
use crate::model::LcpProblem;
use crate::problems::{PlantedLcp, Rng};

/// Random LCP with a positive definite (hence P-) matrix and a planted solution.
///
/// `M = RᵀR + nI` with `R` uniform on `[0,1)^(n×n)`. A coin `round(h)` per
/// index decides whether the planted `z` or the planted `x` is active there,
/// and `q = z − M x` makes `(x, z)` an exact solution.
pub fn gen_pmatrix_lcp(n: usize, rng: &mut Rng) -> PlantedLcp {
    assert!(n >= 1, "problem size must be positive");
    let r = DenseMatrix::from_fn(n, n, |_, _| rng.uniform());
    let m = r
        .transpose()
        .matmul(&r)
        .expect("square product")
        .add_scaled(n as f64, &DenseMatrix::identity(n))
        .expect("same shape");
    let mask: Vec<f64> = (0..n).map(|_| rng.uniform().round()).collect();
    let z: Vec<f64> = mask.iter().map(|&h| h * rng.uniform()).collect();
    let x: Vec<f64> = mask.iter().map(|&h| (1.0 - h) * rng.uniform()).collect();
    let mx = mat_vec(&m, &x).expect("dimensions agree");
    let q: Vec<f64> = z.iter().zip(&mx).map(|(zi, mxi)| zi - mxi).collect();
    PlantedLcp {
        problem: LcpProblem::new(m, q).expect("well formed"),
        x,
        z,
    }
}
