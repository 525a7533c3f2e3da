use crate::error::{LcpError, Result};
use crate::linalg::{dot, mat_vec, norm2, DenseMatrix, LuFactors};

const MAX_ITER: usize = 500;
const REL_TOL: f64 = 1e-10;

/// Smallest singular value by inverse power iteration on `AᵀA`.
pub fn min_singular_value(a: &DenseMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(LcpError::DimensionMismatch(format!(
            "expected square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let ata = a.transpose().matmul(a)?;
    let lu = LuFactors::factor(&ata)?;
    // fixed non-symmetric start so no eigenvector is missed by construction
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + (i as f64 + 1.0).sqrt().fract())
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut prev = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let w = lu.solve(&v)?;
        let nw = norm2(&w);
        if !(nw.is_finite() && nw > 0.0) {
            return Err(LcpError::NonFinite("inverse iteration vector"));
        }
        v = w.into_iter().map(|x| x / nw).collect();
        let av = mat_vec(a, &v)?;
        let sigma = dot(&av, &av).sqrt();
        if (sigma - prev).abs() <= REL_TOL * sigma {
            return Ok(sigma);
        }
        prev = sigma;
    }
    Err(LcpError::NoConvergence(MAX_ITER))
}
