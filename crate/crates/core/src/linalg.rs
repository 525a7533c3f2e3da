//! Dense row-major matrices, LU factorization with partial pivoting, and the
//! plain-text matrix/vector format.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use crate::error::{LcpError, Result};

/// Relative pivot threshold below which a factorization is declared singular.
pub const SINGULAR_PIVOT_REL: f64 = 1e-14;

/// Dense matrix stored in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries. Rejects wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(LcpError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(LcpError::NonFinite("matrix"));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from a slice of equally sized rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LcpError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Builds a matrix by evaluating `f(i, j)` at every entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    /// Entrywise `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &DenseMatrix) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LcpError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LcpError::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.entries[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    /// Maximum absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LcpError::DimensionMismatch("max_abs_diff".into()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Serializes to the plain-text format: `rows cols` header then one line per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let rows = parse_count(tokens.next())?;
        let cols = parse_count(tokens.next())?;
        let entries = tokens.map(parse_real).collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, entries)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

fn parse_count(tok: Option<&str>) -> Result<usize> {
    let tok = tok.ok_or_else(|| LcpError::Parse("missing dimension".into()))?;
    tok.parse()
        .map_err(|_| LcpError::Parse(format!("bad dimension `{tok}`")))
}

fn parse_real(tok: &str) -> Result<f64> {
    tok.parse()
        .map_err(|_| LcpError::Parse(format!("bad number `{tok}`")))
}

/// Writes a vector as `n` followed by one value per line.
pub fn vector_to_text(v: &[f64]) -> String {
    let mut s = format!("{}\n", v.len());
    for x in v {
        let _ = writeln!(s, "{x:e}");
    }
    s
}

pub fn vector_from_text(text: &str) -> Result<Vec<f64>> {
    let mut tokens = text.split_whitespace();
    let n = parse_count(tokens.next())?;
    let v = tokens.map(parse_real).collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        return Err(LcpError::Parse(format!(
            "expected {n} values, found {}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(LcpError::NonFinite("vector"));
    }
    Ok(v)
}

pub fn mat_vec(a: &DenseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    if a.cols != v.len() {
        return Err(LcpError::DimensionMismatch(format!(
            "{}x{} matrix times vector of length {}",
            a.rows,
            a.cols,
            v.len()
        )));
    }
    Ok((0..a.rows).map(|i| dot(a.row(i), v)).collect())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// LU factors `P A = L U` packed in one matrix, with the row permutation.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Factors a square matrix with partial pivoting. A pivot smaller than
    /// `SINGULAR_PIVOT_REL * max|a_ij|` makes the matrix singular.
    pub fn factor(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(LcpError::DimensionMismatch(format!(
                "LU of non-square {}x{} matrix",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let threshold = SINGULAR_PIVOT_REL * a.max_abs();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs <= threshold || pivot_abs == 0.0 {
                return Err(LcpError::SingularMatrix {
                    column: k,
                    pivot: pivot_abs,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.entries.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu.entries[i * n + j] -= factor * lu.entries[k * n + j];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(LcpError::DimensionMismatch(format!(
                "rhs of length {} for a {n}x{n} system",
                rhs.len()
            )));
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&y[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            y[i] = (y[i] - s) / row[i];
        }
        Ok(y)
    }

    /// Solves against every column of `b`.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if b.rows != self.dim() {
            return Err(LcpError::DimensionMismatch("solve_matrix".into()));
        }
        let bt = b.transpose();
        let mut out = DenseMatrix::zeros(b.cols, b.rows);
        for j in 0..b.cols {
            let col = self.solve(bt.row(j))?;
            out.entries[j * b.rows..(j + 1) * b.rows].copy_from_slice(&col);
        }
        Ok(out.transpose())
    }
}

/// Solves `a d = rhs` by LU with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != a.rows {
        return Err(LcpError::DimensionMismatch(format!(
            "rhs of length {} for {} rows",
            rhs.len(),
            a.rows
        )));
    }
    LuFactors::factor(a)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn identity_and_diagonal_solves() {
        let d = lu_solve(&DenseMatrix::identity(3), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d, vec![1.0, 2.0, 3.0]);
        let d = lu_solve(&DenseMatrix::from_diag(&[2.0, 4.0]), &[2.0, 8.0]).unwrap();
        assert_eq!(d, vec![1.0, 2.0]);
    }

    #[test]
    fn random_round_trip_10x10() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
        // diagonally dominated to keep it well conditioned
        let a = DenseMatrix::from_fn(10, 10, |i, j| {
            rng.random::<f64>() - 0.5 + if i == j { 10.0 } else { 0.0 }
        });
        let v: Vec<f64> = (0..10).map(|i| i as f64 - 3.5).collect();
        let d = lu_solve(&a, &mat_vec(&a, &v).unwrap()).unwrap();
        for (x, y) in d.iter().zip(&v) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(lu_solve(&a, &[3.0, 5.0]).unwrap(), vec![5.0, 3.0]);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            lu_solve(&a, &[1.0, 1.0]),
            Err(LcpError::SingularMatrix { .. })
        ));
        assert!(matches!(
            lu_solve(&DenseMatrix::zeros(2, 2), &[0.0, 0.0]),
            Err(LcpError::SingularMatrix { .. })
        ));
        // pivot of relative size 1e-15 is below the threshold
        let a = DenseMatrix::from_diag(&[1.0, 1e-15]);
        assert!(lu_solve(&a, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn mat_vec_examples() {
        assert_eq!(
            mat_vec(&DenseMatrix::identity(2), &[5.0, 7.0]).unwrap(),
            vec![5.0, 7.0]
        );
        assert_eq!(
            mat_vec(&DenseMatrix::zeros(2, 2), &[1.0, 1.0]).unwrap(),
            vec![0.0, 0.0]
        );
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(mat_vec(&a, &[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        assert!(matches!(
            mat_vec(&a, &[1.0]),
            Err(LcpError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn construction_validates() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(LcpError::NonFinite(_))
        ));
        assert!(DenseMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let a = DenseMatrix::from_rows(&[vec![1.5, -2.0, 0.1], vec![3.0, 4e-9, 7.0]]).unwrap();
        let text = a.to_text();
        assert!(text.starts_with("2 3\n"));
        assert_eq!(DenseMatrix::from_text(&text).unwrap(), a);
        let v = vec![0.25, -1.0];
        assert_eq!(vector_from_text(&vector_to_text(&v)).unwrap(), v);
        assert!(vector_from_text("3\n1 2").is_err());
        assert!(DenseMatrix::from_text("2 2\n1 x 3 4").is_err());
    }

    #[test]
    fn solve_matrix_inverts() {
        let a = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let inv = LuFactors::factor(&a)
            .unwrap()
            .solve_matrix(&DenseMatrix::identity(2))
            .unwrap();
        let prod = a.matmul(&inv).unwrap();
        assert!(prod.max_abs_diff(&DenseMatrix::identity(2)).unwrap() < 1e-14);
    }
}
