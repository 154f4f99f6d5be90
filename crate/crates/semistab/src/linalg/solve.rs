//! Pivoted Gaussian elimination for dense complex systems.

use super::{C64, ComplexMatrix};
use crate::error::{Error, Result};

/// LU factorization with partial pivoting, stored packed (L unit lower, U upper).
pub struct LuFactors {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    /// Smallest pivot magnitude encountered.
    pub min_pivot: f64,
}

/// Solution together with the relative residual ||MX - B|| / ||B|| (Frobenius).
pub struct Solution {
    pub x: ComplexMatrix,
    pub residual: f64,
}

pub fn lu_factor(m: &ComplexMatrix) -> Result<LuFactors> {
    m.check_finite()?;
    let n = m.dim();
    let mut lu: Vec<C64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let threshold = (n as f64) * f64::EPSILON * m.max_abs();
    let mut min_pivot = f64::INFINITY;

    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].norm();
        for i in k + 1..n {
            let mag = lu[i * n + k].norm();
            if mag > best {
                best = mag;
                p = i;
            }
        }
        if best <= threshold {
            return Err(Error::Singular { pivot: best });
        }
        min_pivot = min_pivot.min(best);
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[k * n + k];
        for i in k + 1..n {
            let factor = lu[i * n + k] / pivot;
            lu[i * n + k] = factor;
            for j in k + 1..n {
                let ukj = lu[k * n + j];
                lu[i * n + j] -= factor * ukj;
            }
        }
    }
    Ok(LuFactors {
        n,
        lu,
        perm,
        min_pivot,
    })
}

impl LuFactors {
    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let lij = self.lu[i * n + j];
                let yj = y[j];
                y[i] -= lij * yj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let uij = self.lu[i * n + j];
                let yj = y[j];
                y[i] -= uij * yj;
            }
            y[i] /= self.lu[i * n + i];
        }
        y
    }

    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        assert_eq!(b.dim(), n);
        let mut x = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col = self.solve_vec(&b.column(j));
            for i in 0..n {
                x[(i, j)] = col[i];
            }
        }
        x
    }
}

/// Solve M X = B, reporting the achieved residual.
pub fn solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<Solution> {
    let factors = lu_factor(m)?;
    let x = factors.solve_matrix(b);
    let bnorm = b.frob_norm();
    let residual = if bnorm > 0.0 {
        m.matmul(&x).sub(b).frob_norm() / bnorm
    } else {
        0.0
    };
    Ok(Solution { x, residual })
}

/// Solve M x = b for a single right-hand side.
pub fn solve_vec(m: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != m.dim() {
        return Err(Error::Input(format!(
            "right-hand side length {} does not match dimension {}",
            b.len(),
            m.dim()
        )));
    }
    Ok(lu_factor(m)?.solve_vec(b))
}
