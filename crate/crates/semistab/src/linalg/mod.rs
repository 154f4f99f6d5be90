//! Self-contained dense complex linear-algebra kernel: norms, solves,
//! eigendecomposition, matrix exponential.
//!
//! Everything here is sized for desk-scale matrices (n up to a few hundred);
//! there is no blocking, no BLAS, and no sparsity.

mod eig;
mod expm;
mod solve;

pub use eig::{eig, eig_with, schur, EigConfig, EigenDecomposition};
pub use expm::{log_exp_norm, log_exp_norm_default, matrix_exp};
pub use solve::{lu_factor, solve, solve_vec, LuFactors, Solution};

use crate::error::{Error, Result};
use crate::DEFAULT_SEED;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::{Index, IndexMut};

pub type C64 = Complex64;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Input(format!(
                    "expected square matrix, got row of length {} in {}x{} input",
                    row.len(),
                    n,
                    n
                )));
            }
            data.extend_from_slice(row);
        }
        let m = ComplexMatrix { n, data };
        m.check_finite()?;
        Ok(m)
    }

    /// Real 2x2 etc. convenience used all over the tests.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::Input("matrix has non-finite entries".into()))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.check_finite().is_ok()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix { n: self.n, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix { n: self.n, data }
    }

    pub fn scale(&self, c: C64) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.n, v.len());
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Maximum column absolute sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Operator 2-norm (largest singular value) with the default seed.
    pub fn op_norm(&self) -> f64 {
        self.op_norm_seeded(DEFAULT_SEED)
    }

    /// Operator 2-norm via power iteration on M*M with a seeded random
    /// start.  Falls back to QR eigenvalues of M*M when the iteration
    /// stagnates (nearly degenerate top singular values).
    pub fn op_norm_seeded(&self, seed: u64) -> f64 {
        op_norm_impl(self, seed)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

const OP_NORM_TOL: f64 = 1e-12;

fn op_norm_impl(m: &ComplexMatrix, seed: u64) -> f64 {
    let n = m.dim();
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        return m[(0, 0)].norm();
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return 0.0;
    }

    let mh = m.adjoint();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    normalize(&mut v);

    let budget = (10 * n * n).max(100);
    let mut rho = 0.0_f64;
    for _ in 0..budget {
        // w = M*M v, rho = v* w  (Rayleigh quotient for the top sigma^2)
        let w = mh.mul_vec(&m.mul_vec(&v));
        rho = v
            .iter()
            .zip(&w)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        let res: f64 = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - vi * rho).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res <= OP_NORM_TOL * rho.max(scale * scale * f64::EPSILON) {
            return rho.max(0.0).sqrt();
        }
        let wn = vec_norm(&w);
        if wn == 0.0 {
            return 0.0;
        }
        v = w.iter().map(|z| z / wn).collect();
    }
    // Stagnated: the top of the singular spectrum is too clustered for
    // plain power iteration.  M*M is Hermitian, so the QR eigensolver
    // gives lambda_max to full relative accuracy.
    let gram = mh.matmul(m);
    match eig::eigenvalues_only(&gram) {
        Ok(evs) => {
            let lam = evs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            lam.max(0.0).sqrt()
        }
        Err(_) => rho.max(0.0).sqrt(),
    }
}

fn normalize(v: &mut [C64]) {
    let norm = vec_norm(v);
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}
