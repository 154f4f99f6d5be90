//! Dense complex eigensolver: Householder reduction to Hessenberg form,
//! Wilkinson-shifted single-shift QR iteration accumulating the Schur
//! factorization A = Q T Q*, and eigenvectors by triangular back
//! substitution on T.

use super::{lu_factor, C64, ComplexMatrix};
use crate::error::{Error, Result};
use crate::DEFAULT_SEED;

/// Deflation threshold relative to ||A||.
const DEFLATION_REL: f64 = 1e-14;
/// Total QR sweep budget is `MAX_SWEEPS_PER_N * n`.
const MAX_SWEEPS_PER_N: usize = 30;

#[derive(Clone, Debug)]
pub struct EigConfig {
    /// Residual tolerance for the diagonalizable flag, relative to ||A||.
    pub tol: f64,
    /// Condition cap on the eigenvector matrix; above it the input is
    /// reported as defective.
    pub vcond_cap: f64,
    pub seed: u64,
}

impl Default for EigConfig {
    fn default() -> Self {
        EigConfig {
            tol: 1e-9,
            vcond_cap: 1e12,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Eigenvalues with algebraic multiplicity, in Schur order.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvector columns (best effort for defective inputs).
    pub v: Option<ComplexMatrix>,
    pub diagonalizable: bool,
    /// ||AV - V Lambda||_F / ||A||_F.
    pub residual: f64,
    /// cond_2(V) estimate; absent when V is numerically singular.
    pub vcond: Option<f64>,
}

pub fn eig(a: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    eig_with(
        a,
        &EigConfig {
            tol,
            ..EigConfig::default()
        },
    )
}

pub fn eig_with(a: &ComplexMatrix, config: &EigConfig) -> Result<EigenDecomposition> {
    a.check_finite()?;
    let n = a.dim();
    if n == 0 {
        return Err(Error::Input("empty matrix has no spectrum".into()));
    }
    let (t, q) = schur(a, true)?;
    let q = q.expect("schur with accumulation");
    let eigenvalues: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();

    let v = triangular_eigenvectors(&t, &q);
    let anorm = a.frob_norm();
    let lambda = ComplexMatrix::diagonal(&eigenvalues);
    let residual_abs = a.matmul(&v).sub(&v.matmul(&lambda)).frob_norm();
    let residual = if anorm > 0.0 {
        residual_abs / anorm
    } else {
        residual_abs
    };

    let vcond = match lu_factor(&v) {
        Ok(factors) => {
            let vinv = factors.solve_matrix(&ComplexMatrix::identity(n));
            Some(v.op_norm_seeded(config.seed) * vinv.op_norm_seeded(config.seed))
        }
        Err(_) => None,
    };
    let diagonalizable =
        residual <= config.tol && vcond.map(|c| c <= config.vcond_cap).unwrap_or(false);

    Ok(EigenDecomposition {
        eigenvalues,
        v: Some(v),
        diagonalizable,
        residual,
        vcond,
    })
}

/// Eigenvalues without eigenvectors or Schur basis.
pub(crate) fn eigenvalues_only(a: &ComplexMatrix) -> Result<Vec<C64>> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::Input("empty matrix has no spectrum".into()));
    }
    let (t, _) = schur(a, false)?;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Schur factorization A = Q T Q* with T upper triangular.
pub fn schur(a: &ComplexMatrix, want_q: bool) -> Result<(ComplexMatrix, Option<ComplexMatrix>)> {
    let n = a.dim();
    let (mut h, mut q) = hessenberg(a, want_q);
    let scale = a.frob_norm();
    let defl = DEFLATION_REL * scale.max(f64::MIN_POSITIVE);
    let max_sweeps = MAX_SWEEPS_PER_N * n.max(1);
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;

    let mut hi = n.saturating_sub(1);
    while hi > 0 {
        // kill negligible subdiagonals in the trailing block
        for i in 1..=hi {
            let local = f64::EPSILON * (h[(i - 1, i - 1)].norm() + h[(i, i)].norm());
            if h[(i, i - 1)].norm() <= defl.max(local) {
                h[(i, i - 1)] = C64::new(0.0, 0.0);
            }
        }
        if h[(hi, hi - 1)] == C64::new(0.0, 0.0) {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != C64::new(0.0, 0.0) {
            lo -= 1;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(Error::EigNoConvergence {
                lo,
                hi,
                sweeps: max_sweeps,
            });
        }

        let mu = if since_deflation.is_multiple_of(20) {
            // exceptional shift to break symmetric stalls
            h[(hi, hi)] + C64::new(1.5 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, q.as_mut(), lo, hi, mu);
    }

    // converged: T is the strict upper triangle plus diagonal
    let mut t = h;
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((t, q))
}

fn hessenberg(a: &ComplexMatrix, want_q: bool) -> (ComplexMatrix, Option<ComplexMatrix>) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = if want_q {
        Some(ComplexMatrix::identity(n))
    } else {
        None
    };
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1; // length of the column tail to reflect
        let x: Vec<C64> = (0..m).map(|i| h[(k + 1 + i, k)]).collect();
        let xnorm = super::vec_norm(&x);
        if xnorm <= f64::MIN_POSITIVE {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = super::vec_norm(&v);
        if vnorm <= f64::EPSILON * xnorm {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // left: rows k+1..n
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..m {
                s += v[i].conj() * h[(k + 1 + i, j)];
            }
            let s2 = s * 2.0;
            for i in 0..m {
                let upd = s2 * v[i];
                h[(k + 1 + i, j)] -= upd;
            }
        }
        // right: columns k+1..n
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for j in 0..m {
                s += h[(i, k + 1 + j)] * v[j];
            }
            let s2 = s * 2.0;
            for j in 0..m {
                let upd = s2 * v[j].conj();
                h[(i, k + 1 + j)] -= upd;
            }
        }
        if let Some(q) = q.as_mut() {
            for i in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..m {
                    s += q[(i, k + 1 + j)] * v[j];
                }
                let s2 = s * 2.0;
                for j in 0..m {
                    let upd = s2 * v[j].conj();
                    q[(i, k + 1 + j)] -= upd;
                }
            }
        }
    }
    // enforce exact zeros below the subdiagonal
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Eigenvalue of the trailing 2x2 block closest to the corner entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> C64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let mid = (a + d) * 0.5;
    let disc = (((a - d) * 0.5).powu(2) + b * c).sqrt();
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One implicit single-shift QR sweep on the active block [lo, hi].
fn qr_sweep(h: &mut ComplexMatrix, mut q: Option<&mut ComplexMatrix>, lo: usize, hi: usize, mu: C64) {
    let n = h.dim();
    let mut x = h[(lo, lo)] - mu;
    let mut y = h[(lo + 1, lo)];
    for k in lo..hi {
        let (c, s) = givens(x, y);
        // left rotation on rows k, k+1
        for j in 0..n {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        // right rotation on columns k, k+1
        for i in 0..n {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + s.conj() * b;
            h[(i, k + 1)] = -s * a + b * c;
        }
        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + s.conj() * b;
                q[(i, k + 1)] = -s * a + b * c;
            }
        }
        if k + 1 < hi {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
        }
    }
}

/// Rotation [[c, s], [-conj(s), c]] with c real zeroing the second entry.
fn givens(f: C64, g: C64) -> (f64, C64) {
    if g.norm() == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if f.norm() == 0.0 {
        return (0.0, g.conj() / g.norm());
    }
    let d = (f.norm_sqr() + g.norm_sqr()).sqrt();
    let c = f.norm() / d;
    let s = (f / f.norm()) * g.conj() / d;
    (c, s)
}

/// Eigenvectors of the triangular factor mapped back through Q.
fn triangular_eigenvectors(t: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    let n = t.dim();
    let tnorm = t.max_abs().max(f64::MIN_POSITIVE);
    let smallnum = f64::EPSILON * tnorm;
    let mut v = ComplexMatrix::zeros(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![C64::new(0.0, 0.0); k + 1];
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut sum = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                sum += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < smallnum {
                den = C64::new(smallnum, 0.0);
            }
            y[i] = -sum / den;
            let mag = y[i].norm();
            if mag > 1e100 {
                for z in y[i..=k].iter_mut() {
                    *z /= mag;
                }
            }
        }
        let ynorm = super::vec_norm(&y);
        for z in y.iter_mut() {
            *z /= ynorm;
        }
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &yj) in y.iter().enumerate() {
                acc += q[(i, j)] * yj;
            }
            v[(i, k)] = acc;
        }
    }
    v
}
