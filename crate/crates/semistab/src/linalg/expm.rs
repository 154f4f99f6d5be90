//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant, plus an overflow-free evaluation of ln||e^{tA}|| used by
//! the growth-curve machinery at large t.

use super::{lu_factor, C64, ComplexMatrix};
use crate::error::{Error, Result};
use crate::DEFAULT_SEED;

/// Scaling threshold on ||tA||_1 for the degree-13 approximant.
const THETA_13: f64 = 5.4;
/// Cap on the number of squarings.
const MAX_SQUARINGS: u32 = 64;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// e^{tA} for t >= 0.
pub fn matrix_exp(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    a.check_finite()?;
    if !(t >= 0.0) {
        return Err(Error::Input(format!("matrix_exp requires t >= 0, got {t}")));
    }
    let b = a.scale(C64::new(t, 0.0));
    let result = expm_core(&b)?;
    if !result.is_finite() {
        let rate = a.one_norm().max(f64::MIN_POSITIVE);
        return Err(Error::ExpOverflow {
            t,
            t_cap: 700.0 / rate,
        });
    }
    Ok(result)
}

/// e^B for a pre-scaled argument.
fn expm_core(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = b.dim();
    let norm = b.one_norm();
    let s = if norm > THETA_13 {
        ((norm / THETA_13).log2().ceil() as u32).min(MAX_SQUARINGS)
    } else {
        0
    };
    let scaled = b.scale(C64::new((0.5f64).powi(s as i32), 0.0));
    let mut x = pade13(&scaled)?;
    for _ in 0..s {
        x = x.matmul(&x);
        if !x.is_finite() {
            // caller turns this into a range error with context
            return Ok(x);
        }
    }
    debug_assert_eq!(x.dim(), n);
    Ok(x)
}

fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &PADE_13;

    let w1 = a6
        .scale(C64::new(b[13], 0.0))
        .add(&a4.scale(C64::new(b[11], 0.0)))
        .add(&a2.scale(C64::new(b[9], 0.0)));
    let w2 = a6
        .scale(C64::new(b[7], 0.0))
        .add(&a4.scale(C64::new(b[5], 0.0)))
        .add(&a2.scale(C64::new(b[3], 0.0)))
        .add(&id.scale(C64::new(b[1], 0.0)));
    let u = a.matmul(&a6.matmul(&w1).add(&w2));

    let z1 = a6
        .scale(C64::new(b[12], 0.0))
        .add(&a4.scale(C64::new(b[10], 0.0)))
        .add(&a2.scale(C64::new(b[8], 0.0)));
    let v = a6
        .matmul(&z1)
        .add(&a6.scale(C64::new(b[6], 0.0)))
        .add(&a4.scale(C64::new(b[4], 0.0)))
        .add(&a2.scale(C64::new(b[2], 0.0)))
        .add(&id.scale(C64::new(b[0], 0.0)));

    // (V - U) X = (V + U)
    let factors = lu_factor(&v.sub(&u))?;
    Ok(factors.solve_matrix(&v.add(&u)))
}

/// ln||e^{tA}|| computed by repeated squaring with norm renormalization,
/// immune to overflow/underflow of e^{tA} itself.  Returns the log of the
/// operator 2-norm.
pub fn log_exp_norm(a: &ComplexMatrix, t: f64, seed: u64) -> Result<f64> {
    a.check_finite()?;
    if !(t > 0.0) {
        return Err(Error::Input(format!("log_exp_norm requires t > 0, got {t}")));
    }
    let norm_a = a.one_norm();
    // pick k so the Pade stage needs no internal scaling
    let k = if t * norm_a > THETA_13 {
        ((t * norm_a / THETA_13).log2().ceil() as u32).min(MAX_SQUARINGS)
    } else {
        0
    };
    let tau = t / (2.0f64).powi(k as i32);
    let m0 = matrix_exp(a, tau)?;
    let nu0 = m0.op_norm_seeded(seed);
    if nu0 <= 0.0 {
        return Err(Error::Input("exponential collapsed to zero".into()));
    }
    let mut d = m0.scale(C64::new(1.0 / nu0, 0.0));
    let mut log_norm = nu0.ln();
    for _ in 0..k {
        let sq = d.matmul(&d);
        let nu = sq.op_norm_seeded(seed);
        d = sq.scale(C64::new(1.0 / nu, 0.0));
        log_norm = 2.0 * log_norm + nu.ln();
    }
    Ok(log_norm)
}

/// log_exp_norm with the default seed.
pub fn log_exp_norm_default(a: &ComplexMatrix, t: f64) -> Result<f64> {
    log_exp_norm(a, t, DEFAULT_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let a = ComplexMatrix::zeros(3);
        for t in [0.0, 1.0, 17.5] {
            let e = matrix_exp(&a, t).unwrap();
            assert_eq!(e, ComplexMatrix::identity(3));
        }
    }

    #[test]
    fn nilpotent_exponential_closed_form() {
        let a = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        for t in [0.5, 1.0, 10.0, 100.0] {
            let e = matrix_exp(&a, t).unwrap();
            assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-13);
            assert!((e[(0, 1)] - c(t, 0.0)).norm() < 1e-13 * t.max(1.0));
            assert!((e[(1, 0)]).norm() < 1e-13);
            assert!((e[(1, 1)] - c(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn diagonal_exponential() {
        let l1 = c(-1.0, 2.0);
        let l2 = c(0.3, -0.7);
        let a = ComplexMatrix::diagonal(&[l1, l2]);
        let t = 2.25;
        let e = matrix_exp(&a, t).unwrap();
        assert!((e[(0, 0)] - (l1 * t).exp()).norm() < 1e-12);
        assert!((e[(1, 1)] - (l2 * t).exp()).norm() < 1e-12);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn semigroup_law() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(-0.5, 1.0), c(0.7, 0.0), c(0.0, 0.2)],
            vec![c(0.1, -0.3), c(-1.0, 0.0), c(0.4, 0.0)],
            vec![c(0.0, 0.0), c(0.2, 0.1), c(-0.2, -0.5)],
        ])
        .unwrap();
        let (s, t) = (0.7, 1.9);
        let est = matrix_exp(&a, s + t).unwrap();
        let prod = matrix_exp(&a, s).unwrap().matmul(&matrix_exp(&a, t).unwrap());
        let scale = est.frob_norm();
        assert!(est.sub(&prod).frob_norm() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn overflow_reports_cap() {
        let a = ComplexMatrix::diagonal(&[c(100.0, 0.0)]);
        match matrix_exp(&a, 50.0) {
            Err(Error::ExpOverflow { t_cap, .. }) => assert!(t_cap > 0.0 && t_cap < 50.0),
            other => panic!("expected overflow, got {:?}", other.map(|m| m.max_abs())),
        }
    }

    #[test]
    fn log_exp_norm_matches_direct_norm() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(-0.5, 0.3), c(1.2, 0.0)],
            vec![c(0.0, -0.4), c(-1.5, 0.0)],
        ])
        .unwrap();
        for t in [0.25, 1.0, 4.0] {
            let direct = matrix_exp(&a, t).unwrap().op_norm().ln();
            let viasq = log_exp_norm(&a, t, 42).unwrap();
            assert!((direct - viasq).abs() < 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn log_exp_norm_survives_deep_decay() {
        // e^{-4096} underflows f64; the log path must still return -4096 t-rate.
        let a = ComplexMatrix::diagonal(&[c(-1.0, 0.0)]);
        let t = 4096.0;
        let l = log_exp_norm(&a, t, 42).unwrap();
        assert!((l / t + 1.0).abs() < 1e-10);
    }
}
