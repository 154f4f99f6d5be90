//! Growth-bound analysis of t -> e^{tA}: spectral bound, sampled growth
//! curves, best-stability-constant scans, spectral mapping checks, and the
//! assembled stability report.

use crate::error::{Error, Result};
use crate::linalg::{eig_with, log_exp_norm, matrix_exp, C64, ComplexMatrix, EigConfig};
use crate::spectral::{m0_seeded, spectral_resolution_seeded, M0Estimate, Resolution};
use crate::DEFAULT_SEED;

/// s(A) = max of real parts of the spectrum.
pub fn spectral_bound(eigenvalues: &[C64]) -> Result<f64> {
    if eigenvalues.is_empty() {
        return Err(Error::Input(
            "spectral bound of an empty spectrum (finite model cannot represent it)".into(),
        ));
    }
    Ok(eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Copy, Debug)]
pub struct GrowthSample {
    pub t: f64,
    /// ||e^{tA}||; may underflow or overflow as f64, `log_norm` is exact.
    pub norm: f64,
    pub log_norm: f64,
    /// (1/t) ln ||e^{tA}||.
    pub rate: f64,
}

/// t |-> ||e^{tA}|| sampled on a geometric grid t0 * 2^k.
#[derive(Clone, Debug)]
pub struct GrowthCurve {
    pub samples: Vec<GrowthSample>,
    pub schedule: String,
    /// Set when the curve had to stop early (exponential overflow).
    pub truncated: bool,
}

/// Samples ||e^{tA}|| at t0 * 2^k, k = 0..=doublings, by repeated squaring
/// of e^{t0 A} with norm renormalization, so deep decay and strong growth
/// both stay representable in log space.
pub fn growth_curve(a: &ComplexMatrix, t0: f64, doublings: usize) -> Result<GrowthCurve> {
    growth_curve_seeded(a, t0, doublings, DEFAULT_SEED)
}

pub fn growth_curve_seeded(
    a: &ComplexMatrix,
    t0: f64,
    doublings: usize,
    seed: u64,
) -> Result<GrowthCurve> {
    if !(t0 > 0.0) {
        return Err(Error::Input(format!("t0 must be positive, got {t0}")));
    }
    if doublings < 1 {
        return Err(Error::Input("doublings must be at least 1".into()));
    }
    let base = matrix_exp(a, t0)?;
    let nu0 = base.op_norm_seeded(seed);
    let mut samples = Vec::with_capacity(doublings + 1);
    let mut truncated = false;
    if nu0 <= 0.0 || !nu0.is_finite() {
        return Err(Error::Input("||e^{t0 A}|| is not a positive finite number".into()));
    }
    let mut d = base.scale(C64::new(1.0 / nu0, 0.0));
    let mut log_norm = nu0.ln();
    let mut t = t0;
    push_sample(&mut samples, t, log_norm);
    for _ in 0..doublings {
        let sq = d.matmul(&d);
        let nu = sq.op_norm_seeded(seed);
        if !(nu.is_finite() && nu > 0.0) {
            truncated = true;
            break;
        }
        d = sq.scale(C64::new(1.0 / nu, 0.0));
        log_norm = 2.0 * log_norm + nu.ln();
        t *= 2.0;
        if !log_norm.is_finite() {
            truncated = true;
            break;
        }
        push_sample(&mut samples, t, log_norm);
    }
    Ok(GrowthCurve {
        samples,
        schedule: format!("geometric t0={t0} doublings={doublings}"),
        truncated,
    })
}

fn push_sample(samples: &mut Vec<GrowthSample>, t: f64, log_norm: f64) {
    samples.push(GrowthSample {
        t,
        norm: log_norm.exp(),
        log_norm,
        rate: log_norm / t,
    });
}

#[derive(Clone, Copy, Debug)]
pub struct GrowthBoundEstimate {
    pub value: f64,
    /// Always true: a finite grid only brackets omega_0 from above, since
    /// omega_0 is the infimum over all t of (1/t) ln ||e^{tA}||.
    pub upper: bool,
}

pub fn growth_bound_estimate(curve: &GrowthCurve) -> Result<GrowthBoundEstimate> {
    if curve.samples.is_empty() {
        return Err(Error::Input("empty growth curve".into()));
    }
    let value = curve
        .samples
        .iter()
        .map(|s| s.rate)
        .fold(f64::INFINITY, f64::min);
    Ok(GrowthBoundEstimate { value, upper: true })
}

/// Scan of M*(omega) = sup_t ||e^{tA}|| e^{-omega t} on a uniform t-grid.
#[derive(Clone, Debug)]
pub struct BestConstantScan {
    /// Max over the grid; a lower bound on the true supremum.
    pub grid_sup: f64,
    /// sum_j ||P_j|| when A is scalar type and omega >= s(A); infinite otherwise.
    pub certified_upper: f64,
    /// Heuristic: the last quarter of the grid increases strictly and
    /// exceeds ten times the first-quarter max.  Never a claim that the
    /// supremum is infinite, only that no bound was found up to t_max.
    pub diverging: bool,
    pub omega: f64,
    pub t_max: f64,
}

pub fn best_constant_scan(
    a: &ComplexMatrix,
    omega: f64,
    t_max: f64,
    samples: usize,
    resolution: Option<&Resolution>,
    seed: u64,
) -> Result<BestConstantScan> {
    if samples < 2 {
        return Err(Error::Input("best-constant scan needs at least 2 samples".into()));
    }
    if !(t_max > 0.0) {
        return Err(Error::Input(format!("t_max must be positive, got {t_max}")));
    }
    let mut values = Vec::with_capacity(samples);
    values.push(1.0); // t = 0: ||I|| e^0
    for j in 1..samples {
        let t = t_max * j as f64 / (samples - 1) as f64;
        let log_norm = log_exp_norm(a, t, seed)?;
        values.push((log_norm - omega * t).exp());
    }
    let grid_sup = values.iter().copied().fold(0.0, f64::max);

    let certified_upper = match resolution {
        Some(Resolution::ScalarType(res)) => {
            let s = spectral_bound(&res.distinct_eigenvalues)?;
            if omega >= s - 1e-14 * s.abs().max(1.0) {
                res.projections.iter().map(|p| p.op_norm_seeded(seed)).sum()
            } else {
                f64::INFINITY
            }
        }
        _ => f64::INFINITY,
    };

    let q = (samples / 4).max(2);
    let grid_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tail = &values[samples - q..];
    let increasing = tail.windows(2).all(|w| w[1] > w[0]);
    let tail_growth = tail[tail.len() - 1] >= 1.2 * tail[0];
    let diverging = increasing && tail_growth && tail[tail.len() - 1] > 10.0 * grid_min;

    Ok(BestConstantScan {
        grid_sup,
        certified_upper,
        diverging,
        omega,
        t_max,
    })
}

/// Spectral mapping check: sigma(e^{tA}) vs e^{t sigma(A)}, as the maximum
/// over eigenvalues mu of e^{tA} of the distance to the nearest e^{t lambda_j},
/// normalized by the dominant scale.
pub fn smt_check(a: &ComplexMatrix, t: f64, seed: u64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Input(format!("smt_check requires t >= 0, got {t}")));
    }
    let config = EigConfig {
        seed,
        ..EigConfig::default()
    };
    let gen_eigs = eig_with(a, &config)?.eigenvalues;
    let exp_t = matrix_exp(a, t)?;
    let semi_eigs = eig_with(&exp_t, &config)?.eigenvalues;
    let mapped: Vec<C64> = gen_eigs.iter().map(|l| (l * t).exp()).collect();
    let scale = mapped
        .iter()
        .map(|z| z.norm())
        .fold(1.0f64, f64::max);
    let mut worst = 0.0f64;
    for mu in &semi_eigs {
        let d = mapped
            .iter()
            .map(|z| (z - mu).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst / scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Ues,
    NotUes,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Ues => "UES",
            Classification::NotUes => "NotUES",
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnalyzeConfig {
    pub tol: f64,
    /// None means auto: 1/||A|| (or 1 when ||A|| = 0).
    pub t0: Option<f64>,
    pub doublings: usize,
    pub scan_t_max: f64,
    pub scan_samples: usize,
    pub subset_cap: usize,
    pub seed: u64,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            tol: 1e-9,
            t0: None,
            doublings: 12,
            scan_t_max: 200.0,
            scan_samples: 256,
            subset_cap: 20,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub spectral_bound: f64,
    pub growth_bound_estimate: GrowthBoundEstimate,
    /// growth estimate minus s(A); nonnegative up to tolerance for
    /// diagonalizable inputs.
    pub sbegb_gap: f64,
    pub scalar_type: bool,
    pub m0: Option<M0Estimate>,
    pub best_constant: BestConstantScan,
    pub classification: Classification,
    pub curve: GrowthCurve,
    pub resolution: Resolution,
    pub warnings: Vec<String>,
}

/// Full growth-side analysis: spectral bound, growth estimate, spectral
/// resolution with M0 when available, best-constant scan at
/// omega = max(s(A), growth estimate), and the Lyapunov classification
/// UES iff s(A) < 0.
pub fn analyze(a: &ComplexMatrix, config: &AnalyzeConfig) -> Result<StabilityReport> {
    a.check_finite()?;
    let mut warnings = Vec::new();
    let resolution = spectral_resolution_seeded(a, config.tol, config.seed)?;
    let eigenvalues = match &resolution {
        Resolution::ScalarType(_) => {
            // use full multiplicity list for the bound; clusters carry
            // centroids which is fine for s(A) too, but the raw spectrum
            // is cheap to recover
            eig_with(
                a,
                &EigConfig {
                    tol: config.tol,
                    seed: config.seed,
                    ..EigConfig::default()
                },
            )?
            .eigenvalues
        }
        Resolution::Defective(d) => d.eigenvalues.clone(),
    };
    let s = spectral_bound(&eigenvalues)?;

    let norm_a = a.op_norm_seeded(config.seed);
    let t0 = config.t0.unwrap_or(if norm_a > 0.0 { 1.0 / norm_a } else { 1.0 });
    let curve = growth_curve_seeded(a, t0, config.doublings, config.seed)?;
    if curve.truncated {
        warnings.push("growth curve truncated before reaching t_max".into());
    }
    let estimate = growth_bound_estimate(&curve)?;
    let sbegb_gap = estimate.value - s;

    let (scalar_type, m0_est) = match &resolution {
        Resolution::ScalarType(res) => (true, Some(m0_seeded(res, config.subset_cap, config.seed))),
        Resolution::Defective(_) => {
            warnings.push("input is not scalar type: M0 and the 4*M0 estimate are skipped".into());
            (false, None)
        }
    };

    // omega_0 = s(A) exactly in finite dimensions; the grid estimate
    // converges from above, so a small excess over s(A) is a sampling
    // artifact and the scan uses s(A).  A large excess means the curve
    // has not settled and the estimate is the only trustworthy rate.
    let omega = if estimate.value - s <= 0.05 {
        s
    } else {
        estimate.value
    };
    let best_constant = best_constant_scan(
        a,
        omega,
        config.scan_t_max,
        config.scan_samples,
        Some(&resolution),
        config.seed,
    )?;

    let classification = if s < 0.0 {
        Classification::Ues
    } else {
        Classification::NotUes
    };

    Ok(StabilityReport {
        spectral_bound: s,
        growth_bound_estimate: estimate,
        sbegb_gap,
        scalar_type,
        m0: m0_est,
        best_constant,
        classification,
        curve,
        resolution,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn nilpotent() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    /// ||e^{tA}|| for the 2x2 nilpotent A, by hand:
    /// sqrt((2 + t^2 + t sqrt(t^2 + 4)) / 2).
    fn nilpotent_exp_norm(t: f64) -> f64 {
        ((2.0 + t * t + t * (t * t + 4.0).sqrt()) / 2.0).sqrt()
    }

    #[test]
    fn spectral_bound_basics() {
        assert_eq!(spectral_bound(&[c(-1.0, 0.0), c(-2.0, 0.0)]).unwrap(), -1.0);
        assert_eq!(spectral_bound(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), 0.0);
        let drifting: Vec<C64> = (1..=20).map(|n| c(-1.0 / n as f64, n as f64)).collect();
        assert!((spectral_bound(&drifting).unwrap() + 1.0 / 20.0).abs() < 1e-15);
        assert!(spectral_bound(&[]).is_err());
    }

    #[test]
    fn growth_curve_of_scalar_decay() {
        let a = ComplexMatrix::diagonal(&[c(-1.0, 0.0)]);
        let curve = growth_curve(&a, 1.0, 5).unwrap();
        assert_eq!(curve.samples.len(), 6);
        for s in &curve.samples {
            assert!((s.rate + 1.0).abs() < 1e-10, "rate {} at t {}", s.rate, s.t);
        }
        let est = growth_bound_estimate(&curve).unwrap();
        assert!((est.value + 1.0).abs() < 1e-10);
        assert!(est.upper);
    }

    #[test]
    fn growth_curve_rates_decrease() {
        let a = ComplexMatrix::from_real_rows(&[vec![-1.0, 5.0], vec![0.0, -2.0]]).unwrap();
        let curve = growth_curve(&a, 0.25, 12).unwrap();
        for w in curve.samples.windows(2) {
            assert!(w[1].rate <= w[0].rate + 1e-8);
        }
    }

    #[test]
    fn nilpotent_growth_rate_tends_to_zero() {
        let curve = growth_curve(&nilpotent(), 1.0, 10).unwrap();
        let last = curve.samples.last().unwrap();
        assert_eq!(last.t, 1024.0);
        assert!(last.rate > 0.0 && last.rate < 0.01, "rate {}", last.rate);
        // closed-form cross check
        let expect = nilpotent_exp_norm(1024.0).ln() / 1024.0;
        assert!((last.rate - expect).abs() < 1e-10);
    }

    #[test]
    fn normal_growth_is_exact_exponential() {
        let a = ComplexMatrix::diagonal(&[c(2.0, 3.0)]);
        let curve = growth_curve(&a, 0.5, 6).unwrap();
        for s in &curve.samples {
            assert!((s.rate - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn best_constant_normal_case() {
        let a = ComplexMatrix::diagonal(&[c(-1.0, 0.0)]);
        let res = spectral_resolution_seeded(&a, 1e-9, DEFAULT_SEED).unwrap();
        let scan = best_constant_scan(&a, -1.0, 50.0, 101, Some(&res), DEFAULT_SEED).unwrap();
        assert!((scan.grid_sup - 1.0).abs() < 1e-8);
        assert!((scan.certified_upper - 1.0).abs() < 1e-8);
        assert!(!scan.diverging);
    }

    #[test]
    fn best_constant_nilpotent_diverges() {
        let scan = best_constant_scan(&nilpotent(), 0.0, 200.0, 401, None, DEFAULT_SEED).unwrap();
        assert!(scan.diverging);
        assert!(scan.grid_sup >= 200.0 * (1.0 - 1e-6), "grid_sup {}", scan.grid_sup);
        assert!(scan.certified_upper.is_infinite());
    }

    #[test]
    fn smt_check_cases() {
        let a = ComplexMatrix::diagonal(&[c(-1.0, 2.0), c(0.5, -1.0)]);
        assert!(smt_check(&a, 0.0, DEFAULT_SEED).unwrap() < 1e-12);
        assert!(smt_check(&a, 1.7, DEFAULT_SEED).unwrap() < 1e-12);
    }

    #[test]
    fn analyze_stable_diagonal() {
        let a = ComplexMatrix::diagonal(&[c(-1.0, 0.0), c(-2.0, 0.0)]);
        let report = analyze(&a, &AnalyzeConfig::default()).unwrap();
        assert_eq!(report.classification, Classification::Ues);
        assert!(report.scalar_type);
        assert!((report.m0.as_ref().unwrap().value - 1.0).abs() < 1e-8);
        assert!(report.sbegb_gap.abs() < 1e-6);
    }

    #[test]
    fn analyze_nilpotent() {
        let config = AnalyzeConfig {
            t0: Some(1.0),
            ..AnalyzeConfig::default()
        };
        let report = analyze(&nilpotent(), &config).unwrap();
        assert_eq!(report.classification, Classification::NotUes);
        assert!(!report.scalar_type);
        assert!(report.m0.is_none());
        assert!(report.best_constant.diverging);
        assert_eq!(report.spectral_bound, 0.0);
    }

    #[test]
    fn analyze_similarity_sandwich() {
        // A = W diag(-1,-2) W^{-1}, W = [[1,1],[0,1]] -> [[-1, -1], [0, -2]]
        let a = ComplexMatrix::from_real_rows(&[vec![-1.0, -1.0], vec![0.0, -2.0]]).unwrap();
        let report = analyze(&a, &AnalyzeConfig::default()).unwrap();
        assert_eq!(report.classification, Classification::Ues);
        let m0v = report.m0.as_ref().unwrap().value;
        assert!(report.best_constant.grid_sup >= 1.0 - 1e-10);
        assert!(report.best_constant.grid_sup <= 4.0 * m0v + 1e-6);
    }
}
