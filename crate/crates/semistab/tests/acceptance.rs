//! End-to-end acceptance suite.  Each test covers one numbered criterion
//! and prints a single PASS/FAIL line (visible with `--nocapture`).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semistab::demo::{random_unitary, run_demo};
use semistab::linalg::{matrix_exp, solve, ComplexMatrix};
use semistab::semigroup::{
    analyze, best_constant_scan, growth_bound_estimate, growth_curve_seeded, smt_check,
    spectral_bound, AnalyzeConfig, Classification,
};
use semistab::spectral::{borel_apply, m0_seeded, spectral_resolution_seeded, DiagonalOperator};
use semistab::stability::{
    axis_sup_seeded, gpg_classify_seeded, laplace_resolvent_seeded, resolvent,
    resolvent_norm_seeded,
};
use semistab::DEFAULT_SEED;
use std::process::Command;

type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn run(name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("[PASS] {name}"),
        Err(msg) => {
            println!("[FAIL] {name}: {msg}");
            panic!("{name}: {msg}");
        }
    }
}

fn ensure(cond: bool, msg: impl Fn() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Eigenvalues with pairwise separation >= 0.2 so clustering and the
/// eigenbasis conditioning stay benign.
fn separated_eigenvalues(
    n: usize,
    rng: &mut ChaCha8Rng,
    re: (f64, f64),
    im: (f64, f64),
) -> Vec<C64> {
    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    while eigs.len() < n {
        let cand = c(
            re.0 + (re.1 - re.0) * rng.gen::<f64>(),
            im.0 + (im.1 - im.0) * rng.gen::<f64>(),
        );
        if eigs.iter().all(|e| (e - cand).norm() >= 0.2) {
            eigs.push(cand);
        }
    }
    eigs
}

/// W Lambda W^{-1} with cond(W) <= 4 (singular values in [0.5, 2]).
fn similarity(eigs: &[C64], rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let n = eigs.len();
    let q1 = random_unitary(n, rng);
    let q2 = random_unitary(n, rng);
    let d: Vec<C64> = (0..n)
        .map(|_| c(0.5 + 1.5 * rng.gen::<f64>(), 0.0))
        .collect();
    let w = q1.matmul(&ComplexMatrix::diagonal(&d)).matmul(&q2);
    let winv = solve(&w, &ComplexMatrix::identity(n)).unwrap().x;
    w.matmul(&ComplexMatrix::diagonal(eigs)).matmul(&winv)
}

fn nilpotent() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
}

fn nilpotent_exp_norm(t: f64) -> f64 {
    ((2.0 + t * t + t * (t * t + 4.0).sqrt()) / 2.0).sqrt()
}

#[test]
fn criterion_01_nilpotent_reproduction() {
    run("criterion 01: nilpotent reproduction", || {
        let a = nilpotent();
        let res = semistab::linalg::eig(&a, 1e-9).map_err(|e| e.to_string())?;
        let s = spectral_bound(&res.eigenvalues).map_err(|e| e.to_string())?;
        ensure(s == 0.0, || format!("spectral bound {s} is not exactly 0"))?;

        let curve = growth_curve_seeded(&a, 1.0, 10, DEFAULT_SEED).map_err(|e| e.to_string())?;
        let last = curve.samples.last().unwrap();
        ensure(last.t == 1024.0, || format!("last sample at t={}", last.t))?;
        ensure(last.rate > 0.0 && last.rate < 0.01, || {
            format!("rate at t=1024 is {}", last.rate)
        })?;

        for t in [1.0, 10.0, 100.0] {
            let norm = matrix_exp(&a, t)
                .map_err(|e| e.to_string())?
                .op_norm_seeded(DEFAULT_SEED);
            let exact = nilpotent_exp_norm(t);
            let rel = (norm - exact).abs() / exact;
            ensure(rel <= 1e-8, || format!("t={t}: rel error {rel:.3e}"))?;
        }

        let scan = best_constant_scan(&a, 0.0, 200.0, 256, None, DEFAULT_SEED)
            .map_err(|e| e.to_string())?;
        ensure(scan.diverging, || "scan did not report divergence".into())?;
        ensure(scan.grid_sup >= 100.0, || {
            format!("grid_sup {} < 100 by t=200", scan.grid_sup)
        })?;
        Ok(())
    });
}

#[test]
fn criterion_02_sbegb() {
    run("criterion 02: spectral bound = growth bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5be6b0);
        for trial in 0..50 {
            let n = 2 + rng.gen_range(0..7); // n in 2..=8
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0));
            let a = similarity(&eigs, &mut rng);
            let s = spectral_bound(&eigs).unwrap();
            // t0 * 2^12 = 2^10
            let curve =
                growth_curve_seeded(&a, 0.25, 12, DEFAULT_SEED).map_err(|e| e.to_string())?;
            let est = growth_bound_estimate(&curve).map_err(|e| e.to_string())?;
            ensure(est.upper, || "estimate not flagged as an upper bound".into())?;
            ensure(
                est.value >= s - 1e-8 && est.value <= s + 0.05,
                || format!("trial {trial}: estimate {} vs s(A) {s}", est.value),
            )?;
        }
        Ok(())
    });
}

#[test]
fn criterion_03_scalar_type_estimate() {
    run("criterion 03: ||e^{tA}|| <= 4 m0 e^{s(A)t}", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4e57);
        for trial in 0..50 {
            let n = 2 + rng.gen_range(0..7);
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0));
            let a = similarity(&eigs, &mut rng);
            let s = spectral_bound(&eigs).unwrap();
            let res = spectral_resolution_seeded(&a, 1e-9, DEFAULT_SEED)
                .map_err(|e| e.to_string())?;
            let res = res
                .scalar_type()
                .ok_or_else(|| format!("trial {trial}: input classified defective"))?;
            let m0 = m0_seeded(res, 8, DEFAULT_SEED);
            for k in 1..=20 {
                let t = 0.5 * k as f64;
                let norm = matrix_exp(&a, t)
                    .map_err(|e| e.to_string())?
                    .op_norm_seeded(DEFAULT_SEED);
                let bound = 4.0 * m0.value * (s * t).exp();
                let scale = bound.max(1.0);
                ensure(norm <= bound + 1e-8 * scale, || {
                    format!("trial {trial} t={t}: {norm} > 4 m0 e^st = {bound}")
                })?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_04_normal_sharpness() {
    run("criterion 04: normal sharpness and m0 = 1", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6e0a);
        for trial in 0..50 {
            let n = 2 + rng.gen_range(0..7);
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0));
            let q = random_unitary(n, &mut rng);
            let a = q.matmul(&ComplexMatrix::diagonal(&eigs)).matmul(&q.adjoint());
            let s = spectral_bound(&eigs).unwrap();
            for t in [0.3, 1.0, 2.7] {
                let norm = matrix_exp(&a, t)
                    .map_err(|e| e.to_string())?
                    .op_norm_seeded(DEFAULT_SEED);
                let exact = (s * t).exp();
                let rel = (norm - exact).abs() / exact;
                ensure(rel <= 1e-10, || {
                    format!("trial {trial} t={t}: rel deviation {rel:.3e}")
                })?;
            }
            let res = spectral_resolution_seeded(&a, 1e-9, DEFAULT_SEED)
                .map_err(|e| e.to_string())?;
            let res = res
                .scalar_type()
                .ok_or_else(|| format!("trial {trial}: normal input classified defective"))?;
            let m0 = m0_seeded(res, 20, DEFAULT_SEED);
            ensure((m0.value - 1.0).abs() <= 1e-8, || {
                format!("trial {trial}: m0 = {}", m0.value)
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_05_operational_calculus_sandwich() {
    run("criterion 05: max|F| <= ||F(A)|| <= 4 m0 max|F|", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb04e1);
        for trial in 0..100 {
            let n = 2 + rng.gen_range(0..7);
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0));
            let a = similarity(&eigs, &mut rng);
            let res = spectral_resolution_seeded(&a, 1e-9, DEFAULT_SEED)
                .map_err(|e| e.to_string())?;
            let res = res
                .scalar_type()
                .ok_or_else(|| format!("trial {trial}: input classified defective"))?;
            let m0 = m0_seeded(res, 20, DEFAULT_SEED);
            // bounded Borel function: trig + rational, finite on C
            let (u, v) = (rng.gen::<f64>() * 3.0, rng.gen::<f64>() * 3.0);
            let f = |z: C64| (z * c(0.0, u)).cos() / (z.norm_sqr() + 1.0) + c(v, -u) / (z - c(5.0, 0.0));
            let fa = borel_apply(res, f).map_err(|e| e.to_string())?;
            let fa_norm = fa.op_norm_seeded(DEFAULT_SEED);
            let max_f = res
                .distinct_eigenvalues
                .iter()
                .map(|z| f(*z).norm())
                .fold(0.0, f64::max);
            ensure(max_f <= fa_norm + 1e-8, || {
                format!("trial {trial}: max|F| {max_f} > ||F(A)|| {fa_norm}")
            })?;
            ensure(fa_norm <= 4.0 * m0.value * max_f + 1e-8, || {
                format!(
                    "trial {trial}: ||F(A)|| {fa_norm} > 4 m0 max|F| {}",
                    4.0 * m0.value * max_f
                )
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_06_resolvent_lower_bound() {
    run("criterion 06: ||R(lambda,A)|| >= 1/dist", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4d157);
        let mut pairs = 0usize;
        for trial in 0..100 {
            let n = 2 + rng.gen_range(0..7);
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0));
            let normal = trial % 2 == 0;
            let a = if normal {
                let q = random_unitary(n, &mut rng);
                q.matmul(&ComplexMatrix::diagonal(&eigs)).matmul(&q.adjoint())
            } else {
                similarity(&eigs, &mut rng)
            };
            let mut taken = 0;
            while taken < 10 {
                let lambda = c(
                    -6.0 + 10.0 * rng.gen::<f64>(),
                    -8.0 + 16.0 * rng.gen::<f64>(),
                );
                let dist = eigs.iter().map(|e| (e - lambda).norm()).fold(f64::INFINITY, f64::min);
                if dist < 0.1 {
                    continue;
                }
                taken += 1;
                pairs += 1;
                let rn = resolvent_norm_seeded(&a, lambda, DEFAULT_SEED)
                    .map_err(|e| e.to_string())?;
                ensure(rn >= 1.0 / dist - 1e-8, || {
                    format!("trial {trial}: ||R|| {rn} < 1/dist {}", 1.0 / dist)
                })?;
                if normal {
                    let dev = (rn - 1.0 / dist).abs();
                    ensure(dev <= 1e-10 * (1.0 / dist).max(1.0), || {
                        format!("trial {trial} (normal): deviation {dev:.3e} from 1/dist")
                    })?;
                }
            }
        }
        ensure(pairs == 1000, || format!("only {pairs} pairs tested"))?;
        Ok(())
    });
}

#[test]
fn criterion_07_gpg_equivalence() {
    run("criterion 07: resolvent-criterion equivalence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x69b6);
        for trial in 0..200 {
            let n = 4;
            let stable = trial % 2 == 0;
            let mut eigs = if stable {
                separated_eigenvalues(n, &mut rng, (-3.0, -0.2), (-5.0, 5.0))
            } else {
                separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0))
            };
            if !stable {
                eigs[0].re = 0.2 + 0.8 * rng.gen::<f64>();
            }
            let a = similarity(&eigs, &mut rng);
            let s = spectral_bound(&eigs).unwrap();
            let verdict =
                gpg_classify_seeded(&a, 1e-3, DEFAULT_SEED).map_err(|e| e.to_string())?;
            if verdict.indeterminate {
                continue;
            }
            let expected = if s < 0.0 {
                Classification::Ues
            } else {
                Classification::NotUes
            };
            ensure(verdict.classification == expected, || {
                format!("trial {trial}: verdict {:?} vs s(A) = {s}", verdict.classification)
            })?;
            ensure(verdict.rhp_in_resolvent_set == (s < 0.0), || {
                format!("trial {trial}: rhp_in_resolvent_set mismatch at s(A) = {s}")
            })?;
            if !stable {
                continue;
            }
            let scan = verdict
                .axis
                .as_ref()
                .ok_or_else(|| format!("trial {trial}: stable verdict missing axis scan"))?;
            ensure(scan.converged, || format!("trial {trial}: scan did not converge"))?;
            let width = scan.sup_upper - scan.sup_lower;
            ensure(width <= 1e-3 * scan.sup_lower * 1.0000001, || {
                format!("trial {trial}: enclosure width {width} vs lower {}", scan.sup_lower)
            })?;
            // dense brute force must stay inside the certified enclosure
            let r = scan.truncation_radius;
            let mut bf: f64 = 0.0;
            for k in 0..10_000 {
                let w = -r + 2.0 * r * k as f64 / 9_999.0;
                bf = bf.max(
                    resolvent_norm_seeded(&a, c(0.0, w), DEFAULT_SEED)
                        .map_err(|e| e.to_string())?,
                );
            }
            ensure(bf <= scan.sup_upper * (1.0 + 1e-9), || {
                format!("trial {trial}: brute force {bf} exceeds upper {}", scan.sup_upper)
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_08_laplace_representation() {
    run("criterion 08: Laplace representation of the resolvent", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a97ace);
        for trial in 0..50 {
            let n = 2 + rng.gen_range(0..5); // n in 2..=6
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, -0.5), (-4.0, 4.0));
            let a = similarity(&eigs, &mut rng);
            let lambda = c(0.5 + rng.gen::<f64>(), -2.0 + 4.0 * rng.gen::<f64>());
            let mut f: Vec<C64> = (0..n)
                .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let fn_norm = semistab::linalg::vec_norm(&f);
            for z in f.iter_mut() {
                *z /= fn_norm;
            }
            let out = laplace_resolvent_seeded(&a, lambda, &f, 40.0, 40, DEFAULT_SEED)
                .map_err(|e| e.to_string())?;
            ensure(out.tail_bound <= 1e-8, || {
                format!("trial {trial}: tail bound {} too large at T=40", out.tail_bound)
            })?;
            let exact = resolvent(&a, lambda).map_err(|e| e.to_string())?.mul_vec(&f);
            let err = semistab::linalg::vec_norm(&semistab::linalg::vec_sub(&out.value, &exact));
            ensure(err <= out.tail_bound + 1e-6, || {
                format!("trial {trial}: quadrature error {err:.3e}")
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_09_necessity_bound() {
    run("criterion 09: axis sup <= M / (-omega)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4ec);
        for trial in 0..30 {
            let n = 2 + rng.gen_range(0..5);
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, -0.2), (-5.0, 5.0));
            let a = similarity(&eigs, &mut rng);
            let omega = spectral_bound(&eigs).unwrap();
            let res = spectral_resolution_seeded(&a, 1e-9, DEFAULT_SEED)
                .map_err(|e| e.to_string())?;
            let scan_bc = best_constant_scan(&a, omega, 50.0, 128, Some(&res), DEFAULT_SEED)
                .map_err(|e| e.to_string())?;
            let m = scan_bc.certified_upper;
            ensure(m.is_finite(), || format!("trial {trial}: no certified envelope"))?;
            let scan = axis_sup_seeded(&a, 1e-3, DEFAULT_SEED).map_err(|e| e.to_string())?;
            ensure(scan.sup_lower <= m / (-omega) + 1e-6, || {
                format!(
                    "trial {trial}: axis sup {} > M/(-omega) = {}",
                    scan.sup_lower,
                    m / (-omega)
                )
            })?;
        }
        Ok(())
    });
}

#[test]
fn criterion_10_drifting_spectrum() {
    run("criterion 10: drifting truncations, axis sup = N", || {
        let mut sups = Vec::new();
        for n in [10usize, 20, 40] {
            let op = DiagonalOperator::drifting(n);
            let scan = axis_sup_seeded(&op.to_matrix(), 2e-4, DEFAULT_SEED)
                .map_err(|e| e.to_string())?;
            let target = n as f64;
            for (side, v) in [("lower", scan.sup_lower), ("upper", scan.sup_upper)] {
                ensure((v - target).abs() <= 1e-3 * target, || {
                    format!("N={n}: {side} {v} deviates from {target} by more than 0.1%")
                })?;
            }
            sups.push(scan.sup_lower);
        }
        let ratio = sups[2] / sups[1];
        ensure((1.9..=2.1).contains(&ratio), || {
            format!("sup(40)/sup(20) = {ratio}")
        })?;
        Ok(())
    });
}

#[test]
fn criterion_11_smt() {
    run("criterion 11: spectral mapping of e^{tA}", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5037);
        for trial in 0..50 {
            let n = 2 + rng.gen_range(0..7);
            let eigs = separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0));
            let a = similarity(&eigs, &mut rng);
            for t in [0.5, 1.0, 2.0] {
                let mismatch = smt_check(&a, t, DEFAULT_SEED).map_err(|e| e.to_string())?;
                ensure(mismatch <= 1e-8, || {
                    format!("trial {trial} t={t}: mismatch {mismatch:.3e}")
                })?;
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_12_cli_determinism() {
    run("criterion 12: byte-identical demo outputs", || {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let (d1, d2) = (tmp.path().join("run1"), tmp.path().join("run2"));
        for dir in [&d1, &d2] {
            for name in ["nilpotent", "normal", "similar", "drifting"] {
                let status = Command::new(env!("CARGO_BIN_EXE_semistab"))
                    .args(["demo", name, "--out"])
                    .arg(dir)
                    .status()
                    .map_err(|e| e.to_string())?;
                ensure(status.success(), || format!("demo {name} failed: {status}"))?;
            }
        }
        let mut names: Vec<_> = std::fs::read_dir(&d1)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        ensure(!names.is_empty(), || "demo wrote no files".into())?;
        for name in &names {
            let b1 = std::fs::read(d1.join(name)).map_err(|e| e.to_string())?;
            let b2 = std::fs::read(d2.join(name)).map_err(|e| e.to_string())?;
            ensure(b1 == b2, || format!("{name:?} differs between runs"))?;
        }
        // golden file: the nilpotent growth curve is fully closed-form
        let golden = include_str!("golden/demo_nilpotent_curve.csv");
        let actual = std::fs::read_to_string(d1.join("demo_nilpotent_curve.csv"))
            .map_err(|e| e.to_string())?;
        ensure(actual == golden, || "nilpotent curve differs from golden file".into())?;
        Ok(())
    });
}

/// Cross-cutting: library-level analyze agrees with the gpg verdict on a
/// mixed corpus (finite dimensions satisfy both directions of the
/// resolvent characterization).
#[test]
fn analyze_and_gpg_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa94ee);
    let config = AnalyzeConfig::default();
    for trial in 0..20 {
        let n = 2 + rng.gen_range(0..5);
        let eigs = separated_eigenvalues(n, &mut rng, (-3.0, 1.0), (-5.0, 5.0));
        let a = similarity(&eigs, &mut rng);
        let report = analyze(&a, &config).unwrap();
        let verdict = gpg_classify_seeded(&a, 1e-3, DEFAULT_SEED).unwrap();
        if !verdict.indeterminate {
            assert_eq!(
                report.classification, verdict.classification,
                "trial {trial}: classifications disagree"
            );
        }
    }
}

#[test]
fn demo_library_entry_points() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["nilpotent", "normal", "similar", "drifting"] {
        let written = run_demo(name, tmp.path(), DEFAULT_SEED).unwrap();
        assert!(!written.is_empty(), "{name} wrote nothing");
    }
}
