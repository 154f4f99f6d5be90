//! Built-in demonstrations: the nilpotent generator with no best stability
//! constant, a random normal generator with sharp constants, an
//! ill-conditioned similarity of a normal generator, and the drifting
//! diagonal spectrum whose axis supremum grows with the truncation.

use crate::error::{Error, Result};
use crate::io::{
    axis_csv, build_report, growth_curve_csv, matrix_to_file, num, to_json_string, InputOperator,
};
use crate::linalg::{matrix_exp, vec_norm, C64, ComplexMatrix};
use crate::semigroup::{analyze, AnalyzeConfig};
use crate::spectral::DiagonalOperator;
use crate::stability::{axis_sup_seeded, gpg_classify_seeded};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};

pub const DEMO_NAMES: [&str; 4] = ["nilpotent", "normal", "similar", "drifting"];

/// Runs a named demo, writing its reports and CSVs into `out_dir`.
/// Returns the paths written.
pub fn run_demo(name: &str, out_dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::Input(format!("cannot create output directory: {e}")))?;
    match name {
        "nilpotent" => demo_nilpotent(out_dir, seed),
        "normal" => demo_normal(out_dir, seed),
        "similar" => demo_similar(out_dir, seed),
        "drifting" => demo_drifting(out_dir, seed),
        other => Err(Error::Input(format!(
            "unknown demo `{other}`; expected one of {DEMO_NAMES:?}"
        ))),
    }
}

fn write(out_dir: &Path, name: &str, content: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = out_dir.join(name);
    fs::write(&path, content).map_err(|e| Error::Input(format!("cannot write {name}: {e}")))?;
    written.push(path);
    Ok(())
}

fn demo_config(seed: u64) -> AnalyzeConfig {
    AnalyzeConfig {
        seed,
        ..AnalyzeConfig::default()
    }
}

fn analyze_and_report(
    input: &InputOperator,
    config: &AnalyzeConfig,
    demo: &str,
) -> Result<String> {
    let a = input.to_matrix();
    let report = analyze(&a, config)?;
    let gpg = gpg_classify_seeded(&a, 1e-3, config.seed)?;
    let echo = json!({"demo": demo, "seed": config.seed, "tol": num(config.tol)});
    Ok(to_json_string(&build_report(input, &report, Some(&gpg), echo)))
}

/// s(A) = omega_0 = 0 but no finite M bounds ||e^{tA}||: the growth curve
/// rate creeps to zero from above while the best-constant scan diverges.
fn demo_nilpotent(out_dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let matrix = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]])?;
    let input = InputOperator::Matrix {
        matrix: matrix.clone(),
        label: Some("nilpotent".into()),
    };
    let mut config = demo_config(seed);
    config.t0 = Some(1.0);
    config.doublings = 10;

    let mut written = Vec::new();
    let report = analyze_and_report(&input, &config, "nilpotent")?;
    write(out_dir, "demo_nilpotent_report.json", &report, &mut written)?;

    let curve = crate::semigroup::growth_curve_seeded(&matrix, 1.0, 10, seed)?;
    write(out_dir, "demo_nilpotent_curve.csv", &growth_curve_csv(&curve), &mut written)?;

    let file = matrix_to_file(&matrix, Some("nilpotent"));
    let value = serde_json::to_value(&file).map_err(|e| Error::Input(e.to_string()))?;
    write(out_dir, "demo_nilpotent_matrix.json", &to_json_string(&value), &mut written)?;
    Ok(written)
}

/// Random stable normal generator: ||e^{tA}|| = e^{s(A)t} and M0 = 1.
fn demo_normal(out_dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6f726d);
    let eigs: Vec<C64> = (0..n)
        .map(|_| C64::new(-3.0 + 2.7 * rng.gen::<f64>(), -5.0 + 10.0 * rng.gen::<f64>()))
        .collect();
    let q = random_unitary(n, &mut rng);
    let a = q.matmul(&ComplexMatrix::diagonal(&eigs)).matmul(&q.adjoint());
    let input = InputOperator::Matrix {
        matrix: a.clone(),
        label: Some("random normal".into()),
    };
    let config = demo_config(seed);

    let mut written = Vec::new();
    let report = analyze_and_report(&input, &config, "normal")?;
    write(out_dir, "demo_normal_report.json", &report, &mut written)?;

    // sharpness checks against the closed forms
    let s = eigs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let mut max_rel_dev = 0.0f64;
    for k in 1..=20 {
        let t = 0.5 * k as f64;
        let norm = matrix_exp(&a, t)?.op_norm_seeded(seed);
        let exact = (s * t).exp();
        max_rel_dev = max_rel_dev.max((norm - exact).abs() / exact);
    }
    let stability = analyze(&a, &config)?;
    let m0_value = stability.m0.as_ref().map(|e| e.value).unwrap_or(f64::NAN);
    let checks = json!({
        "spectral_bound": num(s),
        "exp_norm_max_rel_dev": num(max_rel_dev),
        "m0": num(m0_value),
        "m0_dev": num((m0_value - 1.0).abs()),
    });
    write(out_dir, "demo_normal_checks.json", &to_json_string(&checks), &mut written)?;
    Ok(written)
}

/// Ill-conditioned similarity of a normal generator: spectral data is
/// unchanged but the transient (grid_sup) grows, staying below 4 M0.
fn demo_similar(out_dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x73696d69);
    let eigs: Vec<C64> = (0..n)
        .map(|_| C64::new(-2.5 + 2.2 * rng.gen::<f64>(), -4.0 + 8.0 * rng.gen::<f64>()))
        .collect();
    // W = Q1 D Q2 with singular values spread over three decades
    let q1 = random_unitary(n, &mut rng);
    let q2 = random_unitary(n, &mut rng);
    let d: Vec<C64> = (0..n)
        .map(|k| C64::new(10f64.powf(-3.0 * k as f64 / (n - 1) as f64), 0.0))
        .collect();
    let w = q1.matmul(&ComplexMatrix::diagonal(&d)).matmul(&q2);
    let winv = crate::linalg::solve(&w, &ComplexMatrix::identity(n))?.x;
    let a = w.matmul(&ComplexMatrix::diagonal(&eigs)).matmul(&winv);
    let input = InputOperator::Matrix {
        matrix: a,
        label: Some("ill-conditioned similarity of a normal generator".into()),
    };
    let config = demo_config(seed);

    let mut written = Vec::new();
    let report = analyze_and_report(&input, &config, "similar")?;
    write(out_dir, "demo_similar_report.json", &report, &mut written)?;
    Ok(written)
}

/// lambda_n = i n - 1/n for N in {10, 20, 40}: every truncation is
/// uniformly exponentially stable, yet the axis supremum equals N, so the
/// resolvent condition degrades without bound as the truncation grows.
fn demo_drifting(out_dir: &Path, seed: u64) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut sups = serde_json::Map::new();
    let mut last_scan = None;
    for n in [10usize, 20, 40] {
        let op = DiagonalOperator::drifting(n);
        let scan = axis_sup_seeded(&op.to_matrix(), 1e-3, seed)?;
        sups.insert(
            format!("N={n:02}"),
            json!({
                "lower": num(scan.sup_lower),
                "upper": num(scan.sup_upper),
                "closed_form": num(op.axis_sup_closed_form()),
            }),
        );
        last_scan = Some(scan);
    }
    write(
        out_dir,
        "demo_drifting_sups.json",
        &to_json_string(&serde_json::Value::Object(sups)),
        &mut written,
    )?;
    if let Some(scan) = last_scan {
        write(out_dir, "demo_drifting_axis40.csv", &axis_csv(&scan), &mut written)?;
    }
    Ok(written)
}

/// Haar-ish random unitary: modified Gram-Schmidt on a complex Gaussian
/// matrix (two passes for orthogonality at working precision).
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| C64::new(gaussian(rng), gaussian(rng)))
                .collect()
        })
        .collect();
    for _pass in 0..2 {
        for j in 0..n {
            let (head, tail) = cols.split_at_mut(j);
            let col = &mut tail[0];
            for prev in head.iter() {
                let proj: C64 = prev
                    .iter()
                    .zip(col.iter())
                    .map(|(u, v)| u.conj() * v)
                    .sum();
                for (z, p) in col.iter_mut().zip(prev) {
                    *z -= proj * p;
                }
            }
            let norm = vec_norm(&cols[j]);
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
    }
    let mut q = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            q[(i, j)] = z;
        }
    }
    q
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per draw keeps the stream deterministic
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = random_unitary(7, &mut rng);
        let defect = q
            .adjoint()
            .matmul(&q)
            .sub(&ComplexMatrix::identity(7))
            .frob_norm();
        assert!(defect < 1e-13, "unitarity defect {defect}");
    }

    #[test]
    fn unknown_demo_is_an_input_error() {
        let dir = std::env::temp_dir();
        assert!(matches!(
            run_demo("bogus", &dir, 42),
            Err(Error::Input(_))
        ));
    }
}
