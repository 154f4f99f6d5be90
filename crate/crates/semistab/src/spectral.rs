//! Spectral structure of diagonalizable matrices: resolution of the
//! identity, spectral measure over eigenvalue subsets, the uniform bound
//! M0 on the measure, and the bounded operational calculus F(A).

use crate::error::{Error, Result};
use crate::linalg::{eig_with, lu_factor, C64, ComplexMatrix, EigConfig};
use crate::DEFAULT_SEED;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distinct eigenvalues with their spectral projections: A = sum lambda_j P_j,
/// sum P_j = I, P_j P_k = delta_jk P_j.
#[derive(Clone, Debug)]
pub struct SpectralResolution {
    pub distinct_eigenvalues: Vec<C64>,
    pub projections: Vec<ComplexMatrix>,
    pub cluster_tol: f64,
    pub source_dim: usize,
}

/// Diagnostics for inputs without an eigenbasis.
#[derive(Clone, Debug)]
pub struct DefectiveInfo {
    pub eigenvalues: Vec<C64>,
    pub residual: f64,
    pub vcond: Option<f64>,
}

/// A defective input is a reportable value, not an error: growth and
/// resolvent analyses still run on it.
#[derive(Clone, Debug)]
pub enum Resolution {
    ScalarType(SpectralResolution),
    Defective(DefectiveInfo),
}

impl Resolution {
    pub fn scalar_type(&self) -> Option<&SpectralResolution> {
        match self {
            Resolution::ScalarType(r) => Some(r),
            Resolution::Defective(_) => None,
        }
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        match self {
            Resolution::ScalarType(r) => r.distinct_eigenvalues.clone(),
            Resolution::Defective(d) => d.eigenvalues.clone(),
        }
    }
}

/// Truncated normal multiplication operator on l^2, kept as its eigenvalue
/// list.  The closed forms below are exact and serve as oracles for the
/// matrix pipeline.
#[derive(Clone, Debug)]
pub struct DiagonalOperator {
    pub eigenvalues: Vec<C64>,
    pub label: String,
}

impl DiagonalOperator {
    pub fn new(eigenvalues: Vec<C64>, label: impl Into<String>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::Input("diagonal operator needs at least one eigenvalue".into()));
        }
        if !eigenvalues.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Input("diagonal operator has non-finite eigenvalues".into()));
        }
        Ok(DiagonalOperator {
            eigenvalues,
            label: label.into(),
        })
    }

    /// The drifting-spectrum family lambda_n = i n - 1/n, n = 1..N.
    pub fn drifting(n: usize) -> Self {
        let eigenvalues = (1..=n)
            .map(|k| C64::new(-1.0 / k as f64, k as f64))
            .collect();
        DiagonalOperator {
            eigenvalues,
            label: format!("drifting N={n}"),
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::diagonal(&self.eigenvalues)
    }

    pub fn spectral_bound(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// ||e^{tA}|| = e^{s(A) t}, exactly, for normal multiplication operators.
    pub fn exp_norm(&self, t: f64) -> f64 {
        (self.spectral_bound() * t).exp()
    }

    /// ||R(lambda, A)|| = 1 / dist(lambda, sigma(A)).
    pub fn resolvent_norm(&self, lambda: C64) -> f64 {
        1.0 / self.dist_to_spectrum(lambda)
    }

    pub fn dist_to_spectrum(&self, lambda: C64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| (l - lambda).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// sup over the imaginary axis of the resolvent norm, by the closed form.
    pub fn axis_sup_closed_form(&self) -> f64 {
        // dist(i w, lambda) is minimized over w at w = Im lambda
        self.eigenvalues
            .iter()
            .map(|l| 1.0 / l.re.abs())
            .fold(0.0, f64::max)
    }
}

/// Builds the spectral resolution of A by clustering its eigenvalues and
/// assembling P_j = V D_j V^{-1} over each cluster's eigenvector columns.
pub fn spectral_resolution(a: &ComplexMatrix, tol: f64) -> Result<Resolution> {
    spectral_resolution_seeded(a, tol, DEFAULT_SEED)
}

pub fn spectral_resolution_seeded(a: &ComplexMatrix, tol: f64, seed: u64) -> Result<Resolution> {
    if tol <= 0.0 {
        return Err(Error::Input(format!("tolerance must be positive, got {tol}")));
    }
    let config = EigConfig {
        tol,
        seed,
        ..EigConfig::default()
    };
    let decomp = eig_with(a, &config)?;
    if !decomp.diagonalizable {
        return Ok(Resolution::Defective(DefectiveInfo {
            eigenvalues: decomp.eigenvalues,
            residual: decomp.residual,
            vcond: decomp.vcond,
        }));
    }
    let v = decomp.v.expect("diagonalizable decomposition carries V");
    let n = a.dim();
    let scale = a.op_norm_seeded(seed).max(1.0);
    let cluster_tol = tol.max(1e-10) * scale;

    let clusters = cluster_eigenvalues(&decomp.eigenvalues, cluster_tol);
    let vinv = lu_factor(&v)?.solve_matrix(&ComplexMatrix::identity(n));

    let mut distinct = Vec::with_capacity(clusters.len());
    let mut projections = Vec::with_capacity(clusters.len());
    for members in &clusters {
        // representative: centroid of the cluster
        let centroid = members
            .iter()
            .fold(C64::new(0.0, 0.0), |acc, &i| acc + decomp.eigenvalues[i])
            / members.len() as f64;
        let mut selector = ComplexMatrix::zeros(n);
        for &i in members {
            selector[(i, i)] = C64::new(1.0, 0.0);
        }
        distinct.push(centroid);
        projections.push(v.matmul(&selector).matmul(&vinv));
    }
    Ok(Resolution::ScalarType(SpectralResolution {
        distinct_eigenvalues: distinct,
        projections,
        cluster_tol,
        source_dim: n,
    }))
}

/// Transitive-closure clustering: eigenvalues within cluster_tol of some
/// member join that member's cluster.
fn cluster_eigenvalues(eigenvalues: &[C64], cluster_tol: f64) -> Vec<Vec<usize>> {
    let n = eigenvalues.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigenvalues[i] - eigenvalues[j]).norm() <= cluster_tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_to_group: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_to_group[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_to_group[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// E_A(delta) = sum of the projections indexed by `index_set` (0-based).
pub fn spectral_measure(res: &SpectralResolution, index_set: &[usize]) -> Result<ComplexMatrix> {
    let m = res.projections.len();
    let mut out = ComplexMatrix::zeros(res.source_dim);
    let mut seen = vec![false; m];
    for &j in index_set {
        if j >= m {
            return Err(Error::Input(format!(
                "index {j} out of range for {m} spectral clusters"
            )));
        }
        if !seen[j] {
            seen[j] = true;
            out = out.add(&res.projections[j]);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum M0Method {
    /// Full enumeration over all 2^m eigenvalue subsets.
    Exact,
    /// Singleton plus random-subset lower bound.
    Bounded,
}

#[derive(Clone, Debug)]
pub struct M0Estimate {
    /// sup over enumerated Borel sets of ||E_A(delta)||; exact when
    /// `method == Exact`, otherwise a lower bound.
    pub value: f64,
    pub method: M0Method,
    /// Certified upper bound sum_j ||P_j||.
    pub upper: f64,
}

/// M0 = sup over Borel sets of ||E_A(delta)||.  In finite dimensions the
/// sup over Borel sets reduces to the sup over eigenvalue subsets, which
/// is enumerated exactly up to `subset_cap` clusters.
pub fn m0(res: &SpectralResolution, subset_cap: usize) -> M0Estimate {
    m0_seeded(res, subset_cap, DEFAULT_SEED)
}

const M0_RANDOM_SUBSETS: usize = 4096;

pub fn m0_seeded(res: &SpectralResolution, subset_cap: usize, seed: u64) -> M0Estimate {
    let m = res.projections.len();
    let upper: f64 = res.projections.iter().map(|p| p.op_norm_seeded(seed)).sum();
    let norm_of_subset = |mask: u128| -> f64 {
        let mut sum = ComplexMatrix::zeros(res.source_dim);
        for (j, p) in res.projections.iter().enumerate() {
            if mask & (1u128 << j) != 0 {
                sum = sum.add(p);
            }
        }
        sum.op_norm_seeded(seed)
    };

    if m <= subset_cap && m < 128 {
        let mut value = 0.0f64;
        for mask in 1u128..(1u128 << m) {
            value = value.max(norm_of_subset(mask));
        }
        M0Estimate {
            value,
            method: M0Method::Exact,
            upper,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut value = 0.0f64;
        for j in 0..m.min(127) {
            value = value.max(norm_of_subset(1u128 << j));
        }
        let full: u128 = if m >= 128 { u128::MAX } else { (1u128 << m) - 1 };
        value = value.max(norm_of_subset(full));
        for _ in 0..M0_RANDOM_SUBSETS {
            let mut mask = 0u128;
            for j in 0..m.min(127) {
                if rng.gen::<bool>() {
                    mask |= 1u128 << j;
                }
            }
            if mask != 0 {
                value = value.max(norm_of_subset(mask));
            }
        }
        M0Estimate {
            value,
            method: M0Method::Bounded,
            upper,
        }
    }
}

/// Borel operational calculus F(A) = sum_j F(lambda_j) P_j.
pub fn borel_apply<F>(res: &SpectralResolution, f: F) -> Result<ComplexMatrix>
where
    F: Fn(C64) -> C64,
{
    let mut out = ComplexMatrix::zeros(res.source_dim);
    for (lambda, p) in res.distinct_eigenvalues.iter().zip(&res.projections) {
        let val = f(*lambda);
        if !(val.re.is_finite() && val.im.is_finite()) {
            return Err(Error::NonFiniteFunction { eigenvalue: *lambda });
        }
        out = out.add(&p.scale(val));
    }
    Ok(out)
}
