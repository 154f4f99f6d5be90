use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (bad dimensions, non-finite
    /// entries, empty spectra, unknown fields in input files).
    #[error("invalid input: {0}")]
    Input(String),

    /// Pivoted elimination hit a pivot below the singularity threshold.
    #[error("matrix is numerically singular (pivot magnitude {pivot:.3e})")]
    Singular { pivot: f64 },

    /// The shifted QR iteration did not deflate within the sweep budget.
    #[error("eigenvalue iteration failed to converge on block {lo}..={hi} after {sweeps} sweeps")]
    EigNoConvergence { lo: usize, hi: usize, sweeps: usize },

    /// Entries of e^{tA} left the representable range.
    #[error("matrix exponential overflow at t = {t}; suggested cap t <= {t_cap:.3e}")]
    ExpOverflow { t: f64, t_cap: f64 },

    /// Resolvent requested at a point numerically inside the spectrum.
    #[error("lambda = {lambda} is numerically in the spectrum (dist estimate {dist:.3e})")]
    SpectrumHit { lambda: Complex64, dist: f64 },

    /// Operational calculus applied to a function that is not finite on
    /// the spectrum.
    #[error("function value is not finite at eigenvalue {eigenvalue}")]
    NonFiniteFunction { eigenvalue: Complex64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The closed right half-plane meets the spectrum, so an axis scan
    /// has no finite supremum to enclose.
    #[error("spectrum meets the closed right half-plane: eigenvalue {witness}")]
    RightHalfPlaneSpectrum { witness: Complex64 },
}

pub type Result<T> = std::result::Result<T, Error>;
