//! Gaussian ensembles (GOE, GUE, GSE) parameterized by level count, center
//! energy and mean level spacing at the band center.
//!
//! A matrix is drawn from the density `exp(-Tr (H - <E>)^2 / (2 sigma^2))`.
//! For the symplectic class the trace is the quaternion (scalar-part) trace,
//! which is half of the trace over the `2N`-dimensional complex
//! representation. With this convention every class has semicircle radius
//! `a = sqrt(2 N beta_e) sigma = 2 N <s> / pi`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dyson symmetry class of a Gaussian ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    Goe,
    Gue,
    Gse,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 3] = [SymmetryClass::Goe, SymmetryClass::Gue, SymmetryClass::Gse];

    /// Number of real parameters per matrix element.
    pub fn dyson_index(self) -> u32 {
        match self {
            SymmetryClass::Goe => 1,
            SymmetryClass::Gue => 2,
            SymmetryClass::Gse => 4,
        }
    }

    /// Degeneracy of every level (Kramers pairs for GSE).
    pub fn degeneracy(self) -> usize {
        match self {
            SymmetryClass::Gse => 2,
            _ => 1,
        }
    }

    /// Ratio between the complex matrix dimension and the number of levels.
    pub fn matrix_dim_factor(self) -> usize {
        self.degeneracy()
    }

    pub fn from_dyson_index(beta_e: u32) -> Result<Self> {
        match beta_e {
            1 => Ok(SymmetryClass::Goe),
            2 => Ok(SymmetryClass::Gue),
            4 => Ok(SymmetryClass::Gse),
            other => Err(Error::InvalidSpec(format!("no Gaussian ensemble with Dyson index {other}"))),
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::Goe => "goe",
            SymmetryClass::Gue => "gue",
            SymmetryClass::Gse => "gse",
        })
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "goe" => Ok(SymmetryClass::Goe),
            "gue" => Ok(SymmetryClass::Gue),
            "gse" => Ok(SymmetryClass::Gse),
            other => Err(Error::InvalidSpec(format!("unknown symmetry class '{other}'"))),
        }
    }
}

/// One Gaussian ensemble: `N` distinct levels centered at `mean_energy`
/// with mean spacing `mean_spacing` at the band center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n_levels: usize,
    pub class: SymmetryClass,
    pub mean_energy: f64,
    pub mean_spacing: f64,
}

impl EnsembleSpec {
    pub fn new(n_levels: usize, class: SymmetryClass, mean_energy: f64, mean_spacing: f64) -> Result<Self> {
        let spec = EnsembleSpec { n_levels, class, mean_energy, mean_spacing };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_levels == 0 {
            return Err(Error::InvalidSpec("number of levels must be positive".into()));
        }
        if !(self.mean_spacing > 0.0) || !self.mean_spacing.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "mean spacing must be positive and finite, got {}",
                self.mean_spacing
            )));
        }
        if !self.mean_energy.is_finite() {
            return Err(Error::InvalidSpec("mean energy must be finite".into()));
        }
        Ok(())
    }

    pub fn matrix_dim(&self) -> usize {
        self.class.matrix_dim_factor() * self.n_levels
    }

    /// Element scale `sigma` derived from the mean spacing.
    pub fn sigma(&self) -> f64 {
        self.mean_spacing * (2.0 * self.n_levels as f64 / self.class.dyson_index() as f64).sqrt() / PI
    }

    /// Semicircle radius `2 N <s> / pi`.
    pub fn radius(&self) -> f64 {
        2.0 * self.n_levels as f64 * self.mean_spacing / PI
    }

    /// Semicircle radius `sqrt(2 N beta_e) sigma`; agrees with [`Self::radius`].
    pub fn radius_from_sigma(&self) -> f64 {
        (2.0 * self.n_levels as f64 * self.class.dyson_index() as f64).sqrt() * self.sigma()
    }

    /// Same ensemble with `N` changed and the spacing rescaled so that
    /// `N <s>` (hence the semicircle radius) is unchanged.
    pub fn rescaled_to(&self, n_levels: usize) -> Result<Self> {
        let spacing = self.mean_spacing * self.n_levels as f64 / n_levels as f64;
        EnsembleSpec::new(n_levels, self.class, self.mean_energy, spacing)
    }
}

/// `sigma = <s> sqrt(2N / beta_e) / pi`.
pub fn spacing_to_sigma(spec: &EnsembleSpec) -> Result<f64> {
    spec.validate()?;
    Ok(spec.sigma())
}

/// Inverse of [`spacing_to_sigma`]: `<s> = pi sigma sqrt(beta_e / 2N)`.
pub fn sigma_to_spacing(n_levels: usize, class: SymmetryClass, sigma: f64) -> Result<f64> {
    if n_levels == 0 {
        return Err(Error::InvalidSpec("number of levels must be positive".into()));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidSpec(format!("sigma must be positive and finite, got {sigma}")));
    }
    Ok(PI * sigma * (class.dyson_index() as f64 / (2.0 * n_levels as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixEntries {
    /// Real symmetric storage (GOE).
    Real(DMatrix<f64>),
    /// Complex Hermitian storage (GUE, GSE).
    Complex(DMatrix<Complex64>),
}

/// A sampled Hermitian matrix. Immutable once drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    class: SymmetryClass,
    n_levels: usize,
    entries: MatrixEntries,
}

impl HermitianMatrix {
    /// Wraps a real symmetric matrix. Symmetry is not checked here; see
    /// [`crate::spectra::eigendecompose`].
    pub fn from_real(class: SymmetryClass, entries: DMatrix<f64>) -> Result<Self> {
        let n_levels = Self::levels_for(class, entries.nrows(), entries.ncols())?;
        Ok(HermitianMatrix { class, n_levels, entries: MatrixEntries::Real(entries) })
    }

    pub fn from_complex(class: SymmetryClass, entries: DMatrix<Complex64>) -> Result<Self> {
        let n_levels = Self::levels_for(class, entries.nrows(), entries.ncols())?;
        Ok(HermitianMatrix { class, n_levels, entries: MatrixEntries::Complex(entries) })
    }

    fn levels_for(class: SymmetryClass, rows: usize, cols: usize) -> Result<usize> {
        if rows != cols {
            return Err(Error::DimensionMismatch { expected: rows, got: cols });
        }
        let factor = class.matrix_dim_factor();
        if rows == 0 || rows % factor != 0 {
            return Err(Error::InvalidArgument(format!(
                "{class} matrix dimension must be a positive multiple of {factor}, got {rows}"
            )));
        }
        Ok(rows / factor)
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn dim(&self) -> usize {
        self.n_levels * self.class.matrix_dim_factor()
    }

    pub fn entries(&self) -> &MatrixEntries {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match &self.entries {
            MatrixEntries::Real(m) => Complex64::new(m[(i, j)], 0.0),
            MatrixEntries::Complex(m) => m[(i, j)],
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match &self.entries {
            MatrixEntries::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            MatrixEntries::Complex(m) => m.clone(),
        }
    }

    /// Largest `|H_ij - conj(H_ji)|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        match &self.entries {
            MatrixEntries::Real(m) => {
                for i in 0..n {
                    for j in 0..i {
                        worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
                    }
                }
            }
            MatrixEntries::Complex(m) => {
                for i in 0..n {
                    for j in 0..=i {
                        worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_entry(&self) -> f64 {
        match &self.entries {
            MatrixEntries::Real(m) => m.amax(),
            MatrixEntries::Complex(m) => m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm())),
        }
    }

    /// Largest deviation from the self-dual block form
    /// `[[A, B], [-conj(B), conj(A)]]` with `B` antisymmetric.
    pub fn quaternion_defect(&self) -> f64 {
        let n = self.n_levels;
        let m = self.to_complex();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let a = m[(i, j)];
                let b = m[(i, n + j)];
                worst = worst
                    .max((m[(n + i, n + j)] - a.conj()).norm())
                    .max((m[(n + i, j)] + b.conj()).norm())
                    .max((b + m[(j, n + i)]).norm());
            }
        }
        worst
    }
}

/// Random generator for one draw. Stream `k` of `master_seed` is independent
/// of every other stream, which keeps parallel and serial runs identical.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Draws one matrix; the seed fully determines the result.
pub fn sample_matrix(spec: &EnsembleSpec, seed: u64) -> Result<HermitianMatrix> {
    sample_matrix_stream(spec, seed, 0)
}

pub fn sample_matrix_stream(spec: &EnsembleSpec, master_seed: u64, stream: u64) -> Result<HermitianMatrix> {
    spec.validate()?;
    let mut rng = stream_rng(master_seed, stream);
    Ok(sample_with(spec, &mut rng))
}

fn sample_with<R: rand::Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> HermitianMatrix {
    let n = spec.n_levels;
    let sigma = spec.sigma();
    let center = spec.mean_energy;
    let off = sigma * std::f64::consts::FRAC_1_SQRT_2;
    let mut normal = move || -> f64 { StandardNormal.sample(&mut *rng) };

    match spec.class {
        SymmetryClass::Goe => {
            let mut m = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = center + sigma * normal();
                for j in (i + 1)..n {
                    let x = off * normal();
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
            HermitianMatrix { class: spec.class, n_levels: n, entries: MatrixEntries::Real(m) }
        }
        SymmetryClass::Gue => {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = Complex64::new(center + sigma * normal(), 0.0);
                for j in (i + 1)..n {
                    let z = Complex64::new(off * normal(), off * normal());
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            HermitianMatrix { class: spec.class, n_levels: n, entries: MatrixEntries::Complex(m) }
        }
        SymmetryClass::Gse => {
            // Quaternion element q0 + q1 i + q2 j + q3 k maps to
            // A = q0 + i q3, B = q2 + i q1.
            let mut a = DMatrix::<Complex64>::zeros(n, n);
            let mut b = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                a[(i, i)] = Complex64::new(center + sigma * normal(), 0.0);
                for j in (i + 1)..n {
                    let q0 = off * normal();
                    let q1 = off * normal();
                    let q2 = off * normal();
                    let q3 = off * normal();
                    let aij = Complex64::new(q0, q3);
                    let bij = Complex64::new(q2, q1);
                    a[(i, j)] = aij;
                    a[(j, i)] = aij.conj();
                    b[(i, j)] = bij;
                    b[(j, i)] = -bij;
                }
            }
            let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = a[(i, j)];
                    m[(i, n + j)] = b[(i, j)];
                    m[(n + i, j)] = -b[(i, j)].conj();
                    m[(n + i, n + j)] = a[(i, j)].conj();
                }
            }
            HermitianMatrix { class: spec.class, n_levels: n, entries: MatrixEntries::Complex(m) }
        }
    }
}

/// Shifts both spectra by the offset that puts the initial ground state at
/// zero. Returns `(shifted_initial, shifted_final, offset)`.
pub fn shift_both_spectra(initial: &[f64], final_: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if initial.is_empty() || final_.is_empty() {
        return Err(Error::InvalidArgument("cannot shift an empty spectrum".into()));
    }
    let ground = initial.iter().copied().fold(f64::INFINITY, f64::min);
    let offset = -ground;
    let shift = |xs: &[f64]| xs.iter().map(|x| x + offset).collect::<Vec<_>>();
    Ok((shift(initial), shift(final_), offset))
}
