//! Dense Hermitian eigendecomposition, level-density histograms, the central
//! mean level spacing, and the degeneracy-summed overlap table between two
//! eigenbases.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ensembles::{HermitianMatrix, MatrixEntries, SymmetryClass};
use crate::error::{Error, Result};
use crate::histogram::Histogram;

/// Maximum `|H_ij - conj(H_ji)|`, relative to `max(1, max |H_ij|)`, accepted
/// by [`eigendecompose`].
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;

/// Eigenvectors stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Real(v) => v.nrows(),
            Basis::Complex(v) => v.nrows(),
        }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        match self {
            Basis::Real(v) => v.map(|x| Complex64::new(x, 0.0)),
            Basis::Complex(v) => v.clone(),
        }
    }
}

/// Sorted distinct levels with their eigenvectors. Level `k` owns columns
/// `k * multiplicity .. (k + 1) * multiplicity` of the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    class: SymmetryClass,
    levels: Vec<f64>,
    basis: Basis,
    /// Largest relative splitting inside a degenerate group (0 without degeneracy).
    pair_gap: f64,
}

impl SpectralData {
    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn multiplicity(&self) -> usize {
        self.class.degeneracy()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn max_pair_gap(&self) -> f64 {
        self.pair_gap
    }

    /// Same eigenvectors with every level moved by `offset`.
    pub fn shifted(&self, offset: f64) -> SpectralData {
        SpectralData {
            class: self.class,
            levels: self.levels.iter().map(|e| e + offset).collect(),
            basis: self.basis.clone(),
            pair_gap: self.pair_gap,
        }
    }

    /// Replaces the levels, keeping the eigenvectors.
    pub fn with_levels(&self, levels: Vec<f64>) -> Result<SpectralData> {
        if levels.len() != self.levels.len() {
            return Err(Error::DimensionMismatch { expected: self.levels.len(), got: levels.len() });
        }
        if levels.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidArgument("levels must be sorted ascending".into()));
        }
        Ok(SpectralData { class: self.class, levels, basis: self.basis.clone(), pair_gap: self.pair_gap })
    }

    /// Max deviation of the eigenvector Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = self.basis.to_complex();
        let gram = v.adjoint() * &v;
        let n = gram.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// `max |H - V diag(E) V^dagger|`.
    pub fn reconstruction_defect(&self, h: &HermitianMatrix) -> f64 {
        let v = self.basis.to_complex();
        let a = self.multiplicity();
        let mut scaled = v.clone();
        for (col, mut c) in scaled.column_iter_mut().enumerate() {
            c *= Complex64::new(self.levels[col / a], 0.0);
        }
        let rebuilt = scaled * v.adjoint();
        let original = h.to_complex();
        (rebuilt - original).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }
}

fn check_hermitian(h: &HermitianMatrix) -> Result<()> {
    let asym = h.max_asymmetry();
    if asym > HERMITICITY_TOLERANCE * h.max_abs_entry().max(1.0) {
        return Err(Error::NotHermitian { asymmetry: asym });
    }
    Ok(())
}

fn max_sweeps(dim: usize) -> usize {
    100 * dim.max(10)
}

fn numeric_failure(h: &HermitianMatrix) -> Error {
    Error::Numeric(format!(
        "eigensolver did not converge ({} matrix, dim {}, max |H_ij| {:e})",
        h.class(),
        h.dim(),
        h.max_abs_entry()
    ))
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    order
}

/// Full eigendecomposition. Kramers pairs of symplectic matrices are merged
/// into one level with multiplicity two, pairing consecutive sorted
/// eigenvalues.
pub fn eigendecompose(h: &HermitianMatrix) -> Result<SpectralData> {
    check_hermitian(h)?;
    let dim = h.dim();
    let (values, basis) = match h.entries() {
        MatrixEntries::Real(m) => {
            let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_sweeps(dim))
                .ok_or_else(|| numeric_failure(h))?;
            let order = ascending_order(eig.eigenvalues.as_slice());
            let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let vecs = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
            (values, Basis::Real(vecs))
        }
        MatrixEntries::Complex(m) => {
            let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_sweeps(dim))
                .ok_or_else(|| numeric_failure(h))?;
            let order = ascending_order(eig.eigenvalues.as_slice());
            let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let vecs = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
            (values, Basis::Complex(vecs))
        }
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(numeric_failure(h));
    }
    let (levels, pair_gap) = group_levels(&values, h.class().degeneracy());
    Ok(SpectralData { class: h.class(), levels, basis, pair_gap })
}

/// Sorted eigenvalues without eigenvectors, degenerate copies included.
pub fn eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let mut values: Vec<f64> = match h.entries() {
        MatrixEntries::Real(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
        MatrixEntries::Complex(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(numeric_failure(h));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Merges consecutive groups of `multiplicity` sorted eigenvalues.
fn group_levels(values: &[f64], multiplicity: usize) -> (Vec<f64>, f64) {
    if multiplicity == 1 {
        return (values.to_vec(), 0.0);
    }
    let scale = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut gap = 0.0_f64;
    let levels = values
        .chunks(multiplicity)
        .map(|group| {
            let spread = group[group.len() - 1] - group[0];
            gap = gap.max(spread / scale);
            group.iter().sum::<f64>() / group.len() as f64
        })
        .collect();
    (levels, gap)
}

/// Largest relative gap `|e_{2k} - e_{2k+1}| / max |e|` within consecutive
/// pairs of sorted eigenvalues.
pub fn kramers_pair_gap(sorted_eigenvalues: &[f64]) -> f64 {
    group_levels(sorted_eigenvalues, 2).1
}

/// Histogram of eigenvalues over `[min, max]`. Each value carries weight
/// `1 / multiplicity`, so the counts sum to the number of distinct levels.
pub fn empirical_level_density(levels: &[f64], multiplicity: usize, n_bins: usize) -> Result<Histogram> {
    if n_bins < 1 {
        return Err(Error::InvalidArgument("n_bins must be at least 1".into()));
    }
    if levels.len() < 2 {
        return Err(Error::InvalidArgument("level density needs at least two levels".into()));
    }
    if multiplicity == 0 {
        return Err(Error::InvalidArgument("multiplicity must be positive".into()));
    }
    let lo = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut hist = Histogram::new(lo, hi, n_bins)?;
    let w = 1.0 / multiplicity as f64;
    for &x in levels {
        hist.add(x, w);
    }
    Ok(hist)
}

/// Freedman–Diaconis bin count, clamped to `[20, 200]`.
pub fn default_bin_count(levels: &[f64]) -> usize {
    let n = levels.len();
    if n < 4 {
        return 20;
    }
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = sorted[(3 * n) / 4] - sorted[n / 4];
    let span = sorted[n - 1] - sorted[0];
    if !(iqr > 0.0) || !(span > 0.0) {
        return 20;
    }
    let width = 2.0 * iqr / (n as f64).cbrt();
    ((span / width).ceil() as usize).clamp(20, 200)
}

/// Mean consecutive spacing over the central `window_fraction` of the levels.
pub fn mean_spacing_center(levels: &[f64], window_fraction: f64) -> Result<f64> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window fraction must be in (0, 1], got {window_fraction}"
        )));
    }
    let n = levels.len();
    let count = ((window_fraction * n as f64).round() as usize).min(n);
    if count < 2 {
        return Err(Error::InvalidArgument(format!(
            "central window holds {count} levels; at least two are needed"
        )));
    }
    let start = (n - count) / 2;
    let window = &levels[start..start + count];
    Ok((window[count - 1] - window[0]) / (count - 1) as f64)
}

/// Sup-norm distance between the empirical CDF of `values` and `cdf`.
pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Overlaps between a final basis (rows, index `m`) and an initial basis
/// (columns, index `n`), summed over both degeneracy labels.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    multiplicity: usize,
    entries: DMatrix<f64>,
}

impl OverlapTable {
    pub fn n_levels(&self) -> usize {
        self.entries.nrows()
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// `sum_{alpha, gamma} |<final m, alpha | initial n, gamma>|^2`.
    pub fn entry(&self, m: usize, n: usize) -> f64 {
        self.entries[(m, n)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn mean_entry(&self) -> f64 {
        self.entries.mean()
    }

    /// Largest deviation of any row or column sum from the multiplicity.
    pub fn stochasticity_defect(&self) -> f64 {
        let a = self.multiplicity as f64;
        let rows = self.entries.row_iter().map(|r| (r.sum() - a).abs());
        let cols = self.entries.column_iter().map(|c| (c.sum() - a).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }
}

pub fn overlap_table(initial: &SpectralData, final_: &SpectralData) -> Result<OverlapTable> {
    if initial.dim() != final_.dim() {
        return Err(Error::DimensionMismatch { expected: initial.dim(), got: final_.dim() });
    }
    if initial.multiplicity() != final_.multiplicity() {
        return Err(Error::InvalidArgument(format!(
            "cannot overlap {} and {} eigenbases",
            initial.class(),
            final_.class()
        )));
    }
    let a = initial.multiplicity();
    let n = initial.n_levels();
    let squared: DMatrix<f64> = match (initial.basis(), final_.basis()) {
        (Basis::Real(v), Basis::Real(w)) => (w.transpose() * v).map(|x| x * x),
        (vi, wf) => (wf.to_complex().adjoint() * vi.to_complex()).map(|z| z.norm_sqr()),
    };
    let entries = if a == 1 {
        squared
    } else {
        DMatrix::from_fn(n, n, |m, k| {
            let mut acc = 0.0;
            for alpha in 0..a {
                for gamma in 0..a {
                    acc += squared[(m * a + alpha, k * a + gamma)];
                }
            }
            acc
        })
    };
    Ok(OverlapTable { multiplicity: a, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_matrix, sample_matrix_stream, EnsembleSpec};

    fn random_orthonormal(n: usize, seed: u64) -> DMatrix<Complex64> {
        let spec = EnsembleSpec::new(n, SymmetryClass::Gue, 0.0, 1.0).unwrap();
        let g = sample_matrix(&spec, seed).unwrap().to_complex();
        // Perturb so the matrix is not Hermitian; Q of its QR is a random unitary.
        let g = &g + DMatrix::from_fn(n, n, |i, j| Complex64::new(0.0, (i * n + j) as f64 * 1e-3));
        g.qr().q()
    }

    #[test]
    fn diagonal_matrix() {
        let h = HermitianMatrix::from_real(SymmetryClass::Goe, DMatrix::from_diagonal(&nalgebra::dvector![3.0, 1.0, 2.0]))
            .unwrap();
        let sd = eigendecompose(&h).unwrap();
        assert_eq!(sd.levels(), &[1.0, 2.0, 3.0]);
        let Basis::Real(v) = sd.basis() else { panic!("expected real basis") };
        let expected = [1usize, 2, 0];
        for (col, &row) in expected.iter().enumerate() {
            assert!((v[(row, col)].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn constructed_spectrum_is_recovered() {
        let n = 40;
        let u = random_orthonormal(n, 5);
        let energies: Vec<f64> = (0..n).map(|k| -3.0 + 0.17 * k as f64 + 0.01 * (k as f64).sin()).collect();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            energies.iter().map(|&e| Complex64::new(e, 0.0)),
        ));
        let mut h = &u * d * u.adjoint();
        // Symmetrize away rounding so the Hermiticity check is exact.
        h = (&h + h.adjoint()).map(|z| z * 0.5);
        let hm = HermitianMatrix::from_complex(SymmetryClass::Gue, h).unwrap();
        let sd = eigendecompose(&hm).unwrap();
        for (got, want) in sd.levels().iter().zip(&energies) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        // Each recovered eigenvector spans the same line as the constructing one.
        let v = sd.basis().to_complex();
        for k in 0..n {
            let overlap = (u.column(k).adjoint() * v.column(k))[(0, 0)].norm();
            assert!((overlap - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn invariants_for_each_class() {
        for class in SymmetryClass::ALL {
            let spec = EnsembleSpec::new(30, class, 1.5, 0.2).unwrap();
            let h = sample_matrix(&spec, 11).unwrap();
            let sd = eigendecompose(&h).unwrap();
            assert_eq!(sd.n_levels(), 30);
            assert!(sd.orthonormality_defect() < 1e-10);
            let radius = sd.levels().iter().fold(0.0_f64, |a, e| a.max(e.abs()));
            assert!(sd.reconstruction_defect(&h) <= 1e-9 * radius);
            assert!(sd.levels().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn gse_levels_are_kramers_pairs() {
        let spec = EnsembleSpec::new(20, SymmetryClass::Gse, 0.0, 0.3).unwrap();
        let h = sample_matrix(&spec, 2).unwrap();
        let sd = eigendecompose(&h).unwrap();
        assert_eq!(sd.n_levels(), 20);
        assert_eq!(sd.multiplicity(), 2);
        assert!(sd.max_pair_gap() < 1e-8);
        assert!(kramers_pair_gap(&eigenvalues(&h).unwrap()) < 1e-8);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = DMatrix::<f64>::identity(3, 3);
        m[(0, 1)] = 1.0;
        let h = HermitianMatrix::from_real(SymmetryClass::Goe, m).unwrap();
        assert!(matches!(eigendecompose(&h), Err(Error::NotHermitian { .. })));
        assert!(eigenvalues(&h).is_err());
    }

    #[test]
    fn level_density_examples() {
        let h = empirical_level_density(&[0.0, 1.0], 1, 1).unwrap();
        assert_eq!(h.values, vec![2.0]);

        let uniform: Vec<f64> = (0..1000).map(|k| k as f64 * 0.01).collect();
        let h = empirical_level_density(&uniform, 1, 10).unwrap();
        assert!((h.total() - 1000.0).abs() < 1e-12);
        for v in &h.values {
            assert!((v - 100.0).abs() <= 1.0);
        }

        let doubled: Vec<f64> = uniform.iter().flat_map(|&x| [x, x]).collect();
        let h = empirical_level_density(&doubled, 2, 10).unwrap();
        assert!((h.total() - 1000.0).abs() < 1e-9);

        assert!(empirical_level_density(&[0.0, 1.0], 1, 0).is_err());
        assert!(empirical_level_density(&[0.0], 1, 4).is_err());
    }

    #[test]
    fn bin_count_is_clamped() {
        let levels: Vec<f64> = (0..100_000).map(|k| (k as f64).sqrt()).collect();
        let b = default_bin_count(&levels);
        assert!((20..=200).contains(&b));
        assert_eq!(default_bin_count(&[1.0, 2.0]), 20);
    }

    #[test]
    fn spacing_examples() {
        let ap: Vec<f64> = (0..50).map(|k| 2.0 + 0.25 * k as f64).collect();
        assert!((mean_spacing_center(&ap, 0.1).unwrap() - 0.25).abs() < 1e-14);
        assert!((mean_spacing_center(&ap, 1.0).unwrap() - 0.25).abs() < 1e-14);
        // Spacings 1 and 9.
        assert_eq!(mean_spacing_center(&[0.0, 1.0, 10.0], 1.0).unwrap(), 5.0);
        assert!(mean_spacing_center(&ap, 0.01).is_err());
        assert!(mean_spacing_center(&ap, 0.0).is_err());
        assert!(mean_spacing_center(&ap, 1.5).is_err());
    }

    #[test]
    fn overlap_same_basis_is_identity() {
        for class in [SymmetryClass::Goe, SymmetryClass::Gue] {
            let spec = EnsembleSpec::new(25, class, 0.0, 0.2).unwrap();
            let sd = eigendecompose(&sample_matrix(&spec, 4).unwrap()).unwrap();
            let t = overlap_table(&sd, &sd).unwrap();
            for m in 0..25 {
                for n in 0..25 {
                    let target = if m == n { 1.0 } else { 0.0 };
                    assert!((t.entry(m, n) - target).abs() < 1e-10);
                }
            }
        }
        let spec = EnsembleSpec::new(10, SymmetryClass::Gse, 0.0, 0.2).unwrap();
        let sd = eigendecompose(&sample_matrix(&spec, 4).unwrap()).unwrap();
        let t = overlap_table(&sd, &sd).unwrap();
        for m in 0..10 {
            assert!((t.entry(m, m) - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn overlap_permuted_basis() {
        let perm = [2usize, 0, 3, 1];
        let h1 = HermitianMatrix::from_real(
            SymmetryClass::Goe,
            DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0, 3.0, 4.0]),
        )
        .unwrap();
        // Same eigenvectors attached to permuted energies.
        let mut d = [0.0; 4];
        for (i, &p) in perm.iter().enumerate() {
            d[p] = (i + 1) as f64;
        }
        let h2 = HermitianMatrix::from_real(SymmetryClass::Goe, DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d)))
            .unwrap();
        let t = overlap_table(&eigendecompose(&h1).unwrap(), &eigendecompose(&h2).unwrap()).unwrap();
        for m in 0..4 {
            for n in 0..4 {
                let target = if perm[m] == n { 1.0 } else { 0.0 };
                assert!((t.entry(m, n) - target).abs() < 1e-14, "({m},{n})");
            }
        }
    }

    #[test]
    fn overlap_sums_and_bounds() {
        for class in SymmetryClass::ALL {
            let spec = EnsembleSpec::new(40, class, 0.0, 0.2).unwrap();
            let a = eigendecompose(&sample_matrix_stream(&spec, 9, 0).unwrap()).unwrap();
            let b = eigendecompose(&sample_matrix_stream(&spec, 9, 1).unwrap()).unwrap();
            let t = overlap_table(&a, &b).unwrap();
            assert!(t.stochasticity_defect() < 1e-9, "{class}");
            let bound = (class.degeneracy() * class.degeneracy()) as f64;
            assert!(t.matrix().iter().all(|&x| (0.0..=bound).contains(&x)));
        }
    }

    #[test]
    fn overlap_dimension_mismatch() {
        let a = eigendecompose(&sample_matrix(&EnsembleSpec::new(5, SymmetryClass::Goe, 0.0, 1.0).unwrap(), 1).unwrap())
            .unwrap();
        let b = eigendecompose(&sample_matrix(&EnsembleSpec::new(6, SymmetryClass::Goe, 0.0, 1.0).unwrap(), 1).unwrap())
            .unwrap();
        assert!(matches!(overlap_table(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ks_distance_of_exact_quantiles_is_small() {
        let n = 1000;
        let values: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&values, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }
}
