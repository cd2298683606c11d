//! Two-point-measurement work statistics for one `(initial, final)` pair of
//! Hamiltonians connected by a sudden quench.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::spectra::{OverlapTable, SpectralData};

/// Thermal populations of the distinct initial levels, degeneracy included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsWeights {
    pub beta: f64,
    pub weights: Vec<f64>,
    /// `ln p_n`, finite wherever `weights` underflows.
    pub log_weights: Vec<f64>,
    /// `ln Z`, with every degenerate copy counted.
    pub log_partition: f64,
}

/// `ln sum_n a e^{-beta E_n}` for ascending `levels`, evaluated relative to
/// the lowest level so large `beta` stays finite.
pub fn log_partition(levels: &[f64], multiplicity: usize, beta: f64) -> Result<f64> {
    check_levels(levels, beta)?;
    let e1 = levels[0];
    let ln_a = (multiplicity as f64).ln();
    if beta.is_infinite() {
        return Ok(ln_a + ground_term(e1));
    }
    let sum: f64 = levels.iter().map(|e| (-beta * (e - e1)).exp()).sum();
    Ok(ln_a + sum.ln() - beta * e1)
}

// -beta E1 as beta -> infinity.
fn ground_term(e1: f64) -> f64 {
    if e1 == 0.0 {
        0.0
    } else if e1 > 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    }
}

fn check_levels(levels: &[f64], beta: f64) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("beta must be non-negative, got {beta}")));
    }
    if levels.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("levels must be sorted ascending".into()));
    }
    Ok(())
}

/// `beta = f64::INFINITY` puts all weight on the lowest level.
pub fn gibbs_weights(levels: &[f64], multiplicity: usize, beta: f64) -> Result<GibbsWeights> {
    check_levels(levels, beta)?;
    let log_partition = log_partition(levels, multiplicity, beta)?;
    let log_weights: Vec<f64> = if beta.is_infinite() {
        let mut w = vec![f64::NEG_INFINITY; levels.len()];
        w[0] = 0.0;
        w
    } else {
        let e1 = levels[0];
        let ln_total = levels.iter().map(|e| (-beta * (e - e1)).exp()).sum::<f64>().ln();
        levels.iter().map(|e| -beta * (e - e1) - ln_total).collect()
    };
    let weights = log_weights.iter().map(|x| x.exp()).collect();
    Ok(GibbsWeights { beta, weights, log_weights, log_partition })
}

/// Work values `w = E~_m - E_n` with joint probabilities
/// `p_n * p(m|n)`, stored `n`-major: atom `n * M + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkAtoms {
    work: Vec<f64>,
    conditional: Vec<f64>,
    log_initial: Vec<f64>,
    initial: Vec<f64>,
    per_initial: usize,
}

impl WorkAtoms {
    /// Atoms with explicit masses, each treated as its own initial state.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.iter().any(|&(w, p)| !w.is_finite() || !(p >= 0.0)) {
            return Err(Error::InvalidArgument("atoms need finite work and non-negative mass".into()));
        }
        let initial: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        Ok(WorkAtoms {
            work: pairs.iter().map(|p| p.0).collect(),
            conditional: vec![1.0; pairs.len()],
            log_initial: initial.iter().map(|p| p.ln()).collect(),
            initial,
            per_initial: 1,
        })
    }

    pub fn work(&self) -> &[f64] {
        &self.work
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.initial[k / self.per_initial] * self.conditional[k]
    }

    /// `ln` of the mass of atom `k`, accurate even where the mass underflows.
    pub fn ln_prob(&self, k: usize) -> f64 {
        self.log_initial[k / self.per_initial] + self.conditional[k].ln()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.prob(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.work.len()
    }

    pub fn is_empty(&self) -> bool {
        self.work.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.iter().map(|(_, p)| p).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.work.iter().enumerate().map(|(k, &w)| (w, self.prob(k)))
    }

    /// Merges atoms closer than `w_tol` and drops merged masses `<= mass_floor`.
    pub fn aggregate(&self, w_tol: f64, mass_floor: f64) -> Vec<(f64, f64)> {
        let mut sorted: Vec<(f64, f64)> = self.iter().collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for (w, p) in sorted {
            match out.last_mut() {
                Some(last) if w - anchor <= w_tol => last.1 += p,
                _ => {
                    out.push((w, p));
                    anchor = w;
                }
            }
        }
        out.retain(|&(_, p)| p > mass_floor);
        out
    }

    /// Mass carried by atoms outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        self.iter().filter(|&(w, _)| w < lo || w > hi).map(|(_, p)| p).sum()
    }
}

/// Joint work distribution of a sudden quench from a thermal state of the
/// initial Hamiltonian.
pub fn work_atoms(
    initial: &SpectralData,
    final_: &SpectralData,
    overlaps: &OverlapTable,
    beta: f64,
) -> Result<WorkAtoms> {
    let n = initial.n_levels();
    for got in [final_.n_levels(), overlaps.n_levels()] {
        if got != n {
            return Err(Error::DimensionMismatch { expected: n, got });
        }
    }
    let a = overlaps.multiplicity() as f64;
    let gibbs = gibbs_weights(initial.levels(), initial.multiplicity(), beta)?;
    let mut work = Vec::with_capacity(n * n);
    let mut conditional = Vec::with_capacity(n * n);
    for (col, &e_n) in initial.levels().iter().enumerate() {
        for (row, &e_m) in final_.levels().iter().enumerate() {
            work.push(e_m - e_n);
            conditional.push(overlaps.entry(row, col) / a);
        }
    }
    Ok(WorkAtoms { work, conditional, log_initial: gibbs.log_weights, initial: gibbs.weights, per_initial: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveSource {
    SingleDraw,
    Analytic,
    EnsembleMean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicCurve {
    pub u: Vec<f64>,
    pub values: Vec<Complex64>,
    pub source: CurveSource,
    pub metadata: serde_json::Value,
}

impl CharacteristicCurve {
    pub fn new(u: Vec<f64>, values: Vec<Complex64>, source: CurveSource) -> Result<Self> {
        if u.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), got: values.len() });
        }
        Ok(CharacteristicCurve { u, values, source, metadata: serde_json::Value::Null })
    }

    pub fn with_metadata(mut self, metadata: serde_json::Value) -> Self {
        self.metadata = metadata;
        self
    }

    /// Root-mean-square of `|self - other|` over the shared grid.
    pub fn rms_distance(&self, other: &CharacteristicCurve) -> Result<f64> {
        if self.u != other.u {
            return Err(Error::InvalidArgument("curves live on different u-grids".into()));
        }
        Ok(rms_distance(&self.values, &other.values))
    }
}

pub fn rms_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (sum / a.len().max(1) as f64).sqrt()
}

/// `G(u) = sum p e^{iuw}` on every grid point.
pub fn characteristic_single(atoms: &WorkAtoms, u_grid: &[f64]) -> CharacteristicCurve {
    let live: Vec<(f64, f64)> = atoms.iter().filter(|&(_, p)| p > 0.0).collect();
    let values = u_grid
        .par_iter()
        .map(|&u| live.iter().map(|&(w, p)| Complex64::from_polar(p, u * w)).sum())
        .collect();
    CharacteristicCurve { u: u_grid.to_vec(), values, source: CurveSource::SingleDraw, metadata: serde_json::Value::Null }
}

/// Density histogram of the atoms: bin mass divided by bin width. Mass
/// outside `range` is recorded in [`Histogram::outside`].
pub fn work_histogram(atoms: &WorkAtoms, n_bins: usize, range: (f64, f64)) -> Result<Histogram> {
    let mut h = Histogram::new(range.0, range.1, n_bins)?;
    for (w, p) in atoms.iter() {
        h.add(w, p);
    }
    let total = atoms.total_mass();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("atoms carry no mass".into()));
    }
    let width = h.bin_width();
    for v in &mut h.values {
        *v /= total * width;
    }
    h.outside /= total;
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JarzynskiCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub rel_err: f64,
}

/// Compares `<e^{-beta w}>` over the atoms with `Z_final / Z_initial`.
pub fn jarzynski_check(atoms: &WorkAtoms, beta: f64, log_z0: f64, log_ztau: f64) -> Result<JarzynskiCheck> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("Jarzynski check needs finite beta > 0, got {beta}")));
    }
    let exponents: Vec<f64> = (0..atoms.len()).map(|k| atoms.ln_prob(k) - beta * atoms.work[k]).collect();
    let ln_lhs = log_sum_exp(&exponents);
    let ln_rhs = log_ztau - log_z0;
    Ok(JarzynskiCheck {
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        ln_lhs,
        ln_rhs,
        rel_err: (ln_lhs - ln_rhs).exp_m1().abs(),
    })
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkMoments {
    pub mean: f64,
    pub variance: f64,
}

pub fn work_moments(atoms: &WorkAtoms) -> WorkMoments {
    let total = atoms.total_mass();
    let mean = atoms.iter().map(|(w, p)| w * p).sum::<f64>() / total;
    let variance = atoms.iter().map(|(w, p)| p * (w - mean).powi(2)).sum::<f64>() / total;
    WorkMoments { mean, variance }
}
