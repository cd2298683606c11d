//! Experiments: sample `(initial, final)` Hamiltonian pairs, compute their
//! work statistics and compare them with the large-`N` predictions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{g_ensemble, QuenchParams};
use crate::ensembles::{sample_matrix_stream, shift_both_spectra, EnsembleSpec};
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::spectra::{eigendecompose, mean_spacing_center, overlap_table};
use crate::workstats::{
    characteristic_single, jarzynski_check, log_partition, rms_distance, work_atoms, work_histogram, work_moments,
    CharacteristicCurve, CurveSource, JarzynskiCheck, WorkAtoms, WorkMoments,
};

/// Fraction of the spectrum used for the central spacing estimate.
pub const SPACING_WINDOW: f64 = 0.2;

/// Uniform grid of `count` points on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for UGrid {
    fn default() -> Self {
        UGrid { min: 0.0, max: 3.0, count: 512 }
    }
}

impl UGrid {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 || !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return Err(Error::InvalidArgument(format!("bad u-grid {self:?}")));
        }
        if self.count == 1 && self.max != self.min {
            return Err(Error::InvalidArgument("a one-point u-grid needs min == max".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.min + k as f64 * step).collect()
    }
}

/// Work histogram layout. Without an explicit range the predicted support,
/// padded by `PAD` of its width on each side, is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WHist {
    pub bins: usize,
    pub range: Option<(f64, f64)>,
}

impl WHist {
    pub const PAD: f64 = 0.1;
}

impl Default for WHist {
    fn default() -> Self {
        WHist { bins: 120, range: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchExperiment {
    pub initial: EnsembleSpec,
    #[serde(rename = "final")]
    pub final_: EnsembleSpec,
    #[serde(with = "crate::io::beta_serde")]
    pub beta: f64,
    pub n_draws: usize,
    pub master_seed: u64,
    pub u_grid: UGrid,
    pub w_hist: WHist,
    pub shift_to_ground_zero: bool,
}

impl QuenchExperiment {
    pub fn new(initial: EnsembleSpec, final_: EnsembleSpec, beta: f64) -> Result<Self> {
        let exp = QuenchExperiment {
            initial,
            final_,
            beta,
            n_draws: 1,
            master_seed: 0,
            u_grid: UGrid::default(),
            w_hist: WHist::default(),
            shift_to_ground_zero: true,
        };
        exp.validate()?;
        Ok(exp)
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.validate()?;
        self.final_.validate()?;
        if self.initial.class != self.final_.class {
            return Err(Error::InvalidSpec(format!(
                "quench must stay in one symmetry class, got {} -> {}",
                self.initial.class, self.final_.class
            )));
        }
        if self.initial.n_levels != self.final_.n_levels {
            return Err(Error::InvalidSpec(format!(
                "initial and final level counts differ: {} vs {}",
                self.initial.n_levels, self.final_.n_levels
            )));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidSpec(format!("beta must be non-negative, got {}", self.beta)));
        }
        if self.n_draws == 0 {
            return Err(Error::InvalidSpec("at least one draw is required".into()));
        }
        self.u_grid.validate()?;
        if self.w_hist.bins == 0 {
            return Err(Error::InvalidSpec("work histogram needs at least one bin".into()));
        }
        if let Some((lo, hi)) = self.w_hist.range {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidSpec(format!("empty work range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Analytic parameters for the unshifted ensembles.
    pub fn params(&self) -> Result<QuenchParams> {
        QuenchParams::from_specs(&self.initial, &self.final_, self.beta)
    }

    /// Analytic parameters matched to a draw whose spectra were moved by
    /// `offset` so that the initial ground state sits at zero.
    pub fn shifted_params(&self, offset: f64) -> Result<QuenchParams> {
        let mut p = self.params()?;
        p.e_init += offset;
        p.e_final += offset;
        Ok(p.with_ground_energy(0.0))
    }

    pub fn histogram_range(&self, params: &QuenchParams) -> (f64, f64) {
        self.w_hist.range.unwrap_or_else(|| {
            let (lo, hi) = params.work_support();
            let pad = WHist::PAD * (hi - lo);
            (lo - pad, hi + pad)
        })
    }

    /// Same experiment at another `N`, holding `N <s>` and `N <s~>` fixed.
    pub fn rescaled_to(&self, n_levels: usize) -> Result<Self> {
        let mut exp = *self;
        exp.initial = self.initial.rescaled_to(n_levels)?;
        exp.final_ = self.final_.rescaled_to(n_levels)?;
        Ok(exp)
    }

    pub fn draw_streams(draw_index: usize) -> (u64, u64) {
        let k = draw_index as u64;
        (2 * k, 2 * k + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDiagnostics {
    pub central_spacing_init: Option<f64>,
    pub central_spacing_final: Option<f64>,
    pub radius_init: f64,
    pub radius_final: f64,
    pub max_pair_gap: f64,
    pub overlap_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DrawReport {
    pub draw_index: usize,
    pub master_seed: u64,
    pub streams: (u64, u64),
    /// Common shift applied to both spectra (0 without shifting).
    pub offset: f64,
    pub params: QuenchParams,
    pub curve: CharacteristicCurve,
    pub analytic: CharacteristicCurve,
    pub rms_to_analytic: f64,
    pub histogram: Histogram,
    pub jarzynski: Option<JarzynskiCheck>,
    pub moments: WorkMoments,
    pub diagnostics: SpectralDiagnostics,
}

fn half_span(levels: &[f64]) -> f64 {
    0.5 * (levels[levels.len() - 1] - levels[0])
}

/// Work atoms of one draw with the analytic parameters that match it.
#[derive(Debug, Clone)]
pub struct DrawData {
    pub atoms: WorkAtoms,
    pub params: QuenchParams,
    pub offset: f64,
    pub diagnostics: SpectralDiagnostics,
    pub jarzynski: Option<JarzynskiCheck>,
}

pub fn draw_atoms(exp: &QuenchExperiment, draw_index: usize) -> Result<DrawData> {
    exp.validate()?;
    let (s_init, s_final) = QuenchExperiment::draw_streams(draw_index);
    let h = sample_matrix_stream(&exp.initial, exp.master_seed, s_init)?;
    let h_tilde = sample_matrix_stream(&exp.final_, exp.master_seed, s_final)?;
    let mut initial = eigendecompose(&h)?;
    let mut final_ = eigendecompose(&h_tilde)?;
    let (offset, params) = if exp.shift_to_ground_zero {
        let (a, b, offset) = shift_both_spectra(initial.levels(), final_.levels())?;
        initial = initial.with_levels(a)?;
        final_ = final_.with_levels(b)?;
        (offset, exp.shifted_params(offset)?)
    } else {
        (0.0, exp.params()?)
    };
    let overlaps = overlap_table(&initial, &final_)?;
    let atoms = work_atoms(&initial, &final_, &overlaps, exp.beta)?;

    let jarzynski = if exp.beta > 0.0 && exp.beta.is_finite() {
        let z0 = log_partition(initial.levels(), initial.multiplicity(), exp.beta)?;
        let zt = log_partition(final_.levels(), final_.multiplicity(), exp.beta)?;
        Some(jarzynski_check(&atoms, exp.beta, z0, zt)?)
    } else {
        None
    };
    let diagnostics = SpectralDiagnostics {
        central_spacing_init: mean_spacing_center(initial.levels(), SPACING_WINDOW).ok(),
        central_spacing_final: mean_spacing_center(final_.levels(), SPACING_WINDOW).ok(),
        radius_init: half_span(initial.levels()),
        radius_final: half_span(final_.levels()),
        max_pair_gap: initial.max_pair_gap().max(final_.max_pair_gap()),
        overlap_defect: overlaps.stochasticity_defect(),
    };
    Ok(DrawData { atoms, params, offset, diagnostics, jarzynski })
}

pub fn analytic_curve(params: &QuenchParams, u_grid: &[f64]) -> CharacteristicCurve {
    let values = crate::analytic::curve(u_grid, |u| g_ensemble(params, u));
    CharacteristicCurve { u: u_grid.to_vec(), values, source: CurveSource::Analytic, metadata: serde_json::Value::Null }
}

pub fn run_single_draw(exp: &QuenchExperiment, draw_index: usize) -> Result<DrawReport> {
    let DrawData { atoms, params, offset, diagnostics, jarzynski } = draw_atoms(exp, draw_index)?;
    let u = exp.u_grid.points();
    let curve = characteristic_single(&atoms, &u);
    let analytic = analytic_curve(&params, &u);
    let rms_to_analytic = rms_distance(&curve.values, &analytic.values);
    let histogram = work_histogram(&atoms, exp.w_hist.bins, exp.histogram_range(&params))?;
    Ok(DrawReport {
        draw_index,
        master_seed: exp.master_seed,
        streams: QuenchExperiment::draw_streams(draw_index),
        offset,
        params,
        curve,
        analytic,
        rms_to_analytic,
        histogram,
        jarzynski,
        moments: work_moments(&atoms),
        diagnostics,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub mean: CharacteristicCurve,
    /// Sample variance of `G(u)` across draws (sum of real and imaginary parts).
    pub variance: Vec<f64>,
    pub analytic: CharacteristicCurve,
    pub mean_histogram: Histogram,
    pub max_jarzynski_rel_err: Option<f64>,
    pub rms_per_draw: Vec<f64>,
}

impl EnsembleReport {
    pub fn stderr(&self) -> Vec<f64> {
        let n = self.rms_per_draw.len() as f64;
        self.variance.iter().map(|v| (v / n).sqrt()).collect()
    }
}

/// Runs `exp.n_draws` independent draws and averages them in draw order.
/// Histograms share the range of the unshifted prediction so they can be
/// summed bin by bin.
pub fn run_ensemble(exp: &QuenchExperiment) -> Result<EnsembleReport> {
    exp.validate()?;
    let base = exp.params()?;
    let mut fixed = *exp;
    if fixed.w_hist.range.is_none() {
        let (lo, hi) = exp.histogram_range(&base);
        // Shifted draws move the work axis only through a common offset,
        // which cancels in w; the unshifted range therefore fits every draw.
        fixed.w_hist.range = Some((lo, hi));
    }
    let reports: Vec<DrawReport> =
        (0..exp.n_draws).into_par_iter().map(|k| run_single_draw(&fixed, k)).collect::<Result<_>>()?;

    let u = exp.u_grid.points();
    let n = reports.len() as f64;
    let mut mean = vec![Complex64::new(0.0, 0.0); u.len()];
    for r in &reports {
        for (acc, g) in mean.iter_mut().zip(&r.curve.values) {
            *acc += g;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut variance = vec![0.0; u.len()];
    if reports.len() > 1 {
        for r in &reports {
            for ((acc, g), m) in variance.iter_mut().zip(&r.curve.values).zip(&mean) {
                *acc += (g - m).norm_sqr();
            }
        }
        for v in &mut variance {
            *v /= n - 1.0;
        }
    }
    let mut mean_histogram = reports[0].histogram.clone();
    for r in &reports[1..] {
        for (acc, v) in mean_histogram.values.iter_mut().zip(&r.histogram.values) {
            *acc += v;
        }
        mean_histogram.outside += r.histogram.outside;
    }
    mean_histogram.scale(1.0 / n);
    let max_jarzynski_rel_err =
        reports.iter().filter_map(|r| r.jarzynski.map(|j| j.rel_err)).reduce(f64::max);

    Ok(EnsembleReport {
        mean: CharacteristicCurve { u: u.clone(), values: mean, source: CurveSource::EnsembleMean, metadata: serde_json::Value::Null },
        variance,
        analytic: analytic_curve(&base, &u),
        mean_histogram,
        max_jarzynski_rel_err,
        rms_per_draw: reports.iter().map(|r| r.rms_to_analytic).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityEntry {
    pub n_levels: usize,
    pub s_init: f64,
    pub s_final: f64,
    pub draws: usize,
    pub rms_per_draw: Vec<f64>,
    pub mean_rms: f64,
    pub stderr_rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub entries: Vec<ErgodicityEntry>,
}

impl ErgodicityReport {
    pub fn n_list(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.n_levels).collect()
    }

    pub fn mean_rms(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.mean_rms).collect()
    }
}

/// RMS distance between single-draw and predicted `G(u)` as a function of
/// `N`. Spacings scale as `1/N`, so the prediction (and, with `beta` held,
/// `N_eff / N`) is the same for every entry.
pub fn ergodicity_study(base: &QuenchExperiment, n_list: &[usize], draws_per_n: usize) -> Result<ErgodicityReport> {
    if n_list.is_empty() || draws_per_n == 0 {
        return Err(Error::InvalidArgument("ergodicity study needs sizes and at least one draw".into()));
    }
    if n_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("N list must be ascending".into()));
    }
    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mut exp = base.rescaled_to(n)?;
        exp.n_draws = draws_per_n;
        let rms: Vec<f64> = (0..draws_per_n)
            .into_par_iter()
            .map(|k| run_single_draw(&exp, k).map(|r| r.rms_to_analytic))
            .collect::<Result<_>>()?;
        let d = rms.len() as f64;
        let mean_rms = rms.iter().sum::<f64>() / d;
        let stderr_rms = if rms.len() > 1 {
            (rms.iter().map(|x| (x - mean_rms).powi(2)).sum::<f64>() / (d - 1.0) / d).sqrt()
        } else {
            0.0
        };
        entries.push(ErgodicityEntry {
            n_levels: n,
            s_init: exp.initial.mean_spacing,
            s_final: exp.final_.mean_spacing,
            draws: draws_per_n,
            rms_per_draw: rms,
            mean_rms,
            stderr_rms,
        });
    }
    Ok(ErgodicityReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::SymmetryClass;

    fn small(class: SymmetryClass, n: usize, beta: f64) -> QuenchExperiment {
        let a = EnsembleSpec::new(n, class, 0.0, 0.2).unwrap();
        let b = EnsembleSpec::new(n, class, 0.0, 0.1).unwrap();
        let mut exp = QuenchExperiment::new(a, b, beta).unwrap();
        exp.u_grid = UGrid { min: 0.0, max: 3.0, count: 64 };
        exp
    }

    #[test]
    fn grid_points() {
        assert_eq!(UGrid { min: 0.0, max: 3.0, count: 4 }.points(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(UGrid { min: 1.5, max: 1.5, count: 1 }.points(), vec![1.5]);
        assert!(UGrid { min: 0.0, max: 1.0, count: 0 }.validate().is_err());
    }

    #[test]
    fn rejects_cross_class_quench() {
        let a = EnsembleSpec::new(10, SymmetryClass::Goe, 0.0, 0.2).unwrap();
        let b = EnsembleSpec::new(10, SymmetryClass::Gue, 0.0, 0.2).unwrap();
        assert!(QuenchExperiment::new(a, b, 1.0).is_err());
        let c = EnsembleSpec::new(11, SymmetryClass::Goe, 0.0, 0.2).unwrap();
        assert!(QuenchExperiment::new(a, c, 1.0).is_err());
        assert!(QuenchExperiment::new(a, a, -1.0).is_err());
    }

    #[test]
    fn two_level_draw() {
        let r = run_single_draw(&small(SymmetryClass::Goe, 2, 0.0), 0).unwrap();
        assert!((r.curve.values[0] - 1.0).norm() < 1e-14);
        assert!(r.jarzynski.is_none());
    }

    #[test]
    fn single_draw_invariants() {
        for class in SymmetryClass::ALL {
            let r = run_single_draw(&small(class, 20, 0.5), 3).unwrap();
            assert!((r.curve.values[0] - 1.0).norm() < 1e-12);
            assert!(r.curve.values.iter().all(|z| z.norm() <= 1.0 + 1e-12));
            assert!(r.jarzynski.unwrap().rel_err < 1e-10);
            assert_eq!(r.streams, (6, 7));
            assert!(r.diagnostics.overlap_defect < 1e-10);
            assert_eq!(r.params.ground_energy, Some(0.0));
            assert!((r.params.e_init - r.offset).abs() < 1e-12);
        }
    }

    #[test]
    fn ensemble_is_deterministic_and_one_draw_matches() {
        let mut exp = small(SymmetryClass::Gue, 12, 0.3);
        let single = run_single_draw(&exp, 0).unwrap();
        let one = run_ensemble(&exp).unwrap();
        assert_eq!(one.mean.values, single.curve.values);
        assert!(one.variance.iter().all(|&v| v == 0.0));
        exp.n_draws = 4;
        let a = run_ensemble(&exp).unwrap();
        let b = run_ensemble(&exp).unwrap();
        assert_eq!(a.mean.values, b.mean.values);
        assert_eq!(a.mean_histogram, b.mean_histogram);
        assert_eq!(a.rms_per_draw.len(), 4);
    }

    #[test]
    fn ergodicity_input_checks() {
        let exp = small(SymmetryClass::Goe, 10, 1.0);
        assert!(ergodicity_study(&exp, &[], 1).is_err());
        assert!(ergodicity_study(&exp, &[20, 10], 1).is_err());
        let r = ergodicity_study(&exp, &[10, 20], 2).unwrap();
        assert_eq!(r.n_list(), vec![10, 20]);
        assert!((r.entries[1].s_init - 0.1).abs() < 1e-15);
    }
}
