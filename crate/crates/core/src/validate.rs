//! Self-checks run by `rmtwork validate`: each check reports the measured
//! error next to its tolerance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::oracles;
use crate::analytic::special::{bessel_i1, bessel_j1, hyp0f1_2};
use crate::analytic::{
    avg_boltzmann, avg_joint, avg_phase, g_ensemble, PhaseSign, QuenchParams, Spectrum,
};
use crate::ensembles::{sample_matrix_stream, EnsembleSpec, SymmetryClass};
use crate::error::Result;
use crate::spectra::{eigendecompose, eigenvalues, kramers_pair_gap, ks_distance, overlap_table};
use crate::workstats::{jarzynski_check, log_partition, work_atoms};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, passed: measured <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    pub seed: u64,
    /// Semicircle radius the sampled spectrum is compared against.
    pub radius: fn(&EnsembleSpec) -> f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { seed: 0, radius: EnsembleSpec::radius }
    }
}

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm()
}

/// Largest relative error of `x 0F1(2; +-x^2)` against `I1(2x)` and `J1(2x)`
/// on `count` log-spaced points of `[lo, hi]`.
pub fn special_identity_errors(lo: f64, hi: f64, count: usize) -> Result<(f64, f64)> {
    let (mut e_i, mut e_j) = (0.0f64, 0.0f64);
    for k in 0..count {
        let x = lo * (hi / lo).powf(k as f64 / (count - 1) as f64);
        let plus = hyp0f1_2(Complex64::new(x * x, 0.0))? * x;
        let minus = hyp0f1_2(Complex64::new(-x * x, 0.0))? * x;
        e_i = e_i.max(rel_err(plus, bessel_i1(2.0 * x).into()));
        e_j = e_j.max(rel_err(minus, bessel_j1(2.0 * x).into()));
    }
    Ok((e_i, e_j))
}

/// Largest relative error of the three semicircle averages against direct
/// quadrature over the `(beta, u)` grid.
pub fn oracle_errors(params: &QuenchParams, betas: &[f64], us: &[f64]) -> Result<f64> {
    let (a, at) = (params.radius_init(), params.radius_final());
    let mut worst = 0.0f64;
    for &beta in betas {
        let p = params.with_beta(beta);
        let z = oracles::boltzmann_average(a, p.e_init, beta)?;
        worst = worst.max((avg_boltzmann(&p) - z).abs() / z);
        for &u in us {
            for (sign, s) in [(PhaseSign::Plus, 1.0), (PhaseSign::Minus, -1.0)] {
                let want = oracles::phase_average(a, p.e_init, u, s)?;
                worst = worst.max(rel_err(avg_phase(&p, u, sign, Spectrum::Initial), want));
                let want = oracles::phase_average(at, p.e_final, u, s)?;
                worst = worst.max(rel_err(avg_phase(&p, u, sign, Spectrum::Final), want));
            }
            let want = oracles::joint_average(a, p.e_init, beta, u)?;
            worst = worst.max(rel_err(avg_joint(&p, u)?, want));
        }
    }
    Ok(worst)
}

/// Kolmogorov distance between one sampled spectrum and the semicircle of
/// the given radius.
pub fn semicircle_distance(spec: &EnsembleSpec, seed: u64, radius: f64) -> Result<f64> {
    let levels = eigenvalues(&sample_matrix_stream(spec, seed, 0)?)?;
    let center = spec.mean_energy;
    Ok(ks_distance(&levels, |x| crate::analytic::semicircle_cdf(radius, x - center)))
}

pub fn jarzynski_error(class: SymmetryClass, n: usize, beta: f64, seed: u64, draw: u64) -> Result<f64> {
    let spec = EnsembleSpec::new(n, class, 0.0, 0.2)?;
    let a = eigendecompose(&sample_matrix_stream(&spec, seed, 2 * draw)?)?;
    let b = eigendecompose(&sample_matrix_stream(&spec, seed, 2 * draw + 1)?)?;
    let atoms = work_atoms(&a, &b, &overlap_table(&a, &b)?, beta)?;
    let z0 = log_partition(a.levels(), a.multiplicity(), beta)?;
    let zt = log_partition(b.levels(), b.multiplicity(), beta)?;
    Ok(jarzynski_check(&atoms, beta, z0, zt)?.rel_err)
}

pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut checks = Vec::new();

    let (e_i, e_j) = special_identity_errors(1e-3, 30.0, 400)?;
    checks.push(Check::new("special/0F1(2;x^2) x = I1(2x)", e_i, 1e-10));
    checks.push(Check::new("special/0F1(2;-x^2) x = J1(2x)", e_j, 1e-10));

    let params = QuenchParams::new(300, 0.1283, 0.1283 / 2.0, 24.0, 24.0, 0.0)?;
    let worst = oracle_errors(&params, &[0.0, 0.01, 0.1, 1.0], &[0.0, 0.1, 1.0, 3.0, 10.0])?;
    checks.push(Check::new("oracle/semicircle averages", worst, 1e-8));

    let mut norm = 0.0f64;
    for beta in [0.0, 1e-6, 0.01, 0.1, 1.0, 10.0, f64::INFINITY] {
        norm = norm.max((g_ensemble(&params.with_beta(beta), 0.0) - 1.0).norm());
    }
    checks.push(Check::new("normalization/G(0)", norm, 1e-12));

    for class in SymmetryClass::ALL {
        for beta in [0.01, 0.1, 1.0] {
            for draw in 0..2 {
                let err = jarzynski_error(class, 40, beta, opts.seed, draw)?;
                checks.push(Check::new(format!("jarzynski/{class}/beta={beta}/draw={draw}"), err, 1e-10));
            }
        }
    }

    let spec = EnsembleSpec::new(400, SymmetryClass::Goe, 0.0, 0.1)?;
    let ks = semicircle_distance(&spec, opts.seed, (opts.radius)(&spec))?;
    checks.push(Check::new("semicircle/goe N=400 Kolmogorov distance", ks, 0.03));

    let spec = EnsembleSpec::new(30, SymmetryClass::Gse, 0.0, 0.2)?;
    for draw in 0..3 {
        let values = eigenvalues(&sample_matrix_stream(&spec, opts.seed, draw)?)?;
        checks.push(Check::new(format!("kramers/gse N=30/draw={draw}"), kramers_pair_gap(&values), 1e-8));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { passed, checks })
}
