//! Large-`N` predictions for the ensemble-averaged work characteristic
//! function of a sudden quench between two Gaussian ensembles, and the work
//! densities that follow from it.
//!
//! All averages replace the level density by the semicircle law of radius
//! `a = 2 N <s> / pi` centered at the mean energy.

pub mod oracles;
pub mod quadrature;
pub mod special;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::EnsembleSpec;
use crate::error::{Error, Result};
use quadrature::{integrate_real, QuadOptions};
use special::{bessel_i1_scaled, hyp0f1_2, hyp0f1_2_from_root, hyp0f1_2_scaled, i1_over_x, j1_over_x, ln_bessel_i1};

/// Parameters of a quench `{<s>, <E>} -> {<s~>, <E~>}` at inverse
/// temperature `beta` (`f64::INFINITY` is accepted).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchParams {
    pub n_levels: usize,
    pub s_init: f64,
    pub s_final: f64,
    pub e_init: f64,
    pub e_final: f64,
    #[serde(with = "crate::io::beta_serde")]
    pub beta: f64,
    /// Initial ground-state energy; defaults to `<E> - a`.
    pub ground_energy: Option<f64>,
}

impl QuenchParams {
    pub fn new(n_levels: usize, s_init: f64, s_final: f64, e_init: f64, e_final: f64, beta: f64) -> Result<Self> {
        let p = QuenchParams { n_levels, s_init, s_final, e_init, e_final, beta, ground_energy: None };
        p.validate()?;
        Ok(p)
    }

    pub fn from_specs(initial: &EnsembleSpec, final_: &EnsembleSpec, beta: f64) -> Result<Self> {
        if initial.n_levels != final_.n_levels {
            return Err(Error::DimensionMismatch { expected: initial.n_levels, got: final_.n_levels });
        }
        Self::new(
            initial.n_levels,
            initial.mean_spacing,
            final_.mean_spacing,
            initial.mean_energy,
            final_.mean_energy,
            beta,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_levels == 0 {
            return Err(Error::InvalidArgument("number of levels must be positive".into()));
        }
        for (name, s) in [("initial", self.s_init), ("final", self.s_final)] {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} mean spacing must be positive, got {s}")));
            }
        }
        if !self.e_init.is_finite() || !self.e_final.is_finite() {
            return Err(Error::InvalidArgument("mean energies must be finite".into()));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be non-negative, got {}", self.beta)));
        }
        if let Some(e1) = self.ground_energy {
            if !e1.is_finite() {
                return Err(Error::InvalidArgument("ground energy must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_ground_energy(mut self, e1: f64) -> Self {
        self.ground_energy = Some(e1);
        self
    }

    pub fn radius_init(&self) -> f64 {
        2.0 * self.n_levels as f64 * self.s_init / PI
    }

    pub fn radius_final(&self) -> f64 {
        2.0 * self.n_levels as f64 * self.s_final / PI
    }

    pub fn ground(&self) -> f64 {
        self.ground_energy.unwrap_or(self.e_init - self.radius_init())
    }

    /// Interval outside which the predicted work density vanishes.
    pub fn work_support(&self) -> (f64, f64) {
        if self.beta.is_infinite() {
            let center = self.e_final - self.ground();
            (center - self.radius_final(), center + self.radius_final())
        } else {
            let center = self.e_final - self.e_init;
            let half = self.radius_init() + self.radius_final();
            (center - half, center + half)
        }
    }
}

/// Unit-normalized semicircle `(2 / (pi a)) sqrt(1 - (x/a)^2)`.
pub fn semicircle_density(radius: f64, x: f64) -> f64 {
    let t = x / radius;
    if t.abs() > 1.0 {
        0.0
    } else {
        2.0 / (PI * radius) * (1.0 - t * t).sqrt()
    }
}

/// Cumulative distribution of [`semicircle_density`].
pub fn semicircle_cdf(radius: f64, x: f64) -> f64 {
    let t = (x / radius).clamp(-1.0, 1.0);
    0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSign {
    Plus,
    Minus,
}

impl PhaseSign {
    fn value(self) -> f64 {
        match self {
            PhaseSign::Plus => 1.0,
            PhaseSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spectrum {
    Initial,
    Final,
}

/// `<e^{+-iuE}> = 2 e^{+-iu<E>} J1(a u) / (a u)` for the chosen spectrum.
pub fn avg_phase(params: &QuenchParams, u: f64, sign: PhaseSign, which: Spectrum) -> Complex64 {
    let (center, radius) = match which {
        Spectrum::Initial => (params.e_init, params.radius_init()),
        Spectrum::Final => (params.e_final, params.radius_final()),
    };
    Complex64::from_polar(2.0 * j1_over_x(radius * u), sign.value() * u * center)
}

/// `ln <e^{-beta E}>` over the initial semicircle.
pub fn ln_avg_boltzmann(params: &QuenchParams) -> f64 {
    let x = params.radius_init() * params.beta;
    let ln_ratio = if x < 1.0 { (2.0 * i1_over_x(x)).ln() } else { std::f64::consts::LN_2 + ln_bessel_i1(x) - x.ln() };
    -params.beta * params.e_init + ln_ratio
}

/// `<e^{-beta E}> = 2 e^{-beta <E>} I1(a beta) / (a beta)`.
pub fn avg_boltzmann(params: &QuenchParams) -> f64 {
    ln_avg_boltzmann(params).exp()
}

/// `<e^{-beta E} e^{-iuE}> = e^{-beta <E>} e^{-iu<E>} 0F1(2; -(a/2)^2 (u - i beta)^2)`.
pub fn avg_joint(params: &QuenchParams, u: f64) -> Result<Complex64> {
    let z = joint_argument(params, u);
    hyp0f1_2(z)?;
    let (mantissa, exponent) = hyp0f1_2_scaled(z);
    let phase = Complex64::new(-params.beta * params.e_init, -u * params.e_init);
    Ok(mantissa * (exponent + phase).exp())
}

fn joint_argument(params: &QuenchParams, u: f64) -> Complex64 {
    let half = 0.5 * params.radius_init();
    let w = Complex64::new(u, -params.beta);
    -(half * half) * w * w
}

/// Ensemble-averaged work characteristic function for any `beta >= 0`.
pub fn g_ensemble(params: &QuenchParams, u: f64) -> Complex64 {
    if params.beta == 0.0 {
        return g_beta0(params, u);
    }
    if params.beta.is_infinite() {
        return g_betainf(params, u);
    }
    let x = params.radius_init() * params.beta;
    // x / I1(x) times e^x, kept finite for every x.
    let scaled_ratio = if x < 1.0 { x.exp() / i1_over_x(x) } else { x / bessel_i1_scaled(x) };
    // The root of the 0F1 argument is a (beta + iu); its real part cancels
    // against the scaling of I1.
    let a = params.radius_init();
    let (mantissa, _) = hyp0f1_2_from_root(Complex64::new(x, a * u));
    let phase = Complex64::new(0.0, u * (a + params.e_final - params.e_init));
    mantissa * phase.exp() * scaled_ratio * j1_over_x(params.radius_final() * u)
}

/// Infinite-temperature limit: `e^{iu(<E~> - <E>)} [2 J1(au)/(au)] [2 J1(a~u)/(a~u)]`.
pub fn g_beta0(params: &QuenchParams, u: f64) -> Complex64 {
    let magnitude = 4.0 * j1_over_x(params.radius_init() * u) * j1_over_x(params.radius_final() * u);
    Complex64::from_polar(1.0, u * (params.e_final - params.e_init)) * magnitude
}

/// Zero-temperature limit: `2 e^{iu(<E~> - E1)} J1(a~u)/(a~u)`.
pub fn g_betainf(params: &QuenchParams, u: f64) -> Complex64 {
    let magnitude = 2.0 * j1_over_x(params.radius_final() * u);
    Complex64::from_polar(1.0, u * (params.e_final - params.ground())) * magnitude
}

/// Evaluates `g` on every point of `u_grid` in parallel.
pub fn curve(u_grid: &[f64], g: impl Fn(f64) -> Complex64 + Sync) -> Vec<Complex64> {
    u_grid.par_iter().map(|&u| g(u)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeakRegime {
    Beta0,
    BetaInf,
}

/// Peak position and width of the predicted work density.
pub fn peak_width(params: &QuenchParams, regime: PeakRegime) -> (f64, f64) {
    let n = params.n_levels as f64;
    match regime {
        PeakRegime::Beta0 => {
            let shift = params.e_final - params.e_init;
            (shift, 2.0 * n / PI * params.s_init.max(params.s_final) + shift)
        }
        PeakRegime::BetaInf => (params.e_final - params.ground(), params.radius_final()),
    }
}

/// Effective number of thermally populated levels, `1 / (beta <s>)`.
pub fn n_eff(beta: f64, s_init: f64) -> Result<f64> {
    if !(beta >= 0.0) || !(s_init > 0.0) {
        return Err(Error::InvalidArgument(format!("n_eff needs beta >= 0 and <s> > 0, got {beta}, {s_init}")));
    }
    if beta == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (beta * s_init))
}

/// Convolution of two unit semicircles of radii `a1`, `a2` evaluated at `d`.
pub fn semicircle_convolution(a1: f64, a2: f64, d: f64) -> Result<f64> {
    if d.abs() >= a1 + a2 {
        return Ok(0.0);
    }
    // x = a1 sin(theta) removes the square-root edges of the first factor;
    // the kinks of the second sit at the breakpoints.
    let mut cuts = Vec::new();
    for edge in [d - a2, d + a2] {
        let t = edge / a1;
        if t.abs() < 1.0 {
            cuts.push(t.asin());
        }
    }
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        2.0 / PI * c * c * semicircle_density(a2, d - a1 * s)
    };
    let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 2000 };
    integrate_real(integrand, -PI / 2.0, PI / 2.0, &cuts, opts)
}

/// Trapezoidal inverse Fourier transform of a Hermitian characteristic
/// function sampled on `u_k = k du`, `k = 0..=K`.
#[derive(Debug, Clone)]
pub struct FourierInverter {
    du: f64,
    values: Vec<Complex64>,
}

impl FourierInverter {
    pub fn new(g: impl Fn(f64) -> Complex64 + Sync, u_max: f64, du: f64) -> Result<Self> {
        if !(du > 0.0) || !(u_max > du) {
            return Err(Error::InvalidArgument(format!("bad transform grid: u_max {u_max}, du {du}")));
        }
        let count = (u_max / du).ceil() as usize;
        let values = (0..=count).into_par_iter().map(|k| g(k as f64 * du)).collect();
        Ok(FourierInverter { du, values })
    }

    pub fn u_max(&self) -> f64 {
        self.du * (self.values.len() - 1) as f64
    }

    /// Period of the aliased density, `2 pi / du`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.du
    }

    /// `(1/pi) int_0^U Re[G(u) e^{-iuw}] du`.
    pub fn density(&self, w: f64) -> f64 {
        let last = self.values.len() - 1;
        let mut acc = 0.5 * self.values[0].re;
        for (k, g) in self.values.iter().enumerate().skip(1) {
            let (s, c) = (k as f64 * self.du * w).sin_cos();
            let term = g.re * c + g.im * s;
            acc += if k == last { 0.5 * term } else { term };
        }
        acc * self.du / PI
    }
}

/// Smallest `u` at which the envelope of `2 J1(r u) / (r u)` falls below `tol`.
pub fn envelope_cutoff(radius: f64, tol: f64) -> f64 {
    let x = (2.0 * (2.0 / PI).sqrt() / tol).powf(2.0 / 3.0);
    x / radius
}

#[derive(Debug, Clone, Copy)]
pub struct TransformOptions {
    /// Target envelope of the final-spectrum Bessel factor at the cutoff.
    pub envelope_tol: f64,
    /// Explicit cutoff; rejected when the envelope there exceeds `envelope_tol`.
    pub u_max: Option<f64>,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions { envelope_tol: 1e-6, u_max: None }
    }
}

#[derive(Debug, Clone)]
enum DensityKind {
    Convolution,
    Semicircle,
    Transform(FourierInverter),
}

/// Predicted ensemble-averaged work density.
#[derive(Debug, Clone)]
pub struct PredictedDensity {
    params: QuenchParams,
    kind: DensityKind,
}

impl PredictedDensity {
    pub fn new(params: &QuenchParams) -> Result<Self> {
        Self::with_options(params, TransformOptions::default())
    }

    pub fn with_options(params: &QuenchParams, opts: TransformOptions) -> Result<Self> {
        params.validate()?;
        let kind = if params.beta == 0.0 {
            DensityKind::Convolution
        } else if params.beta.is_infinite() {
            DensityKind::Semicircle
        } else {
            let needed = envelope_cutoff(params.radius_final(), opts.envelope_tol);
            let u_max = match opts.u_max {
                Some(u) if u < needed => {
                    return Err(Error::Numeric(format!(
                        "u-grid cutoff {u} is too small: the Bessel envelope only drops below {:e} at u = {needed}",
                        opts.envelope_tol
                    )))
                }
                Some(u) => u,
                None => needed,
            };
            let (lo, hi) = params.work_support();
            // Aliased copies land at least three support widths away.
            let du = 2.0 * PI / (4.0 * (hi - lo));
            let p = *params;
            DensityKind::Transform(FourierInverter::new(move |u| g_ensemble(&p, u), u_max, du)?)
        };
        Ok(PredictedDensity { params: *params, kind })
    }

    pub fn support(&self) -> (f64, f64) {
        self.params.work_support()
    }

    pub fn eval(&self, w: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        match &self.kind {
            DensityKind::Convolution => semicircle_convolution(
                self.params.radius_init(),
                self.params.radius_final(),
                w - (self.params.e_final - self.params.e_init),
            ),
            DensityKind::Semicircle => {
                let center = self.params.e_final - self.params.ground();
                Ok(semicircle_density(self.params.radius_final(), w - center))
            }
            DensityKind::Transform(inv) => {
                let width = hi - lo;
                if w < lo - width || w > hi + width {
                    Ok(0.0)
                } else {
                    Ok(inv.density(w))
                }
            }
        }
    }
}

/// Predicted work density on `w_grid`.
pub fn p_w_predicted(params: &QuenchParams, w_grid: &[f64]) -> Result<Vec<f64>> {
    let density = PredictedDensity::new(params)?;
    w_grid.par_iter().map(|&w| density.eval(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> QuenchParams {
        QuenchParams::new(300, 0.1283, 0.1283 / 2.0, 24.0, 24.0, 0.01).unwrap().with_ground_energy(0.0)
    }

    #[test]
    fn semicircle_basics() {
        let a = 24.5;
        assert!((semicircle_density(a, 0.0) - 2.0 / (PI * a)).abs() < 1e-16);
        assert_eq!(semicircle_density(a, 24.6), 0.0);
        assert_eq!(semicircle_density(a, -30.0), 0.0);
        let mass = integrate_real(|x| semicircle_density(a, x), -a, a, &[], QuadOptions::default()).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
        assert_eq!(semicircle_cdf(a, -a), 0.0);
        assert_eq!(semicircle_cdf(a, a), 1.0);
        assert!((semicircle_cdf(a, 0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn phase_average_at_origin() {
        let p = fig1();
        for which in [Spectrum::Initial, Spectrum::Final] {
            for sign in [PhaseSign::Plus, PhaseSign::Minus] {
                assert!((avg_phase(&p, 0.0, sign, which) - 1.0).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn boltzmann_average_limits() {
        let p = fig1().with_beta(0.0);
        assert_eq!(avg_boltzmann(&p), 1.0);
        // Large-argument regime: ln <e^{-beta E}> ~ -beta E1 - 1.5 ln(beta a) + ln sqrt(2/pi).
        let p = QuenchParams::new(300, 0.1283, 0.0641, 0.0, 0.0, 0.0).unwrap();
        let beta = 50.0 / p.radius_init();
        let p = p.with_beta(beta);
        let asymptotic = -beta * p.ground() - 1.5 * (beta * p.radius_init()).ln() + (2.0 / PI).sqrt().ln();
        assert!((ln_avg_boltzmann(&p) - asymptotic).abs() < 0.01);
        // Representable far beyond the overflow point of I1.
        let p = p.with_beta(1000.0 / p.radius_init() * 10.0).with_ground_energy(0.0);
        assert!(ln_avg_boltzmann(&p).is_finite());
    }

    #[test]
    fn joint_average_consistency() {
        let p = fig1();
        let at_zero = avg_joint(&p, 0.0).unwrap();
        assert!((at_zero.re / avg_boltzmann(&p) - 1.0).abs() < 1e-13);
        assert!(at_zero.im.abs() < 1e-13 * at_zero.re);
        let p0 = p.with_beta(0.0);
        for u in [0.1, 0.7, 2.5] {
            let joint = avg_joint(&p0, u).unwrap();
            let phase = avg_phase(&p0, u, PhaseSign::Minus, Spectrum::Initial);
            assert!((joint - phase).norm() < 1e-13);
        }
    }

    #[test]
    fn normalization_at_origin() {
        for beta in [0.0, 1e-9, 0.01, 0.1, 1.0, 40.0, f64::INFINITY] {
            let p = fig1().with_beta(beta);
            assert!((g_ensemble(&p, 0.0) - 1.0).norm() < 1e-13, "beta {beta}");
        }
        assert_eq!(g_beta0(&fig1(), 0.0), Complex64::new(1.0, 0.0));
        assert_eq!(g_betainf(&fig1(), 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn factorization_of_main_result() {
        for beta in [0.01, 0.1, 1.0] {
            let p = fig1().with_beta(beta);
            for u in [0.05, 0.4, 1.3, 2.9] {
                let composed = avg_joint(&p, u).unwrap() * avg_phase(&p, u, PhaseSign::Plus, Spectrum::Final)
                    / avg_boltzmann(&p);
                let direct = g_ensemble(&p, u);
                assert!((composed - direct).norm() < 1e-12 * (1.0 + direct.norm()), "beta {beta} u {u}");
            }
        }
    }

    #[test]
    fn hermitian_symmetry() {
        let p = fig1().with_beta(0.1);
        for u in [0.2, 1.0, 2.7] {
            assert!((g_ensemble(&p, -u) - g_ensemble(&p, u).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn peak_width_examples() {
        let (w, dw) = peak_width(&fig1(), PeakRegime::Beta0);
        assert_eq!(w, 0.0);
        assert!((dw - 24.5).abs() < 0.01);
        let (w, dw) = peak_width(&fig1(), PeakRegime::BetaInf);
        assert_eq!(w, 24.0);
        assert!((dw - 12.25).abs() < 0.01);
        let sym = QuenchParams::new(100, 0.3, 0.3, 1.0, 1.0, 0.0).unwrap();
        let (w, dw) = peak_width(&sym, PeakRegime::Beta0);
        assert_eq!(w, 0.0);
        assert!((dw - 200.0 * 0.3 / PI).abs() < 1e-12);
    }

    #[test]
    fn n_eff_examples() {
        let ratio = |beta: f64| n_eff(beta, 0.1283).unwrap() / 300.0;
        assert!((ratio(0.01) - 2.6).abs() < 0.01);
        assert!((ratio(0.1) - 0.26).abs() < 0.001);
        assert!((ratio(1.0) - 0.026).abs() < 0.0001);
        assert_eq!(n_eff(0.0, 0.1283).unwrap(), f64::INFINITY);
        assert!(n_eff(-1.0, 0.1).is_err());
    }

    #[test]
    fn convolution_normalized_and_supported() {
        let (a1, a2) = (24.5, 12.25);
        let mass = integrate_real(
            |d| semicircle_convolution(a1, a2, d).unwrap(),
            -(a1 + a2),
            a1 + a2,
            &[a2 - a1, a1 - a2],
            QuadOptions { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 500 },
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-9);
        assert_eq!(semicircle_convolution(a1, a2, 36.8).unwrap(), 0.0);
    }

    #[test]
    fn short_transform_grid_is_rejected() {
        let opts = TransformOptions { envelope_tol: 1e-6, u_max: Some(5.0) };
        assert!(PredictedDensity::with_options(&fig1(), opts).is_err());
    }

    #[test]
    fn zero_temperature_density_is_shifted_semicircle() {
        let p = fig1().with_beta(f64::INFINITY);
        let d = PredictedDensity::new(&p).unwrap();
        assert!((d.eval(24.0).unwrap() - 2.0 / (PI * p.radius_final())).abs() < 1e-15);
        assert_eq!(d.eval(24.0 + 12.3).unwrap(), 0.0);
    }
}
