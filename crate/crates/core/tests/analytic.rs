use num_complex::Complex64;

use rmtwork::analytic::oracles::tilted_convolution_density;
use rmtwork::analytic::quadrature::{integrate_real, QuadOptions};
use rmtwork::analytic::{
    g_ensemble, p_w_predicted, semicircle_convolution, PredictedDensity, QuenchParams, TransformOptions,
};

fn fig(beta: f64) -> QuenchParams {
    QuenchParams::new(300, 0.1283, 0.1283 / 2.0, 24.0, 24.0, beta).unwrap()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[test]
fn finite_beta_density_matches_tilted_convolution() {
    for beta in [0.01, 0.1, 1.0] {
        let p = fig(beta);
        let density = PredictedDensity::new(&p).unwrap();
        let (lo, hi) = density.support();
        let shift = p.e_final - p.e_init;
        let mut peak = 0.0f64;
        let mut worst = 0.0f64;
        for w in grid(lo - 2.0, hi + 2.0, 241) {
            let want = tilted_convolution_density(p.radius_init(), p.radius_final(), shift, beta, w).unwrap();
            peak = peak.max(want);
            worst = worst.max((density.eval(w).unwrap() - want).abs());
        }
        assert!(worst / peak < 1e-4, "beta {beta}: {:e}", worst / peak);
    }
}

#[test]
fn predicted_density_is_normalized() {
    let opts = QuadOptions { abs_tol: 1e-10, rel_tol: 1e-8, max_intervals: 2000 };
    for beta in [0.0, 0.01, 0.1, 1.0, 10.0, f64::INFINITY] {
        let p = fig(beta);
        let density = PredictedDensity::new(&p).unwrap();
        let (lo, hi) = density.support();
        let mass = integrate_real(|w| density.eval(w).unwrap(), lo, hi, &[], opts).unwrap();
        assert!((mass - 1.0).abs() < 1e-6, "beta {beta}: {mass}");
    }
}

#[test]
fn density_has_the_mean_of_the_characteristic_function() {
    // <w> = -i G'(0)
    let p = fig(0.1);
    let h = 1e-5;
    let slope = (g_ensemble(&p, h) - g_ensemble(&p, -h)) / (2.0 * h);
    let mean_from_g = (slope / Complex64::i()).re;
    let density = PredictedDensity::new(&p).unwrap();
    let (lo, hi) = density.support();
    let opts = QuadOptions { abs_tol: 1e-10, rel_tol: 1e-9, max_intervals: 2000 };
    let mean = integrate_real(|w| w * density.eval(w).unwrap(), lo, hi, &[], opts).unwrap();
    assert!((mean - mean_from_g).abs() < 1e-4, "{mean} vs {mean_from_g}");
}

#[test]
fn beta0_density_is_the_convolution() {
    let p = fig(0.0);
    let w = grid(-40.0, 40.0, 81);
    let got = p_w_predicted(&p, &w).unwrap();
    for (x, y) in w.iter().zip(&got) {
        assert_eq!(*y, semicircle_convolution(p.radius_init(), p.radius_final(), *x).unwrap());
    }
}

#[test]
fn short_cutoff_is_rejected() {
    let opts = TransformOptions { u_max: Some(0.5), ..Default::default() };
    assert!(PredictedDensity::with_options(&fig(0.1), opts).is_err());
}
