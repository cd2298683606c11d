//! Direct numerical integrals over the semicircle density. Slow, but they
//! make no use of Bessel or hypergeometric identities, so they serve as
//! cross-checks for the closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::{integrate, integrate_real, QuadOptions};
use super::semicircle_density;
use crate::error::Result;

fn tight() -> QuadOptions {
    QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 4000 }
}

/// `int rho(E) e^{-(beta + iu) E} dE` over a semicircle of radius `a`
/// centered at `center`.
pub fn semicircle_average(radius: f64, center: f64, beta: f64, u: f64) -> Result<Complex64> {
    let rate = Complex64::new(-beta, -u);
    // Factor the center out to keep the integrand of order one.
    let f = |x: f64| (rate * x).exp() * semicircle_density(radius, x);
    let r = integrate(f, -radius, radius, &[0.0], tight())?;
    Ok(r.value * (rate * center).exp())
}

/// `<e^{+-iuE}>` by quadrature.
pub fn phase_average(radius: f64, center: f64, u: f64, sign: f64) -> Result<Complex64> {
    semicircle_average(radius, center, 0.0, -sign * u)
}

/// `<e^{-beta E}>` by quadrature.
pub fn boltzmann_average(radius: f64, center: f64, beta: f64) -> Result<f64> {
    semicircle_average(radius, center, beta, 0.0).map(|z| z.re)
}

/// `<e^{-beta E} e^{-iuE}>` by quadrature.
pub fn joint_average(radius: f64, center: f64, beta: f64, u: f64) -> Result<Complex64> {
    semicircle_average(radius, center, beta, u)
}

/// Density of `W = E~ - E` when `E` follows the Boltzmann-tilted semicircle
/// of radius `a` and `E~` the untilted semicircle of radius `a~`, with the
/// two centers differing by `shift`.
pub fn tilted_convolution_density(a: f64, a_final: f64, shift: f64, beta: f64, w: f64) -> Result<f64> {
    let d = w - shift;
    if d.abs() >= a + a_final {
        return Ok(0.0);
    }
    // Work relative to the lower edge so the tilt stays below one.
    let z = boltzmann_average(a, 0.0, beta)? * (-beta * a).exp();
    let mut cuts = Vec::new();
    for edge in [-d - a_final, -d + a_final] {
        let t = edge / a;
        if t.abs() < 1.0 {
            cuts.push(t.asin());
        }
    }
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let x = a * s;
        2.0 / PI * c * c * (-beta * (x + a)).exp() * semicircle_density(a_final, d + x)
    };
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-12, max_intervals: 4000 };
    Ok(integrate_real(integrand, -PI / 2.0, PI / 2.0, &cuts, opts)? / z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_moments() {
        assert!((boltzmann_average(3.0, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((phase_average(3.0, 1.0, 0.0, 1.0).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn tilted_density_is_normalized() {
        let (a, at, beta) = (2.0, 1.0, 1.5);
        let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-9, max_intervals: 400 };
        let mass = integrate_real(
            |w| tilted_convolution_density(a, at, 0.5, beta, w).unwrap(),
            0.5 - a - at,
            0.5 + a + at,
            &[0.5 - 1.0, 0.5 + 1.0],
            opts,
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "{mass}");
    }
}
