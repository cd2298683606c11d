//! Bessel functions of order one and the confluent limit function
//! `0F1(2; z)`.
//!
//! Real `J1` and `I1` use power series, Miller's backward recurrence and the
//! Hankel asymptotic expansions. `0F1(2; z)` is evaluated through the complex
//! modified Bessel function `I1(2 sqrt z) / sqrt z`, which has its own
//! complex-argument implementation, so the classical identities linking the
//! three functions are genuine cross-checks.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `|z|` accepted by [`hyp0f1_2`].
pub const HYP0F1_MAX_ABS: f64 = 1e8;

const SERIES_TOL: f64 = 1e-17;
const J1_SERIES_MAX: f64 = 8.0;
const ASYMPTOTIC_MIN: f64 = 25.0;
const I1_SERIES_MAX: f64 = 30.0;
const SMALL_ARG: f64 = 1e-4;

/// Hankel coefficients `a_k(1)` divided by `x^k`, summed with alternating
/// signs as `sum (-1)^k a_k / x^k` (`alternating = true`) or plainly.
fn hankel_sum(x: Complex64, alternating: bool) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (4.0 - odd * odd) / (8.0 * k as f64) / x;
        let t = if alternating && k % 2 == 1 { -term } else { term };
        let size = t.norm();
        if size > last {
            break;
        }
        sum += t;
        last = size;
        if size < SERIES_TOL * sum.norm() {
            break;
        }
    }
    sum
}

fn j1_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() < SERIES_TOL * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalized with `J0 + 2 sum J_{2k} = 1`.
fn j1_miller(x: f64) -> f64 {
    let mut start = x.abs().ceil() as usize + 45;
    start += start % 2;
    let mut next = 0.0_f64;
    let mut cur = 1e-30_f64;
    let mut even_sum = 0.0_f64;
    let mut j1 = 0.0_f64;
    for k in (1..=start).rev() {
        if k % 2 == 0 {
            even_sum += cur;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if k == 2 {
            j1 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            even_sum *= 1e-250;
            j1 *= 1e-250;
        }
    }
    j1 / (cur + 2.0 * even_sum)
}

fn j1_asymptotic(x: f64) -> f64 {
    // Even terms build P, odd terms Q.
    let mut term = 1.0_f64;
    let mut p = 1.0_f64;
    let mut q = 0.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (4.0 - odd * odd) / (8.0 * k as f64 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // Sign pattern: P = a0 - a2/x^2 + a4/x^4, Q = a1/x - a3/x^3 + ...
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if last < SERIES_TOL {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // chi = x - 3 pi / 4, expanded so the reduction of x stays exact.
    let cos_chi = (s - c) * FRAC_1_SQRT_2;
    let sin_chi = -(s + c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Bessel function of the first kind `J1(x)`.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= J1_SERIES_MAX {
        j1_series(ax)
    } else if ax < ASYMPTOTIC_MIN {
        j1_miller(ax)
    } else {
        j1_asymptotic(ax)
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// `J1(x) / x`, equal to `1/2` at the origin.
pub fn j1_over_x(x: f64) -> f64 {
    if x.abs() < SMALL_ARG {
        let x2 = x * x;
        0.5 - x2 / 16.0 + x2 * x2 / 384.0
    } else {
        bessel_j1(x) / x
    }
}

/// `e^{-|x|} I1(x)`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= I1_SERIES_MAX {
        let half = 0.5 * ax;
        let q = half * half;
        let mut term = half;
        let mut sum = term;
        for k in 1..300 {
            term *= q / (k as f64 * (k + 1) as f64);
            sum += term;
            if term < SERIES_TOL * sum {
                break;
            }
        }
        sum * (-ax).exp()
    } else {
        hankel_sum(Complex64::new(ax, 0.0), true).re / (2.0 * PI * ax).sqrt()
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// Modified Bessel function of the first kind `I1(x)`. Overflows to
/// infinity for `|x|` above roughly 713; see [`ln_bessel_i1`].
pub fn bessel_i1(x: f64) -> f64 {
    bessel_i1_scaled(x) * x.abs().exp()
}

/// `ln I1(x)` for `x > 0`.
pub fn ln_bessel_i1(x: f64) -> f64 {
    x + bessel_i1_scaled(x).ln()
}

/// `I1(x) / x`, equal to `1/2` at the origin.
pub fn i1_over_x(x: f64) -> f64 {
    if x.abs() < SMALL_ARG {
        let x2 = x * x;
        0.5 + x2 / 16.0 + x2 * x2 / 384.0
    } else {
        bessel_i1(x) / x
    }
}

/// `e^{-zeta} I1(zeta)` for `Re zeta >= 0`.
pub fn bessel_i1_complex_scaled(zeta: Complex64) -> Complex64 {
    let r = zeta.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if r <= 2.0 {
        let half = zeta * 0.5;
        let q = half * half;
        let mut term = half;
        let mut sum = term;
        for k in 1..100 {
            term *= q / (k as f64 * (k + 1) as f64);
            sum += term;
            if term.norm() < SERIES_TOL * sum.norm() {
                break;
            }
        }
        return sum * (-zeta).exp();
    }
    if r < ASYMPTOTIC_MIN {
        return i1_complex_miller(zeta);
    }
    // Two-exponential Hankel form; the second exponential matters on and
    // near the imaginary axis, where it restores the oscillation of J1.
    let side = if zeta.im >= 0.0 { -1.0 } else { 1.0 };
    let dominant = hankel_sum(zeta, true);
    let recessive = hankel_sum(zeta, false) * (-2.0 * zeta).exp() * Complex64::new(0.0, side);
    (dominant + recessive) / (2.0 * PI * zeta).sqrt()
}

/// Miller's recurrence for `I_k`, normalized with `I0 + 2 sum I_k = e^zeta`.
fn i1_complex_miller(zeta: Complex64) -> Complex64 {
    let start = zeta.norm().ceil() as usize + 45;
    let inv = zeta.inv();
    let mut next = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1e-30, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut i1 = Complex64::new(0.0, 0.0);
    for k in (1..=start).rev() {
        sum += cur;
        let prev = cur * inv * (2.0 * k as f64) + next;
        next = cur;
        cur = prev;
        if k == 2 {
            i1 = cur;
        }
        if cur.norm() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            sum *= 1e-250;
            i1 *= 1e-250;
        }
    }
    i1 / (cur + sum * 2.0)
}

/// `0F1(2; z)` split as `(mantissa, exponent)` with value `mantissa * e^exponent`.
/// The exponent is `2 sqrt(z)` (principal root), so the mantissa never
/// overflows. Valid for every finite `z`.
pub fn hyp0f1_2_scaled(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() <= 1.0 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..60 {
            term *= z / (k as f64 * (k + 1) as f64);
            sum += term;
            if term.norm() < SERIES_TOL * sum.norm() {
                break;
            }
        }
        return (sum, Complex64::new(0.0, 0.0));
    }
    hyp0f1_2_from_root(2.0 * z.sqrt())
}

/// Same as [`hyp0f1_2_scaled`] with the argument given through its root,
/// `z = (zeta / 2)^2`, `Re zeta >= 0`. The returned exponent is `zeta`
/// itself, so callers can cancel it exactly.
pub fn hyp0f1_2_from_root(zeta: Complex64) -> (Complex64, Complex64) {
    if zeta.norm() <= 2.0 {
        let (mantissa, _) = hyp0f1_2_scaled(0.25 * zeta * zeta);
        return (mantissa * (-zeta).exp(), zeta);
    }
    (2.0 * bessel_i1_complex_scaled(zeta) / zeta, zeta)
}

/// Confluent limit function `0F1(; 2; z) = sum z^k / (k! (k+1)!)`.
pub fn hyp0f1_2(z: Complex64) -> Result<Complex64> {
    if !(z.norm() <= HYP0F1_MAX_ABS) {
        return Err(Error::Domain(format!("|z| = {:e} exceeds {:e} in 0F1(2; z)", z.norm(), HYP0F1_MAX_ABS)));
    }
    let (mantissa, exponent) = hyp0f1_2_scaled(z);
    Ok(mantissa * exponent.exp())
}
