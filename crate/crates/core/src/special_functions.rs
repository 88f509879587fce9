//! Gamma function kernels.
//!
//! `log_gamma` works on the whole complex plane minus the poles: for
//! `Re(s) >= 1/2` the argument is shifted up by the recurrence until
//! `Re(s) >= 15` and the Stirling series (ten Bernoulli terms) is summed;
//! for `Re(s) < 1/2` Euler's reflection formula is applied first.
//! `sinpi`/`cospi` reduce their argument exactly, so trigonometric
//! factors vanish exactly at integers and half-integers.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_real, QuadOptions, QuadratureError};
use crate::sum::ComplexSum;

/// A point `s = sigma + i t` of the complex plane.
pub type ComplexPoint = Complex64;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Distance to a non-positive integer below which `log_gamma` reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-14;

/// `B_{2k}` for `k = 1..=10`, as exact numerator/denominator pairs.
pub const BERNOULLI_2K: [(f64, f64); 10] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
];

pub fn bernoulli_2k(k: usize) -> f64 {
    let (n, d) = BERNOULLI_2K[k - 1];
    n / d
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GammaError {
    #[error("Gamma has a pole at s = {0}")]
    Pole(Complex64),
    #[error("argument is not finite: {0}")]
    NonFinite(Complex64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Builds a point after checking both components are finite.
pub fn complex_point(re: f64, im: f64) -> Result<ComplexPoint, GammaError> {
    let s = Complex64::new(re, im);
    if re.is_finite() && im.is_finite() {
        Ok(s)
    } else {
        Err(GammaError::NonFinite(s))
    }
}

/// `sin(pi x)` with exact reduction; zero at every integer.
pub fn sinpi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = (2.0 * x).round();
    let r = x - 0.5 * n;
    let (s, c) = (PI * r).sin_cos();
    match (n as i64).rem_euclid(4) {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    }
}

/// `cos(pi x)` with exact reduction; zero at every half-integer.
pub fn cospi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = (2.0 * x).round();
    let r = x - 0.5 * n;
    let (s, c) = (PI * r).sin_cos();
    match (n as i64).rem_euclid(4) {
        0 => c,
        1 => -s,
        2 => -c,
        _ => s,
    }
}

/// `sin(pi z)` for complex `z`.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(sinpi(z.re) * y.cosh(), cospi(z.re) * y.sinh())
}

/// `cos(pi z)` for complex `z`.
pub fn cos_pi(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(cospi(z.re) * y.cosh(), -sinpi(z.re) * y.sinh())
}

/// `log sin(pi z)` without overflow for large `|Im z|`; branch unspecified.
pub fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 6.0 {
        return sin_pi(z).ln();
    }
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
    let i = Complex64::i();
    let small = Complex64::from_polar((-2.0 * PI * z.im).exp(), 0.0) * Complex64::new(cospi(2.0 * z.re), sinpi(2.0 * z.re));
    Complex64::new(-std::f64::consts::LN_2, PI / 2.0) - i * PI * z + (Complex64::new(1.0, 0.0) - small).ln()
}

fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = x - two_pi * (x / two_pi).round();
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

fn nearest_pole(s: Complex64) -> Option<f64> {
    let n = s.re.round();
    if n <= 0.0 && Complex64::new(s.re - n, s.im).norm() <= POLE_TOLERANCE {
        Some(n)
    } else {
        None
    }
}

fn stirling_tail(w: Complex64, terms: usize) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut power = inv;
    let mut acc = ComplexSum::new();
    for k in 1..=terms {
        let kk = k as f64;
        acc.add(power * (bernoulli_2k(k) / (2.0 * kk * (2.0 * kk - 1.0))));
        power *= inv2;
    }
    acc.total()
}

// Continuous branch of log Gamma for Re(s) >= 1/2.
fn log_gamma_right(s: Complex64) -> Complex64 {
    const SHIFT_TO: f64 = 15.0;
    let mut shift = ComplexSum::new();
    let mut w = s;
    while w.re < SHIFT_TO {
        shift.add(w.ln());
        w += 1.0;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + stirling_tail(w, 10) - shift.total()
}

/// Principal-branch `log Gamma(s)` (imaginary part in `(-pi, pi]`).
pub fn log_gamma(s: ComplexPoint) -> Result<ComplexPoint, GammaError> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(GammaError::NonFinite(s));
    }
    if nearest_pole(s).is_some() {
        return Err(GammaError::Pole(s));
    }
    let raw = if s.re >= 0.5 {
        log_gamma_right(s)
    } else {
        Complex64::new(PI.ln(), 0.0) - log_sin_pi(s) - log_gamma_right(Complex64::new(1.0, 0.0) - s)
    };
    Ok(Complex64::new(raw.re, wrap_phase(raw.im)))
}

pub fn gamma(s: ComplexPoint) -> Result<ComplexPoint, GammaError> {
    Ok(log_gamma(s)?.exp())
}

/// `log |Gamma(x)|` for real `x` off the poles.
pub fn ln_gamma_real(x: f64) -> Result<f64, GammaError> {
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

/// Truncated Stirling series for `log Gamma(s)`, `s >= 2`. The truncation
/// error is bounded by the first omitted term.
pub fn stirling_log_gamma(s: f64, terms: usize) -> Result<f64, GammaError> {
    if !(s >= 2.0) || !(1..=10).contains(&terms) {
        return Err(GammaError::Precondition(format!(
            "stirling_log_gamma needs s >= 2 and 1 <= terms <= 10 (got s = {s}, terms = {terms})"
        )));
    }
    let w = Complex64::new(s, 0.0);
    Ok(((w - 0.5) * w.ln() - w + LN_SQRT_2PI + stirling_tail(w, terms)).re)
}

/// Outcome of numerically integrating `|Gamma(sigma + 2 + i t)|` over the real line.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct GammaBoundReport {
    pub sigma: f64,
    /// Cutoff actually used (at least the requested one).
    pub t_cut: f64,
    /// Quadrature of the integrand over `[-t_cut, t_cut]`.
    pub integral_value: f64,
    pub quad_error: f64,
    /// Certified bound on both tails beyond `|t| = t_cut`.
    pub tail_bound: f64,
    /// `integral_value / (sigma^3 Gamma(sigma))`.
    pub bound_ratio: f64,
    /// Same ratio with the tail bound and quadrature error added.
    pub upper_ratio: f64,
}

// log of an upper bound on both tails of the integral beyond |t| = t_cut.
// For t >= 2x, Stirling with remainder |R| <= 1/(6|z|) (Re z > 0) gives
// |Gamma(x+it)| <= sqrt(2pi) (1.118 t)^(x-1/2) e^(-pi t/2) e^(1/(6 t)).
fn log_gamma_tail_bound(x: f64, t_cut: f64) -> f64 {
    let p = x - 0.5;
    let c = PI / 2.0;
    let y = c * t_cut;
    let log_const = LN_SQRT_2PI + p * (1.25f64.sqrt()).ln() + 1.0 / (6.0 * t_cut);
    // int_T^inf t^p e^{-ct} dt = c^{-p-1} Gamma(p+1, cT) <= c^{-p-1} (cT)^p e^{-cT} / (1 - p/(cT))
    let log_incomplete = -(p + 1.0) * c.ln() + p * y.ln() - y - (1.0 - p / y).ln();
    std::f64::consts::LN_2 + log_const + log_incomplete
}

/// Integrates `|Gamma(sigma + 2 + i t)|` and compares against `sigma^3 Gamma(sigma)`.
pub fn gamma_ratio_bound_check(sigma: f64, t_cut: f64, quad_tol: f64) -> Result<GammaBoundReport, GammaError> {
    if !(sigma >= 2.0) || !(quad_tol > 0.0) || !(t_cut >= 2.0 * (sigma + 2.0) - 1e-12) || !t_cut.is_finite() {
        return Err(GammaError::Precondition(format!(
            "need sigma >= 2, t_cut >= 2(sigma+2), quad_tol > 0 (got {sigma}, {t_cut}, {quad_tol})"
        )));
    }
    let x = sigma + 2.0;
    let mut cut = t_cut;
    let mut tail = log_gamma_tail_bound(x, cut).exp();
    while tail >= 0.5 * quad_tol {
        cut *= 2.0;
        tail = log_gamma_tail_bound(x, cut).exp();
    }
    let integrand = |t: f64| log_gamma(Complex64::new(x, t)).map(|v| v.re.exp()).unwrap_or(f64::NAN);
    let opts = QuadOptions::absolute(0.25 * quad_tol).with_rel_tol(1e-13).with_max_intervals(2000);
    let (half, err) = integrate_real(integrand, 0.0, cut, opts)?;
    let integral_value = 2.0 * half;
    let quad_error = 2.0 * err;
    let scale = 3.0 * sigma.ln() + ln_gamma_real(sigma)?;
    let bound_ratio = (integral_value.ln() - scale).exp();
    let upper_ratio = ((integral_value + tail + quad_error).ln() - scale).exp();
    Ok(GammaBoundReport {
        sigma,
        t_cut: cut,
        integral_value,
        quad_error,
        tail_bound: tail,
        bound_ratio,
        upper_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn factorial_values() {
        assert!((log_gamma(c(4.0, 0.0)).unwrap().re - 6f64.ln()).abs() < 1e-14);
        assert!((log_gamma(c(0.5, 0.0)).unwrap().re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!((gamma(c(10.0, 0.0)).unwrap().re - 362_880.0).abs() < 362_880.0 * 1e-13);
        // Gamma(-1/2) = -2 sqrt(pi)
        let g = gamma(c(-0.5, 0.0)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13 && g.im.abs() < 1e-13);
    }

    #[test]
    fn poles_are_rejected() {
        for n in 0..5 {
            assert!(matches!(log_gamma(c(-(n as f64), 0.0)), Err(GammaError::Pole(_))));
        }
        assert!(log_gamma(c(-3.0 + 1e-10, 0.0)).is_ok());
    }

    #[test]
    fn magnitude_on_critical_line_matches_stirling() {
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        let t = 14.134_725;
        let g = log_gamma(c(0.5, t)).unwrap();
        let exact = 0.5 * (PI.ln() - (PI * t).cosh().ln());
        assert!((g.re - exact).abs() < 1e-12);
    }

    #[test]
    fn sinpi_is_exact_at_integers() {
        for n in -40..40 {
            assert_eq!(sinpi(n as f64), 0.0);
            assert_eq!(cospi(n as f64 + 0.5), 0.0);
        }
        assert!((sinpi(0.25) - 0.5f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn log_sin_pi_far_from_axis() {
        let z = c(0.3, 9.0);
        let direct = sin_pi(z).ln();
        let stable = log_sin_pi(z);
        assert!((direct.re - stable.re).abs() < 1e-12);
        assert!((direct.exp() - stable.exp()).norm() / direct.exp().norm() < 1e-12);
    }

    #[test]
    fn stirling_examples() {
        assert!((stirling_log_gamma(10.0, 4).unwrap() - 362_880f64.ln()).abs() < 1e-10);
        assert!(stirling_log_gamma(2.0, 1).unwrap().abs() < 0.01);
        let lg = log_gamma(c(30.0, 0.0)).unwrap().re;
        assert!((stirling_log_gamma(30.0, 6).unwrap() - lg).abs() < 1e-13);
        assert!(stirling_log_gamma(1.5, 3).is_err());
        assert!(stirling_log_gamma(5.0, 11).is_err());
    }

    #[test]
    fn gamma_bound_rejects_short_cutoff() {
        assert!(gamma_ratio_bound_check(2.0, 7.0, 1e-8).is_err());
        assert!(gamma_ratio_bound_check(1.0, 100.0, 1e-8).is_err());
    }

    #[test]
    fn gamma_bound_report_is_positive() {
        let r = gamma_ratio_bound_check(2.0, 8.0, 1e-10).unwrap();
        assert!(r.integral_value > 0.0 && r.bound_ratio > 0.0 && r.bound_ratio.is_finite());
        assert!(r.tail_bound < 1e-10);
        assert!(r.upper_ratio >= r.bound_ratio);
    }
}
