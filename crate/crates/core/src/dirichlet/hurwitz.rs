//! Hurwitz zeta by Euler-Maclaurin summation, and combinations
//! `q^{-s} sum_r w_r zeta(s, r/q)` continued to the left half-plane
//! through Hurwitz's formula at rational shifts.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::DirichletError;
use crate::dd::DoubleDouble;
use crate::special_functions::{bernoulli_2k, cos_pi, log_gamma};
use crate::sum::ComplexSum;

/// Number of Bernoulli correction terms.
pub const EM_ORDER: usize = 8;

const MAX_TERMS: f64 = 2.0e7;

/// `4 |(s)_{2M}| / (2 pi)^{2M} (x)^{-sigma-2M+1} / (sigma+2M-1)` with `x = N + a`.
fn remainder_bound(s: Complex64, x: f64) -> f64 {
    let m2 = 2 * EM_ORDER;
    let mut poch = 1.0;
    for k in 0..m2 {
        poch *= (s + k as f64).norm();
    }
    let expo = s.re + m2 as f64 - 1.0;
    4.0 * poch / (2.0 * PI).powi(m2 as i32) * x.powf(-expo) / expo
}

/// Smallest `N` with remainder below `tol` (geometric search, then bisection).
fn choose_terms(s: Complex64, a: f64, tol: f64) -> Result<usize, DirichletError> {
    if remainder_bound(s, a) <= tol {
        return Ok(0);
    }
    let mut hi = 1usize;
    while remainder_bound(s, hi as f64 + a) > tol {
        hi *= 2;
        if hi as f64 > MAX_TERMS {
            return Err(DirichletError::ToleranceUnreachable {
                tol,
                bound: remainder_bound(s, hi as f64 + a),
            });
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if remainder_bound(s, mid as f64 + a) <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `zeta(s, a)` for `a > 0` and `Re(s) > 1 - 2M`, `s != 1`.
/// Returns the value and the certified remainder bound.
pub fn hurwitz_zeta(s: Complex64, a: f64, tol: f64) -> Result<(Complex64, f64), DirichletError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(DirichletError::InvalidSeries(format!("Hurwitz shift must be positive, got {a}")));
    }
    if s.re <= 1.0 - 2.0 * EM_ORDER as f64 {
        return Err(DirichletError::UnsupportedRegion(s));
    }
    let n = choose_terms(s, a, tol)?;
    let mut acc = ComplexSum::new();
    for k in 0..n {
        acc.add((-s * (k as f64 + a).ln()).exp());
    }
    let x = n as f64 + a;
    let log_x = x.ln();
    let x_pow = (-s * log_x).exp();
    acc.add(x_pow * x / (s - 1.0));
    acc.add(x_pow * 0.5);
    // B_{2j}/(2j)! (s)_{2j-1} x^{-s-2j+1}
    let mut poch = s;
    let mut factorial = 2.0;
    let mut x_inv_pow = 1.0 / x;
    for j in 1..=EM_ORDER {
        acc.add(poch * x_pow * (bernoulli_2k(j) / factorial * x_inv_pow));
        let k = 2.0 * j as f64;
        poch = poch * (s + (k - 1.0)) * (s + k);
        factorial *= (k + 1.0) * (k + 2.0);
        x_inv_pow /= x * x;
    }
    Ok((acc.total(), remainder_bound(s, x)))
}

/// `q^{-s} sum_{r=1}^{q} weights[r-1] zeta(s, r/q)`, which is the Dirichlet
/// series `sum_n weights[(n-1) mod q] n^{-s}`. For `Re(s) < 0` Hurwitz's
/// formula turns the sum into one over `zeta(1-s, k/q)`.
pub fn periodic_series(s: Complex64, weights: &[f64], tol: f64) -> Result<(Complex64, f64), DirichletError> {
    let q = weights.len();
    if q == 0 {
        return Err(DirichletError::InvalidSeries("empty weight table".into()));
    }
    let qf = q as f64;
    let budget = tol / (1.0 + weights.iter().map(|w| w.abs()).sum::<f64>());
    if s.re >= 0.0 {
        let scale = (-s * qf.ln()).exp();
        let mut acc = ComplexSum::new();
        let mut err = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let (v, e) = hurwitz_zeta(s, (i + 1) as f64 / qf, budget / scale.norm().max(1e-300))?;
            acc.add(v * w);
            err += w.abs() * e;
        }
        return Ok((acc.total() * scale, err * scale.norm()));
    }

    // zeta(1-w, r/q) = 2 Gamma(w) / (2 pi q)^w sum_k cos(pi w/2 - 2 pi k r/q) zeta(w, k/q)
    let w = 1.0 - s;
    let log_prefactor = LN_2 + log_gamma(w).map_err(|_| DirichletError::UnsupportedRegion(s))?
        - w * (2.0 * PI * qf).ln()
        - s * qf.ln();
    let prefactor = log_prefactor.exp();
    let mut coeffs = Vec::with_capacity(q);
    for k in 1..=q {
        let mut c = Complex64::new(0.0, 0.0);
        for (i, &wt) in weights.iter().enumerate() {
            if wt == 0.0 {
                continue;
            }
            let r = i + 1;
            let m = (2 * k * r) % (2 * q);
            c += cos_pi(Complex64::new(w.re / 2.0 - m as f64 / qf, w.im / 2.0)) * wt;
        }
        coeffs.push(c);
    }
    let weight_mass: f64 = coeffs.iter().map(|c| c.norm()).sum();
    let inner_tol = tol / (prefactor.norm() * (1.0 + weight_mass)).max(1e-300);
    let mut acc = ComplexSum::new();
    let mut err = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let (v, e) = hurwitz_zeta(w, (k + 1) as f64 / qf, inner_tol.max(1e-300))?;
        acc.add(v * c);
        err += c.norm() * e;
    }
    Ok((acc.total() * prefactor, err * prefactor.norm()))
}

type DD = DoubleDouble;

/// `zeta(s, a)` and `d/ds zeta(s, a)` for real `s != 1` in double-double,
/// Euler-Maclaurin with enough terms for about 1e-32 relative accuracy.
pub fn hurwitz_zeta_dd(s: f64, a: f64) -> (DD, DD) {
    // The value bound vanishes at s = 0, -1, ..., where the sum is a
    // polynomial in a; the derivative is not, so bound with |s + k + i|.
    let target = 1e-35;
    let sc = Complex64::new(s, 1.0);
    let mut n = 0usize;
    while remainder_bound(sc, n as f64 + a) > target && (n as f64) < MAX_TERMS {
        n = (n * 2).max(8);
    }
    let sd = DD::new(s);
    let mut value = DD::ZERO;
    let mut deriv = DD::ZERO;
    for k in 0..n {
        let l = DD::new(k as f64 + a).ln();
        let t = (-(sd * l)).exp();
        value += t;
        deriv -= l * t;
    }
    let x = DD::new(n as f64 + a);
    let l = x.ln();
    let x_pow = (-(sd * l)).exp();
    let sm1 = sd - 1.0;
    let head = x_pow * x / sm1;
    value += head + x_pow * 0.5;
    deriv += -(head * l) - head / sm1 - x_pow * l * 0.5;

    let mut poch = sd;
    let mut poch_d = DD::ONE;
    let mut factorial = DD::new(2.0);
    let mut x_inv_pow = DD::ONE / x;
    for j in 1..=EM_ORDER {
        let (num, den) = crate::special_functions::BERNOULLI_2K[j - 1];
        let c = DD::new(num) / den / factorial;
        let base = x_pow * x_inv_pow * c;
        value += poch * base;
        deriv += (poch_d - poch * l) * base;
        let k = 2.0 * j as f64;
        for shift in [k - 1.0, k] {
            poch_d = poch_d * (sd + shift) + poch;
            poch *= sd + shift;
        }
        factorial = factorial * ((k + 1.0) * (k + 2.0));
        x_inv_pow = x_inv_pow / (x * x);
    }
    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_two_and_zero() {
        let (v, e) = hurwitz_zeta(c(2.0, 0.0), 1.0, 1e-14).unwrap();
        assert!((v.re - PI * PI / 6.0).abs() < 1e-14 && e <= 1e-14);
        let (v, _) = hurwitz_zeta(c(0.0, 0.0), 1.0, 1e-14).unwrap();
        assert!((v.re + 0.5).abs() < 1e-14);
        // zeta(0, a) = 1/2 - a
        let (v, _) = hurwitz_zeta(c(0.0, 0.0), 0.3, 1e-14).unwrap();
        assert!((v.re - 0.2).abs() < 1e-14);
    }

    #[test]
    fn reflection_gives_exact_trivial_zeros() {
        for n in 1..=6 {
            let (v, _) = periodic_series(c(-2.0 * n as f64, 0.0), &[1.0], 1e-12).unwrap();
            assert_eq!(v, c(0.0, 0.0), "n = {n}");
        }
        // zeta(-1) = -1/12, zeta(-3) = 1/120
        let (v, _) = periodic_series(c(-1.0, 0.0), &[1.0], 1e-14).unwrap();
        assert!((v.re + 1.0 / 12.0).abs() < 1e-14);
        let (v, _) = periodic_series(c(-3.0, 0.0), &[1.0], 1e-14).unwrap();
        assert!((v.re - 1.0 / 120.0).abs() < 1e-14);
    }

    #[test]
    fn both_sides_of_the_crossover_agree() {
        for &t in &[0.0, 3.0, 17.5] {
            for weights in [vec![1.0], vec![1.0, 0.0, -1.0, 0.0], vec![1.0, -1.0, 0.0]] {
                let left = periodic_series(c(-1e-9, t), &weights, 1e-13).unwrap().0;
                let right = periodic_series(c(1e-9, t), &weights, 1e-13).unwrap().0;
                assert!((left - right).norm() < 1e-7 * (1.0 + left.norm()), "{t} {weights:?}");
            }
        }
    }

    #[test]
    fn beta_function_at_negative_integers() {
        // L(-n, chi_{-4}) = E_n / 2: L(0) = 1/2, L(-2) = -1/2, L(-4) = 5/2
        let chi = [1.0, 0.0, -1.0, 0.0];
        for (s, expect) in [(0.0, 0.5), (-2.0, -0.5), (-4.0, 2.5)] {
            let v = periodic_series(c(s, 0.0), &chi, 1e-13).unwrap().0;
            assert!((v.re - expect).abs() < 1e-12, "{s}: {v}");
        }
    }

    #[test]
    fn double_double_zeta_prime_at_zero() {
        let (v, d) = hurwitz_zeta_dd(0.0, 1.0);
        assert!((v + 0.5).to_f64().abs() < 1e-30);
        // zeta'(0) = -ln(2 pi)/2
        let expect = DD::from_parts(-0.918_938_533_204_672_8, 3.878_294_158_067_241_4e-17);
        assert!((d - expect).to_f64().abs() < 1e-28, "{d:?}");
    }

    #[test]
    fn double_double_matches_binary64_at_two() {
        let (v, _) = hurwitz_zeta_dd(2.0, 1.0);
        let pi2 = DD::PI * DD::PI / 6.0;
        assert!((v - pi2).to_f64().abs() < 1e-30);
    }
}
