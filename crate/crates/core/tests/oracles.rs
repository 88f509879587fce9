//! Library results against independent reference computations written here
//! from scratch (no library kernels on the oracle side).

use std::f64::consts::PI;

use dirichlet_unique::beurling::{psi, BeurlingProduct, DEFAULT_TRUNC_N};
use dirichlet_unique::dirichlet::{DirichletCharacter, GeneralDirichletSeries};
use dirichlet_unique::special_functions::gamma_ratio_bound_check;
use num_complex::Complex64;

mod common;
use common::{gamma_bound_ratio, simpson};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn gamma_bound_matches_simpson() {
    for sigma in 2..=10 {
        let sigma = sigma as f64;
        let report = gamma_ratio_bound_check(sigma, 2.0 * (sigma + 2.0), 1e-10).unwrap();
        let ratio = gamma_bound_ratio(sigma, report.t_cut);
        assert!(
            ((report.bound_ratio - ratio) / ratio).abs() < 1e-6,
            "sigma {sigma}: {} vs {ratio}",
            report.bound_ratio
        );
    }
}

#[test]
fn zeta_two_by_direct_summation() {
    // sum_{n <= N} n^{-2} + 1/N - 1/(2N^2) + 1/(6N^3) has error below 1/(30 N^5)
    let n = 1000u32;
    let direct: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    let nf = n as f64;
    let oracle = direct + 1.0 / nf - 1.0 / (2.0 * nf * nf) + 1.0 / (6.0 * nf.powi(3));
    let v = GeneralDirichletSeries::riemann_zeta().evaluate(c(2.0, 0.0), 1e-13).unwrap();
    assert!((v.value.re - oracle).abs() < 1e-13);
    assert!(v.trunc_error <= 1e-13);
}

#[test]
fn leibniz_series_for_l_at_one() {
    // averaging consecutive partial sums of 1 - 1/3 + 1/5 - ... gains a factor N
    let n = 200_000usize;
    let mut partial = 0.0;
    let mut prev = 0.0;
    for k in 0..n {
        prev = partial;
        let term = 1.0 / (2 * k + 1) as f64;
        partial += if k % 2 == 0 { term } else { -term };
    }
    let oracle = 0.5 * (partial + prev);
    let chi = DirichletCharacter::kronecker(-4).unwrap();
    let v = GeneralDirichletSeries::dirichlet_l(chi).evaluate(c(1.0, 0.0), 1e-12).unwrap();
    assert!((v.value.re - oracle).abs() < 1e-10, "{} vs {oracle}", v.value.re);
    assert!((oracle - PI / 4.0).abs() < 1e-10);
}

#[test]
fn derivatives_against_richardson() {
    let zeta = GeneralDirichletSeries::riemann_zeta();
    let f = |s: f64| zeta.evaluate(c(s, 0.0), 1e-14).unwrap().value.re;
    for &s0 in &[-1.5, 0.0, 2.5, 4.0] {
        // two central differences combined to cancel the h^2 term
        let d = |h: f64| (f(s0 + h) - f(s0 - h)) / (2.0 * h);
        let (h1, h2) = (1e-2, 5e-3);
        let richardson = (4.0 * d(h2) - d(h1)) / 3.0;
        let lib = zeta.derivative(c(s0, 0.0), 1, 1e-12).unwrap().value.re;
        assert!((lib - richardson).abs() < 1e-8, "s = {s0}: {lib} vs {richardson}");
    }
    let lib = zeta.derivative(c(0.0, 0.0), 1, 1e-12).unwrap().value.re;
    assert!((lib + 0.5 * (2.0 * PI).ln()).abs() < 1e-11);
}

/// log of the partial product up to `n` terms plus the first-order tail
/// `x^2 sum_{k > n} lambda_k^{-2}`, whose error is below `x^4 sum lambda^{-4} / 2`.
fn partial_product(x: f64, lambdas: impl Iterator<Item = f64>, n: usize) -> (f64, f64) {
    let all: Vec<f64> = lambdas.take(n + 200_000).collect();
    let head: f64 = all[..n].iter().map(|l| (x * x / (l * l)).ln_1p()).sum();
    let tail2: f64 = all[n..].iter().rev().map(|l| 1.0 / (l * l)).sum();
    let last = all[all.len() - 1];
    // beyond the listed tail: sum_{l > last} l^{-2} ~ 1/last
    let tail = x * x * (tail2 + 1.0 / last);
    let err = x.powi(4) * (n as f64).powi(-3);
    (head + tail, err)
}

#[test]
fn products_against_partial_products() {
    let z = BeurlingProduct::new(GeneralDirichletSeries::riemann_zeta(), 1, DEFAULT_TRUNC_N).unwrap();
    let s = BeurlingProduct::new(GeneralDirichletSeries::shifted_zeta(), 1, DEFAULT_TRUNC_N).unwrap();
    for &x in &[0.5, 1.0, 2.0, 3.5] {
        let (pz, ez) = partial_product(x, (1..).map(|n| n as f64), 2000);
        let lz = z.log_f(x, 1e-12).unwrap().value;
        assert!((lz - pz).abs() < ez + 1e-6, "zeta x = {x}: {lz} vs {pz}");
        assert!((lz - ((PI * x).sinh() / (PI * x)).ln()).abs() < 1e-12);
        let (ps, es) = partial_product(x, (0..).map(|n| n as f64 + 0.5), 2000);
        let ls = s.log_f(x, 1e-12).unwrap().value;
        assert!((ls - ps).abs() < es + 1e-6, "shifted x = {x}: {ls} vs {ps}");
        assert!((ls - (PI * x).cosh().ln()).abs() < 1e-12);
    }
}

#[test]
fn mellin_transform_of_log_f_is_psi() {
    // int_0^inf log f(x) x^{-1-s} dx = psi(s) on 1 < Re s < 2 for the zeta product
    let z = BeurlingProduct::new(GeneralDirichletSeries::riemann_zeta(), 1, DEFAULT_TRUNC_N).unwrap();
    let s: f64 = 1.5;
    let big_x: f64 = 30.0;
    // x = e^u on [ln 1e-6, ln X]; below 1e-6 log f ~ zeta(2) x^2 contributes < 1e-6
    let (u0, u1) = ((1e-6f64).ln(), big_x.ln());
    let body = simpson(
        |u| {
            let x = u.exp();
            z.log_f(x, 1e-13).unwrap().value * x.powf(-s)
        },
        u0,
        u1,
        40_000,
    );
    let small = PI * PI / 6.0 * (1e-6f64).powf(2.0 - s) / (2.0 - s);
    // log f(x) = pi x - ln(2 pi x) + O(e^{-2 pi x}) beyond X
    let tail = PI * big_x.powf(1.0 - s) / (s - 1.0) - ((2.0 * PI * big_x).ln() / s + 1.0 / (s * s)) * big_x.powf(-s);
    let lhs = small + body + tail;
    let rhs = psi(&GeneralDirichletSeries::riemann_zeta(), 1, c(s, 0.0), 1e-12).unwrap().value.re;
    assert!((lhs - rhs).abs() < 1e-7, "{lhs} vs {rhs}");
}
