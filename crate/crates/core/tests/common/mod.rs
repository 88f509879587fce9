//! Reference computations shared by the integration targets. Nothing here
//! calls into the library.

use std::f64::consts::PI;

use num_complex::Complex64;

/// ln Gamma(z) by shifting to Re z >= 20 and using five Stirling terms.
pub fn oracle_ln_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `int |Gamma(sigma + 2 + it)| dt` over `|t| <= t_cut`, divided by `sigma^3 Gamma(sigma)`.
pub fn gamma_bound_ratio(sigma: f64, t_cut: f64) -> f64 {
    let x = sigma + 2.0;
    let integral = 2.0 * simpson(|t| oracle_ln_gamma(Complex64::new(x, t)).re.exp(), 0.0, t_cut, 20_000);
    let scale = (3.0 * sigma.ln() + oracle_ln_gamma(Complex64::new(sigma, 0.0)).re).exp();
    integral / scale
}
