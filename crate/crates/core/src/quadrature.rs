//! Globally adaptive Gauss-Kronrod (7/15) quadrature by interval bisection.
//!
//! The integrand is complex valued; real integrands go through
//! [`integrate_real`]. The error estimate of each panel is the plain
//! Kronrod-minus-Gauss difference, which is pessimistic for smooth
//! integrands but never optimistic in the way the QUADPACK rescaling can be.

use num_complex::Complex64;
use thiserror::Error;

use crate::sum::{ComplexSum, NeumaierSum};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge: estimate {value} with error {error:e} after {intervals} intervals")]
    NotConverged {
        value: Complex64,
        error: f64,
        intervals: usize,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl QuadOptions {
    pub fn absolute(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            max_intervals: 4000,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gauss_kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Panel, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = ComplexSum::new();
    let mut gauss = ComplexSum::new();
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let pair = if x == 0.0 {
            let v = f(center);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(QuadratureError::NonFinite(center));
            }
            v
        } else {
            let (x1, x2) = (center - half * x, center + half * x);
            let (v1, v2) = (f(x1), f(x2));
            if !(v1.re.is_finite() && v1.im.is_finite()) {
                return Err(QuadratureError::NonFinite(x1));
            }
            if !(v2.re.is_finite() && v2.im.is_finite()) {
                return Err(QuadratureError::NonFinite(x2));
            }
            v1 + v2
        };
        kronrod.add(pair * w);
        if i % 2 == 1 {
            gauss.add(pair * WG[i / 2]);
        }
    }
    let k = kronrod.total() * half;
    let g = gauss.total() * half;
    Ok(Panel {
        a,
        b,
        value: k,
        error: (k - g).norm(),
    })
}

/// Integrates `f` over `[a, b]` until the summed panel error is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult, QuadratureError>
where
    F: FnMut(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(QuadratureError::InvalidInterval(a, b));
    }
    if a == b {
        return Ok(QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            intervals: 0,
        });
    }
    let mut panels = vec![gauss_kronrod(&mut f, a, b)?];
    loop {
        let value: ComplexSum = panels.iter().map(|p| p.value).collect();
        let value = value.total();
        let error: NeumaierSum = panels.iter().map(|p| p.error).collect();
        let error = error.total();
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            return Ok(QuadResult {
                value,
                error,
                intervals: panels.len(),
            });
        }
        if panels.len() >= opts.max_intervals {
            return Err(QuadratureError::NotConverged {
                value,
                error,
                intervals: panels.len(),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one panel");
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.a + panel.b);
        if mid <= panel.a || mid >= panel.b {
            // Bisection has hit floating-point resolution.
            return Err(QuadratureError::NotConverged {
                value,
                error,
                intervals: panels.len() + 1,
            });
        }
        panels.push(gauss_kronrod(&mut f, panel.a, mid)?);
        panels.push(gauss_kronrod(&mut f, mid, panel.b)?);
    }
}

pub fn integrate_real<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64), QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, opts)?;
    Ok((r.value.re, r.error))
}
