//! The product `f(x) = prod (1 + x^2 / lambda_n^{2d})^{a_n}` attached to a
//! series, its Mellin kernel `psi(s) = pi d / (s sin(pi s / 2d)) F(s)`, the
//! asymptotic law `f(x) ~ b x^a e^{m x^{1/d}}` and the check of its
//! exponentially small remainder.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::laurent_coefficient;
use crate::dd::DoubleDouble;
use crate::dirichlet::{hurwitz_zeta, hurwitz_zeta_dd, DirichletError, Family, GeneralDirichletSeries};
use crate::quadrature::{integrate, QuadOptions, QuadratureError};
use crate::special_functions::{sin_pi, ComplexPoint};
use crate::sum::NeumaierSum;

type DD = DoubleDouble;

pub const DEFAULT_TRUNC_N: usize = 16;
/// Terms are summed directly until `x^2 / lambda^{2d} <= 1/16`.
pub const TAYLOR_RATIO: f64 = 1.0 / 16.0;
pub const MAX_TAYLOR_TERMS: usize = 80;
/// psi is evaluated through the removable-singularity quotient this close to `-2nd`.
pub const TRIVIAL_ZERO_WINDOW: f64 = 0.01;
pub const PSI_POLE_EXCLUSION: f64 = 1e-10;
pub const PRINCIPAL_PART_RADIUS: f64 = 0.25;
/// Residuals below `log f - threshold` are flagged as cancellation-limited.
pub const BINARY64_CANCELLATION: f64 = 30.0;
pub const DOUBLE_DOUBLE_CANCELLATION: f64 = 65.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeurlingError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("psi has a pole at s = {0}")]
    PsiPole(Complex64),
    #[error("F({s0}) = {value:e} is not a trivial zero, so psi has a pole there")]
    NoTrivialZero { s0: f64, value: f64 },
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeurlingProduct {
    base: GeneralDirichletSeries,
    d: u32,
    trunc_n: usize,
    tail_bound_desc: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductValue {
    pub x: f64,
    pub value: f64,
    pub trunc_error: f64,
    /// Number of terms summed directly before the tail correction.
    pub terms: usize,
}

fn hurwitz_real(sigma: f64, a: f64, tol: f64) -> Result<(f64, f64), DirichletError> {
    let (v, e) = hurwitz_zeta(Complex64::new(sigma, 0.0), a, tol)?;
    Ok((v.re, e))
}

impl BeurlingProduct {
    pub fn new(base: GeneralDirichletSeries, d: u32, trunc_n: usize) -> Result<Self, BeurlingError> {
        if d == 0 || trunc_n == 0 {
            return Err(BeurlingError::Precondition(format!(
                "need d >= 1 and trunc_N >= 1, got d = {d}, trunc_N = {trunc_n}"
            )));
        }
        let tail_bound_desc = match base.family() {
            Family::Explicit => match base.tail_bound() {
                Some(t) => format!("x^2 times the declared remainder bound {t:?} at exponent 2d"),
                None => {
                    return Err(BeurlingError::Precondition(format!(
                        "series '{}' has no tail-bound descriptor",
                        base.name()
                    )))
                }
            },
            _ => "exact Hurwitz-zeta tail sums with alternating log1p series, remainder bounded by the first omitted term"
                .to_string(),
        };
        Ok(Self {
            base,
            d,
            trunc_n,
            tail_bound_desc,
        })
    }

    pub fn base(&self) -> &GeneralDirichletSeries {
        &self.base
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn trunc_n(&self) -> usize {
        self.trunc_n
    }

    pub fn tail_bound_desc(&self) -> &str {
        &self.tail_bound_desc
    }

    /// `log f(x) = sum a_n log(1 + x^2 / lambda_n^{2d})`; even in `x`.
    pub fn log_f(&self, x: f64, tol: f64) -> Result<ProductValue, BeurlingError> {
        if !x.is_finite() || !(tol > 0.0) {
            return Err(BeurlingError::Precondition(format!("need finite x and tol > 0, got x = {x}, tol = {tol}")));
        }
        if x == 0.0 {
            return Ok(ProductValue {
                x,
                value: 0.0,
                trunc_error: 0.0,
                terms: 0,
            });
        }
        let d = self.d as i32;
        let x2 = x * x;
        if let Family::Explicit = self.base.family() {
            let bound = x2 * self.base.unlisted_tail(2.0 * d as f64)?;
            if bound > tol {
                return Err(DirichletError::ToleranceUnreachable { tol, bound }.into());
            }
            let terms = self.base.terms();
            let sum: NeumaierSum = terms.iter().map(|t| t.a * (x / t.lambda.powi(d)).powi(2).ln_1p()).collect();
            return Ok(ProductValue {
                x,
                value: sum.total(),
                trunc_error: bound,
                terms: terms.len(),
            });
        }

        // first omitted exponent must satisfy lambda^{2d} >= x^2 / TAYLOR_RATIO
        let need = (x2 / TAYLOR_RATIO).powf(0.5 / d as f64);
        let shifted = matches!(self.base.family(), Family::ShiftedZeta);
        let n = if shifted {
            (need - 0.5).ceil().max(self.trunc_n as f64)
        } else {
            need.ceil().max(self.trunc_n as f64)
        };
        let cutoff = if shifted { n - 0.5 } else { n };
        let terms = self.base.terms_up_to(cutoff)?;
        let main: NeumaierSum = terms.iter().map(|t| t.a * (x / t.lambda.powi(d)).powi(2).ln_1p()).collect();

        // sum_{lambda > cutoff} a log1p(u) = sum_k (-1)^{k+1} x^{2k}/k T(2dk)
        let mut correction = NeumaierSum::new();
        let mut eval_error = 0.0;
        let mut x_pow = 1.0;
        let mut k = 0usize;
        loop {
            let next = (k + 1) as f64;
            let remainder = x_pow * x2 / next * self.base.tail_after(cutoff, 2.0 * d as f64 * next)? / (1.0 - TAYLOR_RATIO);
            if remainder + eval_error < tol / 2.0 {
                return Ok(ProductValue {
                    x,
                    value: main.total() + correction.total(),
                    trunc_error: remainder + eval_error,
                    terms: terms.len(),
                });
            }
            if k == MAX_TAYLOR_TERMS {
                return Err(DirichletError::ToleranceUnreachable {
                    tol,
                    bound: remainder + eval_error,
                }
                .into());
            }
            k += 1;
            x_pow *= x2;
            let weight = x_pow / k as f64;
            let sigma = 2.0 * d as f64 * k as f64;
            let (tail, err) = self.tail_sum(sigma, n, tol / (8.0 * MAX_TAYLOR_TERMS as f64 * weight))?;
            let term = weight * tail;
            correction.add(if k % 2 == 1 { term } else { -term });
            eval_error += weight * err;
        }
    }

    /// `sum_{lambda_n > cutoff} a_n lambda_n^{-sigma}` for built-in families,
    /// where the cutoff is `n` (integer families) or `n - 1/2` (shifted).
    fn tail_sum(&self, sigma: f64, n: f64, tol: f64) -> Result<(f64, f64), DirichletError> {
        let tol = tol.max(1e-300);
        match self.base.family() {
            Family::RiemannZeta => hurwitz_real(sigma, n + 1.0, tol),
            Family::ShiftedZeta => hurwitz_real(sigma, n + 0.5, tol),
            Family::DirichletL { character } => l_tail(character.values(), character.modulus(), sigma, n, tol),
            Family::DedekindQuadratic { character, .. } => {
                // sum_{dm > N} chi(d) d^{-s} m^{-s}
                let big_n = n as u64;
                let mut acc = NeumaierSum::new();
                let mut err = 0.0;
                let share = tol / (big_n as f64 + 2.0);
                for dd in 1..=big_n {
                    let c = character.at(dd);
                    if c == 0.0 {
                        continue;
                    }
                    let scale = (dd as f64).powf(-sigma);
                    let (z, e) = hurwitz_real(sigma, (big_n / dd) as f64 + 1.0, share / scale.max(1e-300))?;
                    acc.add(c * scale * z);
                    err += scale * e;
                }
                let (zeta, ez) = hurwitz_real(sigma, 1.0, share)?;
                let (lt, el) = l_tail(character.values(), character.modulus(), sigma, n, share)?;
                acc.add(zeta * lt);
                err += zeta.abs() * el + lt.abs() * ez;
                Ok((acc.total(), err))
            }
            Family::Explicit => unreachable!("explicit products do not use tail sums"),
        }
    }

    /// `log f(x)` in double-double for `riemann_zeta` and `shifted_zeta` at `d = 1`.
    pub fn log_f_precise(&self, x: f64) -> Option<DD> {
        let shift = match (self.base.family(), self.d) {
            (Family::RiemannZeta, 1) => 1.0,
            (Family::ShiftedZeta, 1) => 0.5,
            _ => return None,
        };
        let x2 = DD::new(x) * DD::new(x);
        if x == 0.0 {
            return Some(DD::ZERO);
        }
        // lambda_k = k - 1 + shift for k >= 1; stop once lambda >= 8|x|
        let count = ((8.0 * x.abs()) - shift + 1.0).ceil().max(self.trunc_n as f64) as usize;
        let mut sum = DD::ZERO;
        for k in 0..count {
            let lambda = DD::new(k as f64 + shift);
            sum += (x2 / (lambda * lambda)).ln_1p();
        }
        let a = count as f64 + shift;
        let mut x_pow = DD::ONE;
        for k in 1..=MAX_TAYLOR_TERMS {
            x_pow *= x2;
            let (tail, _) = hurwitz_zeta_dd(2.0 * k as f64, a);
            let term = x_pow * tail / k as f64;
            if k % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
            if term.hi().abs() < 1e-36 * sum.hi().abs() {
                break;
            }
        }
        Some(sum)
    }
}

/// `sum_{n > N} chi(n) n^{-sigma}` through Hurwitz sums per residue class.
fn l_tail(values: &[f64], q: u64, sigma: f64, n: f64, tol: f64) -> Result<(f64, f64), DirichletError> {
    let big_n = n as u64;
    let qf = q as f64;
    let scale = qf.powf(-sigma);
    let mut acc = NeumaierSum::new();
    let mut err = 0.0;
    for r in 1..=q {
        let c = values[(r % q) as usize];
        if c == 0.0 {
            continue;
        }
        let m0 = if r > big_n { 0 } else { (big_n - r) / q + 1 };
        let (z, e) = hurwitz_real(sigma, m0 as f64 + r as f64 / qf, tol / (qf * scale.max(1e-300)))?;
        acc.add(c * scale * z);
        err += c.abs() * scale * e;
    }
    Ok((acc.total(), err))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub s: ComplexPoint,
    pub value: ComplexPoint,
}

/// `theta / sin(theta)` without cancellation near 0.
fn theta_over_sin(theta: Complex64) -> Complex64 {
    if theta.norm() < 1e-4 {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + t2 * t2 * (7.0 / 360.0)
    } else {
        theta / theta.sin()
    }
}

/// `psi(s) = pi d / (s sin(pi s / 2d)) F(s)` on `Re(s) < 2d`.
pub fn psi(series: &GeneralDirichletSeries, d: u32, s: ComplexPoint, tol: f64) -> Result<PsiValue, BeurlingError> {
    if d == 0 || !(tol > 0.0) {
        return Err(BeurlingError::Precondition("need d >= 1 and tol > 0".into()));
    }
    let df = d as f64;
    if !(s.re < 2.0 * df) {
        return Err(BeurlingError::Precondition(format!("psi needs Re(s) < 2d = {}, got {s}", 2 * d)));
    }
    if s.norm() <= PSI_POLE_EXCLUSION || (s - 1.0).norm() <= PSI_POLE_EXCLUSION {
        return Err(BeurlingError::PsiPole(s));
    }
    let n = (-s.re / (2.0 * df)).round();
    let s0 = -2.0 * n * df;
    if n >= 1.0 && (s - s0).norm() <= TRIVIAL_ZERO_WINDOW {
        let at_zero = series.evaluate(Complex64::new(s0, 0.0), tol)?.value.norm();
        if at_zero > tol.max(1e-12) {
            return Err(BeurlingError::NoTrivialZero { s0, value: at_zero });
        }
        let t = s - s0;
        let sign = if n as i64 % 2 == 0 { 1.0 } else { -1.0 };
        let sine_quotient = theta_over_sin(t * (PI / (2.0 * df))) * (sign * 2.0 * df / PI);
        let front = PI * df / s * sine_quotient;
        let inner_tol = tol / front.norm().max(1e-300);
        // (F(s) - F(s0)) / (s - s0) by Cauchy's formula on a circle around s0
        let quotient = laurent_coefficient(
            |z| series.evaluate(z, inner_tol / 4.0).map(|v| v.value / (z - s)),
            Complex64::new(s0, 0.0),
            PRINCIPAL_PART_RADIUS,
            0,
            inner_tol,
        )
        .map_err(DirichletError::from)?;
        return Ok(PsiValue {
            s,
            value: front * quotient.value,
        });
    }
    let front = PI * df / (s * sin_pi(s / (2.0 * df)));
    let g = series.evaluate(s, tol / front.norm().max(1e-300))?.value;
    Ok(PsiValue { s, value: front * g })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalParts {
    /// Coefficient of `s^{-2}` at 0; expected `2 d^2 F(0)`.
    pub double_pole_at_zero: f64,
    /// Coefficient of `s^{-1}` at 0.
    pub simple_pole_at_zero: f64,
    /// Residue at 1; expected `pi rho d / sin(pi / 2d)`.
    pub residue_at_one: f64,
}

/// Laurent coefficients of psi at its poles 0 and 1 from contour integrals.
pub fn psi_principal_parts(series: &GeneralDirichletSeries, d: u32, tol: f64) -> Result<PrincipalParts, BeurlingError> {
    let r = PRINCIPAL_PART_RADIUS;
    let coeff = |center: f64, power: i32| -> Result<Complex64, BeurlingError> {
        let eval_tol = tol * r.powi(power) / 4.0;
        let mut failure = None;
        let est = laurent_coefficient(
            |z| {
                psi(series, d, z, eval_tol).map(|p| p.value).map_err(|e| {
                    failure = Some(e.clone());
                    DirichletError::Precondition(e.to_string())
                })
            },
            Complex64::new(center, 0.0),
            r,
            power,
            tol,
        );
        match (est, failure) {
            (Ok(e), _) => Ok(e.value),
            (Err(_), Some(f)) => Err(f),
            (Err(e), None) => Err(DirichletError::from(e).into()),
        }
    };
    Ok(PrincipalParts {
        double_pole_at_zero: coeff(0.0, -2)?.re,
        simple_pole_at_zero: coeff(0.0, -1)?.re,
        residue_at_one: coeff(1.0, -1)?.re,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MellinCheck {
    pub s: ComplexPoint,
    pub lhs: ComplexPoint,
    pub rhs: ComplexPoint,
    pub abs_diff: f64,
    pub quad_error: f64,
}

/// `log1p(y) / y` with the limit 1 at `y = 0`.
fn log1p_ratio(y: f64) -> f64 {
    if y < 1e-8 {
        1.0 - y / 2.0
    } else {
        y.ln_1p() / y
    }
}

/// `int_0^U log1p(e^{-2u}) e^{c u} du` plus the analytic tail beyond `U`,
/// for `Re(c) < 2`.
fn half_line_integral(c: Complex64, quad_tol: f64) -> Result<(Complex64, f64), BeurlingError> {
    let decay = 2.0 - c.re;
    let upper = (40.0 / decay).max(10.0);
    let r = integrate(
        |u| {
            let y = (-2.0 * u).exp();
            ((c - 2.0) * u).exp() * log1p_ratio(y)
        },
        0.0,
        upper,
        QuadOptions::absolute(quad_tol).with_max_intervals(20_000),
    )?;
    // int_U^inf e^{-2ku + cu} du = e^{-(2k - c) U} / (2k - c)
    let mut tail = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let rate = 2.0 * k as f64 - c;
        let term = (-rate * upper).exp() / rate / k as f64;
        tail += if k % 2 == 1 { term } else { -term };
        last = term.norm();
        if last < quad_tol * 1e-6 {
            break;
        }
    }
    Ok((r.value + tail, r.error + last))
}

/// `int_0^inf log(1 + x^2) x^{-1-s} dx` against `pi / (s sin(pi s / 2))`.
pub fn mellin_identity_check(s: ComplexPoint, quad_tol: f64) -> Result<MellinCheck, BeurlingError> {
    if !(s.re > 0.0 && s.re < 2.0) || !s.im.is_finite() {
        return Err(BeurlingError::Precondition(format!("need 0 < Re(s) < 2, got {s}")));
    }
    if !(quad_tol > 0.0) {
        return Err(BeurlingError::Precondition("quad_tol must be > 0".into()));
    }
    // x < 1: x = e^{-u};  x > 1: x = e^{u}, log(1 + e^{2u}) = 2u + log1p(e^{-2u})
    let (inner, e0) = half_line_integral(s, quad_tol / 4.0)?;
    let (outer, e1) = half_line_integral(-s, quad_tol / 4.0)?;
    let lhs = inner + outer + 2.0 / (s * s);
    let rhs = PI / (s * sin_pi(s / 2.0));
    Ok(MellinCheck {
        s,
        lhs,
        rhs,
        abs_diff: (lhs - rhs).norm(),
        quad_error: e0 + e1,
    })
}

/// Which inverse-Mellin reading of the law is used to build the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawReading {
    /// `log f ~ (m/d) x^{1/d} + (a/d) log x + (log b)/d`, from the residues of
    /// `psi(s) x^{s/d} / d`; numerically confirmed at d = 2.
    Residue,
    /// `log f ~ m x^{1/d} + a log x + log b` taken literally.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLaw {
    pub a: f64,
    pub b: f64,
    pub m: f64,
    pub d: u32,
    /// `d alpha^{1/d} - m`: the gap between the conductor scale and the growth rate.
    pub delta_margin: f64,
    pub g0: f64,
    pub g1: f64,
    pub rho: f64,
    pub alpha: f64,
}

impl AsymptoticLaw {
    pub fn from_parts(g0: f64, g1: f64, rho: f64, d: u32, alpha: f64) -> Self {
        let df = d as f64;
        let m = PI * rho * df / (PI / (2.0 * df)).sin();
        Self {
            a: 2.0 * df * g0,
            b: (2.0 * df * df * g1).exp(),
            m,
            d,
            delta_margin: df * alpha.powf(1.0 / df) - m,
            g0,
            g1,
            rho,
            alpha,
        }
    }

    /// Exponential rate of `log f` in the variable `x^{1/d}`.
    pub fn rate(&self, reading: LawReading) -> f64 {
        match reading {
            LawReading::Residue => self.m / self.d as f64,
            LawReading::Literal => self.m,
        }
    }

    pub fn log_model(&self, x: f64, reading: LawReading) -> f64 {
        let df = self.d as f64;
        let root = x.powf(1.0 / df);
        let scale = match reading {
            LawReading::Residue => df,
            LawReading::Literal => 1.0,
        };
        (self.m * root + self.a * x.ln() + self.b.ln()) / scale
    }
}

/// `a = 2 d F(0)`, `b = exp(2 d^2 F'(0))`, `m = pi rho d / sin(pi / 2d)`.
/// `alpha` defaults to the family's conductor.
pub fn asymptotic_constants(
    series: &GeneralDirichletSeries,
    d: u32,
    alpha: Option<f64>,
    tol: f64,
) -> Result<AsymptoticLaw, BeurlingError> {
    if d == 0 {
        return Err(BeurlingError::Precondition("d must be >= 1".into()));
    }
    let alpha = match alpha.or(series.known_invariants().map(|k| k.alpha)) {
        Some(a) if a > 0.0 => a,
        _ => {
            return Err(BeurlingError::Precondition(
                "a positive conductor alpha is required for this series".into(),
            ))
        }
    };
    let zero = Complex64::new(0.0, 0.0);
    let g0 = series.evaluate(zero, tol)?.value.re;
    let g1 = series.derivative(zero, 1, tol)?.value.re;
    let rho = series.residue_at_pole(tol)?;
    Ok(AsymptoticLaw::from_parts(g0, g1, rho, d, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Binary64,
    DoubleDouble,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRecord {
    pub x: f64,
    pub log_f: f64,
    pub log_model: f64,
    /// `log |f(x) - model(x)|`; `None` when the two agree to every digit.
    pub residual_log: Option<f64>,
    pub cancellation_flag: bool,
    pub precision: Precision,
}

/// Double-double law constants for zeta-type bases at d = 1.
fn precise_law(product: &BeurlingProduct) -> Option<(DD, DD)> {
    match (product.base.family(), product.d) {
        (Family::RiemannZeta, 1) => {
            let (g0, g1) = hurwitz_zeta_dd(0.0, 1.0);
            Some((g0, g1))
        }
        // (2^s - 1) zeta(s): value 0 and derivative ln2 * zeta(0) at 0
        (Family::ShiftedZeta, 1) => Some((DD::ZERO, DD::LN_2 * -0.5)),
        _ => None,
    }
}

/// `ln |e^delta - 1|` for a double-double `delta`.
fn ln_abs_expm1(delta: DD) -> f64 {
    let magnitude = if delta.hi().abs() < 1e-2 {
        let mut term = delta;
        let mut sum = delta;
        for k in 2..30 {
            term = term * delta / k as f64;
            sum += term;
            if term.hi().abs() < 1e-34 * sum.hi().abs() {
                break;
            }
        }
        sum
    } else {
        delta.exp() - 1.0
    };
    magnitude.to_f64().abs().ln()
}

/// Residuals `log |f(x) - b x^a e^{m x^{1/d}}|` in log space. Bases whose
/// law constants are available in double-double (zeta-type, d = 1) use that
/// path when the supplied law matches them.
pub fn decay_verification(
    product: &BeurlingProduct,
    law: &AsymptoticLaw,
    x_grid: &[f64],
    reading: LawReading,
) -> Result<Vec<DecayRecord>, BeurlingError> {
    if x_grid.is_empty() || x_grid.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
        return Err(BeurlingError::Precondition("x grid must be non-empty with every x >= 1".into()));
    }
    if x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BeurlingError::Precondition("x grid must be strictly increasing".into()));
    }
    if law.d != product.d {
        return Err(BeurlingError::Precondition(format!(
            "law degree {} differs from product degree {}",
            law.d, product.d
        )));
    }
    let precise = precise_law(product).filter(|(g0, g1)| {
        let d = law.d as f64;
        (law.a - 2.0 * d * g0.to_f64()).abs() <= 1e-10
            && (law.b.ln() - 2.0 * d * d * g1.to_f64()).abs() <= 1e-10
            && (law.m - PI).abs() <= 1e-10
    });
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let model = law.log_model(x, reading);
        let record = match (precise, product.log_f_precise(x)) {
            (Some((g0, g1)), Some(log_f)) => {
                // d = 1: both readings coincide
                let xd = DD::new(x);
                let model_dd = DD::PI * xd + g0 * 2.0 * xd.ln() + g1 * 2.0;
                let delta = model_dd - log_f;
                let lf = log_f.to_f64();
                let residual = if delta.hi() == 0.0 {
                    None
                } else {
                    Some(lf + ln_abs_expm1(delta))
                };
                DecayRecord {
                    x,
                    log_f: lf,
                    log_model: model_dd.to_f64(),
                    residual_log: residual,
                    cancellation_flag: residual.is_none_or(|r| r < lf - DOUBLE_DOUBLE_CANCELLATION),
                    precision: Precision::DoubleDouble,
                }
            }
            _ => {
                let lf = product.log_f(x, 1e-14 * (1.0 + model.abs()))?.value;
                let delta = model - lf;
                let residual = if delta == 0.0 {
                    None
                } else {
                    Some(lf + delta.exp_m1().abs().ln())
                };
                DecayRecord {
                    x,
                    log_f: lf,
                    log_model: model,
                    residual_log: residual,
                    cancellation_flag: residual.is_none_or(|r| r < lf - BINARY64_CANCELLATION),
                    precision: Precision::Binary64,
                }
            }
        };
        out.push(record);
    }
    Ok(out)
}

/// Slopes of `residual_log` against `x^{1/d}` between consecutive records.
pub fn residual_slopes(records: &[DecayRecord], d: u32) -> Vec<Option<f64>> {
    records
        .windows(2)
        .map(|w| {
            let (r0, r1) = (w[0].residual_log?, w[1].residual_log?);
            let inv = 1.0 / d as f64;
            Some((r1 - r0) / (w[1].x.powf(inv) - w[0].x.powf(inv)))
        })
        .collect()
}
