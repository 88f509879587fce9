//! General Dirichlet series `F(s) = sum a_n lambda_n^{-s}`.
//!
//! Four built-in families carry an analytic continuation (Riemann zeta,
//! `(2^s - 1) zeta(s)`, Dirichlet L-functions of real characters, Dedekind
//! zeta functions of quadratic fields). Explicit series are finite term
//! lists plus a bound on the unlisted remainder, and are only evaluated in
//! their half-plane of absolute convergence `Re(s) > 1`.

mod characters;
mod hurwitz;
mod schema;

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use characters::{is_fundamental_discriminant, kronecker_symbol, DirichletCharacter};
pub use hurwitz::{hurwitz_zeta, hurwitz_zeta_dd, periodic_series, EM_ORDER};
pub use schema::{parse_series, read_series, SchemaError, SeriesFile, SeriesLoadError, TailBoundFile};

use crate::contour::{laurent_coefficient, ContourError};
use crate::special_functions::ComplexPoint;
use crate::sum::{ComplexSum, NeumaierSum};

/// Evaluation is refused within this distance of `s = 1`.
pub const POLE_EXCLUSION: f64 = 1e-12;
/// Entire L-functions are evaluated by a Cauchy mean within this distance of `s = 1`.
pub const CANCELLATION_RADIUS: f64 = 1e-3;
/// Cauchy contour radius for derivatives.
pub const DERIVATIVE_RADIUS: f64 = 0.5;
/// Contour radius around `s = 1` for residues.
pub const RESIDUE_RADIUS: f64 = 0.25;
pub const MAX_DERIVATIVE_ORDER: usize = 4;
/// Upper limit on generated coefficient lists.
pub const MAX_GENERATED_TERMS: f64 = 1.0e7;
/// Coefficients inspected by the class-B positivity checks of built-in families.
pub const CLASS_B_COEFFICIENT_CUTOFF: f64 = 1000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DirichletError {
    #[error("s = {0} is within {POLE_EXCLUSION:e} of the pole at s = 1")]
    PoleProximity(Complex64),
    #[error("no evaluation available at s = {0}")]
    UnsupportedRegion(Complex64),
    #[error("series '{0}' has no analytic continuation")]
    NoContinuation(String),
    #[error("contour of radius {radius} around {center} meets the pole at s = 1")]
    ContourHitsPole { center: Complex64, radius: f64 },
    #[error("tolerance {tol:e} unreachable: truncation bound {bound:e}")]
    ToleranceUnreachable { tol: f64, bound: f64 },
    #[error("contour integral not converged: last change {change:e} with {nodes} nodes")]
    ContourNotConverged { change: f64, nodes: usize },
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl From<ContourError<DirichletError>> for DirichletError {
    fn from(e: ContourError<DirichletError>) -> Self {
        match e {
            ContourError::Eval(inner) => inner,
            ContourError::NotConverged { change, nodes, .. } => DirichletError::ContourNotConverged { change, nodes },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub lambda: f64,
    pub a: f64,
}

impl Term {
    pub fn new(lambda: f64, a: f64) -> Self {
        Self { lambda, a }
    }
}

/// Bound on the terms an explicit series does not list. `from` is the
/// exponent after which unlisted terms start (default: the last listed one).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailBound {
    /// Sum of `|a_n|` over unlisted terms with `lambda_n <= x` is at most `density * x`.
    IntegralTest { density: f64, from: Option<f64> },
    /// The k-th unlisted term (k >= 1) has `|a| <= coeff_bound` and
    /// `lambda >= from * ratio^k`.
    Geometric { coeff_bound: f64, ratio: f64, from: Option<f64> },
}

impl TailBound {
    fn validate(&self) -> Result<(), DirichletError> {
        let bad = |m: &str| Err(DirichletError::InvalidSeries(m.to_string()));
        let from = match *self {
            TailBound::IntegralTest { density, from } => {
                if !(density >= 0.0 && density.is_finite()) {
                    return bad("integral_test density must be finite and >= 0");
                }
                from
            }
            TailBound::Geometric { coeff_bound, ratio, from } => {
                if !(coeff_bound >= 0.0 && coeff_bound.is_finite()) {
                    return bad("geometric coeff_bound must be finite and >= 0");
                }
                if !(ratio > 1.0 && ratio.is_finite()) {
                    return bad("geometric ratio must be finite and > 1");
                }
                from
            }
        };
        match from {
            Some(f) if !(f > 0.0 && f.is_finite()) => bad("tail bound 'from' must be finite and > 0"),
            _ => Ok(()),
        }
    }

    fn from(&self) -> Option<f64> {
        match *self {
            TailBound::IntegralTest { from, .. } | TailBound::Geometric { from, .. } => from,
        }
    }

    /// Bound on `sum |a| lambda^{-sigma}` over unlisted terms with
    /// `lambda > cutoff`, where unlisted terms start after `start`.
    fn remainder(&self, start: f64, cutoff: f64, sigma: f64) -> f64 {
        let cut = cutoff.max(start);
        match *self {
            TailBound::IntegralTest { density, .. } => {
                if sigma <= 1.0 {
                    return f64::INFINITY;
                }
                density * sigma / (sigma - 1.0) * cut.powf(1.0 - sigma)
            }
            TailBound::Geometric { coeff_bound, ratio, .. } => {
                if sigma <= 0.0 {
                    return f64::INFINITY;
                }
                // k-th unlisted term sits at or beyond start * ratio^k; those
                // possibly below `cut` are bounded by cut^{-sigma}.
                let below = if cut > start {
                    ((cut / start).ln() / ratio.ln()).floor()
                } else {
                    0.0
                };
                let first = start * ratio.powf(below + 1.0);
                let q = ratio.powf(-sigma);
                coeff_bound * (below * cut.powf(-sigma) + first.powf(-sigma) / (1.0 - q))
            }
        }
    }

    /// Linear coefficient-mass density valid for `x >= start`.
    fn mass_density(&self, start: f64) -> f64 {
        match *self {
            TailBound::IntegralTest { density, .. } => density,
            // #{k : start ratio^k <= x} <= ln(x/start)/ln(ratio) <= x / (e start ln ratio)
            TailBound::Geometric { coeff_bound, ratio, .. } => coeff_bound / (std::f64::consts::E * start * ratio.ln()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    RiemannZeta,
    ShiftedZeta,
    DirichletL { character: DirichletCharacter },
    DedekindQuadratic { discriminant: i64, character: DirichletCharacter },
    Explicit,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::RiemannZeta => "riemann_zeta",
            Family::ShiftedZeta => "shifted_zeta",
            Family::DirichletL { .. } => "dirichlet_L",
            Family::DedekindQuadratic { .. } => "dedekind_quadratic",
            Family::Explicit => "explicit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: ComplexPoint,
    pub trunc_error: f64,
}

/// Degree and conductor known from the functional equation of a built-in family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownInvariants {
    pub degree: u32,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub name: String,
    pub passed: bool,
    /// Offending value for failures, the measured quantity otherwise.
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassBReport {
    pub axioms_checked: Vec<AxiomCheck>,
    pub rho: Option<f64>,
    pub trivial_zero_residuals: Vec<f64>,
}

impl ClassBReport {
    pub fn all_passed(&self) -> bool {
        self.axioms_checked.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.axioms_checked.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralDirichletSeries {
    name: String,
    family: Family,
    terms: Vec<Term>,
    tail: Option<TailBound>,
}

/// `e^z - 1` without cancellation near `z = 0`.
pub(crate) fn complex_expm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

fn check_tol(tol: f64) -> Result<(), DirichletError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(DirichletError::Precondition(format!("tolerance must be finite and > 0, got {tol}")))
    }
}

/// Smallest divisor `f` of the modulus such that the character is
/// `f`-periodic on integers coprime to the modulus.
fn conductor(chi: &DirichletCharacter) -> u64 {
    let q = chi.modulus();
    let coprime: Vec<u64> = (1..=q).filter(|&n| characters::gcd(n, q) == 1).collect();
    (1..=q)
        .filter(|f| q.is_multiple_of(*f))
        .find(|&f| {
            coprime
                .iter()
                .all(|&n| coprime.iter().filter(|&&m| m % f == n % f).all(|&m| chi.at(m) == chi.at(n)))
        })
        .unwrap_or(q)
}

impl GeneralDirichletSeries {
    pub fn riemann_zeta() -> Self {
        Self::builtin("riemann_zeta", Family::RiemannZeta)
    }

    pub fn shifted_zeta() -> Self {
        Self::builtin("shifted_zeta", Family::ShiftedZeta)
    }

    pub fn dirichlet_l(character: DirichletCharacter) -> Self {
        let name = format!("dirichlet_L(mod {})", character.modulus());
        Self::builtin(&name, Family::DirichletL { character })
    }

    pub fn dedekind_quadratic(discriminant: i64) -> Result<Self, DirichletError> {
        let character = DirichletCharacter::kronecker(discriminant)?;
        Ok(Self::builtin(
            &format!("dedekind_quadratic({discriminant})"),
            Family::DedekindQuadratic { discriminant, character },
        ))
    }

    fn builtin(name: &str, family: Family) -> Self {
        Self {
            name: name.to_string(),
            family,
            terms: Vec::new(),
            tail: None,
        }
    }

    /// Explicit term list with a bound on the unlisted remainder.
    pub fn explicit(name: impl Into<String>, terms: Vec<Term>, tail: TailBound) -> Result<Self, DirichletError> {
        for (i, t) in terms.iter().enumerate() {
            if !(t.lambda > 0.0 && t.lambda.is_finite()) {
                return Err(DirichletError::InvalidSeries(format!(
                    "term {i}: lambda must be finite and > 0, got {}",
                    t.lambda
                )));
            }
            if !t.a.is_finite() {
                return Err(DirichletError::InvalidSeries(format!("term {i}: coefficient must be finite")));
            }
            if i > 0 && t.lambda <= terms[i - 1].lambda {
                return Err(DirichletError::InvalidSeries(format!(
                    "term {i}: lambda must be strictly increasing ({} after {})",
                    t.lambda,
                    terms[i - 1].lambda
                )));
            }
        }
        tail.validate()?;
        match (tail.from(), terms.last()) {
            (None, None) => {
                return Err(DirichletError::InvalidSeries(
                    "an empty term list needs a tail bound with an explicit 'from'".into(),
                ))
            }
            (Some(f), Some(last)) if f < last.lambda => {
                return Err(DirichletError::InvalidSeries(format!(
                    "tail bound 'from' = {f} lies before the last listed lambda {}",
                    last.lambda
                )))
            }
            _ => {}
        }
        Ok(Self {
            name: name.into(),
            family: Family::Explicit,
            terms,
            tail: Some(tail),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Listed terms (empty for built-in families, see [`Self::terms_up_to`]).
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn tail_bound(&self) -> Option<&TailBound> {
        self.tail.as_ref()
    }

    pub fn has_continuation(&self) -> bool {
        !matches!(self.family, Family::Explicit)
    }

    /// Whether `s = 1` is a pole (false for explicit series and non-principal L).
    pub fn has_pole(&self) -> bool {
        match &self.family {
            Family::Explicit => false,
            Family::DirichletL { character } => character.is_principal(),
            _ => true,
        }
    }

    pub fn known_invariants(&self) -> Option<KnownInvariants> {
        let two_pi = 2.0 * PI;
        match &self.family {
            Family::RiemannZeta | Family::ShiftedZeta => Some(KnownInvariants { degree: 1, alpha: two_pi }),
            Family::DirichletL { character } => Some(KnownInvariants {
                degree: 1,
                alpha: two_pi / conductor(character) as f64,
            }),
            Family::DedekindQuadratic { discriminant, .. } => Some(KnownInvariants {
                degree: 2,
                alpha: two_pi * two_pi / discriminant.unsigned_abs() as f64,
            }),
            Family::Explicit => None,
        }
    }

    /// Start of the unlisted region of an explicit series.
    fn tail_start(&self) -> f64 {
        let last = self.terms.last().map(|t| t.lambda);
        match (self.tail.and_then(|t| t.from()), last) {
            (Some(f), _) => f,
            (None, Some(l)) => l,
            (None, None) => unreachable!("validated at construction"),
        }
    }

    /// All terms with `lambda <= cutoff`, zero coefficients omitted.
    pub fn terms_up_to(&self, cutoff: f64) -> Result<Vec<Term>, DirichletError> {
        if !(cutoff >= 0.0) || cutoff > MAX_GENERATED_TERMS {
            return Err(DirichletError::Precondition(format!(
                "cutoff must lie in [0, {MAX_GENERATED_TERMS:e}], got {cutoff}"
            )));
        }
        let n_max = cutoff.floor() as u64;
        Ok(match &self.family {
            Family::Explicit => self.terms.iter().copied().filter(|t| t.lambda <= cutoff).collect(),
            Family::RiemannZeta => (1..=n_max).map(|n| Term::new(n as f64, 1.0)).collect(),
            Family::ShiftedZeta => (0..)
                .map(|k| k as f64 + 0.5)
                .take_while(|&l| l <= cutoff)
                .map(|l| Term::new(l, 1.0))
                .collect(),
            Family::DirichletL { character } => (1..=n_max)
                .map(|n| Term::new(n as f64, character.at(n)))
                .filter(|t| t.a != 0.0)
                .collect(),
            Family::DedekindQuadratic { character, .. } => {
                let n = n_max as usize;
                let mut a = vec![0.0; n + 1];
                for d in 1..=n {
                    let c = character.at(d as u64);
                    if c != 0.0 {
                        for m in (d..=n).step_by(d) {
                            a[m] += c;
                        }
                    }
                }
                (1..=n)
                    .filter(|&k| a[k] != 0.0)
                    .map(|k| Term::new(k as f64, a[k]))
                    .collect()
            }
        })
    }

    /// Certified bound on `sum_{lambda_n > cutoff} |a_n| lambda_n^{-sigma}`.
    pub fn tail_after(&self, cutoff: f64, sigma: f64) -> Result<f64, DirichletError> {
        if !(cutoff > 0.0) {
            return Err(DirichletError::Precondition(format!("cutoff must be > 0, got {cutoff}")));
        }
        let integral = |density: f64| {
            if sigma <= 1.0 {
                f64::INFINITY
            } else {
                density * sigma / (sigma - 1.0) * cutoff.powf(1.0 - sigma)
            }
        };
        Ok(match &self.family {
            Family::RiemannZeta => integral(1.0),
            // #{k : k + 1/2 <= x} <= 2x
            Family::ShiftedZeta => integral(2.0),
            Family::DirichletL { character } => {
                integral(character.values().iter().fold(0.0f64, |m, v| m.max(v.abs())))
            }
            Family::DedekindQuadratic { .. } => {
                // |a_n| <= tau(n), sum_{n<=x} tau(n) <= x ln x + x
                if sigma <= 1.0 {
                    f64::INFINITY
                } else {
                    let c = cutoff.max(1.0);
                    let sm1 = sigma - 1.0;
                    sigma * c.powf(1.0 - sigma) * (c.ln() / sm1 + 1.0 / (sm1 * sm1) + 1.0 / sm1)
                }
            }
            Family::Explicit => {
                let listed: NeumaierSum = self
                    .terms
                    .iter()
                    .filter(|t| t.lambda > cutoff)
                    .map(|t| t.a.abs() * t.lambda.powf(-sigma))
                    .collect();
                let tail = self.tail.expect("explicit series carry a tail bound");
                listed.total() + tail.remainder(self.tail_start(), cutoff, sigma)
            }
        })
    }

    /// Bound on the unlisted remainder of an explicit series at exponent `sigma`.
    pub fn unlisted_tail(&self, sigma: f64) -> Result<f64, DirichletError> {
        match self.tail {
            Some(t) => Ok(t.remainder(self.tail_start(), self.tail_start(), sigma)),
            None => Err(DirichletError::Precondition(format!(
                "series '{}' has no tail-bound descriptor",
                self.name
            ))),
        }
    }

    /// `sum_{lambda_n <= cutoff} a_n lambda_n^{-s}`.
    pub fn partial_sum(&self, s: Complex64, cutoff: f64) -> Result<Complex64, DirichletError> {
        let acc: ComplexSum = self
            .terms_up_to(cutoff)?
            .iter()
            .map(|t| (-s * t.lambda.ln()).exp() * t.a)
            .collect();
        Ok(acc.total())
    }

    pub fn evaluate(&self, s: ComplexPoint, tol: f64) -> Result<SeriesValue, DirichletError> {
        check_tol(tol)?;
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(DirichletError::UnsupportedRegion(s));
        }
        let (value, trunc_error) = match &self.family {
            Family::Explicit => {
                if s.re <= 1.0 {
                    return Err(DirichletError::UnsupportedRegion(s));
                }
                let bound = self.unlisted_tail(s.re)?;
                if bound > tol {
                    return Err(DirichletError::ToleranceUnreachable { tol, bound });
                }
                let acc: ComplexSum = self.terms.iter().map(|t| (-s * t.lambda.ln()).exp() * t.a).collect();
                (acc.total(), bound)
            }
            _ if !self.has_pole() && (s - 1.0).norm() < CANCELLATION_RADIUS => {
                // the class-wise Hurwitz poles cancel here; average over a circle instead
                let est = laurent_coefficient(
                    |z| self.continued(z, tol / 4.0).map(|v| v.0),
                    s,
                    2.0 * CANCELLATION_RADIUS,
                    0,
                    tol / 2.0,
                )?;
                (est.value, tol / 4.0 + est.change)
            }
            _ => {
                if self.has_pole() && (s - 1.0).norm() <= POLE_EXCLUSION {
                    return Err(DirichletError::PoleProximity(s));
                }
                self.continued(s, tol)?
            }
        };
        Ok(SeriesValue { value, trunc_error })
    }

    fn continued(&self, s: Complex64, tol: f64) -> Result<(Complex64, f64), DirichletError> {
        match &self.family {
            Family::RiemannZeta => periodic_series(s, &[1.0], tol),
            Family::ShiftedZeta => {
                let factor = complex_expm1(s * LN_2);
                let scale = factor.norm();
                let (z, e) = periodic_series(s, &[1.0], tol / scale.max(1.0))?;
                Ok((z * factor, e * scale))
            }
            Family::DirichletL { character } => periodic_series(s, &l_weights(character), tol),
            Family::DedekindQuadratic { character, .. } => {
                let weights = l_weights(character);
                let mut inner = tol * 1e-2;
                loop {
                    let (z, ez) = periodic_series(s, &[1.0], inner)?;
                    let (l, el) = periodic_series(s, &weights, inner)?;
                    let err = z.norm() * el + l.norm() * ez + ez * el;
                    if err <= tol || inner < 1e-300 {
                        return Ok((z * l, err));
                    }
                    inner *= 0.5 * tol / err;
                }
            }
            Family::Explicit => unreachable!("explicit series have no continuation"),
        }
    }

    fn check_contour(&self, center: Complex64, radius: f64) -> Result<(), DirichletError> {
        match self.family {
            Family::Explicit => {
                if center.re - radius <= 1.0 {
                    return Err(DirichletError::UnsupportedRegion(center));
                }
            }
            _ => {
                if self.has_pole() && (center - 1.0).norm() <= radius {
                    return Err(DirichletError::ContourHitsPole { center, radius });
                }
            }
        }
        Ok(())
    }

    /// `F^{(order)}(s)` from Cauchy's formula on the circle of radius 1/2.
    pub fn derivative(&self, s: ComplexPoint, order: usize, tol: f64) -> Result<SeriesValue, DirichletError> {
        check_tol(tol)?;
        if order > MAX_DERIVATIVE_ORDER {
            return Err(DirichletError::Precondition(format!(
                "derivative order must be <= {MAX_DERIVATIVE_ORDER}, got {order}"
            )));
        }
        let r = DERIVATIVE_RADIUS;
        self.check_contour(s, r)?;
        let factorial: f64 = (1..=order).map(|k| k as f64).product();
        let eval_tol = tol * r.powi(order as i32) / (4.0 * factorial);
        let est = laurent_coefficient(
            |z| self.evaluate(z, eval_tol).map(|v| v.value),
            s,
            r,
            order as i32,
            tol / factorial,
        )?;
        Ok(SeriesValue {
            value: est.value * factorial,
            trunc_error: est.change * factorial + tol / 4.0,
        })
    }

    /// Coefficient `c_k` of `(s-1)^k` in the Laurent expansion at `s = 1`
    /// (radius 1/4 contour).
    pub fn laurent_at_pole(&self, power: i32, tol: f64) -> Result<Complex64, DirichletError> {
        check_tol(tol)?;
        if !self.has_continuation() {
            return Err(DirichletError::NoContinuation(self.name.clone()));
        }
        let r = RESIDUE_RADIUS;
        let eval_tol = tol * r.powi(power) / 4.0;
        let center = Complex64::new(1.0, 0.0);
        let est = laurent_coefficient(|z| self.evaluate(z, eval_tol).map(|v| v.value), center, r, power, tol)?;
        Ok(est.value)
    }

    /// `rho_F = lim_{s -> 1} (s - 1) F(s)`.
    pub fn residue_at_pole(&self, tol: f64) -> Result<f64, DirichletError> {
        Ok(self.laurent_at_pole(-1, tol)?.re)
    }

    /// Checks the class-B axioms that are finitely checkable: ordering and
    /// positivity of the listed coefficients, normalization, a simple pole
    /// with finite residue, and the trivial zeros at `-2 n d`.
    pub fn check_class_b(&self, d: u32, n_zeros: usize, tol: f64) -> Result<ClassBReport, DirichletError> {
        check_tol(tol)?;
        if d == 0 || n_zeros > 5 {
            return Err(DirichletError::Precondition(format!(
                "need d >= 1 and n_zeros <= 5, got d = {d}, n_zeros = {n_zeros}"
            )));
        }
        let mut checks = Vec::new();
        let terms = match self.family {
            Family::Explicit => self.terms.clone(),
            _ => self.terms_up_to(CLASS_B_COEFFICIENT_CUTOFF)?,
        };

        let disorder = terms.windows(2).position(|w| w[1].lambda <= w[0].lambda);
        checks.push(AxiomCheck {
            axiom: 1,
            name: "lambda strictly increasing".into(),
            passed: disorder.is_none(),
            witness: disorder.map(|i| terms[i + 1].lambda),
            detail: format!("{} terms inspected", terms.len()),
        });
        let first_lambda = terms.first().map(|t| t.lambda);
        checks.push(AxiomCheck {
            axiom: 1,
            name: "lambda positive".into(),
            passed: first_lambda.is_some_and(|l| l > 0.0),
            witness: Some(first_lambda.unwrap_or(0.0)),
            detail: "smallest exponent".into(),
        });
        let negative = terms.iter().find(|t| t.a < 0.0);
        checks.push(AxiomCheck {
            axiom: 1,
            name: "coefficients non-negative".into(),
            passed: negative.is_none(),
            witness: negative.map(|t| t.a),
            detail: match negative {
                Some(t) => format!("a = {} at lambda = {}", t.a, t.lambda),
                None => format!("{} terms inspected", terms.len()),
            },
        });
        let a1 = terms.first().map(|t| t.a).unwrap_or(0.0);
        checks.push(AxiomCheck {
            axiom: 1,
            name: "leading coefficient a_1 = 1".into(),
            passed: a1 == 1.0,
            witness: Some(a1),
            detail: format!("a_1 = {a1}"),
        });

        let mut rho = None;
        if self.has_continuation() {
            let residue = self.laurent_at_pole(-1, tol)?;
            let double = self.laurent_at_pole(-2, tol)?;
            let simple = double.norm() <= tol.max(1e-10);
            let nonzero = residue.norm() > tol && residue.im.abs() <= tol;
            rho = Some(residue.re);
            checks.push(AxiomCheck {
                axiom: 2,
                name: "simple pole at s = 1 with finite residue".into(),
                passed: simple && nonzero && residue.re.is_finite(),
                witness: Some(if simple { residue.re } else { double.norm() }),
                detail: format!("residue {residue}, (s-1)^-2 coefficient {double}"),
            });
        } else {
            checks.push(AxiomCheck {
                axiom: 2,
                name: "simple pole at s = 1 with finite residue".into(),
                passed: false,
                witness: Some(1.0),
                detail: "no analytic continuation: convergence known only for Re(s) > 1".into(),
            });
        }

        let mut residuals = Vec::with_capacity(n_zeros);
        for n in 1..=n_zeros {
            let s0 = -2.0 * n as f64 * d as f64;
            let point = Complex64::new(s0, 0.0);
            match self.evaluate(point, tol) {
                Ok(v) => {
                    let r = v.value.norm();
                    residuals.push(r);
                    checks.push(AxiomCheck {
                        axiom: 4,
                        name: format!("trivial zero at s = {s0}"),
                        passed: r <= tol,
                        witness: Some(r),
                        detail: format!("|F({s0})| = {r:e}"),
                    });
                }
                Err(e) => checks.push(AxiomCheck {
                    axiom: 4,
                    name: format!("trivial zero at s = {s0}"),
                    passed: false,
                    witness: Some(s0),
                    detail: format!("not evaluable: {e}"),
                }),
            }
        }
        Ok(ClassBReport {
            axioms_checked: checks,
            rho,
            trivial_zero_residuals: residuals,
        })
    }

    /// Explicit series holding the terms with `lambda <= cutoff` and a
    /// linear-mass tail bound for the rest.
    pub fn to_explicit(&self, cutoff: f64) -> Result<Self, DirichletError> {
        if !(cutoff > 0.0) {
            return Err(DirichletError::Precondition(format!("cutoff must be > 0, got {cutoff}")));
        }
        let density = match &self.family {
            Family::RiemannZeta => 1.0,
            Family::ShiftedZeta => 2.0,
            Family::DirichletL { character } => character.values().iter().fold(0.0f64, |m, v| m.max(v.abs())),
            Family::DedekindQuadratic { .. } => {
                return Err(DirichletError::Precondition(
                    "dedekind_quadratic coefficients have no linear mass bound; not convertible".into(),
                ))
            }
            Family::Explicit => {
                let start = self.tail_start();
                let (kept, dropped): (Vec<Term>, Vec<Term>) = self.terms.iter().partition(|t| t.lambda <= cutoff);
                let dropped_mass: f64 = dropped.iter().map(|t| t.a.abs()).sum();
                let tail = self.tail.expect("explicit series carry a tail bound");
                // dropped terms lie beyond the cutoff, so their mass is <= (mass/cutoff) x there
                let density = dropped_mass / cutoff + tail.mass_density(start);
                return Self::explicit(
                    self.name.clone(),
                    kept,
                    TailBound::IntegralTest {
                        density,
                        from: Some(cutoff),
                    },
                );
            }
        };
        Self::explicit(
            self.name.clone(),
            self.terms_up_to(cutoff)?,
            TailBound::IntegralTest {
                density,
                from: Some(cutoff),
            },
        )
    }

    /// `-F`, for explicit series.
    pub fn negated(&self) -> Result<Self, DirichletError> {
        if !matches!(self.family, Family::Explicit) {
            return Err(DirichletError::Precondition(
                "only explicit series can be negated; convert with to_explicit first".into(),
            ));
        }
        let mut out = self.clone();
        out.name = format!("-{}", self.name);
        for t in &mut out.terms {
            t.a = -t.a;
        }
        Ok(out)
    }
}

/// Weights `chi(1), ..., chi(q)` for [`periodic_series`].
fn l_weights(chi: &DirichletCharacter) -> Vec<f64> {
    (1..=chi.modulus()).map(|r| chi.at(r)).collect()
}

/// Sum of two series as one explicit series up to a shared `lambda` cutoff.
/// Coefficients on exactly equal exponents are combined and zeros dropped.
pub fn to_lambda_merge(
    a: &GeneralDirichletSeries,
    b: &GeneralDirichletSeries,
    cutoff: f64,
) -> Result<GeneralDirichletSeries, DirichletError> {
    let ea = a.to_explicit(cutoff)?;
    let eb = b.to_explicit(cutoff)?;
    let mut merged: Vec<Term> = Vec::with_capacity(ea.terms.len() + eb.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < ea.terms.len() || j < eb.terms.len() {
        let next = match (ea.terms.get(i), eb.terms.get(j)) {
            (Some(x), Some(y)) if x.lambda == y.lambda => {
                i += 1;
                j += 1;
                Term::new(x.lambda, x.a + y.a)
            }
            (Some(x), Some(y)) if x.lambda < y.lambda => {
                i += 1;
                *x
            }
            (Some(_), Some(y)) | (None, Some(y)) => {
                j += 1;
                *y
            }
            (Some(x), None) => {
                i += 1;
                *x
            }
            (None, None) => unreachable!(),
        };
        if next.a != 0.0 {
            merged.push(next);
        }
    }
    let density = |s: &GeneralDirichletSeries| match s.tail {
        Some(TailBound::IntegralTest { density, .. }) => density,
        _ => unreachable!("to_explicit yields integral-test tails"),
    };
    GeneralDirichletSeries::explicit(
        format!("{} + {}", a.name, b.name),
        merged,
        TailBound::IntegralTest {
            density: density(&ea) + density(&eb),
            from: Some(cutoff),
        },
    )
}
