//! Sufficient conditions for uniqueness and the two candidate entire forms
//! a product can take once its exponential rate is fixed.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beurling::{AsymptoticLaw, BeurlingError, BeurlingProduct, LawReading};

/// Largest accepted `max |log f - log candidate|` over the grid.
pub const MATCH_TOLERANCE: f64 = 1e-3;
/// Below this `|beta x|` the sinh form uses its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UniquenessError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Beurling(#[from] BeurlingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub margin: f64,
}

impl ConditionReport {
    /// `holds` iff `lhs > rhs`.
    fn greater(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs > rhs,
            margin: lhs - rhs,
        }
    }
}

fn check_positive(name: &str, value: f64) -> Result<(), UniquenessError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(UniquenessError::Precondition(format!("{name} must be finite and > 0, got {value}")))
    }
}

fn check_degree(d: u32) -> Result<f64, UniquenessError> {
    if d == 0 {
        return Err(UniquenessError::Precondition("degree must be >= 1".into()));
    }
    Ok(d as f64)
}

/// `alpha > (pi rho / sin(pi / 2d))^d`.
pub fn main_condition(alpha: f64, rho: f64, d: u32) -> Result<ConditionReport, UniquenessError> {
    check_positive("alpha", alpha)?;
    check_positive("rho", rho)?;
    let df = check_degree(d)?;
    let rhs = (PI * rho / (PI / (2.0 * df)).sin()).powi(d as i32);
    Ok(ConditionReport::greater(alpha, rhs))
}

/// `q^{-1/d} > rho / (2 sin(pi / 2d))`, the same statement as
/// [`main_condition`] in terms of `q = (2 pi)^d / alpha`.
pub fn selberg_sharp_condition(q: f64, rho: f64, d: u32) -> Result<ConditionReport, UniquenessError> {
    check_positive("q", q)?;
    check_positive("rho", rho)?;
    let df = check_degree(d)?;
    Ok(ConditionReport::greater(q.powf(-1.0 / df), rho / (2.0 * (PI / (2.0 * df)).sin())))
}

/// Root discriminant `|D|^{1/n} < 2 sin(pi / 2n) / rho`. The margin keeps
/// the sign convention `holds iff margin > 0`, so it is `rhs - lhs`.
pub fn dedekind_condition(abs_disc: f64, n: u32, rho: f64) -> Result<ConditionReport, UniquenessError> {
    if !(abs_disc >= 1.0 && abs_disc.is_finite()) {
        return Err(UniquenessError::Precondition(format!("|discriminant| must be >= 1, got {abs_disc}")));
    }
    check_positive("rho", rho)?;
    let nf = check_degree(n)?;
    let lhs = abs_disc.powf(1.0 / nf);
    let rhs = 2.0 * (PI / (2.0 * nf)).sin() / rho;
    Ok(ConditionReport {
        lhs,
        rhs,
        holds: lhs < rhs,
        margin: rhs - lhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `sinh(beta x) / (beta x)`
    SinhOverLinear,
    /// `cosh(beta x)`
    Cosh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateForm {
    pub shape: Shape,
    pub beta: f64,
}

impl CandidateForm {
    pub fn value(&self, x: f64) -> f64 {
        let t = self.beta * x;
        match self.shape {
            Shape::SinhOverLinear if t.abs() < SERIES_THRESHOLD => {
                let t2 = t * t;
                1.0 + t2 / 6.0 * (1.0 + t2 / 20.0)
            }
            Shape::SinhOverLinear => t.sinh() / t,
            Shape::Cosh => t.cosh(),
        }
    }

    /// Logarithm of [`value`](Self::value) without overflow for large `x`.
    pub fn log_value(&self, x: f64) -> f64 {
        let t = (self.beta * x).abs();
        match self.shape {
            Shape::SinhOverLinear if t < 1.0 => self.value(x).ln(),
            Shape::SinhOverLinear => t + (-(-2.0 * t).exp_m1()).ln() - LN_2 - t.ln(),
            Shape::Cosh => t + (-2.0 * t).exp().ln_1p() - LN_2,
        }
    }
}

/// Both candidate forms at rate `beta`.
pub fn candidate_forms(beta: f64) -> Result<[CandidateForm; 2], UniquenessError> {
    check_positive("beta", beta)?;
    Ok([
        CandidateForm {
            shape: Shape::SinhOverLinear,
            beta,
        },
        CandidateForm {
            shape: Shape::Cosh,
            beta,
        },
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateMatch {
    pub best: CandidateForm,
    pub max_abs_log_diff: f64,
    pub sinh_distance: f64,
    pub cosh_distance: f64,
    /// Whether the best distance is within [`MATCH_TOLERANCE`].
    pub matched: bool,
    /// Matches at d >= 2 have no worked example to compare against.
    pub exploratory: bool,
    /// Upper bound `2d` on the number of series sharing these invariants.
    pub multiplicity: u32,
}

/// Compares `h(x) = f(x^d)` with both forms at `beta` equal to the law's
/// rate, using `max |log h(x) - log form(x)|` over the grid.
pub fn match_candidate(
    product: &BeurlingProduct,
    law: &AsymptoticLaw,
    x_grid: &[f64],
    reading: LawReading,
    tol: f64,
) -> Result<CandidateMatch, UniquenessError> {
    if x_grid.is_empty() || x_grid.iter().any(|&x| !(x >= 1.0 && x.is_finite())) {
        return Err(UniquenessError::Precondition("x grid must be non-empty with every x >= 1".into()));
    }
    if law.d != product.d() {
        return Err(UniquenessError::Precondition(format!(
            "law degree {} differs from product degree {}",
            law.d,
            product.d()
        )));
    }
    let forms = candidate_forms(law.rate(reading))?;
    let mut grid = x_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut dist = [0.0f64; 2];
    for &x in &grid {
        let log_h = product.log_f(x.powi(law.d as i32), tol)?.value;
        for (slot, form) in dist.iter_mut().zip(&forms) {
            *slot = slot.max((log_h - form.log_value(x)).abs());
        }
    }
    // ties go to the first form so results do not depend on float noise order
    let pick = if dist[1] < dist[0] { 1 } else { 0 };
    Ok(CandidateMatch {
        best: forms[pick],
        max_abs_log_diff: dist[pick],
        sinh_distance: dist[0],
        cosh_distance: dist[1],
        matched: dist[pick] < MATCH_TOLERANCE,
        exploratory: law.d >= 2,
        multiplicity: 2 * law.d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beurling::{asymptotic_constants, DEFAULT_TRUNC_N};
    use crate::dirichlet::GeneralDirichletSeries;

    #[test]
    fn main_condition_examples() {
        let z = main_condition(2.0 * PI, 1.0, 1).unwrap();
        assert!(z.holds && (z.rhs - PI).abs() < 1e-15 && (z.margin - PI).abs() < 1e-14);
        let edge = main_condition(2.0 * PI, 2.0, 1).unwrap();
        assert!(!edge.holds);
        let k = main_condition(PI * PI, PI / 4.0, 2).unwrap();
        assert!(!k.holds && (k.rhs - 12.176).abs() < 1e-3);
        assert!(main_condition(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn rhs_scales_like_rho_to_the_d() {
        for d in 1..=5u32 {
            let base = main_condition(1.0, 0.7, d).unwrap().rhs;
            let scaled = main_condition(1.0, 0.7 * 1.3, d).unwrap().rhs;
            assert!((scaled - 1.3f64.powi(d as i32) * base).abs() < 1e-12 * scaled);
        }
    }

    #[test]
    fn dedekind_examples() {
        let k = dedekind_condition(4.0, 2, PI / 4.0).unwrap();
        assert!(!k.holds && k.lhs == 2.0 && (k.rhs - 1.8006).abs() < 1e-4);
        let q = dedekind_condition(1.0, 1, 1.0).unwrap();
        assert!(q.holds && q.lhs == 1.0 && (q.rhs - 2.0).abs() < 1e-15);
        let z = selberg_sharp_condition(1.0, 1.0, 1).unwrap();
        assert!(z.holds && z.lhs == 1.0 && (z.rhs - 0.5).abs() < 1e-15);
    }

    #[test]
    fn forms() {
        let [s, c] = candidate_forms(PI).unwrap();
        assert!((s.value(1.0) - 3.676_077_910_374_978).abs() < 1e-12);
        assert!((c.value(1.0) - 11.591_953_275_521_519).abs() < 1e-11);
        assert_eq!(s.value(0.0), 1.0);
        assert_eq!(c.value(0.0), 1.0);
        assert!((s.value(1e-5) - (PI * 1e-5).sinh() / (PI * 1e-5)).abs() < 1e-15);
        for &x in &[0.5, 3.0, 200.0] {
            assert!((s.log_value(x) - s.value(x).ln()).abs() < 1e-12 * (1.0 + s.log_value(x)));
            assert!((c.log_value(x) - c.value(x).ln()).abs() < 1e-12 * (1.0 + c.log_value(x)));
        }
        assert!(candidate_forms(-1.0).is_err());
    }

    #[test]
    fn zeta_type_products_pick_their_forms() {
        let grid = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        for (series, shape) in [
            (GeneralDirichletSeries::riemann_zeta(), Shape::SinhOverLinear),
            (GeneralDirichletSeries::shifted_zeta(), Shape::Cosh),
        ] {
            let law = asymptotic_constants(&series, 1, None, 1e-12).unwrap();
            let product = BeurlingProduct::new(series, 1, DEFAULT_TRUNC_N).unwrap();
            let m = match_candidate(&product, &law, &grid, LawReading::Residue, 1e-12).unwrap();
            assert_eq!(m.best.shape, shape);
            assert!(m.matched && m.max_abs_log_diff < 1e-8, "{m:?}");
            assert!(!m.exploratory && m.multiplicity == 2);
            let mut reversed = grid;
            reversed.reverse();
            let again = match_candidate(&product, &law, &reversed, LawReading::Residue, 1e-12).unwrap();
            assert_eq!(again, m);
            assert!(match_candidate(&product, &law, &[1.0], LawReading::Residue, 1e-12).is_ok());
        }
    }
}
