//! Growth invariants: max-modulus profiles on circles `|s| = r`, the
//! least-squares fit of `log M(r) ~ d log Gamma(r) - r log alpha + c`, and
//! degree/conductor arithmetic from functional-equation data.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dirichlet::{DirichletError, GeneralDirichletSeries};
use crate::special_functions::{ln_gamma_real, GammaError};

pub const MIN_RADIUS: f64 = 1.5;
pub const MIN_ANGULAR_RESOLUTION: usize = 360;
pub const DEFAULT_R_GRID: [f64; 5] = [5.0, 8.0, 12.0, 16.0, 20.0];
/// Points closer than this to `s = 1` are skipped.
pub const POLE_SKIP: f64 = 1e-6;
/// Golden-section refinement stops below this angular bracket.
pub const ANGLE_TOLERANCE: f64 = 1e-6;
pub const DEGREE_TOLERANCE: f64 = 1e-9;
/// Relative conductor perturbation of the lower-bound heuristic.
pub const LOWER_BOUND_EPSILON: f64 = 0.2;
pub const LOWER_BOUND_FACTOR: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate radius grid: all radii equal")]
    DegenerateGrid,
    #[error("degree 2 * sum(alpha_i) = {raw} is not a positive integer")]
    NonIntegerDegree { raw: f64 },
    #[error("every sample on the circle r = {0} was skipped")]
    EmptyCircle(f64),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("CSV output failed: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub alpha: f64,
    pub beta: Complex64,
}

/// `Phi(s) = Q^s prod Gamma(alpha_i s + beta_i) F(s) = w conj(Phi(1 - conj s))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEquationData {
    #[serde(rename = "Q")]
    pub q_factor: f64,
    pub gamma_factors: Vec<GammaFactor>,
    pub w: Complex64,
}

impl FunctionalEquationData {
    pub fn new(q_factor: f64, gamma_factors: Vec<GammaFactor>, w: Complex64) -> Result<Self, GrowthError> {
        let fe = Self {
            q_factor,
            gamma_factors,
            w,
        };
        fe.validate()?;
        Ok(fe)
    }

    pub fn validate(&self) -> Result<(), GrowthError> {
        let bad = |m: String| Err(GrowthError::Precondition(m));
        if !(self.q_factor > 0.0 && self.q_factor.is_finite()) {
            return bad(format!("Q must be finite and > 0, got {}", self.q_factor));
        }
        if self.gamma_factors.is_empty() {
            return bad("at least one Gamma factor is required".into());
        }
        if ((self.w.norm() - 1.0).abs()) > 1e-12 {
            return bad(format!("|w| must be 1, got {}", self.w.norm()));
        }
        for (i, g) in self.gamma_factors.iter().enumerate() {
            if !(g.alpha >= 0.0 && g.alpha.is_finite()) {
                return bad(format!("gamma_factors[{i}].alpha must be finite and >= 0"));
            }
            if !(g.beta.re >= 0.0 && g.beta.re.is_finite() && g.beta.im.is_finite()) {
                return bad(format!("gamma_factors[{i}].beta must be finite with Re >= 0"));
            }
        }
        Ok(())
    }

    /// The Riemann zeta data `Q = pi^{-1/2}`, one factor `Gamma(s/2)`.
    pub fn riemann_zeta() -> Self {
        Self {
            q_factor: PI.powf(-0.5),
            gamma_factors: vec![GammaFactor {
                alpha: 0.5,
                beta: Complex64::new(0.0, 0.0),
            }],
            w: Complex64::new(1.0, 0.0),
        }
    }

    /// Replaces the factor `Gamma(s + beta)` at `index` (which must have
    /// `alpha = 1`) by `Gamma(s/2 + beta/2) Gamma(s/2 + (beta+1)/2)`, via
    /// the duplication formula; `Q` doubles.
    pub fn duplicated(&self, index: usize) -> Result<Self, GrowthError> {
        let factor = self
            .gamma_factors
            .get(index)
            .ok_or_else(|| GrowthError::Precondition(format!("no Gamma factor at index {index}")))?;
        if factor.alpha != 1.0 {
            return Err(GrowthError::Precondition(format!(
                "duplication needs alpha = 1, factor {index} has alpha = {}",
                factor.alpha
            )));
        }
        let beta = factor.beta;
        let mut factors = self.gamma_factors.clone();
        factors.splice(
            index..=index,
            [
                GammaFactor {
                    alpha: 0.5,
                    beta: beta / 2.0,
                },
                GammaFactor {
                    alpha: 0.5,
                    beta: (beta + 1.0) / 2.0,
                },
            ],
        );
        Self::new(2.0 * self.q_factor, factors, self.w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub r: f64,
    #[serde(rename = "logM")]
    pub log_m: f64,
    pub argmax_angle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub r: f64,
    pub angle: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthProfile {
    pub samples: Vec<ProfileSample>,
    pub angular_resolution: usize,
    pub skipped: Vec<SkippedPoint>,
}

impl GrowthProfile {
    /// Profile from known `(r, log M)` pairs, e.g. an exact model.
    pub fn from_samples(samples: &[(f64, f64)]) -> Result<Self, GrowthError> {
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(GrowthError::Precondition("radii must be strictly increasing".into()));
            }
        }
        if samples.iter().any(|&(r, m)| !(r.is_finite() && m.is_finite())) {
            return Err(GrowthError::Precondition("samples must be finite".into()));
        }
        Ok(Self {
            samples: samples
                .iter()
                .map(|&(r, log_m)| ProfileSample {
                    r,
                    log_m,
                    argmax_angle: None,
                })
                .collect(),
            angular_resolution: 0,
            skipped: Vec::new(),
        })
    }

    /// CSV with columns `r, logM, argmax_angle` (empty angle for synthetic samples).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), GrowthError> {
        let mut out = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| GrowthError::Csv(e.to_string());
        out.write_record(["r", "logM", "argmax_angle"]).map_err(csv_err)?;
        for s in &self.samples {
            let angle = s.argmax_angle.map(crate::report::fmt_number).unwrap_or_default();
            out.write_record([crate::report::fmt_number(s.r), crate::report::fmt_number(s.log_m), angle])
                .map_err(csv_err)?;
        }
        out.flush().map_err(|e| GrowthError::Csv(e.to_string()))
    }
}

/// Result of the empirical lower-bound test: refitting with the conductor
/// scaled by `1 + epsilon` must raise the residual at least `factor`-fold.
/// A heuristic, not a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundHeuristic {
    pub epsilon: f64,
    pub perturbed_residual: f64,
    pub residual_ratio: f64,
    pub passed: bool,
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthInvariants {
    pub d: u32,
    pub alpha: f64,
    pub q: f64,
    pub fit_residual: f64,
    pub r_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<LowerBoundHeuristic>,
}

fn log_abs(series: &GeneralDirichletSeries, s: Complex64, tol: f64) -> Result<f64, DirichletError> {
    Ok(series.evaluate(s, tol)?.value.norm().ln())
}

/// Maximizes a function of the angle on `[lo, hi]` by golden-section search.
fn golden_max<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<(f64, f64), DirichletError>
where
    F: FnMut(f64) -> Result<f64, DirichletError>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > ANGLE_TOLERANCE {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `log max_{|s| = r} |F(s)|` for each radius, by an equispaced scan
/// refined with golden-section search around the best sample.
pub fn max_modulus_profile(
    series: &GeneralDirichletSeries,
    r_grid: &[f64],
    angular_resolution: usize,
    tol: f64,
) -> Result<GrowthProfile, GrowthError> {
    if !series.has_continuation() {
        return Err(DirichletError::NoContinuation(series.name().to_string()).into());
    }
    if angular_resolution < MIN_ANGULAR_RESOLUTION {
        return Err(GrowthError::Precondition(format!(
            "angular resolution must be >= {MIN_ANGULAR_RESOLUTION}, got {angular_resolution}"
        )));
    }
    if r_grid.is_empty() {
        return Err(GrowthError::Precondition("radius grid is empty".into()));
    }
    for (i, &r) in r_grid.iter().enumerate() {
        if !(r >= MIN_RADIUS && r.is_finite()) {
            return Err(GrowthError::Precondition(format!("radius {r} is below {MIN_RADIUS}")));
        }
        if i > 0 && r <= r_grid[i - 1] {
            return Err(GrowthError::Precondition("radii must be strictly increasing".into()));
        }
    }
    let step = 2.0 * PI / angular_resolution as f64;
    let mut samples = Vec::with_capacity(r_grid.len());
    let mut skipped = Vec::new();
    for &r in r_grid {
        let point = |theta: f64| Complex64::from_polar(r, theta);
        let mut best: Option<(f64, f64)> = None;
        for j in 0..angular_resolution {
            let theta = j as f64 * step;
            let s = point(theta);
            if (s - 1.0).norm() < POLE_SKIP {
                skipped.push(SkippedPoint {
                    r,
                    angle: theta,
                    reason: "within 1e-6 of the pole at s = 1".into(),
                });
                continue;
            }
            let v = log_abs(series, s, tol)?;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((theta, v));
            }
        }
        let (theta0, v0) = best.ok_or(GrowthError::EmptyCircle(r))?;
        let (theta1, v1) = golden_max(
            |theta| {
                let s = point(theta);
                if (s - 1.0).norm() < POLE_SKIP {
                    Ok(f64::NEG_INFINITY)
                } else {
                    log_abs(series, s, tol)
                }
            },
            theta0 - step,
            theta0 + step,
        )?;
        let (theta, log_m) = if v1 > v0 { (theta1, v1) } else { (theta0, v0) };
        samples.push(ProfileSample {
            r,
            log_m,
            argmax_angle: Some(theta.rem_euclid(2.0 * PI)),
        });
    }
    Ok(GrowthProfile {
        samples,
        angular_resolution,
        skipped,
    })
}

/// Least squares `y = c + slope * r`; returns `(c, slope, rms residual)`.
fn linear_fit(r: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = r.len() as f64;
    let mean_r = r.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let sxx: f64 = r.iter().map(|x| (x - mean_r).powi(2)).sum();
    let sxy: f64 = r.iter().zip(y).map(|(x, v)| (x - mean_r) * (v - mean_y)).sum();
    let slope = sxy / sxx;
    let c = mean_y - slope * mean_r;
    (c, slope, fixed_slope_residual(r, y, slope))
}

/// RMS residual of the best intercept for a given slope.
fn fixed_slope_residual(r: &[f64], y: &[f64], slope: f64) -> f64 {
    let n = r.len() as f64;
    let c = r.iter().zip(y).map(|(x, v)| v - slope * x).sum::<f64>() / n;
    (r.iter().zip(y).map(|(x, v)| (v - c - slope * x).powi(2)).sum::<f64>() / n).sqrt()
}

/// Integer degree and conductor minimizing the log-space fit residual.
pub fn fit_invariants(profile: &GrowthProfile, d_max: u32) -> Result<GrowthInvariants, GrowthError> {
    if profile.samples.len() < 4 {
        return Err(GrowthError::Precondition(format!(
            "need at least 4 samples, got {}",
            profile.samples.len()
        )));
    }
    if d_max == 0 {
        return Err(GrowthError::Precondition("d_max must be >= 1".into()));
    }
    let r: Vec<f64> = profile.samples.iter().map(|s| s.r).collect();
    if r.iter().all(|&x| x == r[0]) {
        return Err(GrowthError::DegenerateGrid);
    }
    let ln_gamma: Vec<f64> = r.iter().map(|&x| ln_gamma_real(x)).collect::<Result<_, _>>()?;
    let mut best: Option<(u32, f64, f64, Vec<f64>)> = None;
    for d in 1..=d_max {
        let y: Vec<f64> = profile
            .samples
            .iter()
            .zip(&ln_gamma)
            .map(|(s, lg)| s.log_m - d as f64 * lg)
            .collect();
        let (_, slope, residual) = linear_fit(&r, &y);
        if best.as_ref().is_none_or(|b| residual < b.2) {
            best = Some((d, slope, residual, y));
        }
    }
    let (d, slope, residual, y) = best.expect("d_max >= 1");
    let alpha = (-slope).exp();
    let perturbed = fixed_slope_residual(&r, &y, -(alpha * (1.0 + LOWER_BOUND_EPSILON)).ln());
    let ratio = perturbed / residual.max(f64::MIN_POSITIVE);
    Ok(GrowthInvariants {
        d,
        alpha,
        q: (2.0 * PI).powi(d as i32) / alpha,
        fit_residual: residual,
        r_grid: r,
        lower_bound: Some(LowerBoundHeuristic {
            epsilon: LOWER_BOUND_EPSILON,
            perturbed_residual: perturbed,
            residual_ratio: ratio,
            passed: ratio >= LOWER_BOUND_FACTOR,
            heuristic: true,
        }),
    })
}

/// `d = 2 sum alpha_i`, `q = (2 pi)^d Q^2 prod alpha_i^{2 alpha_i}` (with
/// `0^0 = 1`), `alpha_F = (2 pi)^d / q`.
pub fn invariants_from_fe(fe: &FunctionalEquationData) -> Result<GrowthInvariants, GrowthError> {
    fe.validate()?;
    let raw: f64 = 2.0 * fe.gamma_factors.iter().map(|g| g.alpha).sum::<f64>();
    let d = raw.round();
    if (raw - d).abs() > DEGREE_TOLERANCE || d < 1.0 {
        return Err(GrowthError::NonIntegerDegree { raw });
    }
    let d = d as u32;
    let log_prod: f64 = fe
        .gamma_factors
        .iter()
        .filter(|g| g.alpha > 0.0)
        .map(|g| 2.0 * g.alpha * g.alpha.ln())
        .sum();
    let two_pi_d = (2.0 * PI).powi(d as i32);
    let q = two_pi_d * fe.q_factor * fe.q_factor * log_prod.exp();
    Ok(GrowthInvariants {
        d,
        alpha: two_pi_d / q,
        q,
        fit_residual: 0.0,
        r_grid: Vec::new(),
        lower_bound: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_functional_equation() {
        let inv = invariants_from_fe(&FunctionalEquationData::riemann_zeta()).unwrap();
        assert_eq!(inv.d, 1);
        assert!((inv.q - 1.0).abs() < 1e-12);
        assert!((inv.alpha - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn gaussian_field_functional_equation() {
        // Q^2 = q / ((2 pi)^2 (1/2)^2) with q = 4
        let q_factor = (4.0f64 / (4.0 * PI * PI * 0.25)).sqrt();
        let half = GammaFactor {
            alpha: 0.5,
            beta: Complex64::new(0.0, 0.0),
        };
        let fe = FunctionalEquationData::new(q_factor, vec![half, half], Complex64::new(1.0, 0.0)).unwrap();
        let inv = invariants_from_fe(&fe).unwrap();
        assert_eq!(inv.d, 2);
        assert!((inv.alpha - (2.0 * PI).powi(2) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn non_integer_degree() {
        let fe = FunctionalEquationData::new(
            1.0,
            vec![GammaFactor {
                alpha: 1.0 / 3.0,
                beta: Complex64::new(0.0, 0.0),
            }],
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        match invariants_from_fe(&fe) {
            Err(GrowthError::NonIntegerDegree { raw }) => assert!((raw - 2.0 / 3.0).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplication_keeps_degree_and_conductor() {
        let fe = FunctionalEquationData::new(
            0.7,
            vec![GammaFactor {
                alpha: 1.0,
                beta: Complex64::new(0.5, 1.0),
            }],
            Complex64::new(0.0, 1.0),
        )
        .unwrap();
        let a = invariants_from_fe(&fe).unwrap();
        let b = invariants_from_fe(&fe.duplicated(0).unwrap()).unwrap();
        assert_eq!(a.d, b.d);
        assert!((a.q - b.q).abs() < 1e-9 * a.q);
        assert!(fe.duplicated(1).is_err());
    }

    #[test]
    fn zero_alpha_uses_zero_to_the_zero() {
        let fe = FunctionalEquationData::new(
            1.0,
            vec![
                GammaFactor {
                    alpha: 0.5,
                    beta: Complex64::new(0.0, 0.0),
                },
                GammaFactor {
                    alpha: 0.0,
                    beta: Complex64::new(1.0, 0.0),
                },
            ],
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let inv = invariants_from_fe(&fe).unwrap();
        assert!((inv.q - 2.0 * PI * 0.5).abs() < 1e-12);
    }

    #[test]
    fn synthetic_profile_recovery() {
        let r = DEFAULT_R_GRID;
        let samples: Vec<(f64, f64)> = r
            .iter()
            .map(|&x| (x, 3.0 * ln_gamma_real(x).unwrap() - x * 7f64.ln()))
            .collect();
        let inv = fit_invariants(&GrowthProfile::from_samples(&samples).unwrap(), 4).unwrap();
        assert_eq!(inv.d, 3);
        assert!((inv.alpha - 7.0).abs() < 1e-9);
        assert!(inv.fit_residual <= 1e-12);
        assert!(inv.lower_bound.unwrap().passed);
    }

    #[test]
    fn fit_rejects_small_or_degenerate_profiles() {
        let few = GrowthProfile::from_samples(&[(5.0, 1.0), (6.0, 2.0), (7.0, 3.0)]).unwrap();
        assert!(matches!(fit_invariants(&few, 2), Err(GrowthError::Precondition(_))));
        let flat = GrowthProfile {
            samples: vec![
                ProfileSample {
                    r: 5.0,
                    log_m: 1.0,
                    argmax_angle: None
                };
                4
            ],
            angular_resolution: 0,
            skipped: Vec::new(),
        };
        assert_eq!(fit_invariants(&flat, 2), Err(GrowthError::DegenerateGrid));
    }

    #[test]
    fn single_radius_profile() {
        let z = GeneralDirichletSeries::riemann_zeta();
        let p = max_modulus_profile(&z, &[5.0], 360, 1e-10).unwrap();
        assert_eq!(p.samples.len(), 1);
        // max on |s| = 5 is zeta(5) itself (dense-scan oracle)
        assert!((p.samples[0].log_m - 1.036_927_755_143_37_f64.ln()).abs() < 1e-9);
        assert!(p.samples[0].argmax_angle.unwrap().min(2.0 * PI - p.samples[0].argmax_angle.unwrap()) < 1e-5);
    }

    #[test]
    fn profile_preconditions() {
        let z = GeneralDirichletSeries::riemann_zeta();
        assert!(max_modulus_profile(&z, &[1.0], 360, 1e-8).is_err());
        assert!(max_modulus_profile(&z, &[5.0], 100, 1e-8).is_err());
        assert!(max_modulus_profile(&z, &[5.0, 5.0], 360, 1e-8).is_err());
    }

    #[test]
    fn csv_columns() {
        let p = GrowthProfile::from_samples(&[(5.0, 1.5)]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "r,logM,argmax_angle\n5,1.5,\n");
    }
}
