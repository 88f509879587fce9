//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use dirichlet_unique::beurling::{
    asymptotic_constants, decay_verification, mellin_identity_check, psi_principal_parts, BeurlingProduct, LawReading,
    DEFAULT_TRUNC_N,
};
use dirichlet_unique::dirichlet::GeneralDirichletSeries;
use dirichlet_unique::growth::{
    fit_invariants, invariants_from_fe, max_modulus_profile, FunctionalEquationData, GammaFactor, GrowthProfile,
    DEFAULT_R_GRID, MIN_ANGULAR_RESOLUTION,
};
use dirichlet_unique::special_functions::{gamma_ratio_bound_check, ln_gamma_real};
use dirichlet_unique::uniqueness::{dedekind_condition, main_condition, match_candidate, selberg_sharp_condition, Shape};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

mod common;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Collects failures so one criterion can report every sub-check.
#[derive(Default)]
struct Checks {
    notes: Vec<String>,
    failed: bool,
}

impl Checks {
    fn check(&mut self, ok: bool, note: String) {
        if !ok {
            self.failed = true;
            self.notes.push(format!("FAILED {note}"));
        } else {
            self.notes.push(note);
        }
    }

    fn finish(self) -> Outcome {
        let text = self.notes.join("; ");
        if self.failed {
            Err(text)
        } else {
            Ok(text)
        }
    }
}

fn verify_cli(builtin: &str) -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_dirichlet-unique"))
        .args(["verify", "--builtin", builtin])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if out.status.code() != Some(0) {
        return Err(format!("{builtin}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let v = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok((v, elapsed))
}

fn closure() -> Outcome {
    let mut checks = Checks::default();
    for (name, shape) in [("zeta", "sinh_over_linear"), ("shifted_zeta", "cosh")] {
        let (v, elapsed) = verify_cli(name)?;
        let cand = &v["candidate"];
        let dist = cand["max_abs_log_diff"].as_f64().unwrap_or(f64::NAN);
        checks.check(
            cand["best"]["shape"] == shape && dist < 1e-8,
            format!("{name} -> {} at {dist:.1e}", cand["best"]["shape"]),
        );
        checks.check(elapsed < Duration::from_secs(60), format!("{name} {:.2}s", elapsed.as_secs_f64()));
    }
    // the same comparison on a dense grid covering [1, 6]
    let dense: Vec<f64> = (0..=500).map(|k| 1.0 + k as f64 / 100.0).collect();
    for (series, shape) in [
        (GeneralDirichletSeries::riemann_zeta(), Shape::SinhOverLinear),
        (GeneralDirichletSeries::shifted_zeta(), Shape::Cosh),
    ] {
        let name = series.name().to_string();
        let law = asymptotic_constants(&series, 1, None, 1e-13).map_err(|e| e.to_string())?;
        let product = BeurlingProduct::new(series, 1, DEFAULT_TRUNC_N).map_err(|e| e.to_string())?;
        let m = match_candidate(&product, &law, &dense, LawReading::Residue, 1e-12).map_err(|e| e.to_string())?;
        checks.check(
            m.best.shape == shape && m.max_abs_log_diff < 1e-8,
            format!("{name} dense grid {:.1e}", m.max_abs_log_diff),
        );
    }
    checks.finish()
}

fn zeta_constants() -> Outcome {
    let law = asymptotic_constants(&GeneralDirichletSeries::riemann_zeta(), 1, None, 1e-13).map_err(|e| e.to_string())?;
    let mut checks = Checks::default();
    checks.check((law.a + 1.0).abs() < 1e-8, format!("a = {}", law.a));
    checks.check((law.b - 1.0 / (2.0 * PI)).abs() < 1e-8, format!("b = {}", law.b));
    checks.check((law.m - PI).abs() < 1e-12, format!("m = {}", law.m));
    checks.finish()
}

fn decay_law() -> Outcome {
    let series = GeneralDirichletSeries::riemann_zeta();
    let law = asymptotic_constants(&series, 1, None, 1e-13).map_err(|e| e.to_string())?;
    let product = BeurlingProduct::new(series, 1, DEFAULT_TRUNC_N).map_err(|e| e.to_string())?;
    let grid = [2.0, 4.0, 6.0];
    let records = decay_verification(&product, &law, &grid, LawReading::Residue).map_err(|e| e.to_string())?;
    let mut checks = Checks::default();
    let mut residuals = Vec::new();
    for r in &records {
        let expected = -PI * r.x - (2.0 * PI * r.x).ln();
        let Some(res) = r.residual_log else {
            checks.check(false, format!("x = {}: no residual", r.x));
            continue;
        };
        checks.check((res - expected).abs() < 0.1, format!("x = {}: {res:.4} vs {expected:.4}", r.x));
        residuals.push((r.x, res));
    }
    for w in residuals.windows(2) {
        let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        checks.check(slope <= -(PI - 0.1), format!("slope {slope:.4}"));
    }
    checks.finish()
}

fn mellin() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut points: Vec<Complex64> = [0.5, 1.0, 1.5].iter().map(|&x| c(x, 0.0)).collect();
    while points.len() < 23 {
        let re: f64 = rng.gen_range(0.0..2.0);
        if re > 0.0 {
            points.push(c(re, rng.gen_range(-2.0..=2.0)));
        }
    }
    let mut worst = (0.0f64, c(0.0, 0.0));
    for &s in &points {
        let check = mellin_identity_check(s, 1e-12).map_err(|e| format!("s = {s}: {e}"))?;
        if check.abs_diff > worst.0 || check.abs_diff.is_nan() {
            worst = (check.abs_diff, s);
        }
    }
    let elapsed = start.elapsed();
    let mut checks = Checks::default();
    checks.check(worst.0 < 1e-8, format!("max |lhs - rhs| = {:.1e} at s = {}", worst.0, worst.1));
    checks.check(elapsed < Duration::from_secs(10), format!("{:.2}s", elapsed.as_secs_f64()));
    checks.finish()
}

fn fitted(series: &GeneralDirichletSeries) -> Result<(u32, f64), String> {
    let profile = max_modulus_profile(series, &DEFAULT_R_GRID, MIN_ANGULAR_RESOLUTION, 1e-8).map_err(|e| e.to_string())?;
    let inv = fit_invariants(&profile, 4).map_err(|e| e.to_string())?;
    Ok((inv.d, inv.alpha))
}

fn invariant_recovery() -> Outcome {
    let start = Instant::now();
    let mut checks = Checks::default();
    for d in 1..=4u32 {
        let alpha = (2.0 * PI).powi(d as i32) / 3.0;
        let samples: Vec<(f64, f64)> = DEFAULT_R_GRID
            .iter()
            .map(|&r| (r, d as f64 * ln_gamma_real(r).unwrap() - r * alpha.ln()))
            .collect();
        let profile = GrowthProfile::from_samples(&samples).map_err(|e| e.to_string())?;
        let inv = fit_invariants(&profile, 4).map_err(|e| e.to_string())?;
        checks.check(
            inv.d == d && (inv.alpha - alpha).abs() <= 1e-9 * alpha,
            format!("synthetic d = {d}: ({}, rel {:.1e})", inv.d, (inv.alpha / alpha - 1.0).abs()),
        );
    }
    let (d, alpha) = fitted(&GeneralDirichletSeries::riemann_zeta())?;
    let target = 2.0 * PI;
    checks.check(
        d == 1 && (alpha / target - 1.0).abs() <= 0.1,
        format!("zeta fit d = {d}, alpha = {alpha:.4} ({:+.1}% of 2pi)", 100.0 * (alpha / target - 1.0)),
    );
    let gaussian = GeneralDirichletSeries::dedekind_quadratic(-4).map_err(|e| e.to_string())?;
    let (d, alpha) = fitted(&gaussian)?;
    let target = PI * PI;
    checks.check(
        d == 2 && (alpha / target - 1.0).abs() <= 0.2,
        format!("Q(i) fit d = {d}, alpha = {alpha:.4} ({:+.1}% of pi^2)", 100.0 * (alpha / target - 1.0)),
    );
    let elapsed = start.elapsed();
    checks.check(elapsed < Duration::from_secs(300), format!("{:.2}s", elapsed.as_secs_f64()));
    checks.finish()
}

fn functional_equation() -> Outcome {
    let zeta = FunctionalEquationData::riemann_zeta();
    let inv = invariants_from_fe(&zeta).map_err(|e| e.to_string())?;
    let mut checks = Checks::default();
    checks.check(
        inv.d == 1 && (inv.q - 1.0).abs() < 1e-12 && (inv.alpha - 2.0 * PI).abs() < 1e-12,
        format!("zeta ({}, {}, {})", inv.d, inv.q, inv.alpha),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut degrees_agree = true;
    let mut cases = Vec::new();
    for _ in 0..20 {
        let factors = (0..rng.gen_range(1..=3))
            .map(|_| GammaFactor {
                alpha: [0.5, 1.0][rng.gen_range(0..2)],
                beta: c(rng.gen_range(0.0..3.0), rng.gen_range(-2.0..2.0)),
            })
            .collect();
        cases.push(FunctionalEquationData::new(rng.gen_range(0.05..5.0), factors, c(1.0, 0.0)).map_err(|e| e.to_string())?);
    }
    for fe in &cases {
        let a = invariants_from_fe(fe).map_err(|e| e.to_string())?;
        for i in (0..fe.gamma_factors.len()).filter(|&i| fe.gamma_factors[i].alpha == 1.0) {
            let b = invariants_from_fe(&fe.duplicated(i).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            degrees_agree &= a.d == b.d;
            worst = worst.max((a.q / b.q - 1.0).abs()).max((a.alpha / b.alpha - 1.0).abs());
        }
    }
    checks.check(degrees_agree && worst < 1e-9, format!("duplication max rel change {worst:.1e}"));
    checks.finish()
}

fn gamma_sweep() -> Outcome {
    let mut checks = Checks::default();
    let mut ratios = Vec::new();
    let mut worst_rel = 0.0f64;
    for sigma in 2..=10 {
        let sigma = sigma as f64;
        let report = gamma_ratio_bound_check(sigma, 2.0 * (sigma + 2.0), 1e-10).map_err(|e| e.to_string())?;
        let oracle = common::gamma_bound_ratio(sigma, report.t_cut);
        worst_rel = worst_rel.max((report.bound_ratio / oracle - 1.0).abs());
        ratios.push(report.upper_ratio);
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    checks.check(
        ratios.iter().all(|r| *r > 0.0 && r.is_finite()),
        format!("sigma 2..10 bounded by {max_ratio:.4}"),
    );
    checks.check(worst_rel < 1e-6, format!("Simpson rel diff {worst_rel:.1e}"));
    checks.finish()
}

fn trivial_zeros() -> Outcome {
    let mut checks = Checks::default();
    let zeta = GeneralDirichletSeries::riemann_zeta();
    let mut worst = 0.0f64;
    for n in 1..=5 {
        worst = worst.max(zeta.evaluate(c(-2.0 * n as f64, 0.0), 1e-12).map_err(|e| e.to_string())?.value.norm());
    }
    checks.check(worst < 1e-10, format!("max |zeta(-2n)| = {worst:.1e}"));
    let gaussian = GeneralDirichletSeries::dedekind_quadratic(-4).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for n in 1..=2 {
        worst = worst.max(gaussian.evaluate(c(-4.0 * n as f64, 0.0), 1e-10).map_err(|e| e.to_string())?.value.norm());
    }
    checks.check(worst < 1e-8, format!("max |zeta_K(-4n)| = {worst:.1e}"));
    checks.finish()
}

fn conditions() -> Outcome {
    let mut checks = Checks::default();
    let z = main_condition(2.0 * PI, 1.0, 1).map_err(|e| e.to_string())?;
    checks.check(z.holds && (z.margin - PI).abs() < 1e-10, format!("zeta margin {}", z.margin));
    let k = dedekind_condition(4.0, 2, PI / 4.0).map_err(|e| e.to_string())?;
    checks.check(
        !k.holds && k.lhs == 2.0 && (k.rhs - 1.8006).abs() < 1e-4,
        format!("Q(i) lhs {} rhs {:.6}", k.lhs, k.rhs),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut disagreements = 0;
    for _ in 0..100 {
        let d = rng.gen_range(1..=4u32);
        let alpha: f64 = rng.gen_range(-3.0f64..6.0).exp();
        let rho = rng.gen_range(0.05..3.0);
        let q = (2.0 * PI).powi(d as i32) / alpha;
        let main = main_condition(alpha, rho, d).map_err(|e| e.to_string())?;
        let sharp = selberg_sharp_condition(q, rho, d).map_err(|e| e.to_string())?;
        disagreements += usize::from(main.holds != sharp.holds);
    }
    checks.check(disagreements == 0, format!("{disagreements}/100 disagreements"));
    checks.finish()
}

fn principal_parts() -> Outcome {
    let parts = psi_principal_parts(&GeneralDirichletSeries::riemann_zeta(), 1, 1e-10).map_err(|e| e.to_string())?;
    let mut checks = Checks::default();
    checks.check((parts.double_pole_at_zero + 1.0).abs() < 1e-6, format!("s^2 psi -> {}", parts.double_pole_at_zero));
    checks.check((parts.residue_at_one - PI).abs() < 1e-6, format!("residue {}", parts.residue_at_one));
    checks.finish()
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("product closure for zeta and shifted zeta", closure),
        ("asymptotic constants for zeta", zeta_constants),
        ("decay of the residual for zeta", decay_law),
        ("Mellin kernel identity", mellin),
        ("growth invariant recovery", invariant_recovery),
        ("functional-equation invariants", functional_equation),
        ("gamma integral bound sweep", gamma_sweep),
        ("trivial zeros", trivial_zeros),
        ("uniqueness conditions", conditions),
        ("psi principal parts", principal_parts),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
