//! Command-line front end. Every command writes one JSON (or CSV) report
//! and maps its outcome to an exit code.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::beurling::{
    asymptotic_constants, decay_verification, mellin_identity_check, psi_principal_parts, residual_slopes,
    AsymptoticLaw, BeurlingError, BeurlingProduct, DecayRecord, LawReading, MellinCheck, PrincipalParts, ProductValue,
    DEFAULT_TRUNC_N,
};
use crate::dirichlet::{
    read_series, ClassBReport, DirichletCharacter, DirichletError, Family, GeneralDirichletSeries, SeriesLoadError,
    SeriesValue,
};
use crate::growth::{
    fit_invariants, invariants_from_fe, max_modulus_profile, FunctionalEquationData, GrowthError, GrowthInvariants,
    DEFAULT_R_GRID, MIN_ANGULAR_RESOLUTION,
};
use crate::report::{emit, fmt_number, to_json};
use crate::special_functions::{gamma_ratio_bound_check, GammaBoundReport, GammaError};
use crate::uniqueness::{
    dedekind_condition, main_condition, match_candidate, selberg_sharp_condition, CandidateMatch, ConditionReport,
    UniquenessError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_EVALUATION: i32 = 3;
pub const EXIT_FAILED_CHECK: i32 = 4;
pub const EXIT_NON_INTEGER_DEGREE: i32 = 5;

/// Law constants feed exponentials, so they are always computed at least this tightly.
const LAW_TOL: f64 = 1e-12;
const MELLIN_POINTS: [f64; 3] = [0.5, 1.0, 1.5];
const GAMMA_SIGMAS: [f64; 9] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
const PRINCIPAL_PART_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "dirichlet-unique", version, about = "General Dirichlet series and Beurling-type uniqueness checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate F(s) with its truncation error.
    Eval {
        #[command(flatten)]
        series: SeriesArgs,
        /// Real part of s.
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        /// Imaginary part of s.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the full verification suite for a series.
    Verify {
        #[command(flatten)]
        series: SeriesArgs,
        /// Degree, if it cannot be read off the family.
        #[arg(long)]
        d: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Degree and conductor from a max-modulus fit or a functional equation.
    Invariants {
        #[command(flatten)]
        series: OptionalSeriesArgs,
        /// Fit the max-modulus profile of the series.
        #[arg(long, conflicts_with = "fe")]
        fit: bool,
        /// Functional-equation JSON file.
        #[arg(long)]
        fe: Option<PathBuf>,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',')]
        r_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = MIN_ANGULAR_RESOLUTION)]
        resolution: usize,
        #[arg(long, default_value_t = 4)]
        d_max: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Beurling product, asymptotic law and decay check.
    Beurling {
        #[command(subcommand)]
        action: BeurlingCommand,
    },
    /// Check the Mellin kernel identity.
    Mellin {
        /// Real parts of s; defaults to 0.5, 1, 1.5.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Integrate |Gamma(sigma + 2 + it)| against sigma^3 Gamma(sigma).
    GammaBound {
        /// Defaults to 2, 3, ..., 10.
        #[arg(long, value_delimiter = ',')]
        sigma: Option<Vec<f64>>,
        /// Defaults to 2 (sigma + 2).
        #[arg(long)]
        t_cut: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the uniqueness conditions.
    Conditions {
        #[command(flatten)]
        series: OptionalSeriesArgs,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        d: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Subcommand)]
enum BeurlingCommand {
    /// log f(x) on a grid.
    Product {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[command(flatten)]
        product: ProductArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Constants a, b, m of the asymptotic law and the principal parts of psi.
    Asymptote {
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        product: ProductArgs,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Residual of log f against the law on a grid.
    Decay {
        #[command(flatten)]
        series: SeriesArgs,
        /// Defaults to 1, 2, ..., 6.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Reading::Residue)]
        reading: Reading,
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        product: ProductArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Builtin {
    Zeta,
    #[value(name = "shifted_zeta", alias = "shifted-zeta")]
    ShiftedZeta,
    /// Dirichlet L-function of the Kronecker character of --disc.
    #[value(name = "L", alias = "l")]
    L,
    Dedekind,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Reading {
    Residue,
    Literal,
}

impl From<Reading> for LawReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Residue => LawReading::Residue,
            Reading::Literal => LawReading::Literal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct SeriesSource {
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Series definition JSON file.
    #[arg(long)]
    series: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    #[command(flatten)]
    source: SeriesSource,
    /// Fundamental discriminant for `dedekind` and `L`.
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
}

#[derive(Debug, Args)]
struct OptionalSeriesArgs {
    #[arg(long, value_enum, conflicts_with = "series")]
    builtin: Option<Builtin>,
    #[arg(long)]
    series: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
}

#[derive(Debug, Args)]
struct ProductArgs {
    /// Degree d; read off the family when omitted.
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_TRUNC_N)]
    trunc_n: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// A process outcome: exit code plus message for stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_SCHEMA, message)
    }
}

impl From<DirichletError> for CliError {
    fn from(e: DirichletError) -> Self {
        Self::new(EXIT_EVALUATION, e.to_string())
    }
}

impl From<BeurlingError> for CliError {
    fn from(e: BeurlingError) -> Self {
        Self::new(EXIT_EVALUATION, e.to_string())
    }
}

impl From<UniquenessError> for CliError {
    fn from(e: UniquenessError) -> Self {
        Self::new(EXIT_EVALUATION, e.to_string())
    }
}

impl From<GammaError> for CliError {
    fn from(e: GammaError) -> Self {
        Self::new(EXIT_EVALUATION, e.to_string())
    }
}

impl From<GrowthError> for CliError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::NonIntegerDegree { .. } => Self::new(EXIT_NON_INTEGER_DEGREE, e.to_string()),
            GrowthError::Precondition(_) | GrowthError::DegenerateGrid => Self::usage(e.to_string()),
            other => Self::new(EXIT_EVALUATION, other.to_string()),
        }
    }
}

impl From<SeriesLoadError> for CliError {
    fn from(e: SeriesLoadError) -> Self {
        Self::new(EXIT_SCHEMA, e.to_string())
    }
}

fn builtin_series(builtin: Builtin, disc: Option<i64>) -> Result<GeneralDirichletSeries, CliError> {
    let need_disc = || disc.ok_or_else(|| CliError::usage("--disc is required for this builtin"));
    Ok(match builtin {
        Builtin::Zeta => GeneralDirichletSeries::riemann_zeta(),
        Builtin::ShiftedZeta => GeneralDirichletSeries::shifted_zeta(),
        Builtin::L => GeneralDirichletSeries::dirichlet_l(
            DirichletCharacter::kronecker(need_disc()?).map_err(|e| CliError::usage(e.to_string()))?,
        ),
        Builtin::Dedekind => {
            GeneralDirichletSeries::dedekind_quadratic(need_disc()?).map_err(|e| CliError::usage(e.to_string()))?
        }
    })
}

fn load(builtin: Option<Builtin>, path: Option<&Path>, disc: Option<i64>) -> Result<GeneralDirichletSeries, CliError> {
    match (builtin, path) {
        (Some(b), None) => builtin_series(b, disc),
        (None, Some(p)) => Ok(read_series(p)?),
        _ => Err(CliError::usage("exactly one of --builtin or --series is required")),
    }
}

impl SeriesArgs {
    fn load(&self) -> Result<GeneralDirichletSeries, CliError> {
        load(self.source.builtin, self.source.series.as_deref(), self.disc)
    }
}

impl OptionalSeriesArgs {
    fn load(&self) -> Result<Option<GeneralDirichletSeries>, CliError> {
        if self.builtin.is_none() && self.series.is_none() {
            return Ok(None);
        }
        load(self.builtin, self.series.as_deref(), self.disc).map(Some)
    }
}

impl OutputArgs {
    fn check(&self) -> Result<(), CliError> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            Err(CliError::usage(format!("--tol must be > 0, got {}", self.tol)))
        }
    }

    fn json_only(&self) -> Result<(), CliError> {
        self.check()?;
        if self.format == Format::Csv {
            return Err(CliError::usage("this command only produces JSON"));
        }
        Ok(())
    }

    fn write(&self, text: &str) -> Result<(), CliError> {
        emit(text, self.output.as_deref())
            .map_err(|e| CliError::new(EXIT_EVALUATION, format!("cannot write report: {e}")))
    }

    fn write_json<T: Serialize>(&self, report: &T) -> Result<(), CliError> {
        let text = to_json(report).map_err(|e| CliError::new(EXIT_EVALUATION, e.to_string()))?;
        self.write(&text)
    }
}

fn degree_of(series: &GeneralDirichletSeries, given: Option<u32>) -> Result<u32, CliError> {
    given
        .or(series.known_invariants().map(|k| k.degree))
        .ok_or_else(|| CliError::usage(format!("series '{}' has no known degree; pass --d", series.name())))
}

fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::new(EXIT_EVALUATION, e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::new(EXIT_EVALUATION, e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Serialize)]
struct EvalReport {
    series: String,
    family: &'static str,
    s: Complex64,
    value: Complex64,
    trunc_error: f64,
    tol: f64,
}

fn cmd_eval(series: &SeriesArgs, s: f64, t: f64, out: &OutputArgs) -> Result<i32, CliError> {
    out.json_only()?;
    let series = series.load()?;
    let point = Complex64::new(s, t);
    let SeriesValue { value, trunc_error } = series.evaluate(point, out.tol)?;
    out.write_json(&EvalReport {
        series: series.name().to_string(),
        family: series.family().tag(),
        s: point,
        value,
        trunc_error,
        tol: out.tol,
    })?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<f64>,
    detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, witness: Option<f64>, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            witness,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Conditions {
    main: ConditionReport,
    selberg_sharp: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    dedekind: Option<ConditionReport>,
}

fn conditions_for(alpha: f64, rho: f64, d: u32, family: &Family) -> Result<Conditions, CliError> {
    let q = (2.0 * PI).powi(d as i32) / alpha;
    let dedekind = match family {
        Family::DedekindQuadratic { discriminant, .. } => {
            Some(dedekind_condition(discriminant.unsigned_abs() as f64, 2, rho)?)
        }
        _ => None,
    };
    Ok(Conditions {
        main: main_condition(alpha, rho, d)?,
        selberg_sharp: selberg_sharp_condition(q, rho, d)?,
        dedekind,
    })
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    series: String,
    family: &'static str,
    d: u32,
    tol: f64,
    all_passed: bool,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    class_b: ClassBReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    mellin: Option<Vec<MellinCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_bound: Option<Vec<GammaBoundReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    law: Option<AsymptoticLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    principal_parts: Option<PrincipalParts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay: Option<Vec<DecayRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidate: Option<CandidateMatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions: Option<Conditions>,
}

fn default_decay_grid() -> Vec<f64> {
    (1..=6).map(f64::from).collect()
}

fn match_grid() -> Vec<f64> {
    (2..=12).map(|k| k as f64 / 2.0).collect()
}

fn close(value: f64, expected: f64, tol: f64) -> bool {
    (value - expected).abs() <= tol * expected.abs().max(1.0)
}

fn cmd_verify(series: &SeriesArgs, d: Option<u32>, out: &OutputArgs) -> Result<i32, CliError> {
    out.json_only()?;
    let series = series.load()?;
    let d = degree_of(&series, d)?;
    let tol = out.tol;
    let mut checks = Vec::new();

    let class_b = series.check_class_b(d, 2, tol)?;
    for c in &class_b.axioms_checked {
        checks.push(Check::new(
            &format!("class_b axiom {}: {}", c.axiom, c.name),
            c.passed,
            c.witness,
            c.detail.clone(),
        ));
    }
    let mut report = VerifyReport {
        series: series.name().to_string(),
        family: series.family().tag(),
        d,
        tol,
        all_passed: false,
        checks: Vec::new(),
        notes: Vec::new(),
        class_b,
        mellin: None,
        gamma_bound: None,
        law: None,
        principal_parts: None,
        decay: None,
        candidate: None,
        conditions: None,
    };

    // everything below presumes the class axioms
    if report.class_b.all_passed() {
        let mut mellin = Vec::new();
        for &s in &MELLIN_POINTS {
            let m = mellin_identity_check(Complex64::new(s, 0.0), 1e-11)?;
            checks.push(Check::new(
                &format!("mellin identity at s = {s}"),
                m.abs_diff < tol,
                Some(m.abs_diff),
                "|lhs - rhs|",
            ));
            mellin.push(m);
        }
        report.mellin = Some(mellin);

        let mut gamma = Vec::new();
        for &sigma in &GAMMA_SIGMAS {
            let g = gamma_ratio_bound_check(sigma, 2.0 * (sigma + 2.0), 1e-10)?;
            gamma.push(g);
        }
        let worst = gamma.iter().map(|g| g.upper_ratio).fold(0.0, f64::max);
        let sane = gamma.iter().all(|g| g.bound_ratio > 0.0 && g.upper_ratio.is_finite());
        checks.push(Check::new(
            "gamma ratio bounded",
            sane,
            Some(worst),
            "max upper ratio over sigma = 2..10",
        ));
        report.gamma_bound = Some(gamma);

        let law = asymptotic_constants(&series, d, None, tol.min(LAW_TOL))?;
        let parts = psi_principal_parts(&series, d, tol.min(1e-9))?;
        let expected_double = 2.0 * (d * d) as f64 * law.g0;
        checks.push(Check::new(
            "psi double pole at 0",
            close(parts.double_pole_at_zero, expected_double, PRINCIPAL_PART_TOL),
            Some(parts.double_pole_at_zero),
            format!("expected 2 d^2 F(0) = {}", fmt_number(expected_double)),
        ));
        checks.push(Check::new(
            "psi residue at 1",
            close(parts.residue_at_one, law.m, PRINCIPAL_PART_TOL),
            Some(parts.residue_at_one),
            format!("expected m = {}", fmt_number(law.m)),
        ));

        let product = BeurlingProduct::new(series.clone(), d, DEFAULT_TRUNC_N)?;
        let decay = decay_verification(&product, &law, &default_decay_grid(), LawReading::Residue)?;
        // at d = 1 the remainder is exponentially small with fixed sign, so the
        // relative residual must shrink; at d >= 2 it oscillates on this grid
        let usable: Vec<f64> = decay
            .iter()
            .filter(|r| !r.cancellation_flag)
            .filter_map(|r| r.residual_log.map(|v| v - r.log_f))
            .collect();
        if d == 1 {
            let shrinking = usable.len() >= 2 && usable.windows(2).all(|w| w[1] < w[0]);
            checks.push(Check::new(
                "decay: relative residual decreasing",
                shrinking,
                usable.last().copied(),
                format!("{} unflagged grid points", usable.len()),
            ));
        } else {
            report.notes.push(format!(
                "decay records are informational at d = {d}: the remainder is not sign-stable on x in [1, 6]"
            ));
        }
        report.decay = Some(decay);

        let conditions = conditions_for(law.alpha, law.rho, d, series.family())?;
        let candidate = match_candidate(&product, &law, &match_grid(), LawReading::Residue, 1e-12)?;
        // uniqueness only predicts a match under its hypothesis
        if !conditions.main.holds {
            report.notes.push("main condition does not hold, so no candidate match is predicted".into());
        } else {
            checks.push(Check::new(
                "candidate form match",
                candidate.matched,
                Some(candidate.max_abs_log_diff),
                format!("best form {:?}", candidate.best.shape),
            ));
        }
        report.law = Some(law);
        report.principal_parts = Some(parts);
        report.candidate = Some(candidate);
        report.conditions = Some(conditions);
    }

    report.all_passed = checks.iter().all(|c| c.passed);
    report.checks = checks;
    out.write_json(&report)?;
    if report.all_passed {
        Ok(EXIT_OK)
    } else {
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!(
                "failed: {} (witness {})",
                c.name,
                c.witness.map_or("none".to_string(), fmt_number)
            );
        }
        Ok(EXIT_FAILED_CHECK)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_invariants(
    series: &OptionalSeriesArgs,
    fit: bool,
    fe: Option<&Path>,
    r_grid: Option<&[f64]>,
    resolution: usize,
    d_max: u32,
    out: &OutputArgs,
) -> Result<i32, CliError> {
    out.check()?;
    if let Some(path) = fe {
        if out.format == Format::Csv {
            return Err(CliError::usage("--fe produces JSON only"));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let data: FunctionalEquationData = serde_path_to_error::deserialize(de).map_err(|e| {
            let at = e.path().to_string();
            let inner = e.into_inner();
            CliError::usage(format!(
                "{}: line {} column {} at '{at}': {inner}",
                path.display(),
                inner.line(),
                inner.column()
            ))
        })?;
        let inv = invariants_from_fe(&data)?;
        out.write_json(&inv)?;
        return Ok(EXIT_OK);
    }
    if !fit {
        return Err(CliError::usage("invariants needs --fit or --fe"));
    }
    let series = series
        .load()?
        .ok_or_else(|| CliError::usage("--fit needs --builtin or --series"))?;
    let grid = r_grid.map(<[f64]>::to_vec).unwrap_or_else(|| DEFAULT_R_GRID.to_vec());
    let profile = max_modulus_profile(&series, &grid, resolution, out.tol)?;
    if out.format == Format::Csv {
        let mut buf = Vec::new();
        profile.write_csv(&mut buf)?;
        out.write(&String::from_utf8(buf).expect("csv output is utf-8"))?;
        return Ok(EXIT_OK);
    }
    let inv: GrowthInvariants = fit_invariants(&profile, d_max)?;
    out.write_json(&inv)?;
    Ok(EXIT_OK)
}

fn product_for(series: &SeriesArgs, args: &ProductArgs) -> Result<BeurlingProduct, CliError> {
    let series = series.load()?;
    let d = degree_of(&series, args.d)?;
    Ok(BeurlingProduct::new(series, d, args.trunc_n)?)
}

#[derive(Debug, Serialize)]
struct ProductReport {
    series: String,
    d: u32,
    trunc_n: usize,
    tail_bound: String,
    values: Vec<ProductValue>,
}

#[derive(Debug, Serialize)]
struct AsymptoteReport {
    series: String,
    law: AsymptoticLaw,
    principal_parts: PrincipalParts,
}

#[derive(Debug, Serialize)]
struct DecayReport {
    series: String,
    reading: LawReading,
    law: AsymptoticLaw,
    records: Vec<DecayRecord>,
    /// Slopes of residual_log against x^{1/d}.
    slopes: Vec<Option<f64>>,
}

fn cmd_beurling(action: &BeurlingCommand) -> Result<i32, CliError> {
    match action {
        BeurlingCommand::Product { series, x, product, out } => {
            out.check()?;
            if x.is_empty() {
                return Err(CliError::usage("--x needs at least one point"));
            }
            let p = product_for(series, product)?;
            let values = x.iter().map(|&x| p.log_f(x, out.tol)).collect::<Result<Vec<_>, _>>()?;
            if out.format == Format::Csv {
                let rows = values
                    .iter()
                    .map(|v| vec![fmt_number(v.x), fmt_number(v.value), fmt_number(v.trunc_error)]);
                out.write(&csv_table(&["x", "log_f", "trunc_error"], rows)?)?;
            } else {
                out.write_json(&ProductReport {
                    series: p.base().name().to_string(),
                    d: p.d(),
                    trunc_n: p.trunc_n(),
                    tail_bound: p.tail_bound_desc().to_string(),
                    values,
                })?;
            }
        }
        BeurlingCommand::Asymptote { series, product, alpha, out } => {
            out.json_only()?;
            let p = product_for(series, product)?;
            let law = asymptotic_constants(p.base(), p.d(), *alpha, out.tol.min(LAW_TOL))?;
            let principal_parts = psi_principal_parts(p.base(), p.d(), out.tol.min(1e-9))?;
            out.write_json(&AsymptoteReport {
                series: p.base().name().to_string(),
                law,
                principal_parts,
            })?;
        }
        BeurlingCommand::Decay {
            series,
            x,
            reading,
            alpha,
            product,
            out,
        } => {
            out.check()?;
            let p = product_for(series, product)?;
            let law = asymptotic_constants(p.base(), p.d(), *alpha, out.tol.min(LAW_TOL))?;
            let grid = x.clone().unwrap_or_else(default_decay_grid);
            let records = decay_verification(&p, &law, &grid, (*reading).into())?;
            if out.format == Format::Csv {
                let rows = records.iter().map(|r| {
                    vec![
                        fmt_number(r.x),
                        fmt_number(r.log_f),
                        fmt_number(r.log_model),
                        r.residual_log.map(fmt_number).unwrap_or_default(),
                        r.cancellation_flag.to_string(),
                    ]
                });
                out.write(&csv_table(
                    &["x", "log_f", "log_model", "residual_log", "cancellation_flag"],
                    rows,
                )?)?;
            } else {
                out.write_json(&DecayReport {
                    series: p.base().name().to_string(),
                    reading: (*reading).into(),
                    law,
                    slopes: residual_slopes(&records, p.d()),
                    records,
                })?;
            }
        }
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct MellinReport {
    tol: f64,
    all_passed: bool,
    checks: Vec<MellinCheck>,
}

fn cmd_mellin(s: Option<&[f64]>, t: f64, out: &OutputArgs) -> Result<i32, CliError> {
    out.json_only()?;
    let points = s.map(<[f64]>::to_vec).unwrap_or_else(|| MELLIN_POINTS.to_vec());
    let quad_tol = (out.tol / 100.0).max(1e-13);
    let checks = points
        .iter()
        .map(|&re| mellin_identity_check(Complex64::new(re, t), quad_tol))
        .collect::<Result<Vec<_>, _>>()?;
    let all_passed = checks.iter().all(|c| c.abs_diff < out.tol);
    out.write_json(&MellinReport {
        tol: out.tol,
        all_passed,
        checks,
    })?;
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILED_CHECK })
}

#[derive(Debug, Serialize)]
struct GammaSweep {
    max_bound_ratio: f64,
    max_upper_ratio: f64,
    all_passed: bool,
    reports: Vec<GammaBoundReport>,
}

fn cmd_gamma_bound(sigma: Option<&[f64]>, t_cut: Option<f64>, out: &OutputArgs) -> Result<i32, CliError> {
    out.json_only()?;
    let sigmas = sigma.map(<[f64]>::to_vec).unwrap_or_else(|| GAMMA_SIGMAS.to_vec());
    let quad_tol = out.tol.min(1e-10);
    let reports = sigmas
        .iter()
        .map(|&s| gamma_ratio_bound_check(s, t_cut.unwrap_or(2.0 * (s + 2.0)), quad_tol))
        .collect::<Result<Vec<_>, _>>()?;
    let all_passed = reports
        .iter()
        .all(|r| r.bound_ratio > 0.0 && r.bound_ratio.is_finite() && r.upper_ratio.is_finite());
    out.write_json(&GammaSweep {
        max_bound_ratio: reports.iter().map(|r| r.bound_ratio).fold(0.0, f64::max),
        max_upper_ratio: reports.iter().map(|r| r.upper_ratio).fold(0.0, f64::max),
        all_passed,
        reports,
    })?;
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILED_CHECK })
}

fn cmd_conditions(
    series: &OptionalSeriesArgs,
    alpha: Option<f64>,
    rho: Option<f64>,
    d: Option<u32>,
    out: &OutputArgs,
) -> Result<i32, CliError> {
    out.json_only()?;
    let conditions = match series.load()? {
        Some(series) => {
            let d = degree_of(&series, d)?;
            let alpha = alpha
                .or(series.known_invariants().map(|k| k.alpha))
                .ok_or_else(|| CliError::usage("--alpha is required for this series"))?;
            let rho = match rho {
                Some(r) => r,
                None => series.residue_at_pole(out.tol.min(LAW_TOL))?,
            };
            conditions_for(alpha, rho, d, series.family())?
        }
        None => {
            let (Some(alpha), Some(rho), Some(d)) = (alpha, rho, d) else {
                return Err(CliError::usage("give a series, or all of --alpha, --rho and --d"));
            };
            conditions_for(alpha, rho, d, &Family::Explicit)?
        }
    };
    out.write_json(&conditions)?;
    Ok(EXIT_OK)
}

impl Cli {
    pub fn execute(&self) -> Result<i32, CliError> {
        match &self.command {
            Command::Eval { series, s, t, out } => cmd_eval(series, *s, *t, out),
            Command::Verify { series, d, out } => cmd_verify(series, *d, out),
            Command::Invariants {
                series,
                fit,
                fe,
                r_grid,
                resolution,
                d_max,
                out,
            } => cmd_invariants(series, *fit, fe.as_deref(), r_grid.as_deref(), *resolution, *d_max, out),
            Command::Beurling { action } => cmd_beurling(action),
            Command::Mellin { s, t, out } => cmd_mellin(s.as_deref(), *t, out),
            Command::GammaBound { sigma, t_cut, out } => cmd_gamma_bound(sigma.as_deref(), *t_cut, out),
            Command::Conditions {
                series,
                alpha,
                rho,
                d,
                out,
            } => cmd_conditions(series, *alpha, *rho, *d, out),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match cli.execute() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn non_integer_degree_maps_to_exit_five() {
        let e: CliError = GrowthError::NonIntegerDegree { raw: 0.66 }.into();
        assert_eq!(e.code, EXIT_NON_INTEGER_DEGREE);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["dirichlet-unique", "eval", "--s", "2"]), EXIT_SCHEMA);
        assert_eq!(run(["dirichlet-unique", "eval", "--builtin", "dedekind", "--s", "2"]), EXIT_SCHEMA);
        assert_eq!(run(["dirichlet-unique", "conditions", "--alpha", "1"]), EXIT_SCHEMA);
    }

    #[test]
    fn builtin_names() {
        for name in ["zeta", "shifted_zeta", "L", "dedekind"] {
            assert!(Builtin::from_str(name, false).is_ok(), "{name}");
        }
    }
}
