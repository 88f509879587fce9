//! Series-definition files:
//!
//! ```json
//! { "name": "...", "family": "explicit", "params": {},
//!   "terms": [[1.0, 1.0], [2.0, 0.5]],
//!   "tail_bound": { "type": "integral_test", "params": { "density": 1.0 } } }
//! ```
//!
//! `family` is one of `riemann_zeta`, `shifted_zeta`, `dirichlet_L`
//! (params `modulus`, `values`), `dedekind_quadratic` (params
//! `discriminant`) or `explicit`. Tail bounds are `integral_test`
//! (`density`, optional `from`) or `geometric` (`coeff_bound`, `ratio`,
//! optional `from`); only explicit series carry one.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::{DirichletCharacter, DirichletError, Family, GeneralDirichletSeries, TailBound, Term};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub name: String,
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub terms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<TailBoundFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailBoundFile {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LParams {
    modulus: u64,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DedekindParams {
    discriminant: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegralParams {
    density: f64,
    from: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometricParams {
    coeff_bound: f64,
    ratio: f64,
    from: Option<f64>,
}

/// Where and why a series file was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct SchemaError {
    /// Field path such as `terms[3][0]` or `tail_bound.params.density`.
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "<root>" } else { &self.path };
        write!(f, "{path}: {}", self.message)?;
        if let Some(line) = self.line {
            write!(f, " (line {line}")?;
            if let Some(col) = self.column {
                write!(f, ", column {col}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl SchemaError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SeriesLoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(#[from] SchemaError),
}

fn typed<T: DeserializeOwned>(map: &Map<String, Value>, prefix: &str) -> Result<T, SchemaError> {
    serde_path_to_error::deserialize(Value::Object(map.clone())).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." || inner.is_empty() {
            prefix.to_string()
        } else {
            format!("{prefix}.{inner}")
        };
        SchemaError::at(path, e.into_inner().to_string())
    })
}

/// Parses a series file, reporting the field path (and line for syntax
/// and type errors) of the first problem.
pub fn parse_series(text: &str) -> Result<GeneralDirichletSeries, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: SeriesFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SchemaError {
            path: if path == "." { String::new() } else { path },
            line: Some(inner.line()),
            column: Some(inner.column()),
            message: inner.to_string(),
        }
    })?;
    file.into_series()
}

pub fn read_series(path: impl AsRef<Path>) -> Result<GeneralDirichletSeries, SeriesLoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| SeriesLoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_series(&text)?)
}

fn series_error(path: &str, e: DirichletError) -> SchemaError {
    SchemaError::at(path, e.to_string())
}

impl SeriesFile {
    pub fn into_series(self) -> Result<GeneralDirichletSeries, SchemaError> {
        const FAMILIES: [&str; 5] = ["riemann_zeta", "shifted_zeta", "dirichlet_L", "dedekind_quadratic", "explicit"];
        if !FAMILIES.contains(&self.family.as_str()) {
            return Err(SchemaError::at(
                "family",
                format!("unknown family '{}' (expected one of {})", self.family, FAMILIES.join(", ")),
            ));
        }
        let builtin = self.family != "explicit";
        if builtin && !self.terms.is_empty() {
            return Err(SchemaError::at("terms", "built-in families take no explicit terms"));
        }
        if builtin && self.tail_bound.is_some() {
            return Err(SchemaError::at("tail_bound", "built-in families take no tail bound"));
        }
        let series = match self.family.as_str() {
            "riemann_zeta" => {
                typed::<NoParams>(&self.params, "params")?;
                GeneralDirichletSeries::riemann_zeta()
            }
            "shifted_zeta" => {
                typed::<NoParams>(&self.params, "params")?;
                GeneralDirichletSeries::shifted_zeta()
            }
            "dirichlet_L" => {
                let p: LParams = typed(&self.params, "params")?;
                let chi = DirichletCharacter::new(p.modulus, p.values).map_err(|e| series_error("params.values", e))?;
                GeneralDirichletSeries::dirichlet_l(chi)
            }
            "dedekind_quadratic" => {
                let p: DedekindParams = typed(&self.params, "params")?;
                GeneralDirichletSeries::dedekind_quadratic(p.discriminant)
                    .map_err(|e| series_error("params.discriminant", e))?
            }
            "explicit" => {
                typed::<NoParams>(&self.params, "params")?;
                let tail = self
                    .tail_bound
                    .as_ref()
                    .ok_or_else(|| SchemaError::at("tail_bound", "explicit series require a tail bound"))?;
                let tail = tail.to_bound()?;
                for (i, pair) in self.terms.iter().enumerate() {
                    if !(pair[0] > 0.0 && pair[0].is_finite()) {
                        return Err(SchemaError::at(format!("terms[{i}][0]"), "lambda must be finite and > 0"));
                    }
                    if !pair[1].is_finite() {
                        return Err(SchemaError::at(format!("terms[{i}][1]"), "coefficient must be finite"));
                    }
                    if i > 0 && pair[0] <= self.terms[i - 1][0] {
                        return Err(SchemaError::at(
                            format!("terms[{i}][0]"),
                            format!("lambda must be strictly increasing ({} after {})", pair[0], self.terms[i - 1][0]),
                        ));
                    }
                }
                let terms = self.terms.iter().map(|p| Term::new(p[0], p[1])).collect();
                GeneralDirichletSeries::explicit(self.name.clone(), terms, tail)
                    .map_err(|e| series_error("tail_bound.params", e))?
            }
            _ => unreachable!("family checked above"),
        };
        Ok(series.with_name(self.name))
    }

    pub fn from_series(series: &GeneralDirichletSeries) -> Self {
        let mut params = Map::new();
        match series.family() {
            Family::DirichletL { character } => {
                params.insert("modulus".into(), Value::from(character.modulus()));
                params.insert("values".into(), Value::from(character.values().to_vec()));
            }
            Family::DedekindQuadratic { discriminant, .. } => {
                params.insert("discriminant".into(), Value::from(*discriminant));
            }
            _ => {}
        }
        Self {
            name: series.name().to_string(),
            family: series.family().tag().to_string(),
            params,
            terms: series.terms().iter().map(|t| [t.lambda, t.a]).collect(),
            tail_bound: series.tail_bound().map(TailBoundFile::from_bound),
        }
    }
}

impl TailBoundFile {
    fn to_bound(&self) -> Result<TailBound, SchemaError> {
        match self.kind.as_str() {
            "integral_test" => {
                let p: IntegralParams = typed(&self.params, "tail_bound.params")?;
                Ok(TailBound::IntegralTest {
                    density: p.density,
                    from: p.from,
                })
            }
            "geometric" => {
                let p: GeometricParams = typed(&self.params, "tail_bound.params")?;
                Ok(TailBound::Geometric {
                    coeff_bound: p.coeff_bound,
                    ratio: p.ratio,
                    from: p.from,
                })
            }
            other => Err(SchemaError::at(
                "tail_bound.type",
                format!("unknown tail bound '{other}' (expected integral_test or geometric)"),
            )),
        }
    }

    fn from_bound(bound: &TailBound) -> Self {
        let mut params = Map::new();
        let (kind, from) = match *bound {
            TailBound::IntegralTest { density, from } => {
                params.insert("density".into(), Value::from(density));
                ("integral_test", from)
            }
            TailBound::Geometric { coeff_bound, ratio, from } => {
                params.insert("coeff_bound".into(), Value::from(coeff_bound));
                params.insert("ratio".into(), Value::from(ratio));
                ("geometric", from)
            }
        };
        if let Some(f) = from {
            params.insert("from".into(), Value::from(f));
        }
        Self {
            kind: kind.into(),
            params,
        }
    }
}
