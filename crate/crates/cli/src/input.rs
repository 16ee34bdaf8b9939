use std::path::Path;

use serde_json::Value;
use starres_core::numerics::HermitianMatrix;
use starres_core::quantum_rep::{mixture_from_choi, PauliHalfMixture, TwoQubitFano};
use starres_core::total_corr::JointDistribution;
use starres_core::unistochastic::CirculantBistochastic;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Raw input text with its resolved format. `--input` is either a path, `-`
/// for stdin, or inline JSON starting with `{` or `[`.
pub struct Input {
    pub text: String,
    pub format: Format,
}

impl Input {
    pub fn load(source: &str, forced: Option<Format>) -> Result<Self, CliError> {
        let trimmed = source.trim_start();
        if trimmed.starts_with('{') || trimmed.starts_with('[') {
            return Ok(Self { text: source.to_owned(), format: forced.unwrap_or(Format::Json) });
        }
        let text = if source == "-" {
            std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Input(format!("reading stdin: {e}")))?
        } else {
            std::fs::read_to_string(source).map_err(|e| CliError::Input(format!("reading {source}: {e}")))?
        };
        let by_ext = match Path::new(source).extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        };
        Ok(Self { text, format: forced.unwrap_or(by_ext) })
    }

    fn json(&self) -> Result<Value, CliError> {
        serde_json::from_str(&self.text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))
    }

    /// Numeric rows; a leading non-numeric record is treated as a header.
    fn csv_rows(&self) -> Result<Vec<Vec<f64>>, CliError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(self.text.as_bytes());
        let mut rows = Vec::new();
        for (k, record) in reader.records().enumerate() {
            let record = record.map_err(|e| CliError::Input(format!("malformed CSV: {e}")))?;
            let parsed: Result<Vec<f64>, _> = record.iter().filter(|f| !f.is_empty()).map(str::parse::<f64>).collect();
            match parsed {
                Ok(r) if !r.is_empty() => rows.push(r),
                Ok(_) => {}
                Err(_) if k == 0 => {}
                Err(e) => return Err(CliError::Input(format!("CSV line {}: {e}", k + 1))),
            }
        }
        Ok(rows)
    }

    /// Either a flat vector or a matrix, from JSON (bare or under the first
    /// present key) or CSV.
    fn numbers(&self, keys: &[&str]) -> Result<Numbers, CliError> {
        match self.format {
            Format::Csv => {
                let rows = self.csv_rows()?;
                Ok(if rows.len() == 1 { Numbers::Vector(rows[0].clone()) } else { Numbers::Matrix(rows) })
            }
            Format::Json => {
                let v = self.json()?;
                let v = match &v {
                    Value::Object(map) => keys
                        .iter()
                        .find_map(|k| map.get(*k).cloned())
                        .ok_or_else(|| CliError::Input(format!("expected one of the keys {keys:?}")))?,
                    other => other.clone(),
                };
                Numbers::from_value(v)
            }
        }
    }
}

enum Numbers {
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

impl Numbers {
    fn from_value(v: Value) -> Result<Self, CliError> {
        let bad = |e: serde_json::Error| CliError::Input(format!("expected numbers: {e}"));
        match &v {
            Value::Array(items) if items.first().is_some_and(Value::is_array) => {
                serde_json::from_value(v).map(Numbers::Matrix).map_err(bad)
            }
            _ => serde_json::from_value(v).map(Numbers::Vector).map_err(bad),
        }
    }
}

pub fn fano(input: &Input) -> Result<TwoQubitFano, CliError> {
    if input.format == Format::Csv {
        return Err(CliError::Input("discord input must be Fano JSON {x, y, T}".into()));
    }
    serde_json::from_value(input.json()?).map_err(|e| CliError::Input(format!("malformed Fano state: {e}")))
}

pub fn joint(input: &Input) -> Result<JointDistribution, CliError> {
    let rows = match input.numbers(&["p"])? {
        Numbers::Matrix(m) => m,
        Numbers::Vector(_) => return Err(CliError::Input("expected a probability matrix".into())),
    };
    Ok(JointDistribution::new(rows)?)
}

pub fn circulant(input: &Input, tol: f64) -> Result<CirculantBistochastic, CliError> {
    let matrix = match input.numbers(&["row", "matrix"])? {
        Numbers::Vector(row) if row.len() == 4 => (0..4).map(|r| (0..4).map(|s| row[(s + 4 - r) % 4]).collect()).collect(),
        Numbers::Vector(row) => return Err(CliError::Input(format!("generating row needs 4 entries, got {}", row.len()))),
        Numbers::Matrix(m) => m,
    };
    Ok(CirculantBistochastic::from_matrix(&matrix, tol)?)
}

pub fn mixture(input: &Input, tol: f64) -> Result<PauliHalfMixture, CliError> {
    let numbers = match (input.format, input.json().ok()) {
        (Format::Json, Some(Value::Object(map))) if map.contains_key("a") => {
            let get = |k: &str| {
                map.get(k)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| CliError::Input(format!("missing numeric field {k}")))
            };
            Numbers::Vector(vec![get("a")?, get("b")?, get("c")?])
        }
        _ => input.numbers(&["choi", "weights"])?,
    };
    match numbers {
        Numbers::Vector(w) if w.len() == 3 => {
            if w.iter().any(|v| !v.is_finite() || *v < -tol) || (w.iter().sum::<f64>() - 1.0).abs() > tol {
                return Err(CliError::Input(format!("{w:?} is not a probability vector within tolerance {tol}")));
            }
            let clipped: Vec<f64> = w.iter().map(|v| v.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            Ok(PauliHalfMixture::from_weights([clipped[0] / total, clipped[1] / total, clipped[2] / total])?)
        }
        Numbers::Vector(w) => Err(CliError::Input(format!("expected weights (a, b, c), got {} numbers", w.len()))),
        Numbers::Matrix(m) => {
            if m.len() != 4 || m.iter().any(|r| r.len() != 4) {
                return Err(CliError::Input("Choi matrix must be 4×4".into()));
            }
            let flat: Vec<f64> = m.into_iter().flatten().collect();
            Ok(mixture_from_choi(&HermitianMatrix::from_real(4, &flat)?, tol)?)
        }
    }
}
