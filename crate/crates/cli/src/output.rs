use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::CliError;
use crate::input::Format;

/// Rows of numbers under a header.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows }
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(f64::to_string)).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Output(e.to_string()))
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self.header.iter().cloned().zip(row.iter().map(|&x| Value::from(x))).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        match format {
            Format::Csv => with_sink(path, |w| self.write_csv(w)),
            Format::Json => emit_json(&self.to_json(), path),
        }
    }
}

pub fn emit_json(value: &Value, path: Option<&Path>) -> Result<(), CliError> {
    with_sink(path, |mut w| {
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(w).map_err(|e| CliError::Output(e.to_string()))
    })
}

fn with_sink(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| CliError::Output(format!("{}: {e}", p.display())))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}
