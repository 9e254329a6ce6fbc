//! Tabular benchmark output with a fixed column order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One benchmark measurement. `exact` is empty when the instance is beyond
/// the exact-simulation cap. `wall_time` is seconds spent in the shot loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub k_total: usize,
    pub p: usize,
    pub method: String,
    pub shots: u64,
    pub mean: f64,
    pub stderr: f64,
    pub variance: f64,
    pub exact: Option<f64>,
    pub wall_time: f64,
}

pub const COLUMNS: [&str; 10] = [
    "experiment",
    "k_total",
    "p",
    "method",
    "shots",
    "mean",
    "stderr",
    "variance",
    "exact",
    "wall_time",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new() -> ResultTable {
        ResultTable::default()
    }

    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    /// Zeroes every wall time so the output is reproducible byte for byte.
    pub fn strip_timing(&mut self) {
        for r in &mut self.rows {
            r.wall_time = 0.0;
        }
    }

    pub fn write<W: Write>(&self, w: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => {
                let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
                out.write_record(COLUMNS)?;
                for r in &self.rows {
                    out.serialize(r)?;
                }
                out.flush().map_err(|e| BenchError::io("csv output", e))?;
            }
            Format::Json => {
                let mut w = w;
                serde_json::to_writer_pretty(&mut w, self)?;
                writeln!(w).map_err(|e| BenchError::io("json output", e))?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(r: R, format: Format) -> Result<ResultTable> {
        match format {
            Format::Csv => {
                let mut rdr = csv::Reader::from_reader(r);
                let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
                if header != COLUMNS {
                    return Err(BenchError::Validation(format!("unexpected CSV header {header:?}")));
                }
                let rows = rdr.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
                Ok(ResultTable { rows })
            }
            Format::Json => Ok(serde_json::from_reader(r)?),
        }
    }

    pub fn to_string(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf, format)?;
        Ok(String::from_utf8(buf).expect("table output is UTF-8"))
    }
}
