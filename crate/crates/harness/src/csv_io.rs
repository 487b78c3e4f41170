//! Maps as CSV: one row of the grid per line, comma-separated decimals, no
//! header. Dimensions come from the row and column counts.

use std::fs;
use std::io::Read;
use std::path::Path;

use csv::{ReaderBuilder, Trim};
use specnet_core::SpatialMap;

use crate::error::{HarnessError, Result};

pub fn parse_map(reader: impl Read, path: &Path) -> Result<SpatialMap> {
    let mut csv = ReaderBuilder::new()
        .has_headers(false)
        .trim(Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row, record) in csv.records().enumerate() {
        let record = record.map_err(|source| HarnessError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        let values = record
            .iter()
            .enumerate()
            .map(|(column, text)| {
                text.parse::<f64>().map_err(|_| HarnessError::Number {
                    path: path.to_path_buf(),
                    row: row + 1,
                    column: column + 1,
                    text: text.to_string(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    Ok(SpatialMap::from_rows(&rows)?)
}

pub fn read_map(path: &Path) -> Result<SpatialMap> {
    let file = fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_map(file, path)
}

/// Every value is written with 17 significant digits, enough to read back
/// the identical double.
pub fn format_map(map: &SpatialMap) -> String {
    let mut out = String::with_capacity(map.samples().len() * 24);
    for row in map.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_map(path: &Path, map: &SpatialMap) -> Result<()> {
    fs::write(path, format_map(map)).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
