//! `series.csv`: one row per sample, fixed columns, 17 significant digits.

use std::path::Path;

use zkb_core::NormSample;

use crate::error::{HarnessError, Result};

pub const SERIES_FILE: &str = "series.csv";
pub const COLUMNS: [&str; 7] = ["t", "l2", "diss_cum", "w_l2", "w_h1", "sup_w", "tail"];

/// Decimal scientific notation with 17 significant digits. Independent of
/// locale, and round-trips every `f64` exactly.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_series(path: &Path, samples: &[NormSample<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(COLUMNS).map_err(|e| csv_err(path, e))?;
    for s in samples {
        let row = [s.t, s.l2, s.diss_cum, s.w_l2, s.w_h1, s.sup_w, s.tail].map(format_real);
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_series(path: &Path) -> Result<Vec<NormSample<f64>>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(COLUMNS) {
        return Err(HarnessError::format(
            path,
            format!("unexpected header {:?}, expected {}", header, COLUMNS.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let v: Vec<f64> = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| HarnessError::format(path, format!("row {}: {e}", line + 2)))?;
        out.push(NormSample {
            t: v[0],
            l2: v[1],
            diss_cum: v[2],
            w_l2: v[3],
            w_h1: v[4],
            sup_w: v[5],
            tail: v[6],
        });
    }
    Ok(out)
}

fn csv_err(path: &Path, e: csv::Error) -> HarnessError {
    HarnessError::format(path, e.to_string())
}
