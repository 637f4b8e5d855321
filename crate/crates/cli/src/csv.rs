use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }
}

/// Formats `v` with 12 significant digits in the style of C's `%.12g`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Renders a table to CSV text. Rejects ragged rows and non-finite values.
pub fn render(table: &Table) -> Result<String, CliError> {
    let width = table.header.len();
    let mut out = table.header.join(",");
    out.push('\n');
    for (r, row) in table.rows.iter().enumerate() {
        if row.len() != width {
            return Err(CliError::Output(format!(
                "row {r} has {} fields, header has {width}",
                row.len()
            )));
        }
        for (c, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(CliError::Output(format!(
                    "non-finite value {v} in column {} row {r}",
                    table.header[c]
                )));
            }
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", format_value(*v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes a table as CSV: UTF-8, comma separated, LF line endings.
pub fn emit_csv(table: &Table, path: &Path) -> Result<(), CliError> {
    let text = render(table)?;
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
