use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::json;

use crate::error::{Error, Result};

pub const SIG_DIGITS: usize = 12;

/// `x` with [`SIG_DIGITS`] significant digits: positional notation for moderate
/// magnitudes, scientific otherwise. Trailing zeros are dropped.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIG_DIGITS as i32).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn error_json(err: &Error) -> String {
    json!({ "error": { "code": err.code(), "message": err.to_string() } }).to_string()
}

pub(super) fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub(super) fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Input(format!("csv: {e}"))
}

/// `(n, value)` pairs from the `n` column and column `column` of a CSV file.
pub fn read_pairs(path: &Path, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Input(format!("csv: {other:?}")),
    })?;
    let headers = reader.headers().map_err(csv_error)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Input(format!("{} has no `{name}` column", path.display())))
    };
    let (ni, vi) = (find("n")?, find(column)?);
    let parse = |field: Option<&str>, line: usize| -> Result<f64> {
        let field = field.unwrap_or("").trim();
        field
            .parse()
            .map_err(|_| Error::Input(format!("line {line}: `{field}` is not a number")))
    };
    reader
        .records()
        .enumerate()
        .map(|(k, rec)| {
            let rec = rec.map_err(csv_error)?;
            Ok((parse(rec.get(ni), k + 2)?, parse(rec.get(vi), k + 2)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(3.0), "3");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(-2.0 / 3.0 * 1e3), "-666.666666667");
        assert_eq!(format_sig(1.5e-9), "1.5e-9");
        assert_eq!(format_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn error_object_shape() {
        let v: serde_json::Value = serde_json::from_str(&error_json(&Error::Size("too big".into()))).unwrap();
        assert_eq!(v["error"]["code"], "size_limit");
        assert!(v["error"]["message"].as_str().unwrap().contains("too big"));
    }
}
