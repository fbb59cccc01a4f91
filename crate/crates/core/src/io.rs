//! Plain-text and image writers shared by the solvers and the CLI.
//!
//! Floating-point values are written with nine significant digits in
//! scientific notation so that diffs between runs stay readable.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Formats a float with nine significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.8e}")
}

/// Writes a header row followed by numeric rows.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        write_row(&mut w, &row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a header row followed by rows of preformatted cells.
pub fn write_csv_text(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Space-time matrix: one row per snapshot, first column the time, then one
/// column per cell.
pub fn write_space_time_csv(path: &Path, times: &[f64], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = create(path)?;
    let ncols = rows.first().map_or(0, Vec::len);
    let mut header = String::from("t");
    for i in 0..ncols {
        header.push_str(&format!(",x{i}"));
    }
    writeln!(w, "{header}")?;
    for (t, row) in times.iter().zip(rows) {
        let mut line = fmt_f64(*t);
        for v in row {
            line.push(',');
            line.push_str(&fmt_f64(*v));
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn write_row(w: &mut impl Write, row: &[f64]) -> std::io::Result<()> {
    let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
    writeln!(w, "{}", line.join(","))
}

/// Rounds every floating-point number in a JSON tree to nine significant
/// digits. Integers and non-numbers pass through.
pub fn round_json(value: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r: f64 = fmt_f64(x).parse().unwrap();
            serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

/// [`write_json`] after [`round_json`].
pub fn write_json_rounded<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    write_json(path, &round_json(serde_json::to_value(value)?))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Binary 8-bit graymap of a row-major matrix, linearly mapped from
/// `[lo, hi]` to `[0, 255]`. Rows are written top to bottom.
pub fn write_pgm(path: &Path, rows: &[Vec<f64>], lo: f64, hi: f64) -> Result<()> {
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut w = create(path)?;
    write!(w, "P5\n{width} {height}\n255\n")?;
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut buf = Vec::with_capacity(width * height);
    for row in rows {
        for &v in row {
            let g = ((v - lo) / span).clamp(0.0, 1.0) * 255.0;
            buf.push(g.round() as u8);
        }
    }
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_f64(0.4875124378), "4.87512438e-1");
        assert_eq!(fmt_f64(0.0), "0.00000000e0");
    }

    #[test]
    fn json_numbers_are_rounded() {
        let v = serde_json::json!({"x": 0.48751243781094, "n": 7, "v": [1.0 / 3.0], "s": "a"});
        let r = round_json(v);
        assert_eq!(r["x"].as_f64().unwrap(), 0.487512438);
        assert_eq!(r["n"].as_u64().unwrap(), 7);
        assert_eq!(r["v"][0].as_f64().unwrap(), 0.333333333);
        assert_eq!(r["s"], "a");
    }

    #[test]
    fn space_time_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_space_time_csv(&path, &[0.0, 1.0], &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x0,x1");
        assert_eq!(lines[2], "1.00000000e0,3.00000000e0,4.00000000e0");
    }

    #[test]
    fn graymap_header_and_size() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        write_pgm(&path, &[vec![0.0, 0.5, 1.0], vec![1.0, 1.0, 2.0]], 0.0, 1.0).unwrap();
        let bytes = fs::read(&path).unwrap();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0, 128, 255, 255, 255, 255]);
    }
}
