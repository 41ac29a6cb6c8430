//! Matrix persistence.
//!
//! Binary format "cmx1": little-endian, header = magic `CMX1`,
//! u32 rows, u32 cols; payload = rows·cols pairs of f64 (re, im) in
//! row-major order. Round-trips are bit-exact.
//!
//! Text format: CSV with one matrix row per line and entries written as
//! `re±imj` tokens using shortest round-trip float formatting.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use super::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::Complex64;

const MAGIC: &[u8; 4] = b"CMX1";

/// Writes a matrix in the binary "cmx1" format.
pub fn write_cmatrix(m: &CMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(m.rows() as u32).to_le_bytes())?;
    w.write_all(&(m.cols() as u32).to_le_bytes())?;
    for z in m.entries() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix in the binary "cmx1" format.
pub fn read_cmatrix(path: impl AsRef<Path>) -> Result<CMatrix> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected \"CMX1\"",
            String::from_utf8_lossy(&magic)
        )));
    }
    let mut dim = [0u8; 4];
    read_exact(&mut r, &mut dim)?;
    let rows = u32::from_le_bytes(dim) as usize;
    read_exact(&mut r, &mut dim)?;
    let cols = u32::from_le_bytes(dim) as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::Format(format!("invalid dimensions {rows}x{cols}")));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut buf = [0u8; 16];
    for _ in 0..rows * cols {
        read_exact(&mut r, &mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
        data.push(Complex::new(re, im));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    CMatrix::new(rows, cols, data).map_err(|e| Error::Format(e.to_string()))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Format("file truncated".into()))
}

/// Writes the CSV text form: `re±imj` tokens, comma separated.
pub fn write_cmatrix_csv(m: &CMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|z| format_entry(*z)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the CSV text form.
pub fn read_cmatrix_csv(path: impl AsRef<Path>) -> Result<CMatrix> {
    let r = BufReader::new(std::fs::File::open(path)?);
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<Complex64>> = line
            .split(',')
            .map(|tok| {
                parse_entry(tok.trim()).ok_or_else(|| {
                    Error::Format(format!("line {}: bad entry {tok:?}", lineno + 1))
                })
            })
            .collect();
        rows.push(row?);
    }
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Format("empty CSV matrix".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format("ragged CSV rows".into()));
    }
    CMatrix::new(nrows, ncols, rows.concat()).map_err(|e| Error::Format(e.to_string()))
}

/// Formats a complex entry as `re±imj` with shortest round-trip floats.
pub fn format_complex(z: Complex64) -> String {
    if z.im >= 0.0 || z.im.is_nan() {
        format!("{}+{}j", z.re, z.im)
    } else {
        format!("{}{}j", z.re, z.im)
    }
}

fn format_entry(z: Complex64) -> String {
    format_complex(z)
}

/// Parses `re±imj`; the imaginary part (with its sign) ends in `j`.
pub fn parse_complex(tok: &str) -> Option<Complex64> {
    parse_entry(tok)
}

fn parse_entry(tok: &str) -> Option<Complex64> {
    let body = tok.strip_suffix(['j', 'J'])?;
    // Split at the sign of the imaginary part: the last '+'/'-' that is
    // not an exponent sign and not the leading sign.
    let bytes = body.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx];
        if (c == b'+' || c == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
            split = Some(idx);
            break;
        }
    }
    let split = split?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    if !re.is_finite() || !im.is_finite() {
        return None;
    }
    Some(Complex::new(re, im))
}
