//! Small parsers for CLI value syntaxes.

use beamsparse_core::matkit::{self, parse_complex, read_cmatrix, UnitaryMatrix};
use beamsparse_core::Complex64;

/// Dimension lists: comma-separated tokens, each `N` or an inclusive
/// range `A..B` (`2,4,8` or `3..32` or `2,4..6,9`).
pub fn parse_dim_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = tok.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .map_err(|_| format!("bad range start in {tok:?}"))?;
            let hi: usize = hi
                .trim()
                .parse()
                .map_err(|_| format!("bad range end in {tok:?}"))?;
            if hi < lo {
                return Err(format!("empty range {tok:?}"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(tok.parse().map_err(|_| format!("bad dimension {tok:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("no dimensions given".into());
    }
    Ok(out)
}

/// SNR grids: comma-separated dB values, or `LO..HI:STEP` inclusive.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>, String> {
    if let Some((range, step)) = text.split_once(':') {
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| format!("expected LO..HI:STEP, got {text:?}"))?;
        let lo: f64 = lo.trim().parse().map_err(|_| "bad range start".to_string())?;
        let hi: f64 = hi.trim().parse().map_err(|_| "bad range end".to_string())?;
        let step: f64 = step.trim().parse().map_err(|_| "bad step".to_string())?;
        if !(step > 0.0) || hi < lo {
            return Err(format!("degenerate SNR range {text:?}"));
        }
        let mut grid = Vec::new();
        let mut v = lo;
        while v <= hi + 1e-9 {
            grid.push(v);
            v += step;
        }
        return Ok(grid);
    }
    let grid: Result<Vec<f64>, _> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad SNR {t:?}")))
        .collect();
    let grid = grid?;
    if grid.is_empty() {
        return Err("empty SNR grid".into());
    }
    Ok(grid)
}

/// Complex gain lists in the `re±imj` token form: `1+0j,0.5-0.2j`.
pub fn parse_gains(text: &str) -> Result<Vec<Complex64>, String> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            parse_complex(t).ok_or_else(|| format!("bad complex token {t:?}"))
        })
        .collect()
}

/// Transform sources: `dft`, `dct`, `identity`, `random:SEED`,
/// `file:PATH`.
pub fn parse_transform(text: &str, dim: usize) -> Result<UnitaryMatrix, String> {
    let build = |r: beamsparse_core::Result<UnitaryMatrix>| r.map_err(|e| e.to_string());
    match text {
        "dft" => build(matkit::dft_matrix(dim)),
        "dct" => build(matkit::dct2_matrix(dim)),
        "identity" => build(UnitaryMatrix::new(matkit::CMatrix::identity(dim))),
        other => {
            if let Some(seed) = other.strip_prefix("random:") {
                let seed: u64 = seed.parse().map_err(|_| format!("bad seed in {other:?}"))?;
                build(matkit::random_unitary(dim, seed))
            } else if let Some(path) = other.strip_prefix("file:") {
                let m = read_cmatrix(path).map_err(|e| e.to_string())?;
                if m.rows() != dim {
                    return Err(format!(
                        "transform in {path} is {}x{}, expected {dim}x{dim}",
                        m.rows(),
                        m.cols()
                    ));
                }
                build(UnitaryMatrix::new(m))
            } else {
                Err(format!(
                    "unknown transform {other:?} (dft | dct | identity | random:SEED | file:PATH)"
                ))
            }
        }
    }
}
