//! Parsers for CLI inputs: dilations, piece lists, and matrix sets.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crystal_wavelets as cw;

/// Parse a dilation given as `"<n>I"` (scalar multiple of the identity)
/// or as a row-major JSON matrix like `"[[1,1],[-1,1]]"`.
pub fn parse_dilation(text: &str, dimension: usize) -> anyhow::Result<cw::IMat> {
    let trimmed = text.trim();
    if let Some(scalar) = trimmed.strip_suffix('I').and_then(|s| s.parse::<i64>().ok()) {
        return Ok(cw::IMat::identity(dimension, dimension) * scalar);
    }
    let rows: Vec<Vec<i64>> = serde_json::from_str(trimmed)
        .map_err(|e| anyhow::anyhow!("--dilation: expected e.g. \"2I\" or \"[[2,0],[0,2]]\": {e}"))?;
    if rows.len() != dimension || rows.iter().any(|r| r.len() != dimension) {
        anyhow::bail!("--dilation: expected a {dimension}x{dimension} matrix");
    }
    Ok(cw::IMat::from_fn(dimension, dimension, |i, j| rows[i][j]))
}

#[derive(Deserialize)]
struct PieceEntry {
    /// 1-based point group index.
    g: usize,
    k: Vec<i64>,
}

#[derive(Deserialize)]
struct PiecesFile {
    pieces: Vec<PieceEntry>,
}

/// Load a tile piece list `{"pieces": [{"g": 1, "k": [0,0]}, ...]}`.
pub fn load_pieces(
    path: &Path,
    triple: &cw::SplittingCrystalTriple,
) -> anyhow::Result<Vec<cw::GroupElement>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let file: PiecesFile = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let r = triple.order();
    let d = triple.dimension();
    file.pieces
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.g == 0 || p.g > r {
                anyhow::bail!("{}: pieces[{i}].g = {} out of range 1..={r}", path.display(), p.g);
            }
            if p.k.len() != d {
                anyhow::bail!(
                    "{}: pieces[{i}].k has {} components, expected {d}",
                    path.display(),
                    p.k.len()
                );
            }
            Ok(cw::GroupElement::new(p.g - 1, p.k.clone()))
        })
        .collect()
}

#[derive(Deserialize)]
struct JsrSetFile {
    size: usize,
    /// Row-major matrices, each entry `[re, im]`.
    matrices: Vec<Vec<[f64; 2]>>,
}

/// Load a matrix set `{"size": s, "matrices": [[[re,im],...], ...]}`.
pub fn load_jsr_set(path: &Path) -> anyhow::Result<Vec<cw::CMat>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let file: JsrSetFile = serde_json::from_str(&text)
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let s = file.size;
    file.matrices
        .iter()
        .enumerate()
        .map(|(i, vals)| {
            if vals.len() != s * s {
                anyhow::bail!(
                    "{}: matrices[{i}] has {} entries, expected {}",
                    path.display(),
                    vals.len(),
                    s * s
                );
            }
            Ok(cw::CMat::from_fn(s, s, |a, b| {
                let [re, im] = vals[a * s + b];
                Complex64::new(re, im)
            }))
        })
        .collect()
}
