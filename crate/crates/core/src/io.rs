//! File formats: JSON specs for masks and banks, CSV and raw dumps for
//! sampled data, and PGM rendering.
//!
//! Group-element indices are 1-based in the JSON files (matching the
//! usual mathematical numbering with the identity first) and 0-based in
//! the API.

use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bank::{FilterBank, VectorSequence};
use crate::group::{GroupElement, GroupError, GroupSpec, SplittingCrystalTriple};
use crate::refine::{GridBox, MatrixMask, SampledVectorFunction, ScalarMask};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Format {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Reference to a crystal triple: a preset name, a path to a group spec
/// file, or the spec inline.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Inline(GroupSpec),
}

impl GroupRef {
    pub fn resolve(&self) -> Result<SplittingCrystalTriple, GroupError> {
        match self {
            GroupRef::Name(name) => crate::group::load_group_spec(name),
            GroupRef::Inline(spec) => spec.build(),
        }
    }

    pub fn from_triple(t: &SplittingCrystalTriple) -> Self {
        GroupRef::Inline(GroupSpec::from_triple(t))
    }
}

/// One scalar mask coefficient: group element `(g, k)` with a complex
/// value; `g` is 1-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarEntry {
    pub g: usize,
    pub k: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalarMaskFile {
    pub group: GroupRef,
    pub entries: Vec<ScalarEntry>,
}

pub fn scalar_entries(mask: &ScalarMask) -> Vec<ScalarEntry> {
    mask.iter()
        .map(|(el, v)| ScalarEntry {
            g: el.point + 1,
            k: el.translation.clone(),
            re: v.re,
            im: v.im,
        })
        .collect()
}

pub fn scalar_mask_from_entries(
    entries: &[ScalarEntry],
    triple: &SplittingCrystalTriple,
    path: &Path,
) -> Result<ScalarMask, IoError> {
    let r = triple.order();
    let d = triple.dimension();
    let mut mask = ScalarMask::new(d);
    for (i, e) in entries.iter().enumerate() {
        if e.g == 0 || e.g > r {
            return Err(format_err(
                path,
                format!("entries[{i}].g = {} out of range 1..={r}", e.g),
            ));
        }
        if e.k.len() != d {
            return Err(format_err(
                path,
                format!("entries[{i}].k has {} components, expected {d}", e.k.len()),
            ));
        }
        mask.add(
            &GroupElement::new(e.g - 1, e.k.clone()),
            Complex64::new(e.re, e.im),
        );
    }
    Ok(mask)
}

pub fn save_scalar_mask(
    mask: &ScalarMask,
    triple: &SplittingCrystalTriple,
    path: &Path,
) -> Result<(), IoError> {
    let file = ScalarMaskFile {
        group: GroupRef::from_triple(triple),
        entries: scalar_entries(mask),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_scalar_mask(
    path: &Path,
) -> Result<(ScalarMask, SplittingCrystalTriple), IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: ScalarMaskFile = serde_json::from_str(&text)
        .map_err(|e| format_err(path, e.to_string()))?;
    let triple = file.group.resolve()?;
    let mask = scalar_mask_from_entries(&file.entries, &triple, path)?;
    Ok((mask, triple))
}

/// Matrix mask coefficient: translation `k` and the row-major `r×r`
/// complex matrix as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub k: Vec<i64>,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixMaskFile {
    pub group: GroupRef,
    pub size: usize,
    pub entries: Vec<MatrixEntry>,
}

pub fn save_matrix_mask(
    mask: &MatrixMask,
    triple: &SplittingCrystalTriple,
    path: &Path,
) -> Result<(), IoError> {
    let r = mask.size();
    let entries = mask
        .iter()
        .map(|(k, mat)| MatrixEntry {
            k: k.clone(),
            matrix: (0..r * r)
                .map(|t| {
                    let z = mat[(t / r, t % r)];
                    [z.re, z.im]
                })
                .collect(),
        })
        .collect();
    let file = MatrixMaskFile {
        group: GroupRef::from_triple(triple),
        size: r,
        entries,
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_matrix_mask(
    path: &Path,
) -> Result<(MatrixMask, SplittingCrystalTriple), IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: MatrixMaskFile = serde_json::from_str(&text)
        .map_err(|e| format_err(path, e.to_string()))?;
    let triple = file.group.resolve()?;
    let r = file.size;
    let d = triple.dimension();
    let mut mask = MatrixMask::new(d, r);
    for (i, e) in file.entries.iter().enumerate() {
        if e.k.len() != d {
            return Err(format_err(
                path,
                format!("entries[{i}].k has {} components, expected {d}", e.k.len()),
            ));
        }
        if e.matrix.len() != r * r {
            return Err(format_err(
                path,
                format!(
                    "entries[{i}].matrix has {} values, expected {}",
                    e.matrix.len(),
                    r * r
                ),
            ));
        }
        let mat = crate::linalg::CMat::from_fn(r, r, |a, b| {
            let [re, im] = e.matrix[a * r + b];
            Complex64::new(re, im)
        });
        mask.insert(e.k.clone(), mat);
    }
    Ok((mask, triple))
}

/// Validation stamp recorded in bank files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationStamp {
    pub condition_d_violation: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BankFile {
    pub group: GroupRef,
    pub masks: Vec<Vec<ScalarEntry>>,
    pub validation: ValidationStamp,
}

pub fn save_bank(
    bank: &FilterBank,
    triple: &SplittingCrystalTriple,
    stamp: ValidationStamp,
    path: &Path,
) -> Result<(), IoError> {
    let file = BankFile {
        group: GroupRef::from_triple(triple),
        masks: bank.scalar_masks().iter().map(scalar_entries).collect(),
        validation: stamp,
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_bank(
    path: &Path,
) -> Result<(FilterBank, SplittingCrystalTriple, ValidationStamp), IoError> {
    let text = std::fs::read_to_string(path)?;
    let file: BankFile = serde_json::from_str(&text)
        .map_err(|e| format_err(path, e.to_string()))?;
    let triple = file.group.resolve()?;
    let mut masks = Vec::with_capacity(file.masks.len());
    for entries in &file.masks {
        masks.push(scalar_mask_from_entries(entries, &triple, path)?);
    }
    let bank = FilterBank::from_scalar_masks(masks, &triple)
        .map_err(|e| format_err(path, e.to_string()))?;
    Ok((bank, triple, file.validation))
}

/// CSV dump of a sampled function: index columns then `re,im` per channel.
pub fn write_sampled_csv(f: &SampledVectorFunction, path: &Path) -> Result<(), IoError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let d = f.dimension();
    let mut header: Vec<String> = (0..d).map(|a| format!("j{a}")).collect();
    for ch in 0..f.channels() {
        header.push(format!("re{ch}"));
        header.push(format!("im{ch}"));
    }
    writeln!(out, "{}", header.join(","))?;
    for idx in f.grid().iter() {
        let mut row: Vec<String> = idx.iter().map(|v| v.to_string()).collect();
        for ch in 0..f.channels() {
            let z = f.get(&idx, ch);
            row.push(format!("{:e}", z.re));
            row.push(format!("{:e}", z.im));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Sidecar metadata for raw little-endian f64 sequence data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataSidecar {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub channels: usize,
    pub complex: bool,
}

/// Raw dump: cell-major, channel-minor, `re` (+ `im` when complex)
/// little-endian f64; metadata in `<path>.json`.
pub fn write_sequence_raw(s: &VectorSequence, path: &Path) -> Result<(), IoError> {
    let sidecar = DataSidecar {
        lo: s.grid().lo.clone(),
        hi: s.grid().hi.clone(),
        channels: s.channels(),
        complex: true,
    };
    let mut bytes = Vec::with_capacity(s.values().len() * 16);
    for z in s.values() {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    std::fs::write(
        sidecar_path(path),
        serde_json::to_string_pretty(&sidecar)?,
    )?;
    Ok(())
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    std::path::PathBuf::from(s)
}

pub fn read_sequence_raw(path: &Path) -> Result<VectorSequence, IoError> {
    let text = std::fs::read_to_string(sidecar_path(path))?;
    let sidecar: DataSidecar = serde_json::from_str(&text)
        .map_err(|e| format_err(path, e.to_string()))?;
    let grid = GridBox::new(sidecar.lo.clone(), sidecar.hi.clone());
    let mut s = VectorSequence::zeros(grid, sidecar.channels);
    let bytes = std::fs::read(path)?;
    let stride = if sidecar.complex { 16 } else { 8 };
    let expected = s.values().len() * stride;
    if bytes.len() != expected {
        return Err(format_err(
            path,
            format!("raw data has {} bytes, expected {expected}", bytes.len()),
        ));
    }
    for (i, chunk) in bytes.chunks_exact(stride).enumerate() {
        let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let im = if sidecar.complex {
            f64::from_le_bytes(chunk[8..16].try_into().unwrap())
        } else {
            0.0
        };
        s.values_mut()[i] = Complex64::new(re, im);
    }
    Ok(s)
}

/// Affine scaling recorded next to every PGM rendering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PgmScaling {
    pub min: f64,
    pub max: f64,
    pub maxval: u16,
}

/// Render the real part of one channel as binary PGM (two-dimensional
/// grids only), affinely scaled to the full gray range; the scaling is
/// recorded in `<path>.json`.
pub fn write_pgm(
    f: &SampledVectorFunction,
    channel: usize,
    maxval: u16,
    path: &Path,
) -> Result<(), IoError> {
    if f.dimension() != 2 {
        return Err(format_err(path, "PGM rendering needs a 2-d grid"));
    }
    let grid = f.grid();
    let width = grid.extent(0);
    let height = grid.extent(1);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for idx in grid.iter() {
        let v = f.get(&idx, channel).re;
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() {
        min = 0.0;
        max = 0.0;
    }
    let span = if max > min { max - min } else { 1.0 };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "P5")?;
    writeln!(out, "{width} {height}")?;
    writeln!(out, "{maxval}")?;
    // rows top-down: decreasing second axis
    for row in 0..height {
        let j1 = grid.hi[1] - row as i64;
        for col in 0..width {
            let j0 = grid.lo[0] + col as i64;
            let v = f.get(&[j0, j1], channel).re;
            let scaled = ((v - min) / span * maxval as f64).round() as u32;
            let clamped = scaled.min(maxval as u32);
            if maxval > 255 {
                out.write_all(&(clamped as u16).to_be_bytes())?;
            } else {
                out.write_all(&[clamped as u8])?;
            }
        }
    }
    std::fs::write(
        sidecar_path(path),
        serde_json::to_string_pretty(&PgmScaling { min, max, maxval })?,
    )?;
    Ok(())
}

/// CSV of a frequency sweep: `w0..w{d-1},defect`.
pub fn write_defect_csv(rows: &[(Vec<f64>, f64)], path: &Path) -> Result<(), IoError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let d = rows.first().map(|(w, _)| w.len()).unwrap_or(0);
    let mut header: Vec<String> = (0..d).map(|a| format!("w{a}")).collect();
    header.push("defect".into());
    writeln!(out, "{}", header.join(","))?;
    for (w, defect) in rows {
        let mut row: Vec<String> = w.iter().map(|v| format!("{v:e}")).collect();
        row.push(format!("{defect:e}"));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::preset;
    use crate::linalg::IMat;
    use crate::refine::cm_haar_mask;

    fn cm() -> SplittingCrystalTriple {
        preset("cm-diag")
            .unwrap()
            .with_dilation(IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap()
    }

    #[test]
    fn scalar_mask_roundtrip() {
        let dir = std::env::temp_dir().join("cwlt-io-test-mask");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("mask.json");
        let t = cm();
        let mask = cm_haar_mask();
        save_scalar_mask(&mask, &t, &path).unwrap();
        let (loaded, t2) = load_scalar_mask(&path).unwrap();
        assert_eq!(loaded, mask);
        assert_eq!(t2.order(), 2);
    }

    #[test]
    fn bank_roundtrip() {
        let dir = std::env::temp_dir().join("cwlt-io-test-bank");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bank.json");
        let t = cm();
        let c = crate::refine::lift_mask(&cm_haar_mask(), &t).unwrap();
        let bank = crate::bank::complete_constant_polyphase(&c, &t).unwrap();
        let rep = crate::bank::check_condition_d(&bank, &t, 1e-10).unwrap();
        save_bank(
            &bank,
            &t,
            ValidationStamp {
                condition_d_violation: rep.max_violation,
                tol: 1e-10,
            },
            &path,
        )
        .unwrap();
        let (loaded, t2, stamp) = load_bank(&path).unwrap();
        assert_eq!(loaded.m(), 4);
        assert!(stamp.condition_d_violation <= 1e-10);
        let rep2 = crate::bank::check_condition_d(&loaded, &t2, 1e-10).unwrap();
        assert!(rep2.ok);
    }

    #[test]
    fn sequence_raw_roundtrip() {
        let dir = std::env::temp_dir().join("cwlt-io-test-raw");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.bin");
        let mut s = VectorSequence::zeros(GridBox::new(vec![0, 0], vec![3, 2]), 2);
        s.set(&[1, 2], 0, Complex64::new(0.5, -2.0));
        s.set(&[3, 0], 1, Complex64::new(-1.0, 0.25));
        write_sequence_raw(&s, &path).unwrap();
        let back = read_sequence_raw(&path).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn bad_entry_is_reported_with_field() {
        let t = cm();
        let entries = vec![ScalarEntry {
            g: 7,
            k: vec![0, 0],
            re: 1.0,
            im: 0.0,
        }];
        let err =
            scalar_mask_from_entries(&entries, &t, Path::new("inline")).unwrap_err();
        assert!(err.to_string().contains("entries[0].g"));
    }

    #[test]
    fn pgm_has_correct_header() {
        let dir = std::env::temp_dir().join("cwlt-io-test-pgm");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("img.pgm");
        let mut f = SampledVectorFunction::zeros(
            2,
            1,
            GridBox::new(vec![0, 0], vec![3, 3]),
            1.0 / 16.0,
        );
        for j in f.grid().clone().iter() {
            f.set(&j, 0, Complex64::new((j[0] + j[1]) as f64, 0.0));
        }
        write_pgm(&f, 0, 255, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n4 4\n255\n"));
        assert_eq!(bytes.len(), 11 + 16);
        let scaling: PgmScaling =
            serde_json::from_str(&std::fs::read_to_string(sidecar_path(&path)).unwrap())
                .unwrap();
        assert_eq!(scaling.min, 0.0);
        assert_eq!(scaling.max, 6.0);
    }
}
