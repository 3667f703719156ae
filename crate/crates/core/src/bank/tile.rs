use std::collections::HashMap;

use num_complex::Complex64;

use crate::group::{GroupElement, SplittingCrystalTriple};
use crate::linalg::{int_pow, IVec};
use crate::refine::{cell_digits, cell_map, GridBox, MatrixMask, SampledVectorFunction, ScalarMask};

use super::BankError;

/// A self-affine tile decomposition `A·P = ∪_s γ_s(P)` with the tile held
/// as a cell-fraction raster (channel 0 holds `|P ∩ cell| / |cell|`).
#[derive(Debug, Clone)]
pub struct TileDecomposition {
    pub pieces: Vec<GroupElement>,
    pub fractions: SampledVectorFunction,
    pub measure: f64,
}

#[derive(Debug, Clone)]
pub struct TileReport {
    /// Deviation of the coverage density from an indicator function,
    /// `Σ min(f, |1−f|) · cellvol`.
    pub indicator_defect: f64,
    /// Measure of the tile from the fraction raster.
    pub measure: f64,
    /// `|L| / r`, the measure a fundamental domain must have.
    pub expected_measure: f64,
    /// Largest fraction value; 1 for a genuine tile.
    pub plateau: f64,
    pub piece_count: usize,
}

/// Index of the level-`t` parent cell read by piece `s` for a level-`t+1`
/// child cell `i`: the cell of `γ_s^{-1}(A · cell_i)`.
fn parent_index(
    triple: &SplittingCrystalTriple,
    piece: &GroupElement,
    level: u32,
    child: &IVec,
) -> IVec {
    let dil = triple.dilation.as_ref().expect("checked by callers");
    // conjugated point matrix of g^{-1} at level t
    let mut idx = triple.group.inverse_index(piece.point);
    for _ in 0..level {
        idx = dil.h_perm()[idx];
    }
    let gp = triple.group.element(idx);
    let at = int_pow(dil.matrix(), level);
    let k = piece.translation_vec();
    cell_map(gp, child) - at * k
}

/// One subdivision step for coverage densities: the level-`t+1` density is
/// `f_{t+1}[i] = Σ_s f_t[parent_s(i)]` on the refined grid.
fn subdivide(
    triple: &SplittingCrystalTriple,
    pieces: &[GroupElement],
    f: &HashMap<Vec<i64>, f64>,
    level: u32,
) -> HashMap<Vec<i64>, f64> {
    let dil = triple.dilation.as_ref().expect("checked by callers");
    let a = dil.matrix();
    let d = triple.dimension();
    // children of the support cells: A*cell + unit-cube digits covers the
    // supports of all pieces' images
    let mut out: HashMap<Vec<i64>, f64> = HashMap::with_capacity(f.len() * dil.m());
    let deltas = cell_digits(a);
    let mut candidates: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
    match &deltas {
        Some(ds) => {
            for cell in f.keys() {
                let base = a * IVec::from_vec(cell.clone());
                for delta in ds {
                    candidates.insert((0..d).map(|t| base[t] + delta[t]).collect());
                }
            }
        }
        None => {
            // non-aligned dilations: bounding box of the image cells
            let mut lo = vec![i64::MAX; d];
            let mut hi = vec![i64::MIN; d];
            for cell in f.keys() {
                let base = a * IVec::from_vec(cell.clone());
                for t in 0..d {
                    lo[t] = lo[t].min(base[t] - 1);
                    hi[t] = hi[t].max(base[t] + a.iter().map(|e| e.abs()).max().unwrap_or(1));
                }
            }
            candidates.extend(GridBox::new(lo, hi).iter());
        }
    }
    // the parent relation is what defines the new values; children whose
    // parents all vanish stay zero and are dropped
    for child in candidates {
        let cv = IVec::from_vec(child.clone());
        let mut acc = 0.0;
        for piece in pieces {
            let parent = parent_index(triple, piece, level, &cv);
            let key: Vec<i64> = parent.iter().copied().collect();
            if let Some(v) = f.get(&key) {
                acc += v;
            }
        }
        if acc != 0.0 {
            out.insert(child, acc);
        }
    }
    out
}

/// Average level-`t+1` densities back to level `t` (cell-aligned
/// dilations only).
fn aggregate(
    triple: &SplittingCrystalTriple,
    f: &HashMap<Vec<i64>, f64>,
    deltas: &[IVec],
) -> HashMap<Vec<i64>, f64> {
    let dil = triple.dilation.as_ref().expect("checked by callers");
    let a = dil.matrix();
    let m = dil.m() as f64;
    let d = triple.dimension();
    let mut parents: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
    for cell in f.keys() {
        // parent of cell: A p + δ = cell for some digit δ
        for delta in deltas {
            let shifted = IVec::from_vec(cell.clone()) - delta;
            if let Some(p) = crate::group::solve_int(a, &shifted) {
                parents.insert(p.iter().copied().collect());
            }
        }
    }
    let mut out = HashMap::with_capacity(parents.len());
    for p in parents {
        let base = a * IVec::from_vec(p.clone());
        let mut acc = 0.0;
        for delta in deltas {
            let child: Vec<i64> = (0..d).map(|t| base[t] + delta[t]).collect();
            acc += f.get(&child).copied().unwrap_or(0.0);
        }
        if acc != 0.0 {
            out.insert(p, acc / m);
        }
    }
    out
}

/// Exact cell-fraction raster of the attractor of `{A^{-1} γ_s}` at the
/// requested level.
///
/// The level-0 fractions solve a small fixed-point problem (they are the
/// invariant density of subdividing a few levels down and averaging back
/// up); the exact subdivision recursion then pushes them to any level.
/// Total mass is normalized to `|L| / r`, the measure a fundamental
/// domain of the group must have; whether the density is a genuine
/// indicator is what [`TileReport::indicator_defect`] measures.
pub fn tile_fractions(
    triple: &SplittingCrystalTriple,
    pieces: &[GroupElement],
    level: u32,
) -> Result<SampledVectorFunction, BankError> {
    let dil = triple.dilation()?;
    let deltas = cell_digits(dil.matrix());
    let d = triple.dimension();
    let target_mass = triple.lattice.covolume() / triple.order() as f64;

    // crude support guess: subdivide a seed a few times and look at the
    // level-0 cells it occupies
    let mut crisp: HashMap<Vec<i64>, f64> = HashMap::new();
    crisp.insert(vec![0; d], 1.0);
    for t in 0..4 {
        crisp = subdivide(triple, pieces, &crisp, t);
    }
    let a4_inv = crate::linalg::int_to_f64(&int_pow(dil.matrix(), 4))
        .try_inverse()
        .expect("expanding");
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for cell in crisp.keys() {
        let x = a4_inv.clone() * crate::linalg::ivec_to_f64(&IVec::from_vec(cell.clone()));
        for t in 0..d {
            let c0 = x[t].floor() as i64;
            lo[t] = lo[t].min(c0 - 1);
            hi[t] = hi[t].max(c0 + 1);
        }
    }

    let mut f0: HashMap<Vec<i64>, f64> = GridBox::new(lo, hi)
        .iter()
        .map(|c| (c, 1.0))
        .collect();

    if let Some(ds) = &deltas {
        // power-iterate subdivide^κ ∘ aggregate^κ to the invariant density
        let kappa = 4u32;
        for _ in 0..400 {
            let mut f = f0.clone();
            for t in 0..kappa {
                f = subdivide(triple, pieces, &f, t);
            }
            for _ in 0..kappa {
                f = aggregate(triple, &f, ds);
            }
            let mass: f64 = f.values().sum();
            if mass <= 0.0 {
                return Err(BankError::NotATileDecomposition { defect: 1.0 });
            }
            let scale = target_mass / (mass * triple.lattice.covolume());
            for v in f.values_mut() {
                *v *= scale;
            }
            f.retain(|_, v| v.abs() > 1e-300);
            let diff = sup_diff(&f0, &f);
            f0 = f;
            if diff < 1e-14 {
                break;
            }
        }
    } else {
        // non-aligned dilation: no exact aggregation; fall back to the
        // crisp indicator seeded from the subdivision orbit
        let mass: f64 = f0.values().sum();
        let scale = target_mass / (mass * triple.lattice.covolume());
        for v in f0.values_mut() {
            *v *= scale;
        }
    }

    if f0.is_empty() {
        return Err(BankError::NotATileDecomposition { defect: 1.0 });
    }

    // push down to the requested level; dense arrays with precomputed
    // index maps when the piece actions are cell-exact, hash maps
    // otherwise
    let cell_volume =
        (dil.m() as f64).powi(-(level as i32)) * triple.lattice.covolume();
    if let Some(out) = push_down_dense(triple, pieces, &f0, level, cell_volume) {
        return Ok(out);
    }
    let mut f = f0;
    for t in 0..level {
        f = subdivide(triple, pieces, &f, t);
    }
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for cell in f.keys() {
        for t in 0..d {
            lo[t] = lo[t].min(cell[t]);
            hi[t] = hi[t].max(cell[t]);
        }
    }
    let mut out = SampledVectorFunction::zeros(level, 1, GridBox::new(lo, hi), cell_volume);
    for (cell, v) in &f {
        out.set(cell, 0, Complex64::new(*v, 0.0));
    }
    Ok(out)
}

/// Cell-index action of one piece at one level, decomposed for the dense
/// inner loop: `src[a] = sign[a] * j[perm[a]] + offset[a]`.
struct PieceCellMap {
    perm: Vec<usize>,
    sign: Vec<i64>,
    offset: Vec<i64>,
}

fn piece_cell_maps(
    triple: &SplittingCrystalTriple,
    pieces: &[GroupElement],
    level: u32,
) -> Option<Vec<PieceCellMap>> {
    let dil = triple.dilation.as_ref().expect("checked by callers");
    let d = triple.dimension();
    let at = int_pow(dil.matrix(), level);
    pieces
        .iter()
        .map(|piece| {
            let mut idx = triple.group.inverse_index(piece.point);
            for _ in 0..level {
                idx = dil.h_perm()[idx];
            }
            let gp = triple.group.element(idx);
            if !crate::refine::is_signed_permutation(gp) {
                return None;
            }
            let atk = &at * piece.translation_vec();
            let mut perm = vec![0usize; d];
            let mut sign = vec![0i64; d];
            let mut offset = vec![0i64; d];
            for a in 0..d {
                let q = (0..d).find(|&q| gp[(a, q)] != 0).unwrap();
                perm[a] = q;
                sign[a] = gp[(a, q)];
                offset[a] = if sign[a] < 0 { -1 } else { 0 } - atk[a];
            }
            Some(PieceCellMap { perm, sign, offset })
        })
        .collect()
}

fn push_down_dense(
    triple: &SplittingCrystalTriple,
    pieces: &[GroupElement],
    f0: &HashMap<Vec<i64>, f64>,
    level: u32,
    cell_volume: f64,
) -> Option<SampledVectorFunction> {
    let d = triple.dimension();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for cell in f0.keys() {
        for t in 0..d {
            lo[t] = lo[t].min(cell[t]);
            hi[t] = hi[t].max(cell[t]);
        }
    }
    let mut box_t = GridBox::new(lo, hi);
    let mut values: Vec<f64> = vec![0.0; box_t.cells()];
    for (cell, v) in f0 {
        values[box_t.offset(cell).unwrap()] = *v;
    }

    for t in 0..level {
        let maps = piece_cell_maps(triple, pieces, t)?;
        // output box: a child cell j can only be nonzero when some piece
        // reads a source inside the current box, i.e.
        // sign[a]*j[perm[a]] + offset[a] lies in [lo[a], hi[a]]
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for map in &maps {
            for a in 0..d {
                let (s_lo, s_hi) = (box_t.lo[a], box_t.hi[a]);
                let (j_lo, j_hi) = if map.sign[a] > 0 {
                    (s_lo - map.offset[a], s_hi - map.offset[a])
                } else {
                    (map.offset[a] - s_hi, map.offset[a] - s_lo)
                };
                lo[map.perm[a]] = lo[map.perm[a]].min(j_lo);
                hi[map.perm[a]] = hi[map.perm[a]].max(j_hi);
            }
        }
        let out_box = GridBox::new(lo, hi);
        let mut out = vec![0.0f64; out_box.cells()];
        let mut src = vec![0i64; d];
        for (off, j) in out_box.iter().enumerate() {
            let mut acc = 0.0;
            for map in &maps {
                for a in 0..d {
                    src[a] = map.sign[a] * j[map.perm[a]] + map.offset[a];
                }
                if let Some(s_off) = box_t.offset(&src) {
                    acc += values[s_off];
                }
            }
            out[off] = acc;
        }
        box_t = out_box;
        values = out;
    }

    let mut out = SampledVectorFunction::zeros(level, 1, box_t.clone(), cell_volume);
    for (off, v) in values.iter().enumerate() {
        if *v != 0.0 {
            out.values_mut()[off] = Complex64::new(*v, 0.0);
        }
    }
    Some(out)
}

fn sup_diff(a: &HashMap<Vec<i64>, f64>, b: &HashMap<Vec<i64>, f64>) -> f64 {
    let mut worst = 0.0f64;
    for (k, v) in a {
        worst = worst.max((v - b.get(k).copied().unwrap_or(0.0)).abs());
    }
    for (k, v) in b {
        worst = worst.max((v - a.get(k).copied().unwrap_or(0.0)).abs());
    }
    worst
}

fn indicator_defect(f: &SampledVectorFunction) -> f64 {
    let mut acc = 0.0;
    for j in f.grid().iter() {
        let v = f.get(&j, 0).re;
        if v != 0.0 {
            acc += v.min((1.0 - v).abs());
        }
    }
    acc * f.cell_volume()
}

/// Verify a tile decomposition and emit the Haar-type scaling mask.
///
/// The pieces `γ_s` must satisfy `A·P = ∪_s γ_s(P)` for the tile `P`
/// supplied as an indicator/fraction grid, or constructed as the
/// attractor of the maps `A^{-1} γ_s` when absent. On success the scalar
/// mask with coefficient 1 at each `γ_s` is returned (its normalized
/// indicator solution is `|P|^{-1/2} χ_P`) together with its lift.
pub fn haar_from_tile(
    triple: &SplittingCrystalTriple,
    pieces: &[GroupElement],
    level: u32,
    tile: Option<&SampledVectorFunction>,
    defect_tol: f64,
) -> Result<(ScalarMask, MatrixMask, TileDecomposition, TileReport), BankError> {
    let dil = triple.dilation()?;
    if pieces.len() != dil.m() {
        return Err(BankError::PieceCountMismatch {
            expected: dil.m(),
            got: pieces.len(),
        });
    }
    let expected_measure = triple.lattice.covolume() / triple.order() as f64;

    let fractions = match tile {
        Some(grid) => {
            if grid.channels() != 1 {
                return Err(BankError::DimensionMismatch(
                    "tile grid must have a single channel".into(),
                ));
            }
            // compare the given tile against one subdivision of itself
            let f: HashMap<Vec<i64>, f64> = grid
                .grid()
                .iter()
                .filter_map(|j| {
                    let v = grid.get(&j, 0).re;
                    (v != 0.0).then_some((j, v))
                })
                .collect();
            let refined = subdivide(triple, pieces, &f, grid.level());
            let deltas = cell_digits(dil.matrix()).ok_or_else(|| {
                BankError::DimensionMismatch(
                    "explicit tile verification needs a cell-aligned dilation".into(),
                )
            })?;
            let back = aggregate(triple, &refined, &deltas);
            let mut l1 = 0.0;
            let keys: std::collections::HashSet<&Vec<i64>> =
                f.keys().chain(back.keys()).collect();
            for k in keys {
                l1 += (f.get(k).copied().unwrap_or(0.0)
                    - back.get(k).copied().unwrap_or(0.0))
                .abs();
            }
            let defect = l1 * grid.cell_volume();
            if defect > defect_tol {
                return Err(BankError::NotATileDecomposition { defect });
            }
            grid.clone()
        }
        None => tile_fractions(triple, pieces, level)?,
    };

    let defect = indicator_defect(&fractions);
    let measure = fractions.integral(0).re;
    let plateau = fractions
        .grid()
        .iter()
        .map(|j| fractions.get(&j, 0).re)
        .fold(0.0f64, f64::max);

    let report = TileReport {
        indicator_defect: defect,
        measure,
        expected_measure,
        plateau,
        piece_count: pieces.len(),
    };
    if defect > defect_tol || (plateau - 1.0).abs() > 0.2 {
        return Err(BankError::NotATileDecomposition { defect });
    }

    let mask = ScalarMask::indicator(triple.dimension(), pieces);
    let lifted = crate::refine::lift_mask(&mask, triple)?;
    let decomposition = TileDecomposition {
        pieces: pieces.to_vec(),
        fractions,
        measure,
    };
    Ok((mask, lifted, decomposition, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::preset;
    use crate::linalg::IMat;

    fn cm() -> SplittingCrystalTriple {
        preset("cm-diag")
            .unwrap()
            .with_dilation(IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap()
    }

    fn triangle_pieces() -> Vec<GroupElement> {
        vec![
            GroupElement::new(0, vec![0, 0]),
            GroupElement::new(0, vec![1, 0]),
            GroupElement::new(0, vec![1, 1]),
            GroupElement::new(1, vec![0, 1]),
        ]
    }

    #[test]
    fn triangle_fractions_are_exact() {
        let t = cm();
        let level = 5;
        let f = tile_fractions(&t, &triangle_pieces(), level).unwrap();
        let n = 1i64 << level;
        // full cells strictly below the diagonal, halves on it
        for j in f.grid().iter() {
            let v = f.get(&j, 0).re;
            let expected = if j[0] < 0 || j[0] >= n || j[1] < 0 || j[1] >= n {
                0.0
            } else if j[1] < j[0] {
                1.0
            } else if j[1] == j[0] {
                0.5
            } else {
                0.0
            };
            assert!(
                (v - expected).abs() < 1e-12,
                "cell {j:?}: {v} vs {expected}"
            );
        }
        assert!((f.integral(0).re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn haar_from_triangle_tile() {
        let t = cm();
        let (mask, lifted, _dec, report) =
            haar_from_tile(&t, &triangle_pieces(), 6, None, 1e-2).unwrap();
        assert_eq!(mask.len(), 4);
        assert_eq!(lifted.len(), 4);
        assert!((report.measure - 0.5).abs() < 1e-12);
        assert!((report.expected_measure - 0.5).abs() < 1e-15);
        assert!((report.plateau - 1.0).abs() < 1e-12);
        // defect is the diagonal half-cells: 2^n cells of value 1/2
        let expected_defect = 0.5 * 64.0 / 4096.0;
        assert!((report.indicator_defect - expected_defect).abs() < 1e-12);
    }

    #[test]
    fn classical_interval_tile() {
        let t = preset("z1")
            .unwrap()
            .with_dilation(IMat::from_row_slice(1, 1, &[2]))
            .unwrap();
        let pieces = vec![GroupElement::new(0, vec![0]), GroupElement::new(0, vec![1])];
        let (mask, _, _, report) = haar_from_tile(&t, &pieces, 6, None, 1e-9).unwrap();
        assert_eq!(mask.len(), 2);
        assert!((report.measure - 1.0).abs() < 1e-12);
        assert!(report.indicator_defect < 1e-12);
    }

    #[test]
    fn wrong_piece_count() {
        let t = cm();
        let err = haar_from_tile(
            &t,
            &[GroupElement::new(0, vec![0, 0])],
            4,
            None,
            1e-2,
        )
        .unwrap_err();
        assert!(matches!(err, BankError::PieceCountMismatch { expected: 4, got: 1 }));
    }

    #[test]
    fn translation_pieces_fail_on_triangle() {
        // all-translation pieces double-cover the lower triangles and miss
        // the upper ones
        let t = cm();
        let pieces = vec![
            GroupElement::new(0, vec![0, 0]),
            GroupElement::new(0, vec![1, 0]),
            GroupElement::new(0, vec![0, 1]),
            GroupElement::new(0, vec![1, 1]),
        ];
        let level = 5;
        let triangle = tile_fractions(&t, &triangle_pieces(), level).unwrap();
        let err = haar_from_tile(&t, &pieces, level, Some(&triangle), 1e-2).unwrap_err();
        match err {
            BankError::NotATileDecomposition { defect } => assert!(defect > 0.1),
            other => panic!("expected NotATileDecomposition, got {other:?}"),
        }
    }
}
