use num_complex::Complex64;

use crate::group::{Dilation, SplittingCrystalTriple};
use crate::linalg::{int_pow, int_to_f64, IMat, IVec};

use super::{attractor_bbox, GridBox, MatrixMask, RefineError, SampledVectorFunction};

/// The unit-cube digits of a dilation: integer vectors `δ` such that the
/// cells `δ + [0,1)^d` tile `A [0,1)^d`. Exists for diagonal-like
/// dilations (`2I`, `diag(2,3)`, ...) but not e.g. the quincunx matrix;
/// `None` in that case.
///
/// When it exists, cell averages transform exactly under the fixed-level
/// transfer operator, which is what makes Haar-type fixed points exact.
pub fn cell_digits(a: &IMat) -> Option<Vec<IVec>> {
    let d = a.nrows();
    let m = crate::linalg::int_det(a).unsigned_abs() as usize;
    let af = int_to_f64(a);
    let a_inv = af.clone().try_inverse()?;
    // bounding box of A [0,1]^d
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for corner in 0..(1usize << d) {
        let x = nalgebra::DVector::from_fn(d, |i, _| {
            if corner >> i & 1 == 1 { 1.0 } else { 0.0 }
        });
        let y = &af * x;
        for i in 0..d {
            lo[i] = lo[i].min(y[i].floor() as i64);
            hi[i] = hi[i].max(y[i].ceil() as i64);
        }
    }
    let mut digits = Vec::new();
    for delta in GridBox::new(lo, hi).iter() {
        let inside = (0..(1usize << d)).all(|corner| {
            let x = nalgebra::DVector::from_fn(d, |i, _| {
                delta[i] as f64 + if corner >> i & 1 == 1 { 1.0 } else { 0.0 }
            });
            let y = &a_inv * x;
            y.iter().all(|&v| (-1e-9..=1.0 + 1e-9).contains(&v))
        });
        if inside {
            digits.push(IVec::from_vec(delta));
        }
    }
    (digits.len() == m).then_some(digits)
}

/// Signed permutation matrices map grid cells to grid cells exactly.
pub fn is_signed_permutation(g: &IMat) -> bool {
    let d = g.nrows();
    (0..d).all(|i| {
        let row_ok = (0..d).filter(|&j| g[(i, j)] != 0).count() == 1
            && (0..d).all(|j| g[(i, j)].abs() <= 1);
        let col_ok = (0..d).filter(|&j| g[(j, i)] != 0).count() == 1;
        row_ok && col_ok
    })
}

/// Image cell of `j + [0,1)^d` under an integer unimodular map. Exact for
/// signed permutations (`g(cube) = cube + offset`); for other matrices the
/// cell containing the image of the cell center is used.
pub fn cell_map(g: &IMat, j: &IVec) -> IVec {
    let d = g.nrows();
    if is_signed_permutation(g) {
        let base = g * j;
        IVec::from_fn(d, |i, _| {
            let negated = (0..d).any(|t| g[(i, t)] < 0);
            base[i] + if negated { -1 } else { 0 }
        })
    } else {
        let gf = int_to_f64(g);
        let center = nalgebra::DVector::from_fn(d, |i, _| j[i] as f64 + 0.5);
        let y = gf * center;
        IVec::from_fn(d, |i, _| y[i].floor() as i64)
    }
}

/// Index map realizing `F_i(x) = F_1(g_i^{-1} x)` on the level-`n` grid:
/// channel `i` at cell `j` reads channel 1 at `cell_map(A^n g_i^{-1} A^{-n}, j)`.
/// The conjugated matrix is `g_{h^n(i^{-1})}`, so this stays exact integer
/// arithmetic.
pub fn component_cell_map(
    triple: &SplittingCrystalTriple,
    channel: usize,
    level: u32,
    j: &IVec,
) -> Result<IVec, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    let mut idx = triple.group.inverse_index(channel);
    for _ in 0..level {
        idx = dil.h_perm()[idx];
    }
    Ok(cell_map(triple.group.element(idx), j))
}

/// One application of the transfer operator `SF(x) = Σ_k c̃_k F(Ax − k)`,
/// refining the grid by one level. On cell averages this is exact:
/// the output at level-`n+1` cell `j` is `Σ_k c̃_k F[j − A^n k]`.
pub fn apply_transfer(
    c: &MatrixMask,
    f: &SampledVectorFunction,
    triple: &SplittingCrystalTriple,
) -> Result<SampledVectorFunction, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    let r = triple.order();
    if c.size() != f.channels() || f.channels() != r {
        return Err(RefineError::DimensionMismatch(format!(
            "mask blocks {}x{}, function channels {}, group order {r}",
            c.size(),
            c.size(),
            f.channels()
        )));
    }
    let n = f.level();
    let an = int_pow(dil.matrix(), n);
    let shifts: Vec<IVec> = c.support().iter().map(|k| &an * k).collect();

    let mut out_box: Option<GridBox> = None;
    for s in &shifts {
        let b = f.grid().translated(s);
        out_box = Some(match out_box {
            Some(acc) => acc.union(&b),
            None => b,
        });
    }
    let out_box = out_box.ok_or_else(|| {
        RefineError::Unsupported("transfer of an empty mask has empty support".into())
    })?;

    let m = dil.m() as f64;
    let mut out = SampledVectorFunction::zeros(n + 1, r, out_box, f.cell_volume() / m);
    let support = c.support();
    let mats: Vec<&crate::linalg::CMat> = support
        .iter()
        .map(|k| {
            let key: Vec<i64> = k.iter().copied().collect();
            c.get(&key).expect("support keys exist")
        })
        .collect();
    let grid = out.grid().clone();
    for j in grid.iter() {
        for ((_k, shift), mat) in support.iter().zip(&shifts).zip(&mats) {
            let src: Vec<i64> = (0..j.len()).map(|a| j[a] - shift[a]).collect();
            if !f.grid().contains(&src) {
                continue;
            }
            for i in 0..r {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..r {
                    let w = mat[(i, t)];
                    if w.norm() != 0.0 {
                        acc += w * f.get(&src, t);
                    }
                }
                if acc.norm() != 0.0 {
                    let cur = out.get(&j, i);
                    out.set(&j, i, cur + acc);
                }
            }
        }
    }
    Ok(out)
}

/// Average the `m` child cells of each level-`n` cell to produce the
/// level-`n−1` representation. Requires unit-cube digits.
pub fn coarsen(
    f: &SampledVectorFunction,
    triple: &SplittingCrystalTriple,
) -> Result<SampledVectorFunction, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    if f.level() == 0 {
        return Err(RefineError::Unsupported("cannot coarsen level 0".into()));
    }
    let deltas = cell_digits(dil.matrix()).ok_or_else(|| {
        RefineError::Unsupported(
            "dilation cells are not unit-cube aligned; coarsening is not exact".into(),
        )
    })?;
    let a = dil.matrix();
    let af = int_to_f64(a);
    let a_inv = af.try_inverse().expect("expanding");
    let d = f.dimension();
    // parent box: cells whose children intersect f's box
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for corner in 0..(1usize << d) {
        let x = nalgebra::DVector::from_fn(d, |i, _| {
            (if corner >> i & 1 == 1 { f.grid().hi[i] + 1 } else { f.grid().lo[i] }) as f64
        });
        let y = &a_inv * x;
        for i in 0..d {
            lo[i] = lo[i].min(y[i].floor() as i64);
            hi[i] = hi[i].max(y[i].ceil() as i64);
        }
    }
    let m = dil.m() as f64;
    let mut out = SampledVectorFunction::zeros(
        f.level() - 1,
        f.channels(),
        GridBox::new(lo, hi),
        f.cell_volume() * m,
    );
    let grid = out.grid().clone();
    for j in grid.iter() {
        let jv = IVec::from_vec(j.clone());
        let base = a * jv;
        for ch in 0..f.channels() {
            let mut acc = Complex64::new(0.0, 0.0);
            for delta in &deltas {
                let child: Vec<i64> = (0..d).map(|i| base[i] + delta[i]).collect();
                acc += f.get(&child, ch);
            }
            out.set(&j, ch, acc / Complex64::new(m, 0.0));
        }
    }
    Ok(out)
}

/// One fixed-level cascade step: refine with [`apply_transfer`], then
/// [`coarsen`] back, all in one pass. Exact on cell averages for
/// unit-cube-aligned dilations; otherwise falls back to point reads.
fn fixed_level_step(
    c: &MatrixMask,
    f: &SampledVectorFunction,
    triple: &SplittingCrystalTriple,
    deltas: Option<&[IVec]>,
) -> SampledVectorFunction {
    let dil = triple.dilation.as_ref().expect("checked by caller");
    let r = f.channels();
    let n = f.level();
    let a = dil.matrix();
    let an = int_pow(a, n);
    let support = c.support();
    let shifts: Vec<IVec> = support.iter().map(|k| &an * k).collect();
    let mats: Vec<&crate::linalg::CMat> = support
        .iter()
        .map(|k| {
            let key: Vec<i64> = k.iter().copied().collect();
            c.get(&key).expect("support keys exist")
        })
        .collect();
    let d = f.dimension();
    let mut out =
        SampledVectorFunction::zeros(n, r, f.grid().clone(), f.cell_volume());
    // cell-aligned dilations average over the child cells; otherwise fall
    // back to plain point reads (approximate, but the best available)
    let smoothing: Vec<IVec> = match deltas {
        Some(ds) => ds.to_vec(),
        None => vec![IVec::from_vec(vec![0; d])],
    };
    let weight = Complex64::new(1.0 / smoothing.len() as f64, 0.0);
    let grid = out.grid().clone();
    for j in grid.iter() {
        let jv = IVec::from_vec(j.clone());
        let base = a * jv;
        for (shift, mat) in shifts.iter().zip(&mats) {
            for delta in &smoothing {
                let src: Vec<i64> = (0..d).map(|i| base[i] - shift[i] + delta[i]).collect();
                if !f.grid().contains(&src) {
                    continue;
                }
                for i in 0..r {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..r {
                        let w = mat[(i, t)];
                        if w.norm() != 0.0 {
                            acc += w * f.get(&src, t);
                        }
                    }
                    if acc.norm() != 0.0 {
                        let cur = out.get(&j, i);
                        out.set(&j, i, cur + weight * acc);
                    }
                }
            }
        }
    }
    out
}

/// `‖F − SF‖_{L²}` with both sides at `F`'s level (the fixed-level
/// transfer step).
pub fn transfer_residual(
    c: &MatrixMask,
    f: &SampledVectorFunction,
    triple: &SplittingCrystalTriple,
) -> Result<f64, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    let deltas = cell_digits(dil.matrix());
    let sf = fixed_level_step(c, f, triple, deltas.as_deref());
    Ok(f.l2_distance(&sf))
}

/// Largest deviation from the component-intertwining structure
/// `F_i = F_1 ∘ g_i^{-1}`, over all channels and cells where both indices
/// fall inside the grid box.
pub fn intertwining_defect(
    f: &SampledVectorFunction,
    triple: &SplittingCrystalTriple,
) -> Result<f64, RefineError> {
    let r = f.channels();
    let mut worst = 0.0f64;
    for j in f.grid().iter() {
        let jv = IVec::from_vec(j.clone());
        for i in 1..r {
            let src = component_cell_map(triple, i, f.level(), &jv)?;
            let src_vec: Vec<i64> = src.iter().copied().collect();
            if !f.grid().contains(&src_vec) {
                continue;
            }
            let v = (f.get(&j, i) - f.get(&src_vec, 0)).norm();
            worst = worst.max(v);
        }
    }
    Ok(worst)
}

/// Build an intertwined function from channel-1 cell values.
pub fn intertwined_from_channel(
    triple: &SplittingCrystalTriple,
    level: u32,
    grid: GridBox,
    cell_volume: f64,
    mut value: impl FnMut(&[i64]) -> Complex64,
) -> Result<SampledVectorFunction, RefineError> {
    let r = triple.order();
    let mut f = SampledVectorFunction::zeros(level, r, grid.clone(), cell_volume);
    for j in grid.iter() {
        let v0 = value(&j);
        f.set(&j, 0, v0);
    }
    for j in grid.iter() {
        let jv = IVec::from_vec(j.clone());
        for i in 1..r {
            let src = component_cell_map(triple, i, level, &jv)?;
            let src_vec: Vec<i64> = src.iter().copied().collect();
            let v = if grid.contains(&src_vec) {
                f.get(&src_vec, 0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            f.set(&j, i, v);
        }
    }
    Ok(f)
}

#[derive(Debug, Clone)]
pub enum CascadeInit {
    /// Normalized indicator of the digit-set attractor estimate, mapped
    /// through `g_i^{-1}` per channel.
    DigitTile,
    /// Caller-provided start function (must match the requested level).
    Given(SampledVectorFunction),
}

#[derive(Debug, Clone)]
pub struct CascadeParams {
    pub level: u32,
    pub max_iterations: usize,
    pub tol: f64,
    pub init: CascadeInit,
}

impl CascadeParams {
    pub fn new(level: u32) -> Self {
        Self {
            level,
            max_iterations: 80,
            tol: 1e-11,
            init: CascadeInit::DigitTile,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CascadeResult {
    pub function: SampledVectorFunction,
    /// L² norms of successive differences, one per iteration.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `Σ|d_γ|² ≥ m`: uniqueness of the limit is not guaranteed; rely on
    /// fixed-point verification instead.
    pub boundary_contraction: bool,
    /// Differences stopped decreasing over the last five iterations.
    pub non_convergent: bool,
}

/// Iterate the fixed-level transfer operator `F ↦ SF` on the attractor
/// bounding box at the requested level until the successive L²
/// differences fall below `tol`.
pub fn cascade_solve(
    c: &MatrixMask,
    triple: &SplittingCrystalTriple,
    params: &CascadeParams,
) -> Result<CascadeResult, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    if c.is_empty() {
        return Err(RefineError::Unsupported("cascade of an empty mask".into()));
    }
    let boundary_contraction = {
        let sum_sq: f64 = c
            .iter()
            .flat_map(|(_, m)| m.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            / triple.order() as f64;
        // Σ|d_γ|² equals the per-row mass of the lifted mask
        sum_sq >= dil.m() as f64 - 1e-12
    };

    let level = params.level;
    let grid = attractor_grid(dil.matrix(), &c.support(), level);
    let cell_volume =
        (dil.m() as f64).powi(-(level as i32)) * triple.lattice.covolume();

    let mut f = match &params.init {
        CascadeInit::Given(f0) => {
            if f0.level() != level {
                return Err(RefineError::DimensionMismatch(format!(
                    "init level {} does not match requested level {level}",
                    f0.level()
                )));
            }
            if !grid.contains_box(f0.nonzero_box(0.0).as_ref().unwrap_or(&grid)) {
                return Err(RefineError::GridTooSmall {
                    required: (grid.lo.clone(), grid.hi.clone()),
                });
            }
            // embed into the attractor grid
            let mut f = SampledVectorFunction::zeros(
                level,
                f0.channels(),
                grid.union(f0.grid()),
                cell_volume,
            );
            for j in f0.grid().iter() {
                for ch in 0..f0.channels() {
                    f.set(&j, ch, f0.get(&j, ch));
                }
            }
            f
        }
        CascadeInit::DigitTile => digit_tile_init(triple, dil, level, &grid, cell_volume)?,
    };

    let deltas = cell_digits(dil.matrix());
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..params.max_iterations {
        let next = fixed_level_step(c, &f, triple, deltas.as_deref());
        let diff = f.l2_distance(&next);
        trace.push(diff);
        f = next;
        iterations += 1;
        if diff < params.tol {
            converged = true;
            break;
        }
    }
    let non_convergent = !converged
        && trace.len() >= 5
        && trace
            .windows(2)
            .rev()
            .take(4)
            .all(|w| w[1] >= w[0] - 1e-15);
    Ok(CascadeResult {
        function: f,
        trace,
        converged,
        iterations,
        boundary_contraction,
        non_convergent,
    })
}

/// Index box at `level` covering the attractor bounding box plus a
/// one-cell margin.
pub(crate) fn attractor_grid(a: &IMat, support: &[IVec], level: u32) -> GridBox {
    let d = a.nrows();
    let (lo, hi) = attractor_bbox(a, support);
    let an = int_to_f64(&int_pow(a, level));
    let mut ilo = vec![i64::MAX; d];
    let mut ihi = vec![i64::MIN; d];
    for corner in 0..(1usize << d) {
        let x = nalgebra::DVector::from_fn(d, |i, _| {
            if corner >> i & 1 == 1 { hi[i] } else { lo[i] }
        });
        let y = &an * x;
        for i in 0..d {
            ilo[i] = ilo[i].min(y[i].floor() as i64 - 1);
            ihi[i] = ihi[i].max(y[i].ceil() as i64 + 1);
        }
    }
    GridBox::new(ilo, ihi)
}

fn digit_tile_init(
    triple: &SplittingCrystalTriple,
    dil: &Dilation,
    level: u32,
    grid: &GridBox,
    cell_volume: f64,
) -> Result<SampledVectorFunction, RefineError> {
    let est = super::attractor_estimate(dil, dil.digits(), level);
    let measure = est.cells.len() as f64 * cell_volume;
    let height = Complex64::new(1.0 / measure.sqrt(), 0.0);
    let cells: std::collections::HashSet<Vec<i64>> = est.cells.into_iter().collect();
    let full = grid.union(&{
        // make sure the tile cells fit
        let d = grid.dimension();
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for c in &cells {
            for a in 0..d {
                lo[a] = lo[a].min(c[a]);
                hi[a] = hi[a].max(c[a]);
            }
        }
        GridBox::new(lo, hi)
    });
    intertwined_from_channel(triple, level, full, cell_volume, |j| {
        if cells.contains(j) {
            height
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
