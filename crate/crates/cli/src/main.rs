//! `cwav`: construct, solve and verify crystallographic multiresolution
//! analyses and multiwavelet filter banks from the command line.
//!
//! Every subcommand writes a JSON report into the output directory and
//! exits 0 when all checks pass, 1 when a check fails, and 2 on input
//! errors.

mod inputs;
mod reports;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crystal_wavelets as cw;
use cw::io as cwio;

use inputs::{load_jsr_set, load_pieces, parse_dilation};
use reports::{finish, Outcome, Report};

#[derive(Parser)]
#[command(name = "cwav", version, about = "Crystal multiwavelet toolbox")]
struct Cli {
    /// Output directory for reports and artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate or describe a crystal group spec (preset name or file).
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Scalar and matrix mask operations.
    Mask {
        #[command(subcommand)]
        action: MaskAction,
    },
    /// Iterate the transfer operator to the refinable limit.
    Cascade {
        /// Scalar mask file.
        #[arg(long)]
        mask: PathBuf,
        /// Grid refinement level.
        #[arg(long, default_value_t = 6)]
        level: u32,
        #[arg(long, default_value_t = 80)]
        iterations: usize,
        #[arg(long, default_value_t = 1e-11)]
        tol: f64,
        /// Also render each channel as PGM (2-d grids).
        #[arg(long)]
        render: bool,
    },
    /// Attractor estimate of the digit IFS of a mask support.
    Attractor {
        /// Group preset name or spec file.
        #[arg(long)]
        group: String,
        /// Dilation, e.g. "2I" or "[[1,1],[-1,1]]" (defaults to the
        /// group file's dilation).
        #[arg(long)]
        dilation: Option<String>,
        /// Mask file whose support drives the IFS; defaults to the digit set.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        render: bool,
    },
    /// Joint spectral radius estimation by product enumeration.
    Jsr {
        /// JSON file with the matrix set.
        #[arg(long)]
        set: PathBuf,
        /// Order p in [1, inf].
        #[arg(long, default_value = "inf")]
        p: String,
        #[arg(long, default_value_t = 12)]
        max_length: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Symbol evaluation and unitarity sweeps.
    Symbol {
        #[command(subcommand)]
        action: SymbolAction,
    },
    /// Aggregate multiresolution-analysis checks for a scalar mask.
    CheckMra {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value_t = 6)]
        level: u32,
    },
    /// Discrete orthonormality conditions of a filter bank.
    CheckD {
        #[arg(long)]
        bank: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Verify a tile decomposition and emit the Haar-type scaling mask.
    Haar {
        #[arg(long)]
        group: String,
        #[arg(long)]
        dilation: Option<String>,
        /// JSON file listing the pieces γ_s.
        #[arg(long)]
        pieces: PathBuf,
        #[arg(long, default_value_t = 8)]
        level: u32,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Complete a constant-polyphase scaling mask to an orthonormal bank.
    Complete {
        /// Scalar scaling-mask file.
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Multilevel analysis / synthesis transforms on vector data.
    Transform {
        #[command(subcommand)]
        action: TransformAction,
    },
    /// Render the cascade limit of a mask as PGM images.
    Render {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value_t = 7)]
        level: u32,
        #[arg(long, default_value_t = 255)]
        maxval: u16,
    },
}

#[derive(Subcommand)]
enum GroupAction {
    /// Validate all invariants; exit 1 on the first violation.
    Check { spec: String },
    /// Validate and print order, dilation data and digit sets.
    Info { spec: String },
}

#[derive(Subcommand)]
enum MaskAction {
    /// Lift a scalar mask to its matrix mask.
    Lift {
        #[arg(long)]
        mask: PathBuf,
    },
    /// Check (Γ,a)-symmetry of a matrix mask.
    CheckSym {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Extract the scalar mask from a symmetric matrix mask.
    Extract {
        #[arg(long)]
        mask: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum SymbolAction {
    /// Evaluate the symbol of a scalar mask at one frequency.
    Eval {
        #[arg(long)]
        mask: PathBuf,
        /// Frequency in dual-lattice coordinates, e.g. "0.25,0.5".
        #[arg(long, default_value = "0")]
        omega: String,
    },
    /// Sweep the modulation-matrix unitarity defect over a frequency grid.
    Sweep {
        /// Bank file (all symbols) or scalar mask file (scaling row only).
        #[arg(long)]
        bank: Option<PathBuf>,
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        freq_res: usize,
    },
}

#[derive(Subcommand)]
enum TransformAction {
    /// Decompose raw vector data with a bank.
    Analyze {
        #[arg(long)]
        bank: PathBuf,
        /// Raw data file (little-endian f64 pairs with a JSON sidecar).
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// Reconstruct from a decomposition manifest.
    Synthesize {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create output directory: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Group { action } => run_group(action, &cli.out),
        Command::Mask { action } => run_mask(action, &cli.out),
        Command::Cascade {
            mask,
            level,
            iterations,
            tol,
            render,
        } => run_cascade(mask, *level, *iterations, *tol, *render, &cli.out),
        Command::Attractor {
            group,
            dilation,
            mask,
            depth,
            render,
        } => run_attractor(group, dilation.as_deref(), mask.as_deref(), *depth, *render, &cli.out),
        Command::Jsr {
            set,
            p,
            max_length,
            budget,
        } => run_jsr(set, p, *max_length, *budget, &cli.out),
        Command::Symbol { action } => run_symbol(action, &cli.out),
        Command::CheckMra { mask, level } => run_check_mra(mask, *level, &cli.out),
        Command::CheckD { bank, tol } => run_check_d(bank, *tol, &cli.out),
        Command::Haar {
            group,
            dilation,
            pieces,
            level,
            tol,
        } => run_haar(group, dilation.as_deref(), pieces, *level, *tol, &cli.out),
        Command::Complete { mask, tol } => run_complete(mask, *tol, &cli.out),
        Command::Transform { action } => run_transform(action, &cli.out),
        Command::Render {
            mask,
            level,
            maxval,
        } => run_render(mask, *level, *maxval, &cli.out),
    }
}

fn resolve_group(
    spec: &str,
    dilation: Option<&str>,
) -> anyhow::Result<cw::SplittingCrystalTriple> {
    let mut triple = cw::load_group_spec(spec)?;
    if let Some(text) = dilation {
        let a = parse_dilation(text, triple.dimension())?;
        triple = triple.with_dilation(a)?;
    } else if triple.dilation.is_none() {
        // a generic admissible default so digit-set commands work
        let d = triple.dimension();
        if let Ok(t) = triple.clone().with_dilation(cw::IMat::identity(d, d) * 2) {
            triple = t;
        }
    }
    Ok(triple)
}

fn run_group(action: &GroupAction, out: &std::path::Path) -> anyhow::Result<Outcome> {
    let (spec, info) = match action {
        GroupAction::Check { spec } => (spec, false),
        GroupAction::Info { spec } => (spec, true),
    };
    let mut report = Report::new(if info { "group info" } else { "group check" });
    match cw::load_group_spec(spec) {
        Ok(triple) => {
            report.set("name", triple.name.clone().unwrap_or_else(|| spec.clone()));
            report.set("dimension", triple.dimension());
            report.set("order", triple.order());
            report.set("covolume", triple.lattice.covolume());
            if let Some(dil) = &triple.dilation {
                report.set("m", dil.m());
                report.set("h_perm", dil.h_perm().to_vec());
                if info {
                    let digits: Vec<Vec<i64>> = dil
                        .digits()
                        .iter()
                        .map(|v| v.iter().copied().collect())
                        .collect();
                    let duals: Vec<Vec<i64>> = dil
                        .dual_digits()
                        .iter()
                        .map(|v| v.iter().copied().collect())
                        .collect();
                    report.set("digits", digits);
                    report.set("dual_digits", duals);
                }
            }
            report.ok(true);
            finish(report, out, "group-report.json")
        }
        Err(e) => {
            report.set("violation", e.to_string());
            report.ok(false);
            finish(report, out, "group-report.json")
        }
    }
}

fn run_mask(action: &MaskAction, out: &std::path::Path) -> anyhow::Result<Outcome> {
    match action {
        MaskAction::Lift { mask } => {
            let (scalar, triple) = cwio::load_scalar_mask(mask)?;
            let lifted = cw::lift_mask(&scalar, &triple)?;
            let path = out.join("lifted-mask.json");
            cwio::save_matrix_mask(&lifted, &triple, &path)?;
            let mut report = Report::new("mask lift");
            report.set("entries", scalar.len());
            report.set("support_size", lifted.len());
            report.set("output", path.display().to_string());
            report.ok(true);
            finish(report, out, "mask-lift-report.json")
        }
        MaskAction::CheckSym { mask, tol } => {
            let (matrix, triple) = cwio::load_matrix_mask(mask)?;
            let rep = cw::check_gamma_a_symmetry(&matrix, &triple, *tol)?;
            let mut report = Report::new("mask check-sym");
            report.set("max_violation", rep.max_violation);
            report.set("tol", *tol);
            if let Some((i, j, k)) = &rep.witness {
                report.set("witness", serde_json::json!({"i": i, "j": j, "k": k}));
            }
            report.ok(rep.ok);
            finish(report, out, "mask-sym-report.json")
        }
        MaskAction::Extract { mask, tol } => {
            let (matrix, triple) = cwio::load_matrix_mask(mask)?;
            let scalar = cw::extract_scalar(&matrix, &triple, *tol)?;
            let path = out.join("extracted-mask.json");
            cwio::save_scalar_mask(&scalar, &triple, &path)?;
            let mut report = Report::new("mask extract");
            report.set("entries", scalar.len());
            report.set("output", path.display().to_string());
            report.ok(true);
            finish(report, out, "mask-extract-report.json")
        }
    }
}

fn run_cascade(
    mask: &std::path::Path,
    level: u32,
    iterations: usize,
    tol: f64,
    render: bool,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let (scalar, triple) = cwio::load_scalar_mask(mask)?;
    let lifted = cw::lift_mask(&scalar, &triple)?;
    let mut params = cw::CascadeParams::new(level);
    params.max_iterations = iterations;
    params.tol = tol;
    let result = cw::cascade_solve(&lifted, &triple, &params)?;
    let residual = cw::transfer_residual(&lifted, &result.function, &triple)?;

    let csv = out.join("cascade.csv");
    cwio::write_sampled_csv(&result.function, &csv)?;
    if render && triple.dimension() == 2 {
        for ch in 0..result.function.channels() {
            cwio::write_pgm(
                &result.function,
                ch,
                255,
                &out.join(format!("cascade-ch{ch}.pgm")),
            )?;
        }
    }

    let contraction = cw::check_contraction(&scalar, &triple)?;
    let mut report = Report::new("cascade");
    report.set("level", level);
    report.set("iterations", result.iterations);
    report.set("converged", result.converged);
    report.set("non_convergent", result.non_convergent);
    report.set("boundary_contraction", result.boundary_contraction);
    report.set("residual", residual);
    report.set("trace", result.trace.clone());
    report.set("sum_sq", contraction.sum_sq);
    report.set("m", contraction.m);
    report.set("l2_norm", result.function.l2_norm());
    report.set("csv", csv.display().to_string());
    report.ok(result.converged);
    finish(report, out, "cascade-report.json")
}

fn run_attractor(
    group: &str,
    dilation: Option<&str>,
    mask: Option<&std::path::Path>,
    depth: u32,
    render: bool,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let triple = resolve_group(group, dilation)?;
    let dil = triple.dilation()?;
    let support: Vec<cw::IVec> = match mask {
        Some(path) => {
            let (scalar, mask_triple) = cwio::load_scalar_mask(path)?;
            let lifted = cw::lift_mask(&scalar, &mask_triple)?;
            lifted.support()
        }
        None => dil.digits().to_vec(),
    };
    let est = cw::attractor_estimate(dil, &support, depth);
    let mut report = Report::new("attractor");
    report.set("depth", depth);
    report.set("cells", est.cells.len());
    report.set("support_radius", est.support_radius);
    if let Some(defect) = est.tiling_defect {
        report.set("tiling_defect", defect);
    }
    if render && triple.dimension() == 2 {
        // indicator grid as a one-channel sampled function
        let mut lo = vec![i64::MAX; 2];
        let mut hi = vec![i64::MIN; 2];
        for c in &est.cells {
            for t in 0..2 {
                lo[t] = lo[t].min(c[t]);
                hi[t] = hi[t].max(c[t]);
            }
        }
        let grid = cw::GridBox::new(lo, hi);
        let mut f = cw::SampledVectorFunction::zeros(depth, 1, grid, 1.0);
        for c in &est.cells {
            f.set(c, 0, Complex64::new(1.0, 0.0));
        }
        let path = out.join("attractor.pgm");
        cwio::write_pgm(&f, 0, 255, &path)?;
        report.set("pgm", path.display().to_string());
    }
    report.ok(est.tiling_defect.map(|d| d < 1e-6).unwrap_or(true));
    finish(report, out, "attractor-report.json")
}

fn run_jsr(
    set: &std::path::Path,
    p: &str,
    max_length: usize,
    budget: usize,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let matrices = load_jsr_set(set)?;
    let order = cw::JsrOrder::parse(p)
        .ok_or_else(|| anyhow::anyhow!("--p must be a number >= 1 or 'inf'"))?;
    let mset = cw::MatrixSet::new(matrices)?;
    let est = cw::jsr_estimate(&mset, order, max_length, budget);
    let mut report = Report::new("jsr");
    report.set("p", p.to_string());
    report.set("max_length", max_length);
    report.set("budget", budget);
    report.set("lower", est.lower);
    report.set("upper", est.upper);
    report.set("per_length", est.per_length.clone());
    report.set("truncated", est.truncated);
    report.ok(!est.truncated);
    finish(report, out, "jsr-report.json")
}

fn run_symbol(action: &SymbolAction, out: &std::path::Path) -> anyhow::Result<Outcome> {
    match action {
        SymbolAction::Eval { mask, omega } => {
            let (scalar, triple) = cwio::load_scalar_mask(mask)?;
            let dil = triple.dilation()?;
            let lifted = cw::lift_mask(&scalar, &triple)?;
            let m0 = cw::symbol_from_mask(&lifted, dil.m());
            let sigma = cw::symbol_from_scalar_sigma(&scalar, &triple)?;
            let w: Vec<f64> = omega
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow::anyhow!("--omega: {e}"))?;
            if w.len() != triple.dimension() {
                anyhow::bail!(
                    "--omega needs {} components, got {}",
                    triple.dimension(),
                    w.len()
                );
            }
            let value = m0.eval(&w);
            let r = triple.order();
            let as_json: Vec<Vec<[f64; 2]>> = (0..r)
                .map(|i| (0..r).map(|j| [value[(i, j)].re, value[(i, j)].im]).collect())
                .collect();
            // disagreement of the two constructions over a probe grid
            let grid = cw::FrequencyGrid::uniform(triple.dimension(), 8);
            let mut disagreement = 0.0f64;
            for pt in grid.points() {
                let d = (m0.eval(&pt) - sigma.eval(&pt)).map(|z| z.norm()).max();
                disagreement = disagreement.max(d);
            }
            let mut report = Report::new("symbol eval");
            report.set("omega", w);
            report.set("value", as_json);
            report.set("sigma_construction_disagreement", disagreement);
            report.ok(true);
            finish(report, out, "symbol-eval-report.json")
        }
        SymbolAction::Sweep {
            bank,
            mask,
            freq_res,
        } => {
            let (symbols, triple) = match (bank, mask) {
                (Some(path), None) => {
                    let (bank, triple, _) = cwio::load_bank(path)?;
                    (bank.symbols(&triple)?, triple)
                }
                (None, Some(path)) => {
                    let (scalar, triple) = cwio::load_scalar_mask(path)?;
                    let dil = triple.dilation()?;
                    let lifted = cw::lift_mask(&scalar, &triple)?;
                    (vec![cw::symbol_from_mask(&lifted, dil.m())], triple)
                }
                _ => anyhow::bail!("pass exactly one of --bank or --mask"),
            };
            let dil = triple.dilation()?;
            let grid = cw::FrequencyGrid::uniform(triple.dimension(), *freq_res);
            let rep = cw::unitarity_defect_modulation(&symbols, dil, &grid)?;
            // per-point sweep for the CSV artifact
            let mut rows = Vec::new();
            for pt in grid.points() {
                let m = cw::modulation_matrix(&symbols, &pt, dil)?;
                let gram = &m * m.adjoint();
                let id = cw::CMat::identity(gram.nrows(), gram.ncols());
                let defect = (gram - id).map(|z| z.norm()).max();
                rows.push((pt, defect));
            }
            let csv = out.join("unitarity-sweep.csv");
            cwio::write_defect_csv(&rows, &csv)?;
            let mut report = Report::new("symbol sweep");
            report.set("freq_res", *freq_res);
            report.set("max_defect", rep.max_defect);
            report.set("argmax", rep.argmax.clone());
            report.set("csv", csv.display().to_string());
            report.ok(rep.max_defect <= 1e-10);
            finish(report, out, "symbol-sweep-report.json")
        }
    }
}

fn run_check_mra(
    mask: &std::path::Path,
    level: u32,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let (scalar, triple) = cwio::load_scalar_mask(mask)?;
    let params = cw::MraParams {
        level,
        ..Default::default()
    };
    let rep = cw::check_mra(&scalar, &triple, &params)?;
    let mut report = Report::new("check-mra");
    report.set("level", level);
    report.set("orthonormality_defect", rep.orthonormality.defect);
    report.set("orthonormality_ok", rep.orthonormality_ok);
    report.set("quadrature_estimate", rep.orthonormality.quadrature_estimate);
    report.set("refinability_residual", rep.refinability_residual);
    report.set("refinable", rep.refinable);
    report.set("density_lhs", rep.density.lhs);
    report.set("density_rhs", rep.density.rhs);
    report.set("density_ok", rep.density.ok);
    report.set("sum_sq", rep.contraction.sum_sq);
    report.set("strict_contraction", rep.contraction.strict);
    report.set("symmetry_ok", rep.symmetry.ok);
    report.set("cascade_converged", rep.cascade_converged);
    report.ok(rep.ok);
    finish(report, out, "mra-report.json")
}

fn run_check_d(
    bank_path: &std::path::Path,
    tol: f64,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let (bank, triple, stamp) = cwio::load_bank(bank_path)?;
    let rep = cw::check_condition_d(&bank, &triple, tol)?;
    let us = bank.polyphase_rows(&triple)?;
    let grid = cw::FrequencyGrid::uniform(triple.dimension(), 4);
    let urep = cw::unitarity_defect_polyphase(&us, &grid)?;
    let mut report = Report::new("check-d");
    report.set("tol", tol);
    report.set("max_violation", rep.max_violation);
    report.set("symmetry_violation", rep.symmetry_violation);
    if let Some((i, j, v)) = &rep.witness {
        report.set("witness", serde_json::json!({"i": i, "j": j, "v": v}));
    }
    report.set("polyphase_unitarity_defect", urep.max_defect);
    report.set("stamp_violation", stamp.condition_d_violation);
    report.ok(rep.ok);
    finish(report, out, "condition-d-report.json")
}

fn run_haar(
    group: &str,
    dilation: Option<&str>,
    pieces_path: &std::path::Path,
    level: u32,
    tol: f64,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let triple = resolve_group(group, dilation)?;
    let pieces = load_pieces(pieces_path, &triple)?;
    match cw::haar_from_tile(&triple, &pieces, level, None, tol) {
        Ok((mask, _lifted, _dec, tile_report)) => {
            let mask_path = out.join("haar-mask.json");
            cwio::save_scalar_mask(&mask, &triple, &mask_path)?;
            let mut report = Report::new("haar");
            report.set("level", level);
            report.set("indicator_defect", tile_report.indicator_defect);
            report.set("measure", tile_report.measure);
            report.set("expected_measure", tile_report.expected_measure);
            report.set("plateau", tile_report.plateau);
            report.set("mask", mask_path.display().to_string());
            report.ok(true);
            finish(report, out, "haar-report.json")
        }
        Err(e @ (cw::BankError::NotATileDecomposition { .. }
        | cw::BankError::PieceCountMismatch { .. })) => {
            let mut report = Report::new("haar");
            report.set("error", e.to_string());
            report.ok(false);
            finish(report, out, "haar-report.json")
        }
        Err(e) => Err(e.into()),
    }
}

fn run_complete(
    mask: &std::path::Path,
    tol: f64,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let (scalar, triple) = cwio::load_scalar_mask(mask)?;
    let lifted = cw::lift_mask(&scalar, &triple)?;
    let bank = cw::complete_constant_polyphase(&lifted, &triple)?;
    let rep = cw::check_condition_d(&bank, &triple, tol)?;
    let bank_path = out.join("bank.json");
    cwio::save_bank(
        &bank,
        &triple,
        cwio::ValidationStamp {
            condition_d_violation: rep.max_violation,
            tol,
        },
        &bank_path,
    )?;
    let mut report = Report::new("complete");
    report.set("m", bank.m());
    report.set("condition_d_violation", rep.max_violation);
    report.set("tol", tol);
    report.set("bank", bank_path.display().to_string());
    report.ok(rep.ok);
    finish(report, out, "complete-report.json")
}

#[derive(serde::Serialize, serde::Deserialize)]
struct TransformManifest {
    bank: String,
    levels: usize,
    details: Vec<Vec<String>>,
    coarse: String,
}

fn run_transform(action: &TransformAction, out: &std::path::Path) -> anyhow::Result<Outcome> {
    match action {
        TransformAction::Analyze { bank, data, levels } => {
            let (bank_mats, triple, _) = cwio::load_bank(bank)?;
            let s = cwio::read_sequence_raw(data)?;
            let energy_in = s.energy();
            let pyramid = cw::transform_multilevel(&bank_mats, &s, *levels, &triple)?;
            let mut detail_paths = Vec::new();
            let mut energy_out = pyramid.coarse.energy();
            for (j, ws) in pyramid.details.iter().enumerate() {
                let mut level_paths = Vec::new();
                for (l, w) in ws.iter().enumerate() {
                    let path = out.join(format!("detail-{j}-{}.bin", l + 1));
                    cwio::write_sequence_raw(w, &path)?;
                    energy_out += w.energy();
                    level_paths.push(path.display().to_string());
                }
                detail_paths.push(level_paths);
            }
            let coarse_path = out.join("coarse.bin");
            cwio::write_sequence_raw(&pyramid.coarse, &coarse_path)?;
            let manifest = TransformManifest {
                bank: bank.display().to_string(),
                levels: *levels,
                details: detail_paths,
                coarse: coarse_path.display().to_string(),
            };
            std::fs::write(
                out.join("transform-manifest.json"),
                serde_json::to_string_pretty(&manifest)?,
            )?;
            let mut report = Report::new("transform analyze");
            report.set("levels", *levels);
            report.set("energy_in", energy_in);
            report.set("energy_out", energy_out);
            report.set(
                "parseval_error",
                (energy_in - energy_out).abs() / energy_in.max(1e-300),
            );
            report.ok(true);
            finish(report, out, "transform-analyze-report.json")
        }
        TransformAction::Synthesize { manifest } => {
            let text = std::fs::read_to_string(manifest)?;
            let manifest: TransformManifest = serde_json::from_str(&text)?;
            let (bank_mats, triple, _) = cwio::load_bank(std::path::Path::new(&manifest.bank))?;
            let coarse = cwio::read_sequence_raw(std::path::Path::new(&manifest.coarse))?;
            let mut details = Vec::new();
            for level_paths in &manifest.details {
                let ws: Result<Vec<_>, _> = level_paths
                    .iter()
                    .map(|p| cwio::read_sequence_raw(std::path::Path::new(p)))
                    .collect();
                details.push(ws?);
            }
            let pyramid = cw::Pyramid { details, coarse };
            let s = cw::inverse_transform_multilevel(&bank_mats, &pyramid, &triple)?;
            let path = out.join("reconstructed.bin");
            cwio::write_sequence_raw(&s, &path)?;
            let mut report = Report::new("transform synthesize");
            report.set("output", path.display().to_string());
            report.set("energy", s.energy());
            report.ok(true);
            finish(report, out, "transform-synthesize-report.json")
        }
    }
}

fn run_render(
    mask: &std::path::Path,
    level: u32,
    maxval: u16,
    out: &std::path::Path,
) -> anyhow::Result<Outcome> {
    let (scalar, triple) = cwio::load_scalar_mask(mask)?;
    if triple.dimension() != 2 {
        anyhow::bail!("render needs a 2-d group");
    }
    let lifted = cw::lift_mask(&scalar, &triple)?;
    let params = cw::CascadeParams::new(level);
    let result = cw::cascade_solve(&lifted, &triple, &params)?;
    let mut paths = Vec::new();
    for ch in 0..result.function.channels() {
        let path = out.join(format!("render-ch{ch}.pgm"));
        cwio::write_pgm(&result.function, ch, maxval, &path)?;
        paths.push(path.display().to_string());
    }
    let mut report = Report::new("render");
    report.set("level", level);
    report.set("maxval", maxval);
    report.set("images", paths);
    report.ok(true);
    finish(report, out, "render-report.json")
}
