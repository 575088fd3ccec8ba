use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use rod_core::burgers::{generate_snapshots, write_metadata};
use rod_core::empirical::{compare_projections, fourier_decomposition, fourier_self_comparison};
use rod_core::format::{format_number, read_snapshot_csv, snapshot_csv};
use rod_core::metrics::{quality_report, CorrelationVariant, QualityReport};
use rod_core::rank_select::{pareto_sweep_with, select_rank, sweep_csv};
use rod_core::rod::{fit_with, read_model, reconstruct, render_model, FitOptions, RodModel};
use rod_core::rsvd::DEFAULT_OVERSAMPLING;
use rod_core::SnapshotMatrix;

use crate::settings::{burgers_config, pick, required_path, tolerance, BurgersFlags, ConfigFile};
use crate::{Cli, Command, CompareArgs, EvaluateArgs, FitArgs, FitFlags, GenerateArgs, SweepArgs, UsageError};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_RANK: usize = 10;
const DEFAULT_MAX_RANK: usize = 20;

pub fn run(cli: Cli) -> Result<u8> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(a) => generate(a, &file),
        Command::Fit(a) => fit(a, &file),
        Command::Sweep(a) => sweep(a, &file),
        Command::Evaluate(a) => evaluate(a, &file),
        Command::Compare(a) => compare(a, &file),
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn load_snapshots(path: &Path) -> Result<SnapshotMatrix> {
    Ok(read_snapshot_csv(path)?)
}

fn fit_options(flags: &FitFlags, file: &ConfigFile, rank: usize) -> Result<FitOptions> {
    let mut opts = FitOptions::new(rank, pick(flags.seed, file.int("seed")?, DEFAULT_SEED));
    opts.oversampling = pick(flags.oversampling, file.int("oversampling")?, DEFAULT_OVERSAMPLING);
    opts.reorthonormalize_modes = flags.reorthonormalize || file.flag("reorthonormalize")?.unwrap_or(false);
    Ok(opts)
}

fn variant(flag: Option<CorrelationVariant>, file: &ConfigFile) -> Result<CorrelationVariant> {
    Ok(pick(flag, file.variant()?, CorrelationVariant::Paper))
}

fn check_rank(flag: &str, rank: usize, data: &SnapshotMatrix) -> Result<(), UsageError> {
    let bound = data.nx().min(data.nt());
    if rank == 0 || rank > bound {
        return Err(UsageError(format!("--{flag}: {rank} outside 1..={bound} for this dataset")));
    }
    Ok(())
}

fn generate(a: GenerateArgs, file: &ConfigFile) -> Result<u8> {
    let output = required_path(a.output, file, "output")?;
    let flags = BurgersFlags {
        nu: a.nu,
        quad_order: a.quad_order,
        grid_points: a.grid_points,
        dt: a.dt,
        t_final: a.t_final,
    };
    let cfg = burgers_config(&flags, file)?;
    let data = generate_snapshots(&cfg).context("generating snapshots")?;
    let csv = snapshot_csv(&data);
    write(&output, csv.as_bytes())?;
    let meta = meta_path(&output);
    write_metadata(&meta, &cfg)?;
    println!("output = {}", output.display());
    println!("metadata = {}", meta.display());
    println!("nx = {}", data.nx());
    println!("n_snapshots = {}", data.n_snapshots());
    println!("sha256 = {}", hex::encode(Sha256::digest(csv.as_bytes())));
    Ok(0)
}

fn meta_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn report_for(data: &SnapshotMatrix, model: &RodModel, v: CorrelationVariant) -> Result<QualityReport> {
    let fourier = fourier_decomposition(data).context("empirical modes")?;
    Ok(quality_report(data, model, &fourier, v)?)
}

fn fit(a: FitArgs, file: &ConfigFile) -> Result<u8> {
    let input = required_path(a.input, file, "input")?;
    let output = required_path(a.output, file, "output")?;
    let rank = pick(a.rank, file.int("rank")?, DEFAULT_RANK);
    let opts = fit_options(&a.fit, file, rank)?;
    let v = variant(a.correlation_variant, file)?;
    let data = load_snapshots(&input)?;
    check_rank("rank", rank, &data)?;
    let model = fit_with(&data, &opts)?;
    write(&output, render_model(&model).as_bytes())?;
    print!("{}", report_for(&data, &model, v)?.to_key_values());
    Ok(0)
}

fn sweep(a: SweepArgs, file: &ConfigFile) -> Result<u8> {
    let input = required_path(a.input, file, "input")?;
    let output = required_path(a.output, file, "output")?;
    let max_rank = pick(a.max_rank, file.int("max_rank")?, DEFAULT_MAX_RANK);
    let tol = tolerance(a.tol, file)?;
    let base = fit_options(&a.fit, file, 1)?;
    let data = load_snapshots(&input)?;
    check_rank("max-rank", max_rank, &data)?;
    let points = pareto_sweep_with(&data, max_rank, &base)?;
    write(&output, sweep_csv(&points).as_bytes())?;
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    let front: Vec<String> = points
        .iter()
        .filter(|p| !p.dominated)
        .map(|p| p.rank.to_string())
        .collect();
    println!("ranks = {}", points.len());
    println!("failed = {failed}");
    println!("nondominated = {}", front.join(" "));
    println!("tol = {}", format_number(tol));
    println!("selected_rank = {}", select_rank(&points, tol)?);
    Ok(0)
}

fn load_model_for(data: &SnapshotMatrix, path: &Path) -> Result<RodModel> {
    let model = read_model(path)?;
    let grid = SnapshotMatrix::from_grids(
        rod_core::Matrix::zeros(model.x_grid.len(), model.t_grid.len()),
        model.x_grid.clone(),
        model.t_grid.clone(),
    )?;
    if !data.same_grid(&grid) {
        return Err(UsageError(format!(
            "--model: {} was fitted on a {}x{} grid that does not match the {}x{} dataset",
            path.display(),
            model.nx(),
            model.n_snapshots(),
            data.nx(),
            data.n_snapshots()
        ))
        .into());
    }
    Ok(model)
}

fn evaluate(a: EvaluateArgs, file: &ConfigFile) -> Result<u8> {
    let input = required_path(a.input, file, "input")?;
    let model_path = required_path(a.model, file, "model")?;
    let out_dir = required_path(a.output, file, "output")?;
    let v = variant(a.correlation_variant, file)?;
    let data = load_snapshots(&input)?;
    let model = load_model_for(&data, &model_path)?;
    fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;

    let twin = reconstruct(&model)?;
    write(&out_dir.join("reconstruction.csv"), snapshot_csv(&twin).as_bytes())?;
    write(&out_dir.join("modes.csv"), complex_table("x", &model.x_grid, "phi", &model.modes, false).as_bytes())?;
    write(
        &out_dir.join("amplitudes.csv"),
        complex_table("t", &model.t_grid, "a", &model.amplitudes, true).as_bytes(),
    )?;
    let report = report_for(&data, &model, v)?.to_key_values();
    write(&out_dir.join("report.txt"), report.as_bytes())?;
    print!("{report}");
    Ok(0)
}

/// One row per coordinate; two columns (real, imaginary) per mode.
/// `transposed` reads the matrix with coordinates along columns.
fn complex_table(axis: &str, coords: &[f64], name: &str, m: &rod_core::CMatrix, transposed: bool) -> String {
    let n_series = if transposed { m.rows() } else { m.cols() };
    let mut out = String::from(axis);
    for j in 1..=n_series {
        out.push_str(&format!(",re_{name}{j},im_{name}{j}"));
    }
    out.push('\n');
    for (i, &c) in coords.iter().enumerate() {
        out.push_str(&format_number(c));
        for j in 0..n_series {
            let z = if transposed { m[(j, i)] } else { m[(i, j)] };
            out.push(',');
            out.push_str(&format_number(z.re));
            out.push(',');
            out.push_str(&format_number(z.im));
        }
        out.push('\n');
    }
    out
}

fn compare(a: CompareArgs, file: &ConfigFile) -> Result<u8> {
    let input = required_path(a.input, file, "input")?;
    let data = load_snapshots(&input)?;
    let fourier = fourier_decomposition(&data).context("empirical modes")?;
    let cmp = if a.fourier_self {
        fourier_self_comparison(&fourier, &data)?
    } else {
        let model_path = required_path(a.model, file, "model")?;
        let model = load_model_for(&data, &model_path)?;
        compare_projections(&model, &fourier, &data)?
    };
    println!("rho_rod = {}", format_number(cmp.rho_rod));
    println!("rho_fourier = {}", format_number(cmp.rho_fourier));
    if a.same_rank {
        println!("rho_fourier_same_rank = {}", format_number(cmp.rho_fourier_same_rank));
    }
    println!("ratio = {}", format_number(cmp.ratio));
    println!("dominates = {}", cmp.dominates);
    Ok(if cmp.dominates { 0 } else { 3 })
}
