//! Subcommand implementations.
//!
//! Every command is a pure function of its input files, config, and seed;
//! repeated invocations produce identical outputs. Floats in CSV output
//! carry 17 significant digits, JSON floats the shortest exact form.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use edgeo::geometry::{procrustes_align, squared_edm, validate_edm, PointConfig};
use edgeo::io;
use edgeo::sampling::{
    draw_samples, draw_samples_per_column, observe_from_anchor_rows, SampleSet,
};
use edgeo::solver::{recover_configuration, Method};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Config;

type CmdResult = Result<i32, String>;

fn ctx<T>(result: edgeo::Result<T>, what: &str, path: &Path) -> Result<T, String> {
    result.map_err(|e| format!("{what} {}: {e}", path.display()))
}

fn ensure_out_dir(cfg: &Config) -> Result<(), String> {
    fs::create_dir_all(&cfg.out).map_err(|e| format!("out dir {}: {e}", cfg.out.display()))
}

/// Deterministic uniform point cloud in the configured bounds; anchors are
/// simply the first `m` points.
fn generate_points(cfg: &Config) -> Result<PointConfig<f64>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut coords = DMatrix::zeros(cfg.r, cfg.p);
    for j in 0..cfg.p {
        for i in 0..cfg.r {
            let [lo, hi] = cfg.bound(i);
            coords[(i, j)] = rng.random_range(lo..hi);
        }
    }
    PointConfig::new(coords, cfg.m).map_err(|e| e.to_string())
}

pub fn generate(cfg: &Config) -> CmdResult {
    cfg.validate()?;
    ensure_out_dir(cfg)?;
    let points = generate_points(cfg)?;
    let d = squared_edm(&points);
    debug_assert!(validate_edm(&d, edgeo::DEFAULT_EDM_TOL));

    let points_path = cfg.out.join("points.csv");
    let dist_path = cfg.out.join("dist.csv");
    ctx(io::write_points_csv(&points_path, &points), "write", &points_path)?;
    let meta_path = io::sidecar_path(&points_path);
    ctx(
        io::write_metadata(&meta_path, &io::Metadata { m: cfg.m, r: cfg.r }),
        "write",
        &meta_path,
    )?;
    ctx(io::write_matrix_csv(&dist_path, d.matrix()), "write", &dist_path)?;
    println!(
        "generated p={} (m={} anchors, n={} mobiles) r={} seed={} -> {}",
        cfg.p,
        cfg.m,
        cfg.p - cfg.m,
        cfg.r,
        cfg.seed,
        cfg.out.display()
    );
    Ok(0)
}

pub struct SampleArgs {
    pub dist: Option<PathBuf>,
    pub meta: Option<PathBuf>,
    pub per_column: Option<usize>,
}

pub fn sample(cfg: &Config, args: &SampleArgs) -> CmdResult {
    cfg.validate()?;
    ensure_out_dir(cfg)?;
    let dist_path = args.dist.clone().unwrap_or_else(|| cfg.out.join("dist.csv"));
    let meta_path = args
        .meta
        .clone()
        .unwrap_or_else(|| io::sidecar_path(&cfg.out.join("points.csv")));
    let meta = ctx(io::read_metadata(&meta_path), "read", &meta_path)?;

    // Only the anchor rows of the distance file are ever parsed.
    let anchor_rows = ctx(
        io::read_anchor_rows_csv(&dist_path, meta.m),
        "read",
        &dist_path,
    )?;
    let p = anchor_rows.ncols();
    if meta.m >= p {
        return Err(format!(
            "{}: m={} leaves no mobile columns (p={p})",
            meta_path.display(),
            meta.m
        ));
    }
    let n = p - meta.m;

    let per_column = args.per_column.or(cfg.per_column);
    let omega = match per_column {
        Some(k) => draw_samples_per_column(meta.m, n, k, cfg.seed),
        None => draw_samples(meta.m, n, cfg.rate, cfg.seed),
    }
    .map_err(|e| e.to_string())?;
    let obs = observe_from_anchor_rows(&anchor_rows, &omega).map_err(|e| e.to_string())?;

    let omega_path = cfg.out.join("omega.json");
    let obs_path = cfg.out.join("observations.json");
    ctx(io::write_sample_set(&omega_path, &omega), "write", &omega_path)?;
    ctx(io::write_observations(&obs_path, &obs), "write", &obs_path)?;
    let counts = obs.per_column_counts();
    let min = counts.iter().min().copied().unwrap_or(0);
    println!(
        "sampled {} of {} entries (min {} / mean {:.2} per column) -> {}",
        omega.len(),
        (meta.m - 1) * n,
        min,
        omega.len() as f64 / n as f64,
        obs_path.display()
    );
    Ok(0)
}

pub struct SolveArgs {
    pub obs: Option<PathBuf>,
}

pub fn solve(cfg: &Config, args: &SolveArgs) -> CmdResult {
    cfg.validate()?;
    ensure_out_dir(cfg)?;
    let obs_path = args
        .obs
        .clone()
        .unwrap_or_else(|| cfg.out.join("observations.json"));
    let obs = ctx(io::read_observations(&obs_path), "read", &obs_path)?;

    let report = recover_configuration(&obs, &cfg.solver()).map_err(|e| e.to_string())?;

    let recovered_path = cfg.out.join("recovered.csv");
    ctx(
        io::write_points_csv(&recovered_path, &report.points),
        "write",
        &recovered_path,
    )?;
    let meta_path = io::sidecar_path(&recovered_path);
    ctx(
        io::write_metadata(
            &meta_path,
            &io::Metadata {
                m: report.points.split(),
                r: report.points.dims(),
            },
        ),
        "write",
        &meta_path,
    )?;
    let report_path = cfg.out.join("report.json");
    let report_file = io::ReportFile::from_report(&report);
    ctx(io::write_report(&report_path, &report_file), "write", &report_path)?;

    println!(
        "method={} residual={:.16e} rank_a={} underdetermined={} wall={:.3}s converged={}",
        report.method,
        report.residual,
        report.rank_a,
        report.underdetermined_columns.len(),
        report.wall_seconds,
        report.converged
    );
    if report.rank_a < cfg.r {
        eprintln!(
            "warning: anchor Gram rank {} is below r={}; anchors do not span the target dimension",
            report.rank_a, cfg.r
        );
    }
    Ok(if report.converged { 0 } else { 1 })
}

pub struct EvaluateArgs {
    pub estimate: PathBuf,
    pub reference: PathBuf,
    pub report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Metrics {
    rmse: f64,
    max_error: f64,
    per_point_errors: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    underdetermined_columns: Option<Vec<usize>>,
}

pub fn evaluate(cfg: &Config, args: &EvaluateArgs) -> CmdResult {
    ensure_out_dir(cfg)?;
    let est = ctx(io::read_points_csv(&args.estimate), "read", &args.estimate)?;
    let reference = ctx(io::read_points_csv(&args.reference), "read", &args.reference)?;
    if est.nrows() != reference.nrows() || est.ncols() != reference.ncols() {
        return Err(format!(
            "shape mismatch: estimate is {}x{}, reference is {}x{}",
            est.nrows(),
            est.ncols(),
            reference.nrows(),
            reference.ncols()
        ));
    }
    // The split is irrelevant for rigid alignment; any valid value works.
    let split = est.ncols().saturating_sub(1).max(1);
    let est = PointConfig::new(est, split).map_err(|e| e.to_string())?;
    let reference = PointConfig::new(reference, split).map_err(|e| e.to_string())?;

    let (aligned, rmse) = procrustes_align(&est, &reference).map_err(|e| e.to_string())?;
    let per_point: Vec<f64> = (0..reference.len())
        .map(|j| (aligned.coords().column(j) - reference.coords().column(j)).norm())
        .collect();
    let max_error = per_point.iter().cloned().fold(0.0, f64::max);

    let underdetermined = match &args.report {
        Some(path) => Some(ctx(io::read_report(path), "read", path)?.underdetermined_columns),
        None => None,
    };

    let metrics = Metrics {
        rmse,
        max_error,
        per_point_errors: per_point,
        underdetermined_columns: underdetermined,
    };
    let metrics_path = cfg.out.join("metrics.json");
    ctx(io::write_json(&metrics_path, &metrics), "write", &metrics_path)?;
    println!("rmse={rmse:.16e} max={max_error:.16e} -> {}", metrics_path.display());
    Ok(0)
}

#[derive(Serialize)]
struct BenchReport {
    n: usize,
    m: usize,
    r: usize,
    seed: u64,
    scale: f64,
    rmse: f64,
    solve_seconds: f64,
    total_seconds: f64,
    converged: bool,
}

/// Large-scale anchored benchmark: full anchor-mobile distances, anchored
/// least-squares recovery, Procrustes error against the generated truth.
pub fn bench_paper(cfg: &Config, scale: f64) -> CmdResult {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(format!("scale: must be positive, got {scale}"));
    }
    ensure_out_dir(cfg)?;
    let n = ((3000.0 * scale).round() as usize).max(1);
    let m = ((50.0 * scale).round() as usize).max(20);
    let r = 2;
    let p = m + n;

    let total_start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut coords = DMatrix::zeros(r, p);
    for j in 0..p {
        for i in 0..r {
            coords[(i, j)] = rng.random_range(0.0..1.0);
        }
    }
    let truth = PointConfig::new(coords, m).map_err(|e| e.to_string())?;

    // Anchor rows of the squared distance matrix; the mobile-mobile block
    // is never formed.
    let mut anchor_rows = DMatrix::zeros(m, p);
    for i in 0..m {
        for j in 0..p {
            anchor_rows[(i, j)] =
                (truth.coords().column(i) - truth.coords().column(j)).norm_squared();
        }
    }
    let omega = draw_samples(m, n, 1.0, cfg.seed).map_err(|e| e.to_string())?;
    let obs = observe_from_anchor_rows(&anchor_rows, &omega).map_err(|e| e.to_string())?;

    let mut solver = cfg.solver();
    solver.method = Method::AnchoredLs;
    solver.r = r;
    let report = recover_configuration(&obs, &solver).map_err(|e| e.to_string())?;
    let (_, rmse) = procrustes_align(&report.points, &truth).map_err(|e| e.to_string())?;

    let bench = BenchReport {
        n,
        m,
        r,
        seed: cfg.seed,
        scale,
        rmse,
        solve_seconds: report.wall_seconds,
        total_seconds: total_start.elapsed().as_secs_f64(),
        converged: report.converged,
    };
    let bench_path = cfg.out.join("bench.json");
    ctx(io::write_json(&bench_path, &bench), "write", &bench_path)?;
    println!(
        "n={n} m={m} r={r} seed={}: rmse={:.16e} solve={:.3}s total={:.3}s",
        cfg.seed, bench.rmse, bench.solve_seconds, bench.total_seconds
    );
    Ok(0)
}

/// Shared sample-set loader for tooling and tests.
#[allow(dead_code)]
pub fn load_sample_set(path: &Path) -> Result<SampleSet, String> {
    ctx(io::read_sample_set(path), "read", path)
}
