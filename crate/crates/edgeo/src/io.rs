//! File formats: point sets and distance matrices as CSV, sample sets,
//! observation sets, and recovery reports as JSON.
//!
//! Points are written one row per point with header `x1,...,xr`, anchors
//! first; the anchor split lives in a JSON sidecar `{"m": .., "r": ..}`.
//! Distance matrices are full `p x p` CSV arrays without a header. CSV
//! floats are printed with 17 significant digits so values round-trip
//! bit-for-bit; JSON floats use the shortest exact representation.
//!
//! All indices in wire formats are zero-based.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PointConfig;
use crate::sampling::{ObservationSet, SampleSet};
use crate::solver::RecoveryReport;

/// Anchor split and dimension sidecar for a points CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub m: usize,
    pub r: usize,
}

/// Sidecar path for a CSV: `points.csv` -> `points.meta.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.json")
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_points_csv(path: &Path, points: &PointConfig<f64>) -> Result<()> {
    let r = points.dims();
    let mut writer = csv::Writer::from_path(path)?;
    let header: Vec<String> = (1..=r).map(|k| format!("x{k}")).collect();
    writer.write_record(&header)?;
    for col in points.coords().column_iter() {
        let record: Vec<String> = col.iter().map(|&x| fmt_float(x)).collect();
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_metadata(path: &Path, meta: &Metadata) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(meta)?)?;
    Ok(())
}

pub fn read_metadata(path: &Path) -> Result<Metadata> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Read a points CSV back as an `r x p` coordinate matrix (columns are
/// points, in file order).
pub fn read_points_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let r = reader.headers()?.len();
    let mut values: Vec<f64> = Vec::new();
    let mut p = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != r {
            return Err(Error::InvalidData(format!(
                "{}: row {row} has {} fields, header has {r}",
                path.display(),
                record.len()
            )));
        }
        for (col, field) in record.iter().enumerate() {
            values.push(parse_float(path, row, col, field)?);
        }
        p += 1;
    }
    if p == 0 {
        return Err(Error::InvalidData(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    // File is row-per-point; coords are column-per-point.
    let row_major = DMatrix::from_row_slice(p, r, &values);
    Ok(row_major.transpose())
}

pub fn write_matrix_csv(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for i in 0..matrix.nrows() {
        let record: Vec<String> = (0..matrix.ncols())
            .map(|j| fmt_float(matrix[(i, j)]))
            .collect();
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    read_matrix_rows(path, None)
}

/// Read only the first `m` rows of a matrix CSV. Parsing stops at row `m`;
/// the mobile-mobile block of a distance file is never even tokenized.
pub fn read_anchor_rows_csv(path: &Path, m: usize) -> Result<DMatrix<f64>> {
    read_matrix_rows(path, Some(m))
}

fn read_matrix_rows(path: &Path, limit: Option<usize>) -> Result<DMatrix<f64>> {
    let file = fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut values: Vec<f64> = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (row, line) in reader.lines().enumerate() {
        if let Some(limit) = limit {
            if row >= limit {
                break;
            }
        }
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(Error::InvalidData(format!(
                    "{}: row {row} has {} fields, expected {c}",
                    path.display(),
                    fields.len()
                )));
            }
            _ => {}
        }
        for (col, field) in fields.iter().enumerate() {
            values.push(parse_float(path, row, col, field.trim())?);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| {
        Error::InvalidData(format!("{}: no data rows", path.display()))
    })?;
    if let Some(limit) = limit {
        if rows < limit {
            return Err(Error::InvalidData(format!(
                "{}: requested {limit} rows, file has {rows}",
                path.display()
            )));
        }
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

fn parse_float(path: &Path, row: usize, col: usize, field: &str) -> Result<f64> {
    field.parse::<f64>().map_err(|_| {
        Error::InvalidData(format!(
            "{}: row {row}, column {col}: '{field}' is not a number",
            path.display()
        ))
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleSetFile {
    m: usize,
    n: usize,
    seed: u64,
    pairs: Vec<[usize; 2]>,
}

pub fn write_sample_set(path: &Path, omega: &SampleSet) -> Result<()> {
    let file = SampleSetFile {
        m: omega.anchors(),
        n: omega.mobiles(),
        seed: omega.seed(),
        pairs: omega.pairs().map(|&(i, j)| [i, j]).collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn read_sample_set(path: &Path) -> Result<SampleSet> {
    let text = fs::read_to_string(path)?;
    let file: SampleSetFile = serde_json::from_str(&text)?;
    SampleSet::from_pairs(
        file.m,
        file.n,
        file.seed,
        file.pairs.into_iter().map(|[i, j]| (i, j)),
    )
}

#[derive(Debug, Serialize, Deserialize)]
struct ObservationFile {
    m: usize,
    n: usize,
    e: Vec<Vec<f64>>,
    f_row_m: Vec<f64>,
    samples: Vec<(usize, usize, f64)>,
}

pub fn write_observations(path: &Path, obs: &ObservationSet<f64>) -> Result<()> {
    let m = obs.anchors();
    let file = ObservationFile {
        m,
        n: obs.mobiles(),
        e: (0..m)
            .map(|i| (0..m).map(|j| obs.e()[(i, j)]).collect())
            .collect(),
        f_row_m: obs.f_reference_row().iter().cloned().collect(),
        samples: obs.samples().iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn read_observations(path: &Path) -> Result<ObservationSet<f64>> {
    let text = fs::read_to_string(path)?;
    let file: ObservationFile = serde_json::from_str(&text)?;
    if file.e.len() != file.m || file.e.iter().any(|row| row.len() != file.m) {
        return Err(Error::InvalidData(format!(
            "{}: E block is not {m} x {m}",
            path.display(),
            m = file.m
        )));
    }
    if file.f_row_m.len() != file.n {
        return Err(Error::InvalidData(format!(
            "{}: row m has {} entries, expected {}",
            path.display(),
            file.f_row_m.len(),
            file.n
        )));
    }
    let e = DMatrix::from_fn(file.m, file.m, |i, j| file.e[i][j]);
    let f_row = DVector::from_vec(file.f_row_m);
    ObservationSet::from_parts(e, f_row, file.samples)
}

/// On-disk form of a recovery report; the recovered points live in a
/// separate CSV.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub method: String,
    pub residual: f64,
    pub objective_history: Vec<f64>,
    pub underdetermined_columns: Vec<usize>,
    pub wall_seconds: f64,
    pub converged: bool,
    pub rank_a: usize,
}

impl ReportFile {
    pub fn from_report(report: &RecoveryReport<f64>) -> Self {
        Self {
            method: report.method.to_string(),
            residual: report.residual,
            objective_history: report.objective_history.clone(),
            underdetermined_columns: report.underdetermined_columns.clone(),
            wall_seconds: report.wall_seconds,
            converged: report.converged,
            rank_a: report.rank_a,
        }
    }
}

pub fn write_report(path: &Path, report: &ReportFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(report)?)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<ReportFile> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Write arbitrary JSON-serializable metrics (used by the CLI).
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(serde_json::to_string_pretty(value)?.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::squared_edm;
    use crate::sampling::{draw_samples, observe};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn temp_dir() -> tempfile::TempDir {
        tempfile::tempdir().expect("temp dir")
    }

    fn random_points(seed: u64, r: usize, m: usize, n: usize) -> PointConfig<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = DMatrix::from_fn(r, m + n, |_, _| rng.random_range(-5.0..5.0));
        PointConfig::new(coords, m).unwrap()
    }

    #[test]
    fn points_round_trip_bit_for_bit() {
        let dir = temp_dir();
        let path = dir.path().join("points.csv");
        let pc = random_points(1, 3, 2, 5);
        write_points_csv(&path, &pc).unwrap();
        let coords = read_points_csv(&path).unwrap();
        assert_eq!(coords.nrows(), 3);
        assert_eq!(coords.ncols(), 7);
        for (a, b) in pc.coords().iter().zip(coords.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn metadata_sidecar_round_trip() {
        let dir = temp_dir();
        let csv = dir.path().join("points.csv");
        let meta_path = sidecar_path(&csv);
        assert_eq!(meta_path, dir.path().join("points.meta.json"));
        write_metadata(&meta_path, &Metadata { m: 4, r: 2 }).unwrap();
        assert_eq!(read_metadata(&meta_path).unwrap(), Metadata { m: 4, r: 2 });
    }

    #[test]
    fn matrix_round_trip_and_anchor_rows() {
        let dir = temp_dir();
        let path = dir.path().join("dist.csv");
        let pc = random_points(2, 2, 3, 4);
        let d = squared_edm(&pc);
        write_matrix_csv(&path, d.matrix()).unwrap();
        let full = read_matrix_csv(&path).unwrap();
        for (a, b) in d.matrix().iter().zip(full.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let top = read_anchor_rows_csv(&path, 3).unwrap();
        assert_eq!(top.nrows(), 3);
        assert_eq!(top.ncols(), 7);
        assert_eq!(top, d.anchor_rows());
    }

    #[test]
    fn anchor_rows_ignore_poisoned_mobile_rows() {
        // Rows past m may hold garbage; they must never be parsed.
        let dir = temp_dir();
        let path = dir.path().join("dist.csv");
        std::fs::write(&path, "0.0,1.0\n1.0,0.0\nnot,numbers\n").unwrap();
        let top = read_anchor_rows_csv(&path, 2).unwrap();
        assert_eq!(top, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!(read_matrix_csv(&path).is_err());
    }

    #[test]
    fn sample_set_round_trip() {
        let dir = temp_dir();
        let path = dir.path().join("omega.json");
        let omega = draw_samples(5, 9, 0.5, 42).unwrap();
        write_sample_set(&path, &omega).unwrap();
        let back = read_sample_set(&path).unwrap();
        assert_eq!(omega, back);
    }

    #[test]
    fn observations_round_trip_bit_for_bit() {
        let dir = temp_dir();
        let path = dir.path().join("obs.json");
        let pc = random_points(3, 2, 4, 6);
        let d = squared_edm(&pc);
        let omega = draw_samples(4, 6, 0.7, 7).unwrap();
        let obs = observe(&d, &omega).unwrap();
        write_observations(&path, &obs).unwrap();
        let back = read_observations(&path).unwrap();
        assert_eq!(obs, back);
        // Reduced values recomputed on load match the originals exactly.
        for (key, value) in obs.reduced() {
            assert_eq!(value.to_bits(), back.reduced()[key].to_bits());
        }
    }

    #[test]
    fn report_round_trip() {
        let dir = temp_dir();
        let path = dir.path().join("report.json");
        let report = ReportFile {
            method: "anchored_ls".into(),
            residual: 1.5e-12,
            objective_history: vec![3.0, 2.0, 1.0],
            underdetermined_columns: vec![4, 17],
            wall_seconds: 0.25,
            converged: true,
            rank_a: 2,
        };
        write_report(&path, &report).unwrap();
        let back = read_report(&path).unwrap();
        assert_eq!(back.method, "anchored_ls");
        assert_eq!(back.underdetermined_columns, vec![4, 17]);
        assert_eq!(back.objective_history, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = read_matrix_csv(Path::new("/nonexistent/file.csv")).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }
}
