//! File formats: headerless CSV matrices, score tables, recovery and
//! ground-truth JSON, and experiment result tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::ResultTable;
use crate::linalg::{DataMatrix, SubspaceBasis};
use crate::recovery::RecoveryResult;
use crate::scoring::{Method, ScoreVector};
use crate::synthgen::{Dataset, ModelSpec};

/// Reads a headerless CSV of floats: one matrix row per line, comma-separated.
///
/// Every row must have the same number of fields; parse failures report the
/// 1-based line number.
pub fn read_matrix_csv(path: &Path) -> Result<DataMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_csv(&text)
}

/// Parses the headerless CSV matrix format from a string.
pub fn parse_matrix_csv(text: &str) -> Result<DataMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            return Err(Error::Parse {
                line: lineno,
                message: "empty line".into(),
            });
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let value = f64::from_str(field.trim()).map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid float {:?}", field.trim()),
            })?;
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "empty file".into(),
        });
    }
    let nrows = rows.len();
    let ncols = rows[0].len();
    DataMatrix::new(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Writes a matrix in the headerless CSV format.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", m[(i, j)]);
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes scores as `index,score,method` with a header row; indices 0-based.
pub fn write_scores_csv(path: &Path, scores: &ScoreVector) -> Result<()> {
    let mut out = String::from("index,score,method\n");
    for (i, v) in scores.values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v},{}", scores.method.name());
    }
    fs::write(path, out)?;
    Ok(())
}

fn columns_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.ncols())
        .map(|j| m.column(j).iter().copied().collect())
        .collect()
}

fn matrix_from_columns(nrows: usize, columns: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    for col in columns {
        if col.len() != nrows {
            return Err(Error::DimensionMismatch(format!(
                "expected columns of length {nrows}, found {}",
                col.len()
            )));
        }
    }
    Ok(DMatrix::from_fn(nrows, columns.len(), |i, j| columns[j][i]))
}

/// Serialized form of a recovery run.
#[derive(Debug, Serialize, Deserialize)]
pub struct RecoveryFile {
    pub selected: Vec<usize>,
    pub dim: usize,
    /// Column-major: one inner vector per basis column.
    pub basis: Vec<Vec<f64>>,
    pub method: Method,
    pub strategy: String,
}

/// Writes a recovery result as JSON.
pub fn write_recovery_json(path: &Path, result: &RecoveryResult, strategy: &str) -> Result<()> {
    let file = RecoveryFile {
        selected: result.selected.clone(),
        dim: result.basis.dim,
        basis: columns_of(&result.basis.basis),
        method: result.scores.method,
        strategy: strategy.to_string(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Serialized ground truth accompanying a synthetic dataset.
#[derive(Debug, Serialize, Deserialize)]
pub struct TruthFile {
    pub mask: Vec<bool>,
    /// Column-major true basis.
    pub u: Vec<Vec<f64>>,
    pub spec: ModelSpec,
    pub seed: u64,
    pub psi: Option<f64>,
    pub snr: Option<f64>,
}

/// Writes the ground-truth sidecar for a synthetic dataset.
pub fn write_truth_json(path: &Path, dataset: &Dataset) -> Result<()> {
    let file = TruthFile {
        mask: dataset.outlier_mask.clone(),
        u: columns_of(&dataset.u_true.basis),
        spec: dataset.spec.clone(),
        seed: dataset.seed,
        psi: dataset.psi,
        snr: dataset.snr,
    };
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Reads a ground-truth sidecar back into memory.
pub fn read_truth_json(path: &Path) -> Result<(TruthFile, SubspaceBasis)> {
    let text = fs::read_to_string(path)?;
    let file: TruthFile = serde_json::from_str(&text)?;
    if file.u.is_empty() {
        return Err(Error::DegenerateBasis);
    }
    let basis = SubspaceBasis::new(matrix_from_columns(file.u[0].len(), &file.u)?)?;
    Ok((file, basis))
}

/// Writes a result table as CSV: one `grid_<name>` column per grid parameter,
/// then `method,success_rate,mean_error,mean_ms,trials,seed`.
pub fn write_result_table_csv(path: &Path, table: &ResultTable) -> Result<()> {
    let Some(first) = table.rows.first() else {
        return Err(Error::InvalidParams("empty result table".into()));
    };
    let mut out = String::new();
    for (name, _) in &first.grid {
        let _ = write!(out, "grid_{name},");
    }
    out.push_str("method,success_rate,mean_error,mean_ms,trials,seed\n");
    for row in &table.rows {
        if row.grid.len() != first.grid.len() {
            return Err(Error::InvalidParams("ragged grid columns".into()));
        }
        for (_, v) in &row.grid {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.method.name(),
            row.success_rate,
            row.mean_error,
            row.mean_ms,
            row.trials,
            table.master_seed
        );
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::ResultRow;
    use crate::synthgen::generate;

    #[test]
    fn matrix_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = DMatrix::from_row_slice(2, 3, &[1.0, -2.5, 3.0, 0.0, 1e-9, 7.25]);
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(back.matrix(), &m);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_matrix_csv("1,2\n3,oops\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_matrix_csv("1,2\n3\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_matrix_csv("").is_err());
    }

    #[test]
    fn scores_csv_has_header_and_zero_based_indices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let scores = ScoreVector {
            method: Method::Ancp,
            values: vec![2.0, 0.5],
        };
        write_scores_csv(&path, &scores).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "index,score,method\n0,2,ANCP\n1,0.5,ANCP\n");
    }

    #[test]
    fn truth_json_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("truth.json");
        let spec = ModelSpec::Unstructured {
            m1: 12,
            r: 3,
            n_i: 20,
            n_o: 5,
        };
        let ds = generate(&spec, 42).unwrap();
        write_truth_json(&path, &ds).unwrap();
        let (file, basis) = read_truth_json(&path).unwrap();
        assert_eq!(file.mask, ds.outlier_mask);
        assert_eq!(file.seed, 42);
        assert_eq!(file.spec, spec);
        assert_eq!(basis.basis, ds.u_true.basis);
        assert_eq!(file.psi, ds.psi);
    }

    #[test]
    fn result_table_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let table = ResultTable {
            rows: vec![ResultRow {
                grid: vec![("n_i".into(), 10.0), ("n_o".into(), 100.0)],
                method: Method::Sncp,
                success_rate: 0.95,
                mean_error: 0.001,
                mean_ms: 2.5,
                trials: 20,
                error: None,
            }],
            master_seed: 7,
        };
        write_result_table_csv(&path, &table).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "grid_n_i,grid_n_o,method,success_rate,mean_error,mean_ms,trials,seed"
        );
        assert_eq!(lines.next().unwrap(), "10,100,SNCP,0.95,0.001,2.5,20,7");
    }
}
