//! ANCP, SNCP, and CoP score vectors plus the closed-form innovation
//! direction that ties leverage scores to innovation values.
//!
//! All three methods assign one positive value per data column; inliers get
//! the larger values and the subspace is recovered from the top-scored
//! columns.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DataMatrix, SvdFactors};

/// Scoring method identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Ancp,
    Sncp,
    Cop,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ancp => "ANCP",
            Method::Sncp => "SNCP",
            Method::Cop => "CoP",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ancp" => Ok(Method::Ancp),
            "sncp" => Ok(Method::Sncp),
            "cop" => Ok(Method::Cop),
            other => Err(Error::InvalidParams(format!("unknown method '{other}'"))),
        }
    }
}

/// Per-column coherence values for one method.
#[derive(Debug, Clone)]
pub struct ScoreVector {
    pub method: Method,
    pub values: Vec<f64>,
}

/// Closed-form minimizer of `||c' D||` subject to `c' d_i = 1`, together
/// with its innovation value `||D' c*||^2`.
#[derive(Debug, Clone)]
pub struct InnovationDirection {
    pub index: usize,
    pub direction: DVector<f64>,
    pub value: f64,
}

/// Rescales every column of `D` to unit l2 norm.
pub fn normalize_columns(d: &DataMatrix) -> Result<DataMatrix> {
    let mut m = d.matrix().clone();
    for (j, mut col) in m.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        col /= norm;
    }
    DataMatrix::new(m)
}

/// ANCP scores: inverse leverage `x(i) = 1 / ||v_i||^2`.
pub fn ancp_scores(factors: &SvdFactors) -> Result<ScoreVector> {
    let values = factors
        .right
        .column_iter()
        .enumerate()
        .map(|(i, v)| {
            let lev = v.norm_squared();
            if lev == 0.0 {
                Err(Error::ZeroColumn(i))
            } else {
                Ok(1.0 / lev)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScoreVector {
        method: Method::Ancp,
        values,
    })
}

/// SNCP scores: `x(i) = sum_j (v_i' v_j)^2 / (||v_i||^2 ||v_j||^2)`, the
/// squared-cosine similarity summed over all columns of `V` (self term
/// included).
pub fn sncp_scores(factors: &SvdFactors) -> Result<ScoreVector> {
    let m2 = factors.right.ncols();
    let mut unit = factors.right.clone();
    for (j, mut col) in unit.column_iter_mut().enumerate() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        col /= norm;
    }
    // Row sums of the squared Gram matrix, blocked to bound memory.
    let mut values = vec![0.0; m2];
    let block = 512;
    let mut start = 0;
    while start < m2 {
        let len = block.min(m2 - start);
        let gram = unit.columns(start, len).transpose() * &unit;
        for local in 0..len {
            values[start + local] = gram.row(local).iter().map(|g| g * g).sum();
        }
        start += len;
    }
    Ok(ScoreVector {
        method: Method::Sncp,
        values,
    })
}

/// CoP coherence values: `x(i) = ||d_i' D||^2` on column-normalized data
/// (self term included).
pub fn cop_scores(d: &DataMatrix) -> Result<ScoreVector> {
    for (j, col) in d.matrix().column_iter().enumerate() {
        if (col.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidParams(format!(
                "column {j} is not unit norm; normalize first"
            )));
        }
    }
    let m = d.matrix();
    let m2 = m.ncols();
    let mut values = vec![0.0; m2];
    let block = 512;
    let mut start = 0;
    while start < m2 {
        let len = block.min(m2 - start);
        let gram = m.columns(start, len).transpose() * m;
        for local in 0..len {
            values[start + local] = gram.row(local).iter().map(|g| g * g).sum();
        }
        start += len;
    }
    Ok(ScoreVector {
        method: Method::Cop,
        values,
    })
}

/// Closed-form innovation direction for column `i`:
/// `c* = U' S^{-2} t_i / (t_i' S^{-2} t_i)` with `t_i = S v_i`, the
/// rank-deficient-safe form of `(D D')^{-1} d_i / (d_i' (D D')^{-1} d_i)`.
pub fn innovation_direction(factors: &SvdFactors, i: usize) -> Result<InnovationDirection> {
    let m2 = factors.right.ncols();
    if i >= m2 {
        return Err(Error::IndexOutOfRange { index: i, cols: m2 });
    }
    let v_i = factors.right_column(i);
    let lev = v_i.norm_squared();
    if lev == 0.0 {
        return Err(Error::ZeroColumn(i));
    }
    // S^{-2} t_i = S^{-1} v_i and t_i' S^{-2} t_i = ||v_i||^2.
    let mut sinv_v = v_i.clone();
    for k in 0..factors.effective_rank {
        sinv_v[k] /= factors.sigma[k];
    }
    let direction = &factors.left * (sinv_v / lev);
    // D' c* = V' S (U'' c*), evaluated through the factors.
    let mut coords = factors.left.transpose() * &direction;
    for k in 0..factors.effective_rank {
        coords[k] *= factors.sigma[k];
    }
    let value = (factors.right.transpose() * coords).norm_squared();
    Ok(InnovationDirection {
        index: i,
        direction,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{thin_svd, DataMatrix, EXACT_RANK_TOL};
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, DMatrix};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_normalized(rows: usize, cols: usize, seed: u64) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(rows, cols, |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        normalize_columns(&DataMatrix::new(m).unwrap()).unwrap()
    }

    fn e1_e1_e2() -> DataMatrix {
        DataMatrix::new(dmatrix![
            1.0, 1.0, 0.0;
            0.0, 0.0, 1.0
        ])
        .unwrap()
    }

    #[test]
    fn normalize_columns_examples() {
        let d = DataMatrix::new(dmatrix![3.0; 4.0]).unwrap();
        let n = normalize_columns(&d).unwrap();
        assert_abs_diff_eq!(n.matrix()[(0, 0)], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(n.matrix()[(1, 0)], 0.8, epsilon = 1e-12);

        let unit = DataMatrix::new(DMatrix::identity(3, 3)).unwrap();
        assert_eq!(normalize_columns(&unit).unwrap().matrix(), unit.matrix());

        let with_zero = DataMatrix::new(dmatrix![1.0, 0.0; 0.0, 0.0]).unwrap();
        assert!(matches!(
            normalize_columns(&with_zero),
            Err(Error::ZeroColumn(1))
        ));
    }

    #[test]
    fn normalize_columns_random_norms() {
        let d = random_normalized(8, 20, 4);
        for col in d.matrix().column_iter() {
            assert_abs_diff_eq!(col.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn scores_on_identity() {
        let d = DataMatrix::new(DMatrix::identity(3, 3)).unwrap();
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        for x in [
            ancp_scores(&f).unwrap(),
            sncp_scores(&f).unwrap(),
            cop_scores(&d).unwrap(),
        ] {
            for v in x.values {
                assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn scores_on_duplicated_column() {
        // Hat-matrix oracle: leverages of [e1, e1, e2] are (1/2, 1/2, 1),
        // so every score vector is (2, 2, 1).
        let d = e1_e1_e2();
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        let expect = [2.0, 2.0, 1.0];
        for x in [
            ancp_scores(&f).unwrap(),
            sncp_scores(&f).unwrap(),
            cop_scores(&d).unwrap(),
        ] {
            for (got, want) in x.values.iter().zip(expect) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn ancp_hat_trace() {
        let d = random_normalized(20, 50, 17);
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        let x = ancp_scores(&f).unwrap();
        let trace: f64 = x.values.iter().map(|v| 1.0 / v).sum();
        assert_abs_diff_eq!(trace, f.effective_rank as f64, epsilon = 1e-9);
    }

    #[test]
    fn innovation_direction_identity() {
        let d = DataMatrix::new(DMatrix::identity(3, 3)).unwrap();
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        let c = innovation_direction(&f, 0).unwrap();
        assert_abs_diff_eq!(c.value, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.direction.dot(&d.column(0)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn innovation_direction_duplicate() {
        // (D D')^{-1} = diag(1/2, 1); constraint scaling gives c* = e1.
        let d = e1_e1_e2();
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        let c = innovation_direction(&f, 0).unwrap();
        assert_abs_diff_eq!(c.direction[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.direction[1], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(c.value, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn innovation_direction_out_of_range() {
        let d = e1_e1_e2();
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        assert!(matches!(
            innovation_direction(&f, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn lemma_equivalences_random() {
        // Innovation value equals the ANCP score, and ANCP equals the
        // asymmetric similarity sum.
        let d = random_normalized(20, 50, 7);
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        let x = ancp_scores(&f).unwrap();
        for i in 0..d.cols() {
            let c = innovation_direction(&f, i).unwrap();
            assert!((c.value - x.values[i]).abs() / x.values[i] <= 1e-8);
            assert_abs_diff_eq!(c.direction.dot(&d.column(i)), 1.0, epsilon = 1e-9);

            let v_i = f.right_column(i);
            let asym: f64 = f
                .right
                .column_iter()
                .map(|v_j| {
                    let c = v_i.dot(&v_j) / v_i.norm_squared();
                    c * c
                })
                .sum();
            assert!((asym - x.values[i]).abs() / x.values[i] <= 1e-8);
        }
    }

    #[test]
    fn cop_orthogonal_invariance() {
        let d = random_normalized(10, 25, 13);
        let q = thin_svd(&random_normalized(10, 10, 14), EXACT_RANK_TOL)
            .unwrap()
            .left;
        let qd = DataMatrix::new(&q * d.matrix()).unwrap();
        let a = cop_scores(&d).unwrap();
        let b = cop_scores(&qd).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-9);
        }
    }

    #[test]
    fn duplicated_column_never_scores_below_orthogonal_one() {
        // A column duplicated k times keeps at least the ANCP score of a
        // column orthogonal to all others.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut m = DMatrix::zeros(12, 8);
        let shared = {
            let mut v = DVector::from_fn(11, |_, _| {
                rng.sample::<f64, _>(rand_distr::StandardNormal)
            });
            v /= v.norm();
            v
        };
        for j in 0..7 {
            if j < 3 {
                for i in 0..11 {
                    m[(i, j)] = shared[i];
                }
            } else {
                let mut v = DVector::from_fn(11, |_, _| {
                    rng.sample::<f64, _>(rand_distr::StandardNormal)
                });
                v /= v.norm();
                for i in 0..11 {
                    m[(i, j)] = v[i];
                }
            }
        }
        m[(11, 7)] = 1.0; // orthogonal to everything else
        let d = DataMatrix::new(m).unwrap();
        let f = thin_svd(&d, EXACT_RANK_TOL).unwrap();
        let x = ancp_scores(&f).unwrap();
        assert!(x.values[0] >= x.values[7] - 1e-12);
    }
}
