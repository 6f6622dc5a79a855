//! Column selection and trial success criteria: turn a score vector into a
//! recovered subspace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    complement_residual_norms, orthonormalize, recovery_error, DataMatrix, SubspaceBasis,
};
use crate::scoring::ScoreVector;

/// Recovery is declared exact below this error.
pub const EXACT_RECOVERY_THRESHOLD: f64 = 1e-3;

/// Default relative numerical-rank tolerance during greedy selection.
pub const SELECTION_TOL: f64 = 1e-8;

/// How the top-scored columns are turned into a basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SelectionStrategy {
    /// Walk columns in descending score; keep a column iff it raises the
    /// numerical rank of the kept set, stop at rank `target`.
    RankGreedy { target: usize, tol: f64 },
    /// Keep the top `fraction` of columns by score.
    FixedFraction { fraction: f64 },
    /// Take the highest-scored column, project the data onto the complement
    /// of the current span, drop columns with residual below `tol`, repeat
    /// until rank `target`.
    AdaptiveProjection { target: usize, tol: f64 },
}

impl SelectionStrategy {
    pub fn rank_greedy(target: usize) -> Self {
        SelectionStrategy::RankGreedy {
            target,
            tol: SELECTION_TOL,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectionStrategy::RankGreedy { .. } => "rank-greedy",
            SelectionStrategy::FixedFraction { .. } => "fixed-fraction",
            SelectionStrategy::AdaptiveProjection { .. } => "adaptive-projection",
        }
    }
}

/// Outcome of column selection.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub basis: SubspaceBasis,
    pub selected: Vec<usize>,
    pub scores: ScoreVector,
}

/// Column indices ordered by descending score, ties broken by lowest index.
fn score_order(x: &ScoreVector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.values.len()).collect();
    order.sort_by(|&a, &b| {
        x.values[b]
            .partial_cmp(&x.values[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    order
}

/// Selects columns of `D` per `strat` and orthonormalizes their span.
pub fn select_columns(
    d: &DataMatrix,
    x: &ScoreVector,
    strat: &SelectionStrategy,
) -> Result<RecoveryResult> {
    if d.cols() != x.values.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} columns vs {} scores",
            d.cols(),
            x.values.len()
        )));
    }
    let order = score_order(x);
    match *strat {
        SelectionStrategy::RankGreedy { target, tol } => {
            if target < 1 {
                return Err(Error::InvalidParams("target rank must be >= 1".into()));
            }
            let mut selected = Vec::with_capacity(target);
            for &j in &order {
                let mut candidate = selected.clone();
                candidate.push(j);
                let sub = submatrix(d, &candidate)?;
                if orthonormalize(&sub, tol)?.dim > selected.len() {
                    selected.push(j);
                    if selected.len() == target {
                        break;
                    }
                }
            }
            if selected.len() < target {
                return Err(Error::InsufficientRank {
                    achieved: selected.len(),
                    target,
                });
            }
            finish(d, selected, x.clone(), tol)
        }
        SelectionStrategy::FixedFraction { fraction } => {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(Error::InvalidParams("fraction must be in (0, 1]".into()));
            }
            let keep = ((fraction * d.cols() as f64).ceil() as usize).max(1);
            let mut selected: Vec<usize> = order[..keep.min(order.len())].to_vec();
            selected.sort_unstable();
            finish(d, selected, x.clone(), SELECTION_TOL)
        }
        SelectionStrategy::AdaptiveProjection { target, tol } => {
            if target < 1 {
                return Err(Error::InvalidParams("target rank must be >= 1".into()));
            }
            let mut selected = Vec::with_capacity(target);
            let mut alive: Vec<bool> = vec![true; d.cols()];
            let mut residual = d.matrix().clone();
            while selected.len() < target {
                let Some(&j) = order
                    .iter()
                    .find(|&&j| alive[j] && residual.column(j).norm() >= tol)
                else {
                    return Err(Error::InsufficientRank {
                        achieved: selected.len(),
                        target,
                    });
                };
                let dir = {
                    let c = residual.column(j);
                    c / c.norm()
                };
                selected.push(j);
                alive[j] = false;
                // Deflate every column and drop the ones explained so far.
                let coeffs = dir.transpose() * &residual;
                residual -= &dir * coeffs;
                for (k, col) in residual.column_iter().enumerate() {
                    if alive[k] && col.norm() < tol {
                        alive[k] = false;
                    }
                }
            }
            finish(d, selected, x.clone(), tol)
        }
    }
}

fn submatrix(d: &DataMatrix, indices: &[usize]) -> Result<DataMatrix> {
    let cols: Vec<_> = indices.iter().map(|&j| d.column(j)).collect();
    DataMatrix::from_columns(&cols)
}

fn finish(
    d: &DataMatrix,
    selected: Vec<usize>,
    scores: ScoreVector,
    tol: f64,
) -> Result<RecoveryResult> {
    let basis = orthonormalize(&submatrix(d, &selected)?, tol)?;
    Ok(RecoveryResult {
        basis,
        selected,
        scores,
    })
}

/// Separation: the smallest inlier score strictly exceeds the
/// largest outlier score. `outlier_mask[i]` is true for outliers.
pub fn separation_holds(x: &ScoreVector, outlier_mask: &[bool]) -> Result<bool> {
    if x.values.len() != outlier_mask.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores vs {} mask entries",
            x.values.len(),
            outlier_mask.len()
        )));
    }
    let mut min_inlier = f64::INFINITY;
    let mut max_outlier = f64::NEG_INFINITY;
    let mut inliers = 0usize;
    let mut outliers = 0usize;
    for (v, &is_outlier) in x.values.iter().zip(outlier_mask) {
        if is_outlier {
            outliers += 1;
            max_outlier = max_outlier.max(*v);
        } else {
            inliers += 1;
            min_inlier = min_inlier.min(*v);
        }
    }
    if inliers == 0 || outliers == 0 {
        return Err(Error::DegenerateMask);
    }
    Ok(min_inlier > max_outlier)
}

/// Exact-recovery success: recovery error below `1e-3`.
pub fn trial_success_exact(u_true: &SubspaceBasis, u_hat: &SubspaceBasis) -> Result<bool> {
    Ok(recovery_error(u_true, u_hat)? < EXACT_RECOVERY_THRESHOLD)
}

/// Residual success: every inlier residual to `U_hat` is strictly below
/// every outlier residual.
pub fn trial_success_residual(
    d: &DataMatrix,
    u_hat: &SubspaceBasis,
    outlier_mask: &[bool],
) -> Result<bool> {
    let f = complement_residual_norms(d, u_hat)?;
    let residual_scores = ScoreVector {
        method: crate::scoring::Method::Ancp,
        // Negate so "inlier larger" matches the separation helper.
        values: f.iter().map(|v| -v).collect(),
    };
    separation_holds(&residual_scores, outlier_mask)
}
