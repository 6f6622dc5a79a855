//! Deterministic dense linear-algebra primitives: thin SVD, numerical rank,
//! orthonormalization, residuals, and subspace distance.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative singular-value cutoff used for noiseless synthetic data.
pub const EXACT_RANK_TOL: f64 = 1e-10;

/// User-facing rank-estimation ratio for noisy inputs (keep singular values
/// above `s1 / 20`).
pub const RANK_RATIO: f64 = 1.0 / 20.0;

/// Dense real matrix whose columns are data points.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    inner: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a dense matrix, rejecting empty shapes and non-finite entries.
    pub fn new(inner: DMatrix<f64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::DimensionMismatch(
                "matrix must have at least one row and one column".into(),
            ));
        }
        if inner.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Self { inner })
    }

    pub fn from_columns(columns: &[DVector<f64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::DimensionMismatch("no columns".into()));
        }
        let views: Vec<_> = columns.iter().map(|c| c.column(0)).collect();
        Self::new(DMatrix::from_columns(&views))
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn column(&self, i: usize) -> DVector<f64> {
        DVector::from(self.inner.column(i))
    }
}

/// Thin SVD of a [`DataMatrix`], truncated to the effective rank.
///
/// `right` holds `V` (effective_rank x M2); its columns `v_i`
/// drive all coherence scores, and its rows are orthonormal.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub left: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub right: DMatrix<f64>,
    pub effective_rank: usize,
}

impl SvdFactors {
    /// Column `v_i` of `V`.
    pub fn right_column(&self, i: usize) -> DVector<f64> {
        DVector::from(self.right.column(i))
    }

    /// `U' * diag(sigma) * V`, the thin reconstruction.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.right.clone();
        for (k, mut row) in scaled.row_iter_mut().enumerate() {
            row *= self.sigma[k];
        }
        &self.left * scaled
    }
}

/// Orthonormal basis of a subspace of R^ambient.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub ambient: usize,
    pub dim: usize,
    pub basis: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Wraps an orthonormal matrix, validating `basis' * basis = I` to 1e-10.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (ambient, dim) = basis.shape();
        if dim > ambient {
            return Err(Error::DimensionMismatch(format!(
                "subspace dimension {dim} exceeds ambient {ambient}"
            )));
        }
        let gram = basis.transpose() * &basis;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expected).abs() > 1e-10 {
                    return Err(Error::DimensionMismatch(
                        "basis columns are not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(Self { ambient, dim, basis })
    }

    /// The zero-dimensional subspace of R^ambient.
    pub fn empty(ambient: usize) -> Self {
        Self {
            ambient,
            dim: 0,
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    /// Projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Residual `v - P v` of the orthogonal projection.
    pub fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.project(v)
    }
}

/// Thin SVD with singular values sorted nonincreasing and truncated at
/// `rank_tol * s1`. Left singular vectors carry a deterministic sign: the
/// largest-magnitude entry of each column is positive.
pub fn thin_svd(d: &DataMatrix, rank_tol: f64) -> Result<SvdFactors> {
    let m = d.matrix();
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let sigma = svd.singular_values;

    // Sort descending; nalgebra does not guarantee an order.
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());

    let s1 = sigma[order[0]];
    if !s1.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    if s1 <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| sigma[k] > rank_tol * s1)
        .collect();
    let r_d = kept.len();

    let mut left = DMatrix::zeros(m.nrows(), r_d);
    let mut right = DMatrix::zeros(r_d, m.ncols());
    let mut sig = DVector::zeros(r_d);
    for (out, &k) in kept.iter().enumerate() {
        sig[out] = sigma[k];
        left.set_column(out, &u.column(k));
        right.set_row(out, &v_t.row(k));
        // Sign convention: largest-magnitude entry of the left vector positive.
        let col = left.column(out);
        let pivot = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if left[(pivot, out)] < 0.0 {
            left.column_mut(out).neg_mut();
            right.row_mut(out).neg_mut();
        }
    }

    Ok(SvdFactors {
        left,
        sigma: sig,
        right,
        effective_rank: r_d,
    })
}

/// Number of singular values above `ratio * s1`.
pub fn estimate_rank(sigma: &[f64], ratio: f64) -> Result<usize> {
    let s1 = *sigma.first().ok_or(Error::EmptySingularValues)?;
    if s1 <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(sigma.iter().filter(|&&s| s > ratio * s1).count().max(1))
}

/// Orthonormal basis of the numerical column space of `columns` at `tol`.
pub fn orthonormalize(columns: &DataMatrix, tol: f64) -> Result<SubspaceBasis> {
    match thin_svd(columns, tol) {
        Ok(f) => SubspaceBasis::new(f.left),
        Err(Error::ZeroMatrix) => Ok(SubspaceBasis::empty(columns.rows())),
        Err(e) => Err(e),
    }
}

/// Per-column residual norms `f(k) = ||(I - U U') d_k||`.
pub fn complement_residual_norms(d: &DataMatrix, u: &SubspaceBasis) -> Result<Vec<f64>> {
    if d.rows() != u.ambient {
        return Err(Error::DimensionMismatch(format!(
            "data ambient {} vs basis ambient {}",
            d.rows(),
            u.ambient
        )));
    }
    let proj = u.basis.transpose() * d.matrix();
    let residual = d.matrix() - &u.basis * proj;
    Ok(residual.column_iter().map(|c| c.norm()).collect())
}

/// Subspace recovery error `||(I - U U') U_hat||_F / ||U||_F`.
pub fn recovery_error(u_true: &SubspaceBasis, u_hat: &SubspaceBasis) -> Result<f64> {
    if u_true.ambient != u_hat.ambient {
        return Err(Error::DimensionMismatch(format!(
            "ambient {} vs {}",
            u_true.ambient, u_hat.ambient
        )));
    }
    if u_true.dim == 0 || u_hat.dim == 0 {
        return Err(Error::DegenerateBasis);
    }
    let proj = u_true.basis.transpose() * &u_hat.basis;
    let residual = &u_hat.basis - &u_true.basis * proj;
    Ok(residual.norm() / (u_true.dim as f64).sqrt())
}
