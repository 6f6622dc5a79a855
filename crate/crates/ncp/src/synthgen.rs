//! Seeded generators for the synthetic inlier/outlier models, with ground
//! truth attached. All randomness is derived from a single seed through
//! per-column substreams, so parallel generation equals sequential
//! generation.

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, DataMatrix, SubspaceBasis, EXACT_RANK_TOL};

/// Data model to generate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Inliers uniform on `U ∩ S`, outliers uniform on the full sphere.
    Unstructured {
        m1: usize,
        r: usize,
        n_i: usize,
        n_o: usize,
    },
    /// Outliers uniform on the intersection of a random `r_o`-dimensional
    /// subspace with the sphere.
    OutlierSubspace {
        m1: usize,
        r: usize,
        r_o: usize,
        n_i: usize,
        n_o: usize,
    },
    /// Wraps another model and mixes sphere noise into the inlier block:
    /// `(A + E) / sqrt(1 + sigma_n^2)` with `E = sigma_n * N`.
    NoisyInliers { base: Box<ModelSpec>, sigma_n: f64 },
    /// Outliers clustered around a unit vector `q` outside `U`:
    /// `b_i = (q + eta f_i) / sqrt(1 + eta^2)`.
    ClusteredOutliers {
        m1: usize,
        r: usize,
        n_i: usize,
        n_o: usize,
        eta: f64,
    },
    /// Inliers in a union of `m` independent `d`-dimensional subspaces whose
    /// direct sum is `U`; outliers uniform on the sphere.
    UnionInliers {
        m1: usize,
        m: usize,
        d: usize,
        n_i_k: Vec<usize>,
        n_o: usize,
    },
    /// Inliers clustered inside `U`: `a_i = U(w + gamma z_i) / ||.||`.
    /// Produces no outliers on its own.
    ClusteredInliers {
        m1: usize,
        r: usize,
        n_i: usize,
        gamma: f64,
    },
    /// Outliers close to `U`: columns of `[U H] G` normalized, with `H`
    /// spanning an independent `h_dim`-dimensional subspace and `G` standard
    /// Gaussian.
    StructuredOutliers {
        m1: usize,
        r: usize,
        h_dim: usize,
        n_i: usize,
        n_o: usize,
    },
    /// Regression-with-unknown-permutation construction: stacked
    /// measurement/observation columns with `n_o` displaced observations.
    PermutedRegression {
        d: usize,
        m: usize,
        n_i: usize,
        n_o: usize,
    },
}

/// Generated matrix plus ground truth. Outliers occupy the leading columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub d: DataMatrix,
    pub u_true: SubspaceBasis,
    pub outlier_mask: Vec<bool>,
    pub spec: ModelSpec,
    pub seed: u64,
    /// `max_i 1 / ||(I - U U') b_i||^2`; `None` when there are no outliers.
    pub psi: Option<f64>,
    pub snr: Option<f64>,
}

impl Dataset {
    pub fn n_outliers(&self) -> usize {
        self.outlier_mask.iter().filter(|&&m| m).count()
    }

    pub fn n_inliers(&self) -> usize {
        self.outlier_mask.len() - self.n_outliers()
    }
}

// Substream derivation: splitmix64 folded over (seed, domain, column).
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut acc = splitmix64(seed);
    for &p in parts {
        acc = splitmix64(acc ^ splitmix64(p));
    }
    acc
}

fn substream(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, parts))
}

fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// i.i.d. columns uniform on the unit sphere `S^{dim-1}`.
pub fn random_unit_vectors(dim: usize, n: usize, seed: u64) -> DataMatrix {
    let mut m = DMatrix::zeros(dim, n);
    for j in 0..n {
        let mut rng = substream(seed, &[j as u64]);
        m.set_column(j, &unit_vector(&mut rng, dim));
    }
    DataMatrix::new(m).expect("finite by construction")
}

/// Orthonormal basis of a rotation-invariant random `d`-dimensional subspace.
pub fn random_subspace(dim: usize, d: usize, seed: u64) -> Result<SubspaceBasis> {
    if d > dim {
        return Err(Error::DimensionMismatch(format!(
            "subspace dimension {d} exceeds ambient {dim}"
        )));
    }
    let gaussians = {
        let mut m = DMatrix::zeros(dim, d);
        for j in 0..d {
            let mut rng = substream(seed, &[j as u64]);
            m.set_column(j, &gaussian_vector(&mut rng, dim));
        }
        DataMatrix::new(m)?
    };
    let basis = orthonormalize(&gaussians, EXACT_RANK_TOL)?;
    if basis.dim != d {
        return Err(Error::InvalidSpec("degenerate random subspace draw".into()));
    }
    Ok(basis)
}

/// Columns uniform on `span(basis) ∩ S`.
fn inliers_in(basis: &SubspaceBasis, n: usize, seed: u64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(basis.ambient, n);
    for j in 0..n {
        let mut rng = substream(seed, &[j as u64]);
        let coeffs = unit_vector(&mut rng, basis.dim);
        let col = &basis.basis * coeffs;
        m.set_column(j, &(&col / col.norm()));
    }
    m
}

// Domain tags for substream derivation within `generate`.
const DOM_SUBSPACE: u64 = 1;
const DOM_INLIERS: u64 = 2;
const DOM_OUTLIERS: u64 = 3;
const DOM_NOISE: u64 = 4;
const DOM_AUX: u64 = 5;

/// Maximum over outliers of `1 / ||(I - U U') b_i||^2`.
pub fn compute_psi(dataset: &Dataset) -> Result<f64> {
    psi_of(&dataset.d, &dataset.u_true, &dataset.outlier_mask)
}

fn psi_of(d: &DataMatrix, u: &SubspaceBasis, mask: &[bool]) -> Result<f64> {
    let mut psi = f64::NEG_INFINITY;
    let mut any = false;
    for (j, &is_outlier) in mask.iter().enumerate() {
        if !is_outlier {
            continue;
        }
        any = true;
        let res = u.residual(&d.column(j)).norm_squared();
        if res < 1e-24 {
            return Err(Error::DegenerateOutlier);
        }
        psi = psi.max(1.0 / res);
    }
    if !any {
        return Err(Error::DegenerateMask);
    }
    Ok(psi)
}

fn validate(spec: &ModelSpec) -> Result<()> {
    let err = |msg: String| Err(Error::InvalidSpec(msg));
    match spec {
        ModelSpec::Unstructured { m1, r, n_i, n_o } => {
            if *r < 1 || *r > *m1 || *n_i < 1 || *n_o < 1 {
                return err(format!("unstructured{{m1:{m1},r:{r},n_i:{n_i},n_o:{n_o}}}"));
            }
        }
        ModelSpec::OutlierSubspace { m1, r, r_o, n_i, n_o } => {
            if *r < 1 || *r > *m1 || *r_o < 1 || *r_o > *m1 || *n_i < 1 || *n_o < 1 {
                return err(format!("outlier_subspace{{m1:{m1},r:{r},r_o:{r_o}}}"));
            }
        }
        ModelSpec::NoisyInliers { base, sigma_n } => {
            if *sigma_n < 0.0 {
                return err(format!("sigma_n {sigma_n} must be >= 0"));
            }
            if matches!(base.as_ref(), ModelSpec::NoisyInliers { .. }) {
                return err("noisy_inliers cannot wrap noisy_inliers".into());
            }
            validate(base)?;
        }
        ModelSpec::ClusteredOutliers { m1, r, n_i, n_o, eta } => {
            if *r < 1 || *r >= *m1 || *n_i < 1 || *n_o < 1 || !(*eta > 0.0) {
                return err(format!("clustered_outliers{{m1:{m1},r:{r},eta:{eta}}}"));
            }
        }
        ModelSpec::UnionInliers { m1, m, d, n_i_k, n_o } => {
            if *m < 1 || *d < 1 || m * d > *m1 || n_i_k.len() != *m || *n_o < 1 {
                return err(format!("union_inliers{{m1:{m1},m:{m},d:{d}}}"));
            }
            if n_i_k.iter().any(|&n| n < 1) {
                return err("union_inliers cluster populations must be >= 1".into());
            }
        }
        ModelSpec::ClusteredInliers { m1, r, n_i, gamma } => {
            if *r < 1 || *r > *m1 || *n_i < 1 || !(*gamma > 0.0) {
                return err(format!("clustered_inliers{{m1:{m1},r:{r},gamma:{gamma}}}"));
            }
        }
        ModelSpec::StructuredOutliers { m1, r, h_dim, n_i, n_o } => {
            if *r < 1 || *h_dim < 1 || r + h_dim > *m1 || *n_i < 1 || *n_o < 1 {
                return err(format!("structured_outliers{{m1:{m1},r:{r},h_dim:{h_dim}}}"));
            }
        }
        ModelSpec::PermutedRegression { d, m, n_i, n_o } => {
            if *d < 1 || *m < 1 || n_i + n_o <= *d {
                return err(format!("permuted_regression{{d:{d},m:{m}}} needs n_i+n_o > d"));
            }
            if *n_o == 1 {
                return err("permuted_regression with n_o=1 admits no derangement".into());
            }
        }
    }
    Ok(())
}

/// Generates a dataset per `spec`, deterministic in `(spec, seed)`.
pub fn generate(spec: &ModelSpec, seed: u64) -> Result<Dataset> {
    validate(spec)?;
    match spec.clone() {
        ModelSpec::Unstructured { m1, r, n_i, n_o } => {
            let u = random_subspace(m1, r, derive_seed(seed, &[DOM_SUBSPACE]))?;
            let outliers = random_unit_vectors(m1, n_o, derive_seed(seed, &[DOM_OUTLIERS]));
            let inliers = inliers_in(&u, n_i, derive_seed(seed, &[DOM_INLIERS]));
            assemble(spec.clone(), seed, u, outliers.into_matrix(), inliers, None)
        }
        ModelSpec::OutlierSubspace { m1, r, r_o, n_i, n_o } => {
            let u = random_subspace(m1, r, derive_seed(seed, &[DOM_SUBSPACE]))?;
            let u_o = random_subspace(m1, r_o, derive_seed(seed, &[DOM_SUBSPACE, 2]))?;
            let outliers = inliers_in(&u_o, n_o, derive_seed(seed, &[DOM_OUTLIERS]));
            let inliers = inliers_in(&u, n_i, derive_seed(seed, &[DOM_INLIERS]));
            assemble(spec.clone(), seed, u, outliers, inliers, None)
        }
        ModelSpec::NoisyInliers { base, sigma_n } => {
            let clean = generate(&base, seed)?;
            let n_o = clean.n_outliers();
            let n_i = clean.n_inliers();
            let m1 = clean.d.rows();
            let noise = random_unit_vectors(m1, n_i, derive_seed(seed, &[DOM_NOISE]));
            let mut matrix = clean.d.into_matrix();
            let a_block = matrix.columns(n_o, n_i).into_owned();
            let e_block = noise.matrix() * sigma_n;
            let snr = a_block.norm_squared() / e_block.norm_squared();
            let mixed = (a_block + &e_block) / (1.0 + sigma_n * sigma_n).sqrt();
            matrix.columns_mut(n_o, n_i).copy_from(&mixed);
            let d = DataMatrix::new(matrix)?;
            Ok(Dataset {
                d,
                u_true: clean.u_true,
                outlier_mask: clean.outlier_mask,
                spec: spec.clone(),
                seed,
                psi: clean.psi,
                snr: Some(snr),
            })
        }
        ModelSpec::ClusteredOutliers { m1, r, n_i, n_o, eta } => {
            let u = random_subspace(m1, r, derive_seed(seed, &[DOM_SUBSPACE]))?;
            // q must stay clear of U; redraw until the complement residual
            // has norm at least 0.1.
            let mut rng = substream(seed, &[DOM_AUX]);
            let q = (0..1000)
                .map(|_| unit_vector(&mut rng, m1))
                .find(|q| u.residual(q).norm() >= 0.1)
                .ok_or_else(|| Error::InvalidSpec("could not draw q outside U".into()))?;
            let f = random_unit_vectors(m1, n_o, derive_seed(seed, &[DOM_OUTLIERS]));
            let scale = (1.0 + eta * eta).sqrt();
            let mut outliers = DMatrix::zeros(m1, n_o);
            for j in 0..n_o {
                let col = (&q + f.column(j) * eta) / scale;
                outliers.set_column(j, &col);
            }
            let inliers = inliers_in(&u, n_i, derive_seed(seed, &[DOM_INLIERS]));
            assemble(spec.clone(), seed, u, outliers, inliers, None)
        }
        ModelSpec::UnionInliers { m1, m, d, n_i_k, n_o } => {
            let mut bases = Vec::with_capacity(m);
            let mut all = DMatrix::zeros(m1, m * d);
            for k in 0..m {
                let b = random_subspace(m1, d, derive_seed(seed, &[DOM_SUBSPACE, k as u64]))?;
                all.columns_mut(k * d, d).copy_from(&b.basis);
                bases.push(b);
            }
            let u = orthonormalize(&DataMatrix::new(all)?, EXACT_RANK_TOL)?;
            if u.dim != m * d {
                return Err(Error::InvalidSpec(
                    "cluster subspaces do not span an (m*d)-dimensional direct sum".into(),
                ));
            }
            let n_i: usize = n_i_k.iter().sum();
            let mut inliers = DMatrix::zeros(m1, n_i);
            let mut offset = 0;
            for (k, (&count, basis)) in n_i_k.iter().zip(&bases).enumerate() {
                let block = inliers_in(basis, count, derive_seed(seed, &[DOM_INLIERS, k as u64]));
                inliers.columns_mut(offset, count).copy_from(&block);
                offset += count;
            }
            let outliers = random_unit_vectors(m1, n_o, derive_seed(seed, &[DOM_OUTLIERS]));
            assemble(spec.clone(), seed, u, outliers.into_matrix(), inliers, None)
        }
        ModelSpec::ClusteredInliers { m1, r, n_i, gamma } => {
            let u = random_subspace(m1, r, derive_seed(seed, &[DOM_SUBSPACE]))?;
            let mut rng = substream(seed, &[DOM_AUX]);
            let w = unit_vector(&mut rng, r);
            let mut inliers = DMatrix::zeros(m1, n_i);
            for j in 0..n_i {
                let mut col_rng = substream(seed, &[DOM_INLIERS, j as u64]);
                let z = unit_vector(&mut col_rng, r);
                let s = &w + z * gamma;
                let col = &u.basis * s;
                inliers.set_column(j, &(&col / col.norm()));
            }
            let d = DataMatrix::new(inliers)?;
            Ok(Dataset {
                d,
                u_true: u,
                outlier_mask: vec![false; n_i],
                spec: spec.clone(),
                seed,
                psi: None,
                snr: None,
            })
        }
        ModelSpec::StructuredOutliers { m1, r, h_dim, n_i, n_o } => {
            let u = random_subspace(m1, r, derive_seed(seed, &[DOM_SUBSPACE]))?;
            let h = random_subspace(m1, h_dim, derive_seed(seed, &[DOM_SUBSPACE, 2]))?;
            let mut span = DMatrix::zeros(m1, r + h_dim);
            span.columns_mut(0, r).copy_from(&u.basis);
            span.columns_mut(r, h_dim).copy_from(&h.basis);
            let mut outliers = DMatrix::zeros(m1, n_o);
            for j in 0..n_o {
                let mut rng = substream(seed, &[DOM_OUTLIERS, j as u64]);
                let g = gaussian_vector(&mut rng, r + h_dim);
                let col = &span * g;
                outliers.set_column(j, &(&col / col.norm()));
            }
            let inliers = inliers_in(&u, n_i, derive_seed(seed, &[DOM_INLIERS]));
            assemble(spec.clone(), seed, u, outliers, inliers, None)
        }
        ModelSpec::PermutedRegression { d, m, n_i, n_o } => {
            permuted_regression_dataset(d, m, n_i, n_o, seed)
        }
    }
}

fn assemble(
    spec: ModelSpec,
    seed: u64,
    u_true: SubspaceBasis,
    outliers: DMatrix<f64>,
    inliers: DMatrix<f64>,
    snr: Option<f64>,
) -> Result<Dataset> {
    let n_o = outliers.ncols();
    let n_i = inliers.ncols();
    let m1 = u_true.ambient;
    let mut matrix = DMatrix::zeros(m1, n_o + n_i);
    matrix.columns_mut(0, n_o).copy_from(&outliers);
    matrix.columns_mut(n_o, n_i).copy_from(&inliers);
    let d = DataMatrix::new(matrix)?;
    let mut mask = vec![true; n_o];
    mask.resize(n_o + n_i, false);
    let psi = psi_of(&d, &u_true, &mask)?;
    Ok(Dataset {
        d,
        u_true,
        outlier_mask: mask,
        spec,
        seed,
        psi: Some(psi),
        snr,
    })
}

/// Regression with an unknown partial permutation, translated into robust
/// PCA: displaced observation columns become the outliers of the stacked
/// matrix `Z = [X; Y]`. Displaced columns are moved to the front.
pub fn permuted_regression_dataset(
    d: usize,
    m: usize,
    n_i: usize,
    n_o: usize,
    seed: u64,
) -> Result<Dataset> {
    let spec = ModelSpec::PermutedRegression { d, m, n_i, n_o };
    validate(&spec)?;
    let n = n_i + n_o;
    let x = {
        let mut mat = DMatrix::zeros(d, n);
        for j in 0..n {
            let mut rng = substream(seed, &[DOM_INLIERS, j as u64]);
            mat.set_column(j, &gaussian_vector(&mut rng, d));
        }
        mat
    };
    let theta = {
        let mut rng = substream(seed, &[DOM_SUBSPACE]);
        DMatrix::from_fn(m, d, |_, _| rng.sample(StandardNormal))
    };
    let mut y = &theta * &x;

    // Derange the observation parts of the first n_o columns.
    if n_o >= 2 {
        let mut rng = substream(seed, &[DOM_AUX]);
        let perm = loop {
            let mut p: Vec<usize> = (0..n_o).collect();
            p.shuffle(&mut rng);
            if p.iter().enumerate().all(|(i, &t)| i != t) {
                break p;
            }
        };
        let original = y.columns(0, n_o).into_owned();
        for (i, &src) in perm.iter().enumerate() {
            y.set_column(i, &original.column(src));
        }
    }

    let mut z = DMatrix::zeros(d + m, n);
    z.rows_mut(0, d).copy_from(&x);
    z.rows_mut(d, m).copy_from(&y);
    for mut col in z.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    let data = DataMatrix::new(z)?;

    // Clean subspace: column space of [I_d; Theta].
    let mut stack = DMatrix::zeros(d + m, d);
    stack.rows_mut(0, d).copy_from(&DMatrix::identity(d, d));
    stack.rows_mut(d, m).copy_from(&theta);
    let u_true = orthonormalize(&DataMatrix::new(stack)?, EXACT_RANK_TOL)?;

    let mut mask = vec![true; n_o];
    mask.resize(n_o + n_i, false);
    let psi = if n_o > 0 {
        Some(psi_of(&data, &u_true, &mask)?)
    } else {
        None
    };
    Ok(Dataset {
        d: data,
        u_true,
        outlier_mask: mask,
        spec,
        seed,
        psi,
        snr: None,
    })
}
