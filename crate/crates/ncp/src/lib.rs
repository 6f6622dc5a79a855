//! Closed-form robust PCA by innovation search.
//!
//! Outliers are detected by ranking data columns with closed-form innovation
//! scores (ANCP, SNCP) or coherence scores (CoP), then recovering the inlier
//! subspace from the top-ranked columns. The crate also ships synthetic data
//! generators for the standard inlier/outlier models, evaluators for the
//! sufficient recovery conditions of each method, and a Monte-Carlo
//! experiment harness with CSV/JSON/SVG output.

// `!(x > 0.0)` is used deliberately in validation so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod heatmap;
pub mod io;
pub mod linalg;
pub mod recovery;
pub mod scoring;
pub mod synthgen;
pub mod theory;

pub use error::{Error, Result};
pub use experiment::{
    recover_subspace, run_experiment, score_matrix, ExperimentConfig, ExperimentKind, Pipeline,
    ResultRow, ResultTable, SuccessRule,
};
pub use heatmap::render_heatmap;
pub use linalg::{
    estimate_rank, orthonormalize, recovery_error, thin_svd, DataMatrix, SubspaceBasis,
    SvdFactors, EXACT_RANK_TOL, RANK_RATIO,
};
pub use recovery::{
    select_columns, separation_holds, trial_success_exact, trial_success_residual,
    RecoveryResult, SelectionStrategy, EXACT_RECOVERY_THRESHOLD, SELECTION_TOL,
};
pub use scoring::{
    ancp_scores, cop_scores, innovation_direction, normalize_columns, sncp_scores, Method,
    ScoreVector,
};
pub use synthgen::{generate, Dataset, ModelSpec};
pub use theory::{
    abs_projection_extreme, compute_vartheta, evaluate_condition, extract_t_extremes,
    sphere_concentration_bounds, sphere_concentration_extremes, ConditionParams, ConditionReport,
    DEFAULT_DELTA,
};
