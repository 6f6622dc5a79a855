//! Monte-Carlo experiment orchestration: phase transitions, noise sweeps,
//! score-separation studies, and permuted-regression recovery.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{thin_svd, DataMatrix, SubspaceBasis, EXACT_RANK_TOL, RANK_RATIO};
use crate::recovery::{
    select_columns, separation_holds, trial_success_exact, trial_success_residual,
    RecoveryResult, SelectionStrategy,
};
use crate::scoring::{ancp_scores, cop_scores, normalize_columns, sncp_scores, Method, ScoreVector};
use crate::synthgen::{derive_seed, generate, ModelSpec};

/// Scoring + selection settings for one recovery run.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub method: Method,
    pub target_rank: usize,
    /// Relative singular-value cutoff for the scoring SVD.
    pub svd_rank_tol: f64,
    pub strategy: SelectionStrategy,
}

impl Pipeline {
    pub fn exact(method: Method, target_rank: usize) -> Self {
        Pipeline {
            method,
            target_rank,
            svd_rank_tol: EXACT_RANK_TOL,
            strategy: SelectionStrategy::rank_greedy(target_rank),
        }
    }

    /// Noisy-data settings: noise defeats numerical-rank tests, so keep the
    /// best-scoring half of the columns and let the basis rebuild below
    /// truncate their span to the leading singular directions.
    pub fn noisy(method: Method, target_rank: usize) -> Self {
        Pipeline {
            method,
            target_rank,
            svd_rank_tol: RANK_RATIO,
            strategy: SelectionStrategy::FixedFraction { fraction: 0.5 },
        }
    }
}

/// Normalizes columns and computes the requested score vector.
pub fn score_matrix(d: &DataMatrix, method: Method, svd_rank_tol: f64) -> Result<ScoreVector> {
    let normalized = normalize_columns(d)?;
    match method {
        Method::Cop => cop_scores(&normalized),
        Method::Ancp => ancp_scores(&thin_svd(&normalized, svd_rank_tol)?),
        Method::Sncp => sncp_scores(&thin_svd(&normalized, svd_rank_tol)?),
    }
}

/// Full scoring-and-selection run on a data matrix.
///
/// The basis is the span of the leading singular directions of the selected
/// columns, truncated at `svd_rank_tol` and capped at `target_rank`. For
/// noiseless rank-greedy selection that span equals the selected columns';
/// for noisy fixed-fraction selection it denoises them.
pub fn recover_subspace(d: &DataMatrix, pipeline: &Pipeline) -> Result<RecoveryResult> {
    let normalized = normalize_columns(d)?;
    let scores = score_matrix(d, pipeline.method, pipeline.svd_rank_tol)?;
    let mut result = select_columns(&normalized, &scores, &pipeline.strategy)?;
    let kept: Vec<_> = result
        .selected
        .iter()
        .map(|&j| normalized.column(j))
        .collect();
    let factors = thin_svd(&DataMatrix::from_columns(&kept)?, pipeline.svd_rank_tol)?;
    let dim = factors.effective_rank.min(pipeline.target_rank);
    result.basis = SubspaceBasis::new(factors.left.columns(0, dim).into_owned())?;
    Ok(result)
}

/// Trial success criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessRule {
    /// Recovery error against the ground-truth basis below 1e-3.
    ExactRecovery,
    /// Every inlier residual to the recovered basis below every outlier
    /// residual.
    ResidualSeparation,
    /// The score vector itself separates inliers from outliers.
    ScoreSeparation,
}

/// Experiment family plus its parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Unstructured outliers over an (n_i, n_o) grid.
    Phase {
        m1: usize,
        r: usize,
        n_i: Vec<usize>,
        n_o: Vec<usize>,
    },
    /// Outlying-subspace data with noisy inliers, swept over SNR.
    NoiseSweep {
        m1: usize,
        r: usize,
        r_o: usize,
        n_i: usize,
        n_o: usize,
        snr: Vec<f64>,
    },
    /// Structured outliers close to the inlier subspace, swept over n_o.
    Separation {
        m1: usize,
        r: usize,
        h_dim: usize,
        n_i: usize,
        n_o: Vec<usize>,
    },
    /// Permuted-regression recovery swept over the displaced count.
    PermReg {
        d: usize,
        m: usize,
        n_i: usize,
        n_o: Vec<usize>,
    },
}

/// Full experiment description; all randomness flows from `master_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub kind: ExperimentKind,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub master_seed: u64,
    pub success_rule: SuccessRule,
}

/// One aggregated grid-point/method row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub grid: Vec<(String, f64)>,
    pub method: Method,
    pub success_rate: f64,
    pub mean_error: f64,
    pub mean_ms: f64,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Aggregated experiment output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub master_seed: u64,
}

struct GridPoint {
    coords: Vec<(String, f64)>,
    spec: ModelSpec,
    target_rank: usize,
    svd_rank_tol: f64,
    strategy: SelectionStrategy,
}

fn expand_grid(kind: &ExperimentKind) -> Result<Vec<GridPoint>> {
    let mut points = Vec::new();
    match kind {
        ExperimentKind::Phase { m1, r, n_i, n_o } => {
            if n_i.is_empty() || n_o.is_empty() {
                return Err(Error::InvalidParams("empty phase grid".into()));
            }
            for &ni in n_i {
                for &no in n_o {
                    points.push(GridPoint {
                        coords: vec![("n_i".into(), ni as f64), ("n_o".into(), no as f64)],
                        spec: ModelSpec::Unstructured {
                            m1: *m1,
                            r: *r,
                            n_i: ni,
                            n_o: no,
                        },
                        target_rank: *r,
                        svd_rank_tol: EXACT_RANK_TOL,
                        strategy: SelectionStrategy::rank_greedy(*r),
                    });
                }
            }
        }
        ExperimentKind::NoiseSweep { m1, r, r_o, n_i, n_o, snr } => {
            if snr.is_empty() {
                return Err(Error::InvalidParams("empty SNR grid".into()));
            }
            for &s in snr {
                if !(s > 0.0) {
                    return Err(Error::InvalidParams(format!("SNR {s} must be > 0")));
                }
                // Unit-norm signal and noise columns give SNR = 1/sigma_n^2.
                let sigma_n = (1.0 / s).sqrt();
                points.push(GridPoint {
                    coords: vec![("snr".into(), s)],
                    spec: ModelSpec::NoisyInliers {
                        base: Box::new(ModelSpec::OutlierSubspace {
                            m1: *m1,
                            r: *r,
                            r_o: *r_o,
                            n_i: *n_i,
                            n_o: *n_o,
                        }),
                        sigma_n,
                    },
                    target_rank: *r,
                    svd_rank_tol: RANK_RATIO,
                    // Noise defeats numerical-rank tests; keep the known
                    // inlier fraction and denoise the span afterwards.
                    strategy: SelectionStrategy::FixedFraction {
                        fraction: *n_i as f64 / (*n_i + *n_o) as f64,
                    },
                });
            }
        }
        ExperimentKind::Separation { m1, r, h_dim, n_i, n_o } => {
            if n_o.is_empty() {
                return Err(Error::InvalidParams("empty n_o grid".into()));
            }
            for &no in n_o {
                points.push(GridPoint {
                    coords: vec![("n_o".into(), no as f64)],
                    spec: ModelSpec::StructuredOutliers {
                        m1: *m1,
                        r: *r,
                        h_dim: *h_dim,
                        n_i: *n_i,
                        n_o: no,
                    },
                    target_rank: *r,
                    svd_rank_tol: EXACT_RANK_TOL,
                    strategy: SelectionStrategy::rank_greedy(*r),
                });
            }
        }
        ExperimentKind::PermReg { d, m, n_i, n_o } => {
            if n_o.is_empty() {
                return Err(Error::InvalidParams("empty n_o grid".into()));
            }
            for &no in n_o {
                points.push(GridPoint {
                    coords: vec![("n_o".into(), no as f64)],
                    spec: ModelSpec::PermutedRegression {
                        d: *d,
                        m: *m,
                        n_i: *n_i,
                        n_o: no,
                    },
                    target_rank: *d,
                    svd_rank_tol: EXACT_RANK_TOL,
                    strategy: SelectionStrategy::rank_greedy(*d),
                });
            }
        }
    }
    Ok(points)
}

/// Seed for one trial, derived from the master seed, every grid coordinate,
/// the method, and the trial index.
fn trial_seed(master_seed: u64, coords: &[(String, f64)], method: Method, trial: usize) -> u64 {
    let mut parts: Vec<u64> = coords.iter().map(|(_, v)| v.to_bits()).collect();
    parts.push(match method {
        Method::Ancp => 0xA,
        Method::Sncp => 0xB,
        Method::Cop => 0xC,
    });
    parts.push(trial as u64);
    derive_seed(master_seed, &parts)
}

struct TrialOutcome {
    success: bool,
    error: f64,
    ms: f64,
}

fn run_trial(
    point: &GridPoint,
    method: Method,
    rule: SuccessRule,
    seed: u64,
) -> Result<TrialOutcome> {
    let dataset = generate(&point.spec, seed)?;
    let start = Instant::now();
    let outcome = match rule {
        SuccessRule::ScoreSeparation => {
            let scores = score_matrix(&dataset.d, method, point.svd_rank_tol)?;
            TrialOutcome {
                success: separation_holds(&scores, &dataset.outlier_mask)?,
                error: f64::NAN,
                ms: 0.0,
            }
        }
        SuccessRule::ExactRecovery => {
            let pipeline = Pipeline {
                method,
                target_rank: point.target_rank,
                svd_rank_tol: point.svd_rank_tol,
                strategy: point.strategy,
            };
            let recovered = recover_subspace(&dataset.d, &pipeline)?;
            let err = crate::linalg::recovery_error(&dataset.u_true, &recovered.basis)?;
            TrialOutcome {
                success: trial_success_exact(&dataset.u_true, &recovered.basis)?,
                error: err,
                ms: 0.0,
            }
        }
        SuccessRule::ResidualSeparation => {
            let pipeline = Pipeline {
                method,
                target_rank: point.target_rank,
                svd_rank_tol: point.svd_rank_tol,
                strategy: point.strategy,
            };
            let recovered = recover_subspace(&dataset.d, &pipeline)?;
            let err = crate::linalg::recovery_error(&dataset.u_true, &recovered.basis)?;
            TrialOutcome {
                success: trial_success_residual(
                    &dataset.d,
                    &recovered.basis,
                    &dataset.outlier_mask,
                )?,
                error: err,
                ms: 0.0,
            }
        }
    };
    Ok(TrialOutcome {
        ms: start.elapsed().as_secs_f64() * 1e3,
        ..outcome
    })
}

/// Runs every grid point, method, and trial; deterministic given the config
/// (timing columns aside).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    if cfg.trials < 1 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    if cfg.methods.is_empty() {
        return Err(Error::InvalidParams("methods must be nonempty".into()));
    }
    let points = expand_grid(&cfg.kind)?;
    let mut rows = Vec::with_capacity(points.len() * cfg.methods.len());
    for point in &points {
        for &method in &cfg.methods {
            let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = trial_seed(cfg.master_seed, &point.coords, method, trial);
                    run_trial(point, method, cfg.success_rule, seed)
                })
                .collect();
            let mut successes = 0usize;
            let mut err_sum = 0.0;
            let mut err_count = 0usize;
            let mut ms_sum = 0.0;
            let mut failure: Option<String> = None;
            for outcome in outcomes {
                match outcome {
                    Ok(t) => {
                        successes += usize::from(t.success);
                        if t.error.is_finite() {
                            err_sum += t.error;
                            err_count += 1;
                        }
                        ms_sum += t.ms;
                    }
                    Err(e) => {
                        failure.get_or_insert(e.to_string());
                    }
                }
            }
            rows.push(ResultRow {
                grid: point.coords.clone(),
                method,
                success_rate: successes as f64 / cfg.trials as f64,
                mean_error: if err_count > 0 {
                    err_sum / err_count as f64
                } else {
                    f64::NAN
                },
                mean_ms: ms_sum / cfg.trials as f64,
                trials: cfg.trials,
                error: failure,
            });
        }
    }
    Ok(ResultTable {
        rows,
        master_seed: cfg.master_seed,
    })
}
