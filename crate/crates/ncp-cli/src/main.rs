//! `ncp` — closed-form robust PCA from the command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ncp::{
    evaluate_condition, generate, io, recover_subspace, render_heatmap, run_experiment,
    score_matrix, ConditionParams, ExperimentConfig, ExperimentKind, Method, ModelSpec, Pipeline,
    SelectionStrategy, EXACT_RANK_TOL, SELECTION_TOL,
};

#[derive(Parser)]
#[command(name = "ncp", version, about = "Closed-form robust PCA: outlier scoring, subspace recovery, synthetic data, and Monte-Carlo sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score the columns of a CSV matrix.
    Score {
        /// Input matrix CSV (headerless, one row per line).
        #[arg(long)]
        input: PathBuf,
        /// Scoring method: ancp, sncp, or cop.
        #[arg(long)]
        method: Method,
        /// Output CSV path (index,score,method).
        #[arg(long)]
        out: PathBuf,
        /// Relative singular-value cutoff for the scoring SVD.
        #[arg(long, default_value_t = EXACT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Score and select columns, then write the recovered basis as JSON.
    Recover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        method: Method,
        /// Target subspace dimension.
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: PathBuf,
        /// Selection strategy: rank-greedy, fixed-fraction, or adaptive.
        #[arg(long, default_value = "rank-greedy")]
        strategy: String,
        /// Fraction of columns kept by fixed-fraction selection.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        /// Numerical-rank tolerance used during selection.
        #[arg(long, default_value_t = SELECTION_TOL)]
        tol: f64,
        /// Relative singular-value cutoff for the scoring SVD.
        #[arg(long, default_value_t = EXACT_RANK_TOL)]
        rank_tol: f64,
    },
    /// Generate a synthetic dataset: data.csv plus truth.json.
    Synth(SynthArgs),
    /// Phase-transition sweep over (n_i, n_o).
    Phase(SweepArgs),
    /// Noise sweep over SNR.
    NoiseSweep(SweepArgs),
    /// Score-separation sweep over n_o with structured outliers.
    Separation(SweepArgs),
    /// Permuted-regression sweep over the displaced column count.
    PermReg(SweepArgs),
    /// Evaluate a theorem's sufficient recovery condition.
    Theory {
        /// JSON params file with a "theorem" key (T1..T6).
        #[arg(long)]
        params: PathBuf,
        /// Optional output path; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SynthArgs {
    /// Model name: unstructured, outlier-subspace, noisy-inliers,
    /// clustered-outliers, union-inliers, clustered-inliers,
    /// structured-outliers, or permuted-regression.
    #[arg(long, required_unless_present = "spec")]
    model: Option<String>,
    /// Full model specification as a JSON file (overrides the flags).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Ambient dimension.
    #[arg(long)]
    m1: Option<usize>,
    /// Inlier subspace dimension.
    #[arg(long)]
    r: Option<usize>,
    /// Outlier subspace dimension.
    #[arg(long)]
    ro: Option<usize>,
    /// Number of inliers (per cluster for union-inliers: comma-separated).
    #[arg(long)]
    ni: Option<usize>,
    /// Number of outliers.
    #[arg(long)]
    no: Option<usize>,
    /// Inliers per subspace for union-inliers, comma-separated.
    #[arg(long, value_delimiter = ',')]
    nik: Option<Vec<usize>>,
    /// Noise level for noisy-inliers.
    #[arg(long)]
    sigma_n: Option<f64>,
    /// Cluster tightness for clustered outliers.
    #[arg(long)]
    eta: Option<f64>,
    /// Inlier concentration for clustered inliers.
    #[arg(long)]
    gamma: Option<f64>,
    /// Structured-outlier auxiliary dimension.
    #[arg(long)]
    h_dim: Option<usize>,
    /// Regression dimension (permuted-regression, union-inliers).
    #[arg(long)]
    d: Option<usize>,
    /// Number of subspaces (union-inliers) or response dimension
    /// (permuted-regression).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving data.csv and truth.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment configuration JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output result-table CSV.
    #[arg(long)]
    out: PathBuf,
    /// Optional grayscale success-rate heatmap (2-D grids only).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Overrides master_seed from the config.
    #[arg(long)]
    seed: Option<u64>,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<ncp::Error> for CliError {
    fn from(e: ncp::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Score {
            input,
            method,
            out,
            rank_tol,
        } => {
            let d = io::read_matrix_csv(&input)?;
            let scores = score_matrix(&d, method, rank_tol)?;
            io::write_scores_csv(&out, &scores)?;
            Ok(())
        }
        Command::Recover {
            input,
            method,
            dim,
            out,
            strategy,
            fraction,
            tol,
            rank_tol,
        } => {
            let strategy = match strategy.as_str() {
                "rank-greedy" => SelectionStrategy::RankGreedy { target: dim, tol },
                "fixed-fraction" => SelectionStrategy::FixedFraction { fraction },
                "adaptive" => SelectionStrategy::AdaptiveProjection { target: dim, tol },
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown strategy {other:?}; expected rank-greedy, fixed-fraction, or adaptive"
                    )))
                }
            };
            let d = io::read_matrix_csv(&input)?;
            let pipeline = Pipeline {
                method,
                target_rank: dim,
                svd_rank_tol: rank_tol,
                strategy,
            };
            let name = pipeline.strategy.name();
            let result = recover_subspace(&d, &pipeline)?;
            io::write_recovery_json(&out, &result, name)?;
            Ok(())
        }
        Command::Synth(args) => {
            let spec = build_spec(&args)?;
            let dataset = generate(&spec, args.seed)?;
            fs::create_dir_all(&args.out_dir)?;
            io::write_matrix_csv(&args.out_dir.join("data.csv"), dataset.d.matrix())?;
            io::write_truth_json(&args.out_dir.join("truth.json"), &dataset)?;
            Ok(())
        }
        Command::Phase(args) => run_sweep(args, "phase"),
        Command::NoiseSweep(args) => run_sweep(args, "noise_sweep"),
        Command::Separation(args) => run_sweep(args, "separation"),
        Command::PermReg(args) => run_sweep(args, "perm_reg"),
        Command::Theory { params, out } => {
            let text = fs::read_to_string(&params)?;
            let params: ConditionParams = serde_json::from_str(&text)
                .map_err(|e| CliError::Runtime(format!("invalid theorem params: {e}")))?;
            let report = evaluate_condition(&params)?;
            let json = serde_json::to_string_pretty(&report)?;
            match out {
                Some(path) => fs::write(path, json)?,
                None => println!("{json}"),
            }
            Ok(())
        }
    }
}

fn run_sweep(args: SweepArgs, expected_kind: &str) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)?;
    let mut config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Runtime(format!("invalid experiment config: {e}")))?;
    let actual = match config.kind {
        ExperimentKind::Phase { .. } => "phase",
        ExperimentKind::NoiseSweep { .. } => "noise_sweep",
        ExperimentKind::Separation { .. } => "separation",
        ExperimentKind::PermReg { .. } => "perm_reg",
    };
    if actual != expected_kind {
        return Err(CliError::Usage(format!(
            "config kind {actual:?} does not match the {expected_kind} subcommand"
        )));
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let table = run_experiment(&config)?;
    io::write_result_table_csv(&args.out, &table)?;
    if let Some(svg_path) = args.svg {
        if !matches!(config.kind, ExperimentKind::Phase { .. }) {
            return Err(CliError::Usage(
                "--svg requires a 2-D grid; only phase sweeps produce one".into(),
            ));
        }
        let svg = render_heatmap(&table, "n_i", "n_o")?;
        fs::write(svg_path, svg)?;
    }
    Ok(())
}

fn need<T: Copy>(opt: Option<T>, flag: &str, model: &str) -> Result<T, CliError> {
    opt.ok_or_else(|| CliError::Usage(format!("--{flag} is required for model {model}")))
}

fn build_spec(args: &SynthArgs) -> Result<ModelSpec, CliError> {
    if let Some(path) = &args.spec {
        let text = fs::read_to_string(path)?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::Runtime(format!("invalid model spec: {e}")));
    }
    let model = args.model.as_deref().expect("clap enforces --model");
    let normalized = model.replace('-', "_");
    let spec = match normalized.as_str() {
        "unstructured" => ModelSpec::Unstructured {
            m1: need(args.m1, "m1", model)?,
            r: need(args.r, "r", model)?,
            n_i: need(args.ni, "ni", model)?,
            n_o: need(args.no, "no", model)?,
        },
        "outlier_subspace" => ModelSpec::OutlierSubspace {
            m1: need(args.m1, "m1", model)?,
            r: need(args.r, "r", model)?,
            r_o: need(args.ro, "ro", model)?,
            n_i: need(args.ni, "ni", model)?,
            n_o: need(args.no, "no", model)?,
        },
        "noisy_inliers" => {
            let base = if args.ro.is_some() {
                ModelSpec::OutlierSubspace {
                    m1: need(args.m1, "m1", model)?,
                    r: need(args.r, "r", model)?,
                    r_o: need(args.ro, "ro", model)?,
                    n_i: need(args.ni, "ni", model)?,
                    n_o: need(args.no, "no", model)?,
                }
            } else {
                ModelSpec::Unstructured {
                    m1: need(args.m1, "m1", model)?,
                    r: need(args.r, "r", model)?,
                    n_i: need(args.ni, "ni", model)?,
                    n_o: need(args.no, "no", model)?,
                }
            };
            ModelSpec::NoisyInliers {
                base: Box::new(base),
                sigma_n: need(args.sigma_n, "sigma-n", model)?,
            }
        }
        "clustered_outliers" => ModelSpec::ClusteredOutliers {
            m1: need(args.m1, "m1", model)?,
            r: need(args.r, "r", model)?,
            n_i: need(args.ni, "ni", model)?,
            n_o: need(args.no, "no", model)?,
            eta: need(args.eta, "eta", model)?,
        },
        "union_inliers" => ModelSpec::UnionInliers {
            m1: need(args.m1, "m1", model)?,
            m: need(args.m, "m", model)?,
            d: need(args.d, "d", model)?,
            n_i_k: args
                .nik
                .clone()
                .ok_or_else(|| CliError::Usage(format!("--nik is required for model {model}")))?,
            n_o: need(args.no, "no", model)?,
        },
        "clustered_inliers" => ModelSpec::ClusteredInliers {
            m1: need(args.m1, "m1", model)?,
            r: need(args.r, "r", model)?,
            n_i: need(args.ni, "ni", model)?,
            gamma: need(args.gamma, "gamma", model)?,
        },
        "structured_outliers" => ModelSpec::StructuredOutliers {
            m1: need(args.m1, "m1", model)?,
            r: need(args.r, "r", model)?,
            h_dim: need(args.h_dim, "h-dim", model)?,
            n_i: need(args.ni, "ni", model)?,
            n_o: need(args.no, "no", model)?,
        },
        "permuted_regression" => ModelSpec::PermutedRegression {
            d: need(args.d, "d", model)?,
            m: need(args.m, "m", model)?,
            n_i: need(args.ni, "ni", model)?,
            n_o: need(args.no, "no", model)?,
        },
        other => {
            return Err(CliError::Usage(format!("unknown model {other:?}")));
        }
    };
    Ok(spec)
}
