//! Property tests for invariances the scoring and selection pipeline must
//! satisfy on arbitrary well-conditioned inputs.

use nalgebra::DMatrix;
use proptest::prelude::*;

use ncp::scoring::normalize_columns;
use ncp::theory::sphere_concentration_bounds;
use ncp::{
    estimate_rank, score_matrix, select_columns, DataMatrix, Method, SelectionStrategy,
    EXACT_RANK_TOL, SELECTION_TOL,
};

const DIM: usize = 8;
const COLS: usize = 14;

fn matrix_strategy() -> impl Strategy<Value = DataMatrix> {
    proptest::collection::vec(-5.0f64..5.0, DIM * COLS)
        .prop_filter_map("columns must be nonzero", |entries| {
            let m = DMatrix::from_vec(DIM, COLS, entries);
            if (0..COLS).any(|j| m.column(j).norm() < 1e-3) {
                return None;
            }
            Some(DataMatrix::new(m).expect("finite by construction"))
        })
}

/// Orthogonal matrix from a Householder reflection of a nonzero vector.
fn householder(v: &[f64]) -> Option<DMatrix<f64>> {
    let w = DMatrix::from_column_slice(DIM, 1, v);
    let n = w.norm();
    if n < 1e-3 {
        return None;
    }
    let w = w / n;
    Some(DMatrix::identity(DIM, DIM) - 2.0 * &w * w.transpose())
}

fn method_strategy() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Ancp), Just(Method::Sncp), Just(Method::Cop)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scores_are_permutation_equivariant(
        d in matrix_strategy(),
        method in method_strategy(),
        shift in 1usize..COLS,
    ) {
        let base = score_matrix(&d, method, EXACT_RANK_TOL).unwrap();
        let m = d.matrix();
        let rotated = DMatrix::from_fn(DIM, COLS, |i, j| m[(i, (j + shift) % COLS)]);
        let shifted = score_matrix(
            &DataMatrix::new(rotated).unwrap(),
            method,
            EXACT_RANK_TOL,
        )
        .unwrap();
        for j in 0..COLS {
            let rel = (shifted.values[j] - base.values[(j + shift) % COLS]).abs()
                / base.values[(j + shift) % COLS];
            prop_assert!(rel <= 1e-6, "column {j}: relative gap {rel}");
        }
    }

    #[test]
    fn scores_are_rotation_invariant(
        d in matrix_strategy(),
        method in method_strategy(),
        v in proptest::collection::vec(-1.0f64..1.0, DIM),
    ) {
        let Some(q) = householder(&v) else { return Ok(()) };
        let base = score_matrix(&d, method, EXACT_RANK_TOL).unwrap();
        let rotated = DataMatrix::new(&q * d.matrix()).unwrap();
        let after = score_matrix(&rotated, method, EXACT_RANK_TOL).unwrap();
        for j in 0..COLS {
            let rel = (after.values[j] - base.values[j]).abs() / base.values[j];
            prop_assert!(rel <= 1e-6, "column {j}: relative gap {rel}");
        }
    }

    #[test]
    fn scores_are_column_scale_invariant(
        d in matrix_strategy(),
        method in method_strategy(),
        scales in proptest::collection::vec(0.1f64..10.0, COLS),
    ) {
        let base = score_matrix(&d, method, EXACT_RANK_TOL).unwrap();
        let mut m = d.matrix().clone();
        for (j, s) in scales.iter().enumerate() {
            m.column_mut(j).scale_mut(*s);
        }
        let scaled = score_matrix(&DataMatrix::new(m).unwrap(), method, EXACT_RANK_TOL).unwrap();
        for j in 0..COLS {
            let rel = (scaled.values[j] - base.values[j]).abs() / base.values[j];
            prop_assert!(rel <= 1e-6, "column {j}: relative gap {rel}");
        }
    }

    #[test]
    fn leverage_scores_trace_to_rank(d in matrix_strategy()) {
        let scores = score_matrix(&d, Method::Ancp, EXACT_RANK_TOL).unwrap();
        let trace: f64 = scores.values.iter().map(|x| 1.0 / x).sum();
        let rank = ncp::thin_svd(&normalize_columns(&d).unwrap(), EXACT_RANK_TOL)
            .unwrap()
            .effective_rank;
        prop_assert!((trace - rank as f64).abs() <= 1e-8, "trace {trace} vs rank {rank}");
    }

    #[test]
    fn selection_output_is_well_formed(
        d in matrix_strategy(),
        method in method_strategy(),
        target in 1usize..=4,
    ) {
        let normalized = normalize_columns(&d).unwrap();
        let scores = score_matrix(&d, method, EXACT_RANK_TOL).unwrap();
        let strategy = SelectionStrategy::RankGreedy { target, tol: SELECTION_TOL };
        let result = select_columns(&normalized, &scores, &strategy).unwrap();
        prop_assert!(result.basis.dim <= target);
        prop_assert_eq!(result.basis.ambient, DIM);
        let mut seen = std::collections::HashSet::new();
        for &idx in &result.selected {
            prop_assert!(idx < COLS);
            prop_assert!(seen.insert(idx), "duplicate selected index {idx}");
        }
    }

    #[test]
    fn rank_estimate_shrinks_as_ratio_grows(
        sigma in proptest::collection::vec(1e-6f64..10.0, 1..8),
    ) {
        let mut sorted = sigma.clone();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let loose = estimate_rank(&sorted, 1e-9).unwrap();
        let tight = estimate_rank(&sorted, 0.5).unwrap();
        prop_assert!(tight <= loose);
        prop_assert!(loose <= sorted.len());
        prop_assert!(tight >= 1);
    }

    #[test]
    fn concentration_bounds_are_ordered(
        n in 3usize..5000,
        dim in 3usize..64,
        delta in 0.01f64..0.5,
    ) {
        let (upper, lower) = sphere_concentration_bounds(n, dim, delta);
        prop_assert!(upper > lower);
        prop_assert!(upper > n as f64 / dim as f64);
    }
}
