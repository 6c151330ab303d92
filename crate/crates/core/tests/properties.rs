//! Property tests for the coding and clustering invariants.

mod common;

use gda_core::cluster::ward_cluster;
use gda_core::tabular::{ColumnInfo, ColumnRole, IndicatorMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn indicator_from(rows: &[Vec<f64>]) -> IndicatorMatrix {
    let n = rows.len();
    let j = rows[0].len();
    let data = DMatrix::from_fn(n, j, |i, c| rows[i][c]);
    let columns = (0..j)
        .map(|c| ColumnInfo {
            question_id: format!("q{c}"),
            modality: "v".into(),
            role: ColumnRole::Main,
        })
        .collect();
    let ids = (0..n).map(|i| format!("i{i}")).collect();
    IndicatorMatrix::from_parts(data, columns, ids, j).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Doubling forces every row sum to m * (number of original columns).
    #[test]
    fn doubling_gives_constant_row_sums(
        rows in prop::collection::vec(
            prop::collection::vec(0.0f64..5.0, 3),
            1..8,
        )
    ) {
        let ind = indicator_from(&rows);
        let doubled = ind.double_columns_uniform(5.0).unwrap();
        let expected = 5.0 * 3.0;
        for i in 0..doubled.n() {
            let sum: f64 = doubled.data().row(i).sum();
            prop_assert!((sum - expected).abs() < 1e-9, "row {i} sums to {sum}");
        }
    }

    /// Demotion changes roles only; the data multiset is untouched.
    #[test]
    fn demotion_preserves_entries(
        rows in prop::collection::vec(
            prop::collection::vec(0.0f64..3.0, 4),
            2..8,
        ),
        threshold in 0u64..6,
    ) {
        let ind = indicator_from(&rows);
        match ind.demote_sparse(threshold) {
            Ok((demoted, which)) => {
                prop_assert_eq!(demoted.data(), ind.data());
                for j in which {
                    prop_assert_eq!(demoted.columns()[j].role, ColumnRole::Supplementary);
                }
                prop_assert!(demoted.main_columns().len() >= 1);
            }
            Err(_) => {
                // legal only when every main column total is at or below the
                // threshold
                let totals = ind.column_totals();
                prop_assert!(totals.iter().all(|&t| t <= threshold as f64));
            }
        }
    }

    /// Ward heights never decrease and the cophenetic matrix stays
    /// ultrametric, for arbitrary small clouds.
    #[test]
    fn ward_is_monotone_and_ultrametric(
        pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..10),
        mass_seed in prop::collection::vec(0.1f64..3.0, 10),
    ) {
        let p = pts.len();
        let coords = DMatrix::from_fn(p, 2, |i, j| if j == 0 { pts[i].0 } else { pts[i].1 });
        let masses: Vec<f64> = (0..p).map(|i| mass_seed[i]).collect();
        let labels = (0..p).map(|i| format!("x{i}")).collect();
        let d = ward_cluster(&coords, &masses, None, labels).unwrap();
        for w in d.merges().windows(2) {
            prop_assert!(w[0].height <= w[1].height);
        }
        let coph = d.cophenetic_matrix();
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    prop_assert!(coph[(x, z)] <= coph[(x, y)].max(coph[(y, z)]));
                }
            }
        }
    }
}
