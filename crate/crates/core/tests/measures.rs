mod common;

use common::*;
use depscope::measures::info::{
    entropy, information_gain, mic, mutual_information, redundancy_synergy_index, DiscreteDistribution,
    JointHistogram, DEFAULT_MIC_ALPHA,
};
use depscope::measures::model::{fit_regression_tree, mean_absolute_error, pps, TreeParams};
use depscope::measures::stat::as_points;
use depscope::measures::{distance_correlation, pearson, spearman, MeasureId};
use depscope::Error;
use proptest::prelude::*;

fn v(r: depscope::Result<depscope::MeasureResult>) -> f64 {
    r.unwrap().value.unwrap()
}

fn varied(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, len).prop_filter("non-constant", |v| v.iter().any(|a| *a != v[0]))
}

fn pair(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| (varied(n..n + 1), varied(n..n + 1)))
}

fn symbol_pair() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (1usize..60).prop_flat_map(|n| {
        (prop::collection::vec(0i64..5, n), prop::collection::vec(0i64..4, n))
    })
}

fn sse(y: &[f64], pred: &[f64]) -> f64 {
    y.iter().zip(pred).map(|(a, b)| (a - b).powi(2)).sum()
}

proptest! {
    #[test]
    fn correlations_are_symmetric((x, y) in pair(3..40)) {
        prop_assert_eq!(v(pearson(&x, &y)), v(pearson(&y, &x)));
        prop_assert_eq!(v(spearman(&x, &y)), v(spearman(&y, &x)));
    }

    #[test]
    fn spearman_ignores_monotone_maps((x, y) in pair(3..40), a in 0.1f64..3.0, b in -5.0f64..5.0) {
        // strictly increasing maps that keep every order and tie intact
        let fx: Vec<f64> = x.iter().map(|t| (t / 50.0).atan() * a + b).collect();
        let gy: Vec<f64> = y.iter().map(|t| t.powi(3) + t).collect();
        prop_assert_eq!(v(spearman(&fx, &gy)), v(spearman(&x, &y)));
    }

    #[test]
    fn dcor_invariances((x, y) in pair(4..30), theta in 0.0f64..6.28, shift in -10.0f64..10.0, scale in 0.1f64..10.0) {
        let xs: Vec<Vec<f64>> = x.iter().zip(&y).map(|(a, b)| vec![*a, b * 0.5 + a.sin()]).collect();
        let ys = as_points(&y);
        let base = v(distance_correlation(&xs, &ys));
        let (c, s) = (theta.cos(), theta.sin());
        let rotated: Vec<Vec<f64>> = xs.iter().map(|p| vec![c * p[0] - s * p[1] + shift, s * p[0] + c * p[1] - shift]).collect();
        prop_assert!((v(distance_correlation(&rotated, &ys)) - base).abs() < 1e-9);
        let shifted: Vec<Vec<f64>> = ys.iter().map(|p| vec![-p[0] + shift]).collect();
        prop_assert!((v(distance_correlation(&xs, &shifted)) - base).abs() < 1e-9);
        let sx: Vec<Vec<f64>> = xs.iter().map(|p| p.iter().map(|q| q * scale).collect()).collect();
        let sy: Vec<Vec<f64>> = ys.iter().map(|p| vec![p[0] * scale]).collect();
        prop_assert!((v(distance_correlation(&sx, &sy)) - base).abs() < 1e-9);
    }

    #[test]
    fn statistical_measures_match_oracles((x, y) in pair(2..33)) {
        prop_assert!((v(pearson(&x, &y)) - oracle_pearson(&x, &y)).abs() < 1e-9);
        prop_assert!((v(spearman(&x, &y)) - oracle_spearman(&x, &y)).abs() < 1e-9);
        let (px, py) = (as_points(&x), as_points(&y));
        prop_assert!((v(distance_correlation(&px, &py)) - oracle_dcor(&px, &py)).abs() < 1e-9);
    }

    #[test]
    fn mi_identities((x, y) in symbol_pair()) {
        let joint = JointHistogram::from_symbols(&x, &y).unwrap();
        let mi = v(mutual_information(&joint));
        let (hx, hy, hxy) = (joint.entropy_x(), joint.entropy_y(), joint.joint_entropy());
        prop_assert!((mi - (hx + hy - hxy).max(0.0)).abs() < 1e-12);
        prop_assert!((mi - oracle_mi(&x, &y).max(0.0)).abs() < 1e-12);
        prop_assert_eq!(mi, v(mutual_information(&joint.transposed())));
        prop_assert!(mi >= 0.0 && mi <= hx.min(hy) + 1e-12);
        prop_assert!((v(information_gain(&x, &y)) - mi).abs() < 1e-12);
    }

    #[test]
    fn rsi_matches_inclusion_exclusion(
        (a, b, y) in (1usize..50).prop_flat_map(|n| (
            prop::collection::vec(0i64..3, n),
            prop::collection::vec(0i64..3, n),
            prop::collection::vec(0i64..3, n),
        ))
    ) {
        let got = v(redundancy_synergy_index(&[a.clone(), b.clone()], &y, 3));
        prop_assert!((got - oracle_rsi2(&a, &b, &y)).abs() < 1e-12);
    }

    #[test]
    fn mic_bounded_and_rank_invariant((x, y) in pair(8..120)) {
        let base = mic(&x, &y, DEFAULT_MIC_ALPHA).unwrap();
        let value = base.value.unwrap();
        prop_assert!((0.0..=1.0).contains(&value));
        let fx: Vec<f64> = x.iter().map(|t| t.exp().ln_1p()).collect();
        let gy: Vec<f64> = y.iter().map(|t| -(-t).exp()).collect();
        let moved = mic(&fx, &gy, DEFAULT_MIC_ALPHA).unwrap();
        prop_assert_eq!(moved.value, base.value);
        prop_assert_eq!(moved.params.get("grid_x"), base.params.get("grid_x"));
        prop_assert_eq!(moved.params.get("grid_y"), base.params.get("grid_y"));
    }

    #[test]
    fn pps_is_clipped_and_deterministic((x, y) in pair(20..80), folds in 1usize..5) {
        let xs = as_points(&x);
        let r = pps(&xs, &y, folds, 7, TreeParams::default()).unwrap();
        if let Some(value) = r.value {
            prop_assert!((0.0..=1.0).contains(&value));
            prop_assert!(r.params.contains_key("raw"));
        }
        prop_assert_eq!(r, pps(&xs, &y, folds, 7, TreeParams::default()).unwrap());
    }

    #[test]
    fn deeper_trees_never_raise_training_sse((x, y) in pair(10..80), leaf in 1usize..6) {
        let xs = as_points(&x);
        let mut last = f64::INFINITY;
        for depth in 0..6 {
            let params = TreeParams { max_depth: depth, min_samples_leaf: leaf };
            let tree = fit_regression_tree(&xs, &y, params).unwrap();
            prop_assert_eq!(&tree, &fit_regression_tree(&xs, &y, params).unwrap());
            let pred: Vec<f64> = xs.iter().map(|r| tree.predict(r)).collect();
            let e = sse(&y, &pred);
            prop_assert!(e <= last * (1.0 + 1e-12) + 1e-12);
            last = e;
        }
    }
}

#[test]
fn training_mae_is_not_monotone_in_depth() {
    // One balanced split lowers squared error but raises absolute error, so
    // the monotone-MAE property does not hold for a squared-error tree.
    let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let mut y = vec![0.0; 10];
    y[0] = 10.0;
    y[9] = -10.0;
    let xs = as_points(&x);
    let fit = |d| {
        let tree = fit_regression_tree(&xs, &y, TreeParams { max_depth: d, min_samples_leaf: 5 }).unwrap();
        let pred: Vec<f64> = xs.iter().map(|r| tree.predict(r)).collect();
        (mean_absolute_error(&y, &pred), sse(&y, &pred))
    };
    let (mae0, sse0) = fit(0);
    let (mae1, sse1) = fit(1);
    assert!(sse1 < sse0);
    assert!(mae1 > mae0);
}

#[test]
fn entropy_of_uniform_and_point_masses() {
    assert_eq!(entropy(&DiscreteDistribution::from_probs(&[0.25; 4]).unwrap()), 2.0);
    assert_eq!(entropy(&DiscreteDistribution::from_probs(&[1.0]).unwrap()), 0.0);
    assert_eq!(entropy(&DiscreteDistribution::from_probs(&[0.5, 0.5, 0.0]).unwrap()), 1.0);
    assert!(DiscreteDistribution::from_probs(&[0.5, 0.4]).is_err());
}

#[test]
fn independent_samples_have_small_dcor() {
    let mut values = Vec::new();
    for seed in 0..100 {
        let mut r = rng(seed);
        let x = uniform_vec(&mut r, 200);
        let y = uniform_vec(&mut r, 200);
        values.push(v(distance_correlation(&as_points(&x), &as_points(&y))));
    }
    values.sort_by(f64::total_cmp);
    let median = (values[49] + values[50]) / 2.0;
    assert!(median < 0.15, "median dCor {median}");
}

#[test]
fn rsi_set_size_is_capped() {
    let s = vec![vec![0, 1, 0, 1]; 4];
    assert!(matches!(redundancy_synergy_index(&s, &[0, 1, 1, 0], 3), Err(Error::Capacity(_))));
}

#[test]
fn measure_ids_round_trip_through_text() {
    for m in MeasureId::ALL {
        assert_eq!(m.to_string().parse::<MeasureId>().unwrap(), m);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, format!("\"{m}\""));
    }
}

#[test]
fn mic_needs_eight_samples() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
    assert!(matches!(mic(&x, &x, DEFAULT_MIC_ALPHA), Err(Error::SampleSize { .. })));
}
