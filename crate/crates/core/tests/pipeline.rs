mod common;

use common::*;
use depscope::measures::MeasureId;
use depscope::search::{rank_hyperparameters, run_grid_search, Axis, RankFilter, SearchSpace, Trend};
use depscope::shaping::{discretize, equal_frequency_symbols, window_anchors, window_count};
use depscope::timeseries::{load_ohlcv, validate_frame, write_csv, IssueKind, RawFrame};
use depscope::verify::{generate_synthetic, Embedding, SyntheticSpec};
use depscope::TimeSeriesFrame;
use proptest::prelude::*;

fn ohlcv_rows() -> impl Strategy<Value = Vec<[f64; 5]>> {
    prop::collection::vec(
        (1.0f64..500.0, 0.0f64..0.1, 0.0f64..0.1, 0.0f64..1.0, 0.0f64..1e7).prop_map(|(o, up, down, pos, vol)| {
            let high = o * (1.0 + up);
            let low = o * (1.0 - down);
            [o, high, low, low + (high - low) * pos, vol.round()]
        }),
        1..60,
    )
}

fn frame_from_rows(rows: &[[f64; 5]]) -> TimeSeriesFrame {
    let names = ["open", "high", "low", "close", "volume"];
    TimeSeriesFrame::new(
        (0..rows.len()).map(|i| day(i * 2)).collect(),
        names
            .iter()
            .enumerate()
            .map(|(j, n)| (n.to_string(), rows.iter().map(|r| r[j]).collect()))
            .collect(),
        "generated",
    )
    .unwrap()
}

fn csv_bytes(frame: &TimeSeriesFrame) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(frame, &mut out).unwrap();
    out
}

proptest! {
    #[test]
    fn csv_round_trip_is_stable(rows in ohlcv_rows()) {
        let frame = frame_from_rows(&rows);
        let once = load_ohlcv(csv_bytes(&frame).as_slice()).unwrap();
        for name in ["open", "high", "low", "close", "volume"] {
            prop_assert_eq!(once.column(name).unwrap(), frame.column(name).unwrap());
        }
        prop_assert_eq!(once.timestamps(), frame.timestamps());
        let twice = load_ohlcv(csv_bytes(&once).as_slice()).unwrap();
        prop_assert_eq!(csv_bytes(&once), csv_bytes(&twice));
    }

    #[test]
    fn window_count_matches_anchor_walk(t in 0usize..500, w in 1usize..120, n in 1usize..120, h in 1usize..10) {
        let anchors: Vec<usize> = window_anchors(t, w, n, h).collect();
        prop_assert_eq!(anchors.len(), window_count(t, w, n, h));
        for a in &anchors {
            prop_assert!(a + 1 >= w && a + h < t);
        }
        if let Some(last) = anchors.last() {
            prop_assert!(last + n + h >= t);
        }
    }

    #[test]
    fn discretize_is_monotone(mut v in prop::collection::vec(-0.2f64..0.2, 1..100), bw in 1e-4f64..0.05) {
        v.sort_by(f64::total_cmp);
        let d = discretize(&v, bw, 0.0).unwrap();
        prop_assert!(d.symbols.windows(2).all(|p| p[0] <= p[1]));
        for (x, s) in v.iter().zip(&d.symbols) {
            let (lo, hi) = d.bin_interval(*s);
            prop_assert!(lo <= *x + 1e-15 && *x < hi + 1e-15);
        }
    }

    #[test]
    fn equal_frequency_bins_follow_ranks(v in prop::collection::vec(-5i32..5, 1..80), bins in 1usize..10) {
        let values: Vec<f64> = v.iter().map(|x| *x as f64).collect();
        let got = equal_frequency_symbols(&values, bins);
        let want: Vec<i64> = oracle_ef_bins(&values, bins).into_iter().map(|b| b as i64).collect();
        prop_assert_eq!(&got, &want);
        let moved: Vec<f64> = values.iter().map(|x| x.exp()).collect();
        prop_assert_eq!(equal_frequency_symbols(&moved, bins), got);
    }
}

#[test]
fn validation_reports_every_problem() {
    let raw = RawFrame {
        timestamps: vec![day(0), day(1), day(1), day(0)],
        columns: vec![
            ("close".into(), vec![Some(1.0), None, Some(f64::NAN), Some(2.0)]),
        ],
        source: "test".into(),
    };
    let report = validate_frame(&raw);
    assert!(!report.is_accepted());
    let kinds: Vec<IssueKind> = report.issues.iter().map(|i| i.kind).collect();
    assert!(kinds.contains(&IssueKind::Missing));
    assert!(kinds.contains(&IssueKind::NonFinite));
    assert!(kinds.contains(&IssueKind::DuplicateTime));
    assert!(kinds.contains(&IssueKind::NonMonotonicTime));
}

fn small_space() -> SearchSpace {
    SearchSpace {
        window_sizes: vec![30, 60],
        feature_sets: vec![vec!["f_signal".into()], vec!["f_signal".into(), "open".into()]],
        targets: vec!["close_ret".into()],
        measures: vec![MeasureId::MutualInformation, MeasureId::DistanceCorrelation, MeasureId::Pearson],
        step: 40,
        min_pairs: 20,
        ..SearchSpace::default()
    }
}

fn search_frame() -> TimeSeriesFrame {
    let f = generate_synthetic(&SyntheticSpec {
        length: 400,
        embedding: Embedding::LinearLag,
        seed: 3,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let close = f.column("close").unwrap();
    let ret: Vec<f64> = (0..f.len())
        .map(|t| if t == 0 { 0.0 } else { close[t] / close[t - 1] - 1.0 })
        .collect();
    f.with_columns(vec![("close_ret".into(), ret)]).unwrap()
}

#[test]
fn grid_search_is_deterministic_and_complete() {
    let frame = search_frame();
    let space = small_space();
    let a = run_grid_search(&frame, &space, 9, Some(1)).unwrap();
    let b = run_grid_search(&frame, &space, 9, Some(3)).unwrap();
    assert_eq!(a.records, b.records);

    let per_config: usize = space
        .window_sizes
        .iter()
        .map(|&w| window_count(frame.len(), w, space.step, space.horizon))
        .sum();
    assert_eq!(a.records.len(), per_config * 2 * 3);
    for (i, r) in a.records.iter().enumerate() {
        assert_eq!(r.trial_id, i);
        assert_eq!((r.anchor_index + 1 - r.window_size) % space.step, 0);
        assert!(r.anchor_index + space.horizon < frame.len());
        assert_eq!(r.anchor_date, frame.timestamps()[r.anchor_index]);
    }
    // Pearson on a two-column feature set is not defined
    assert!(a
        .records
        .iter()
        .filter(|r| r.measure == MeasureId::Pearson && r.feature_set.len() == 2)
        .all(|r| r.degenerate && r.objective.is_none()));
}

#[test]
fn trend_filter_only_removes_records() {
    let log = run_grid_search(&search_frame(), &small_space(), 1, None).unwrap();
    let all = rank_hyperparameters(&log, Axis::Window, RankFilter::default());
    let total: usize = all.entries.iter().map(|e| e.trials).sum();
    let mut filtered_total = 0;
    for trend in [Trend::Up, Trend::Down, Trend::Neutral] {
        let filter = RankFilter { trend: Some(trend), measure: None };
        let part = rank_hyperparameters(&log, Axis::Window, filter);
        filtered_total += part.entries.iter().map(|e| e.trials).sum::<usize>();
        for e in &part.entries {
            let usable: Vec<f64> = log
                .records
                .iter()
                .filter(|r| r.trend == trend && r.window_size.to_string() == e.group)
                .filter_map(|r| r.usable_objective())
                .collect();
            assert_eq!(usable.len(), e.trials);
        }
    }
    assert_eq!(filtered_total, total);
}

#[test]
fn missing_target_column_fails_before_trials() {
    let mut space = small_space();
    space.targets = vec!["t_missing".into()];
    let err = run_grid_search(&search_frame(), &space, 1, None).unwrap_err();
    assert!(matches!(err, depscope::Error::UnknownColumn(c) if c == "t_missing"));
}
