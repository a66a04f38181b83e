use proptest::prelude::*;

use cod::dataset::view_layout;
use cod::simulate::{
    build_experiment_instance, build_multiview_instance, gaussian_blobs, inject_attribute_outliers,
    inject_class_outliers, outlier_count, ViewsMode, CONFIG_NAMES,
};
use cod::{CodError, LabeledDataset, OutlierConfig, OutlierTag};

fn blobs(n: usize, classes: usize, seed: u64) -> LabeledDataset {
    let centers: Vec<Vec<f64>> = (0..classes).map(|c| vec![c as f64 * 5.0, -(c as f64), 1.0]).collect();
    gaussian_blobs(&centers, 1.0, n, seed).unwrap()
}

fn column_bounds(ds: &LabeledDataset, j: usize) -> (f64, f64) {
    ds.column(j).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn injection_invariants(n in 20usize..200, classes in 2usize..5, cfg in 0usize..6, seed in any::<u64>()) {
        let ds = blobs(n, classes, seed ^ 1);
        let config = OutlierConfig::named(CONFIG_NAMES[cfg], seed).unwrap();
        let inst = build_experiment_instance(&ds, &config).unwrap();
        let count = |tag| inst.truth.iter().filter(|&&t| t == tag).count();
        prop_assert_eq!(count(OutlierTag::Class), outlier_count(config.class_pct, n));
        prop_assert_eq!(count(OutlierTag::Attribute), outlier_count(config.attr_pct, n));

        for i in 0..n {
            let (before, after) = (ds.row(i), inst.data.row(i));
            match inst.truth[i] {
                OutlierTag::None => {
                    prop_assert_eq!(before, after);
                    prop_assert_eq!(ds.labels()[i], inst.data.labels()[i]);
                }
                OutlierTag::Class => {
                    prop_assert_eq!(before, after);
                    prop_assert_ne!(ds.labels()[i], inst.data.labels()[i]);
                }
                OutlierTag::Attribute => {
                    prop_assert_eq!(ds.labels()[i], inst.data.labels()[i]);
                    for (j, &x) in after.iter().enumerate() {
                        let (lo, hi) = column_bounds(&ds, j);
                        let r = hi - lo;
                        let low = x >= lo - 2.0 * r && x <= lo - r;
                        let high = x >= hi + r && x <= hi + 2.0 * r;
                        prop_assert!(low || high, "feature {} value {} outside bands of [{}, {}]", j, x, lo, hi);
                    }
                }
            }
        }
        prop_assert_eq!(build_experiment_instance(&ds, &config).unwrap(), inst);
    }

    #[test]
    fn pairing_moves_only_the_surplus(seed in any::<u64>()) {
        // two classes: min(s1, s2) swapped pairs, the surplus all moves across
        let ds = blobs(100, 2, seed);
        let inst = inject_class_outliers(&ds, 0.2, seed).unwrap();
        let mut picked = [0i64; 2];
        for i in 0..100 {
            if inst.truth[i] == OutlierTag::Class {
                picked[ds.labels()[i] as usize - 1] += 1;
            }
        }
        let before: Vec<i64> = ds.class_counts().iter().map(|&c| c as i64).collect();
        let after: Vec<i64> = inst.data.class_counts().iter().map(|&c| c as i64).collect();
        let surplus = picked[0] - picked[1];
        prop_assert_eq!(after, vec![before[0] - surplus, before[1] + surplus]);
    }
}

#[test]
fn multiview_projection_and_labels() {
    let ds = blobs(150, 3, 4);
    let layout = view_layout(3, 2, 9).unwrap();
    for mode in [ViewsMode::Single, ViewsMode::PerView] {
        let config = OutlierConfig::named("8-2", 17).unwrap().with_views_mode(mode);
        let mv = build_multiview_instance(&ds, &layout, &config).unwrap();
        let single = build_experiment_instance(&ds, &config).unwrap();
        assert_eq!(mv.truth, single.truth);
        for (v, view) in mv.data.views().iter().enumerate() {
            assert_eq!(view.n_features(), layout[v].len());
            for i in 0..ds.n_samples() {
                let expected: Vec<f64> = layout[v].iter().map(|&j| single.data.row(i)[j]).collect();
                assert_eq!(view.row(i), &expected[..]);
            }
        }
        for i in 0..ds.n_samples() {
            let changed: Vec<bool> = mv.data.views().iter().map(|v| v.labels()[i] != ds.labels()[i]).collect();
            match mv.truth[i] {
                OutlierTag::Class => {
                    assert!(changed.iter().any(|&c| c));
                    if mode == ViewsMode::Single {
                        assert!(changed.iter().all(|&c| c));
                        assert_eq!(mv.data.views()[0].labels()[i], single.data.labels()[i]);
                    }
                }
                _ => assert!(changed.iter().all(|&c| !c)),
            }
        }
    }
}

#[test]
fn per_view_swaps_use_partial_subsets() {
    let ds = blobs(300, 2, 5);
    let layout = view_layout(3, 3, 1).unwrap();
    let config = OutlierConfig::named("8-2", 2).unwrap().with_views_mode(ViewsMode::PerView);
    let mv = build_multiview_instance(&ds, &layout, &config).unwrap();
    let partial = (0..300)
        .filter(|&i| mv.truth[i] == OutlierTag::Class)
        .filter(|&i| {
            let changed = mv.data.views().iter().filter(|v| v.labels()[i] != ds.labels()[i]).count();
            changed > 0 && changed < 3
        })
        .count();
    assert!(partial > 0);
}

#[test]
fn counts_and_names() {
    assert_eq!(outlier_count(0.08, 150), 12);
    assert_eq!(outlier_count(0.29, 100), 29);
    assert_eq!(outlier_count(0.02, 49), 0);
    for name in CONFIG_NAMES {
        assert_eq!(OutlierConfig::named(name, 0).unwrap().name(), name);
    }
    assert!(matches!(OutlierConfig::named("3-3", 0), Err(CodError::UnknownConfig(_))));
    assert!(OutlierConfig::new(0.6, 0.5, 0).is_err());
}

#[test]
fn single_purpose_injectors() {
    let ds = blobs(100, 3, 8);
    let a = inject_attribute_outliers(&ds, 0.1, 1).unwrap();
    assert!(a.truth.iter().all(|&t| t != OutlierTag::Class));
    assert_eq!(a.truth.iter().filter(|t| t.is_outlier()).count(), 10);
    let c = inject_class_outliers(&ds, 0.1, 1).unwrap();
    assert!(c.truth.iter().all(|&t| t != OutlierTag::Attribute));
    assert!(inject_attribute_outliers(&ds, 1.0, 1).is_err());
    let one_class = LabeledDataset::from_flat(vec![0.0; 10], 1, vec![1; 10]).unwrap();
    assert!(inject_class_outliers(&one_class, 0.2, 0).is_err());
}

#[test]
fn constant_feature_uses_unit_range() {
    let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64, 3.0]).collect();
    let ds = LabeledDataset::from_rows(&rows, (0..50).map(|i| i % 2 + 1).collect()).unwrap();
    let inst = inject_attribute_outliers(&ds, 0.2, 0).unwrap();
    for i in 0..50 {
        if inst.truth[i] == OutlierTag::Attribute {
            let x = inst.data.row(i)[1];
            assert!((1.0..=2.0).contains(&x) || (4.0..=5.0).contains(&x), "{x}");
        }
    }
}

#[test]
fn blobs_layout() {
    let ds = gaussian_blobs(&[vec![0.0], vec![100.0]], 1.0, 7, 0).unwrap();
    assert_eq!(ds.labels(), &[1, 1, 1, 1, 2, 2, 2]);
    assert!(ds.row(0)[0].abs() < 10.0 && (ds.row(6)[0] - 100.0).abs() < 10.0);
    assert_eq!(gaussian_blobs(&[vec![0.0], vec![1.0]], 1.0, 20, 3).unwrap(), gaussian_blobs(&[vec![0.0], vec![1.0]], 1.0, 20, 3).unwrap());
}
