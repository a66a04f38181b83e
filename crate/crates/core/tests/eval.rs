use proptest::prelude::*;

use cod::eval::{mean_std, run_experiment, run_multiview_experiment, run_multiview_with_layout, write_reports_csv};
use cod::simulate::gaussian_blobs;
use cod::{auc, CodError, LabeledDataset, OutlierConfig, OutlierModel, PipelineParams};

fn scored() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (2usize..80).prop_flat_map(|n| {
        (
            prop::collection::vec(prop_oneof![-1.0f64..1.0, (0i32..3).prop_map(f64::from)], n),
            prop::collection::vec(any::<bool>(), n),
        )
    })
    .prop_filter("both classes", |(_, t)| t.iter().any(|&x| x) && t.iter().any(|&x| !x))
}

proptest! {
    #[test]
    fn auc_invariant_under_increasing_maps((s, t) in scored()) {
        let a = auc(&s, &t).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        let shifted: Vec<f64> = s.iter().map(|x| 3.0 * x + 7.0).collect();
        prop_assert_eq!(auc(&shifted, &t).unwrap(), a);
        let squashed: Vec<f64> = s.iter().map(|x| x.exp()).collect();
        prop_assert_eq!(auc(&squashed, &t).unwrap(), a);
        let negated: Vec<f64> = s.iter().map(|x| -x).collect();
        prop_assert!((auc(&negated, &t).unwrap() + a - 1.0).abs() < 1e-12);
    }
}

fn model() -> OutlierModel {
    OutlierModel::from_json(r#"{"kind":"logistic","weights":[-6.0,-6.0,4.0],"seed":0,"corpus":"hand-set"}"#).unwrap()
}

fn blobs() -> LabeledDataset {
    gaussian_blobs(&[vec![0.0, 0.0, 0.0], vec![8.0, 0.0, 0.0], vec![0.0, 8.0, 0.0]], 1.0, 120, 1).unwrap()
}

fn params() -> PipelineParams {
    PipelineParams { k: 15, ..Default::default() }
}

#[test]
fn report_shape_and_determinism() {
    let config = OutlierConfig::named("5-5", 10).unwrap();
    let r = run_experiment("blobs", &blobs(), &config, &params(), &model(), 4).unwrap();
    assert_eq!((r.n_repeats, r.aucs.len(), r.views, r.seed_base), (4, 4, 1, 10));
    assert_eq!(r.config, "5-5");
    assert!(r.aucs.iter().all(|a| (0.0..=1.0).contains(a)));
    let (m, s) = mean_std(&r.aucs);
    assert_eq!((r.auc_mean, r.auc_std), (m, s));
    assert_eq!(run_experiment("blobs", &blobs(), &config, &params(), &model(), 4).unwrap(), r);

    let one = run_experiment("blobs", &blobs(), &config, &params(), &model(), 1).unwrap();
    assert_eq!(one.auc_std, 0.0);
    assert_eq!(one.aucs[0], r.aucs[0]);
    assert!(run_experiment("blobs", &blobs(), &config, &params(), &model(), 0).is_err());
}

#[test]
fn identical_copy_views_equal_single_view() {
    let ds = blobs();
    let config = OutlierConfig::named("8-2", 3).unwrap();
    let single = run_experiment("blobs", &ds, &config, &params(), &model(), 3).unwrap();
    let all: Vec<usize> = (0..ds.n_features()).collect();
    let copies = run_multiview_with_layout("blobs", &ds, &config, &params(), &model(), 3, |_| {
        Ok(vec![all.clone(), all.clone()])
    })
    .unwrap();
    assert_eq!(copies.aucs, single.aucs);
    assert_eq!(copies.views, 2);
}

#[test]
fn multiview_report() {
    let ds = blobs();
    let config = OutlierConfig::named("2-8", 0).unwrap();
    let r = run_multiview_experiment("blobs", &ds, 2, &config, &params(), &model(), 3).unwrap();
    assert_eq!((r.views, r.n_repeats), (2, 3));
    assert!(run_multiview_experiment("blobs", &ds, 4, &config, &params(), &model(), 3).is_err());
}

#[test]
fn single_class_truth_is_an_error() {
    // 0-2 on 40 samples injects nothing
    let ds = gaussian_blobs(&[vec![0.0], vec![5.0]], 1.0, 40, 0).unwrap();
    let config = OutlierConfig::named("0-2", 0).unwrap();
    let p = PipelineParams { k: 5, ..Default::default() };
    assert!(matches!(run_experiment("tiny", &ds, &config, &p, &model(), 2), Err(CodError::SingleClass)));
}

#[test]
fn csv_rows_follow_repeat_order() {
    let config = OutlierConfig::named("5-5", 0).unwrap();
    let r = run_experiment("blobs", &blobs(), &config, &params(), &model(), 3).unwrap();
    let mut out = Vec::new();
    write_reports_csv(&mut out, &[r.clone(), r.clone()]).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "dataset,config,views,repeat,auc");
    assert_eq!(lines[3], format!("blobs,5-5,1,2,{}", r.aucs[2]));
}
