use std::path::Path;

use proptest::prelude::*;
use ssimkit::eval::{cross_apply, evaluate, fit_5pl, spearman, Logistic5, Manifest};
use ssimkit::Error;

#[test]
fn manifest_resolves_relative_paths() {
    let csv = "ref_path,dist_path,subjective_score,width,height\nrefs/a.pgm, dist/a1.pgm ,41.5,,\nrefs/b.yuv,dist/b1.yuv,12,64,48\n";
    let m = Manifest::from_reader(csv.as_bytes(), Path::new("/data/live")).unwrap();
    assert_eq!(m.rows.len(), 2);
    assert_eq!(m.rows[0].dist_path, Path::new("/data/live/dist/a1.pgm"));
    assert_eq!(m.rows[0].width, None);
    assert_eq!((m.rows[1].width, m.rows[1].height), (Some(64), Some(48)));
}

#[test]
fn manifest_errors_name_the_line() {
    let csv = "ref_path,dist_path,subjective_score\na,b,1.0\na,b,oops\n";
    match Manifest::from_reader(csv.as_bytes(), Path::new(".")) {
        Err(Error::Dataset(msg)) => assert!(msg.contains("line 3"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn evaluation_of_a_logistic_relation() {
    let truth = Logistic5::new([60.0, 15.0, 0.8, 10.0, 20.0]);
    let x: Vec<f64> = (0..40).map(|i| 0.55 + 0.01 * i as f64).collect();
    let y: Vec<f64> = x.iter().map(|&v| truth.eval(v)).collect();
    let e = evaluate(&x, &y).unwrap();
    assert_eq!(e.correlations.srocc, 1.0);
    assert!(e.correlations.rmse <= 1e-6, "{}", e.correlations.rmse);
    assert!(e.correlations.pcc > 1.0 - 1e-9);
    assert!(e.monotone);
    assert!(e.fit.rmse_history.windows(2).all(|w| w[1] <= w[0]));
    assert!(cross_apply(&e.fit.params, &x, &y).unwrap() <= 1e-6);
}

#[test]
fn too_few_distinct_scores() {
    let x = [0.9, 0.9, 0.8, 0.8, 0.7, 0.7];
    let y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    assert!(matches!(fit_5pl(&x, &y), Err(Error::DegenerateData(_))));
}

proptest! {
    #[test]
    fn srocc_invariant_under_monotone_maps(v in prop::collection::vec(0.0f64..1.0, 3..40), w in prop::collection::vec(0.0f64..1.0, 40)) {
        let w = &w[..v.len()];
        if let Ok(s) = spearman(&v, w) {
            let mapped: Vec<f64> = v.iter().map(|x| (3.0 * x).exp()).collect();
            prop_assert_eq!(spearman(&mapped, w).unwrap(), s);
            prop_assert!(s.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn fit_never_worse_than_a_line(seed in any::<u64>()) {
        let x: Vec<f64> = (0..25).map(|i| 0.4 + 0.02 * i as f64).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, v)| 30.0 * v + ((seed >> (i % 60)) & 3) as f64).collect();
        let fit = fit_5pl(&x, &y).unwrap();
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let line = Logistic5::new([0.0, 1.0, 0.0, sxy / sxx, my - sxy / sxx * mx]);
        prop_assert!(fit.rmse <= cross_apply(&line, &x, &y).unwrap() + 1e-9);
    }
}
