use saddlekit_harness::{fit_rate, HarnessError};

fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    (1..=40).map(|i| {
        let t = 10.0 * 1.3f64.powi(i);
        (t, f(t))
    })
    .collect()
}

#[test]
fn inverse_sqrt_has_slope_minus_half() {
    let fit = fit_rate(&series(|t| 3.0 / t.sqrt())).unwrap();
    assert!((fit.slope + 0.5).abs() <= 1e-6, "slope {}", fit.slope);
    assert!((fit.intercept - 3f64.ln()).abs() <= 1e-9);
    assert!((fit.r2 - 1.0).abs() <= 1e-12);
}

#[test]
fn inverse_square_has_slope_minus_two() {
    let fit = fit_rate(&series(|t| 7.0 / (t * t))).unwrap();
    assert!((fit.slope + 2.0).abs() <= 1e-6, "slope {}", fit.slope);
}

#[test]
fn too_few_points() {
    let s: Vec<(f64, f64)> = (1..10).map(|t| (t as f64, 1.0 / t as f64)).collect();
    assert!(matches!(fit_rate(&s), Err(HarnessError::InsufficientData(_))));
}

#[test]
fn non_positive_values_rejected() {
    let mut s = series(|t| 1.0 / t);
    s[4].1 = 0.0;
    assert!(matches!(fit_rate(&s), Err(HarnessError::InsufficientData(_))));
    let flat: Vec<(f64, f64)> = (0..12).map(|i| (5.0, i as f64 + 1.0)).collect();
    assert!(matches!(fit_rate(&flat), Err(HarnessError::InsufficientData(_))));
}
