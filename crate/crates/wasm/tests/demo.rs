use valuation_wasm::demo;

#[test]
fn convergence_starts_with_closed_form() {
    let spec = demo::spec(100.0, 100.0, 0.05, 1.0, 0.2);
    let out = demo::convergence(&spec, &[16, 256, 4096]).unwrap();
    assert_eq!(out.len(), 4);
    assert!((out[0] - 10.450583572185565).abs() < 1e-9);
    assert!((out[3] - out[0]).abs() < (out[1] - out[0]).abs());
    assert!(demo::convergence(&demo::spec(-1.0, 1.0, 0.0, 1.0, 0.2), &[]).is_err());
}

#[test]
fn fuzzy_values() {
    let v = demo::fuzzy(2.0, 4.0, 2.0).unwrap();
    assert!((v[0] - 5.0 / 6.0).abs() < 1e-12);
    assert!((v[1] - 1.75).abs() < 1e-12);
    assert!((v[2] - 35.0 / 24.0).abs() < 1e-12);
    assert_eq!(demo::membership(2.0, 4.0, 2.0, &[-2.0, 0.0, 2.0, 5.0]).unwrap(), [0.0, 0.5, 1.0, 0.0]);
    assert!(demo::fuzzy(0.0, 0.0, 0.0).is_err());
}

#[test]
fn dcf_curve() {
    let names = demo::dcf_companies().unwrap();
    assert_eq!(names, ["Facebook", "Sina Weibo", "Twitter", "VKontakte"]);
    let inputs = demo::dcf_inputs("Facebook").unwrap();
    let at_wacc = demo::dcf_sensitivity("Facebook", &[inputs[0]]).unwrap()[0];
    assert!((at_wacc / 585_618.0 - 1.0).abs() < 0.02);
    let curve = demo::dcf_sensitivity("Facebook", &[0.01, 0.05, 0.08, 0.12]).unwrap();
    assert!(curve[0].is_nan());
    assert!(curve[1] > curve[2] && curve[2] > curve[3]);
    assert!(demo::dcf_sensitivity("Pinterest", &[0.1]).is_err());
}
