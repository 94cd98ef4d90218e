use proptest::prelude::*;
use valuation_core::forecast::{
    average_growth_rate, extend, linear_trend, parse_assignments, project_statement,
    ForecastMethod,
};
use valuation_core::ingest::Dataset;
use valuation_core::model::LineItem;

proptest! {
    #[test]
    fn linear_trend_is_exact_on_affine_series(
        a in -1e4f64..1e4,
        b in -1e3f64..1e3,
        n in 2usize..12,
        h in 1usize..8,
    ) {
        let series: Vec<f64> = (0..n).map(|i| a + b * i as f64).collect();
        let out = linear_trend(&series, h).unwrap();
        for (k, v) in out.iter().enumerate() {
            let expected = a + b * (n + k) as f64;
            prop_assert!((v - expected).abs() <= 1e-6 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn linear_trend_commutes_with_scaling(
        series in proptest::collection::vec(-1e4f64..1e4, 2..10),
        k in 0.01f64..100.0,
        h in 1usize..6,
    ) {
        let base = linear_trend(&series, h).unwrap();
        let scaled_in: Vec<f64> = series.iter().map(|v| v * k).collect();
        let scaled = linear_trend(&scaled_in, h).unwrap();
        for (x, y) in base.iter().zip(&scaled) {
            prop_assert!((x * k - y).abs() <= 1e-7 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn geometric_growth_is_exact(
        start in 1.0f64..1e6,
        g in -0.5f64..0.5,
        h in 1usize..10,
    ) {
        let out = extend(&[start / 2.0, start], ForecastMethod::GeometricGrowth(g), h).unwrap();
        for (k, v) in out.iter().enumerate() {
            let expected = start * (1.0 + g).powi(k as i32 + 1);
            prop_assert!((v - expected).abs() <= 1e-9 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn average_growth_recovers_constant_rate(start in 1.0f64..1e5, g in -0.3f64..0.6, n in 2usize..8) {
        let series: Vec<f64> = (0..n).map(|i| start * (1.0 + g).powi(i as i32)).collect();
        prop_assert!((average_growth_rate(&series).unwrap() - g).abs() < 1e-9);
    }
}

#[test]
fn projected_ad_revenue_tracks_published_forecast() {
    // Project 2023 from the published 2020-2022 rows and compare with the
    // published 2023 figure.
    let data = Dataset::bundled().unwrap();
    let fb = data.company("facebook").unwrap();
    let history: Vec<_> = fb
        .statements
        .iter()
        .filter(|s| (2020..=2022).contains(&s.year))
        .cloned()
        .collect();
    let methods = parse_assignments("revenue_advertising = average\n").unwrap();
    let projected = project_statement(&history, &methods, 1, 0.21).unwrap();
    let got = projected[0].get(LineItem::RevenueAdvertising).unwrap().to_f64();
    let published = fb.statement(2023).unwrap().revenue_advertising.unwrap().to_f64();
    assert!((got / published - 1.0).abs() <= 0.15, "{got} vs {published}");
}

#[test]
fn income_lines_are_rebuilt() {
    let data = Dataset::bundled().unwrap();
    let fb = data.company("facebook").unwrap();
    let history: Vec<_> = fb.forecast_rows().cloned().collect();
    let methods = parse_assignments(
        "revenue_advertising = linear\nrevenue_other = linear\ncost_price = linear\nrnd = linear\nmarketing = linear\nadmin = linear\nother_income = linear\n",
    )
    .unwrap();
    let out = project_statement(&history, &methods, 2, 0.21).unwrap();
    for st in &out {
        let ebit = st.ebit.unwrap().to_f64();
        let tax = st.income_tax.unwrap().to_f64();
        assert!((tax - 0.21 * ebit).abs() < 1e-6 * ebit.abs().max(1.0));
        assert!((st.net_income.unwrap().to_f64() - (ebit - tax)).abs() < 1e-6 * ebit.abs().max(1.0));
    }
    assert!(parse_assignments("ebit = linear\n").is_err());
}
