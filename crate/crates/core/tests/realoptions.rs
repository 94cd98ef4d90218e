use proptest::prelude::*;
use valuation_core::realoptions::montecarlo::{PayoffModel, StrikeModel};
use valuation_core::realoptions::{
    binomial_call, black_scholes_call, datar_mathews_with_workers, fuzzy_payoff_rov, OptionSpec,
    ScenarioSet, TriangularFuzzyNumber,
};

fn atm() -> OptionSpec {
    OptionSpec {
        spot: 100.0,
        strike: 100.0,
        risk_free: 0.05,
        time_to_expiry: 1.0,
        volatility: 0.2,
    }
}

#[test]
fn reference_call_price() {
    assert!((black_scholes_call(&atm()).unwrap() - 10.450583572185565).abs() < 1e-9);
}

#[test]
fn lattice_converges_to_closed_form() {
    let bs = black_scholes_call(&atm()).unwrap();
    let err = |n| (binomial_call(&atm(), n).unwrap() - bs).abs();
    assert!(err(1000) < 0.05);
    assert!(err(4096) < err(64));
}

#[test]
fn scenario_file_parses_and_runs() {
    let text = r#"
payoff_discount_rate = 0.1
strike_discount_rate = 0.05
horizon = 3.0
paths = 20000
seed = 11

[payoff]
kind = "lognormal"
mean = 120.0
vol = 0.35

[strike]
kind = "discrete"
scenarios = [
  { value = 80.0, probability = 0.5 },
  { value = 100.0, probability = 0.5 },
]
"#;
    let s = ScenarioSet::from_toml(text).unwrap();
    assert!(matches!(s.payoff, PayoffModel::Lognormal { .. }));
    assert!(matches!(s.strike, StrikeModel::Discrete { .. }));
    let a = datar_mathews_with_workers(&s, 1).unwrap();
    let b = datar_mathews_with_workers(&s, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.value > 0.0 && a.std_error > 0.0);
}

#[test]
fn scenario_file_without_seed_uses_default() {
    let text = "payoff_discount_rate = 0.0\nstrike_discount_rate = 0.0\nhorizon = 1.0\npaths = 10\n[payoff]\nkind = \"lognormal\"\nmean = 1.0\nvol = 0.1\n[strike]\nkind = \"constant\"\nvalue = 1.0\n";
    assert_eq!(ScenarioSet::from_toml(text).unwrap().seed, 42);
}

proptest! {
    #[test]
    fn fuzzy_value_is_positively_homogeneous(
        a in -100.0f64..100.0,
        l in 0.1f64..50.0,
        r in 0.1f64..50.0,
        k in 0.01f64..100.0,
    ) {
        let base = fuzzy_payoff_rov(&TriangularFuzzyNumber::new(a, l, r).unwrap()).unwrap();
        let scaled = fuzzy_payoff_rov(&TriangularFuzzyNumber::new(k * a, k * l, k * r).unwrap()).unwrap();
        prop_assert!((scaled - k * base).abs() <= 1e-9 * (1.0 + (k * base).abs()));
    }

    #[test]
    fn fuzzy_value_at_the_extremes(a in 0.0f64..100.0, l in 0.0f64..1.0, r in 0.1f64..50.0) {
        // Entirely non-negative support: the possibilistic mean.
        let t = TriangularFuzzyNumber::new(a + l, l, r).unwrap();
        let mean = (a + l) + (r - l) / 6.0;
        prop_assert!((fuzzy_payoff_rov(&t).unwrap() - mean).abs() < 1e-9 * (1.0 + mean));
        // Entirely non-positive support: zero.
        let t = TriangularFuzzyNumber::new(-(a + r), l, r).unwrap();
        prop_assert_eq!(fuzzy_payoff_rov(&t).unwrap(), 0.0);
    }

    #[test]
    fn lattice_within_tenth_of_closed_form(
        s in 50.0f64..150.0,
        x in 50.0f64..150.0,
        r in 0.0f64..0.1,
        t in 0.1f64..3.0,
        v in 0.05f64..0.6,
    ) {
        let spec = OptionSpec { spot: s, strike: x, risk_free: r, time_to_expiry: t, volatility: v };
        let bs = black_scholes_call(&spec).unwrap();
        let bin = binomial_call(&spec, 2000).unwrap();
        prop_assert!((bs - bin).abs() < 0.1);
    }
}
