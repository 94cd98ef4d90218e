//! Browser bindings for the demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function in [`demo`] so the
//! logic can be tested natively.

use wasm_bindgen::prelude::*;

pub mod demo {
    use std::sync::OnceLock;

    use valuation_core::dcf::{enterprise_value, fcff_forecast, wacc};
    use valuation_core::ingest::Dataset;
    use valuation_core::model::MoneyUnit;
    use valuation_core::realoptions::fuzzy::fuzzy_payoff;
    use valuation_core::realoptions::{
        binomial_call, black_scholes_call, OptionSpec, TriangularFuzzyNumber,
    };

    fn dataset() -> Result<&'static Dataset, String> {
        static DATA: OnceLock<Result<Dataset, String>> = OnceLock::new();
        DATA.get_or_init(|| Dataset::bundled().map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn spec(spot: f64, strike: f64, rate: f64, time: f64, vol: f64) -> OptionSpec {
        OptionSpec {
            spot,
            strike,
            risk_free: rate,
            time_to_expiry: time,
            volatility: vol,
        }
    }

    /// Closed-form price followed by one lattice price per step count.
    pub fn convergence(spec: &OptionSpec, steps: &[u32]) -> Result<Vec<f64>, String> {
        let mut out = vec![black_scholes_call(spec).map_err(|e| e.to_string())?];
        for &n in steps {
            out.push(binomial_call(spec, n as usize).map_err(|e| e.to_string())?);
        }
        Ok(out)
    }

    /// `[positive area ratio, positive mean, value]`.
    pub fn fuzzy(peak: f64, left: f64, right: f64) -> Result<Vec<f64>, String> {
        let t = TriangularFuzzyNumber::new(peak, left, right).map_err(|e| e.to_string())?;
        let p = fuzzy_payoff(&t).map_err(|e| e.to_string())?;
        Ok(vec![p.positive_area_ratio, p.positive_mean, p.value])
    }

    pub fn membership(peak: f64, left: f64, right: f64, xs: &[f64]) -> Result<Vec<f64>, String> {
        let t = TriangularFuzzyNumber::new(peak, left, right).map_err(|e| e.to_string())?;
        Ok(xs.iter().map(|&x| t.membership(x)).collect())
    }

    /// Companies with a full discounted cash flow setup.
    pub fn dcf_companies() -> Result<Vec<String>, String> {
        Ok(dataset()?
            .companies
            .iter()
            .filter(|c| c.discount_inputs.is_some() && fcff_forecast(c).is_ok())
            .map(|c| c.name.clone())
            .collect())
    }

    /// `[WACC, terminal growth, actual value in millions of USD or NaN]`.
    pub fn dcf_inputs(company: &str) -> Result<Vec<f64>, String> {
        let p = dataset()?.company(company).map_err(|e| e.to_string())?;
        let inputs = p.discount_inputs.ok_or("no discount inputs")?;
        let f = fcff_forecast(p).map_err(|e| e.to_string())?;
        let actual = p
            .actual_enterprise_value
            .map(|m| m.convert(MoneyUnit::MillionsUsd).to_f64())
            .unwrap_or(f64::NAN);
        Ok(vec![wacc(&inputs).map_err(|e| e.to_string())?, f.terminal_growth, actual])
    }

    /// Enterprise value in millions of USD at each discount rate; NaN where
    /// the rate does not exceed the terminal growth.
    pub fn dcf_sensitivity(company: &str, rates: &[f64]) -> Result<Vec<f64>, String> {
        let p = dataset()?.company(company).map_err(|e| e.to_string())?;
        let f = fcff_forecast(p).map_err(|e| e.to_string())?;
        Ok(rates
            .iter()
            .map(|&r| {
                enterprise_value(&f, r)
                    .map(|v| v.enterprise_value.convert(MoneyUnit::MillionsUsd).to_f64())
                    .unwrap_or(f64::NAN)
            })
            .collect())
    }
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
pub fn option_convergence(
    spot: f64,
    strike: f64,
    rate: f64,
    time: f64,
    vol: f64,
    steps: Vec<u32>,
) -> Result<Vec<f64>, JsError> {
    demo::convergence(&demo::spec(spot, strike, rate, time, vol), &steps).map_err(js)
}

#[wasm_bindgen]
pub fn fuzzy_payoff(peak: f64, left: f64, right: f64) -> Result<Vec<f64>, JsError> {
    demo::fuzzy(peak, left, right).map_err(js)
}

#[wasm_bindgen]
pub fn fuzzy_membership(peak: f64, left: f64, right: f64, xs: Vec<f64>) -> Result<Vec<f64>, JsError> {
    demo::membership(peak, left, right, &xs).map_err(js)
}

#[wasm_bindgen]
pub fn dcf_companies() -> Result<Vec<String>, JsError> {
    demo::dcf_companies().map_err(js)
}

#[wasm_bindgen]
pub fn dcf_inputs(company: &str) -> Result<Vec<f64>, JsError> {
    demo::dcf_inputs(company).map_err(js)
}

#[wasm_bindgen]
pub fn dcf_sensitivity(company: &str, rates: Vec<f64>) -> Result<Vec<f64>, JsError> {
    demo::dcf_sensitivity(company, &rates).map_err(js)
}
