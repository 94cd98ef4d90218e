//! Discounted cash flow valuation.
//!
//! Flows are whole-year periods; period `t` is discounted by `(1 + rate)^t`.
//! The terminal value capitalises the first post-forecast flow with the
//! Gordon growth formula and is discounted with the last forecast period.

use serde::Serialize;

use crate::error::{Result, ValuationError};
use crate::model::{CashFlowForecast, CompanyProfile, DiscountInputs, FinancialStatement, Money};

/// Free cash flow to the firm: `EBIT(1 - t) + DA + ΔNWC + capex`, with
/// ΔNWC and capex carrying their own signs (outflows negative).
pub fn fcff(
    ebit: Money,
    tax_rate: f64,
    da: Money,
    delta_nwc: Money,
    capex: Money,
) -> Result<Money> {
    if !(0.0..1.0).contains(&tax_rate) {
        return Err(ValuationError::invalid(format!(
            "tax rate {tax_rate} outside [0, 1)"
        )));
    }
    let after_tax = ebit.scale(1.0 - tax_rate)?;
    Money::sum(&[after_tax, da, delta_nwc, capex])
}

/// Free cash flow to equity: `NI + DA + capex + ΔNWC + net borrowing`.
pub fn fcfe(
    ni: Money,
    da: Money,
    capex: Money,
    delta_nwc: Money,
    net_borrowing: Money,
) -> Result<Money> {
    Money::sum(&[ni, da, capex, delta_nwc, net_borrowing])
}

/// Cost of equity from the capital asset pricing model.
pub fn capm(risk_free: f64, beta: f64, premium: f64) -> f64 {
    risk_free + beta * premium
}

pub fn cost_of_equity(inputs: &DiscountInputs) -> f64 {
    capm(inputs.risk_free_rate, inputs.beta, inputs.market_risk_premium)
}

/// Weighted average cost of capital with the cost of equity from CAPM.
pub fn wacc(inputs: &DiscountInputs) -> Result<f64> {
    inputs.validate()?;
    let re = cost_of_equity(inputs);
    Ok(inputs.debt_rate * inputs.debt_weight * (1.0 - inputs.corporate_tax)
        + re * inputs.equity_weight)
}

/// Beta as `cov(asset, market) / var(market)` (population moments).
pub fn estimate_beta(asset_returns: &[f64], market_returns: &[f64]) -> Result<f64> {
    if asset_returns.len() != market_returns.len() {
        return Err(ValuationError::invalid(format!(
            "return series lengths differ ({} vs {})",
            asset_returns.len(),
            market_returns.len()
        )));
    }
    let n = asset_returns.len();
    if n < 3 {
        return Err(ValuationError::invalid(format!(
            "need at least 3 return observations, got {n}"
        )));
    }
    if asset_returns.iter().chain(market_returns).any(|r| !r.is_finite()) {
        return Err(ValuationError::NonFinite("return series".into()));
    }
    let nf = n as f64;
    let mean_a = asset_returns.iter().sum::<f64>() / nf;
    let mean_m = market_returns.iter().sum::<f64>() / nf;
    let (cov, var) = asset_returns
        .iter()
        .zip(market_returns)
        .fold((0.0, 0.0), |(c, v), (a, m)| {
            let dm = m - mean_m;
            (c + (a - mean_a) * dm, v + dm * dm)
        });
    let scale: f64 = market_returns.iter().map(|m| m * m).sum();
    if var <= f64::EPSILON * scale {
        return Err(ValuationError::ZeroDenominator("market return variance".into()));
    }
    Ok(cov / var)
}

/// Gordon growth value of the post-forecast period: `flow / (rate - growth)`.
pub fn terminal_value(post_flow: Money, rate: f64, growth: f64) -> Result<Money> {
    if !rate.is_finite() || !growth.is_finite() {
        return Err(ValuationError::NonFinite(format!("rate {rate}, growth {growth}")));
    }
    if rate <= growth {
        return Err(ValuationError::GordonDivergence { rate, growth });
    }
    post_flow.scale(1.0 / (rate - growth))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValuationResult {
    /// One present value per forecast period.
    pub discounted_flows: Vec<Money>,
    /// Terminal value at the end of the forecast horizon (undiscounted).
    pub terminal_value: Money,
    pub discounted_terminal: Money,
    pub enterprise_value: Money,
    pub discount_rate: f64,
    pub deviation_vs_actual: Option<f64>,
}

impl ValuationResult {
    pub fn with_actual(mut self, actual: Option<Money>) -> Result<Self> {
        self.deviation_vs_actual = match actual {
            Some(a) => Some(deviation(self.enterprise_value, a.convert(self.enterprise_value.unit()))?),
            None => None,
        };
        Ok(self)
    }
}

fn discount(forecast: &CashFlowForecast, rate: f64) -> Result<ValuationResult> {
    if !rate.is_finite() || rate <= -1.0 {
        return Err(ValuationError::invalid(format!("discount rate {rate} must exceed -100%")));
    }
    let tv = terminal_value(forecast.post_forecast_flow, rate, forecast.terminal_growth)?;
    let discounted_flows = forecast
        .flows
        .iter()
        .enumerate()
        .map(|(i, f)| f.scale((1.0 + rate).powi(i as i32 + 1).recip()))
        .collect::<Result<Vec<_>>>()?;
    let n = forecast.flows.len() as i32;
    let discounted_terminal = tv.scale((1.0 + rate).powi(n).recip())?;
    let enterprise_value = Money::sum(&discounted_flows)?.checked_add(&discounted_terminal)?;
    Ok(ValuationResult {
        discounted_flows,
        terminal_value: tv,
        discounted_terminal,
        enterprise_value,
        discount_rate: rate,
        deviation_vs_actual: None,
    })
}

/// Present value of forecast FCFF plus the discounted terminal value.
pub fn enterprise_value(forecast: &CashFlowForecast, rate: f64) -> Result<ValuationResult> {
    discount(forecast, rate)
}

/// Same discounting structure applied to FCFE at the cost of equity.
pub fn equity_value(fcfe_forecast: &CashFlowForecast, cost_of_equity: f64) -> Result<Money> {
    discount(fcfe_forecast, cost_of_equity).map(|r| r.enterprise_value)
}

/// Firm value as equity plus the market value of debt.
pub fn firm_value_from_equity(equity: Money, market_value_of_debt: Money) -> Result<Money> {
    equity.checked_add(&market_value_of_debt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiquidationInputs {
    /// Revalued total assets.
    pub total_assets_revalued: Money,
    pub obligations: Money,
    /// Discount for the urgency of the sale, in [0, 1).
    pub urgency_discount: f64,
    pub liquidation_costs: Money,
}

/// `(1 - urgency)(assets - obligations) - costs`. May be negative.
pub fn liquidation_value(inputs: &LiquidationInputs) -> Result<Money> {
    if !(0.0..1.0).contains(&inputs.urgency_discount) {
        return Err(ValuationError::invalid(format!(
            "urgency discount {} outside [0, 1)",
            inputs.urgency_discount
        )));
    }
    if inputs.liquidation_costs.is_negative() {
        return Err(ValuationError::invalid("liquidation costs must be >= 0"));
    }
    let net = inputs.total_assets_revalued.checked_sub(&inputs.obligations)?;
    net.scale(1.0 - inputs.urgency_discount)?
        .checked_sub(&inputs.liquidation_costs)
}

/// Relative deviation `estimated / actual - 1`.
pub fn deviation(estimated: Money, actual: Money) -> Result<f64> {
    if estimated.unit() != actual.unit() {
        return Err(ValuationError::UnitMismatch {
            left: estimated.unit(),
            right: actual.unit(),
        });
    }
    if actual.is_zero() {
        return Err(ValuationError::ZeroDenominator("actual value".into()));
    }
    Ok(estimated.to_f64() / actual.to_f64() - 1.0)
}

/// Effective tax rate `tax / EBIT` used when a statement gives tax as an
/// amount. Zero EBIT gives a zero rate.
pub fn effective_tax_rate(ebit: Money, tax: Money) -> Result<f64> {
    if ebit.is_zero() {
        return Ok(0.0);
    }
    Ok(tax.to_f64() / ebit.to_f64())
}

fn required(st: &FinancialStatement, value: Option<Money>, name: &str) -> Result<Money> {
    value.ok_or_else(|| {
        ValuationError::invalid(format!("{} statement lacks `{name}`", st.year))
    })
}

/// FCFF of one statement row, using the row's tax amount as an effective
/// rate. Missing DA or ΔNWC count as zero; EBIT, tax and capex are required.
pub fn statement_fcff(st: &FinancialStatement) -> Result<Money> {
    let ebit = required(st, st.ebit, "ebit")?;
    let tax = required(st, st.income_tax, "income_tax")?;
    let capex = required(st, st.capex, "capex")?;
    let zero = Money::zero(st.unit);
    let rate = effective_tax_rate(ebit, tax)?;
    // The rate form loses the exact tax amount when EBIT is negative
    // (rate outside [0, 1)); subtract the amount directly in that case.
    if (0.0..1.0).contains(&rate) {
        fcff(
            ebit,
            rate,
            st.depreciation_amortization.unwrap_or(zero),
            st.delta_nwc.unwrap_or(zero),
            capex,
        )
    } else {
        Money::sum(&[
            ebit.checked_sub(&tax)?,
            st.depreciation_amortization.unwrap_or(zero),
            st.delta_nwc.unwrap_or(zero),
            capex,
        ])
    }
}

/// FCFE of one statement row; missing DA, ΔNWC and net borrowing count as
/// zero.
pub fn statement_fcfe(st: &FinancialStatement) -> Result<Money> {
    let zero = Money::zero(st.unit);
    let ni = match st.net_income {
        Some(ni) => ni,
        None => required(st, st.ebit, "ebit")?.checked_sub(&required(st, st.income_tax, "income_tax")?)?,
    };
    fcfe(
        ni,
        st.depreciation_amortization.unwrap_or(zero),
        required(st, st.capex, "capex")?,
        st.delta_nwc.unwrap_or(zero),
        st.net_borrowing.unwrap_or(zero),
    )
}

fn forecast_from_rows(
    profile: &CompanyProfile,
    flow_of: impl Fn(&FinancialStatement) -> Result<Money>,
) -> Result<CashFlowForecast> {
    let rows: Vec<&FinancialStatement> = profile.forecast_rows().collect();
    if rows.len() < 2 {
        return Err(refusal(profile));
    }
    let growth = profile.terminal_growth.ok_or_else(|| ValuationError::Refused {
        company: profile.name.clone(),
        reason: "no terminal growth rate configured".into(),
    })?;
    let mut flows = rows.iter().map(|r| flow_of(r)).collect::<Result<Vec<_>>>()?;
    let post = flows.pop().expect("at least two rows");
    let base_year = rows[0].year - 1;
    CashFlowForecast::new(base_year, flows, post, growth)
}

fn refusal(profile: &CompanyProfile) -> ValuationError {
    let negative_ni = profile
        .latest_net_income()
        .is_some_and(|ni| ni.is_negative());
    let reason = if negative_ni {
        "insufficient history / negative net income".to_string()
    } else {
        "insufficient history / no forecast rows".to_string()
    };
    ValuationError::Refused {
        company: profile.name.clone(),
        reason,
    }
}

/// FCFF forecast built from a profile's forecast rows: all but the last
/// row are periods 1..n, the last row is the post-forecast period.
pub fn fcff_forecast(profile: &CompanyProfile) -> Result<CashFlowForecast> {
    forecast_from_rows(profile, statement_fcff)
}

pub fn fcfe_forecast(profile: &CompanyProfile) -> Result<CashFlowForecast> {
    forecast_from_rows(profile, statement_fcfe)
}

/// Full FCFF valuation of a company at its WACC.
#[derive(Debug, Clone, Serialize)]
pub struct CompanyValuation {
    pub company: String,
    pub unit: String,
    pub cost_of_equity: f64,
    pub wacc: f64,
    pub terminal_growth: f64,
    pub years: Vec<i32>,
    pub fcff: Vec<f64>,
    pub discounted_fcff: Vec<f64>,
    pub post_forecast_fcff: f64,
    pub terminal_value: f64,
    pub discounted_terminal: f64,
    pub enterprise_value: f64,
    pub enterprise_value_millions: f64,
    pub actual_value_millions: Option<f64>,
    pub deviation: Option<f64>,
}

pub fn value_company(profile: &CompanyProfile) -> Result<CompanyValuation> {
    let inputs = profile.discount_inputs.ok_or_else(|| {
        if profile.forecast_rows().next().is_none() {
            refusal(profile)
        } else {
            ValuationError::Refused {
                company: profile.name.clone(),
                reason: "no discount inputs".into(),
            }
        }
    })?;
    let forecast = fcff_forecast(profile)?;
    let rate = wacc(&inputs)?;
    let result = enterprise_value(&forecast, rate)?.with_actual(profile.actual_enterprise_value)?;
    let years = profile
        .forecast_rows()
        .map(|r| r.year)
        .take(forecast.flows.len())
        .collect();
    let millions = crate::model::MoneyUnit::MillionsUsd;
    Ok(CompanyValuation {
        company: profile.name.clone(),
        unit: profile.unit.to_string(),
        cost_of_equity: cost_of_equity(&inputs),
        wacc: rate,
        terminal_growth: forecast.terminal_growth,
        years,
        fcff: forecast.flows.iter().map(Money::to_f64).collect(),
        discounted_fcff: result.discounted_flows.iter().map(Money::to_f64).collect(),
        post_forecast_fcff: forecast.post_forecast_flow.to_f64(),
        terminal_value: result.terminal_value.to_f64(),
        discounted_terminal: result.discounted_terminal.to_f64(),
        enterprise_value: result.enterprise_value.to_f64(),
        enterprise_value_millions: result.enterprise_value.convert(millions).to_f64(),
        actual_value_millions: profile
            .actual_enterprise_value
            .map(|a| a.convert(millions).to_f64()),
        deviation: result.deviation_vs_actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MoneyUnit;
    use approx::assert_abs_diff_eq;

    const M: MoneyUnit = MoneyUnit::MillionsUsd;
    const K: MoneyUnit = MoneyUnit::ThousandsUsd;

    fn m(v: i64) -> Money {
        Money::from_int(v, M)
    }

    fn facebook_inputs() -> DiscountInputs {
        DiscountInputs {
            risk_free_rate: 0.0192,
            market_risk_premium: 0.0520,
            beta: 1.16,
            debt_rate: 0.0406,
            equity_weight: 0.8475,
            debt_weight: 0.1525,
            corporate_tax: 0.21,
        }
    }

    #[test]
    fn fcff_facebook_2020() {
        let v = fcff(m(39_293), 0.21, m(5_925), m(-8_256), m(-20_023)).unwrap();
        assert_abs_diff_eq!(v.to_f64(), 8_687.47, epsilon = 1e-6);
        assert!((v.to_f64() - 8_687.0).abs() <= 1.0);
    }

    #[test]
    fn fcff_twitter_2020_with_effective_rate() {
        let k = |v| Money::from_int(v, K);
        let rate = 119_818.0 / 586_151.0;
        let v = fcff(k(586_151), rate, k(527_655), k(-69_864), k(-550_873)).unwrap();
        assert!((v.to_f64() - 373_250.0).abs() <= 2.0, "{v}");
    }

    #[test]
    fn fcff_zero_and_unit_mismatch() {
        assert!(fcff(m(0), 0.21, m(0), m(0), m(0)).unwrap().is_zero());
        let mixed = fcff(m(1), 0.2, Money::from_int(1, K), m(0), m(0));
        assert!(matches!(mixed, Err(ValuationError::UnitMismatch { .. })));
    }

    #[test]
    fn fcfe_cases() {
        assert_eq!(fcfe(m(100), m(0), m(0), m(0), m(0)).unwrap(), m(100));
        // 100 + 10 - 30 - 5 + 20, summed by hand.
        assert_eq!(fcfe(m(100), m(10), m(-30), m(-5), m(20)).unwrap(), m(95));
        assert!(fcfe(m(0), m(0), m(0), m(0), m(0)).unwrap().is_zero());
    }

    #[test]
    fn capm_cases() {
        assert_abs_diff_eq!(capm(0.0192, 1.16, 0.0520), 0.0795, epsilon = 1e-4);
        assert!((capm(0.0624, 1.56, 0.0737) - 0.1770).abs() <= 5e-4);
        assert_eq!(capm(0.03, 0.0, 0.07), 0.03);
    }

    #[test]
    fn wacc_cases() {
        let fb = wacc(&facebook_inputs()).unwrap();
        assert!((fb - 0.072).abs() <= 0.001, "{fb}");
        let tw = DiscountInputs {
            beta: 0.78,
            equity_weight: 0.7076,
            debt_weight: 0.2924,
            ..facebook_inputs()
        };
        assert!((wacc(&tw).unwrap() - 0.052).abs() <= 0.001);
        let riskless = DiscountInputs {
            beta: 0.0,
            equity_weight: 1.0,
            debt_weight: 0.0,
            ..facebook_inputs()
        };
        assert_eq!(wacc(&riskless).unwrap(), 0.0192);
        let bad = DiscountInputs {
            debt_weight: 0.5,
            ..facebook_inputs()
        };
        assert!(wacc(&bad).is_err());
    }

    #[test]
    fn beta_cases() {
        let market = [0.01, -0.02, 0.015, 0.03];
        assert_abs_diff_eq!(estimate_beta(&market, &market).unwrap(), 1.0, epsilon = 1e-12);
        let doubled: Vec<f64> = market.iter().map(|r| 2.0 * r).collect();
        assert_abs_diff_eq!(estimate_beta(&doubled, &market).unwrap(), 2.0, epsilon = 1e-12);
        assert!(estimate_beta(&[0.1, 0.2, 0.3], &[0.05, 0.05, 0.05]).is_err());
        assert!(estimate_beta(&[0.1, 0.2], &[0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn beta_matches_hand_covariance() {
        // Independent oracle: means, then population moments written out.
        let a = [0.01, -0.02, 0.03];
        let mk = [0.02, -0.01, 0.02];
        let ma: f64 = (0.01 - 0.02 + 0.03) / 3.0;
        let mm: f64 = (0.02 - 0.01 + 0.02) / 3.0;
        let cov = ((0.01 - ma) * (0.02 - mm) + (-0.02 - ma) * (-0.01 - mm) + (0.03 - ma) * (0.02 - mm)) / 3.0;
        let var = ((0.02 - mm).powi(2) + (-0.01 - mm).powi(2) + (0.02 - mm).powi(2)) / 3.0;
        let expected = cov / var;
        assert_abs_diff_eq!(expected, 4.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(estimate_beta(&a, &mk).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn terminal_value_cases() {
        let tv = terminal_value(m(36_955), 0.0723, 0.021).unwrap();
        assert_abs_diff_eq!(tv.to_f64(), 36_955.0 / 0.0513, epsilon = 1e-6);
        assert!((tv.to_f64() - 720_370.0).abs() < 1.0);
        let gordon0 = terminal_value(m(500), 0.05, 0.0).unwrap();
        assert_abs_diff_eq!(gordon0.to_f64(), 10_000.0, epsilon = 1e-9);
        assert!(matches!(
            terminal_value(m(1), 0.05, 0.05),
            Err(ValuationError::GordonDivergence { .. })
        ));
    }

    #[test]
    fn enterprise_value_no_discount_no_terminal() {
        let f = CashFlowForecast::new(2019, vec![m(100)], m(0), -1.0).unwrap();
        let r = enterprise_value(&f, 0.0).unwrap();
        assert_eq!(r.enterprise_value.to_f64(), 100.0);
        assert!(r.discounted_terminal.is_zero());
    }

    #[test]
    fn enterprise_value_sums_parts() {
        let f = CashFlowForecast::new(2019, vec![m(10), m(20), m(30)], m(35), 0.02).unwrap();
        let r = enterprise_value(&f, 0.08).unwrap();
        let parts = Money::sum(&r.discounted_flows).unwrap().to_f64() + r.discounted_terminal.to_f64();
        assert_abs_diff_eq!(parts, r.enterprise_value.to_f64(), epsilon = 1e-6);
        assert_abs_diff_eq!(r.discounted_flows[0].to_f64(), 10.0 / 1.08, epsilon = 1e-9);
    }

    #[test]
    fn equity_value_cases() {
        let zero = CashFlowForecast::new(2019, vec![m(0); 3], m(0), 0.02).unwrap();
        assert!(equity_value(&zero, 0.1).unwrap().is_zero());
        let one = CashFlowForecast::new(2019, vec![m(110)], m(0), 0.0).unwrap();
        assert_abs_diff_eq!(equity_value(&one, 0.10).unwrap().to_f64(), 100.0, epsilon = 1e-9);
        let bridge = firm_value_from_equity(m(100), m(40)).unwrap();
        assert_eq!(bridge, m(140));
    }

    #[test]
    fn liquidation_cases() {
        let base = LiquidationInputs {
            total_assets_revalued: m(1000),
            obligations: m(400),
            urgency_discount: 0.0,
            liquidation_costs: m(0),
        };
        assert_eq!(liquidation_value(&base).unwrap().to_f64(), 600.0);
        let urgent = LiquidationInputs {
            urgency_discount: 0.25,
            liquidation_costs: m(50),
            ..base
        };
        // 0.75 * 600 - 50
        assert_eq!(liquidation_value(&urgent).unwrap().to_f64(), 400.0);
        let wash = LiquidationInputs {
            obligations: m(1000),
            liquidation_costs: m(30),
            urgency_discount: 0.4,
            ..base
        };
        assert_eq!(liquidation_value(&wash).unwrap().to_f64(), -30.0);
        let bad = LiquidationInputs {
            urgency_discount: 1.0,
            ..base
        };
        assert!(liquidation_value(&bad).is_err());
    }

    #[test]
    fn deviation_cases() {
        assert_abs_diff_eq!(deviation(m(585_618), m(584_350)).unwrap(), 0.0022, epsilon = 5e-5);
        assert_abs_diff_eq!(deviation(m(5_270), m(6_852)).unwrap(), -0.2309, epsilon = 5e-5);
        assert_eq!(deviation(m(77), m(77)).unwrap(), 0.0);
        assert!(deviation(m(1), m(0)).is_err());
    }
}
