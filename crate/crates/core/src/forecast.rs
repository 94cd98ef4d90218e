//! Line-item extrapolation over a forecast horizon.
//!
//! Each projected item is extended on its own (geometric growth, historical
//! average growth or a least-squares trend). EBIT, income tax and net income
//! are then rebuilt from the projected components every period.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Result, ValuationError};
use crate::model::{FinancialStatement, LineItem, Money};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForecastMethod {
    /// `v_{n+k} = v_n (1 + rate)^k`
    GeometricGrowth(f64),
    /// Geometric growth at the historical average rate.
    HistoricalAverageGrowth,
    /// Ordinary least squares on the time index.
    LinearTrend,
}

impl ForecastMethod {
    pub fn validate(&self) -> Result<()> {
        if let ForecastMethod::GeometricGrowth(g) = self {
            if !g.is_finite() || *g <= -1.0 {
                return Err(ValuationError::invalid(format!(
                    "geometric growth rate {g} must be finite and > -1"
                )));
            }
        }
        Ok(())
    }
}

impl FromStr for ForecastMethod {
    type Err = ValuationError;

    /// `geometric:0.05`, `average` or `linear`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s, None),
        };
        let method = match (name, param) {
            ("geometric", Some(p)) => ForecastMethod::GeometricGrowth(
                p.parse()
                    .map_err(|_| ValuationError::invalid(format!("bad growth rate `{p}`")))?,
            ),
            ("geometric", None) => {
                return Err(ValuationError::invalid("geometric needs a rate, e.g. geometric:0.05"))
            }
            ("average", None) => ForecastMethod::HistoricalAverageGrowth,
            ("linear", None) => ForecastMethod::LinearTrend,
            _ => return Err(ValuationError::invalid(format!("unknown forecast method `{s}`"))),
        };
        method.validate()?;
        Ok(method)
    }
}

/// Mean year-over-year growth: `(last / first)^(1/(n-1)) - 1`, the
/// geometric mean of the ratios.
pub fn average_growth_rate(series: &[f64]) -> Result<f64> {
    if series.len() < 2 {
        return Err(ValuationError::invalid(format!(
            "growth needs at least 2 observations, got {}",
            series.len()
        )));
    }
    if let Some(bad) = series.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(ValuationError::invalid(format!(
            "growth is undefined for non-positive value {bad}"
        )));
    }
    let periods = (series.len() - 1) as f64;
    let log_ratio = series[series.len() - 1].ln() - series[0].ln();
    Ok((log_ratio / periods).exp_m1())
}

/// Least-squares line through `(1, s_1) .. (n, s_n)`, evaluated at
/// `n+1 .. n+horizon`.
pub fn linear_trend(series: &[f64], horizon: usize) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(ValuationError::invalid(format!(
            "trend needs at least 2 observations, got {}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mean_x = (n + 1.0) / 2.0;
    let mean_y = series.iter().sum::<f64>() / n;
    let (sxy, sxx) = series.iter().enumerate().fold((0.0, 0.0), |(sxy, sxx), (i, y)| {
        let dx = (i + 1) as f64 - mean_x;
        (sxy + dx * (y - mean_y), sxx + dx * dx)
    });
    let slope = sxy / sxx;
    Ok((1..=horizon)
        .map(|k| mean_y + slope * (n + k as f64 - mean_x))
        .collect())
}

/// Extends one series by `horizon` values.
pub fn extend(series: &[f64], method: ForecastMethod, horizon: usize) -> Result<Vec<f64>> {
    method.validate()?;
    if series.len() < 2 {
        return Err(ValuationError::invalid(format!(
            "need at least 2 observations, got {}",
            series.len()
        )));
    }
    let last = series[series.len() - 1];
    let grow = |g: f64| (1..=horizon).map(|k| last * (1.0 + g).powi(k as i32)).collect();
    match method {
        ForecastMethod::GeometricGrowth(g) => Ok(grow(g)),
        ForecastMethod::HistoricalAverageGrowth => Ok(grow(average_growth_rate(series)?)),
        ForecastMethod::LinearTrend => linear_trend(series, horizon),
    }
}

/// What can be projected: money line items plus the two user counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ForecastItem {
    Money(LineItem),
    Dau,
    Mau,
}

impl FromStr for ForecastItem {
    type Err = ValuationError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dau" => Ok(ForecastItem::Dau),
            "mau" => Ok(ForecastItem::Mau),
            other => {
                let item = LineItem::from_str(other)?;
                if item.is_derived() {
                    return Err(ValuationError::invalid(format!(
                        "`{other}` is derived from other items and cannot be assigned a method"
                    )));
                }
                Ok(ForecastItem::Money(item))
            }
        }
    }
}

impl std::fmt::Display for ForecastItem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ForecastItem::Money(li) => f.write_str(li.column()),
            ForecastItem::Dau => f.write_str("dau"),
            ForecastItem::Mau => f.write_str("mau"),
        }
    }
}

pub type MethodAssignment = BTreeMap<ForecastItem, ForecastMethod>;

/// Parses `line_item = method[:parameter]` lines. Blank lines and `#`
/// comments are skipped.
pub fn parse_assignments(text: &str) -> Result<MethodAssignment> {
    let mut out = MethodAssignment::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let wrap = |e: ValuationError| ValuationError::Parse {
            source_name: "forecast config".into(),
            line: idx + 1,
            message: e.to_string(),
        };
        let (key, value) = line.split_once('=').ok_or_else(|| {
            wrap(ValuationError::invalid(format!("expected `item = method`, got `{line}`")))
        })?;
        let item = ForecastItem::from_str(key).map_err(wrap)?;
        let method = ForecastMethod::from_str(value).map_err(wrap)?;
        if out.insert(item, method).is_some() {
            return Err(wrap(ValuationError::invalid(format!(
                "`{}` assigned twice",
                key.trim()
            ))));
        }
    }
    Ok(out)
}

/// Statutory corporate tax rate for the countries in the bundled corpus.
pub fn statutory_tax_rate(country: &str) -> Option<f64> {
    match country.trim().to_lowercase().as_str() {
        "usa" | "us" | "united states" => Some(0.21),
        "china" => Some(0.25),
        "russia" => Some(0.20),
        _ => None,
    }
}

fn history_of(history: &[FinancialStatement], item: ForecastItem) -> Vec<f64> {
    history
        .iter()
        .filter_map(|s| match item {
            ForecastItem::Money(li) => s.get(li).map(|m| m.to_f64()),
            ForecastItem::Dau => s.dau,
            ForecastItem::Mau => s.mau,
        })
        .collect()
}

/// Projects `horizon` statements after the last historical one.
///
/// Unassigned items stay null. EBIT is rebuilt as revenue minus operating
/// costs plus other income, tax as `tax_rate × EBIT` and net income as
/// `EBIT - tax`.
pub fn project_statement(
    history: &[FinancialStatement],
    methods: &MethodAssignment,
    horizon: usize,
    tax_rate: f64,
) -> Result<Vec<FinancialStatement>> {
    if horizon == 0 {
        return Ok(Vec::new());
    }
    let last = history
        .last()
        .ok_or_else(|| ValuationError::invalid("empty history"))?;
    if !(0.0..1.0).contains(&tax_rate) {
        return Err(ValuationError::invalid(format!("tax rate {tax_rate} outside [0, 1)")));
    }
    let unit = last.unit;
    let mut out: Vec<FinancialStatement> = (1..=horizon)
        .map(|k| {
            let mut st = FinancialStatement::empty(last.year + k as i32, unit);
            st.forecast = true;
            st
        })
        .collect();

    for (&item, &method) in methods {
        let series = history_of(history, item);
        if series.len() < 2 {
            return Err(ValuationError::invalid(format!(
                "`{item}` has {} historical observations (need 2)",
                series.len()
            )));
        }
        let projected = extend(&series, method, horizon)?;
        for (st, v) in out.iter_mut().zip(projected) {
            match item {
                ForecastItem::Money(li) => st.set(li, Some(Money::from_f64(v, unit)?)),
                ForecastItem::Dau => st.dau = Some(v),
                ForecastItem::Mau => st.mau = Some(v),
            }
        }
    }

    let has_income_items = methods.keys().any(|k| {
        matches!(
            k,
            ForecastItem::Money(
                LineItem::RevenueAdvertising
                    | LineItem::RevenueOther
                    | LineItem::CostPrice
                    | LineItem::Rnd
                    | LineItem::Marketing
                    | LineItem::Admin
                    | LineItem::OtherIncome
            )
        )
    });
    if has_income_items {
        for st in &mut out {
            let val = |m: Option<Money>| m.map(|m| m.to_f64()).unwrap_or(0.0);
            let ebit = val(st.revenue_advertising) + val(st.revenue_other) - val(st.cost_price)
                - val(st.rnd_expense)
                - val(st.marketing_sales)
                - val(st.admin_expense)
                + val(st.other_income);
            let tax = ebit * tax_rate;
            st.ebit = Some(Money::from_f64(ebit, unit)?);
            st.income_tax = Some(Money::from_f64(tax, unit)?);
            st.net_income = Some(Money::from_f64(ebit - tax, unit)?);
        }
    }
    Ok(out)
}
