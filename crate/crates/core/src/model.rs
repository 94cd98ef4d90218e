//! Domain types shared by every valuation method.
//!
//! Monetary amounts are decimal values tagged with a unit; rates are plain
//! fractions (`0.072`, not `7.2`).

use std::fmt;
use std::str::FromStr;

use rust_decimal::prelude::{FromPrimitive, ToPrimitive};
pub use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ValuationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoneyUnit {
    #[serde(rename = "thousands-USD")]
    ThousandsUsd,
    #[serde(rename = "millions-USD")]
    MillionsUsd,
}

impl MoneyUnit {
    /// Number of dollars one unit stands for, as a power of 1000.
    fn exponent(self) -> u32 {
        match self {
            MoneyUnit::ThousandsUsd => 1,
            MoneyUnit::MillionsUsd => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MoneyUnit::ThousandsUsd => "thousands-USD",
            MoneyUnit::MillionsUsd => "millions-USD",
        }
    }
}

impl fmt::Display for MoneyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MoneyUnit {
    type Err = ValuationError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "thousands-USD" => Ok(MoneyUnit::ThousandsUsd),
            "millions-USD" => Ok(MoneyUnit::MillionsUsd),
            other => Err(ValuationError::invalid(format!(
                "unknown money unit `{other}` (expected thousands-USD or millions-USD)"
            ))),
        }
    }
}

/// A decimal amount of US dollars expressed in thousands or millions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Money {
    amount: Decimal,
    unit: MoneyUnit,
}

impl Money {
    pub fn new(amount: Decimal, unit: MoneyUnit) -> Self {
        Money { amount, unit }
    }

    pub fn zero(unit: MoneyUnit) -> Self {
        Money::new(Decimal::ZERO, unit)
    }

    pub fn from_f64(amount: f64, unit: MoneyUnit) -> Result<Self> {
        if !amount.is_finite() {
            return Err(ValuationError::NonFinite(format!("{amount} {unit}")));
        }
        let amount = Decimal::from_f64(amount).ok_or_else(|| {
            ValuationError::invalid(format!("{amount} is out of decimal range"))
        })?;
        Ok(Money::new(amount, unit))
    }

    /// Convenience for literals: `Money::from_int(8687, MoneyUnit::MillionsUsd)`.
    pub fn from_int(amount: i64, unit: MoneyUnit) -> Self {
        Money::new(Decimal::from(amount), unit)
    }

    pub fn amount(&self) -> Decimal {
        self.amount
    }

    pub fn unit(&self) -> MoneyUnit {
        self.unit
    }

    pub fn to_f64(&self) -> f64 {
        self.amount.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.amount.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.amount.is_sign_negative() && !self.amount.is_zero()
    }

    /// Re-expresses the amount in `target`, scaling by an exact power of 1000.
    pub fn convert(&self, target: MoneyUnit) -> Money {
        convert_unit(*self, target)
    }

    fn same_unit(&self, other: &Money) -> Result<()> {
        if self.unit == other.unit {
            Ok(())
        } else {
            Err(ValuationError::UnitMismatch {
                left: self.unit,
                right: other.unit,
            })
        }
    }

    pub fn checked_add(&self, other: &Money) -> Result<Money> {
        self.same_unit(other)?;
        let amount = self
            .amount
            .checked_add(other.amount)
            .ok_or_else(|| ValuationError::invalid("decimal overflow in addition"))?;
        Ok(Money::new(amount, self.unit))
    }

    pub fn checked_sub(&self, other: &Money) -> Result<Money> {
        self.checked_add(&-*other)
    }

    /// Multiplies by a real factor (rates, discount factors). The product is
    /// formed in `f64` and stored back as a decimal.
    pub fn scale(&self, factor: f64) -> Result<Money> {
        Money::from_f64(self.to_f64() * factor, self.unit)
    }

    pub fn abs(&self) -> Money {
        Money::new(self.amount.abs(), self.unit)
    }

    /// Sums a sequence that must share one unit. Empty input is an error
    /// because the unit would be unknown.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Money>) -> Result<Money> {
        let mut iter = items.into_iter();
        let first = *iter
            .next()
            .ok_or_else(|| ValuationError::invalid("cannot sum an empty list of amounts"))?;
        iter.try_fold(first, |acc, m| acc.checked_add(m))
    }
}

impl std::ops::Neg for Money {
    type Output = Money;

    fn neg(self) -> Money {
        Money::new(-self.amount, self.unit)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.amount.normalize(), self.unit)
    }
}

/// Scales `m` into `target`. Decimal scaling by 1000 is exact, so a round
/// trip through another unit returns the original amount.
pub fn convert_unit(m: Money, target: MoneyUnit) -> Money {
    let from = m.unit.exponent();
    let to = target.exponent();
    let amount = if from == to {
        m.amount
    } else if from > to {
        m.amount * Decimal::from(1000u64.pow(from - to))
    } else {
        let mut a = m.amount;
        // Shifting the scale is exact where plain division could round.
        let shift = 3 * (to - from);
        if a.scale() + shift <= 28 {
            a.set_scale(a.scale() + shift).expect("scale checked above");
            a
        } else {
            m.amount / Decimal::from(1000u64.pow(to - from))
        }
    };
    Money::new(amount, target)
}

/// The statement columns that carry money, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LineItem {
    RevenueAdvertising,
    RevenueOther,
    CostPrice,
    Rnd,
    Marketing,
    Admin,
    OtherIncome,
    Ebit,
    IncomeTax,
    NetIncome,
    Da,
    Capex,
    DeltaNwc,
    NetBorrowing,
}

impl LineItem {
    pub const ALL: [LineItem; 14] = [
        LineItem::RevenueAdvertising,
        LineItem::RevenueOther,
        LineItem::CostPrice,
        LineItem::Rnd,
        LineItem::Marketing,
        LineItem::Admin,
        LineItem::OtherIncome,
        LineItem::Ebit,
        LineItem::IncomeTax,
        LineItem::NetIncome,
        LineItem::Da,
        LineItem::Capex,
        LineItem::DeltaNwc,
        LineItem::NetBorrowing,
    ];

    /// Column name in the company file schema.
    pub fn column(self) -> &'static str {
        match self {
            LineItem::RevenueAdvertising => "revenue_advertising",
            LineItem::RevenueOther => "revenue_other",
            LineItem::CostPrice => "cost_price",
            LineItem::Rnd => "rnd",
            LineItem::Marketing => "marketing",
            LineItem::Admin => "admin",
            LineItem::OtherIncome => "other_income",
            LineItem::Ebit => "ebit",
            LineItem::IncomeTax => "income_tax",
            LineItem::NetIncome => "net_income",
            LineItem::Da => "da",
            LineItem::Capex => "capex",
            LineItem::DeltaNwc => "delta_nwc",
            LineItem::NetBorrowing => "net_borrowing",
        }
    }

    /// EBIT, tax and net income are recomputed from components when
    /// forecasting rather than extrapolated.
    pub fn is_derived(self) -> bool {
        matches!(
            self,
            LineItem::Ebit | LineItem::IncomeTax | LineItem::NetIncome
        )
    }
}

impl FromStr for LineItem {
    type Err = ValuationError;

    fn from_str(s: &str) -> Result<Self> {
        LineItem::ALL
            .into_iter()
            .find(|item| item.column() == s.trim())
            .ok_or_else(|| ValuationError::invalid(format!("unknown line item `{s}`")))
    }
}

/// One fiscal year of income, cash-flow and user metrics.
///
/// Capex and change in net working capital keep the sign of the published
/// tables (outflows negative). Income tax is a positive expense amount.
#[derive(Debug, Clone, PartialEq)]
pub struct FinancialStatement {
    pub year: i32,
    pub unit: MoneyUnit,
    pub revenue_advertising: Option<Money>,
    pub revenue_other: Option<Money>,
    pub cost_price: Option<Money>,
    pub rnd_expense: Option<Money>,
    pub marketing_sales: Option<Money>,
    pub admin_expense: Option<Money>,
    pub other_income: Option<Money>,
    pub ebit: Option<Money>,
    pub income_tax: Option<Money>,
    pub net_income: Option<Money>,
    pub depreciation_amortization: Option<Money>,
    pub capex: Option<Money>,
    pub delta_nwc: Option<Money>,
    pub net_borrowing: Option<Money>,
    /// Daily active users, millions.
    pub dau: Option<f64>,
    /// Monthly active users, millions.
    pub mau: Option<f64>,
    pub forecast: bool,
}

impl FinancialStatement {
    pub fn empty(year: i32, unit: MoneyUnit) -> Self {
        FinancialStatement {
            year,
            unit,
            revenue_advertising: None,
            revenue_other: None,
            cost_price: None,
            rnd_expense: None,
            marketing_sales: None,
            admin_expense: None,
            other_income: None,
            ebit: None,
            income_tax: None,
            net_income: None,
            depreciation_amortization: None,
            capex: None,
            delta_nwc: None,
            net_borrowing: None,
            dau: None,
            mau: None,
            forecast: false,
        }
    }

    pub fn get(&self, item: LineItem) -> Option<Money> {
        match item {
            LineItem::RevenueAdvertising => self.revenue_advertising,
            LineItem::RevenueOther => self.revenue_other,
            LineItem::CostPrice => self.cost_price,
            LineItem::Rnd => self.rnd_expense,
            LineItem::Marketing => self.marketing_sales,
            LineItem::Admin => self.admin_expense,
            LineItem::OtherIncome => self.other_income,
            LineItem::Ebit => self.ebit,
            LineItem::IncomeTax => self.income_tax,
            LineItem::NetIncome => self.net_income,
            LineItem::Da => self.depreciation_amortization,
            LineItem::Capex => self.capex,
            LineItem::DeltaNwc => self.delta_nwc,
            LineItem::NetBorrowing => self.net_borrowing,
        }
    }

    pub fn set(&mut self, item: LineItem, value: Option<Money>) {
        let slot = match item {
            LineItem::RevenueAdvertising => &mut self.revenue_advertising,
            LineItem::RevenueOther => &mut self.revenue_other,
            LineItem::CostPrice => &mut self.cost_price,
            LineItem::Rnd => &mut self.rnd_expense,
            LineItem::Marketing => &mut self.marketing_sales,
            LineItem::Admin => &mut self.admin_expense,
            LineItem::OtherIncome => &mut self.other_income,
            LineItem::Ebit => &mut self.ebit,
            LineItem::IncomeTax => &mut self.income_tax,
            LineItem::NetIncome => &mut self.net_income,
            LineItem::Da => &mut self.depreciation_amortization,
            LineItem::Capex => &mut self.capex,
            LineItem::DeltaNwc => &mut self.delta_nwc,
            LineItem::NetBorrowing => &mut self.net_borrowing,
        };
        *slot = value;
    }

    /// Total revenue, if any revenue line is present.
    pub fn revenue(&self) -> Option<Money> {
        let parts: Vec<Money> = [self.revenue_advertising, self.revenue_other]
            .into_iter()
            .flatten()
            .collect();
        Money::sum(&parts).ok()
    }

    /// Checks the row invariants. On failure returns the offending column and
    /// a message; `tolerance` is in the statement's unit.
    pub fn validate(&self, tolerance: Decimal) -> std::result::Result<(), (String, String)> {
        for item in LineItem::ALL {
            if let Some(m) = self.get(item) {
                if m.unit() != self.unit {
                    return Err((
                        item.column().to_string(),
                        format!("unit {} differs from statement unit {}", m.unit(), self.unit),
                    ));
                }
            }
        }
        for (name, v) in [("dau", self.dau), ("mau", self.mau)] {
            if let Some(v) = v {
                if !v.is_finite() || v < 0.0 {
                    return Err((name.to_string(), format!("{name} must be >= 0, got {v}")));
                }
            }
        }
        if let (Some(dau), Some(mau)) = (self.dau, self.mau) {
            if mau < dau {
                return Err((
                    "mau".to_string(),
                    format!("mau ({mau}) is below dau ({dau})"),
                ));
            }
        }
        if let (Some(ebit), Some(tax), Some(ni)) = (self.ebit, self.income_tax, self.net_income) {
            let gap = (ni.amount() - (ebit.amount() - tax.amount())).abs();
            if gap > tolerance {
                return Err((
                    "net_income".to_string(),
                    format!(
                        "net income {} differs from ebit - tax = {} by {} (tolerance {})",
                        ni.amount(),
                        ebit.amount() - tax.amount(),
                        gap,
                        tolerance
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Inputs for the cost of capital.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscountInputs {
    pub risk_free_rate: f64,
    pub market_risk_premium: f64,
    pub beta: f64,
    pub debt_rate: f64,
    pub equity_weight: f64,
    pub debt_weight: f64,
    pub corporate_tax: f64,
}

impl DiscountInputs {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("risk_free_rate", self.risk_free_rate),
            ("market_risk_premium", self.market_risk_premium),
            ("beta", self.beta),
            ("debt_rate", self.debt_rate),
            ("equity_weight", self.equity_weight),
            ("debt_weight", self.debt_weight),
            ("corporate_tax", self.corporate_tax),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ValuationError::NonFinite(format!("{name} = {v}")));
            }
        }
        for (name, w) in [("equity_weight", self.equity_weight), ("debt_weight", self.debt_weight)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(ValuationError::invalid(format!("{name} {w} outside [0, 1]")));
            }
        }
        if ((self.equity_weight + self.debt_weight) - 1.0).abs() > 1e-9 {
            return Err(ValuationError::invalid(format!(
                "capital weights sum to {} (must be 1)",
                self.equity_weight + self.debt_weight
            )));
        }
        if !(0.0..1.0).contains(&self.corporate_tax) {
            return Err(ValuationError::invalid(format!(
                "corporate tax {} outside [0, 1)",
                self.corporate_tax
            )));
        }
        Ok(())
    }
}

/// Per-period cash flows plus the first post-forecast flow that feeds the
/// terminal value.
#[derive(Debug, Clone, PartialEq)]
pub struct CashFlowForecast {
    pub base_year: i32,
    pub flows: Vec<Money>,
    pub post_forecast_flow: Money,
    pub terminal_growth: f64,
}

impl CashFlowForecast {
    pub fn new(
        base_year: i32,
        flows: Vec<Money>,
        post_forecast_flow: Money,
        terminal_growth: f64,
    ) -> Result<Self> {
        if flows.is_empty() {
            return Err(ValuationError::invalid("cash flow forecast has no periods"));
        }
        if !terminal_growth.is_finite() {
            return Err(ValuationError::NonFinite(format!(
                "terminal growth {terminal_growth}"
            )));
        }
        let unit = post_forecast_flow.unit();
        if let Some(bad) = flows.iter().find(|f| f.unit() != unit) {
            return Err(ValuationError::UnitMismatch {
                left: unit,
                right: bad.unit(),
            });
        }
        Ok(CashFlowForecast {
            base_year,
            flows,
            post_forecast_flow,
            terminal_growth,
        })
    }

    pub fn unit(&self) -> MoneyUnit {
        self.post_forecast_flow.unit()
    }
}

/// Everything known about one company.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanyProfile {
    pub name: String,
    pub country: String,
    pub unit: MoneyUnit,
    /// Strictly increasing by year.
    pub statements: Vec<FinancialStatement>,
    pub discount_inputs: Option<DiscountInputs>,
    /// Long-run growth used for the terminal value.
    pub terminal_growth: Option<f64>,
    pub actual_enterprise_value: Option<Money>,
    pub ranking_place: Option<u32>,
    pub note: Option<String>,
}

impl CompanyProfile {
    /// Lowercase, underscore-separated key (`Sina Weibo` -> `sina_weibo`).
    pub fn slug(&self) -> String {
        slug(&self.name)
    }

    pub fn history(&self) -> impl Iterator<Item = &FinancialStatement> {
        self.statements.iter().filter(|s| !s.forecast)
    }

    pub fn forecast_rows(&self) -> impl Iterator<Item = &FinancialStatement> {
        self.statements.iter().filter(|s| s.forecast)
    }

    pub fn statement(&self, year: i32) -> Option<&FinancialStatement> {
        self.statements.iter().find(|s| s.year == year)
    }

    /// Most recent reported (non-forecast) net income.
    pub fn latest_net_income(&self) -> Option<Money> {
        self.history().filter_map(|s| s.net_income).last()
    }
}

pub fn slug(name: &str) -> String {
    name.trim()
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}
