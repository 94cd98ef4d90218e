//! Company valuation engine.
//!
//! Three method families share one data model:
//!
//! * [`dcf`]: free cash flow construction, discount rates, terminal value,
//!   enterprise, equity and liquidation values.
//! * [`comparables`]: peer multiples, leave-one-out averages, implied values
//!   and accuracy bands.
//! * [`realoptions`]: Black-Scholes, a CRR binomial lattice, Datar-Mathews
//!   Monte Carlo and the fuzzy pay-off method.
//!
//! [`ingest`] loads company files (and ships the bundled six-company corpus),
//! [`forecast`] extends statements over a horizon and [`reproduce`] recomputes
//! the published reference tables from the bundled inputs.

pub mod comparables;
pub mod dcf;
pub mod error;
pub mod forecast;
pub mod ingest;
pub mod model;
pub mod realoptions;
pub mod reference;
pub mod reproduce;

pub use error::{Result, ValuationError};
pub use model::{
    CashFlowForecast, CompanyProfile, DiscountInputs, FinancialStatement, Money, MoneyUnit,
};
