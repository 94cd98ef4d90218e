//! Real-option pricing: closed-form Black-Scholes, a CRR binomial lattice,
//! Datar-Mathews Monte Carlo and the fuzzy pay-off method.

mod binomial;
mod black_scholes;
pub mod fuzzy;
pub mod montecarlo;
mod normal;

pub use binomial::binomial_call;
pub use black_scholes::{black_scholes_call, OptionSpec};
pub use fuzzy::{fuzzy_payoff_rov, FuzzyPayoff, TriangularFuzzyNumber};
pub use montecarlo::{datar_mathews, datar_mathews_with_workers, McEstimate, ScenarioSet, DEFAULT_SEED};
pub use normal::{normal_cdf, normal_pdf};
