//! Datar-Mathews Monte Carlo.
//!
//! Every path owns its own ChaCha8 stream (`seed`, stream = path index), so a
//! path's draws do not depend on which worker evaluates it. Paths are grouped
//! into fixed-size blocks; block statistics are merged in block order, which
//! makes the estimate bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ValuationError};

/// Seed used when a scenario file does not set one.
pub const DEFAULT_SEED: u64 = 42;

const BLOCK: u64 = 8192;
const PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub value: f64,
    pub probability: f64,
}

/// Distribution of the operating profit `S_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PayoffModel {
    /// Lognormal with the given mean and total (not annualised) volatility.
    Lognormal { mean: f64, vol: f64 },
    Discrete { scenarios: Vec<Scenario> },
}

/// Distribution of the launch cost `X_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrikeModel {
    Constant { value: f64 },
    Discrete { scenarios: Vec<Scenario> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub payoff: PayoffModel,
    pub strike: StrikeModel,
    pub payoff_discount_rate: f64,
    pub strike_discount_rate: f64,
    pub horizon: f64,
    pub paths: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub paths: u64,
    pub seed: u64,
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ValuationError::NonFinite(format!("{name} = {v}")))
    }
}

fn check_scenarios(name: &str, rows: &[Scenario]) -> Result<()> {
    if rows.is_empty() {
        return Err(ValuationError::invalid(format!("{name}: no scenarios")));
    }
    let mut total = 0.0;
    for r in rows {
        finite(name, r.value)?;
        finite(name, r.probability)?;
        if r.probability < 0.0 {
            return Err(ValuationError::InvalidProbability(r.probability));
        }
        total += r.probability;
    }
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(ValuationError::invalid(format!(
            "{name}: probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

fn pick(rows: &[Scenario], u: f64) -> f64 {
    let mut acc = 0.0;
    for r in rows {
        acc += r.probability;
        if u < acc {
            return r.value;
        }
    }
    rows[rows.len() - 1].value
}

impl ScenarioSet {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: ScenarioSet = toml::from_str(text).map_err(|e| ValuationError::Parse {
            source_name: "scenario set".into(),
            line: 0,
            message: e.to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario set serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(ValuationError::invalid("paths must be >= 1"));
        }
        finite("payoff_discount_rate", self.payoff_discount_rate)?;
        finite("strike_discount_rate", self.strike_discount_rate)?;
        finite("horizon", self.horizon)?;
        if self.horizon < 0.0 {
            return Err(ValuationError::invalid("horizon must be >= 0"));
        }
        match &self.payoff {
            PayoffModel::Lognormal { mean, vol } => {
                finite("payoff mean", *mean)?;
                finite("payoff vol", *vol)?;
                if *mean < 0.0 || *vol < 0.0 {
                    return Err(ValuationError::invalid(
                        "lognormal mean and vol must be >= 0",
                    ));
                }
            }
            PayoffModel::Discrete { scenarios } => check_scenarios("payoff", scenarios)?,
        }
        match &self.strike {
            StrikeModel::Constant { value } => finite("strike", *value)?,
            StrikeModel::Discrete { scenarios } => check_scenarios("strike", scenarios)?,
        }
        Ok(())
    }

    fn path_payoff(&self, index: u64, payoff_df: f64, strike_df: f64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let s = match &self.payoff {
            PayoffModel::Lognormal { mean, vol } => {
                let z: f64 = rng.sample(StandardNormal);
                mean * (-0.5 * vol * vol + vol * z).exp()
            }
            PayoffModel::Discrete { scenarios } => pick(scenarios, rng.gen::<f64>()),
        };
        let x = match &self.strike {
            StrikeModel::Constant { value } => *value,
            StrikeModel::Discrete { scenarios } => pick(scenarios, rng.gen::<f64>()),
        };
        (s * payoff_df - x * strike_df).max(0.0)
    }
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * (other.n as f64 / n as f64),
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64),
        }
    }
}

fn run_block(s: &ScenarioSet, block: u64, payoff_df: f64, strike_df: f64) -> Moments {
    let start = block * BLOCK;
    let end = (start + BLOCK).min(s.paths);
    let mut m = Moments::default();
    for i in start..end {
        m.push(s.path_payoff(i, payoff_df, strike_df));
    }
    m
}

#[cfg(feature = "parallel")]
fn run_blocks(s: &ScenarioSet, blocks: u64, workers: usize, pdf: f64, sdf: f64) -> Result<Vec<Moments>> {
    use rayon::prelude::*;
    if workers <= 1 {
        return Ok((0..blocks).map(|b| run_block(s, b, pdf, sdf)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ValuationError::invalid(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(s, b, pdf, sdf))
            .collect()
    }))
}

#[cfg(not(feature = "parallel"))]
fn run_blocks(s: &ScenarioSet, blocks: u64, _workers: usize, pdf: f64, sdf: f64) -> Result<Vec<Moments>> {
    Ok((0..blocks).map(|b| run_block(s, b, pdf, sdf)).collect())
}

/// Estimate using all available cores.
pub fn datar_mathews(s: &ScenarioSet) -> Result<McEstimate> {
    #[cfg(feature = "parallel")]
    let workers = rayon::current_num_threads();
    #[cfg(not(feature = "parallel"))]
    let workers = 1;
    datar_mathews_with_workers(s, workers)
}

/// Estimate of `E[max(S_T e^{-μT} - X_T e^{-rT}, 0)]` and its standard
/// error. With a single path the standard error is reported as 0.
pub fn datar_mathews_with_workers(s: &ScenarioSet, workers: usize) -> Result<McEstimate> {
    s.validate()?;
    let payoff_df = (-s.payoff_discount_rate * s.horizon).exp();
    let strike_df = (-s.strike_discount_rate * s.horizon).exp();
    let blocks = s.paths.div_ceil(BLOCK);
    let total = run_blocks(s, blocks, workers, payoff_df, strike_df)?
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    let std_error = if total.n > 1 {
        (total.m2 / (total.n - 1) as f64 / total.n as f64).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        value: total.mean,
        std_error,
        paths: s.paths,
        seed: s.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realoptions::{black_scholes_call, OptionSpec};

    fn lognormal(paths: u64, seed: u64) -> ScenarioSet {
        ScenarioSet {
            payoff: PayoffModel::Lognormal {
                mean: 100.0 * 0.05f64.exp(),
                vol: 0.2,
            },
            strike: StrikeModel::Constant { value: 100.0 },
            payoff_discount_rate: 0.05,
            strike_discount_rate: 0.05,
            horizon: 1.0,
            paths,
            seed,
        }
    }

    #[test]
    fn degenerate_distribution_is_exact() {
        let s = ScenarioSet {
            payoff: PayoffModel::Lognormal { mean: 150.0, vol: 0.0 },
            strike: StrikeModel::Constant { value: 100.0 },
            payoff_discount_rate: 0.1,
            strike_discount_rate: 0.03,
            horizon: 2.0,
            paths: 20_000,
            seed: 1,
        };
        let e = datar_mathews(&s).unwrap();
        let expected = 150.0 * (-0.2f64).exp() - 100.0 * (-0.06f64).exp();
        assert_eq!(e.value, expected);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn never_exercised_is_zero() {
        let s = ScenarioSet {
            payoff: PayoffModel::Discrete {
                scenarios: vec![
                    Scenario { value: 50.0, probability: 0.3 },
                    Scenario { value: 80.0, probability: 0.7 },
                ],
            },
            strike: StrikeModel::Constant { value: 100.0 },
            payoff_discount_rate: 0.05,
            strike_discount_rate: 0.05,
            horizon: 1.0,
            paths: 5_000,
            seed: 9,
        };
        assert_eq!(datar_mathews(&s).unwrap().value, 0.0);
    }

    #[test]
    fn discrete_mean_close_to_expectation() {
        let s = ScenarioSet {
            payoff: PayoffModel::Discrete {
                scenarios: vec![
                    Scenario { value: 120.0, probability: 0.25 },
                    Scenario { value: 90.0, probability: 0.75 },
                ],
            },
            strike: StrikeModel::Discrete {
                scenarios: vec![
                    Scenario { value: 100.0, probability: 0.5 },
                    Scenario { value: 110.0, probability: 0.5 },
                ],
            },
            payoff_discount_rate: 0.0,
            strike_discount_rate: 0.0,
            horizon: 1.0,
            paths: 200_000,
            seed: 5,
        };
        // only S=120 pays: 0.25 * (0.5*20 + 0.5*10)
        let e = datar_mathews(&s).unwrap();
        assert!((e.value - 3.75).abs() < 4.0 * e.std_error);
    }

    #[test]
    fn zero_paths_rejected() {
        assert!(datar_mathews(&lognormal(0, 1)).is_err());
    }

    #[test]
    fn bad_probabilities_rejected() {
        let mut s = lognormal(10, 1);
        s.strike = StrikeModel::Discrete {
            scenarios: vec![Scenario { value: 1.0, probability: 0.9 }],
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let s = lognormal(50_000, 42);
        let one = datar_mathews_with_workers(&s, 1).unwrap();
        let four = datar_mathews_with_workers(&s, 4).unwrap();
        assert_eq!(one.value.to_bits(), four.value.to_bits());
        assert_eq!(one.std_error.to_bits(), four.std_error.to_bits());
        assert_ne!(one.value, datar_mathews_with_workers(&lognormal(50_000, 43), 1).unwrap().value);
    }

    #[test]
    fn agrees_with_black_scholes() {
        let s = lognormal(200_000, 7);
        let e = datar_mathews(&s).unwrap();
        let bs = black_scholes_call(&OptionSpec {
            spot: 100.0,
            strike: 100.0,
            risk_free: 0.05,
            time_to_expiry: 1.0,
            volatility: 0.2,
        })
        .unwrap();
        assert!((e.value - bs).abs() < 3.0 * e.std_error);
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
payoff_discount_rate = 0.05
strike_discount_rate = 0.05
horizon = 1.0
paths = 1000
seed = 42

[payoff]
kind = "discrete"
scenarios = [
  { value = 120.0, probability = 0.4 },
  { value = 80.0, probability = 0.6 },
]

[strike]
kind = "constant"
value = 100.0
"#;
        let s = ScenarioSet::from_toml(text).unwrap();
        assert_eq!(s.paths, 1000);
        assert_eq!(ScenarioSet::from_toml(&s.to_toml()).unwrap(), s);
    }
}
