use serde::{Deserialize, Serialize};

use super::normal::normal_cdf;
use crate::error::{Result, ValuationError};

/// European call inputs. Rates and volatility are annual fractions, time is
/// in years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub spot: f64,
    pub strike: f64,
    pub risk_free: f64,
    pub time_to_expiry: f64,
    pub volatility: f64,
}

impl OptionSpec {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("spot", self.spot),
            ("strike", self.strike),
            ("risk_free", self.risk_free),
            ("time_to_expiry", self.time_to_expiry),
            ("volatility", self.volatility),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(ValuationError::NonFinite(format!("{name} = {v}")));
            }
        }
        for (name, v) in [
            ("spot", self.spot),
            ("strike", self.strike),
            ("time_to_expiry", self.time_to_expiry),
            ("volatility", self.volatility),
        ] {
            if v < 0.0 {
                return Err(ValuationError::invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub(crate) fn discounted_strike(&self) -> f64 {
        self.strike * (-self.risk_free * self.time_to_expiry).exp()
    }
}

/// Black-Scholes price of a European call.
///
/// Boundaries follow by continuity: a zero strike is worth the spot, zero
/// time gives `max(S - X, 0)` and zero volatility gives
/// `max(S - X e^{-rT}, 0)`.
pub fn black_scholes_call(spec: &OptionSpec) -> Result<f64> {
    spec.validate()?;
    let OptionSpec {
        spot: s,
        strike: x,
        time_to_expiry: t,
        volatility: sigma,
        ..
    } = *spec;
    if x == 0.0 {
        return Ok(s);
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if t == 0.0 {
        return Ok((s - x).max(0.0));
    }
    let pv_strike = spec.discounted_strike();
    if sigma == 0.0 {
        return Ok((s - pv_strike).max(0.0));
    }
    let vol_sqrt_t = sigma * t.sqrt();
    let d1 = ((s / x).ln() + (spec.risk_free + 0.5 * sigma * sigma) * t) / vol_sqrt_t;
    let d2 = d1 - vol_sqrt_t;
    Ok((s * normal_cdf(d1) - pv_strike * normal_cdf(d2)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn atm() -> OptionSpec {
        OptionSpec {
            spot: 100.0,
            strike: 100.0,
            risk_free: 0.05,
            time_to_expiry: 1.0,
            volatility: 0.2,
        }
    }

    /// Risk-neutral expectation of the payoff by composite Simpson's rule
    /// over the standard normal variable.
    fn payoff_quadrature(spec: &OptionSpec) -> f64 {
        let OptionSpec { spot, strike, risk_free: r, time_to_expiry: t, volatility: v } = *spec;
        let (a, b, n) = (-12.0, 12.0, 200_000);
        let h = (b - a) / n as f64;
        let f = |z: f64| {
            let st = spot * ((r - 0.5 * v * v) * t + v * t.sqrt() * z).exp();
            (st - strike).max(0.0) * (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
        };
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        (-r * t).exp() * s * h / 3.0
    }

    /// European CRR price as a closed binomial sum, evaluated in log space.
    fn crr_sum(spec: &OptionSpec, n: u64) -> f64 {
        let dt = spec.time_to_expiry / n as f64;
        let u = (spec.volatility * dt.sqrt()).exp();
        let d = 1.0 / u;
        let p = ((spec.risk_free * dt).exp() - d) / (u - d);
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        let mut log_choose = 0.0; // ln C(n, k), updated incrementally
        let mut total = 0.0;
        for k in 0..=n {
            if k > 0 {
                log_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
            }
            let st = spec.spot * u.powf(2.0 * k as f64 - n as f64);
            let pay = st - spec.strike;
            if pay > 0.0 {
                total += (log_choose + k as f64 * lp + (n - k) as f64 * lq).exp() * pay;
            }
        }
        total * (-spec.risk_free * spec.time_to_expiry).exp()
    }

    #[test]
    fn reference_value_agrees_with_two_oracles() {
        let q = payoff_quadrature(&atm());
        let lattice = crr_sum(&atm(), 100_000);
        assert!((q - lattice).abs() < 1e-3, "{q} vs {lattice}");
        assert!((q - 10.4506).abs() < 1e-3);
        let bs = black_scholes_call(&atm()).unwrap();
        assert!((bs - q).abs() < 1e-6, "{bs} vs {q}");
        assert!((bs - 10.4506).abs() < 1e-3);
    }

    #[test]
    fn zero_strike_is_spot() {
        let spec = OptionSpec { strike: 0.0, ..atm() };
        assert_eq!(black_scholes_call(&spec).unwrap(), 100.0);
    }

    #[test]
    fn zero_volatility_is_discounted_forward() {
        let spec = OptionSpec { volatility: 0.0, ..atm() };
        let v = black_scholes_call(&spec).unwrap();
        assert!((v - (100.0 - 100.0 * (-0.05f64).exp())).abs() < 1e-12);
        assert!((v - 4.877).abs() < 1e-3);
        let tiny = OptionSpec { volatility: 1e-9, ..atm() };
        assert!((black_scholes_call(&tiny).unwrap() - v).abs() < 1e-6);
    }

    #[test]
    fn zero_time_is_intrinsic() {
        let spec = OptionSpec { time_to_expiry: 0.0, spot: 120.0, ..atm() };
        assert_eq!(black_scholes_call(&spec).unwrap(), 20.0);
    }

    #[test]
    fn rejects_negative_inputs() {
        assert!(black_scholes_call(&OptionSpec { spot: -1.0, ..atm() }).is_err());
        assert!(black_scholes_call(&OptionSpec { volatility: f64::NAN, ..atm() }).is_err());
    }
}
