use super::black_scholes::OptionSpec;
use crate::error::{Result, ValuationError};

/// European call on a Cox-Ross-Rubinstein lattice: `u = e^{σ√Δt}`,
/// `d = 1/u`, risk-neutral `p = (e^{rΔt} - d)/(u - d)`, valued by backward
/// induction.
pub fn binomial_call(spec: &OptionSpec, steps: usize) -> Result<f64> {
    spec.validate()?;
    if steps == 0 {
        return Err(ValuationError::invalid("binomial lattice needs at least one step"));
    }
    let t = spec.time_to_expiry;
    if t == 0.0 {
        return Ok((spec.spot - spec.strike).max(0.0));
    }
    if spec.volatility == 0.0 {
        // u = d = 1: the lattice degenerates to the deterministic forward.
        return Ok((spec.spot - spec.discounted_strike()).max(0.0));
    }
    let dt = t / steps as f64;
    let ln_u = spec.volatility * dt.sqrt();
    let u = ln_u.exp();
    let d = 1.0 / u;
    let growth = (spec.risk_free * dt).exp();
    let p = (growth - d) / (u - d);
    if !(0.0..=1.0).contains(&p) {
        return Err(ValuationError::InvalidProbability(p));
    }
    let disc = growth.recip();
    let (pu, pd) = (p * disc, (1.0 - p) * disc);

    let mut values: Vec<f64> = (0..=steps)
        .map(|j| {
            let st = spec.spot * (ln_u * (2.0 * j as f64 - steps as f64)).exp();
            (st - spec.strike).max(0.0)
        })
        .collect();
    for level in (0..steps).rev() {
        for j in 0..=level {
            values[j] = pd * values[j] + pu * values[j + 1];
        }
    }
    Ok(values[0])
}
