//! Fuzzy pay-off method for a triangular fuzzy NPV.
//!
//! The real-option value is the share of the membership area lying above
//! zero times `E(A+)`, the possibilistic mean of the membership truncated at
//! zero:
//!
//! ```text
//! E(A+) = ∫₀¹ γ (max(a₁(γ), 0) + max(a₂(γ), 0)) dγ
//! ```
//!
//! where `[a₁(γ), a₂(γ)]` is the γ-cut. For a triangle both the area ratio
//! and `E(A+)` have piecewise closed forms depending on where zero falls.

use serde::Serialize;

use crate::error::{Result, ValuationError};

/// Triangle with peak `a`, left spread `α` and right spread `β`: membership
/// is 1 at `a` and falls linearly to 0 at `a - α` and `a + β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangularFuzzyNumber {
    pub peak: f64,
    pub left_spread: f64,
    pub right_spread: f64,
}

impl TriangularFuzzyNumber {
    pub fn new(peak: f64, left_spread: f64, right_spread: f64) -> Result<Self> {
        let t = TriangularFuzzyNumber {
            peak,
            left_spread,
            right_spread,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("peak", self.peak),
            ("left_spread", self.left_spread),
            ("right_spread", self.right_spread),
        ] {
            if !v.is_finite() {
                return Err(ValuationError::NonFinite(format!("{name} = {v}")));
            }
        }
        if self.left_spread < 0.0 || self.right_spread < 0.0 {
            return Err(ValuationError::invalid("fuzzy spreads must be >= 0"));
        }
        Ok(())
    }

    pub fn membership(&self, x: f64) -> f64 {
        let (a, l, r) = (self.peak, self.left_spread, self.right_spread);
        if x == a {
            1.0
        } else if x < a {
            if l == 0.0 || x <= a - l {
                0.0
            } else {
                (x - (a - l)) / l
            }
        } else if r == 0.0 || x >= a + r {
            0.0
        } else {
            ((a + r) - x) / r
        }
    }

    /// γ-cut `[a - (1-γ)α, a + (1-γ)β]`.
    pub fn cut(&self, gamma: f64) -> (f64, f64) {
        (
            self.peak - (1.0 - gamma) * self.left_spread,
            self.peak + (1.0 - gamma) * self.right_spread,
        )
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.left_spread + self.right_spread)
    }

    /// Membership area on `[0, ∞)`.
    pub fn positive_area(&self) -> f64 {
        let (a, l, r) = (self.peak, self.left_spread, self.right_spread);
        if a - l >= 0.0 {
            self.area()
        } else if a + r <= 0.0 {
            0.0
        } else if a >= 0.0 {
            self.area() - (l - a).powi(2) / (2.0 * l)
        } else {
            (a + r).powi(2) / (2.0 * r)
        }
    }

    /// Possibilistic mean `a + (β - α)/6`.
    pub fn possibilistic_mean(&self) -> f64 {
        self.peak + (self.right_spread - self.left_spread) / 6.0
    }

    /// Possibilistic mean of the positive side, `E(A+)`.
    pub fn positive_mean(&self) -> f64 {
        let (a, l, r) = (self.peak, self.left_spread, self.right_spread);
        if a - l >= 0.0 {
            self.possibilistic_mean()
        } else if a + r <= 0.0 {
            0.0
        } else if a >= 0.0 {
            self.possibilistic_mean() + (l - a).powi(3) / (6.0 * l * l)
        } else {
            (a + r).powi(3) / (6.0 * r * r)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FuzzyPayoff {
    pub positive_area_ratio: f64,
    pub positive_mean: f64,
    pub value: f64,
}

/// Real-option value of a fuzzy NPV. A zero-width triangle is treated as a
/// crisp number; a crisp zero has no defined area ratio and is rejected.
pub fn fuzzy_payoff(npv: &TriangularFuzzyNumber) -> Result<FuzzyPayoff> {
    npv.validate()?;
    if npv.area() == 0.0 {
        return match npv.peak {
            p if p > 0.0 => Ok(FuzzyPayoff {
                positive_area_ratio: 1.0,
                positive_mean: p,
                value: p,
            }),
            p if p < 0.0 => Ok(FuzzyPayoff {
                positive_area_ratio: 0.0,
                positive_mean: 0.0,
                value: 0.0,
            }),
            _ => Err(ValuationError::invalid(
                "degenerate fuzzy number at zero has no area ratio",
            )),
        };
    }
    let ratio = npv.positive_area() / npv.area();
    let mean = npv.positive_mean();
    Ok(FuzzyPayoff {
        positive_area_ratio: ratio,
        positive_mean: mean,
        value: ratio * mean,
    })
}

pub fn fuzzy_payoff_rov(npv: &TriangularFuzzyNumber) -> Result<f64> {
    fuzzy_payoff(npv).map(|p| p.value)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Numerical-integration versions of the area ratio and `E(A+)`,
    //! independent of the closed forms above.
    use super::TriangularFuzzyNumber;

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }

    fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        adaptive(f, a, m, left, tol / 2.0, depth - 1) + adaptive(f, m, b, right, tol / 2.0, depth - 1)
    }

    pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        adaptive(f, a, b, simpson(f, a, b), 1e-14, 50)
    }

    pub fn areas(t: &TriangularFuzzyNumber) -> (f64, f64) {
        let lo = t.peak - t.left_spread - 1.0;
        let hi = t.peak + t.right_spread + 1.0;
        let f = |x: f64| t.membership(x);
        (integrate(&f, lo, hi), integrate(&f, 0f64.max(lo), hi.max(0.0)))
    }

    pub fn positive_mean(t: &TriangularFuzzyNumber) -> f64 {
        let f = |g: f64| {
            let (lo, hi) = t.cut(g);
            g * (lo.max(0.0) + hi.max(0.0))
        };
        integrate(&f, 0.0, 1.0)
    }

    pub fn value(t: &TriangularFuzzyNumber) -> f64 {
        let (total, pos) = areas(t);
        pos / total * positive_mean(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tfn(a: f64, l: f64, r: f64) -> TriangularFuzzyNumber {
        TriangularFuzzyNumber::new(a, l, r).unwrap()
    }

    #[test]
    fn entirely_negative_is_zero() {
        assert_eq!(fuzzy_payoff_rov(&tfn(-10.0, 2.0, 3.0)).unwrap(), 0.0);
    }

    #[test]
    fn entirely_positive_matches_oracle() {
        let t = tfn(10.0, 3.0, 6.0);
        let p = fuzzy_payoff(&t).unwrap();
        assert_eq!(p.positive_area_ratio, 1.0);
        assert!((p.positive_mean - 10.5).abs() < 1e-12);
        assert!((oracle::positive_mean(&t) - 10.5).abs() < 1e-9);
        assert!((p.value - oracle::value(&t)).abs() < 1e-9);
    }

    #[test]
    fn straddling_matches_oracle() {
        let t = tfn(2.0, 4.0, 2.0);
        let (total, pos) = oracle::areas(&t);
        assert!((total - 3.0).abs() < 1e-9);
        assert!((pos / total - 5.0 / 6.0).abs() < 1e-9);
        let p = fuzzy_payoff(&t).unwrap();
        assert!((p.positive_area_ratio - pos / total).abs() < 1e-9);
        assert!((p.positive_mean - oracle::positive_mean(&t)).abs() < 1e-9);
        assert!((p.positive_mean - 1.75).abs() < 1e-12);
        assert!((p.value - 35.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn peak_below_zero_straddling_matches_oracle() {
        let t = tfn(-1.0, 2.0, 5.0);
        let p = fuzzy_payoff(&t).unwrap();
        assert!((p.value - oracle::value(&t)).abs() < 1e-9);
    }

    #[test]
    fn crisp_numbers() {
        assert_eq!(fuzzy_payoff_rov(&tfn(7.0, 0.0, 0.0)).unwrap(), 7.0);
        assert_eq!(fuzzy_payoff_rov(&tfn(-7.0, 0.0, 0.0)).unwrap(), 0.0);
        assert!(fuzzy_payoff_rov(&tfn(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn membership_shape() {
        let t = tfn(2.0, 4.0, 2.0);
        assert_eq!(t.membership(2.0), 1.0);
        assert_eq!(t.membership(-2.0), 0.0);
        assert_eq!(t.membership(0.0), 0.5);
        assert_eq!(t.membership(3.0), 0.5);
        assert_eq!(t.membership(5.0), 0.0);
        assert!(TriangularFuzzyNumber::new(1.0, -1.0, 1.0).is_err());
    }
}
