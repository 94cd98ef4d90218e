use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// erf by its Maclaurin series, summed until terms vanish.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 {
            n += 1.0;
            term *= -x * x / n;
            sum += term / (2.0 * n + 1.0);
        }
        sum * 2.0 / PI.sqrt()
    }

    /// 0.5 + trapezoid integral of the density over [0, x].
    fn cdf_trapezoid(x: f64, steps: usize) -> f64 {
        let h = x / steps as f64;
        let mut s = 0.5 * (normal_pdf(0.0) + normal_pdf(x));
        for i in 1..steps {
            s += normal_pdf(i as f64 * h);
        }
        0.5 + s * h
    }

    #[test]
    fn symmetry_and_reflection() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for x in [0.1, 0.7, 1.3, 2.5, 4.0, 6.5] {
            assert!((normal_cdf(x) - (1.0 - normal_cdf(-x))).abs() < 1e-15);
        }
    }

    #[test]
    fn value_at_one_matches_two_oracles() {
        let series = 0.5 * (1.0 + erf_series(1.0 / 2f64.sqrt()));
        let trap = cdf_trapezoid(1.0, 200_000);
        assert!((series - trap).abs() < 1e-10);
        assert!((series - 0.8413447461).abs() < 1e-10);
        assert!((normal_cdf(1.0) - series).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_series_on_a_grid() {
        for i in -30..=30 {
            let x = i as f64 * 0.1;
            let series = 0.5 * (1.0 + erf_series(x / 2f64.sqrt()));
            assert!((normal_cdf(x) - series).abs() < 1e-10, "x = {x}");
        }
    }
}
