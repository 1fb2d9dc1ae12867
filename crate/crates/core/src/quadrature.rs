//! Composite Simpson quadrature with interval-doubling refinement, for the
//! sampled smooth integrands (cosine powers, trigonometric squares) that have
//! no exact piecewise-linear representation.

use crate::Error;

#[derive(Clone, Debug)]
pub struct QuadratureConfig {
    /// Starting number of subintervals; must be even.
    pub initial_subdivisions: usize,
    pub relative_tolerance: f64,
    /// How many times the subinterval count may be doubled before giving up.
    pub max_doublings: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            initial_subdivisions: 256,
            relative_tolerance: 1e-10,
            max_doublings: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(relative_tolerance: f64) -> Self {
        QuadratureConfig {
            relative_tolerance,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if self.initial_subdivisions == 0 || !self.initial_subdivisions.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "initial subdivision count must be a positive even number, got {}",
                self.initial_subdivisions
            )));
        }
        if !(self.relative_tolerance > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerance must be positive, got {}",
                self.relative_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureResult {
    pub value: f64,
    pub converged: bool,
    /// Subinterval count of the final estimate.
    pub subdivisions: usize,
}

/// Composite Simpson rule with `n` subintervals (n even).
fn simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, n: usize) -> Result<f64, Error> {
    let h = (hi - lo) / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let x = if i == n { hi } else { lo + h * i as f64 };
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::NonFiniteSample { x });
        }
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * fx;
    }
    Ok(sum * h / 3.0)
}

/// Integrates `f` over `[lo, hi]`, doubling the subinterval count until two
/// successive composite-Simpson estimates agree to the relative tolerance or
/// the doubling budget runs out.
pub fn integrate_sampled<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult, Error> {
    cfg.validate()?;
    if !(lo <= hi) {
        return Err(Error::Domain(format!(
            "integration bounds out of order: {lo} > {hi}"
        )));
    }
    if lo == hi {
        return Ok(QuadratureResult {
            value: 0.0,
            converged: true,
            subdivisions: cfg.initial_subdivisions,
        });
    }
    let mut n = cfg.initial_subdivisions;
    let mut prev = simpson(&f, lo, hi, n)?;
    for _ in 0..cfg.max_doublings {
        n *= 2;
        let next = simpson(&f, lo, hi, n)?;
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if (next - prev).abs() <= cfg.relative_tolerance * scale {
            return Ok(QuadratureResult {
                value: next,
                converged: true,
                subdivisions: n,
            });
        }
        prev = next;
    }
    Ok(QuadratureResult {
        value: prev,
        converged: false,
        subdivisions: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_function() {
        let r = integrate_sampled(|_| 1.0, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cosine_square_half_period() {
        // Oracle: antiderivative of cos^2(pi x) is x/2 + sin(2 pi x)/(4 pi),
        // which gives exactly 1/2 over [-1/2, 1/2].
        let anti = |x: f64| x / 2.0 + (2.0 * PI * x).sin() / (4.0 * PI);
        let expected = anti(0.5) - anti(-0.5);
        assert!((expected - 0.5).abs() < 1e-15);
        let r = integrate_sampled(
            |x| (PI * x).cos().powi(2),
            -0.5,
            0.5,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn cosine_fourth_power() {
        // Wallis: integral of cos^4 over a unit period is C(4,2)/2^4 = 3/8.
        let r = integrate_sampled(
            |x| (PI * x).cos().powi(4),
            -0.5,
            0.5,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - 0.375).abs() < 1e-10);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        // Composite Simpson integrates polynomials of degree <= 3 exactly at
        // any even subinterval count.
        let f = |x: f64| 3.0 * x * x * x - 2.0 * x * x + x - 5.0;
        let exact = |x: f64| 0.75 * x.powi(4) - 2.0 / 3.0 * x.powi(3) + 0.5 * x * x - 5.0 * x;
        for n in [2usize, 4, 6, 50] {
            let v = simpson(&f, -1.0, 2.0, n).unwrap();
            assert!(
                (v - (exact(2.0) - exact(-1.0))).abs() < 1e-12,
                "n = {n}: {v}"
            );
        }
    }

    #[test]
    fn non_finite_sample_is_an_error() {
        let r = integrate_sampled(|x| 1.0 / x, -1.0, 1.0, &QuadratureConfig::default());
        assert!(matches!(r, Err(Error::NonFiniteSample { .. })));
    }

    #[test]
    fn rejects_odd_subdivisions() {
        let cfg = QuadratureConfig {
            initial_subdivisions: 3,
            ..Default::default()
        };
        assert!(integrate_sampled(|_| 1.0, 0.0, 1.0, &cfg).is_err());
    }
}
