//! Numerical and analytic certification of positive definiteness and
//! nonnegativity for sampled functions.
//!
//! The sampling-based positive definiteness test builds the Toeplitz matrix
//! `M[i][j] = f((i-j) step)` and checks its extreme eigenvalues. This is a
//! finite-section *necessary* condition: a failure refutes positive
//! definiteness outright, while a pass at one configuration supports but
//! does not prove it. Proofs come from construction metadata instead
//! (autocorrelations, nonnegative cosine coefficients); certificates record
//! which kind they are.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::Error;

/// How a positive-definiteness certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertMethod {
    /// Eigenvalues of the sample Toeplitz matrix (necessary condition only).
    #[serde(rename = "toeplitz-spectral")]
    ToeplitzSpectral,
    /// Nonnegative cosine-expansion coefficients.
    #[serde(rename = "analytic-fourier")]
    AnalyticFourier,
    /// Positive definite by construction (e.g. an autocorrelation).
    #[serde(rename = "construction")]
    Construction,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PdCertificate {
    pub method: CertMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lag_count: Option<usize>,
    /// `lambda_min / lambda_max` of the sample Toeplitz matrix.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_eigenvalue_ratio: Option<f64>,
    pub passed: bool,
    pub tolerance: f64,
    pub note: String,
}

impl PdCertificate {
    /// Certificate for a function that is positive definite by construction.
    pub fn construction(reason: &str) -> Self {
        PdCertificate {
            method: CertMethod::Construction,
            grid_step: None,
            lag_count: None,
            min_eigenvalue_ratio: None,
            passed: true,
            tolerance: 0.0,
            note: reason.to_string(),
        }
    }

    /// Certificate justified by nonnegative cosine coefficients.
    pub fn analytic(reason: &str) -> Self {
        PdCertificate {
            method: CertMethod::AnalyticFourier,
            grid_step: None,
            lag_count: None,
            min_eigenvalue_ratio: None,
            passed: true,
            tolerance: 0.0,
            note: reason.to_string(),
        }
    }
}

/// Finite-section positive definiteness test. Fails with `NotEven` if the
/// samples are visibly asymmetric (positive definite real functions are
/// even). `passed` means `lambda_min >= -tol * max(lambda_max, 1)`.
pub fn toeplitz_pd_check<F: Fn(f64) -> f64>(
    f: F,
    step: f64,
    lags: usize,
    tol: f64,
) -> Result<PdCertificate, Error> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!(
            "sample step must be positive, got {step}"
        )));
    }
    if lags < 2 {
        return Err(Error::Domain(format!(
            "at least 2 lags are required, got {lags}"
        )));
    }
    let f0 = f(0.0);
    let even_tol = 1e-12 * f0.abs().max(f64::MIN_POSITIVE);
    let mut samples = Vec::with_capacity(lags);
    for i in 0..lags {
        let x = step * i as f64;
        let fx = f(x);
        let fmx = f(-x);
        if !fx.is_finite() || !fmx.is_finite() {
            return Err(Error::NonFiniteSample { x });
        }
        let deviation = (fx - fmx).abs();
        if deviation > even_tol {
            return Err(Error::NotEven {
                x,
                minus_x: -x,
                deviation,
            });
        }
        samples.push(fx);
    }
    let m = DMatrix::from_fn(lags, lags, |i, j| samples[i.abs_diff(j)]);
    let eigen = m.symmetric_eigenvalues();
    let lambda_min = eigen.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda_max = eigen.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let passed = lambda_min >= -tol * lambda_max.max(1.0);
    Ok(PdCertificate {
        method: CertMethod::ToeplitzSpectral,
        grid_step: Some(step),
        lag_count: Some(lags),
        min_eigenvalue_ratio: Some(
            lambda_min / lambda_max.abs().max(f64::MIN_POSITIVE),
        ),
        passed,
        tolerance: tol,
        note: "finite-section necessary condition: failure refutes positive \
               definiteness, success supports but does not prove it"
            .to_string(),
    })
}

/// Grid check of pointwise nonnegativity, reporting the worst sample.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonnegReport {
    pub passed: bool,
    pub worst_x: f64,
    pub worst_value: f64,
    pub tolerance: f64,
}

pub fn nonneg_check<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
) -> Result<NonnegReport, Error> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!(
            "sample step must be positive, got {step}"
        )));
    }
    let scale = f(0.0).abs().max(1.0);
    let mut worst_x = lo;
    let mut worst_value = f64::INFINITY;
    let mut x = lo;
    while x <= hi + step * 1e-9 {
        let fx = f(x.min(hi));
        if !fx.is_finite() {
            return Err(Error::NonFiniteSample { x });
        }
        if fx < worst_value {
            worst_value = fx;
            worst_x = x.min(hi);
        }
        x += step;
    }
    Ok(NonnegReport {
        passed: worst_value >= -tol * scale,
        worst_x,
        worst_value,
        tolerance: tol,
    })
}

/// Shared sampling configuration for the combined check.
#[derive(Clone, Debug)]
pub struct CertifyConfig {
    pub window: (f64, f64),
    pub step: f64,
    pub lags: usize,
    pub tol: f64,
}

impl CertifyConfig {
    /// Configuration whose Toeplitz lags span the given window.
    pub fn for_window(lo: f64, hi: f64) -> Self {
        let lags = 128;
        let reach = lo.abs().max(hi.abs()).max(1e-6);
        CertifyConfig {
            window: (lo, hi),
            step: reach / (lags as f64 - 1.0),
            lags,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DoublyPositiveReport {
    pub pd: PdCertificate,
    pub nonneg: NonnegReport,
}

impl DoublyPositiveReport {
    pub fn both_pass(&self) -> bool {
        self.pd.passed && self.nonneg.passed
    }
}

/// Conjunction of the Toeplitz test and the nonnegativity grid check.
pub fn doubly_positive_check<F: Fn(f64) -> f64>(
    f: F,
    cfg: &CertifyConfig,
) -> Result<DoublyPositiveReport, Error> {
    let pd = toeplitz_pd_check(&f, cfg.step, cfg.lags, cfg.tol)?;
    let nonneg_step = (cfg.window.1 - cfg.window.0) / 1024.0;
    let nonneg = nonneg_check(&f, cfg.window.0, cfg.window.1, nonneg_step, cfg.tol)?;
    Ok(DoublyPositiveReport { pd, nonneg })
}

/// Exact cosine-expansion coefficients of `cos^(2n)(theta)`:
/// the coefficient of `cos(2j theta)` is `C(2n, n-j)/4^n`, doubled for
/// `j >= 1`. All coefficients are positive, which certifies positive
/// definiteness analytically; they sum to 1 (the value at theta = 0).
pub fn cospow_coefficients(n: u32) -> Result<Vec<Rational>, Error> {
    if n == 0 || n > 64 {
        return Err(Error::Domain(format!(
            "cosine-power expansion supports 1 <= n <= 64, got {n}"
        )));
    }
    let four_pow = BigInt::one() << (2 * n);
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        let binom = binomial_big(2 * n, n - j);
        let doubled = if j == 0 { binom } else { binom * 2 };
        coeffs.push(Rational::from_big(doubled, four_pow.clone()));
    }
    Ok(coeffs)
}

fn binomial_big(n: u32, k: u32) -> BigInt {
    let k = k.min(n - k);
    let mut result = BigInt::one();
    for i in 0..k {
        result = result * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::PiecewiseLinearFn;
    use crate::quadrature::{integrate_sampled, QuadratureConfig};
    use crate::rational::rat;
    use crate::witness::cospow;
    use std::f64::consts::PI;

    #[test]
    fn single_cosine_passes() {
        let cert = toeplitz_pd_check(|x| (2.0 * PI * x).cos(), 0.1, 64, 1e-9).unwrap();
        assert!(cert.passed, "ratio {:?}", cert.min_eigenvalue_ratio);
    }

    #[test]
    fn indicator_fails_finite_section() {
        // The transform of the unit-window indicator changes sign, and the
        // refutation shows up already at 64 lags with step 0.3.
        let cert =
            toeplitz_pd_check(|x| if x.abs() <= 1.0 { 1.0 } else { 0.0 }, 0.3, 64, 1e-9)
                .unwrap();
        assert!(!cert.passed);
        assert!(cert.min_eigenvalue_ratio.unwrap() < -1e-3);
    }

    #[test]
    fn gaussian_passes() {
        let cert = toeplitz_pd_check(|x: f64| (-x * x).exp(), 0.25, 128, 1e-9).unwrap();
        assert!(cert.passed);
    }

    #[test]
    fn refutation_survives_refinement() {
        // Any finer configuration containing a refuting finite section still
        // refutes: eigenvalue interlacing can only push the minimum down.
        // Halving the step while doubling the lags keeps the refuting
        // section as a principal submatrix, so by interlacing the smallest
        // eigenvalue can only stay negative.
        let f = |x: f64| if x.abs() <= 1.0 { 1.0 } else { 0.0 };
        let coarse = toeplitz_pd_check(f, 0.3, 64, 1e-9).unwrap();
        let fine = toeplitz_pd_check(f, 0.15, 128, 1e-9).unwrap();
        assert!(!coarse.passed);
        assert!(!fine.passed);
    }

    #[test]
    fn odd_function_is_rejected() {
        assert!(matches!(
            toeplitz_pd_check(|x| x, 0.1, 16, 1e-9),
            Err(Error::NotEven { .. })
        ));
    }

    #[test]
    fn nonneg_check_cases() {
        let sq = nonneg_check(|x: f64| (PI * x).cos().powi(2), 0.0, 1.0, 0.01, 1e-9).unwrap();
        assert!(sq.passed);

        let cosine = nonneg_check(|x| (2.0 * PI * x).cos(), 0.0, 1.0, 0.01, 1e-9).unwrap();
        assert!(!cosine.passed);
        assert!((cosine.worst_x - 0.5).abs() < 0.02);

        let t = PiecewiseLinearFn::triangle(&rat(0, 1));
        let hat = nonneg_check(|x| t.eval_f64(x), -2.0, 2.0, 0.05, 1e-9).unwrap();
        assert!(hat.passed);
    }

    #[test]
    fn doubly_positive_cases() {
        let cfg = CertifyConfig::for_window(-4.0, 4.0);

        let f = cospow(&rat(81, 80), 8).unwrap();
        let report = doubly_positive_check(f.as_fn(), &cfg).unwrap();
        assert!(report.both_pass());

        let t = PiecewiseLinearFn::triangle(&rat(0, 1));
        let report = doubly_positive_check(|x| t.eval_f64(x), &cfg).unwrap();
        assert!(report.both_pass());

        let report = doubly_positive_check(|x| (2.0 * PI * x).cos(), &cfg).unwrap();
        assert!(report.pd.passed);
        assert!(!report.nonneg.passed);
    }

    #[test]
    fn schur_product_closure() {
        // Pointwise products of functions that pass the finite-section test
        // keep passing it at the same configuration.
        let g = |x: f64| (-x * x).exp();
        let c = |x: f64| (2.0 * PI * x).cos();
        let cert = toeplitz_pd_check(|x| c(x) * g(x), 0.25, 128, 1e-9).unwrap();
        assert!(cert.passed);

        let f = cospow(&rat(81, 80), 4).unwrap();
        let t = PiecewiseLinearFn::triangle(&rat(0, 1));
        let cert =
            toeplitz_pd_check(|x| f.eval(x) * t.eval_f64(x), 0.05, 128, 1e-9).unwrap();
        assert!(cert.passed);
    }

    #[test]
    fn cospow_coefficient_values() {
        // cos^2 = 1/2 + 1/2 cos(2 theta).
        assert_eq!(
            cospow_coefficients(1).unwrap(),
            vec![rat(1, 2), rat(1, 2)]
        );
        // cos^4 = 3/8 + 1/2 cos(2 theta) + 1/8 cos(4 theta).
        assert_eq!(
            cospow_coefficients(2).unwrap(),
            vec![rat(3, 8), rat(1, 2), rat(1, 8)]
        );
        assert!(cospow_coefficients(0).is_err());
        assert!(cospow_coefficients(65).is_err());
    }

    #[test]
    fn cospow_coefficients_nonnegative_and_sum_to_one() {
        for n in 1..=64 {
            let coeffs = cospow_coefficients(n).unwrap();
            assert_eq!(coeffs.len(), n as usize + 1);
            let mut sum = Rational::zero();
            for c in &coeffs {
                assert!(c.is_positive(), "n = {n}");
                sum = &sum + c;
            }
            assert_eq!(sum, Rational::one(), "n = {n}");
        }
    }

    #[test]
    fn cospow_coefficients_match_numeric_projection() {
        // Projection oracle: c_j = (2 - [j=0]) / pi * integral over [0, pi]
        // of cos^(2n)(t) cos(2 j t) dt.
        let quad = QuadratureConfig::default();
        for n in [1u32, 2, 5] {
            let coeffs = cospow_coefficients(n).unwrap();
            for (j, c) in coeffs.iter().enumerate() {
                let proj = integrate_sampled(
                    |t| t.cos().powi(2 * n as i32) * (2.0 * j as f64 * t).cos(),
                    0.0,
                    PI,
                    &quad,
                )
                .unwrap()
                .value
                    * (if j == 0 { 1.0 } else { 2.0 })
                    / PI;
                assert!(
                    (proj - c.to_f64()).abs() < 1e-9,
                    "n = {n}, j = {j}: {proj} vs {c}"
                );
            }
        }
    }
}
