//! Slower cross-module invariants of the witness constructions: ratio
//! growth under concentration, consistency between the central and sliding
//! ratios, and double positivity of the primal candidates.

use pdextremal::certify::{doubly_positive_check, CertifyConfig};
use pdextremal::extremal::{
    make_atoms, primal_search, solve_central_lp, sweep_window_lp, SolverConfig,
};
use pdextremal::quadrature::QuadratureConfig;
use pdextremal::rational::{rat, Rational};
use pdextremal::witness::{
    central_window_ratio, choose_comb_params, sliding_window_ratio, CosPow,
    DEFAULT_POWER_CAP,
};

/// Ratio growth: for fixed comb geometry the central ratio at half-length
/// `k + eps` is non-decreasing in the cosine power and ends within 0.2 of
/// the limiting value `2k+1`.
#[test]
fn comb_ratio_growth() {
    let quad = QuadratureConfig::with_tolerance(1e-8);
    let eps = rat(1, 10);
    for k in 1u32..=3 {
        let params = choose_comb_params(k, &eps, 1e-3, DEFAULT_POWER_CAP).unwrap();
        let ell = &Rational::integer(k as i64) + &eps;
        let mut previous = f64::NEG_INFINITY;
        for power in [params.power / 4, params.power / 2, params.power] {
            let f = CosPow {
                period: params.p.clone(),
                power: power.max(1),
            };
            let r = central_window_ratio(f.as_fn(), &ell, &quad).unwrap();
            assert!(r.converged, "k = {k}, power = {power}");
            assert!(
                r.value >= previous - 1e-6,
                "ratio decreased at k = {k}, power = {power}: {} -> {}",
                previous,
                r.value
            );
            previous = r.value;
        }
        let target = (2 * k + 1) as f64;
        assert!(
            previous > target - 0.2,
            "k = {k}: final ratio {previous} too far below {target}"
        );
    }
}

/// Whenever the sliding grid contains the origin, the sliding ratio cannot
/// fall below the central ratio.
#[test]
fn sliding_ratio_dominates_central() {
    let quad = QuadratureConfig::with_tolerance(1e-9);
    let params = choose_comb_params(1, &rat(1, 10), 1e-2, DEFAULT_POWER_CAP).unwrap();
    let f = params.witness();
    for ell in [rat(1, 1), rat(11, 10), rat(3, 2)] {
        let g = central_window_ratio(f.as_fn(), &ell, &quad).unwrap();
        let c = sliding_window_ratio(f.as_fn(), &ell, -2.0, 2.0, 0.25, &quad).unwrap();
        assert!(
            c.value >= g.value - 1e-9,
            "ell = {ell}: sliding {} < central {}",
            c.value,
            g.value
        );
    }
}

/// The primal candidates are squares of nonnegative-coefficient cosine
/// sums, so they must sail through the numeric double-positivity check.
#[test]
fn primal_candidates_are_doubly_positive() {
    let quad = QuadratureConfig::with_tolerance(1e-8);
    let result = primal_search(&rat(3, 2), 8, 16.0, 6, 5, &quad).unwrap();
    let b = result.coefficients.clone();
    let period = result.period;
    let f = move |x: f64| -> f64 {
        let mut s = 0.0;
        for (j, bj) in b.iter().enumerate() {
            s += bj * (2.0 * std::f64::consts::PI * j as f64 * x / period).cos();
        }
        s * s
    };
    let report = doubly_positive_check(f, &CertifyConfig::for_window(-4.0, 4.0)).unwrap();
    assert!(report.both_pass());
}

/// A single-point sweep at the origin is exactly the centered problem.
#[test]
fn single_point_sweep_equals_central_solve() {
    let ell = rat(2, 1);
    let family = make_atoms(&ell, 8, 4, true).unwrap();
    let cfg = SolverConfig::default();
    let sweep = sweep_window_lp(&ell, &[Rational::zero()], &family, &cfg).unwrap();
    let central = solve_central_lp(&ell, &family, &cfg).unwrap();
    assert_eq!(sweep.bound, central.bound_sigma);
}
