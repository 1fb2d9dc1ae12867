//! Witness constructions for the window-ratio problems.
//!
//! Two families appear here. The smooth family are high cosine powers
//! `cos^(2n)(pi x / p)` with period `p` slightly above 1: they concentrate
//! their mass near the lattice `p Z`, so a window of half-length just above
//! an integer `k` captures `2k+1` mass clumps while the unit window captures
//! one. The exact family are the "dip" atoms
//! `2 T(x) - T(x+a) - T(x-a)` (autocorrelations of an indicator minus its
//! shift) and their arithmetic-progression trains; these are positive
//! definite by construction and majorized, exactly, by a signed combination
//! of indicators, which is what drives every upper bound in this crate.
//!
//! Also here: the search for a two-bump convolution square whose sliding
//! unit window strictly beats the central one, refuting the naive guess that
//! the centered window is always optimal.

use serde::{Deserialize, Serialize};

use crate::piecewise::{PiecewiseLinearFn, Side};
use crate::quadrature::{integrate_sampled, QuadratureConfig};
use crate::rational::{rat, Rational};
use crate::Error;

/// Evaluable handle for `f(x) = cos^(2n)(pi x / p)`, carrying the metadata
/// certification needs.
#[derive(Clone, Debug)]
pub struct CosPow {
    pub period: Rational,
    pub power: u32,
}

/// Returns the cosine-power witness `cos^(2n)(pi x / p)`.
pub fn cospow(period: &Rational, power: u32) -> Result<CosPow, Error> {
    if !period.is_positive() {
        return Err(Error::Domain(format!(
            "cosine-power period must be positive, got {period}"
        )));
    }
    if power == 0 {
        return Err(Error::Domain("cosine power must be at least 1".into()));
    }
    Ok(CosPow {
        period: period.clone(),
        power,
    })
}

impl CosPow {
    pub fn eval(&self, x: f64) -> f64 {
        let p = self.period.to_f64();
        (std::f64::consts::PI * x / p)
            .cos()
            .powi(2 * self.power as i32)
    }

    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + Copy + Send + Sync + '_ {
        move |x| self.eval(x)
    }
}

/// Parameters of the concentrated periodic (comb) witness targeting the
/// interval index `k` with excess `eps`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CombParams {
    pub k: u32,
    pub eps: Rational,
    /// Period, slightly above 1.
    pub p: Rational,
    /// Concentration half-width of each mass clump.
    pub delta: Rational,
    /// Cosine power.
    pub power: u32,
}

impl CombParams {
    /// Checks the three geometric constraints exactly:
    /// the unit window meets only the central clump, the target window
    /// contains the clumps indexed `-k..k`, and `[1, 2k+1]` contains the
    /// clumps `1..2k`.
    pub fn validate(&self) -> Result<(), Error> {
        let k = Rational::integer(self.k as i64);
        let p_minus_1 = &self.p - &Rational::one();
        let checks = [
            (self.delta < p_minus_1, "delta < p - 1"),
            (
                &(&k * &p_minus_1) + &self.delta < self.eps,
                "k (p - 1) + delta < eps",
            ),
            (
                &(&(&k * &p_minus_1) * &Rational::integer(2)) + &self.delta < Rational::one(),
                "2 k (p - 1) + delta < 1",
            ),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(Error::Domain(format!(
                    "comb parameters violate the constraint {what}"
                )));
            }
        }
        Ok(())
    }

    pub fn witness(&self) -> CosPow {
        CosPow {
            period: self.p.clone(),
            power: self.power,
        }
    }
}

pub const DEFAULT_POWER_CAP: u32 = 1_000_000;

/// Picks comb parameters for target index `k` and excess `eps`:
/// `p - 1 = eps / (4(k+1))` and `delta = (p-1)/2`, which satisfy all three
/// constraints with slack, then the smallest cosine power whose per-period
/// mass outside `(-delta, delta)` falls below `concentration_tol` (measured
/// by quadrature; the mass is decreasing in the power, so a doubling search
/// followed by bisection finds the minimum).
pub fn choose_comb_params(
    k: u32,
    eps: &Rational,
    concentration_tol: f64,
    power_cap: u32,
) -> Result<CombParams, Error> {
    if k == 0 {
        return Err(Error::Domain("comb index k must be at least 1".into()));
    }
    if !eps.is_positive() || *eps >= 1 {
        return Err(Error::Domain(format!(
            "comb excess must satisfy 0 < eps < 1, got {eps}"
        )));
    }
    let denom = Rational::integer(4 * (k as i64 + 1));
    let p = &Rational::one() + &(eps / &denom);
    let delta = eps / &(&denom * &Rational::integer(2));
    let params = |power| CombParams {
        k,
        eps: eps.clone(),
        p: p.clone(),
        delta: delta.clone(),
        power,
    };
    params(1).validate()?;

    // The measured masses are only compared against concentration_tol, so
    // the quadrature needs a few extra digits, not the full default budget.
    let quad = QuadratureConfig {
        relative_tolerance: (concentration_tol * 1e-4).clamp(1e-12, 1e-6),
        ..Default::default()
    };
    let outside_mass = |power: u32| -> Result<f64, Error> {
        let f = CosPow {
            period: p.clone(),
            power,
        };
        let half = p.to_f64() / 2.0;
        let d = delta.to_f64();
        let whole = integrate_sampled(f.as_fn(), -half, half, &quad)?.value;
        let center = integrate_sampled(f.as_fn(), -d, d, &quad)?.value;
        Ok(whole - center)
    };

    let mut hi = 1u32;
    while outside_mass(hi)? >= concentration_tol {
        if hi >= power_cap {
            return Err(Error::InfeasibleConcentration {
                cap: power_cap,
                tol: concentration_tol,
            });
        }
        hi = hi.saturating_mul(2).min(power_cap);
    }
    let mut lo = hi / 2; // outside_mass(lo) >= tol (or lo == 0)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if outside_mass(mid)? < concentration_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(params(hi))
}

/// A window-ratio estimate together with its quadrature health.
#[derive(Clone, Copy, Debug)]
pub struct RatioEstimate {
    pub value: f64,
    pub converged: bool,
}

const DENOMINATOR_FLOOR: f64 = 1e-300;

/// `integral of f over [-ell, ell]` divided by `integral over [-1, 1]`.
pub fn central_window_ratio<F: Fn(f64) -> f64>(
    f: F,
    ell: &Rational,
    cfg: &QuadratureConfig,
) -> Result<RatioEstimate, Error> {
    let l = ell.to_f64();
    let num = integrate_sampled(&f, -l, l, cfg)?;
    let den = integrate_sampled(&f, -1.0, 1.0, cfg)?;
    if den.value.abs() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator { value: den.value });
    }
    Ok(RatioEstimate {
        value: num.value / den.value,
        converged: num.converged && den.converged,
    })
}

/// Sliding-window ratio: the maximum over a center grid of
/// `integral over [a-ell, a+ell] / integral over [-1, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct SlidingRatio {
    pub value: f64,
    /// Maximizing center; ties are broken toward the smallest `|a|`.
    pub argmax: f64,
    pub converged: bool,
}

pub fn sliding_window_ratio<F: Fn(f64) -> f64>(
    f: F,
    ell: &Rational,
    a_lo: f64,
    a_hi: f64,
    a_step: f64,
    cfg: &QuadratureConfig,
) -> Result<SlidingRatio, Error> {
    if !(a_step > 0.0) {
        return Err(Error::Domain(format!(
            "sliding-window step must be positive, got {a_step}"
        )));
    }
    if a_lo > a_hi {
        return Err(Error::Domain(format!(
            "sliding-window grid out of order: {a_lo} > {a_hi}"
        )));
    }
    let l = ell.to_f64();
    let mut centers = Vec::new();
    let mut a = a_lo;
    while a <= a_hi + a_step * 1e-9 {
        centers.push(a);
        a += a_step;
    }

    // The window endpoints of consecutive centers interleave, so integrate
    // each gap between sorted distinct endpoints once and reuse the prefix
    // sums for every window.
    let mut endpoints: Vec<f64> = centers
        .iter()
        .flat_map(|a| [a - l, a + l])
        .collect();
    endpoints.sort_by(|x, y| x.partial_cmp(y).unwrap());
    endpoints.dedup();
    let mut prefix = vec![0.0f64];
    let mut converged = true;
    for w in endpoints.windows(2) {
        let piece = integrate_sampled(&f, w[0], w[1], cfg)?;
        converged &= piece.converged;
        prefix.push(prefix.last().unwrap() + piece.value);
    }
    let index = |x: f64| -> usize {
        endpoints
            .binary_search_by(|e| e.partial_cmp(&x).unwrap())
            .expect("window endpoint missing from the integration grid")
    };

    let den = integrate_sampled(&f, -1.0, 1.0, cfg)?;
    converged &= den.converged;
    if den.value.abs() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator { value: den.value });
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_a = f64::NAN;
    for &a in &centers {
        let window = prefix[index(a + l)] - prefix[index(a - l)];
        let value = window / den.value;
        if best_a.is_nan() {
            best_value = value;
            best_a = a;
            continue;
        }
        let tie = 1e-12 * best_value.abs().max(1.0);
        if value > best_value + tie
            || ((value - best_value).abs() <= tie && a.abs() < best_a.abs())
        {
            best_value = value;
            best_a = a;
        }
    }
    Ok(SlidingRatio {
        value: best_value,
        argmax: best_a,
        converged,
    })
}

/// The atom `2 T(x) - T(x+a) - T(x-a)` where `T` is the unit hat function.
/// It is the autocorrelation of `chi - chi(. - a)` for the unit-length
/// indicator `chi`, hence positive definite for every shift `a`; it has
/// integral zero and a nonnegative peak at the origin.
pub fn dip_atom(a: &Rational) -> PiecewiseLinearFn {
    let center = PiecewiseLinearFn::triangle(&Rational::zero());
    let left = PiecewiseLinearFn::triangle(&-a);
    let right = PiecewiseLinearFn::triangle(a);
    PiecewiseLinearFn::combine(&[
        (rat(2, 1), &center),
        (rat(-1, 1), &left),
        (rat(-1, 1), &right),
    ])
}

/// The arithmetic-progression train `sum_{j=0..k} dip_atom(a + j(2-p))`,
/// positive definite as a finite sum of autocorrelations. Requires
/// `0 < p <= 1` and `k >= 0`.
pub fn dip_train(a: &Rational, k: i64, p: &Rational) -> Result<PiecewiseLinearFn, Error> {
    if !p.is_positive() || *p > 1 {
        return Err(Error::Domain(format!(
            "train parameter must satisfy 0 < p <= 1, got {p}"
        )));
    }
    if k < 0 {
        return Err(Error::Domain(format!(
            "train order must be nonnegative, got {k}"
        )));
    }
    let gap = &Rational::integer(2) - p;
    let center = PiecewiseLinearFn::triangle(&Rational::zero());
    let mut shifted = Vec::new();
    for j in 0..=k {
        let shift = a + &(&gap * &Rational::integer(j));
        shifted.push(PiecewiseLinearFn::triangle(&-&shift));
        shifted.push(PiecewiseLinearFn::triangle(&shift));
    }
    let mut terms: Vec<(Rational, &PiecewiseLinearFn)> =
        vec![(Rational::integer(2 * (k + 1)), &center)];
    terms.extend(shifted.iter().map(|t| (rat(-1, 1), t)));
    Ok(PiecewiseLinearFn::combine(&terms))
}

/// Exact certificate that a dip train is majorized by
/// `2(k+1) chi_[-1,1] - p (chi_band + chi_mirrored_band)` with
/// band `[a+p-1, a+k(2-p)+1-p]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MajorizationCertificate {
    pub a: Rational,
    pub k: i64,
    pub p: Rational,
    pub holds: bool,
    pub lhs: PiecewiseLinearFn,
    pub rhs: PiecewiseLinearFn,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violation: Option<(Rational, Side)>,
    /// The band `[a+p-1, a+k(2-p)+1-p]` the majorization subtracts.
    pub band: (Rational, Rational),
}

pub fn verify_majorization(
    a: &Rational,
    k: i64,
    p: &Rational,
) -> Result<MajorizationCertificate, Error> {
    if !p.is_positive() || *p > 1 {
        return Err(Error::Domain(format!(
            "majorization parameter must satisfy 0 < p <= 1, got {p}"
        )));
    }
    if k < 0 {
        return Err(Error::Domain(format!(
            "majorization order must be nonnegative, got {k}"
        )));
    }
    let gap = &Rational::integer(2) - p;
    let band_len = &(&gap * &Rational::integer(k)) + &(&(&Rational::integer(2) - p) - p);
    if !band_len.is_positive() {
        return Err(Error::DegenerateBand {
            a: a.clone(),
            k,
            p: p.clone(),
            len: band_len,
        });
    }
    let band_lo = &(a + p) - &Rational::one();
    let band_hi = &band_lo + &band_len;
    let band = PiecewiseLinearFn::indicator(&band_lo, &band_hi)?;
    let mirror = PiecewiseLinearFn::indicator(&-&band_hi, &-&band_lo)?;
    let unit = PiecewiseLinearFn::indicator(&rat(-1, 1), &rat(1, 1))?;

    let lhs = dip_train(a, k, p)?;
    let rhs = PiecewiseLinearFn::combine(&[
        (Rational::integer(2 * (k + 1)), &unit),
        (-p.clone(), &band),
        (-p.clone(), &mirror),
    ]);
    let cmp = PiecewiseLinearFn::le(&lhs, &rhs);
    Ok(MajorizationCertificate {
        a: a.clone(),
        k,
        p: p.clone(),
        holds: cmp.holds,
        lhs,
        rhs,
        violation: cmp.witness,
        band: (band_lo, band_hi),
    })
}

/// Evaluation report for a comb witness: both ratios plus certification
/// status.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessEvaluation {
    pub description: String,
    pub g_ratio: f64,
    pub c_ratio: f64,
    pub c_ratio_argmax: f64,
    pub certified_pd: bool,
    pub certified_nonneg: bool,
    pub quadrature_converged: bool,
}

/// Outcome of the two-bump counterexample search: a symmetric doubly
/// positive density whose best unit window strictly beats the central one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub success: bool,
    /// Inner edge of the bump pair.
    pub center: Rational,
    /// Bump width.
    pub width: Rational,
    /// Window center achieving the best gap.
    pub shift: Rational,
    pub window_integral: Rational,
    pub central_integral: Rational,
    /// `window_integral - central_integral`; positive on success.
    pub gap: Rational,
    /// The density itself, for independent re-checking.
    pub density: PiecewiseLinearFn,
}

/// The normalized two-bump density `u = (chi_[-c-w,-c] + chi_[c,c+w])/(2w)`
/// convolved with itself. `u` is even, so this is the autocorrelation
/// `u * u~`: a symmetric probability density that is positive definite by
/// construction.
pub fn two_bump_autocorrelation(
    center: &Rational,
    width: &Rational,
) -> Result<PiecewiseLinearFn, Error> {
    if !center.is_positive() || !width.is_positive() {
        return Err(Error::Domain(format!(
            "two-bump parameters must be positive, got center {center}, width {width}"
        )));
    }
    let bumps = [
        (-&(center + width), -center),
        (center.clone(), center + width),
    ];
    let mut parts = Vec::new();
    for (a, b) in &bumps {
        for (c, d) in &bumps {
            parts.push(PiecewiseLinearFn::convolve_indicators(a, b, c, d)?);
        }
    }
    let norm = &Rational::one() / &(&(width * width) * &Rational::integer(4));
    let terms: Vec<(Rational, &PiecewiseLinearFn)> =
        parts.iter().map(|f| (norm.clone(), f)).collect();
    Ok(PiecewiseLinearFn::combine(&terms))
}

/// Grid search over two-bump autocorrelations for a window of the given
/// half-width whose integral strictly exceeds the central one. All integrals
/// are exact, so a reported positive gap is a proof.
pub fn counterexample_search(
    centers: &[Rational],
    widths: &[Rational],
    window_halfwidth: &Rational,
) -> Result<CounterexampleReport, Error> {
    if centers.is_empty() || widths.is_empty() {
        return Err(Error::Domain(
            "counterexample search needs nonempty parameter grids".into(),
        ));
    }
    if !window_halfwidth.is_positive() {
        return Err(Error::Domain(format!(
            "window half-width must be positive, got {window_halfwidth}"
        )));
    }
    let mut best: Option<CounterexampleReport> = None;
    for c in centers {
        for w in widths {
            let f = two_bump_autocorrelation(c, w)?;
            let central = f.integral_over(
                Some(&-window_halfwidth),
                Some(window_halfwidth),
            )?;
            // Window centers on a rational grid fine enough to land on the
            // rising edge of the outer mass clump.
            let reach = &(&(c + w) * &Rational::integer(2)) + window_halfwidth;
            let step = rat(1, 20).min(w / &Rational::integer(4));
            let mut shift = Rational::zero();
            while shift <= reach {
                let window = f.integral_over(
                    Some(&(&shift - window_halfwidth)),
                    Some(&(&shift + window_halfwidth)),
                )?;
                let gap = &window - &central;
                let better = match &best {
                    None => true,
                    Some(b) => gap > b.gap,
                };
                if better {
                    best = Some(CounterexampleReport {
                        success: gap.is_positive(),
                        center: c.clone(),
                        width: w.clone(),
                        shift: shift.clone(),
                        window_integral: window,
                        central_integral: central.clone(),
                        gap,
                        density: f.clone(),
                    });
                }
                shift = &shift + &step;
            }
        }
    }
    Ok(best.expect("grids are nonempty"))
}

/// Closed-form Fourier transform of a dip atom at frequency `xi`
/// (convention `F(xi) = integral f(x) e^{-i xi x} dx`, real by evenness):
/// `sinc^2(xi/2) * 2 (1 - cos(a xi))`.
pub fn dip_atom_transform(a: f64, xi: f64) -> f64 {
    let s = if xi == 0.0 { 1.0 } else { (xi / 2.0).sin() / (xi / 2.0) };
    s * s * 2.0 * (1.0 - (a * xi).cos())
}
