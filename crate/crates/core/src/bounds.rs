//! Exact closed-form bounds for the central and sliding window-integral
//! ratios over doubly positive functions, together with the construction
//! parameters behind the upper bound.
//!
//! Everything here is exact rational arithmetic: the bounds pass through
//! floors and ceilings of `2*ell`, so they are discontinuous at
//! half-integers and must never be evaluated in floating point.

use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::Error;

/// All bound quantities for a single window half-length `ell`.
///
/// `lower_g <= lower_c <= upper <= upper_simple` whenever the upper bounds
/// are defined (`ell >= 1`). `exact_value` is the central ratio's exact
/// value, present on `(0, 1]` where it equals 1 (the sliding ratio is not
/// pinned down there: a sliding unit window can strictly beat the central
/// one).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ell: Rational,
    pub lower_g: Rational,
    pub lower_c: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub upper_simple: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_opt: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_opt: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact_value: Option<Rational>,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str =
        "ell,lower_G,lower_C,upper,upper_simple,k,p,exact_value";

    pub fn csv_row(&self) -> String {
        let opt = |v: &Option<Rational>| v.as_ref().map(|r| r.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.ell,
            self.lower_g,
            self.lower_c,
            opt(&self.upper),
            self.upper_simple.map(|v| v.to_string()).unwrap_or_default(),
            self.k_opt.map(|v| v.to_string()).unwrap_or_default(),
            opt(&self.p_opt),
            opt(&self.exact_value),
        )
    }

    /// True when `ell` is a positive integer, i.e. when the exact value is
    /// only known to lie in the ambiguity band `[2k-1, 2k+1]`.
    pub fn integer_ambiguity(&self) -> bool {
        self.ell.is_integer() && self.ell > 1
    }
}

/// Result of the brute-force minimization over admissible construction
/// orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionMinimum {
    pub k: i64,
    pub value: Rational,
    /// The minimum is also attained at `k - 1` (happens exactly when
    /// `2*ell` is an integer).
    pub tie_with_previous: bool,
}

fn require_positive(ell: &Rational) -> Result<(), Error> {
    if !ell.is_positive() {
        Err(Error::Domain(format!(
            "window half-length must be positive, got {ell}"
        )))
    } else {
        Ok(())
    }
}

/// Lower bounds for the central and sliding ratios at `ell`. Below 1 both
/// are 1 (the central ratio is exactly 1 there); at every integer `k >= 1`
/// they are `2k - 1` and `2k` (the sliding window can straddle `2k` mass
/// clumps already at half-length `k`, so `lower_c(1) = 2` even though the
/// central ratio still equals 1); at non-integer `ell > 1` both equal
/// `2*floor(ell) + 1`.
pub fn lower_bounds(ell: &Rational) -> Result<(Rational, Rational), Error> {
    require_positive(ell)?;
    if *ell < 1 {
        return Ok((Rational::one(), Rational::one()));
    }
    if ell.is_integer() {
        let k = ell.floor_i64();
        Ok((Rational::integer(2 * k - 1), Rational::integer(2 * k)))
    } else {
        let m = ell.floor_i64();
        let v = Rational::integer(2 * m + 1);
        Ok((v.clone(), v))
    }
}

/// The closed-form upper bound
/// `(floor(2 ell)+1)(floor(2 ell)+2) / (2 (floor(2 ell)+1-ell))`
/// and the weaker integer bound `ceil(2 ell) + 1`. Requires `ell >= 1`.
pub fn upper_bound(ell: &Rational) -> Result<(Rational, i64), Error> {
    if *ell < 1 {
        return Err(Error::Domain(format!(
            "upper bound requires ell >= 1, got {ell}"
        )));
    }
    let two_ell = ell * &Rational::integer(2);
    let m = two_ell.floor_i64();
    let numer = Rational::integer((m + 1) * (m + 2));
    let denom = &(&Rational::integer(m + 1) - ell) * &Rational::integer(2);
    let upper = &numer / &denom;
    let upper_simple = two_ell.ceil_i64() + 1;
    debug_assert!(upper <= Rational::integer(upper_simple));
    debug_assert_eq!(upper == Rational::integer(upper_simple), two_ell.is_integer());
    Ok((upper, upper_simple))
}

/// Upper bound delivered by the order-`k` construction:
/// `(k+1)(k+2) / (2 (k+1-ell))`. Admissible orders are the integers with
/// `ell - 1 < k <= 2 ell`.
pub fn construction_bound(k: i64, ell: &Rational) -> Result<Rational, Error> {
    let kr = Rational::integer(k);
    if !(kr > ell - &Rational::one() && kr <= ell * &Rational::integer(2)) {
        return Err(Error::Domain(format!(
            "construction order {k} outside the admissible range ({} , {}]",
            ell - &Rational::one(),
            ell * &Rational::integer(2),
        )));
    }
    let numer = Rational::integer((k + 1) * (k + 2));
    let denom = &(&Rational::integer(k + 1) - ell) * &Rational::integer(2);
    Ok(&numer / &denom)
}

/// Construction parameters behind the closed-form upper bound:
/// `k = floor(2 ell)` and `p = (2(k+1) - 2 ell)/(k+2)`, which always lies in
/// `(0, 1]` and satisfies `ell = ((k+1)(2-p) - p)/2` exactly.
pub fn construction_params(ell: &Rational) -> Result<(i64, Rational), Error> {
    if *ell < 1 {
        return Err(Error::Domain(format!(
            "construction parameters require ell >= 1, got {ell}"
        )));
    }
    let k = (ell * &Rational::integer(2)).floor_i64();
    let p = &(&Rational::integer(2 * (k + 1)) - &(ell * &Rational::integer(2)))
        / &Rational::integer(k + 2);
    debug_assert!(p.is_positive() && p <= 1);
    // Inversion check: ell = ((k+1)(2-p) - p)/2.
    debug_assert_eq!(
        &(&(&Rational::integer(k + 1) * &(&Rational::integer(2) - &p)) - &p)
            / &Rational::integer(2),
        *ell
    );
    Ok((k, p))
}

/// Exhaustive scan of `construction_bound` over every admissible order.
/// This is the independent oracle for the closed form: the minimum must be
/// attained at `floor(2 ell)` (with a tie at `floor(2 ell) - 1` exactly when
/// `2 ell` is an integer, broken toward the larger order).
pub fn minimize_construction_bound(ell: &Rational) -> Result<ConstructionMinimum, Error> {
    if *ell <= 1 {
        return Err(Error::Domain(format!(
            "construction-order scan requires ell > 1, got {ell}"
        )));
    }
    let k_min = (ell - &Rational::one()).floor_i64() + 1;
    let k_max = (ell * &Rational::integer(2)).floor_i64();
    let mut best: Option<(i64, Rational)> = None;
    for k in k_min..=k_max {
        let v = construction_bound(k, ell)?;
        match &best {
            Some((_, bv)) if *bv < v => {}
            _ => best = Some((k, v)),
        }
    }
    let (k, value) = best.expect("admissible range is never empty for ell > 1");
    let tie_with_previous = k > k_min
        && construction_bound(k - 1, ell)
            .map(|v| v == value)
            .unwrap_or(false);
    Ok(ConstructionMinimum {
        k,
        value,
        tie_with_previous,
    })
}

/// The proven common right limit of both ratios at the integer `k`: `2k+1`.
pub fn right_limit(k: i64) -> Result<Rational, Error> {
    if k < 1 {
        return Err(Error::Domain(format!(
            "right limit requires a positive integer, got {k}"
        )));
    }
    Ok(Rational::integer(2 * k + 1))
}

/// Aggregates every bound quantity for one `ell`.
pub fn bound_report(ell: &Rational) -> Result<BoundReport, Error> {
    let (lower_g, lower_c) = lower_bounds(ell)?;
    if *ell < 1 {
        return Ok(BoundReport {
            ell: ell.clone(),
            lower_g,
            lower_c,
            upper: None,
            upper_simple: None,
            k_opt: None,
            p_opt: None,
            exact_value: Some(Rational::one()),
        });
    }
    let (upper, upper_simple) = upper_bound(ell)?;
    if *ell == 1 {
        // The value is known exactly on (0, 1]; the formula still yields a
        // valid (though slack) upper bound of 3 there.
        return Ok(BoundReport {
            ell: ell.clone(),
            lower_g,
            lower_c,
            upper: Some(upper),
            upper_simple: Some(upper_simple),
            k_opt: None,
            p_opt: None,
            exact_value: Some(Rational::one()),
        });
    }
    let (k_opt, p_opt) = construction_params(ell)?;
    Ok(BoundReport {
        ell: ell.clone(),
        lower_g,
        lower_c,
        upper: Some(upper),
        upper_simple: Some(upper_simple),
        k_opt: Some(k_opt),
        p_opt: Some(p_opt),
        exact_value: None,
    })
}
