//! Exact arithmetic on compactly supported piecewise-linear functions.
//!
//! A function is stored as a strictly increasing list of breakpoints, the
//! point value at each breakpoint, and the affine segment on each open
//! interval between consecutive breakpoints. Outside the first/last
//! breakpoint the function is identically zero. Jump discontinuities are
//! allowed: the one-sided limits at a breakpoint are carried by the adjacent
//! segments (or are zero at the edges of the support), so they can never
//! disagree with the segment data.
//!
//! All operations are exact. Pointwise comparison (`le`) decides
//! `f(x) <= g(x)` for every real `x` by checking point values and one-sided
//! limits on the merged breakpoint set, which is sufficient because both
//! sides are affine between merged breakpoints.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rational;
use crate::Error;

/// Which evaluation of a piecewise-linear function an inequality witness
/// refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Point,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Knot {
    x: Rational,
    value: Rational,
}

/// Affine piece `slope * x + intercept` on one open interval.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Affine {
    slope: Rational,
    intercept: Rational,
}

impl Affine {
    fn zero() -> Self {
        Affine {
            slope: Rational::zero(),
            intercept: Rational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.slope.is_zero() && self.intercept.is_zero()
    }

    fn eval(&self, x: &Rational) -> Rational {
        &(&self.slope * x) + &self.intercept
    }
}

/// Compactly supported, possibly discontinuous, exact piecewise-linear
/// function. Canonical form: no removable breakpoints, no zero padding at
/// the edges of the support; the zero function has no breakpoints at all.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinearFn {
    knots: Vec<Knot>,
    segments: Vec<Affine>,
}

/// One breakpoint with the data a third party needs to re-verify results:
/// abscissa, one-sided limits, and the point value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakpointRecord {
    pub x: Rational,
    pub left: Rational,
    pub value: Rational,
    pub right: Rational,
}

/// Result of the exact pointwise comparison `f <= g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub holds: bool,
    /// A violating abscissa and which evaluation violates, when `holds` is
    /// false.
    pub witness: Option<(Rational, Side)>,
}

impl PiecewiseLinearFn {
    /// The identically zero function.
    pub fn zero() -> Self {
        PiecewiseLinearFn {
            knots: Vec::new(),
            segments: Vec::new(),
        }
    }

    fn from_parts(knots: Vec<Knot>, segments: Vec<Affine>) -> Self {
        assert_eq!(segments.len(), knots.len().saturating_sub(1));
        assert!(
            knots.windows(2).all(|w| w[0].x < w[1].x),
            "breakpoints must be strictly increasing"
        );
        let mut f = PiecewiseLinearFn { knots, segments };
        f.canonicalize();
        f
    }

    /// Characteristic function of the closed interval `[lo, hi]`: value 1 on
    /// the interval including both endpoints, 0 outside.
    pub fn indicator(lo: &Rational, hi: &Rational) -> Result<Self, Error> {
        if lo >= hi {
            return Err(Error::InvalidInterval {
                lo: lo.clone(),
                hi: hi.clone(),
            });
        }
        Ok(PiecewiseLinearFn::from_parts(
            vec![
                Knot {
                    x: lo.clone(),
                    value: Rational::one(),
                },
                Knot {
                    x: hi.clone(),
                    value: Rational::one(),
                },
            ],
            vec![Affine {
                slope: Rational::zero(),
                intercept: Rational::one(),
            }],
        ))
    }

    /// Unit hat function `x -> (1 - |x - center|)_+`.
    pub fn triangle(center: &Rational) -> Self {
        PiecewiseLinearFn::scaled_triangle(center, &Rational::one())
    }

    /// Hat function with peak 1 at `center` and support half-width `scale`:
    /// `x -> (1 - |x - center| / scale)_+`. Requires `scale > 0`.
    pub fn scaled_triangle(center: &Rational, scale: &Rational) -> Self {
        assert!(scale.is_positive(), "triangle scale must be positive");
        let lo = center - scale;
        let hi = center + scale;
        // Rising piece: 1 + (x - center)/scale; falling piece mirrored.
        let inv = &Rational::one() / scale;
        PiecewiseLinearFn::from_parts(
            vec![
                Knot {
                    x: lo,
                    value: Rational::zero(),
                },
                Knot {
                    x: center.clone(),
                    value: Rational::one(),
                },
                Knot {
                    x: hi,
                    value: Rational::zero(),
                },
            ],
            vec![
                Affine {
                    slope: inv.clone(),
                    intercept: &Rational::one() - &(&inv * center),
                },
                Affine {
                    intercept: &Rational::one() + &(&inv * center),
                    slope: -inv,
                },
            ],
        )
    }

    /// Convolution of the indicators of `[a, b]` and `[c, d]`, the one
    /// convolution this library ever needs in closed form. The result is a
    /// trapezoid (a triangle when the intervals have equal length).
    pub fn convolve_indicators(
        a: &Rational,
        b: &Rational,
        c: &Rational,
        d: &Rational,
    ) -> Result<Self, Error> {
        for (lo, hi) in [(a, b), (c, d)] {
            if lo >= hi {
                return Err(Error::InvalidInterval {
                    lo: lo.clone(),
                    hi: hi.clone(),
                });
            }
        }
        let p0 = a + c;
        let p1 = (a + d).min(b + c);
        let p2 = (a + d).max(b + c);
        let p3 = b + d;
        let height = (b - a).min(d - c);
        let mut knots = vec![Knot {
            x: p0.clone(),
            value: Rational::zero(),
        }];
        let mut segments = Vec::new();
        // Rising edge, slope 1.
        segments.push(Affine {
            slope: Rational::one(),
            intercept: -&p0,
        });
        knots.push(Knot {
            x: p1.clone(),
            value: height.clone(),
        });
        if p1 < p2 {
            segments.push(Affine {
                slope: Rational::zero(),
                intercept: height.clone(),
            });
            knots.push(Knot {
                x: p2,
                value: height,
            });
        }
        segments.push(Affine {
            slope: -Rational::one(),
            intercept: p3.clone(),
        });
        knots.push(Knot {
            x: p3,
            value: Rational::zero(),
        });
        Ok(PiecewiseLinearFn::from_parts(knots, segments))
    }

    /// Exact linear combination `sum coeff_i * f_i`.
    pub fn combine(terms: &[(Rational, &PiecewiseLinearFn)]) -> Self {
        let mut xs: Vec<&Rational> = terms
            .iter()
            .flat_map(|(_, f)| f.knots.iter().map(|k| &k.x))
            .collect();
        xs.sort();
        xs.dedup();
        if xs.is_empty() {
            return PiecewiseLinearFn::zero();
        }
        let knots: Vec<Knot> = xs
            .iter()
            .map(|x| {
                let mut value = Rational::zero();
                for (c, f) in terms {
                    let v = f.value_at(x);
                    if !v.is_zero() {
                        value = &value + &(c * &v);
                    }
                }
                Knot {
                    x: (*x).clone(),
                    value,
                }
            })
            .collect();
        let segments: Vec<Affine> = xs
            .windows(2)
            .map(|w| {
                let mid = &(w[0] + w[1]) / &Rational::integer(2);
                let mut slope = Rational::zero();
                let mut intercept = Rational::zero();
                for (c, f) in terms {
                    let piece = f.affine_at(&mid);
                    if !piece.is_zero() {
                        slope = &slope + &(c * &piece.slope);
                        intercept = &intercept + &(c * &piece.intercept);
                    }
                }
                Affine { slope, intercept }
            })
            .collect();
        PiecewiseLinearFn::from_parts(knots, segments)
    }

    fn canonicalize(&mut self) {
        if self.knots.is_empty() {
            return;
        }
        // Drop interior breakpoints where the function is continuous and the
        // adjacent affine pieces agree.
        let mut i = 1;
        while i + 1 < self.knots.len() {
            let left = self.segments[i - 1].eval(&self.knots[i].x);
            let right = self.segments[i].eval(&self.knots[i].x);
            if self.segments[i - 1] == self.segments[i]
                && left == self.knots[i].value
                && right == self.knots[i].value
            {
                self.knots.remove(i);
                self.segments.remove(i);
            } else {
                i += 1;
            }
        }
        // Trim zero padding at the support edges.
        while self.knots.len() >= 2
            && self.segments[0].is_zero()
            && self.knots[0].value.is_zero()
        {
            self.knots.remove(0);
            self.segments.remove(0);
        }
        while self.knots.len() >= 2
            && self.segments.last().unwrap().is_zero()
            && self.knots.last().unwrap().value.is_zero()
        {
            self.knots.pop();
            self.segments.pop();
        }
        if self.knots.len() == 1 && self.knots[0].value.is_zero() {
            self.knots.clear();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.knots.is_empty()
    }

    /// Support interval `[first breakpoint, last breakpoint]`, or `None` for
    /// the zero function.
    pub fn support(&self) -> Option<(&Rational, &Rational)> {
        match self.knots.len() {
            0 => None,
            n => Some((&self.knots[0].x, &self.knots[n - 1].x)),
        }
    }

    pub fn breakpoint_count(&self) -> usize {
        self.knots.len()
    }

    /// All breakpoint abscissae, in increasing order.
    pub fn breakpoints(&self) -> impl Iterator<Item = &Rational> {
        self.knots.iter().map(|k| &k.x)
    }

    /// Index of the segment whose open interval contains `x`, if any.
    fn segment_index(&self, x: &Rational) -> Option<usize> {
        if self.knots.len() < 2 {
            return None;
        }
        if *x <= self.knots[0].x || *x >= self.knots.last().unwrap().x {
            return None;
        }
        // First knot with knot.x >= x; x lies in (knots[i-1].x, knots[i].x].
        let i = self.knots.partition_point(|k| k.x < *x);
        if self.knots[i].x == *x {
            None
        } else {
            Some(i - 1)
        }
    }

    /// Affine piece governing a neighborhood of `x`, for `x` that is not a
    /// breakpoint; zero outside the support.
    fn affine_at(&self, x: &Rational) -> Affine {
        match self.segment_index(x) {
            Some(i) => self.segments[i].clone(),
            None => Affine::zero(),
        }
    }

    /// Exact point value `f(x)`.
    pub fn value_at(&self, x: &Rational) -> Rational {
        if let Ok(i) = self.knots.binary_search_by(|k| k.x.cmp(x)) {
            return self.knots[i].value.clone();
        }
        match self.segment_index(x) {
            Some(i) => self.segments[i].eval(x),
            None => Rational::zero(),
        }
    }

    /// One-sided limit from the left at `x`.
    pub fn limit_left(&self, x: &Rational) -> Rational {
        if self.knots.is_empty() {
            return Rational::zero();
        }
        if *x <= self.knots[0].x || *x > self.knots.last().unwrap().x {
            return Rational::zero();
        }
        if let Ok(i) = self.knots.binary_search_by(|k| k.x.cmp(x)) {
            return self.segments[i - 1].eval(x);
        }
        self.segments[self.segment_index(x).unwrap()].eval(x)
    }

    /// One-sided limit from the right at `x`.
    pub fn limit_right(&self, x: &Rational) -> Rational {
        if self.knots.is_empty() {
            return Rational::zero();
        }
        if *x < self.knots[0].x || *x >= self.knots.last().unwrap().x {
            return Rational::zero();
        }
        if let Ok(i) = self.knots.binary_search_by(|k| k.x.cmp(x)) {
            return self.segments[i].eval(x);
        }
        self.segments[self.segment_index(x).unwrap()].eval(x)
    }

    /// Approximate evaluation for sampling-based checks.
    pub fn eval_f64(&self, x: f64) -> f64 {
        match Rational::from_f64_exact(x) {
            Some(r) => self.value_at(&r).to_f64(),
            None => f64::NAN,
        }
    }

    /// First point, scanning left to right, where the function is negative;
    /// `None` when `f >= 0` everywhere. This decides nonnegativity exactly:
    /// between breakpoints the function is affine, so sign violations show up
    /// in a one-sided limit or a point value.
    pub fn negativity_witness(&self) -> Option<(Rational, Side)> {
        for (i, k) in self.knots.iter().enumerate() {
            if i > 0 {
                let left = self.segments[i - 1].eval(&k.x);
                if left.is_negative() {
                    return Some((k.x.clone(), Side::Left));
                }
            }
            if k.value.is_negative() {
                return Some((k.x.clone(), Side::Point));
            }
            if i < self.segments.len() {
                let right = self.segments[i].eval(&k.x);
                if right.is_negative() {
                    return Some((k.x.clone(), Side::Right));
                }
            }
        }
        None
    }

    /// Exact pointwise comparison: does `f(x) <= g(x)` hold for every real
    /// `x`?
    pub fn le(f: &PiecewiseLinearFn, g: &PiecewiseLinearFn) -> Comparison {
        let diff = PiecewiseLinearFn::combine(&[
            (Rational::one(), g),
            (-Rational::one(), f),
        ]);
        match diff.negativity_witness() {
            None => Comparison {
                holds: true,
                witness: None,
            },
            Some(w) => Comparison {
                holds: false,
                witness: Some(w),
            },
        }
    }

    /// Exact integral over the whole real line. Point values at breakpoints
    /// carry no mass.
    pub fn integral(&self) -> Rational {
        let mut total = Rational::zero();
        for (i, seg) in self.segments.iter().enumerate() {
            total = &total + &segment_integral(seg, &self.knots[i].x, &self.knots[i + 1].x);
        }
        total
    }

    /// Exact integral over `[lo, hi]`; `None` bounds mean the corresponding
    /// infinite ray.
    pub fn integral_over(
        &self,
        lo: Option<&Rational>,
        hi: Option<&Rational>,
    ) -> Result<Rational, Error> {
        if let (Some(a), Some(b)) = (lo, hi) {
            if a > b {
                return Err(Error::Domain(format!(
                    "integration bounds out of order: {a} > {b}"
                )));
            }
        }
        let mut total = Rational::zero();
        for (i, seg) in self.segments.iter().enumerate() {
            let mut a = self.knots[i].x.clone();
            let mut b = self.knots[i + 1].x.clone();
            if let Some(l) = lo {
                if *l > a {
                    a = l.clone();
                }
            }
            if let Some(h) = hi {
                if *h < b {
                    b = h.clone();
                }
            }
            if a < b {
                total = &total + &segment_integral(seg, &a, &b);
            }
        }
        Ok(total)
    }

    /// Breakpoint records with both one-sided limits, sufficient for a third
    /// party to reconstruct the function exactly.
    pub fn to_records(&self) -> Vec<BreakpointRecord> {
        self.knots
            .iter()
            .enumerate()
            .map(|(i, k)| BreakpointRecord {
                x: k.x.clone(),
                left: if i == 0 {
                    Rational::zero()
                } else {
                    self.segments[i - 1].eval(&k.x)
                },
                value: k.value.clone(),
                right: if i == self.segments.len() {
                    Rational::zero()
                } else {
                    self.segments[i].eval(&k.x)
                },
            })
            .collect()
    }

    /// Rebuilds a function from breakpoint records. Each segment is the
    /// chord from `(x_i, right_i)` to `(x_{i+1}, left_{i+1})`.
    pub fn from_records(records: &[BreakpointRecord]) -> Result<Self, Error> {
        if records.is_empty() {
            return Ok(PiecewiseLinearFn::zero());
        }
        if !records.windows(2).all(|w| w[0].x < w[1].x) {
            return Err(Error::Domain(
                "breakpoint records must have strictly increasing abscissae".into(),
            ));
        }
        let knots = records
            .iter()
            .map(|r| Knot {
                x: r.x.clone(),
                value: r.value.clone(),
            })
            .collect();
        let segments = records
            .windows(2)
            .map(|w| {
                let dx = &w[1].x - &w[0].x;
                let slope = &(&w[1].left - &w[0].right) / &dx;
                let intercept = &w[0].right - &(&slope * &w[0].x);
                Affine { slope, intercept }
            })
            .collect();
        Ok(PiecewiseLinearFn::from_parts(knots, segments))
    }
}

fn segment_integral(seg: &Affine, a: &Rational, b: &Rational) -> Rational {
    // Integral of slope*x + intercept over [a, b].
    let half = Rational::new(1, 2);
    let sq = &(b * b) - &(a * a);
    &(&(&seg.slope * &half) * &sq) + &(&seg.intercept * &(b - a))
}

impl Serialize for PiecewiseLinearFn {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewiseLinearFn {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let records = Vec::<BreakpointRecord>::deserialize(deserializer)?;
        PiecewiseLinearFn::from_records(&records).map_err(serde::de::Error::custom)
    }
}
