//! Arrival-intensity profiles over distance.
//!
//! A profile `h(y)` gives the Poisson arrival rate per unit distance
//! contributed by customers located at distance `y ≥ 0` from the facility.
//! Three derived quantities drive everything downstream:
//!
//! * `Λ(x) = ∫₀ˣ h(y) dy`, the total arrival rate of customers within `x`,
//! * `M(x) = ∫₀ˣ y·h(y) dy`, the first moment of that mass,
//! * `Λ⁻¹`, used to sample a customer's distance given a uniform draw.
//!
//! Every supported family has closed-form `Λ` and `M`; the adaptive
//! integrator is used by callers only where a substituted integrand has no
//! closed form. Profiles are validated at construction: parameters must be
//! finite, `h` must be nonnegative (checked analytically where possible and
//! on a dense sample grid always), and power-law tails must be integrable
//! near the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::root;
use crate::Real;

fn one<T: Real>() -> T {
    T::one()
}

fn two<T: Real>() -> T {
    T::lit(2.0)
}

/// Parametric families for the intensity profile.
///
/// Serialized with an internal `family` tag in snake case, e.g.
/// `{"family": "power_law", "beta": 1.0, "alpha": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family<T: Real> {
    /// `h(y) = c`.
    Constant { c: T },
    /// `h(y) = beta · y^alpha`, requiring `alpha > -1` so mass near the
    /// origin is finite. For `-1 < alpha < 0` the profile has an integrable
    /// singularity at 0.
    PowerLaw { beta: T, alpha: T },
    /// `h(y) = exp(gamma · y)`; `gamma` may be negative (finite total mass)
    /// or zero (constant 1).
    Exponential { gamma: T },
    /// `h(y) = ln(1 + y)`.
    LogShift,
    /// `h(y) = (1 + y)^(-p)`. Total mass is finite iff `p > 1`.
    RationalShift { p: T },
    /// `h(y) = a + b·sin(y)`, requiring `a ≥ |b|`.
    SinusoidalOffset { a: T, b: T },
    /// Alternates between two levels on the intervals `[0,1), [1,10),
    /// [10,100), …`: level `v2` on `[0,1)` and every other interval after,
    /// level `v1` on `[1,10)` and every other interval after. With the
    /// default levels `(v1, v2) = (1, 2)` the profile starts at 2 next to
    /// the facility and keeps alternating forever, which is the canonical
    /// example of a tail ratio that never settles.
    StaircaseAlternating {
        #[serde(default = "one")]
        v1: T,
        #[serde(default = "two")]
        v2: T,
    },
    /// Continuous profile alternating flat stretches with unit-slope climbs:
    /// level `c1` on `[a₁, b₁]`, then `h(y) = c_i + (y - b_i)` on
    /// `[b_i, a_{i+1}]`, then flat at `c_{i+1} = c_i + (a_{i+1} - b_i)`, and
    /// so on; beyond the last flat segment the final level is held. Requires
    /// `a₁ = 0` and `a_i < b_i ≤ a_{i+1}`.
    PiecewiseLinearOscillating {
        a_breaks: Vec<T>,
        b_breaks: Vec<T>,
        c1: T,
    },
    /// Piecewise-linear interpolation through `(y, h)` knots with strictly
    /// increasing `y`. The first level is held on `[0, y₀]` and the last
    /// level is held beyond the final knot.
    Table { knots: Vec<(T, T)> },
}

/// Raw serialization shape of [`IntensityFunction`]: the family fields plus
/// an optional positive `scale` multiplier (default 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntensityConfig<T: Real> {
    #[serde(default = "one")]
    pub scale: T,
    #[serde(flatten)]
    pub family: Family<T>,
}

/// A validated intensity profile: `scale · h_family(y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "IntensityConfig<T>",
    into = "IntensityConfig<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + serde::Deserialize<'de>"
    )
)]
pub struct IntensityFunction<T: Real> {
    scale: T,
    family: Family<T>,
}

impl<T: Real> TryFrom<IntensityConfig<T>> for IntensityFunction<T> {
    type Error = Error;

    fn try_from(config: IntensityConfig<T>) -> Result<Self> {
        IntensityFunction::with_scale(config.family, config.scale)
    }
}

impl<T: Real> From<IntensityFunction<T>> for IntensityConfig<T> {
    fn from(h: IntensityFunction<T>) -> Self {
        IntensityConfig {
            scale: h.scale,
            family: h.family,
        }
    }
}

impl<T: Real> IntensityFunction<T> {
    pub fn new(family: Family<T>) -> Result<Self> {
        Self::with_scale(family, T::one())
    }

    pub fn with_scale(family: Family<T>, scale: T) -> Result<Self> {
        if !(scale.is_finite() && scale > T::zero()) {
            return Err(Error::invalid("scale must be positive and finite"));
        }
        validate(&family)?;
        Ok(Self { scale, family })
    }

    pub fn constant(c: T) -> Result<Self> {
        Self::new(Family::Constant { c })
    }

    pub fn power_law(beta: T, alpha: T) -> Result<Self> {
        Self::new(Family::PowerLaw { beta, alpha })
    }

    pub fn exponential(gamma: T) -> Result<Self> {
        Self::new(Family::Exponential { gamma })
    }

    pub fn log_shift() -> Result<Self> {
        Self::new(Family::LogShift)
    }

    pub fn rational_shift(p: T) -> Result<Self> {
        Self::new(Family::RationalShift { p })
    }

    pub fn sinusoidal_offset(a: T, b: T) -> Result<Self> {
        Self::new(Family::SinusoidalOffset { a, b })
    }

    pub fn staircase_alternating(v1: T, v2: T) -> Result<Self> {
        Self::new(Family::StaircaseAlternating { v1, v2 })
    }

    pub fn table(knots: Vec<(T, T)>) -> Result<Self> {
        Self::new(Family::Table { knots })
    }

    /// Returns the same profile multiplied by `b > 0`.
    pub fn scaled(&self, b: T) -> Result<Self> {
        Self::with_scale(self.family.clone(), self.scale * b)
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    /// `h(y)`. Errors for negative or non-finite `y`. May legitimately
    /// return `+∞` at `y = 0` for singular power laws.
    pub fn evaluate(&self, y: T) -> Result<T> {
        check_coord(y)?;
        Ok(self.scale * eval_raw(&self.family, y))
    }

    /// `Λ(x) = ∫₀ˣ h`. Closed form for every family.
    pub fn cumulative(&self, x: T) -> Result<T> {
        check_coord(x)?;
        Ok(self.scale * cum_raw(&self.family, x))
    }

    /// `M(x) = ∫₀ˣ y·h(y) dy`. Closed form for every family.
    pub fn first_moment(&self, x: T) -> Result<T> {
        check_coord(x)?;
        Ok(self.scale * m1_raw(&self.family, x))
    }

    /// Whether `h` has a closed-form derivative (the piecewise families do
    /// not; [`Self::derivative`] falls back to central differences there).
    pub fn derivative_available(&self) -> bool {
        matches!(
            self.family,
            Family::Constant { .. }
                | Family::PowerLaw { .. }
                | Family::Exponential { .. }
                | Family::LogShift
                | Family::RationalShift { .. }
                | Family::SinusoidalOffset { .. }
        )
    }

    /// `h'(y)`, closed form where available and a finite-difference estimate
    /// with relative step `1e-6` otherwise.
    pub fn derivative(&self, y: T) -> Result<T> {
        check_coord(y)?;
        if let Some(d) = deriv_raw(&self.family, y) {
            return Ok(self.scale * d);
        }
        let step = T::lit(1e-6) * y.abs().max(T::one());
        let hi = self.scale * eval_raw(&self.family, y + step);
        if y >= step {
            let lo = self.scale * eval_raw(&self.family, y - step);
            Ok((hi - lo) / (step + step))
        } else {
            let lo = self.scale * eval_raw(&self.family, y);
            Ok((hi - lo) / step)
        }
    }

    /// Solves `Λ(y) = target` for the smallest such `y`.
    ///
    /// Uses the family's closed-form inverse where one exists and monotone
    /// bisection to relative tolerance `1e-12` otherwise. Errors when the
    /// target exceeds the profile's total mass.
    pub fn inverse_cumulative(&self, target: T) -> Result<T> {
        if !(target.is_finite() && target >= T::zero()) {
            return Err(Error::domain("inverse target must be nonnegative and finite"));
        }
        if target == T::zero() {
            return Ok(T::zero());
        }
        let t = target / self.scale;
        match closed_inverse(&self.family, t) {
            Some(r) => r.map_err(|_| self.out_of_range(target)),
            None => self.bisect_inverse(t, target),
        }
    }

    fn out_of_range(&self, target: T) -> Error {
        // Best-effort report of the reachable range.
        let probe = cum_raw(&self.family, T::lit(1e12)) * self.scale;
        Error::TargetOutOfRange {
            target: target.as_f64(),
            max: probe.as_f64(),
        }
    }

    fn bisect_inverse(&self, t: T, target: T) -> Result<T> {
        let mut hi = T::one();
        let mut cum = cum_raw(&self.family, hi);
        let mut doublings = 0usize;
        while cum < t {
            let next = hi * two::<T>();
            if !next.is_finite() || doublings > 1100 {
                return Err(self.out_of_range(target));
            }
            let next_cum = cum_raw(&self.family, next);
            if next_cum <= cum && next_cum < t {
                // Mass has stopped growing: finite total below the target.
                return Err(self.out_of_range(target));
            }
            hi = next;
            cum = next_cum;
            doublings += 1;
        }
        root::bisect_secant(
            |y| cum_raw(&self.family, y) - t,
            T::zero(),
            hi,
            T::lit(1e-12),
        )
    }

    /// `Λ(x)` without the domain check, for internal callers that already
    /// guarantee `x ≥ 0` (root-finding and quadrature closures).
    pub(crate) fn cumulative_nn(&self, x: T) -> T {
        self.scale * cum_raw(&self.family, x)
    }

    /// `M(x)` without the domain check; see [`Self::cumulative_nn`].
    pub(crate) fn first_moment_nn(&self, x: T) -> T {
        self.scale * m1_raw(&self.family, x)
    }

    /// Stable form of `h(y) / h(x)`, used to keep substituted tail
    /// integrands representable when `h` itself overflows (fast growth) at
    /// large arguments. For families that cannot overflow this is the plain
    /// quotient, or `h(y)` itself when `h(x)` vanishes; the normalization is
    /// constant in `y`, so ratios of integrals are unaffected.
    pub(crate) fn relative_value(&self, y: T, x: T) -> T {
        match &self.family {
            Family::Exponential { gamma } => ((y - x) * *gamma).exp(),
            Family::PowerLaw { alpha, .. } => (y / x).powf(*alpha),
            f => {
                let hx = eval_raw(f, x);
                if hx.is_finite() && hx > T::zero() {
                    eval_raw(f, y) / hx
                } else {
                    eval_raw(f, y)
                }
            }
        }
    }

    /// Abscissae in `(0, x)` where the profile is kinked or discontinuous;
    /// integrators must not straddle them.
    pub(crate) fn kink_points(&self, x: T) -> Vec<T> {
        match &self.family {
            Family::StaircaseAlternating { .. } => {
                let mut cuts = Vec::new();
                let mut bound = T::one();
                while bound < x {
                    cuts.push(bound);
                    bound = bound * T::lit(10.0);
                }
                cuts
            }
            Family::PiecewiseLinearOscillating {
                a_breaks,
                b_breaks,
                c1,
            } => plo_nodes(a_breaks, b_breaks, *c1)
                .into_iter()
                .map(|(y, _)| y)
                .filter(|y| *y > T::zero() && *y < x)
                .collect(),
            Family::Table { knots } => knots
                .iter()
                .map(|&(y, _)| y)
                .filter(|y| *y > T::zero() && *y < x)
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn check_coord<T: Real>(y: T) -> Result<()> {
    if !y.is_finite() || y < T::zero() {
        return Err(Error::domain(format!(
            "distance {} outside [0, ∞)",
            y.as_f64()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Validation

fn validate<T: Real>(family: &Family<T>) -> Result<()> {
    let finite = |v: T, name: &str| -> Result<()> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("{name} must be finite")))
        }
    };
    match family {
        Family::Constant { c } => {
            finite(*c, "c")?;
            if *c < T::zero() {
                return Err(Error::invalid("constant level must be nonnegative"));
            }
        }
        Family::PowerLaw { beta, alpha } => {
            finite(*beta, "beta")?;
            finite(*alpha, "alpha")?;
            if *alpha <= T::lit(-1.0) {
                return Err(Error::invalid(
                    "power-law exponent must exceed -1 for integrable mass near 0",
                ));
            }
            if *beta < T::zero() {
                return Err(Error::invalid("power-law coefficient must be nonnegative"));
            }
        }
        Family::Exponential { gamma } => finite(*gamma, "gamma")?,
        Family::LogShift => {}
        Family::RationalShift { p } => finite(*p, "p")?,
        Family::SinusoidalOffset { a, b } => {
            finite(*a, "a")?;
            finite(*b, "b")?;
            if *a < b.abs() {
                return Err(Error::invalid(
                    "sinusoidal offset must dominate the amplitude (a >= |b|)",
                ));
            }
        }
        Family::StaircaseAlternating { v1, v2 } => {
            finite(*v1, "v1")?;
            finite(*v2, "v2")?;
            if *v1 < T::zero() || *v2 < T::zero() {
                return Err(Error::invalid("staircase levels must be nonnegative"));
            }
        }
        Family::PiecewiseLinearOscillating {
            a_breaks,
            b_breaks,
            c1,
        } => {
            if a_breaks.is_empty() || a_breaks.len() != b_breaks.len() {
                return Err(Error::invalid(
                    "a_breaks and b_breaks must be equally sized and non-empty",
                ));
            }
            finite(*c1, "c1")?;
            if *c1 < T::zero() {
                return Err(Error::invalid("first level must be nonnegative"));
            }
            if a_breaks[0] != T::zero() {
                return Err(Error::invalid("first flat segment must start at 0"));
            }
            for i in 0..a_breaks.len() {
                finite(a_breaks[i], "a_breaks")?;
                finite(b_breaks[i], "b_breaks")?;
                if !(a_breaks[i] < b_breaks[i]) {
                    return Err(Error::invalid("each flat segment needs a_i < b_i"));
                }
                if i + 1 < a_breaks.len() && !(b_breaks[i] <= a_breaks[i + 1]) {
                    return Err(Error::invalid("segments must not overlap (b_i <= a_{i+1})"));
                }
            }
        }
        Family::Table { knots } => {
            if knots.is_empty() {
                return Err(Error::invalid("table needs at least one knot"));
            }
            if knots[0].0 < T::zero() {
                return Err(Error::invalid("knot abscissae must be nonnegative"));
            }
            for w in knots.windows(2) {
                if !(w[0].0 < w[1].0) {
                    return Err(Error::invalid("knot abscissae must be strictly increasing"));
                }
            }
            for &(y, h) in knots {
                finite(y, "knot y")?;
                finite(h, "knot h")?;
                if h < T::zero() {
                    return Err(Error::invalid("knot values must be nonnegative"));
                }
            }
        }
    }
    grid_nonnegativity_check(family)
}

/// Dense-grid nonnegativity check: linear sweep over [0, 50] (fine enough to
/// see every sinusoidal dip) plus a log sweep out to 1e7.
fn grid_nonnegativity_check<T: Real>(family: &Family<T>) -> Result<()> {
    let mut offending: Option<T> = None;
    let mut check = |y: T| {
        let v = eval_raw(family, y);
        if v.is_nan() || v < T::zero() {
            offending.get_or_insert(y);
        }
    };
    let n = 2048usize;
    let lin_hi = T::lit(50.0);
    for i in 0..=n {
        check(lin_hi * T::from_usize(i).expect("small integer") / T::from_usize(n).expect("small integer"));
    }
    let (log_lo, decades) = (1e-9f64, 16usize);
    let per_decade = 128usize;
    for j in 0..=(decades * per_decade) {
        check(T::lit(log_lo * 10f64.powf(j as f64 / per_decade as f64)));
    }
    match offending {
        Some(y) => Err(Error::invalid(format!(
            "intensity is negative or undefined near y = {}",
            y.as_f64()
        ))),
        None => Ok(()),
    }
}

// ---------------------------------------------------------------------------
// Stable scalar helpers

/// `(e^u - 1)/u`, continuous through `u = 0`.
fn em1<T: Real>(u: T) -> T {
    if u == T::zero() {
        T::one()
    } else {
        u.exp_m1() / u
    }
}

/// `ln(1 + v)/v`, continuous through `v = 0`.
fn lm1<T: Real>(v: T) -> T {
    if v == T::zero() {
        T::one()
    } else {
        v.ln_1p() / v
    }
}

/// `((u - 1)e^u + 1)/u²`, continuous through `u = 0` (value 1/2).
/// Series below |u| = 1/2 where the direct form cancels catastrophically.
fn e2<T: Real>(u: T) -> T {
    if u.abs() < T::lit(0.5) {
        let mut term = T::lit(0.5);
        let mut sum = term;
        for k in 0..40usize {
            let num = T::from_usize(k + 2).expect("small integer");
            let den = T::from_usize(k + 1).expect("small integer")
                * T::from_usize(k + 3).expect("small integer");
            term = term * u * num / den;
            sum = sum + term;
            if term.abs() <= sum.abs() * T::epsilon() {
                break;
            }
        }
        sum
    } else {
        ((u - T::one()) * u.exp() + T::one()) / (u * u)
    }
}

// ---------------------------------------------------------------------------
// Per-family closed forms

fn eval_raw<T: Real>(family: &Family<T>, y: T) -> T {
    match family {
        Family::Constant { c } => *c,
        Family::PowerLaw { beta, alpha } => {
            if y == T::zero() {
                if *alpha > T::zero() {
                    T::zero()
                } else if *alpha == T::zero() {
                    *beta
                } else if *beta == T::zero() {
                    T::zero()
                } else {
                    T::infinity()
                }
            } else {
                *beta * y.powf(*alpha)
            }
        }
        Family::Exponential { gamma } => (*gamma * y).exp(),
        Family::LogShift => y.ln_1p(),
        Family::RationalShift { p } => (-*p * y.ln_1p()).exp(),
        Family::SinusoidalOffset { a, b } => *a + *b * y.sin(),
        Family::StaircaseAlternating { v1, v2 } => {
            let (k, _lo, _hi) = staircase_interval(y);
            if k % 2 == 0 {
                *v2
            } else {
                *v1
            }
        }
        Family::PiecewiseLinearOscillating {
            a_breaks,
            b_breaks,
            c1,
        } => pw_eval(&plo_nodes(a_breaks, b_breaks, *c1), y),
        Family::Table { knots } => pw_eval(knots, y),
    }
}

fn cum_raw<T: Real>(family: &Family<T>, x: T) -> T {
    match family {
        Family::Constant { c } => *c * x,
        Family::PowerLaw { beta, alpha } => {
            if x == T::zero() {
                T::zero()
            } else {
                *beta * x.powf(*alpha + T::one()) / (*alpha + T::one())
            }
        }
        Family::Exponential { gamma } => x * em1(*gamma * x),
        Family::LogShift => logshift_cum(x),
        Family::RationalShift { p } => rational_partial(*p, x),
        Family::SinusoidalOffset { a, b } => *a * x + *b * (T::one() - x.cos()),
        Family::StaircaseAlternating { v1, v2 } => {
            staircase_sum(*v1, *v2, x, |lo, hi| hi - lo)
        }
        Family::PiecewiseLinearOscillating {
            a_breaks,
            b_breaks,
            c1,
        } => pw_cumulative(&plo_nodes(a_breaks, b_breaks, *c1), x),
        Family::Table { knots } => pw_cumulative(knots, x),
    }
}

fn m1_raw<T: Real>(family: &Family<T>, x: T) -> T {
    let half = T::lit(0.5);
    match family {
        Family::Constant { c } => *c * x * x * half,
        Family::PowerLaw { beta, alpha } => {
            if x == T::zero() {
                T::zero()
            } else {
                *beta * x.powf(*alpha + two::<T>()) / (*alpha + two::<T>())
            }
        }
        Family::Exponential { gamma } => x * x * e2(*gamma * x),
        Family::LogShift => logshift_m1(x),
        Family::RationalShift { p } => rational_partial(*p - T::one(), x) - rational_partial(*p, x),
        Family::SinusoidalOffset { a, b } => {
            *a * x * x * half + *b * (x.sin() - x * x.cos())
        }
        Family::StaircaseAlternating { v1, v2 } => {
            staircase_sum(*v1, *v2, x, |lo, hi| (hi * hi - lo * lo) * half)
        }
        Family::PiecewiseLinearOscillating {
            a_breaks,
            b_breaks,
            c1,
        } => pw_first_moment(&plo_nodes(a_breaks, b_breaks, *c1), x),
        Family::Table { knots } => pw_first_moment(knots, x),
    }
}

fn deriv_raw<T: Real>(family: &Family<T>, y: T) -> Option<T> {
    match family {
        Family::Constant { .. } => Some(T::zero()),
        Family::PowerLaw { beta, alpha } => Some(if y == T::zero() {
            if *alpha > T::one() {
                T::zero()
            } else if *alpha == T::one() {
                *beta
            } else {
                T::infinity() * alpha.signum()
            }
        } else {
            *beta * *alpha * y.powf(*alpha - T::one())
        }),
        Family::Exponential { gamma } => Some(*gamma * (*gamma * y).exp()),
        Family::LogShift => Some((T::one() + y).recip()),
        Family::RationalShift { p } => {
            Some(-*p * (-(*p + T::one()) * y.ln_1p()).exp())
        }
        Family::SinusoidalOffset { b, .. } => Some(*b * y.cos()),
        _ => None,
    }
}

/// Closed-form `Λ⁻¹(t)`; `None` means "use bisection", `Err` means the
/// target exceeds the total mass.
#[allow(clippy::type_complexity)]
fn closed_inverse<T: Real>(family: &Family<T>, t: T) -> Option<core::result::Result<T, ()>> {
    match family {
        Family::Constant { c } => Some(if *c > T::zero() { Ok(t / *c) } else { Err(()) }),
        Family::PowerLaw { beta, alpha } => Some(if *beta > T::zero() {
            let ap1 = *alpha + T::one();
            Ok((ap1 * t / *beta).powf(ap1.recip()))
        } else {
            Err(())
        }),
        Family::Exponential { gamma } => {
            // Λ(y) = (e^{γy} - 1)/γ ⇒ y = ln(1 + γt)/γ; for γ < 0 the mass
            // saturates at -1/γ.
            if *gamma < T::zero() && t >= -gamma.recip() {
                Some(Err(()))
            } else {
                Some(Ok(t * lm1(*gamma * t)))
            }
        }
        Family::RationalShift { p } => {
            let q = T::one() - *p;
            // Λ(y) = ((1+y)^q - 1)/q ⇒ y = (1 + qt)^(1/q) - 1.
            if q < T::zero() && t >= -q.recip() {
                Some(Err(()))
            } else {
                Some(Ok((t * lm1(q * t)).exp_m1()))
            }
        }
        Family::StaircaseAlternating { v1, v2 } => Some(staircase_inverse(*v1, *v2, t)),
        Family::PiecewiseLinearOscillating {
            a_breaks,
            b_breaks,
            c1,
        } => Some(pw_inverse(&plo_nodes(a_breaks, b_breaks, *c1), t).ok_or(())),
        Family::Table { knots } => Some(pw_inverse(knots, t).ok_or(())),
        Family::LogShift | Family::SinusoidalOffset { .. } => None,
    }
}

// ---------------------------------------------------------------------------
// LogShift: series near 0, direct antiderivative elsewhere

fn logshift_cum<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        // Λ(x) = Σ_{k≥2} (-1)^k x^k / (k(k-1))
        let mut term = x * x * T::lit(0.5);
        let mut sum = term;
        for k in 2..60usize {
            let ratio = -x * T::from_usize(k - 1).expect("small integer")
                / T::from_usize(k + 1).expect("small integer");
            term = term * ratio;
            sum = sum + term;
            if term.abs() <= sum.abs() * T::epsilon() {
                break;
            }
        }
        sum
    } else {
        (T::one() + x) * x.ln_1p() - x
    }
}

fn logshift_m1<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        // M(x) = Σ_{j≥1} (-1)^{j+1} x^{j+2} / (j(j+2))
        let mut term = x * x * x / T::lit(3.0);
        let mut sum = term;
        for j in 1..60usize {
            let ratio = -x
                * (T::from_usize(j).expect("small integer")
                    * T::from_usize(j + 2).expect("small integer"))
                / (T::from_usize(j + 1).expect("small integer")
                    * T::from_usize(j + 3).expect("small integer"));
            term = term * ratio;
            sum = sum + term;
            if term.abs() <= sum.abs() * T::epsilon() {
                break;
            }
        }
        sum
    } else {
        let l = x.ln_1p();
        let half = T::lit(0.5);
        let quarter = T::lit(0.25);
        x * x * half * l - x * x * quarter + x * half - l * half
    }
}

/// `∫₀ˣ (1+y)^(-q) dy`, uniformly stable in `q` (including `q = 1`).
fn rational_partial<T: Real>(q: T, x: T) -> T {
    let l = x.ln_1p();
    l * em1((T::one() - q) * l)
}

// ---------------------------------------------------------------------------
// Staircase

/// Interval index k and bounds [lo, hi) of the decade interval containing y:
/// k = 0 for [0, 1), k = 1 for [1, 10), and so on. Exact at the boundaries.
fn staircase_interval<T: Real>(y: T) -> (usize, T, T) {
    let ten = T::lit(10.0);
    let mut k = 0usize;
    let mut lo = T::zero();
    let mut hi = T::one();
    while y >= hi {
        lo = hi;
        hi = hi * ten;
        k += 1;
        if k > 400 {
            break; // unreachable for finite y; guards pathological input
        }
    }
    (k, lo, hi)
}

/// Accumulates `Σ level_k · weight(lo_k, min(hi_k, x))` over the decade
/// intervals covering `[0, x]`.
fn staircase_sum<T: Real>(v1: T, v2: T, x: T, weight: impl Fn(T, T) -> T) -> T {
    let ten = T::lit(10.0);
    let mut total = T::zero();
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut k = 0usize;
    while lo < x {
        let v = if k % 2 == 0 { v2 } else { v1 };
        let ub = hi.min(x);
        total = total + v * weight(lo, ub);
        lo = hi;
        hi = hi * ten;
        k += 1;
        if k > 400 {
            break;
        }
    }
    total
}

fn staircase_inverse<T: Real>(v1: T, v2: T, t: T) -> core::result::Result<T, ()> {
    let ten = T::lit(10.0);
    let mut acc = T::zero();
    let mut lo = T::zero();
    let mut hi = T::one();
    for k in 0..400usize {
        let v = if k % 2 == 0 { v2 } else { v1 };
        let seg = v * (hi - lo);
        if acc + seg >= t {
            if v > T::zero() {
                return Ok(lo + (t - acc) / v);
            }
            if acc >= t {
                return Ok(lo);
            }
        }
        acc = acc + seg;
        lo = hi;
        hi = hi * ten;
        if !hi.is_finite() {
            break;
        }
    }
    if acc >= t {
        Ok(lo)
    } else {
        Err(())
    }
}

// ---------------------------------------------------------------------------
// Piecewise-linear machinery shared by Table and PiecewiseLinearOscillating.
// Node lists hold the first level before the first node and the last level
// after the last node; between nodes the value is linear.

fn plo_nodes<T: Real>(a_breaks: &[T], b_breaks: &[T], c1: T) -> Vec<(T, T)> {
    let mut nodes = Vec::with_capacity(a_breaks.len() * 2);
    let mut level = c1;
    for i in 0..a_breaks.len() {
        if i > 0 {
            level = level + (a_breaks[i] - b_breaks[i - 1]);
        }
        nodes.push((a_breaks[i], level));
        nodes.push((b_breaks[i], level));
    }
    nodes
}

fn pw_eval<T: Real>(nodes: &[(T, T)], y: T) -> T {
    let (y0, h0) = nodes[0];
    if y <= y0 {
        return h0;
    }
    let mut prev = (y0, h0);
    for &(yk, hk) in &nodes[1..] {
        if y <= yk {
            let s = (hk - prev.1) / (yk - prev.0);
            return prev.1 + s * (y - prev.0);
        }
        prev = (yk, hk);
    }
    prev.1
}

fn pw_cumulative<T: Real>(nodes: &[(T, T)], x: T) -> T {
    let half = T::lit(0.5);
    let (y0, h0) = nodes[0];
    if x <= y0 {
        return h0 * x;
    }
    let mut total = h0 * y0;
    let mut prev = (y0, h0);
    for &(yk, hk) in &nodes[1..] {
        if x <= yk {
            let s = (hk - prev.1) / (yk - prev.0);
            let w = x - prev.0;
            return total + prev.1 * w + s * w * w * half;
        }
        total = total + (prev.1 + hk) * (yk - prev.0) * half;
        prev = (yk, hk);
    }
    total + prev.1 * (x - prev.0)
}

fn pw_first_moment<T: Real>(nodes: &[(T, T)], x: T) -> T {
    let half = T::lit(0.5);
    let third = T::one() / T::lit(3.0);
    // ∫_a^b y (h_a + s(y-a)) dy with b possibly clipped to x.
    let linear_piece = |a: T, ha: T, s: T, b: T| -> T {
        let sq = (b * b - a * a) * half;
        let cube = (b * b * b - a * a * a) * third;
        ha * sq + s * (cube - a * sq)
    };
    let (y0, h0) = nodes[0];
    if x <= y0 {
        return h0 * x * x * half;
    }
    let mut total = h0 * y0 * y0 * half;
    let mut prev = (y0, h0);
    for &(yk, hk) in &nodes[1..] {
        let s = (hk - prev.1) / (yk - prev.0);
        if x <= yk {
            return total + linear_piece(prev.0, prev.1, s, x);
        }
        total = total + linear_piece(prev.0, prev.1, s, yk);
        prev = (yk, hk);
    }
    total + linear_piece(prev.0, prev.1, T::zero(), x)
}

fn pw_inverse<T: Real>(nodes: &[(T, T)], t: T) -> Option<T> {
    let half = T::lit(0.5);
    let (y0, h0) = nodes[0];
    let head = h0 * y0;
    if t <= head {
        return Some(t / h0); // h0 > 0 here since head >= t > 0
    }
    let mut acc = head;
    let mut prev = (y0, h0);
    for &(yk, hk) in &nodes[1..] {
        let w_full = yk - prev.0;
        let seg = (prev.1 + hk) * w_full * half;
        if acc + seg >= t {
            let s = (hk - prev.1) / w_full;
            let delta = t - acc;
            if delta == T::zero() {
                return Some(prev.0);
            }
            let disc = (prev.1 * prev.1 + two::<T>() * s * delta).max(T::zero());
            let denom = prev.1 + disc.sqrt();
            if denom > T::zero() {
                return Some(prev.0 + two::<T>() * delta / denom);
            }
            // Flat zero stretch with delta > 0 cannot happen (seg would be 0).
            return None;
        }
        acc = acc + seg;
        prev = (yk, hk);
    }
    let (yn, hn) = prev;
    if hn > T::zero() {
        Some(yn + (t - acc) / hn)
    } else {
        None
    }
}
