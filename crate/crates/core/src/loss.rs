//! Single-slot loss regime: the facility serves one customer at a time and
//! arrivals finding it busy are lost.
//!
//! A customer at distance `y` who joins and is served earns
//! `R - c_w/μ - c_t·y = c_t·(x_e - y)` in expectation, which is nonnegative
//! exactly for `y ≤ x_e`; hence the equilibrium joining threshold
//! `x_e = (Rμ - c_w)/(c_tμ)`. Because only the fraction `1/(1 + Λ(x)/μ)` of
//! arrivals find the server idle, the long-run welfare of threshold `x` is
//!
//! ```text
//! S(x) = c_t · (x_e·Λ(x) - M(x)) / (1 + Λ(x)/μ)
//! ```
//!
//! and the socially optimal threshold `x*` is the unique root of
//! `x + (x·Λ(x) - M(x))/μ = x_e`, always in `[0, x_e]`. The price of anarchy
//! is `S(x*)/S(x_e) ≥ 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::IntensityFunction;
use crate::numeric::root;
use crate::Real;

/// Economic parameters of the facility: service reward `R`, service rate
/// `mu`, waiting cost per unit time `c_w`, travel cost per unit distance
/// `c_t`. Validated so that the dimensionless reward `nu = R·mu/c_w`
/// exceeds 1, which makes the equilibrium threshold strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawModelParams<T>",
    into = "RawModelParams<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + serde::Deserialize<'de>"
    )
)]
pub struct ModelParams<T: Real> {
    r: T,
    mu: T,
    c_w: T,
    c_t: T,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RawModelParams<T> {
    #[serde(rename = "R")]
    pub r: T,
    pub mu: T,
    pub c_w: T,
    pub c_t: T,
}

impl<T: Real> TryFrom<RawModelParams<T>> for ModelParams<T> {
    type Error = Error;

    fn try_from(raw: RawModelParams<T>) -> Result<Self> {
        ModelParams::new(raw.r, raw.mu, raw.c_w, raw.c_t)
    }
}

impl<T: Real> From<ModelParams<T>> for RawModelParams<T> {
    fn from(p: ModelParams<T>) -> Self {
        RawModelParams {
            r: p.r,
            mu: p.mu,
            c_w: p.c_w,
            c_t: p.c_t,
        }
    }
}

impl<T: Real> ModelParams<T> {
    pub fn new(r: T, mu: T, c_w: T, c_t: T) -> Result<Self> {
        for (v, name) in [(r, "R"), (mu, "mu"), (c_w, "c_w"), (c_t, "c_t")] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(format!("{name} must be positive and finite")));
            }
        }
        if !(r * mu > c_w) {
            return Err(Error::invalid(
                "reward rate must exceed the waiting cost of one service (R·mu > c_w)",
            ));
        }
        Ok(Self { r, mu, c_w, c_t })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn c_w(&self) -> T {
        self.c_w
    }

    pub fn c_t(&self) -> T {
        self.c_t
    }

    /// Dimensionless reward `nu = R·mu/c_w > 1`.
    pub fn nu(&self) -> T {
        self.r * self.mu / self.c_w
    }

    /// Threshold scale `kappa = c_t·mu/c_w` (reciprocal length).
    pub fn kappa(&self) -> T {
        self.c_t * self.mu / self.c_w
    }

    /// Equilibrium joining threshold `x_e = (nu - 1)/kappa`.
    pub fn x_e(&self) -> T {
        (self.nu() - T::one()) / self.kappa()
    }
}

/// Solved loss instance: thresholds, welfare at both, and their ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSolution<T> {
    pub x_e: T,
    pub x_star: T,
    pub s_equilibrium: T,
    pub s_optimal: T,
    pub poa: T,
}

/// The individually optimal joining threshold `x_e`.
pub fn equilibrium_threshold<T: Real>(p: &ModelParams<T>) -> T {
    p.x_e()
}

/// Welfare rate `S(x)` accrued when customers within `x` join. The
/// equilibrium threshold `x_e` sets the per-customer gain `c_t(x_e - y)`;
/// `x` may exceed `x_e`, in which case the marginal joiners lose.
pub fn social_benefit<T: Real>(
    h: &IntensityFunction<T>,
    mu: T,
    c_t: T,
    x_e: T,
    x: T,
) -> Result<T> {
    if !(mu.is_finite() && mu > T::zero()) {
        return Err(Error::invalid("mu must be positive and finite"));
    }
    let lambda = h.cumulative(x)?;
    let m = h.first_moment(x)?;
    Ok(c_t * (x_e * lambda - m) / (T::one() + lambda / mu))
}

/// The socially optimal threshold: the unique root of
/// `f(x) = x + (x·Λ(x) - M(x))/μ = x_e` on `[0, x_e]`. `f` is continuous and
/// strictly increasing with `f(0) = 0` and `f(x_e) ≥ x_e`, so the bracket is
/// always valid; solved to relative tolerance `1e-12`.
pub fn social_optimum<T: Real>(h: &IntensityFunction<T>, mu: T, x_e: T) -> Result<T> {
    if !(mu.is_finite() && mu > T::zero()) {
        return Err(Error::invalid("mu must be positive and finite"));
    }
    if !x_e.is_finite() || x_e < T::zero() {
        return Err(Error::domain("threshold x_e must be nonnegative and finite"));
    }
    if x_e == T::zero() {
        return Ok(T::zero());
    }
    let f = |x: T| x + (x * h.cumulative_nn(x) - h.first_moment_nn(x)) / mu - x_e;
    root::bisect_secant(f, T::zero(), x_e, T::lit(1e-12))
}

/// Solves the instance with the threshold given directly. Exposed for
/// threshold sweeps; [`poa`] derives `x_e` from [`ModelParams`] instead.
///
/// By convention `x_e = 0` returns the all-zero solution with `poa = 1`
/// (nobody joins either way; the ratio tends to 1 as `x_e ↓ 0`). A positive
/// `x_e` with no arrival mass inside it leaves welfare identically zero and
/// the ratio undefined, reported as [`Error::ZeroMass`].
pub fn solve_at_threshold<T: Real>(
    h: &IntensityFunction<T>,
    mu: T,
    c_t: T,
    x_e: T,
) -> Result<LossSolution<T>> {
    if !x_e.is_finite() || x_e < T::zero() {
        return Err(Error::domain("threshold x_e must be nonnegative and finite"));
    }
    if x_e == T::zero() {
        return Ok(LossSolution {
            x_e: T::zero(),
            x_star: T::zero(),
            s_equilibrium: T::zero(),
            s_optimal: T::zero(),
            poa: T::one(),
        });
    }
    if h.cumulative(x_e)? == T::zero() {
        return Err(Error::ZeroMass(x_e.as_f64()));
    }
    let x_star = social_optimum(h, mu, x_e)?;
    let s_equilibrium = social_benefit(h, mu, c_t, x_e, x_e)?;
    let s_optimal = social_benefit(h, mu, c_t, x_e, x_star)?;
    Ok(LossSolution {
        x_e,
        x_star,
        s_equilibrium,
        s_optimal,
        poa: s_optimal / s_equilibrium,
    })
}

/// Full solution for a parameterized instance: `x_e`, `x*`, welfare at both
/// thresholds, and their ratio `PoA = S(x*)/S(x_e) ≥ 1`.
pub fn poa<T: Real>(h: &IntensityFunction<T>, p: &ModelParams<T>) -> Result<LossSolution<T>> {
    solve_at_threshold(h, p.mu(), p.c_t(), p.x_e())
}
