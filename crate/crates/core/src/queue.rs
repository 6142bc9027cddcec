//! Observable multi-slot queue with uniform arrival intensity.
//!
//! Customers arrive along the line with constant intensity `λ` per unit
//! distance, observe the number `i` already in the system, and join iff the
//! reward beats the waiting plus travel cost:
//! `R − c_w·(i+1)/μ − c_t·d ≥ 0`. That rule is a vector of distance
//! thresholds, one per observed state, and the system is a birth-death chain
//! with birth rate `λ·x_i` in state `i`. This module computes the
//! equilibrium thresholds, the stationary distribution, the aggregate
//! benefit rate of an arbitrary threshold vector, a numerically optimized
//! vector, the resulting price of anarchy, and a closed-form lower bound
//! on the PoA for a one-parameter family of instances on which it grows
//! without bound.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::IntensityFunction;
use crate::loss;
use crate::numeric::golden::scan_then_golden;
use crate::Real;

/// Largest admitted state count; `⌊ν⌋` beyond this is rejected at
/// construction (the threshold vector and chain become impractically large).
const MAX_STATES: f64 = 1e5;

/// Seed for the optimizer's random restart vectors; fixed so results are
/// reproducible run to run.
const RESTART_SEED: u64 = 0x5e_ed_51_de;

/// Parameters of the uniform-intensity observable queue.
///
/// `lambda` is arrival intensity per unit distance, `mu` the service rate,
/// `r` the service reward, `c_w` the waiting cost per unit time, `c_t` the
/// travel cost per unit distance. Requires `ν = R·μ/c_w > 1` so that at
/// least one state admits joiners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawQueueParams<T>",
    into = "RawQueueParams<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + serde::Deserialize<'de>"
    )
)]
pub struct QueueParams<T: Real> {
    lambda: T,
    mu: T,
    r: T,
    c_w: T,
    c_t: T,
}

#[derive(Serialize, Deserialize)]
struct RawQueueParams<T> {
    lambda: T,
    mu: T,
    #[serde(rename = "R")]
    r: T,
    c_w: T,
    c_t: T,
}

impl<T: Real> From<QueueParams<T>> for RawQueueParams<T> {
    fn from(p: QueueParams<T>) -> Self {
        RawQueueParams {
            lambda: p.lambda,
            mu: p.mu,
            r: p.r,
            c_w: p.c_w,
            c_t: p.c_t,
        }
    }
}

impl<T: Real> TryFrom<RawQueueParams<T>> for QueueParams<T> {
    type Error = Error;
    fn try_from(raw: RawQueueParams<T>) -> Result<Self> {
        QueueParams::new(raw.lambda, raw.mu, raw.r, raw.c_w, raw.c_t)
    }
}

impl<T: Real> QueueParams<T> {
    pub fn new(lambda: T, mu: T, r: T, c_w: T, c_t: T) -> Result<Self> {
        for (name, v) in [
            ("lambda", lambda),
            ("mu", mu),
            ("R", r),
            ("c_w", c_w),
            ("c_t", c_t),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(format!(
                    "{name} must be positive and finite, got {}",
                    v.as_f64()
                )));
            }
        }
        let p = QueueParams {
            lambda,
            mu,
            r,
            c_w,
            c_t,
        };
        if !(p.nu() > T::one()) {
            return Err(Error::invalid(
                "need R*mu > c_w: otherwise even an empty system attracts no one",
            ));
        }
        if p.nu().as_f64() > MAX_STATES + 1.0 {
            return Err(Error::invalid(format!(
                "R*mu/c_w = {} admits more than {MAX_STATES} states",
                p.nu().as_f64()
            )));
        }
        Ok(p)
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }
    pub fn mu(&self) -> T {
        self.mu
    }
    pub fn r(&self) -> T {
        self.r
    }
    pub fn c_w(&self) -> T {
        self.c_w
    }
    pub fn c_t(&self) -> T {
        self.c_t
    }

    /// Arrival-to-service rate ratio per unit distance.
    pub fn rho(&self) -> T {
        self.lambda / self.mu
    }

    /// `ν = R·μ/c_w`: reward measured in expected service-period waiting costs.
    pub fn nu(&self) -> T {
        self.r * self.mu / self.c_w
    }

    /// `κ = c_t·μ/c_w`: travel cost per distance in the same units.
    pub fn kappa(&self) -> T {
        self.c_t * self.mu / self.c_w
    }

    /// Number of states that admit joiners, `⌊ν⌋`. ν within 1e-12 relative
    /// of an integer is snapped to it first, so float noise cannot shift the
    /// floor across a boundary.
    pub fn n_e(&self) -> usize {
        let nu = self.nu();
        let nearest = nu.round();
        let snapped = if (nu - nearest).abs() <= T::lit(1e-12) * nu {
            nearest
        } else {
            nu
        };
        snapped.floor().as_f64() as usize
    }

    /// Equilibrium joining threshold observed-state `i`, `(ν − (i+1))/κ`,
    /// clamped at 0.
    fn x_e(&self, i: usize) -> T {
        let idx = T::from_usize(i + 1).expect("state index fits scalar");
        ((self.nu() - idx) / self.kappa()).max(T::zero())
    }
}

/// Joining thresholds indexed by observed queue length; entries finite,
/// ≥ 0, non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<T>",
    into = "Vec<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + serde::Deserialize<'de>"
    )
)]
pub struct ThresholdVector<T: Real>(Vec<T>);

impl<T: Real> From<ThresholdVector<T>> for Vec<T> {
    fn from(x: ThresholdVector<T>) -> Self {
        x.0
    }
}

impl<T: Real> TryFrom<Vec<T>> for ThresholdVector<T> {
    type Error = Error;
    fn try_from(v: Vec<T>) -> Result<Self> {
        ThresholdVector::new(v)
    }
}

impl<T: Real> ThresholdVector<T> {
    pub fn new(v: Vec<T>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::invalid("threshold vector must be non-empty"));
        }
        if let Some(bad) = v.iter().find(|t| !(t.is_finite() && **t >= T::zero())) {
            return Err(Error::invalid(format!(
                "thresholds must be finite and >= 0, got {}",
                bad.as_f64()
            )));
        }
        Ok(ThresholdVector(v))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest threshold: the distance beyond which no arrival ever joins.
    pub fn max(&self) -> T {
        self.0.iter().fold(T::zero(), |m, &v| m.max(v))
    }
}

/// Stationary distribution over states `0..=n` of the threshold chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + serde::Deserialize<'de>"
))]
pub struct StationaryDistribution<T: Real> {
    pub pi: Vec<T>,
}

impl<T: Real> StationaryDistribution<T> {
    /// Max-norm residual of the detailed-balance relations
    /// `ρ·x_i·π_i = π_{i+1}` (rates in units of μ).
    pub fn balance_residual(&self, rho: T, x: &ThresholdVector<T>) -> T {
        let mut worst = T::zero();
        for (i, &xi) in x.as_slice().iter().enumerate() {
            let res = (rho * xi * self.pi[i] - self.pi[i + 1]).abs();
            worst = worst.max(res);
        }
        worst
    }
}

/// Equilibrium threshold vector `x_i^e = (ν−(i+1))/κ`, `i = 0..n_e−1`;
/// strictly decreasing, last entry 0 exactly when ν is an integer.
pub fn equilibrium_thresholds<T: Real>(p: &QueueParams<T>) -> ThresholdVector<T> {
    let v: Vec<T> = (0..p.n_e()).map(|i| p.x_e(i)).collect();
    ThresholdVector(v)
}

/// Stationary distribution of the birth-death chain with birth rate
/// `λ·x_i = μ·ρ·x_i` in state `i` and death rate `μ`, via the product form
/// `π_i ∝ ρ^i·x₀⋯x_{i−1}`. A running rescale keeps the unnormalized
/// weights inside the scalar range for long vectors.
pub fn stationary<T: Real>(rho: T, x: &ThresholdVector<T>) -> Result<StationaryDistribution<T>> {
    if !(rho.is_finite() && rho > T::zero()) {
        return Err(Error::invalid("rho must be positive and finite"));
    }
    let big = T::max_value().sqrt();
    let mut w: Vec<T> = Vec::with_capacity(x.len() + 1);
    w.push(T::one());
    let mut cur = T::one();
    for &xi in x.as_slice() {
        cur = cur * rho * xi;
        if cur > big {
            let inv = cur.recip();
            for v in &mut w {
                *v = *v * inv;
            }
            cur = T::one();
        }
        w.push(cur);
    }
    let sum = w.iter().fold(T::zero(), |s, &v| s + v);
    let pi = w.iter().map(|&v| v / sum).collect();
    Ok(StationaryDistribution { pi })
}

/// Aggregate benefit rate of the threshold vector `x`:
///
/// ```text
/// S(x₀,…) = Σₙ (x^e_{n−1} − x_{n−1}/2)·λ·c_t·ρ^{n−1}·x₀⋯x_{n−1}
///           ───────────────────────────────────────────────────
///                      1 + Σₙ ρⁿ·x₀⋯x_{n−1}
/// ```
///
/// Joins in state `n−1` happen at rate `λ·x_{n−1}·π_{n−1}` and the joiner's
/// expected gain is `c_t·(x^e_{n−1} − d)` with `d` uniform on `[0, x_{n−1}]`.
/// `x` must have length `n_e`.
pub fn social_benefit_queue<T: Real>(p: &QueueParams<T>, x: &ThresholdVector<T>) -> Result<T> {
    if x.len() != p.n_e() {
        return Err(Error::invalid(format!(
            "threshold vector has {} entries; these parameters admit {}",
            x.len(),
            p.n_e()
        )));
    }
    Ok(benefit_rate(p, x.as_slice()))
}

fn benefit_rate<T: Real>(p: &QueueParams<T>, x: &[T]) -> T {
    let rho = p.rho();
    let half = T::lit(0.5);
    let big = T::max_value().sqrt();
    // t = ρ^{n−1}·x₀⋯x_{n−1}; num and den rescale together with t, which
    // leaves the ratio unchanged.
    let mut t = T::one();
    let mut num = T::zero();
    let mut den = T::one();
    for (i, &xi) in x.iter().enumerate() {
        if i > 0 {
            t = t * rho;
        }
        t = t * xi;
        if t > big {
            let inv = t.recip();
            num = num * inv;
            den = den * inv;
            t = T::one();
        }
        num = num + (p.x_e(i) - xi * half) * t;
        den = den + rho * t;
    }
    p.lambda * p.c_t * num / den
}

/// Maximizes the benefit rate over threshold vectors by coordinate-wise
/// golden-section sweeps from several starts: the single-threshold loss
/// optimum padded with zeros, the equilibrium vector, and `restarts` random
/// vectors in `[0, x₀^e]^{n_e}` from a fixed-seed generator. Coordinates
/// whose equilibrium threshold is 0 are held at 0: any joining there has
/// negative expected gain. Returns the best vector and its benefit rate,
/// a certified lower bound on the optimum, not a proven global maximum.
pub fn optimize_social<T: Real>(
    p: &QueueParams<T>,
    restarts: usize,
) -> Result<(ThresholdVector<T>, T)> {
    let n = p.n_e();
    let x0e = p.x_e(0);
    let free: Vec<bool> = (0..n).map(|i| p.x_e(i) > T::zero()).collect();

    let mut starts: Vec<Vec<T>> = Vec::with_capacity(restarts + 2);
    let single = loss::social_optimum(&IntensityFunction::constant(p.lambda)?, p.mu, x0e)?;
    let mut first = vec![T::zero(); n];
    first[0] = single;
    starts.push(first);
    starts.push(equilibrium_thresholds(p).0);
    let mut rng = StdRng::seed_from_u64(RESTART_SEED);
    for _ in 0..restarts {
        starts.push(
            (0..n)
                .map(|i| {
                    let u: f64 = rng.random();
                    if free[i] {
                        x0e * T::lit(u)
                    } else {
                        T::zero()
                    }
                })
                .collect(),
        );
    }

    let mut best_x: Option<Vec<T>> = None;
    let mut best_s = T::neg_infinity();
    for start in starts {
        let (x, s) = refine(p, start, &free, x0e);
        // Strictly-greater replacement: ties keep the earliest start, and
        // the equilibrium start guarantees the result never falls below it.
        if s > best_s {
            best_s = s;
            best_x = Some(x);
        }
    }
    Ok((ThresholdVector(best_x.expect("at least two starts")), best_s))
}

/// One multi-sweep coordinate ascent. Each sweep line-searches every free
/// coordinate on `[0, 2·x₀^e]`; a move is kept only if it improves the
/// value by more than 1e−13 relative, and sweeping stops once a whole sweep
/// gains less than 1e−10 relative.
fn refine<T: Real>(p: &QueueParams<T>, mut x: Vec<T>, free: &[bool], x0e: T) -> (Vec<T>, T) {
    let hi = T::lit(2.0) * x0e;
    let x_tol = T::lit(1e-11) * hi.max(T::one());
    let mut best = benefit_rate(p, &x);
    for _ in 0..200 {
        let before = best;
        for i in 0..x.len() {
            if !free[i] {
                continue;
            }
            let (xi, si) = scan_then_golden(
                |v| {
                    let mut trial = x.clone();
                    trial[i] = v;
                    benefit_rate(p, &trial)
                },
                T::zero(),
                hi,
                25,
                x_tol,
            );
            if si > best + T::lit(1e-13) * best.abs().max(T::one()) {
                x[i] = xi;
                best = si;
            }
        }
        if best - before <= T::lit(1e-10) * before.abs().max(T::one()) {
            break;
        }
    }
    (x, best)
}

/// Price of anarchy: optimized benefit rate over the equilibrium benefit
/// rate. At least 1, because the equilibrium vector is one of the
/// optimizer's starts.
pub fn poa_queue<T: Real>(p: &QueueParams<T>, restarts: usize) -> Result<T> {
    let s_eq = social_benefit_queue(p, &equilibrium_thresholds(p))?;
    let (_, s_opt) = optimize_social(p, restarts)?;
    Ok(s_opt / s_eq)
}

/// Closed-form PoA lower bound for the two-state family indexed by
/// `s > 2`: take `c_t = 1`, `c_w = s²·μ`, `R = (2s−1)·s²/(s−1)`, so that
/// `x₀^e = s³/(s−1)` and `x₁^e = s²/(s−1)`. The bound is the benefit ratio
/// of the feasible vector `(x*, 0)` to the equilibrium vector, which
/// simplifies to
///
/// ```text
/// 2·(1/(1/x* + ρ))·(1 − x*/(2x₀^e))·(1 + ρx₀^e + ρ²x₀^e·x₁^e)/(x₀^e + ρ·(x₁^e)²)
/// ```
///
/// and grows like `s` as `s → ∞`.
pub fn lower_bound_final<T: Real>(s: T, rho: T, mu: T) -> Result<T> {
    if !(s.is_finite() && s > T::lit(2.0)) {
        return Err(Error::domain(
            "the two-state construction needs s > 2 (otherwise it has three states or more)",
        ));
    }
    for (name, v) in [("rho", rho), ("mu", mu)] {
        if !(v.is_finite() && v > T::zero()) {
            return Err(Error::invalid(format!(
                "{name} must be positive and finite, got {}",
                v.as_f64()
            )));
        }
    }
    let one = T::one();
    let two = T::lit(2.0);
    let x0e = s * s * s / (s - one);
    let x1e = s * s / (s - one);
    let h = IntensityFunction::constant(rho * mu)?;
    let x_star = loss::social_optimum(&h, mu, x0e)?;
    let occupied = one / (x_star.recip() + rho);
    let slack = one - x_star / (two * x0e);
    let chain = (one + rho * x0e + rho * rho * x0e * x1e) / (x0e + rho * x1e * x1e);
    Ok(two * occupied * slack * chain)
}
