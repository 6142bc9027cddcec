//! Adaptive integration on finite intervals.
//!
//! Each segment is scored by a 15-point Kronrod extension of the 7-point
//! Gauss rule; the segment with the largest error estimate is bisected until
//! the combined estimate meets the requested tolerance or the segment budget
//! runs out. Awkward abscissae (kinks, jump points, boundary-layer clusters)
//! can be passed as mandatory split points so no rule straddles them.

use crate::error::{Error, Result};
use crate::Real;

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralAccuracy<T> {
    /// Relative tolerance on the integral value.
    pub rel_tol: T,
    /// Absolute floor below which the relative test is not applied.
    pub abs_tol: T,
    /// Maximum number of live segments before giving up.
    pub max_subdivisions: usize,
}

impl<T: Real> Default for IntegralAccuracy<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-13),
            max_subdivisions: 400,
        }
    }
}

impl<T: Real> IntegralAccuracy<T> {
    /// Accuracy with a custom relative tolerance, keeping the other defaults.
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

// 15-point Kronrod abscissae on [0, 1] (mirrored around the midpoint); the
// odd-indexed entries are the embedded 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// One Gauss-Kronrod pass over [a, b]: returns (value, error estimate).
fn gauss_kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let center = (a + b) * T::lit(0.5);

    let fc = f(center);
    let mut resk = T::lit(WGK[7]) * fc;
    let mut resg = T::lit(WG[3]) * fc;
    let mut fv = [T::zero(); 7];

    for (j, fs) in fv.iter_mut().enumerate() {
        let dx = half * T::lit(XGK[j]);
        let fsum = f(center - dx) + f(center + dx);
        *fs = fsum;
        resk = resk + T::lit(WGK[j]) * fsum;
        if j % 2 == 1 {
            resg = resg + T::lit(WG[j / 2]) * fsum;
        }
    }

    let value = resk * half;

    // Error rescaling in the style of classic Kronrod codes: compare against
    // the rule's own measure of integrand variation so near-exact segments
    // are not flagged by pure roundoff.
    let reskh = resk * T::lit(0.5);
    let mut resasc = T::lit(WGK[7]) * (fc - reskh).abs();
    for (j, fs) in fv.iter().enumerate() {
        resasc = resasc + T::lit(WGK[j]) * (*fs - reskh).abs();
    }
    resasc = resasc * half.abs();

    let mut err = ((resk - resg) * half).abs();
    if resasc > T::zero() && err > T::zero() {
        let scaled = (T::lit(200.0) * err / resasc).powf(T::lit(1.5));
        err = resasc * scaled.min(T::one());
    }
    (value, err)
}

/// Integrates `f` over `[a, b]` with no interior split points.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, acc: &IntegralAccuracy<T>) -> Result<T> {
    integrate_with_nodes(f, a, b, &[], acc)
}

/// Integrates `f` over `[a, b]`, seeding segment boundaries at `nodes`.
///
/// Nodes outside `(a, b)` are ignored; duplicates are merged. The integrand
/// must be finite on the open interval (integrable endpoint singularities are
/// fine: endpoints are never evaluated).
pub fn integrate_with_nodes<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    nodes: &[T],
    acc: &IntegralAccuracy<T>,
) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration bounds must be finite"));
    }
    if a == b {
        return Ok(T::zero());
    }
    if a > b {
        return Err(Error::domain("integration bounds must be ordered"));
    }

    let mut cuts: Vec<T> = nodes
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b)
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).expect("finite nodes"));
    cuts.dedup();
    if cuts.len() + 1 > acc.max_subdivisions {
        return Err(Error::invalid(format!(
            "{} split points exceed the subdivision budget {}",
            cuts.len(),
            acc.max_subdivisions
        )));
    }

    let mut segments: Vec<Segment<T>> = Vec::with_capacity(cuts.len() + 1);
    let mut lo = a;
    for cut in cuts.into_iter().chain(core::iter::once(b)) {
        let (value, error) = gauss_kronrod(&f, lo, cut);
        segments.push(Segment {
            a: lo,
            b: cut,
            value,
            error,
        });
        lo = cut;
    }

    loop {
        let mut total = T::zero();
        let mut total_err = T::zero();
        let mut worst = 0usize;
        let mut worst_err = T::neg_infinity();
        for (i, s) in segments.iter().enumerate() {
            total = total + s.value;
            total_err = total_err + s.error;
            if s.error > worst_err {
                worst_err = s.error;
                worst = i;
            }
        }
        if !total.is_finite() {
            return Err(Error::domain("integrand is not finite on the interval"));
        }
        let tol = acc.abs_tol.max(acc.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        if segments.len() >= acc.max_subdivisions {
            return Err(Error::QuadratureNoConverge {
                error: total_err.as_f64(),
                segments: segments.len(),
            });
        }

        let Segment { a: sa, b: sb, .. } = segments[worst];
        let mid = (sa + sb) * T::lit(0.5);
        if mid <= sa || mid >= sb {
            // Interval at floating-point resolution; nothing left to split.
            return Err(Error::QuadratureNoConverge {
                error: total_err.as_f64(),
                segments: segments.len(),
            });
        }
        let (v1, e1) = gauss_kronrod(&f, sa, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, sb);
        segments[worst] = Segment {
            a: sa,
            b: mid,
            value: v1,
            error: e1,
        };
        segments.push(Segment {
            a: mid,
            b: sb,
            value: v2,
            error: e2,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acc() -> IntegralAccuracy<f64> {
        IntegralAccuracy::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| x * x, 0.0, 1.0, &acc()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let v = integrate(|x: f64| x.exp(), 0.0, 1.0, &acc()).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_full_period_is_zero() {
        let v = integrate(|x: f64| x.sin(), 0.0, 2.0 * std::f64::consts::PI, &acc()).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn integrable_endpoint_singularity_converges() {
        // ∫0^1 x^(-1/2) dx = 2; the endpoint is never sampled.
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &acc()).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn jump_with_node_is_exact() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let v = integrate_with_nodes(f, 0.0, 1.0, &[0.3], &acc()).unwrap();
        assert!((v - 1.7).abs() < 1e-14);
    }

    #[test]
    fn boundary_layer_needs_seeded_nodes() {
        // Mass concentrated in [1 - 1e-6, 1]; uniform sampling sees zero.
        let k = 1e7f64;
        let f = move |t: f64| (k * (t - 1.0)).exp();
        let nodes: Vec<f64> = (1..50).map(|j| 1.0 - 2f64.powi(-j)).collect();
        let v = integrate_with_nodes(f, 0.0, 1.0, &nodes, &acc()).unwrap();
        assert!((v - 1.0 / k).abs() < 1e-13 * (1.0 / k) + 1e-16, "got {v}");
    }

    #[test]
    fn budget_exhaustion_reports_failure() {
        let tight = IntegralAccuracy {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_subdivisions: 4,
        };
        let r = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, &tight);
        assert!(matches!(r, Err(Error::QuadratureNoConverge { .. })));
    }

    #[test]
    fn reversed_bounds_rejected() {
        let r = integrate(|x: f64| x, 1.0, 0.0, &acc());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn works_at_f32() {
        let acc = IntegralAccuracy::<f32> {
            rel_tol: 1e-5,
            abs_tol: 1e-6,
            max_subdivisions: 100,
        };
        let v = integrate(|x: f32| x * x, 0.0f32, 1.0f32, &acc).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }
}
