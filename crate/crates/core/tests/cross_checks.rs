//! Cross-validation of the closed-form analytics against independent
//! numerical routes: direct quadrature for the intensity integrals and the
//! welfare rate, the stationarity identity at the optimal threshold,
//! closed-form stationary laws, and dense grid search under the threshold
//! optimizer.

use queue_poa_core::asymptotics::{classify_limit, pano_ratio, t99_ratio, tex_limit, LimitClass};
use queue_poa_core::intensity::Family;
use queue_poa_core::loss;
use queue_poa_core::numeric::quadrature::integrate;
use queue_poa_core::queue::{self, QueueParams, ThresholdVector};
use queue_poa_core::{Accuracy64, Intensity64, ModelParams64};

fn zoo() -> Vec<(&'static str, Intensity64)> {
    vec![
        ("constant", Intensity64::constant(1.3).unwrap()),
        ("power_rising", Intensity64::power_law(0.7, 2.0).unwrap()),
        ("power_linear", Intensity64::power_law(1.0, 1.0).unwrap()),
        ("power_singular", Intensity64::power_law(2.0, -0.5).unwrap()),
        ("exp_rising", Intensity64::exponential(0.8).unwrap()),
        ("exp_falling", Intensity64::exponential(-1.0).unwrap()),
        ("log_shift", Intensity64::log_shift().unwrap()),
        ("rational_heavy", Intensity64::rational_shift(2.0).unwrap()),
        ("rational_slow", Intensity64::rational_shift(0.5).unwrap()),
        ("sinusoidal", Intensity64::sinusoidal_offset(2.0, 1.0).unwrap()),
        (
            "staircase",
            Intensity64::staircase_alternating(1.0, 2.0).unwrap(),
        ),
        (
            "table",
            Intensity64::table(vec![(0.0, 2.0), (1.5, 0.5), (4.0, 1.0)]).unwrap(),
        ),
        (
            "ramp_ladder",
            Intensity64::new(Family::PiecewiseLinearOscillating {
                a_breaks: vec![0.0, 3.0, 8.0],
                b_breaks: vec![1.0, 5.0, 10.0],
                c1: 1.0,
            })
            .unwrap(),
        ),
    ]
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// `Λ(x)` by adaptive quadrature of the density itself. The open rule never
/// samples the endpoints, so the integrable singularity of the `α = −1/2`
/// power profile is integrated through the substitution `y = u²`, which
/// makes the integrand bounded.
fn cumulative_quad(name: &str, h: &Intensity64, x: f64) -> f64 {
    let acc = Accuracy64::default();
    if name == "power_singular" {
        integrate(
            |u| 2.0 * u * h.evaluate(u * u).unwrap(),
            0.0,
            x.sqrt(),
            &acc,
        )
        .unwrap()
    } else {
        integrate(|y| h.evaluate(y).unwrap(), 0.0, x, &acc).unwrap()
    }
}

fn first_moment_quad(name: &str, h: &Intensity64, x: f64) -> f64 {
    let acc = Accuracy64::default();
    if name == "power_singular" {
        integrate(
            |u| 2.0 * u * u * u * h.evaluate(u * u).unwrap(),
            0.0,
            x.sqrt(),
            &acc,
        )
        .unwrap()
    } else {
        integrate(|y| y * h.evaluate(y).unwrap(), 0.0, x, &acc).unwrap()
    }
}

#[test]
fn cumulative_matches_quadrature() {
    for (name, h) in zoo() {
        for &x in &[0.03, 0.4, 2.1, 9.5, 61.0, 420.0] {
            let closed = h.cumulative(x).unwrap();
            if !closed.is_finite() {
                continue;
            }
            let quad = cumulative_quad(name, &h, x);
            assert!(
                rel_close(closed, quad, 1e-8),
                "{name} cumulative at x={x}: closed {closed} vs quadrature {quad}"
            );
        }
    }
}

#[test]
fn first_moment_matches_quadrature() {
    for (name, h) in zoo() {
        for &x in &[0.03, 0.4, 2.1, 9.5, 61.0, 420.0] {
            let closed = h.first_moment(x).unwrap();
            if !closed.is_finite() {
                continue;
            }
            let quad = first_moment_quad(name, &h, x);
            assert!(
                rel_close(closed, quad, 1e-8),
                "{name} first moment at x={x}: closed {closed} vs quadrature {quad}"
            );
        }
    }
}

/// The welfare rate has a second form: idle probability times the expected
/// per-customer gain flow `∫₀ˣ c_t (x_e − y) h(y) dy`, evaluated here in a
/// single quadrature rather than as `x_e·Λ − M`.
#[test]
fn welfare_rate_matches_direct_utility_integral() {
    let acc = Accuracy64::default();
    let cases: [(&str, f64, f64, f64); 5] = [
        ("constant", 1.0, 1.0, 4.0),
        ("power_linear", 2.0, 0.7, 2.0),
        ("rational_heavy", 0.5, 1.3, 9.0),
        ("sinusoidal", 1.0, 1.0, 12.0),
        ("power_singular", 1.0, 1.0, 1.0),
    ];
    let all = zoo();
    for (name, mu, c_t, x_e) in cases {
        let h = &all.iter().find(|(n, _)| *n == name).unwrap().1;
        for frac in [0.3, 0.7, 1.0] {
            let x = frac * x_e;
            let lib = loss::social_benefit(h, mu, c_t, x_e, x).unwrap();
            let gain = if name == "power_singular" {
                integrate(
                    |u| 2.0 * u * (x_e - u * u) * h.evaluate(u * u).unwrap(),
                    0.0,
                    x.sqrt(),
                    &acc,
                )
                .unwrap()
            } else {
                integrate(|y| (x_e - y) * h.evaluate(y).unwrap(), 0.0, x, &acc).unwrap()
            };
            let oracle = c_t * gain / (1.0 + cumulative_quad(name, h, x) / mu);
            assert!(
                rel_close(lib, oracle, 1e-8),
                "{name} welfare at x={x}: library {lib} vs quadrature {oracle}"
            );
        }
    }
}

/// The socially optimal threshold is characterized by
/// `x + (x·Λ(x) − M(x))/μ = x_e`; the root found must satisfy the identity
/// and dominate the welfare of every grid candidate.
#[test]
fn optimal_threshold_satisfies_stationarity() {
    let cases: [(&str, f64, f64); 8] = [
        ("constant", 1.0, 4.0),
        ("constant", 3.0, 150.0),
        ("power_rising", 0.7, 3.0),
        ("power_singular", 1.0, 0.5),
        ("exp_falling", 1.0, 20.0),
        ("rational_slow", 0.7, 20.0),
        ("staircase", 1.0, 25.0),
        ("table", 2.0, 3.0),
    ];
    let all = zoo();
    for (name, mu, x_e) in cases {
        let h = &all.iter().find(|(n, _)| *n == name).unwrap().1;
        let x_star = loss::social_optimum(h, mu, x_e).unwrap();
        assert!(
            (0.0..=x_e * (1.0 + 1e-12)).contains(&x_star),
            "{name}: x* {x_star} outside [0, {x_e}]"
        );
        let residual =
            x_star + (x_star * h.cumulative(x_star).unwrap() - h.first_moment(x_star).unwrap()) / mu
                - x_e;
        assert!(
            residual.abs() <= 1e-9 * x_e,
            "{name}: stationarity residual {residual} at x*={x_star}"
        );
        let s_star = loss::social_benefit(h, mu, 1.0, x_e, x_star).unwrap();
        for k in 1..20 {
            let x = x_e * (k as f64) / 20.0;
            let s = loss::social_benefit(h, mu, 1.0, x_e, x).unwrap();
            assert!(
                s_star >= s - 1e-10 * s.abs(),
                "{name}: S({x}) = {s} beats S(x*) = {s_star}"
            );
        }
    }
}

#[test]
fn loss_solution_fields_are_coherent() {
    let params = [
        ModelParams64::new(5.0, 1.0, 1.0, 1.0).unwrap(),
        ModelParams64::new(3.0, 2.0, 1.0, 0.7).unwrap(),
        ModelParams64::new(2.0, 0.5, 0.3, 1.1).unwrap(),
    ];
    for (name, h) in zoo() {
        for p in &params {
            let sol = loss::poa(&h, p).unwrap();
            assert!(
                rel_close(sol.x_e, loss::equilibrium_threshold(p), 1e-15),
                "{name}: x_e mismatch"
            );
            assert!(sol.x_star <= sol.x_e * (1.0 + 1e-12), "{name}: x* > x_e");
            let s_e = loss::social_benefit(&h, p.mu(), p.c_t(), sol.x_e, sol.x_e).unwrap();
            let s_o = loss::social_benefit(&h, p.mu(), p.c_t(), sol.x_e, sol.x_star).unwrap();
            assert!(
                rel_close(sol.s_equilibrium, s_e, 1e-12),
                "{name}: equilibrium welfare mismatch"
            );
            assert!(
                rel_close(sol.s_optimal, s_o, 1e-12),
                "{name}: optimal welfare mismatch"
            );
            assert!(
                rel_close(sol.poa, sol.s_optimal / sol.s_equilibrium, 1e-12),
                "{name}: ratio field mismatch"
            );
            assert!(sol.poa >= 1.0 - 1e-12, "{name}: ratio below one");
        }
    }
}

/// With all thresholds equal the chain is a truncated geometric law, which
/// gives a closed form independent of the product-form accumulation.
#[test]
fn stationary_matches_truncated_geometric() {
    let cases: [(f64, f64, usize); 5] = [
        (0.8, 1.5, 5),
        (2.0, 0.5, 7),
        (0.3, 2.0, 3),
        (1.7, 3.1, 8),
        (1.0, 1.0, 4),
    ];
    for (rho, c, m) in cases {
        let x = ThresholdVector::new(vec![c; m]).unwrap();
        let pi = queue::stationary(rho, &x).unwrap().pi;
        let q: f64 = rho * c;
        for (n, &p) in pi.iter().enumerate() {
            let expect = if (q - 1.0).abs() < 1e-12 {
                1.0 / (m as f64 + 1.0)
            } else {
                q.powi(n as i32) * (1.0 - q) / (1.0 - q.powi(m as i32 + 1))
            };
            assert!(
                (p - expect).abs() <= 1e-13 * expect.max(1.0),
                "rho={rho} c={c} m={m}: pi[{n}] = {p}, closed form {expect}"
            );
        }
    }

    let x = ThresholdVector::new(vec![2.0, 0.4]).unwrap();
    let pi = queue::stationary(1.3, &x).unwrap().pi;
    let w = [1.0, 1.3 * 2.0, 1.3 * 1.3 * 2.0 * 0.4];
    let total: f64 = w.iter().sum();
    for (n, &p) in pi.iter().enumerate() {
        assert!((p - w[n] / total).abs() <= 1e-15, "pi[{n}] = {p}");
    }
}

/// The coordinate-descent optimizer must dominate a dense grid over its own
/// search box.
#[test]
fn queue_optimizer_beats_dense_grid() {
    let instances = [
        QueueParams::new(1.0, 1.0, 22.5, 9.0, 1.0).unwrap(),
        QueueParams::new(0.8, 1.0, 2.6, 1.0, 0.5).unwrap(),
    ];
    for p in &instances {
        assert_eq!(p.n_e(), 2);
        let (x_opt, s_opt) = queue::optimize_social(p, 4).unwrap();
        assert_eq!(x_opt.len(), 2);
        let hi = 2.0 * (p.nu() - 1.0) / p.kappa();
        let mut grid_best = f64::NEG_INFINITY;
        for i in 0..=80 {
            for j in 0..=80 {
                let cand = ThresholdVector::new(vec![
                    hi * (i as f64) / 80.0,
                    hi * (j as f64) / 80.0,
                ])
                .unwrap();
                let s = queue::social_benefit_queue(p, &cand).unwrap();
                grid_best = grid_best.max(s);
            }
        }
        assert!(
            s_opt >= grid_best - 1e-12 * grid_best.abs(),
            "optimizer {s_opt} below dense grid best {grid_best}"
        );
        let s_eq = queue::social_benefit_queue(p, &queue::equilibrium_thresholds(p)).unwrap();
        assert!(s_opt >= s_eq, "optimizer below equilibrium welfare");
    }
}

/// For a flat profile the optimal threshold solves a quadratic, so at huge
/// equilibrium thresholds it becomes a vanishing fraction of `x_e`; for an
/// integrable-tail profile the fraction stays near one half (the welfare
/// numerator degenerates to `x_e − x` balancing against the idle factor).
#[test]
fn optimal_fraction_growing_vs_bounded_tail() {
    let flat = Intensity64::constant(1.0).unwrap();
    let x_e = 1e6;
    let x_star = loss::social_optimum(&flat, 1.0, x_e).unwrap();
    let exact = -1.0 + (1.0 + 2.0 * x_e).sqrt();
    assert!(
        rel_close(x_star, exact, 1e-6),
        "flat: x* {x_star} vs quadratic root {exact}"
    );
    assert!(x_star / x_e < 0.01, "flat: fraction {}", x_star / x_e);

    let heavy = Intensity64::rational_shift(2.0).unwrap();
    let x_e = 1e4;
    let x_star = loss::social_optimum(&heavy, 1.0, x_e).unwrap();
    // For h = (1+y)^{-2}: x·Λ(x) − M(x) = x − ln(1+x), so the stationarity
    // identity collapses to 2x − ln(1+x) = x_e.
    let residual = 2.0 * x_star - (1.0 + x_star).ln() - x_e;
    assert!(
        residual.abs() <= 1e-8 * x_e,
        "heavy tail: residual {residual}"
    );
    let frac = x_star / x_e;
    assert!(
        (0.5..0.51).contains(&frac),
        "heavy tail: fraction {frac} should hover just above one half"
    );
}

#[test]
fn tail_ratio_two_routes_agree() {
    let acc = Accuracy64::default();
    for (name, h) in zoo() {
        for &x in &[0.7, 3.0, 12.0, 80.0, 300.0] {
            if !h.cumulative(x).unwrap().is_finite() {
                continue;
            }
            let direct = t99_ratio(&h, x, &acc).unwrap();
            let quad = pano_ratio(&h, x, &acc).unwrap();
            assert!(
                rel_close(direct, quad, 1e-8),
                "{name} at x={x}: closed {direct} vs quadrature {quad}"
            );
        }
    }
}

#[test]
fn limit_classification_matches_hand_derived_table() {
    let acc = Accuracy64::default();

    let converging: [(Intensity64, f64, f64); 6] = [
        (Intensity64::power_law(2.0, -0.5).unwrap(), 1.5, 1e-6),
        (Intensity64::power_law(1.0, 1.0).unwrap(), 3.0, 1e-6),
        (Intensity64::log_shift().unwrap(), 2.0, 1e-2),
        (Intensity64::rational_shift(1.0).unwrap(), 1.0, 1e-2),
        (Intensity64::sinusoidal_offset(2.0, 1.0).unwrap(), 2.0, 1e-2),
        (Intensity64::rational_shift(2.0).unwrap(), 1.0, 1e-9),
    ];
    for (h, expect, tol) in converging {
        let est = classify_limit(&h, &acc).unwrap();
        match est.classification {
            LimitClass::Converges(v) => assert!(
                (v - expect).abs() <= tol,
                "{h:?}: limit {v}, expected {expect}"
            ),
            other => panic!("{h:?}: classified {other:?}, expected convergence"),
        }
    }

    let exp = Intensity64::exponential(1.0).unwrap();
    assert_eq!(
        classify_limit(&exp, &acc).unwrap().classification,
        LimitClass::Diverges
    );

    let stair = Intensity64::staircase_alternating(1.0, 2.0).unwrap();
    assert_eq!(
        classify_limit(&stair, &acc).unwrap().classification,
        LimitClass::Oscillates
    );
}

/// The log-slope route `g(x) = 2 + x·h′(x)/h(x)` must agree with the mass
/// ratio's limit wherever both settle, including past the overflow point of
/// the exponential profile.
#[test]
fn slope_and_mass_routes_agree_on_limits() {
    let acc = Accuracy64::default();
    let grid: Vec<f64> = (1..=7).map(|k| 10f64.powi(k)).collect();

    let log = Intensity64::log_shift().unwrap();
    let g = tex_limit(&log, &grid, &acc).unwrap();
    let r = classify_limit(&log, &acc).unwrap();
    match (g.classification, r.classification) {
        (LimitClass::Converges(a), LimitClass::Converges(b)) => {
            assert!((a - b).abs() <= 2e-2, "slope {a} vs mass {b}");
        }
        other => panic!("expected both routes to converge, got {other:?}"),
    }

    let exp = Intensity64::exponential(1.0).unwrap();
    assert_eq!(
        tex_limit(&exp, &grid, &acc).unwrap().classification,
        LimitClass::Diverges
    );
    assert_eq!(
        classify_limit(&exp, &acc).unwrap().classification,
        LimitClass::Diverges
    );
}
