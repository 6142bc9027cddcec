//! Built-in verification suite.
//!
//! Each check exercises one documented property of the crate end to end
//! (closed forms against independent oracles, classifier verdicts on known
//! profiles, optimizer dominance, simulation agreement) and reports a
//! pass/fail with a diagnostic. The CLI `verify` subcommand runs the whole
//! list; the checks are also callable one at a time for test harnesses.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::asymptotics::{classify_limit, default_grid, pano_ratio, t99_ratio, LimitClass};
use crate::intensity::IntensityFunction;
use crate::loss::{self, ModelParams};
use crate::numeric::quadrature::IntegralAccuracy;
use crate::queue::{
    equilibrium_thresholds, lower_bound_final, optimize_social, poa_queue, social_benefit_queue,
    stationary, QueueParams, ThresholdVector,
};
use crate::sim::{simulate_loss, simulate_queue, ServiceDistribution, SimConfig};

/// Ordinals of the available checks: `1..=CHECK_COUNT`.
pub const CHECK_COUNT: usize = 13;

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

/// Runs every check in order.
pub fn run_all() -> Vec<CriterionReport> {
    (1..=CHECK_COUNT).map(run_criterion).collect()
}

/// Runs one check by ordinal (1-based). Panics on an out-of-range ordinal.
pub fn run_criterion(id: usize) -> CriterionReport {
    let (name, limit, body): (&str, Option<f64>, fn(&mut Vec<String>)) = match id {
        1 => ("power-law tail ratios", Some(1.0), check_power_law_ratios),
        2 => (
            "vanishing-threshold efficiency",
            Some(1.0),
            check_vanishing_threshold,
        ),
        3 => (
            "bounded-mass efficiency approach",
            Some(5.0),
            check_bounded_mass_approach,
        ),
        4 => (
            "slowly-settling limit classification",
            Some(10.0),
            check_slow_limits,
        ),
        5 => (
            "alternating-profile ratio bounds",
            Some(5.0),
            check_alternating_bounds,
        ),
        6 => ("monotone-profile ratio sides", None, check_monotone_sides),
        7 => ("flat-profile closed forms", None, check_flat_closed_forms),
        8 => ("intensity-scale coupling", None, check_scale_coupling),
        9 => (
            "stationary distribution cross-check",
            None,
            check_stationary_oracle,
        ),
        10 => (
            "multi-slot benefit and optimizer dominance",
            None,
            check_queue_benefit,
        ),
        11 => (
            "two-state bound growth and consistency",
            Some(5.0),
            check_two_state_bound,
        ),
        12 => ("simulation corroboration", Some(120.0), check_simulation),
        13 => ("single-state reduction", None, check_reduction),
        _ => panic!("check ordinal out of range: {id}"),
    };
    let mut failures = Vec::new();
    let start = Instant::now();
    body(&mut failures);
    let seconds = start.elapsed().as_secs_f64();
    if let Some(lim) = limit {
        if seconds > lim {
            failures.push(format!("runtime {seconds:.2}s exceeds the {lim}s budget"));
        }
    }
    CriterionReport {
        id,
        name: name.to_string(),
        passed: failures.is_empty(),
        seconds,
        detail: if failures.is_empty() {
            "ok".to_string()
        } else {
            failures.join("; ")
        },
    }
}

fn acc() -> IntegralAccuracy<f64> {
    IntegralAccuracy::default()
}

fn fail(failures: &mut Vec<String>, cond: bool, msg: impl FnOnce() -> String) {
    if !cond {
        failures.push(msg());
    }
}

fn check_power_law_ratios(failures: &mut Vec<String>) {
    for alpha in [-0.5, 0.0, 1.0, 2.0] {
        let h = IntensityFunction::power_law(1.0, alpha).unwrap();
        let want = alpha + 2.0;
        for &x in &default_grid::<f64>() {
            let r = t99_ratio(&h, x, &acc()).unwrap();
            fail(failures, (r - want).abs() <= 1e-9, || {
                format!("ratio(alpha={alpha}, x={x}) = {r}, want {want}")
            });
        }
        let est = classify_limit(&h, &acc()).unwrap();
        match est.classification {
            LimitClass::Converges(v) => fail(failures, (v - want).abs() <= 1e-6, || {
                format!("limit(alpha={alpha}) = {v}, want {want}")
            }),
            other => failures.push(format!("limit(alpha={alpha}) classified {other:?}")),
        }
    }
}

fn check_vanishing_threshold(failures: &mut Vec<String>) {
    let profiles = [
        ("const", IntensityFunction::constant(1.0).unwrap()),
        ("linear", IntensityFunction::power_law(1.0, 1.0).unwrap()),
        ("exp", IntensityFunction::exponential(1.0).unwrap()),
    ];
    for (label, h) in profiles {
        let sol = loss::solve_at_threshold(&h, 1.0, 1.0, 1e-3).unwrap();
        fail(failures, (1.0..=1.01).contains(&sol.poa), || {
            format!("poa({label}, x_e=1e-3) = {}", sol.poa)
        });
    }
}

fn check_bounded_mass_approach(failures: &mut Vec<String>) {
    let h = IntensityFunction::rational_shift(2.0).unwrap();
    let mut prev = f64::INFINITY;
    for x_e in [1e2, 1e3, 1e4] {
        let sol = loss::solve_at_threshold(&h, 1.0, 1.0, x_e).unwrap();
        fail(failures, sol.poa < prev, || {
            format!("poa not decreasing: poa({x_e}) = {} after {prev}", sol.poa)
        });
        prev = sol.poa;
        if x_e == 1e4 {
            fail(failures, (sol.poa - 1.0).abs() <= 0.02, || {
                format!("poa(1e4) = {} not within 0.02 of 1", sol.poa)
            });
        }
    }
}

fn check_slow_limits(failures: &mut Vec<String>) {
    let cases: [(&str, IntensityFunction<f64>, Option<f64>); 4] = [
        ("log", IntensityFunction::log_shift().unwrap(), Some(2.0)),
        (
            "rational-1",
            IntensityFunction::rational_shift(1.0).unwrap(),
            Some(1.0),
        ),
        ("exp", IntensityFunction::exponential(1.0).unwrap(), None),
        (
            "sin-offset",
            IntensityFunction::sinusoidal_offset(2.0, 1.0).unwrap(),
            Some(2.0),
        ),
    ];
    for (label, h, want) in cases {
        let est = classify_limit(&h, &acc()).unwrap();
        match (want, est.classification) {
            (Some(w), LimitClass::Converges(v)) => {
                fail(failures, (v - w).abs() <= 0.01, || {
                    format!("limit({label}) = {v}, want {w} +- 0.01")
                });
            }
            (None, LimitClass::Diverges) => {}
            (_, other) => failures.push(format!("limit({label}) classified {other:?}")),
        }
    }
}

fn check_alternating_bounds(failures: &mut Vec<String>) {
    let h = IntensityFunction::staircase_alternating(1.0, 2.0).unwrap();
    for x in [2.0, 200.0, 2e4] {
        let r = pano_ratio(&h, x, &acc()).unwrap();
        fail(failures, r <= 20.0 / 11.0 + 1e-6, || {
            format!("ratio({x}) = {r} exceeds 20/11")
        });
    }
    for x in [20.0, 2000.0, 2e5] {
        let r = pano_ratio(&h, x, &acc()).unwrap();
        fail(failures, r >= 20.0 / 9.0 - 1e-6, || {
            format!("ratio({x}) = {r} below 20/9")
        });
    }
    let est = classify_limit(&h, &acc()).unwrap();
    fail(failures, est.classification == LimitClass::Oscillates, || {
        format!("alternating profile classified {:?}", est.classification)
    });
}

fn check_monotone_sides(failures: &mut Vec<String>) {
    let rising: [(&str, IntensityFunction<f64>); 5] = [
        ("sqrt", IntensityFunction::power_law(1.0, 0.5).unwrap()),
        ("linear", IntensityFunction::power_law(1.0, 1.0).unwrap()),
        ("square", IntensityFunction::power_law(1.0, 2.0).unwrap()),
        ("exp", IntensityFunction::exponential(1.0).unwrap()),
        ("log", IntensityFunction::log_shift().unwrap()),
    ];
    let falling: [(&str, IntensityFunction<f64>); 5] = [
        ("exp-decay", IntensityFunction::exponential(-1.0).unwrap()),
        (
            "rational-2",
            IntensityFunction::rational_shift(2.0).unwrap(),
        ),
        (
            "rational-half",
            IntensityFunction::rational_shift(0.5).unwrap(),
        ),
        ("inv-sqrt", IntensityFunction::power_law(1.0, -0.5).unwrap()),
        (
            "ramp-down",
            IntensityFunction::table(vec![(0.0, 2.0), (1.0, 1.0)]).unwrap(),
        ),
    ];
    for &x in &default_grid::<f64>() {
        for (label, h) in &rising {
            let r = t99_ratio(h, x, &acc()).unwrap();
            fail(failures, r >= 2.0 - 1e-9, || {
                format!("rising {label}: ratio({x}) = {r} < 2")
            });
        }
        for (label, h) in &falling {
            let r = t99_ratio(h, x, &acc()).unwrap();
            fail(failures, r <= 2.0 + 1e-9, || {
                format!("falling {label}: ratio({x}) = {r} > 2")
            });
        }
    }
}

fn check_flat_closed_forms(failures: &mut Vec<String>) {
    // h≡1, μ=1: the optimal threshold solves x²/2 + x = x_e and
    // S(x) = x_e·x − x²/2 over 1 + x.
    let h: IntensityFunction<f64> = IntensityFunction::constant(1.0).unwrap();
    let cases: [(f64, f64, f64); 2] = [(4.0, 2.0, 1.25), (12.0, 4.0, 13.0 / 9.0)];
    for (x_e, x_star, poa) in cases {
        let sol = loss::solve_at_threshold(&h, 1.0, 1.0, x_e).unwrap();
        fail(failures, (sol.x_star - x_star).abs() <= 1e-8, || {
            format!("x*({x_e}) = {}, want {x_star}", sol.x_star)
        });
        fail(failures, (sol.poa - poa).abs() <= 1e-8, || {
            format!("poa({x_e}) = {}, want {poa}", sol.poa)
        });
    }
}

fn check_scale_coupling(failures: &mut Vec<String>) {
    let families: [IntensityFunction<f64>; 6] = [
        IntensityFunction::constant(1.0).unwrap(),
        IntensityFunction::power_law(1.0, 1.0).unwrap(),
        IntensityFunction::power_law(2.0, -0.5).unwrap(),
        IntensityFunction::exponential(0.7).unwrap(),
        IntensityFunction::log_shift().unwrap(),
        IntensityFunction::sinusoidal_offset(2.0, 1.0).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(8_101);
    for k in 0..20 {
        let h = &families[k % families.len()];
        let b = 10f64.powf(rng.random::<f64>() * 2.0 - 1.0);
        let x_e = 10f64.powf(rng.random::<f64>() * 2.5 - 1.0);
        let scaled = loss::solve_at_threshold(&h.scaled(b).unwrap(), 1.0, 1.0, x_e).unwrap();
        let slowed = loss::solve_at_threshold(h, 1.0 / b, 1.0, x_e).unwrap();
        fail(
            failures,
            (scaled.poa - slowed.poa).abs() <= 1e-10 * scaled.poa.max(1.0),
            || {
                format!(
                    "triple {k} (b={b:.4}, x_e={x_e:.4}): poa {} vs {}",
                    scaled.poa, slowed.poa
                )
            },
        );
    }
}

/// Dense partial-pivot Gaussian elimination; the balance system is tiny.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Stationary distribution by solving the balance equations directly:
/// normalization plus flow balance at states `0..m-1` (the last balance row
/// is linearly dependent).
fn stationary_by_linear_solve(rho: f64, x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let n = m + 1;
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    a[0] = vec![1.0; n];
    b[0] = 1.0;
    for i in 0..m {
        let row = i + 1;
        if i == 0 {
            a[row][0] = -rho * x[0];
            a[row][1] = 1.0;
        } else {
            a[row][i - 1] = rho * x[i - 1];
            a[row][i] = -(rho * x[i] + 1.0);
            a[row][i + 1] = 1.0;
        }
    }
    solve_dense(a, b)
}

fn check_stationary_oracle(failures: &mut Vec<String>) {
    let x = ThresholdVector::<f64>::new(vec![2.0, 1.0]).unwrap();
    let pi = stationary(1.0, &x).unwrap().pi;
    for (i, want) in [0.2, 0.4, 0.4].into_iter().enumerate() {
        fail(failures, (pi[i] - want).abs() <= 1e-12, || {
            format!("pinned case state {i}: {} vs {want}", pi[i])
        });
    }

    let mut rng = StdRng::seed_from_u64(90_210);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let m = 1 + (rng.random::<f64>() * 8.0) as usize;
        let rho = 0.1 + rng.random::<f64>() * 2.9;
        let xs: Vec<f64> = (0..m)
            .map(|_| {
                if rng.random::<f64>() < 0.1 {
                    0.0
                } else {
                    rng.random::<f64>() * 5.0
                }
            })
            .collect();
        let x = ThresholdVector::new(xs.clone()).unwrap();
        let product = stationary(rho, &x).unwrap().pi;
        let solved = stationary_by_linear_solve(rho, &xs);
        let dev = product
            .iter()
            .zip(&solved)
            .map(|(p, s)| (p - s).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(dev);
        fail(failures, dev <= 1e-12, || {
            format!("instance {k} (rho={rho:.3}, x={xs:?}): max deviation {dev:.2e}")
        });
    }
    let _ = worst;
}

fn check_queue_benefit(failures: &mut Vec<String>) {
    let p = QueueParams::<f64>::new(1.0, 1.0, 3.0, 1.0, 1.0).unwrap();
    let s_eq = social_benefit_queue(&p, &equilibrium_thresholds(&p)).unwrap();
    fail(failures, (s_eq - 0.6).abs() <= 1e-12, || {
        format!("equilibrium benefit {} vs 0.6", s_eq)
    });
    let single = ThresholdVector::new(vec![-1.0 + 5f64.sqrt(), 0.0, 0.0]).unwrap();
    let s_single = social_benefit_queue(&p, &single).unwrap();
    let (_, s_opt) = optimize_social(&p, 8).unwrap();
    fail(failures, s_opt >= s_eq, || {
        format!("optimizer {} below equilibrium {}", s_opt, s_eq)
    });
    fail(failures, s_opt >= s_single, || {
        format!("optimizer {} below single-threshold point {}", s_opt, s_single)
    });
}

fn check_two_state_bound(failures: &mut Vec<String>) {
    let mut prev = 0.0f64;
    for s in [5.0, 10.0, 50.0, 100.0, 500.0, 1000.0] {
        let bound = lower_bound_final(s, 1.0, 1.0).unwrap();
        fail(failures, bound > prev, || {
            format!("bound({s}) = {bound} not above bound at previous s = {prev}")
        });
        prev = bound;

        // The bound must equal the benefit ratio of (x*, 0) to equilibrium
        // in the explicitly constructed instance.
        let mu = 1.0;
        let rho = 1.0;
        let p = QueueParams::new(
            rho * mu,
            mu,
            (2.0 * s - 1.0) * s * s / (s - 1.0),
            s * s * mu,
            1.0,
        )
        .unwrap();
        let xe = equilibrium_thresholds(&p);
        let h = IntensityFunction::constant(p.lambda()).unwrap();
        let x_star = loss::social_optimum(&h, mu, xe.as_slice()[0]).unwrap();
        let feasible = ThresholdVector::new(vec![x_star, 0.0]).unwrap();
        let ratio = social_benefit_queue(&p, &feasible).unwrap()
            / social_benefit_queue(&p, &xe).unwrap();
        fail(failures, (bound - ratio).abs() <= 1e-8 * ratio.max(1.0), || {
            format!("bound({s}) = {bound} vs benefit ratio {ratio}")
        });
    }
    fail(failures, prev > 50.0, || {
        format!("bound(1000) = {prev} not above 50")
    });
}

fn check_simulation(failures: &mut Vec<String>) {
    let cfg = SimConfig::default(); // 10⁶ arrivals, 20 replications
    let z = 3.0;

    struct LossCase {
        label: &'static str,
        h: IntensityFunction<f64>,
        p: ModelParams<f64>,
        x: f64,
    }
    let loss_cases = [
        LossCase {
            label: "flat",
            h: IntensityFunction::constant(1.0).unwrap(),
            p: ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap(),
            x: 2.0,
        },
        LossCase {
            label: "linear",
            h: IntensityFunction::power_law(2.0 * std::f64::consts::PI, 1.0).unwrap(),
            p: ModelParams::new(3.0, 1.0, 1.0, 1.0).unwrap(),
            x: 1.0,
        },
        LossCase {
            label: "heavy-tail",
            h: IntensityFunction::rational_shift(2.0).unwrap(),
            p: ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap(),
            x: 3.0,
        },
    ];

    let mut flat_exponential_mean_se = (0.0, 0.0);
    for case in &loss_cases {
        let s = loss::social_benefit(&case.h, case.p.mu(), case.p.c_t(), case.p.x_e(), case.x)
            .unwrap();
        let lambda_x = case.h.cumulative(case.x).unwrap();
        let idle = 1.0 / (1.0 + lambda_x / case.p.mu());
        let out = simulate_loss(&case.h, &case.p, case.x, &cfg).unwrap();
        fail(
            failures,
            (out.benefit_rate_mean - s).abs() <= z * out.benefit_rate_stderr,
            || {
                format!(
                    "loss {}: benefit {} +- {} vs analytic {s}",
                    case.label, out.benefit_rate_mean, out.benefit_rate_stderr
                )
            },
        );
        fail(
            failures,
            (out.occupancy[0] - idle).abs() <= z * out.occupancy_stderr[0],
            || {
                format!(
                    "loss {}: idle share {} +- {} vs analytic {idle}",
                    case.label, out.occupancy[0], out.occupancy_stderr[0]
                )
            },
        );
        if case.label == "flat" {
            flat_exponential_mean_se = (out.benefit_rate_mean, out.benefit_rate_stderr);
        }
    }

    // Service-law insensitivity on the flat case.
    {
        let case = &loss_cases[0];
        let det_cfg = SimConfig {
            service: ServiceDistribution::Deterministic,
            ..cfg
        };
        let out = simulate_loss(&case.h, &case.p, case.x, &det_cfg).unwrap();
        let s = 2.0;
        fail(
            failures,
            (out.benefit_rate_mean - s).abs() <= z * out.benefit_rate_stderr,
            || {
                format!(
                    "deterministic-service benefit {} +- {} vs analytic {s}",
                    out.benefit_rate_mean, out.benefit_rate_stderr
                )
            },
        );
        let (m_exp, se_exp) = flat_exponential_mean_se;
        let gap_se = (out.benefit_rate_stderr.powi(2) + se_exp.powi(2)).sqrt();
        fail(
            failures,
            (out.benefit_rate_mean - m_exp).abs() <= z * gap_se,
            || {
                format!(
                    "service laws disagree: {} vs {} (+- {})",
                    out.benefit_rate_mean, m_exp, gap_se
                )
            },
        );
    }

    struct QueueCase {
        label: &'static str,
        p: QueueParams<f64>,
        x: Vec<f64>,
    }
    let queue_cases = [
        QueueCase {
            label: "equilibrium",
            p: QueueParams::new(1.0, 1.0, 3.0, 1.0, 1.0).unwrap(),
            x: vec![2.0, 1.0, 0.0],
        },
        QueueCase {
            label: "off-equilibrium",
            p: QueueParams::new(1.0, 1.0, 2.5, 1.0, 1.0).unwrap(),
            x: vec![2.0, 1.0],
        },
    ];
    for case in &queue_cases {
        let x = ThresholdVector::new(case.x.clone()).unwrap();
        let s = social_benefit_queue(&case.p, &x).unwrap();
        let pi = stationary(case.p.rho(), &x).unwrap().pi;
        let out = simulate_queue(&case.p, &x, &cfg).unwrap();
        fail(
            failures,
            (out.benefit_rate_mean - s).abs() <= z * out.benefit_rate_stderr,
            || {
                format!(
                    "queue {}: benefit {} +- {} vs analytic {s}",
                    case.label, out.benefit_rate_mean, out.benefit_rate_stderr
                )
            },
        );
        for i in 0..pi.len() {
            if pi[i] == 0.0 {
                fail(failures, out.occupancy[i] == 0.0, || {
                    format!(
                        "queue {}: unreachable state {i} occupied {}",
                        case.label, out.occupancy[i]
                    )
                });
            } else {
                fail(
                    failures,
                    (out.occupancy[i] - pi[i]).abs() <= z * out.occupancy_stderr[i],
                    || {
                        format!(
                            "queue {}: state {i} share {} +- {} vs analytic {}",
                            case.label, out.occupancy[i], out.occupancy_stderr[i], pi[i]
                        )
                    },
                );
            }
        }
    }
}

fn check_reduction(failures: &mut Vec<String>) {
    let mut rng = StdRng::seed_from_u64(131);
    for k in 0..10 {
        let mu = 0.5 + rng.random::<f64>() * 1.5;
        let c_w = 0.5 + rng.random::<f64>() * 1.5;
        let c_t = 0.5 + rng.random::<f64>() * 1.5;
        let lambda = 0.2 + rng.random::<f64>() * 2.8;
        let u = 0.02 + rng.random::<f64>() * 0.96;
        let r = c_w / mu * (1.0 + u);

        let q = QueueParams::new(lambda, mu, r, c_w, c_t).unwrap();
        assert_eq!(q.n_e(), 1, "construction guarantees a single state");
        let h = IntensityFunction::constant(lambda).unwrap();
        let m = ModelParams::new(r, mu, c_w, c_t).unwrap();
        let sol = loss::poa(&h, &m).unwrap();

        let (x, s) = optimize_social(&q, 2).unwrap();
        let poa_q = poa_queue(&q, 2).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        fail(failures, rel(x.as_slice()[0], sol.x_star) <= 1e-8, || {
            format!("set {k}: threshold {} vs {}", x.as_slice()[0], sol.x_star)
        });
        fail(failures, rel(s, sol.s_optimal) <= 1e-8, || {
            format!("set {k}: benefit {} vs {}", s, sol.s_optimal)
        });
        fail(failures, rel(poa_q, sol.poa) <= 1e-8, || {
            format!("set {k}: poa {} vs {}", poa_q, sol.poa)
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_solve_matches_known_system() {
        // 2x + y = 5, x − y = 1 → x = 2, y = 1.
        let sol = solve_dense(vec![vec![2.0, 1.0], vec![1.0, -1.0]], vec![5.0, 1.0]);
        assert!((sol[0] - 2.0).abs() < 1e-14);
        assert!((sol[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn balance_solve_matches_product_form_example() {
        let pi = stationary_by_linear_solve(1.0, &[2.0, 1.0]);
        for (got, want) in pi.iter().zip([0.2, 0.4, 0.4]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn fast_checks_pass() {
        for id in [1, 2, 7, 10] {
            let report = run_criterion(id);
            assert!(report.passed, "check {id}: {}", report.detail);
        }
    }
}
