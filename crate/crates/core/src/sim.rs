//! Discrete-event Monte Carlo oracle for both systems.
//!
//! The simulator shares no formulas with the analytic modules beyond the
//! model definition itself: it draws arrivals, distances, and service times,
//! runs the admission dynamics, and reports realized benefit per unit time
//! plus time-weighted state occupancy. Agreement within sampling error is
//! therefore evidence that the closed forms are right.
//!
//! Replications are independent streams of one counter-based generator, so
//! results are bit-identical for a given `(seed, config)` regardless of how
//! replications are scheduled across threads.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::Exp;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intensity::IntensityFunction;
use crate::loss::ModelParams;
use crate::queue::{QueueParams, ThresholdVector};

/// Service-time law; the mean is always `1/μ` from the model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ServiceDistribution {
    Exponential,
    Deterministic,
}

fn default_service() -> ServiceDistribution {
    ServiceDistribution::Exponential
}
fn default_horizon() -> u64 {
    1_000_000
}
fn default_warmup() -> u64 {
    10_000
}
fn default_seed() -> u64 {
    42
}
fn default_replications() -> u32 {
    20
}

/// Monte Carlo run configuration. Every field has a default, so a config
/// document may specify any subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default = "default_service")]
    pub service: ServiceDistribution,
    /// Arrivals per replication (joiners and balkers both count).
    #[serde(default = "default_horizon")]
    pub horizon_events: u64,
    /// Arrivals discarded before accrual starts.
    #[serde(default = "default_warmup")]
    pub warmup_events: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    /// When > 0, loss-system runs additionally report per-distance-bucket
    /// mean realized utility (queue runs ignore this).
    #[serde(default)]
    pub distance_bins: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            service: default_service(),
            horizon_events: default_horizon(),
            warmup_events: default_warmup(),
            seed: default_seed(),
            replications: default_replications(),
            distance_bins: 0,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.horizon_events <= self.warmup_events {
            return Err(Error::invalid(
                "horizon_events must exceed warmup_events",
            ));
        }
        if self.replications < 2 {
            return Err(Error::invalid(
                "need at least 2 replications for a standard error",
            ));
        }
        Ok(())
    }
}

/// Mean realized utility of joiners whose distance fell in `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBucket {
    pub lo: f64,
    pub hi: f64,
    pub joined: u64,
    pub mean_utility: f64,
}

/// Replication-aggregated Monte Carlo estimate.
///
/// `occupancy` is the time-weighted state distribution after warmup, and the
/// standard errors are across replications (sample standard deviation of the
/// per-replication means divided by √replications).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub benefit_rate_mean: f64,
    pub benefit_rate_stderr: f64,
    pub occupancy: Vec<f64>,
    pub occupancy_stderr: Vec<f64>,
    pub joined_count: u64,
    pub balked_count: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distance_profile: Option<Vec<DistanceBucket>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy)]
enum ServiceSampler {
    Exp(Exp<f64>),
    Det(f64),
}

impl ServiceSampler {
    fn new(kind: ServiceDistribution, mu: f64) -> Self {
        match kind {
            ServiceDistribution::Exponential => {
                ServiceSampler::Exp(Exp::new(mu).expect("mu validated positive"))
            }
            ServiceDistribution::Deterministic => ServiceSampler::Det(mu.recip()),
        }
    }

    fn draw(&self, rng: &mut ChaCha12Rng) -> f64 {
        match self {
            ServiceSampler::Exp(d) => rng.sample(*d),
            ServiceSampler::Det(s) => *s,
        }
    }
}

struct RepOutcome {
    rate: f64,
    occ: Vec<f64>,
    joined: u64,
    balked: u64,
    /// (joiner count, utility sum) per distance bucket.
    buckets: Vec<(u64, f64)>,
}

fn stream_rng(seed: u64, rep: u32) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

fn merge(
    reps: Vec<RepOutcome>,
    bucket_edges: Option<&[(f64, f64)]>,
    warnings: Vec<String>,
) -> SimResult {
    let n = reps.len();
    let nf = n as f64;
    let mean = reps.iter().map(|r| r.rate).sum::<f64>() / nf;
    let var = reps.iter().map(|r| (r.rate - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let states = reps[0].occ.len();
    let mut occupancy = vec![0.0; states];
    let mut occupancy_stderr = vec![0.0; states];
    for s in 0..states {
        let m = reps.iter().map(|r| r.occ[s]).sum::<f64>() / nf;
        let v = reps.iter().map(|r| (r.occ[s] - m).powi(2)).sum::<f64>() / (nf - 1.0);
        occupancy[s] = m;
        occupancy_stderr[s] = (v / nf).sqrt();
    }
    let distance_profile = bucket_edges.map(|edges| {
        edges
            .iter()
            .enumerate()
            .map(|(b, &(lo, hi))| {
                let joined: u64 = reps.iter().map(|r| r.buckets[b].0).sum();
                let util: f64 = reps.iter().map(|r| r.buckets[b].1).sum();
                DistanceBucket {
                    lo,
                    hi,
                    joined,
                    mean_utility: if joined > 0 { util / joined as f64 } else { 0.0 },
                }
            })
            .collect()
    });
    SimResult {
        benefit_rate_mean: mean,
        benefit_rate_stderr: (var / nf).sqrt(),
        occupancy,
        occupancy_stderr,
        joined_count: reps.iter().map(|r| r.joined).sum(),
        balked_count: reps.iter().map(|r| r.balked).sum(),
        distance_profile,
        warnings,
    }
}

fn no_arrivals_result(states: usize, warnings: Vec<String>) -> SimResult {
    let mut occupancy = vec![0.0; states];
    occupancy[0] = 1.0;
    SimResult {
        benefit_rate_mean: 0.0,
        benefit_rate_stderr: 0.0,
        occupancy,
        occupancy_stderr: vec![0.0; states],
        joined_count: 0,
        balked_count: 0,
        distance_profile: None,
        warnings,
    }
}

/// Simulates the single-slot system at joining threshold `x`: arrivals are
/// Poisson with rate `Λ(x)`, distances have density `h/Λ(x)` on `[0, x]`,
/// and an arrival joins iff the server is idle. Each joiner accrues
/// `R − c_w·(service duration) − c_t·(distance)`.
pub fn simulate_loss(
    h: &IntensityFunction<f64>,
    p: &ModelParams<f64>,
    x: f64,
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::invalid("threshold x must be finite and >= 0"));
    }
    let lambda_x = h.cumulative(x)?;
    if lambda_x == 0.0 {
        return Ok(no_arrivals_result(2, Vec::new()));
    }
    let edges: Option<Vec<(f64, f64)>> = (cfg.distance_bins > 0).then(|| {
        let w = x / cfg.distance_bins as f64;
        (0..cfg.distance_bins)
            .map(|b| (b as f64 * w, (b + 1) as f64 * w))
            .collect()
    });
    let service = ServiceSampler::new(cfg.service, p.mu());
    let reps: Vec<RepOutcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| loss_rep(h, p, x, lambda_x, service, cfg, rep))
        .collect::<Result<_>>()?;
    Ok(merge(reps, edges.as_deref(), Vec::new()))
}

fn loss_rep(
    h: &IntensityFunction<f64>,
    p: &ModelParams<f64>,
    x: f64,
    lambda_x: f64,
    service: ServiceSampler,
    cfg: &SimConfig,
    rep: u32,
) -> Result<RepOutcome> {
    let mut rng = stream_rng(cfg.seed, rep);
    let gap = Exp::new(lambda_x).expect("positive rate");
    let (r, c_w, c_t) = (p.r(), p.c_w(), p.c_t());

    let mut t = 0.0f64;
    let mut cut = f64::INFINITY;
    let mut accrued = 0.0f64;
    let mut busy = 0.0f64;
    // Span of the service in progress, if any; settled intervals fold into
    // `busy` clipped below at `cut`.
    let mut current: Option<(f64, f64)> = None;
    let mut joined = 0u64;
    let mut balked = 0u64;
    let mut buckets = vec![(0u64, 0.0f64); cfg.distance_bins];

    for idx in 0..cfg.horizon_events {
        if idx == cfg.warmup_events {
            cut = t;
        }
        t += rng.sample(gap);
        // The distance is drawn for balkers too, so the random stream does
        // not depend on the admission path.
        let u: f64 = rng.random();
        let d = h.inverse_cumulative(u * lambda_x)?;
        let idle = current.map_or(true, |(_, end)| end <= t);
        if idle {
            if let Some((s0, s1)) = current.take() {
                busy += (s1 - s0.max(cut)).max(0.0);
            }
            let sv = service.draw(&mut rng);
            current = Some((t, t + sv));
            if idx >= cfg.warmup_events {
                joined += 1;
                let utility = r - c_w * sv - c_t * d;
                accrued += utility;
                if cfg.distance_bins > 0 {
                    let b = ((d / x * cfg.distance_bins as f64) as usize)
                        .min(cfg.distance_bins - 1);
                    buckets[b].0 += 1;
                    buckets[b].1 += utility;
                }
            }
        } else if idx >= cfg.warmup_events {
            balked += 1;
        }
    }
    let t_end = t;
    if let Some((s0, s1)) = current {
        busy += (s1.min(t_end) - s0.max(cut)).max(0.0);
    }
    let elapsed = t_end - cut;
    let busy_frac = busy / elapsed;
    Ok(RepOutcome {
        rate: accrued / elapsed,
        occ: vec![1.0 - busy_frac, busy_frac],
        joined,
        balked,
        buckets,
    })
}

/// Simulates the multi-slot system under threshold vector `x`: arrivals are
/// Poisson with rate `λ·max(x)`, distances uniform on `[0, max(x)]`, and an
/// arrival seeing `i` in the system joins iff `i < len(x)` and its distance
/// is ≤ `x_i`. Service is FIFO; each joiner accrues
/// `R − c_w·(sojourn) − c_t·(distance)`, credited to its arrival window.
///
/// Deterministic service makes the state process non-Markovian, so the
/// product-form comparison no longer applies; such runs carry a warning.
pub fn simulate_queue(
    p: &QueueParams<f64>,
    x: &ThresholdVector<f64>,
    cfg: &SimConfig,
) -> Result<SimResult> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if cfg.service == ServiceDistribution::Deterministic {
        warnings.push(
            "deterministic service in the multi-slot system: analytics not guaranteed \
             (stationary formulas assume exponential service)"
                .to_string(),
        );
    }
    let states = x.len() + 1;
    let xmax = x.max();
    if xmax == 0.0 {
        return Ok(no_arrivals_result(states, warnings));
    }
    let service = ServiceSampler::new(cfg.service, p.mu());
    let reps: Vec<RepOutcome> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| queue_rep(p, x.as_slice(), xmax, service, cfg, rep))
        .collect();
    Ok(merge(reps, None, warnings))
}

fn queue_rep(
    p: &QueueParams<f64>,
    x: &[f64],
    xmax: f64,
    service: ServiceSampler,
    cfg: &SimConfig,
    rep: u32,
) -> RepOutcome {
    let mut rng = stream_rng(cfg.seed, rep);
    let gap = Exp::new(p.lambda() * xmax).expect("positive rate");
    let (r, c_w, c_t) = (p.r(), p.c_w(), p.c_t());

    let mut t = 0.0f64;
    let mut cut = f64::INFINITY;
    let mut last_event = 0.0f64;
    let mut occ = vec![0.0f64; x.len() + 1];
    let mut accrued = 0.0f64;
    let mut joined = 0u64;
    let mut balked = 0u64;
    // Customers in the system, arrival order: (arrival index, join time, distance).
    let mut fifo: VecDeque<(u64, f64, f64)> = VecDeque::new();
    let mut next_dep = f64::INFINITY;

    // Accumulates time spent in `state` from `last_event` to `now`, clipped
    // below at the accrual cut.
    fn dwell(occ: &mut [f64], state: usize, last_event: &mut f64, now: f64, cut: f64) {
        let span = now - last_event.max(cut);
        if span > 0.0 {
            occ[state] += span;
        }
        *last_event = now;
    }

    for idx in 0..cfg.horizon_events {
        if idx == cfg.warmup_events {
            cut = t;
        }
        t += rng.sample(gap);
        while !fifo.is_empty() && next_dep <= t {
            let dep_t = next_dep;
            dwell(&mut occ, fifo.len(), &mut last_event, dep_t, cut);
            let (cidx, join_t, d) = fifo.pop_front().expect("nonempty");
            if cidx >= cfg.warmup_events {
                accrued += r - c_w * (dep_t - join_t) - c_t * d;
            }
            next_dep = if fifo.is_empty() {
                f64::INFINITY
            } else {
                // The next customer entered service at this departure.
                dep_t + service.draw(&mut rng)
            };
        }
        dwell(&mut occ, fifo.len(), &mut last_event, t, cut);
        let u: f64 = rng.random();
        let d = xmax * u;
        let i = fifo.len();
        if i < x.len() && d <= x[i] {
            fifo.push_back((idx, t, d));
            if i == 0 {
                next_dep = t + service.draw(&mut rng);
            }
            if idx >= cfg.warmup_events {
                joined += 1;
            }
        } else if idx >= cfg.warmup_events {
            balked += 1;
        }
    }
    let t_end = t;
    // Benefits of customers still inside are realized by letting the server
    // drain; their sojourns belong to joins inside the window. Occupancy
    // integration stops at the last arrival.
    while let Some((cidx, join_t, d)) = fifo.pop_front() {
        let dep_t = next_dep;
        if cidx >= cfg.warmup_events {
            accrued += r - c_w * (dep_t - join_t) - c_t * d;
        }
        if !fifo.is_empty() {
            next_dep = dep_t + service.draw(&mut rng);
        }
    }
    let elapsed = t_end - cut;
    for v in &mut occ {
        *v /= elapsed;
    }
    RepOutcome {
        rate: accrued / elapsed,
        occ,
        joined,
        balked,
        buckets: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queue::{equilibrium_thresholds, social_benefit_queue, stationary};

    fn small_cfg() -> SimConfig {
        SimConfig {
            horizon_events: 30_000,
            warmup_events: 2_000,
            replications: 6,
            ..SimConfig::default()
        }
    }

    fn within(err: f64, stderr: f64, sigmas: f64) {
        assert!(
            err.abs() <= sigmas * stderr.max(1e-12),
            "|{err}| > {sigmas}·{stderr}"
        );
    }

    #[test]
    fn identical_configs_reproduce_bitwise() {
        let h = IntensityFunction::constant(1.0).unwrap();
        let p = ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap();
        let cfg = SimConfig {
            horizon_events: 5_000,
            warmup_events: 500,
            replications: 3,
            ..SimConfig::default()
        };
        let a = simulate_loss(&h, &p, 2.0, &cfg).unwrap();
        let b = simulate_loss(&h, &p, 2.0, &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_loss(&h, &p, 2.0, &SimConfig { seed: 7, ..cfg }).unwrap();
        assert_ne!(a.benefit_rate_mean, c.benefit_rate_mean);
    }

    #[test]
    fn loss_run_tracks_analytic_benefit_and_idle_share() {
        // h≡1, μ=1, R=5 → x_e=4; at x=2: S=2 and long-run idle share 1/3.
        let h = IntensityFunction::constant(1.0).unwrap();
        let p = ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap();
        let out = simulate_loss(&h, &p, 2.0, &small_cfg()).unwrap();
        within(out.benefit_rate_mean - 2.0, out.benefit_rate_stderr, 5.0);
        within(out.occupancy[0] - 1.0 / 3.0, out.occupancy_stderr[0], 5.0);
        assert!(out.joined_count + out.balked_count == 6 * 28_000);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn loss_insensitive_to_service_law() {
        let h = IntensityFunction::constant(1.0).unwrap();
        let p = ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap();
        let cfg = SimConfig {
            service: ServiceDistribution::Deterministic,
            ..small_cfg()
        };
        let out = simulate_loss(&h, &p, 2.0, &cfg).unwrap();
        within(out.benefit_rate_mean - 2.0, out.benefit_rate_stderr, 5.0);
        within(out.occupancy[0] - 1.0 / 3.0, out.occupancy_stderr[0], 5.0);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn zero_threshold_never_arrives() {
        let h = IntensityFunction::constant(1.0).unwrap();
        let p = ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap();
        let out = simulate_loss(&h, &p, 0.0, &small_cfg()).unwrap();
        assert_eq!(out.benefit_rate_mean, 0.0);
        assert_eq!(out.joined_count, 0);
        assert_eq!(out.occupancy, vec![1.0, 0.0]);
    }

    #[test]
    fn queue_run_tracks_benefit_and_occupancy() {
        let p = QueueParams::new(1.0, 1.0, 3.0, 1.0, 1.0).unwrap();
        let xe = equilibrium_thresholds(&p);
        let s = social_benefit_queue(&p, &xe).unwrap();
        let pi = stationary(p.rho(), &xe).unwrap().pi;
        let out = simulate_queue(&p, &xe, &small_cfg()).unwrap();
        within(out.benefit_rate_mean - s, out.benefit_rate_stderr, 5.0);
        for i in 0..3 {
            within(out.occupancy[i] - pi[i], out.occupancy_stderr[i], 5.0);
        }
        // The last state needs a joining distance of exactly 0: unreached.
        assert_eq!(out.occupancy[3], 0.0);
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn queue_off_equilibrium_vector() {
        // R=2.5 → x^e=(1.5, 0.5); the simulated vector (2, 1) differs.
        let p = QueueParams::new(1.0, 1.0, 2.5, 1.0, 1.0).unwrap();
        let x = ThresholdVector::<f64>::new(vec![2.0, 1.0]).unwrap();
        let s = social_benefit_queue(&p, &x).unwrap();
        assert!((s - 0.2).abs() < 1e-12);
        let out = simulate_queue(&p, &x, &small_cfg()).unwrap();
        within(out.benefit_rate_mean - s, out.benefit_rate_stderr, 5.0);
    }

    #[test]
    fn deterministic_queue_service_is_flagged() {
        let p = QueueParams::new(1.0, 1.0, 3.0, 1.0, 1.0).unwrap();
        let xe = equilibrium_thresholds(&p);
        let cfg = SimConfig {
            service: ServiceDistribution::Deterministic,
            ..small_cfg()
        };
        let out = simulate_queue(&p, &xe, &cfg).unwrap();
        assert!(out
            .warnings
            .iter()
            .any(|w| w.contains("analytics not guaranteed")));
    }

    #[test]
    fn joiner_utility_declines_linearly_with_distance() {
        // At x = x_e the mean realized utility in a bucket around d is
        // c_t·(x_e − d).
        let h = IntensityFunction::constant(1.0).unwrap();
        let p = ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap();
        let cfg = SimConfig {
            horizon_events: 60_000,
            warmup_events: 2_000,
            replications: 4,
            distance_bins: 8,
            ..SimConfig::default()
        };
        let out = simulate_loss(&h, &p, 4.0, &cfg).unwrap();
        let profile = out.distance_profile.expect("bins requested");
        assert_eq!(profile.len(), 8);
        for b in &profile {
            if b.joined < 200 {
                continue;
            }
            let center = 0.5 * (b.lo + b.hi);
            assert!(
                (b.mean_utility - (4.0 - center)).abs() < 0.2,
                "bucket [{}, {}): {} vs {}",
                b.lo,
                b.hi,
                b.mean_utility,
                4.0 - center
            );
        }
    }

    #[test]
    fn config_validation() {
        let h = IntensityFunction::constant(1.0).unwrap();
        let p = ModelParams::new(5.0, 1.0, 1.0, 1.0).unwrap();
        let bad = SimConfig {
            horizon_events: 10,
            warmup_events: 10,
            ..SimConfig::default()
        };
        assert!(simulate_loss(&h, &p, 1.0, &bad).is_err());
        let bad = SimConfig {
            replications: 1,
            ..SimConfig::default()
        };
        assert!(simulate_loss(&h, &p, 1.0, &bad).is_err());
    }

    #[test]
    fn config_document_defaults() {
        let cfg: SimConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, SimConfig::default());
        let cfg: SimConfig = serde_json::from_str(
            "{\"service\":\"deterministic\",\"replications\":5,\"seed\":9}",
        )
        .unwrap();
        assert_eq!(cfg.service, ServiceDistribution::Deterministic);
        assert_eq!(cfg.replications, 5);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.horizon_events, 1_000_000);
    }
}
