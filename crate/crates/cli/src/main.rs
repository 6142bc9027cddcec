//! Command-line front end over the analysis library: the single-slot loss
//! system, tail-ratio limits, the multi-slot observable queue, the two-state
//! lower-bound family, Monte Carlo simulation, and the built-in check suite.
//!
//! All numeric output is machine-oriented: JSON documents or headered CSV,
//! with every float printed to 17 significant digits so values round-trip.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use queue_poa_core::asymptotics;
use queue_poa_core::loss::{self, LossSolution};
use queue_poa_core::queue::{self, QueueParams, ThresholdVector};
use queue_poa_core::sim::{self, SimConfig, SimResult};
use queue_poa_core::verify;
use queue_poa_core::{Accuracy64, Error as CoreError, Intensity64, ModelParams64};
use serde::{Deserialize, Serialize};

const LONG_ABOUT: &str = "\
Customers are spread along a line at distances y >= 0 from a single-server\n\
facility and arrive with intensity h(y) (rate per unit distance), so those\n\
within distance x form a Poisson stream of rate \u{39b}(x) = \u{222b}\u{2080}\u{02e3} h(y) dy. A served\n\
customer earns reward R, pays c_w per unit time at the facility and c_t per\n\
unit distance traveled. Joining is individually rational inside the\n\
equilibrium threshold x_e = (R\u{3bc} \u{2212} c_w)/(c_t \u{3bc}), while aggregate welfare is\n\
maximized at the smaller threshold x* solving x + (x\u{b7}\u{39b}(x) \u{2212} M(x))/\u{3bc} = x_e,\n\
with M(x) = \u{222b}\u{2080}\u{02e3} y h(y) dy. The efficiency ratio PoA = S(x*)/S(x_e) \u{2265} 1\n\
measures the welfare lost to self-interested joining.\n\
\n\
Subcommands cover the blocking (single-slot) system, the large-threshold\n\
behavior of the tail ratio r(x) = \u{39b}(x)/(\u{39b}(x) \u{2212} M(x)/x), the multi-slot\n\
observable queue under uniform demand, a two-state construction whose\n\
efficiency ratio grows without bound, a discrete-event simulator for\n\
cross-checking, and a self-check suite. Exit codes: 0 success, 1 bad\n\
configuration or parameters, 2 numerical failure, 3 verification failure.";

#[derive(Parser)]
#[command(
    name = "queue-poa",
    version,
    about = "Joining thresholds, welfare, and efficiency ratios for a spatial service facility",
    long_about = LONG_ABOUT
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the single-slot loss system (thresholds, welfare, PoA)
    #[command(long_about = "\
Solve the single-slot loss system for an intensity profile and model\n\
parameters. With one service slot, an arriving customer joins only if the\n\
server is idle; the idle probability under threshold x is 1/(1 + \u{39b}(x)/\u{3bc}),\n\
so the welfare rate is\n\
\n\
    S(x) = c_t (x_e \u{39b}(x) \u{2212} M(x)) / (1 + \u{39b}(x)/\u{3bc}).\n\
\n\
The output reports the equilibrium threshold x_e, the welfare-optimal\n\
threshold x* (root of x + (x \u{39b}(x) \u{2212} M(x))/\u{3bc} = x_e), the welfare rates at\n\
both, and their ratio poa = S(x*)/S(x_e) \u{2265} 1.")]
    Loss(LossArgs),

    /// Estimate the large-x limit of the tail ratio r(x)
    #[command(long_about = "\
Estimate the large-x behavior of r(x) = \u{39b}(x)/(\u{39b}(x) \u{2212} M(x)/x). This ratio\n\
controls where the efficiency ratio of the loss system settles as the\n\
equilibrium threshold grows: power-law profiles \u{3b2}y^\u{3b1} give r \u{2261} \u{3b1} + 2\n\
exactly, profiles with finite total mass drive the efficiency ratio to 1,\n\
and exploding profiles make it diverge. The default output classifies the\n\
limit (converges / diverges / oscillates / undetermined) from samples on a\n\
logarithmic grid, with quadratic extrapolation in 1/ln x for slowly\n\
drifting ratios; --curve instead emits the raw samples as CSV.")]
    Limit(LimitArgs),

    /// Solve the multi-slot observable queue under uniform demand
    #[command(long_about = "\
Solve the observable multi-slot queue fed by uniformly spread customers\n\
(constant intensity \u{3bb} per unit distance). A customer who sees n in the\n\
system joins if their distance is below the threshold x_n; individually\n\
rational customers use x_n^e = (\u{3bd} \u{2212} (n+1))/\u{3ba} with \u{3bd} = R\u{3bc}/c_w and\n\
\u{3ba} = c_t\u{3bc}/c_w, which is positive for n < \u{23a3}\u{3bd}\u{23a6} = n_e. Occupancy follows a\n\
birth-death chain with birth rate \u{3bb}x_n in state n; its stationary law \u{3c0}\n\
is the normalized product \u{3c0}_n \u{221d} \u{3c1}\u{207f} x_0\u{b7}\u{b7}\u{b7}x_{n\u{2212}1} with \u{3c1} = \u{3bb}/\u{3bc}, and the\n\
welfare rate is S(x) = c_t \u{3bc} \u{3a3} \u{3c0}_{n+1} (x_n^e \u{2212} x_n/2). With --optimize the\n\
thresholds are also tuned by coordinate descent (golden-section line\n\
searches from several starts) and poa = S_opt/S_eq is reported.")]
    Queue(QueueArgs),

    /// Tabulate the two-state lower-bound construction (CSV)
    #[command(long_about = "\
Tabulate the two-slot construction whose efficiency ratio grows without\n\
bound. For a scale parameter s > 2 the instance uses equilibrium\n\
thresholds x_0^e = s\u{b3}/(s\u{2212}1) and x_1^e = s\u{b2}/(s\u{2212}1); restricting the planner\n\
to a single active slot with the loss-system optimal threshold already\n\
beats the equilibrium welfare by a factor that grows linearly in s, so the\n\
reported lower_bound on the efficiency ratio is\n\
\n\
    2 \u{b7} (1/(1/x* + \u{3c1})) \u{b7} (1 \u{2212} x*/(2x_0^e))\n\
      \u{b7} (1 + \u{3c1}x_0^e + \u{3c1}\u{b2}x_0^e x_1^e) / (x_0^e + \u{3c1}(x_1^e)\u{b2}),\n\
\n\
which equals the welfare ratio S(x*, 0)/S(x_0^e, x_1^e) of the two policies.")]
    Unbounded(UnboundedArgs),

    /// Monte Carlo simulation of either system
    #[command(long_about = "\
Run a replicated discrete-event simulation described by a JSON config.\n\
The document selects the system and its parameters:\n\
\n\
    {\"system\": {\"kind\": \"loss\", \"x\": 2.0},\n\
     \"model\": {\"R\": 5.0, \"mu\": 1.0, \"c_w\": 1.0, \"c_t\": 1.0},\n\
     \"intensity\": {\"family\": \"constant\", \"c\": 1.0}}\n\
\n\
    {\"system\": {\"kind\": \"queue\", \"thresholds\": [2.0, 1.0, 0.0]},\n\
     \"model\": {\"R\": 3.0, \"mu\": 1.0, \"c_w\": 1.0, \"c_t\": 1.0},\n\
     \"lambda\": 1.0}\n\
\n\
Optional top-level knobs (all with defaults): service (\"exponential\" or\n\
\"deterministic\"), horizon_events, warmup_events, seed, replications,\n\
distance_bins. The QUEUE_POA_SEED environment variable overrides the seed.\n\
Output is a JSON document with the mean benefit rate, its standard error\n\
across replications, the time-weighted occupancy distribution, and join/\n\
balk counts; --compare-analytic appends the analytic benefit rate and the\n\
z-score (simulated \u{2212} analytic)/stderr.")]
    Simulate(SimulateArgs),

    /// Run the built-in check suite (exit 3 on any failure)
    #[command(long_about = "\
Run the built-in check suite: closed-form instances of the loss system,\n\
tail-ratio limits and bounds, stationary-law cross-checks, optimizer\n\
dominance, the two-state bound's growth and internal consistency, the\n\
single-state reduction to the loss system, and Monte Carlo corroboration\n\
of both systems. Prints one line per check and exits 0 only if every\n\
check passes (3 otherwise).")]
    Verify,

    /// Sweep the loss system over a threshold range (CSV)
    #[command(long_about = "\
Sweep the equilibrium threshold of the loss system over a range and emit\n\
one CSV row per grid point with columns x_e,x_star,S_e,S_star,poa. The\n\
spec reads x_e=LO:HI:STEPS with an optional ,log or ,lin suffix (linear\n\
default); grid points are computed in parallel but printed in grid order.")]
    Sweep(SweepArgs),
}

#[derive(Args)]
struct LossArgs {
    /// Model parameters JSON: {"R": .., "mu": .., "c_w": .., "c_t": ..}
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Intensity profile JSON, e.g. {"family": "power_law", "beta": 1.0, "alpha": 1.0}
    #[arg(long, value_name = "FILE")]
    intensity: PathBuf,
    /// Also report the welfare rate at this threshold
    #[arg(long, value_name = "X", conflicts_with = "sweep")]
    x: Option<f64>,
    /// Emit a threshold sweep as CSV instead (spec: x_e=LO:HI:STEPS[,log|,lin])
    #[arg(long, value_name = "SPEC")]
    sweep: Option<String>,
}

#[derive(Args)]
struct LimitArgs {
    /// Intensity profile JSON
    #[arg(long, value_name = "FILE")]
    intensity: PathBuf,
    /// Sample grid LO:HI[:STEPS][:log|:lin] (log-spaced; default 7 decades)
    #[arg(long, value_name = "SPEC", default_value = "1e1:1e7:7:log")]
    grid: String,
    /// Emit the sampled ratio curve as CSV instead of the classification
    #[arg(long)]
    curve: bool,
}

#[derive(Args)]
struct QueueArgs {
    /// Model parameters JSON: {"R": .., "mu": .., "c_w": .., "c_t": ..}
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Arrival intensity per unit distance (uniform demand)
    #[arg(long)]
    lambda: f64,
    /// Also search for welfare-maximizing thresholds and report poa
    #[arg(long)]
    optimize: bool,
    /// Random restarts for the threshold search
    #[arg(long, value_name = "N", default_value_t = 8)]
    restarts: usize,
}

#[derive(Args)]
struct UnboundedArgs {
    /// Scale grid LO:HI[:STEPS][:log|:lin] over s (default 25 log points)
    #[arg(long = "s-grid", value_name = "SPEC", default_value = "5:1000:25:log")]
    s_grid: String,
    /// Traffic intensity rho = lambda/mu of the construction
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Service rate
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation config JSON (see --help for the schema)
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Append the analytic benefit rate and a z-score to the output
    #[arg(long)]
    compare_analytic: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Model parameters JSON (mu and c_t are used; x_e comes from the sweep spec)
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    /// Intensity profile JSON
    #[arg(long, value_name = "FILE")]
    intensity: PathBuf,
    /// Sweep spec: x_e=LO:HI:STEPS[,log|,lin]
    #[arg(value_name = "SPEC")]
    spec: String,
}

/// Failure carrying the process exit code: 1 for configuration problems,
/// 2 for numerical ones, 3 for verification.
struct Failure {
    code: u8,
    message: String,
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::InvalidParams(_) | CoreError::Domain(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_err(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; anything else is a
            // configuration error.
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return ExitCode::from(if ok { 0 } else { 1 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("queue-poa: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Loss(args) => run_loss(args),
        Cmd::Limit(args) => run_limit(args),
        Cmd::Queue(args) => run_queue(args),
        Cmd::Unbounded(args) => run_unbounded(args),
        Cmd::Simulate(args) => run_simulate(args),
        Cmd::Verify => run_verify(),
        Cmd::Sweep(args) => {
            let h = read_intensity(&args.intensity)?;
            let p = read_model(&args.model)?;
            let xs = parse_sweep_spec(&args.spec)?;
            print!("{}", sweep_csv(&h, &p, &xs)?);
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Output formatting: every float as `d.dddddddddddddddde±e` (17 significant
// digits), both in JSON and CSV, so printed values round-trip exactly.

struct Sci17;

impl serde_json::ser::Formatter for Sci17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sci17);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

// ---------------------------------------------------------------------------
// Input plumbing.

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn read_intensity(path: &Path) -> Result<Intensity64, Failure> {
    read_json(path)
}

fn read_model(path: &Path) -> Result<ModelParams64, Failure> {
    read_json(path)
}

/// Parses `LO:HI[:STEPS][:log|:lin]` into a grid of STEPS points including
/// both endpoints. Order of the optional suffixes is free.
fn parse_grid(spec: &str, default_steps: usize, default_log: bool) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() < 2 || parts.len() > 4 {
        return Err(config_err(format!(
            "grid spec must be LO:HI[:STEPS][:log|:lin], got {spec:?}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| config_err(format!("bad grid endpoint {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| config_err(format!("bad grid endpoint {:?}", parts[1])))?;
    let mut steps = default_steps;
    let mut log = default_log;
    for extra in &parts[2..] {
        match *extra {
            "log" => log = true,
            "lin" => log = false,
            s => {
                steps = s
                    .parse::<usize>()
                    .map_err(|_| config_err(format!("bad grid steps {s:?}")))?;
            }
        }
    }
    build_grid(lo, hi, steps, log)
}

fn build_grid(lo: f64, hi: f64, steps: usize, log: bool) -> Result<Vec<f64>, Failure> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(config_err(format!("grid needs finite LO <= HI, got {lo}:{hi}")));
    }
    if steps == 0 {
        return Err(config_err("grid needs at least one step"));
    }
    if log && lo <= 0.0 {
        return Err(config_err("log grids need LO > 0"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let n = (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if log {
                lo * (hi / lo).powf(k as f64 / n)
            } else {
                lo + (hi - lo) * (k as f64) / n
            }
        })
        .collect())
}

/// Parses `x_e=LO:HI:STEPS[,log|,lin]` (linear unless `,log`).
fn parse_sweep_spec(spec: &str) -> Result<Vec<f64>, Failure> {
    let usage = "sweep spec must be x_e=LO:HI:STEPS[,log|,lin]";
    let (var, rest) = spec.split_once('=').ok_or_else(|| config_err(usage))?;
    if var.trim() != "x_e" {
        return Err(config_err(format!(
            "only x_e sweeps are supported, got {:?}",
            var.trim()
        )));
    }
    let (range, log) = match rest.rsplit_once(',') {
        Some((range, "log")) => (range, true),
        Some((range, "lin")) => (range, false),
        Some(_) => return Err(config_err(usage)),
        None => (rest, false),
    };
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(config_err(usage));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| config_err(format!("bad sweep endpoint {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| config_err(format!("bad sweep endpoint {:?}", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| config_err(format!("bad sweep steps {:?}", parts[2])))?;
    build_grid(lo, hi, steps, log)
}

// ---------------------------------------------------------------------------
// Subcommands.

#[derive(Serialize)]
struct LossAtX {
    #[serde(flatten)]
    solution: LossSolution<f64>,
    x: f64,
    s_at_x: f64,
}

fn run_loss(args: LossArgs) -> Result<(), Failure> {
    let h = read_intensity(&args.intensity)?;
    let p = read_model(&args.model)?;
    if let Some(spec) = &args.sweep {
        let xs = parse_sweep_spec(spec)?;
        print!("{}", sweep_csv(&h, &p, &xs)?);
        return Ok(());
    }
    let solution = loss::poa(&h, &p)?;
    if let Some(x) = args.x {
        let s_at_x = loss::social_benefit(&h, p.mu(), p.c_t(), p.x_e(), x)?;
        println!(
            "{}",
            to_json(&LossAtX {
                solution,
                x,
                s_at_x
            })
        );
    } else {
        println!("{}", to_json(&solution));
    }
    Ok(())
}

fn sweep_csv(h: &Intensity64, p: &ModelParams64, xs: &[f64]) -> Result<String, Failure> {
    use rayon::prelude::*;
    let rows = xs
        .par_iter()
        .map(|&x_e| loss::solve_at_threshold(h, p.mu(), p.c_t(), x_e))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("x_e,x_star,S_e,S_star,poa\n");
    for s in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sci(s.x_e),
            sci(s.x_star),
            sci(s.s_equilibrium),
            sci(s.s_optimal),
            sci(s.poa)
        );
    }
    Ok(out)
}

fn run_limit(args: LimitArgs) -> Result<(), Failure> {
    use rayon::prelude::*;
    let h = read_intensity(&args.intensity)?;
    let grid = parse_grid(&args.grid, 7, true)?;
    let acc = Accuracy64::default();
    if args.curve {
        let rows = grid
            .par_iter()
            .map(|&x| asymptotics::t99_ratio(&h, x, &acc).map(|r| (x, r)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = String::from("x,t99_ratio\n");
        for (x, r) in rows {
            let _ = writeln!(out, "{},{}", sci(x), sci(r));
        }
        print!("{out}");
    } else {
        let estimate = asymptotics::classify_limit_on(&h, &grid, &acc)?;
        println!("{}", to_json(&estimate));
    }
    Ok(())
}

#[derive(Serialize)]
struct QueueReport {
    lambda: f64,
    mu: f64,
    rho: f64,
    n_e: usize,
    thresholds: Vec<f64>,
    pi: Vec<f64>,
    #[serde(rename = "S")]
    s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimal_thresholds: Option<Vec<f64>>,
    #[serde(rename = "S_optimal", skip_serializing_if = "Option::is_none")]
    s_optimal: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    poa: Option<f64>,
}

fn run_queue(args: QueueArgs) -> Result<(), Failure> {
    let m = read_model(&args.model)?;
    let p = QueueParams::new(args.lambda, m.mu(), m.r(), m.c_w(), m.c_t())?;
    let x = queue::equilibrium_thresholds(&p);
    let pi = queue::stationary(p.rho(), &x)?;
    let s = queue::social_benefit_queue(&p, &x)?;
    let mut report = QueueReport {
        lambda: p.lambda(),
        mu: p.mu(),
        rho: p.rho(),
        n_e: p.n_e(),
        thresholds: x.as_slice().to_vec(),
        pi: pi.pi,
        s,
        optimal_thresholds: None,
        s_optimal: None,
        poa: None,
    };
    if args.optimize {
        let (x_opt, s_opt) = queue::optimize_social(&p, args.restarts)?;
        report.optimal_thresholds = Some(x_opt.as_slice().to_vec());
        report.s_optimal = Some(s_opt);
        report.poa = Some(s_opt / s);
    }
    println!("{}", to_json(&report));
    Ok(())
}

fn run_unbounded(args: UnboundedArgs) -> Result<(), Failure> {
    use rayon::prelude::*;
    let grid = parse_grid(&args.s_grid, 25, true)?;
    let rows = grid
        .par_iter()
        .map(|&s| queue::lower_bound_final(s, args.rho, args.mu).map(|b| (s, b)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("s,lower_bound\n");
    for (s, b) in rows {
        let _ = writeln!(out, "{},{}", sci(s), sci(b));
    }
    print!("{out}");
    Ok(())
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SystemSpec {
    Loss { x: f64 },
    Queue { thresholds: Vec<f64> },
}

#[derive(Deserialize)]
struct SimDocument {
    system: SystemSpec,
    model: ModelParams64,
    #[serde(default)]
    intensity: Option<Intensity64>,
    #[serde(default)]
    lambda: Option<f64>,
    #[serde(flatten)]
    sim: SimConfig,
}

#[derive(Serialize)]
struct ComparedResult {
    #[serde(flatten)]
    result: SimResult,
    analytic_benefit_rate: f64,
    z_score: f64,
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var("QUEUE_POA_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| config_err(format!("QUEUE_POA_SEED must be a u64, got {s:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(config_err("QUEUE_POA_SEED must be valid UTF-8"))
        }
    }
}

fn run_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let doc: SimDocument = read_json(&args.config)?;
    let mut cfg = doc.sim;
    if let Some(seed) = env_seed()? {
        cfg.seed = seed;
    }
    let (result, analytic) = match doc.system {
        SystemSpec::Loss { x } => {
            let h = doc
                .intensity
                .ok_or_else(|| config_err("loss simulation needs an \"intensity\" entry"))?;
            let p = doc.model;
            let result = sim::simulate_loss(&h, &p, x, &cfg)?;
            let analytic = if args.compare_analytic {
                Some(loss::social_benefit(&h, p.mu(), p.c_t(), p.x_e(), x)?)
            } else {
                None
            };
            (result, analytic)
        }
        SystemSpec::Queue { thresholds } => {
            let lambda = doc
                .lambda
                .ok_or_else(|| config_err("queue simulation needs a \"lambda\" entry"))?;
            let m = doc.model;
            let p = QueueParams::new(lambda, m.mu(), m.r(), m.c_w(), m.c_t())?;
            let x = ThresholdVector::new(thresholds)?;
            let result = sim::simulate_queue(&p, &x, &cfg)?;
            let analytic = if args.compare_analytic {
                if x.len() != p.n_e() {
                    return Err(config_err(format!(
                        "analytic comparison needs exactly n_e = {} thresholds, got {}",
                        p.n_e(),
                        x.len()
                    )));
                }
                Some(queue::social_benefit_queue(&p, &x)?)
            } else {
                None
            };
            (result, analytic)
        }
    };
    match analytic {
        Some(analytic_benefit_rate) => {
            let z_score = (result.benefit_rate_mean - analytic_benefit_rate)
                / result.benefit_rate_stderr.max(1e-300);
            println!(
                "{}",
                to_json(&ComparedResult {
                    result,
                    analytic_benefit_rate,
                    z_score
                })
            );
        }
        None => println!("{}", to_json(&result)),
    }
    Ok(())
}

fn run_verify() -> Result<(), Failure> {
    let mut failed = 0usize;
    for id in 1..=verify::CHECK_COUNT {
        let report = verify::run_criterion(id);
        let status = if report.passed { "ok  " } else { "FAIL" };
        println!(
            "{status}  {:>2}  {:<44}  {:7.2}s",
            report.id, report.name, report.seconds
        );
        if !report.passed {
            for line in report.detail.lines() {
                println!("          {line}");
            }
            failed += 1;
        }
        let _ = io::stdout().flush();
    }
    if failed > 0 {
        Err(Failure {
            code: 3,
            message: format!("{failed} of {} checks failed", verify::CHECK_COUNT),
        })
    } else {
        println!("all {} checks passed", verify::CHECK_COUNT);
        Ok(())
    }
}
