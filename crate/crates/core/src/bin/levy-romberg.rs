use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use levy_romberg::adaptive::{
    argmin, rm_run, tensor_grid, variance_surface, write_surface_csv, write_trace_csv, GainSchedule, ProjectionBox,
    Target, VarianceObjective,
};
use levy_romberg::bench::{
    complexity_ratio, init_thread_pool, load_experiment, make_reference, optimal_beta, predicted_costs,
    run_benchmark, save_reference, ComplexityModel, ReferenceSettings, DEFAULT_LADDER,
};
use levy_romberg::cos::{cos_price_diagnostics, CosConfig};
use levy_romberg::estimators::{
    load_estimator, make_policy, mc_estimate, run_estimator, sr_estimate, CallOnSum, EstimatorConfig, Method,
    Payoff, ThetaMode, VEpsRule, WeightCumulant,
};
use levy_romberg::levy::{gaussian_approx_valid, load_model, MarketModel};
use levy_romberg::sampler::RngStream;
use levy_romberg::{LevyError, Result};

#[derive(Parser)]
#[command(name = "levy-romberg", version, about = "Option pricing under exponential CGMY")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate a model file and print its drifts and truncation variances.
    Calibrate { model: PathBuf },
    /// Price a call on the sum of spots.
    Price(PriceArgs),
    /// Run projected Robbins–Monro for a variance-minimising tilt.
    Adapt(AdaptArgs),
    /// Scan a variance objective on a grid.
    Surface(SurfaceArgs),
    /// Run a replicated MSE experiment.
    Bench {
        experiment: PathBuf,
        /// Use the long cut-off ladder.
        #[arg(long)]
        full: bool,
        /// Override the output CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the costs of plain and Romberg Monte Carlo.
    Complexity(ComplexityArgs),
    /// Produce a high-effort Monte Carlo reference price.
    MakeReference(ReferenceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PriceMethod {
    Mc,
    Sr,
    Ismc,
    Issr,
    Cos,
}

#[derive(Args)]
struct PriceArgs {
    model: PathBuf,
    /// Estimator file; command-line flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mc")]
    method: PriceMethod,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 100.0)]
    strike: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant tilt for the single-level sum, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    /// Constant tilt for the Romberg correction.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta2: Option<Vec<f64>>,
    /// Learn the tilts with Robbins–Monro while pricing.
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 1.0)]
    sample_scale: f64,
    /// Cosine terms.
    #[arg(long, default_value_t = 1 << 14)]
    terms: usize,
}

#[derive(Args)]
struct AdaptArgs {
    model: PathBuf,
    #[arg(long, default_value = "v1")]
    target: Target,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 50_000)]
    iters: u64,
    #[arg(long)]
    g0: Option<f64>,
    #[arg(long)]
    n0: Option<f64>,
    /// Box bounds `lo,hi` applied to every coordinate; default Θ₁ with a margin.
    #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
    bounds: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100.0)]
    strike: f64,
    /// Trace CSV (`n,theta1,...`).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    model: PathBuf,
    #[arg(long, default_value = "v1")]
    target: Target,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lo: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    hi: Option<Vec<f64>>,
    /// Grid points per coordinate.
    #[arg(long, default_value_t = 31)]
    points: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100.0)]
    strike: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Activity index; taken from the model when omitted.
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Model file; adds predicted and measured proposal counts.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 100.0)]
    strike: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ReferenceArgs {
    model: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Paths; default `σ⁻²(ε)`.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200.0)]
    strike: f64,
    #[arg(long)]
    out: PathBuf,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn call(model: &MarketModel, strike: f64) -> std::sync::Arc<dyn Payoff> {
    std::sync::Arc::new(CallOnSum::new(strike, model))
}

fn calibrate(path: &Path) -> Result<()> {
    let m = load_model(path)?;
    println!("dimension {}, r = {}, T = {}", m.dim(), m.r(), m.maturity());
    for (j, p) in m.components().iter().enumerate() {
        let g = gaussian_approx_valid(p);
        println!(
            "component {}: C={} G={} M={} Y={}  drift b={:.12}  Gaussian rate ε^{:.5}",
            j + 1,
            p.c(),
            p.g(),
            p.m(),
            p.y(),
            m.gamma(j),
            g.exponent
        );
    }
    println!("kappa(1) = {:.3e}", m.cumulant(&vec![1.0; m.dim()])?);
    println!("eps,sigma_sq");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        println!("{eps:e},{:.10e}", m.sigma_sq(eps)?);
    }
    Ok(())
}

fn price(a: &PriceArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    if let (PriceMethod::Cos, None) = (a.method, &a.config) {
        let d = cos_price_diagnostics(&model, a.strike, &CosConfig::with_terms(a.terms))?;
        println!("price,doubled,change_on_doubling,a,b");
        println!("{},{},{:e},{},{}", d.price, d.doubled, d.change_on_doubling(), d.a, d.b);
        return Ok(());
    }
    let cfg = match &a.config {
        Some(path) => load_estimator(path)?,
        None => {
            let method = match a.method {
                PriceMethod::Mc => Method::Mc,
                PriceMethod::Sr => Method::Sr,
                PriceMethod::Ismc => Method::Ismc,
                PriceMethod::Issr => Method::Issr,
                PriceMethod::Cos => unreachable!(),
            };
            let mut cfg = EstimatorConfig::new(method, a.eps, a.strike, a.seed);
            cfg.beta = a.beta;
            cfg.sample_scale = a.sample_scale;
            cfg.theta_mode = match (&a.theta, a.adaptive) {
                (Some(_), true) => return Err(LevyError::Config("--theta and --adaptive are exclusive".into())),
                (Some(t), false) => ThetaMode::Constant(t.clone(), a.theta2.clone().unwrap_or_else(|| t.clone())),
                (None, true) => ThetaMode::Adaptive,
                (None, false) => ThetaMode::Zero,
            };
            cfg
        }
    };
    let report = run_estimator(&cfg, &model, cfg.payoff(&model), &RngStream::new(cfg.seed, 0))?;
    report.write_csv(io::stdout().lock())
}

fn adapt(a: &AdaptArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let d = model.dim();
    let default = GainSchedule::default();
    let gain = GainSchedule::new(a.g0.unwrap_or(default.g0), a.n0.unwrap_or(default.n0))?;
    let bounds = match &a.bounds {
        Some(b) if b.len() == 2 => ProjectionBox::new(vec![b[0]; d], vec![b[1]; d])?,
        Some(b) => return Err(LevyError::Config(format!("--box takes lo,hi, got {b:?}"))),
        None => ProjectionBox::theta_one(&model, 1e-2)?,
    };
    let obj = VarianceObjective::new(a.target, &model, a.eps, call(&model, a.strike), WeightCumulant::Truncated)?;
    let st = rm_run(&obj, a.iters, &gain, &bounds, vec![0.0; d], &mut RngStream::new(a.seed, 0), a.trace.is_some())?;
    if let (Some(path), Some(trace)) = (&a.trace, &st.trace) {
        write_trace_csv(trace, File::create(path)?)?;
    }
    let theta: Vec<String> = st.theta.iter().map(|t| format!("{t:.6}")).collect();
    println!("theta = [{}] after {} iterations", theta.join(", "), st.n);
    Ok(())
}

fn surface(a: &SurfaceArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let inner = ProjectionBox::theta_one(&model, 1e-2)?;
    let lo = a.lo.clone().unwrap_or_else(|| inner.lower().iter().map(|x| x.max(0.0)).collect());
    let hi = a.hi.clone().unwrap_or_else(|| inner.upper().to_vec());
    model.check_dim(&lo)?;
    model.check_dim(&hi)?;
    let obj = VarianceObjective::new(a.target, &model, a.eps, call(&model, a.strike), WeightCumulant::Truncated)?;
    let pts = variance_surface(&obj, &tensor_grid(&lo, &hi, a.points), a.samples, &RngStream::new(a.seed, 0))?;
    write_surface_csv(&pts, sink(&a.out)?)?;
    if let Some(best) = argmin(&pts) {
        eprintln!("argmin {:?}: {:.6e} ± {:.2e}", best.theta, best.value, best.stderr);
    }
    Ok(())
}

fn bench(path: &Path, full: bool, out: &Option<PathBuf>) -> Result<()> {
    let mut cfg = load_experiment(path)?;
    if full {
        cfg = cfg.full();
    }
    let report = run_benchmark(&cfg)?;
    match out.clone().or(cfg.output.clone()) {
        Some(p) => {
            let summary = report.save(&p)?;
            eprintln!("wrote {} and {}", p.display(), summary.display());
        }
        None => report.write_rows(io::stdout().lock())?,
    }
    eprintln!("reference {}", report.reference);
    report.write_summary(io::stderr().lock())
}

fn complexity(a: &ComplexityArgs) -> Result<()> {
    let model = a.model.as_ref().map(load_model).transpose()?;
    let y = match (a.y, &model) {
        (Some(y), _) => y,
        (None, Some(m)) => m.components().iter().map(|p| p.y()).fold(f64::MIN, f64::max),
        (None, None) => return Err(LevyError::Config("give --y or --model".into())),
    };
    let beta = a.beta.unwrap_or(optimal_beta(y));
    let ladder = a.eps.clone().unwrap_or(DEFAULT_LADDER.to_vec());
    let cm = ComplexityModel::new(y, beta, ladder[0])?;
    let (e1, e2) = cm.exponents();
    println!("Y = {y}, beta = {beta}, optimal beta = {}", optimal_beta(y));
    println!("exponents Y(1-beta) = {e1:.6}, beta(2-Y) = {e2:.6}; ratio ~ eps^{:.6}", cm.order());
    println!("eps,ratio_model");
    for &eps in &ladder {
        println!("{eps:e},{:.6e}", complexity_ratio(y, beta, eps)?);
    }
    if let Some(m) = model {
        println!("eps,predicted_mc,predicted_sr,measured_mc,measured_sr,predicted_ratio,measured_ratio");
        let payoff = CallOnSum::new(a.strike, &m);
        for &eps in &ladder {
            let pred = predicted_costs(&m, eps, beta)?;
            let pol = make_policy(&m, eps, beta, VEpsRule::Sigma)?;
            let rng = RngStream::new(a.seed, 0);
            let mc = mc_estimate(&payoff, &m, &pol, &rng)?.cost as f64;
            let sr = sr_estimate(&payoff, &m, &pol, &rng)?.cost as f64;
            println!("{eps:e},{:.4e},{:.4e},{mc:.4e},{sr:.4e},{:.4},{:.4}", pred.mc, pred.sr, pred.ratio(), sr / mc);
        }
    }
    Ok(())
}

fn reference(a: &ReferenceArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let rec = make_reference(&model, &ReferenceSettings { eps: a.eps, n: a.n, seed: a.seed, strike: a.strike })?;
    save_reference(&rec, &a.out)?;
    println!("price {} ± {} (N = {}, {:.1} s)", rec.price, rec.stderr, rec.n, rec.wall_time_s);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_thread_pool()?;
    match cli.command {
        Command::Calibrate { model } => calibrate(&model),
        Command::Price(a) => price(&a),
        Command::Adapt(a) => adapt(&a),
        Command::Surface(a) => surface(&a),
        Command::Bench { experiment, full, out } => bench(&experiment, full, &out),
        Command::Complexity(a) => complexity(&a),
        Command::MakeReference(a) => reference(&a),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
