use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ibs_core::curve::{CurveRequest, Quantity, Scale, Sweep};
use ibs_core::montecarlo::{empirical_risk, McConfig, DEFAULT_CHUNK};
use ibs_core::{
    degradation, exact_risk, fmt_g12, minimax_ratio_il, minimax_ratio_ll, plan, Error,
    EstimatorSelector, LossFamily, LossSpec, Result,
};

/// Probability estimation under inverse binomial sampling.
#[derive(Parser)]
#[command(name = "ibs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact risk of an estimator at a given p
    Risk(RiskArgs),
    /// Smallest n whose guaranteed risk meets a target
    Plan(PlanArgs),
    /// Sweep a risk quantity over n, p or a/b and write CSV
    Curve(CurveArgs),
    /// Monte Carlo estimate of the risk
    Simulate(SimulateArgs),
    /// Asymptotically optimal omega and the degradation of the proposed estimator
    OmegaStar(OmegaStarArgs),
    /// Slope ratio a/b at which the proposed estimator is minimax
    MinimaxRatio(MinimaxRatioArgs),
}

#[derive(Args)]
struct EstimatorArgs {
    /// Loss, e.g. ll:a=1,b=1 or il:a=2,b=1
    #[arg(long)]
    loss: LossSpec,
    /// umvu, ml, il-default or custom:omega=<v>,d=<v>
    #[arg(long)]
    estimator: EstimatorSelector,
    /// Success count
    #[arg(long)]
    n: u64,
    /// Success probability
    #[arg(long)]
    p: f64,
    /// Offset d for il-default, in [omega_il - n, 0]
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
}

#[derive(Args)]
struct RiskArgs {
    #[command(flatten)]
    est: EstimatorArgs,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    loss: LossSpec,
    /// Largest acceptable guaranteed risk
    #[arg(long, allow_hyphen_values = true)]
    target: f64,
}

#[derive(Args)]
struct CurveArgs {
    /// guaranteed-risk, exact-risk or degradation
    #[arg(long)]
    quantity: Quantity,
    /// n, p or ratio
    #[arg(long)]
    sweep: Sweep,
    #[arg(long, allow_hyphen_values = true)]
    start: f64,
    #[arg(long, allow_hyphen_values = true)]
    stop: f64,
    #[arg(long)]
    points: usize,
    /// linear or log
    #[arg(long, default_value = "linear")]
    scale: Scale,
    /// Loss; repeat for one column per loss
    #[arg(long, required = true)]
    loss: Vec<LossSpec>,
    /// Fixed n when not sweeping over n
    #[arg(long)]
    n: Option<u64>,
    /// Fixed p when not sweeping over p
    #[arg(long)]
    p: Option<f64>,
    /// Estimator for exact risk; defaults to the proposed estimator of each loss
    #[arg(long)]
    estimator: Option<EstimatorSelector>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    est: EstimatorArgs,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replications per random stream
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk: u64,
}

#[derive(Args)]
struct OmegaStarArgs {
    #[arg(long)]
    loss: LossSpec,
    #[arg(long)]
    n: u64,
}

#[derive(Args)]
struct MinimaxRatioArgs {
    /// ll or il; a full loss spec is accepted and only its family is used
    #[arg(long)]
    loss: String,
    #[arg(long)]
    n: u64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 2,
        Error::Capacity { .. } => 3,
        Error::Unreachable { .. } => 4,
        Error::Io(_) => 5,
        Error::NonConvergence(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ibs: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<()> {
    let mut out = io::stdout().lock();
    match command {
        Command::Risk(args) => {
            let e = &args.est;
            let spec = e.estimator.with_d(e.d).build(e.n, &e.loss)?;
            let r = exact_risk(&e.loss, &spec, e.p)?;
            let m0 = r.m0.map_or_else(|| "none".to_string(), |m| m.to_string());
            writeln!(
                out,
                "risk={} method={} error_bound={} m0={m0}",
                fmt_g12(r.value),
                r.method.name(),
                fmt_g12(r.error_bound)
            )?;
        }
        Command::Plan(args) => {
            let r = plan(&args.loss, args.target)?;
            writeln!(
                out,
                "n={} omega={} d={} guaranteed_risk={}",
                r.n,
                fmt_g12(r.estimator.omega()),
                fmt_g12(r.estimator.d()),
                fmt_g12(r.guaranteed_risk)
            )?;
        }
        Command::Curve(args) => {
            let req = CurveRequest {
                quantity: args.quantity,
                sweep: args.sweep,
                start: args.start,
                stop: args.stop,
                points: args.points,
                scale: args.scale,
                losses: args.loss,
                n: args.n,
                p: args.p,
                estimator: args.estimator.map(|s| s.with_d(args.d)),
            };
            let table = req.evaluate()?;
            match args.out {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    table.write_csv(BufWriter::new(file))?;
                }
                None => table.write_csv(&mut out)?,
            }
        }
        Command::Simulate(args) => {
            let e = &args.est;
            let spec = e.estimator.with_d(e.d).build(e.n, &e.loss)?;
            let cfg = McConfig::with_chunk(e.p, args.trials, args.seed, args.chunk)?;
            let r = empirical_risk(&e.loss, &spec, &cfg)?;
            writeln!(
                out,
                "mean_loss={} std_error={} mean_stopping_time={} trials={} degenerate={}",
                fmt_g12(r.mean_loss),
                fmt_g12(r.std_error),
                fmt_g12(r.mean_stopping_time),
                r.trials,
                r.degenerate
            )?;
        }
        Command::OmegaStar(args) => {
            let r = degradation(&args.loss, args.n)?;
            writeln!(
                out,
                "omega_star={} risk_star={} risk_bar={} degradation={}",
                fmt_g12(r.omega_star),
                fmt_g12(r.risk_star),
                fmt_g12(r.risk_bar),
                fmt_g12(r.degradation)
            )?;
        }
        Command::MinimaxRatio(args) => {
            let family = match args.loss.parse::<LossFamily>() {
                Ok(f) => f,
                Err(_) => args.loss.parse::<LossSpec>()?.family(),
            };
            let ratio = match family {
                LossFamily::LinearLinear => minimax_ratio_ll(args.n)?,
                LossFamily::InverseLinear => minimax_ratio_il(args.n)?,
            };
            writeln!(out, "ratio={}", fmt_g12(ratio))?;
        }
    }
    Ok(())
}
