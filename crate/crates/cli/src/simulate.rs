//! `simulate`: draw event paths, homogeneous or under a named time-varying
//! rate, as event CSV or a batch summary JSON.

use belltouchard::distributions::BTParams;
use belltouchard::processes::{
    batch_summary, simulate_bt, simulate_nhbt, write_events_csv, EventPath, RateFunction,
};
use belltouchard::rng;
use clap::Args;

use crate::config::{Context, Preset};
use crate::output::{self, ResolvedConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RateKind {
    Constant,
    Linear,
    SinusoidalSquared,
}

impl RateKind {
    fn key(self) -> &'static str {
        match self {
            RateKind::Constant => "constant",
            RateKind::Linear => "linear",
            RateKind::SinusoidalSquared => "sinusoidal-squared",
        }
    }

    fn from_key(name: &str) -> Result<Self, CliError> {
        match name {
            "constant" => Ok(RateKind::Constant),
            "linear" => Ok(RateKind::Linear),
            "sinusoidal-squared" => Ok(RateKind::SinusoidalSquared),
            other => Err(CliError::Usage(format!(
                "unknown rate family {other:?}; expected constant, linear, or sinusoidal-squared"
            ))),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Rate parameter (homogeneous runs).
    #[arg(long, conflicts_with_all = ["preset", "nh_rate"])]
    pub alpha: Option<f64>,
    /// Jump-size parameter.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Named (alpha, theta) pair fitted to a reference data set.
    #[arg(long, value_enum, conflicts_with = "nh_rate")]
    pub preset: Option<Preset>,
    /// Simulation window [0, horizon].
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Number of independent paths.
    #[arg(long)]
    pub paths: Option<u64>,
    /// Emit a terminal-count summary JSON instead of the event CSV.
    #[arg(long)]
    pub summary: bool,
    /// Time-varying rate family; simulated by thinning.
    #[arg(long = "nh-rate", value_enum)]
    pub nh_rate: Option<RateKind>,
    /// Rate intercept: the constant value, or the floor of linear /
    /// sinusoidal-squared rates.
    #[arg(long = "rate-a")]
    pub rate_a: Option<f64>,
    /// Rate slope (linear) or oscillation amplitude (sinusoidal-squared).
    #[arg(long = "rate-b")]
    pub rate_b: Option<f64>,
    /// Angular frequency of the sinusoidal-squared rate.
    #[arg(long = "rate-omega")]
    pub rate_omega: Option<f64>,
}

struct RateSetup {
    kind: RateKind,
    a: f64,
    b: f64,
    omega: f64,
    rate: RateFunction,
}

fn resolve_rate(
    kind: RateKind,
    args: &SimulateArgs,
    ctx: &Context,
    horizon: f64,
) -> Result<RateSetup, CliError> {
    let a = args
        .rate_a
        .or(ctx.file.f64("rate-a")?)
        .ok_or_else(|| CliError::Usage("--rate-a is required with --nh-rate".into()))?;
    let b = ctx.resolve_f64(args.rate_b, "rate-b", 0.0)?;
    let omega = ctx.resolve_f64(args.rate_omega, "rate-omega", 1.0)?;
    let rate = match kind {
        RateKind::Constant => RateFunction::constant(a)?,
        RateKind::Linear => RateFunction::linear(a, b, horizon)?,
        RateKind::SinusoidalSquared => RateFunction::sinusoidal_squared(a, b, omega)?,
    };
    Ok(RateSetup {
        kind,
        a,
        b,
        omega,
        rate,
    })
}

pub fn run(args: SimulateArgs, ctx: &Context) -> Result<(), CliError> {
    let horizon = ctx.resolve_f64(args.horizon, "horizon", 10.0)?;
    let n_paths = ctx.resolve_u64(args.paths, "paths", 1)?;
    if n_paths == 0 {
        return Err(CliError::Usage("--paths must be at least 1".into()));
    }
    let summary = args.summary || ctx.file.bool("summary")?.unwrap_or(false);

    let nh = match args.nh_rate {
        Some(kind) => Some(kind),
        None if args.alpha.is_none() && args.preset.is_none() => ctx
            .file
            .str("nh-rate")?
            .map(RateKind::from_key)
            .transpose()?,
        None => None,
    };

    let (paths, config) = match nh {
        None => {
            let (alpha, theta) = ctx.resolve_bt(args.alpha, args.theta, args.preset)?;
            let params = BTParams::new(alpha, theta)?;
            let paths = collect_paths(n_paths, ctx.seed, |rng| simulate_bt(params, horizon, rng))?;
            let config = ResolvedConfig::new()
                .push("alpha", alpha)
                .push("theta", theta)
                .push("horizon", horizon)
                .push("paths", n_paths)
                .push("seed", ctx.seed);
            (paths, config)
        }
        Some(kind) => {
            let theta = args
                .theta
                .or(ctx.file.f64("theta")?)
                .ok_or_else(|| CliError::Usage("--theta is required".into()))?;
            let setup = resolve_rate(kind, &args, ctx, horizon)?;
            let paths = collect_paths(n_paths, ctx.seed, |rng| {
                simulate_nhbt(&setup.rate, theta, horizon, rng)
            })?;
            let config = ResolvedConfig::new()
                .push("nh_rate", setup.kind.key())
                .push("rate_a", setup.a)
                .push("rate_b", setup.b)
                .push("rate_omega", setup.omega)
                .push("theta", theta)
                .push("horizon", horizon)
                .push("paths", n_paths)
                .push("seed", ctx.seed);
            (paths, config)
        }
    };

    let text = if summary {
        let summary = batch_summary(&paths, ctx.seed)?;
        output::json_document(
            "simulate",
            &config,
            vec![(
                "summary",
                serde_json::to_value(&summary).map_err(|e| CliError::Failure(e.to_string()))?,
            )],
        )
    } else {
        output::csv_document("simulate", &config, |buf| write_events_csv(buf, &paths))?
    };
    output::emit(ctx, &text)
}

fn collect_paths<F>(n_paths: u64, seed: u64, job: F) -> Result<Vec<EventPath>, CliError>
where
    F: Fn(&mut rng::Stream) -> belltouchard::Result<EventPath> + Sync,
{
    rng::run_paths(n_paths, seed, |_, rng| job(rng).map(|p| p.with_seed(seed)))
        .into_iter()
        .collect::<belltouchard::Result<Vec<_>>>()
        .map_err(CliError::from)
}
