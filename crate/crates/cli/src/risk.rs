//! `risk`: Monte Carlo ruin estimation and optional surplus trajectories.

use belltouchard::distributions::BTParams;
use belltouchard::risk::{
    ruin_probability_mc, simulate_risk_path, write_surplus_csv, GammaParams, RiskConfig, RiskPath,
};
use belltouchard::rng;
use clap::Args;
use serde_json::json;

use crate::config::{Context, Preset};
use crate::output::{self, ResolvedConfig};
use crate::CliError;

#[derive(Debug, Args)]
pub struct RiskArgs {
    /// Rate parameter of the claim-count process.
    #[arg(long, conflicts_with = "preset")]
    pub alpha: Option<f64>,
    /// Jump-size parameter of the claim-count process.
    #[arg(long, conflicts_with = "preset")]
    pub theta: Option<f64>,
    /// Named (alpha, theta) pair fitted to a reference data set.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Claim-severity shape.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Claim-severity rate.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Initial capital.
    #[arg(long)]
    pub u: Option<f64>,
    /// Safety loading on the premium rate.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Surplus window [0, horizon].
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Monte Carlo paths for the ruin estimate.
    #[arg(long)]
    pub paths: Option<u64>,
    /// Also write this many surplus trajectories as CSV (requires
    /// --trajectory-out). They reuse the estimator's first path streams.
    #[arg(long)]
    pub trajectories: Option<u64>,
    /// Destination for the trajectory CSV.
    #[arg(long = "trajectory-out", value_name = "FILE")]
    pub trajectory_out: Option<std::path::PathBuf>,
}

pub fn run(args: RiskArgs, ctx: &Context) -> Result<(), CliError> {
    let (alpha, theta) = ctx.resolve_bt(args.alpha, args.theta, args.preset)?;
    let eta = ctx.resolve_f64(args.eta, "eta", 1.0)?;
    let beta = ctx.resolve_f64(args.beta, "beta", 1.0)?;
    let u = ctx.resolve_f64(args.u, "u", 0.0)?;
    let epsilon = ctx.resolve_f64(args.epsilon, "epsilon", 0.0)?;
    let horizon = ctx.resolve_f64(args.horizon, "horizon", 10.0)?;
    let n_paths = ctx.resolve_u64(args.paths, "paths", 10_000)?;
    let trajectories = ctx.resolve_u64(args.trajectories, "trajectories", 0)?;

    let bt = BTParams::new(alpha, theta)?;
    let claims = GammaParams::new(eta, beta)?;
    let cfg = RiskConfig::new(u, epsilon, bt, claims, horizon)?;

    let config = ResolvedConfig::new()
        .push("alpha", alpha)
        .push("theta", theta)
        .push("eta", eta)
        .push("beta", beta)
        .push("u", u)
        .push("epsilon", epsilon)
        .push("horizon", horizon)
        .push("paths", n_paths)
        .push("seed", ctx.seed);

    if trajectories > 0 {
        let Some(out) = &args.trajectory_out else {
            return Err(CliError::Usage(
                "--trajectories requires --trajectory-out".into(),
            ));
        };
        let paths: Vec<RiskPath> = (0..trajectories)
            .map(|i| {
                let mut stream = rng::path_rng(ctx.seed, i);
                simulate_risk_path(&cfg, &mut stream)
            })
            .collect::<belltouchard::Result<_>>()?;
        let csv = output::csv_document("risk", &config, |buf| write_surplus_csv(buf, &paths))?;
        std::fs::write(out, csv)
            .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", out.display())))?;
    }

    let estimate = ruin_probability_mc(&cfg, n_paths, ctx.seed)?;
    let text = output::json_document(
        "risk",
        &config,
        vec![
            ("n_paths", json!(n_paths)),
            ("seed", json!(ctx.seed)),
            ("ruin_probability", json!(estimate.ruin_probability)),
            ("ci_half_width", json!(estimate.ci_half_width)),
            (
                "mean_terminal_surplus",
                json!(estimate.mean_terminal_surplus),
            ),
        ],
    );
    output::emit(ctx, &text)
}
