//! `pmf`: tabulate the counting law as (k, pmf, cdf) rows.

use belltouchard::distributions::{bt_log_pmf_vec, bt_support_cap, BTParams};
use clap::Args;
use serde_json::json;

use crate::config::{Context, Preset};
use crate::output::{self, ResolvedConfig};
use crate::{CliError, Format};

#[derive(Debug, Args)]
pub struct PmfArgs {
    /// Rate parameter of the law.
    #[arg(long, conflicts_with = "preset")]
    pub alpha: Option<f64>,
    /// Jump-size parameter of the law.
    #[arg(long, conflicts_with = "preset")]
    pub theta: Option<f64>,
    /// Named (alpha, theta) pair fitted to a reference data set.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Evaluation time; the law of N(t).
    #[arg(long)]
    pub t: Option<f64>,
    /// Largest k tabulated; defaults to the adaptive support cap.
    #[arg(long = "k-max")]
    pub k_max: Option<u64>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

pub fn run(args: PmfArgs, ctx: &Context) -> Result<(), CliError> {
    let (alpha, theta) = ctx.resolve_bt(args.alpha, args.theta, args.preset)?;
    let t = ctx.resolve_f64(args.t, "t", 1.0)?;
    let format = Format::resolve(args.format, ctx)?;
    let scaled = BTParams::new(alpha, theta)?.at_time(t)?;
    let k_max = match args.k_max {
        Some(k) => k,
        None => match ctx.file.u64("k-max")? {
            Some(k) => k,
            None => bt_support_cap(scaled)?,
        },
    };

    let log_pmf = bt_log_pmf_vec(scaled, k_max)?;
    let mut rows = Vec::with_capacity(log_pmf.len());
    let mut cdf = 0.0;
    for (k, lp) in log_pmf.iter().enumerate() {
        let p = lp.exp();
        cdf = (cdf + p).min(1.0);
        rows.push((k as u64, p, cdf));
    }

    let config = ResolvedConfig::new()
        .push("alpha", alpha)
        .push("theta", theta)
        .push("t", t)
        .push("k_max", k_max)
        .push("seed", ctx.seed);

    let text = match format {
        Format::Csv => output::csv_document("pmf", &config, |buf| {
            use std::io::Write;
            writeln!(buf, "k,pmf,cdf")?;
            for (k, p, c) in &rows {
                writeln!(buf, "{k},{p},{c}")?;
            }
            Ok(())
        })?,
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(k, p, c)| json!({"k": k, "pmf": p, "cdf": c}))
                .collect();
            output::json_document("pmf", &config, vec![("rows", json!(rows))])
        }
    };
    output::emit(ctx, &text)
}
