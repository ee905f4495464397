//! Compound loss process with Gamma claim severities, the loaded surplus
//! process, and Monte Carlo ruin estimation over a finite horizon.
//!
//! The loss at time t sums one Gamma(eta, beta) claim per counted unit of the
//! driving process, so a batch of size s contributes the sum of s independent
//! claims. The surplus R_t = u + rho t - L(t) rises at the loaded premium
//! rate rho between events, which makes post-event instants the only
//! candidate ruin times.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::Gamma;
use serde::Serialize;

use crate::distributions::BTParams;
use crate::error::{Error, Result};
use crate::processes::{self, EventPath};
use crate::rng;

/// Fewest paths accepted by the ruin estimator; below this the binomial
/// confidence interval is meaningless.
pub const MIN_RUIN_PATHS: u64 = 100;

/// Gamma claim-severity parameters: shape eta, rate beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaParams {
    eta: f64,
    beta: f64,
}

impl GammaParams {
    pub fn new(eta: f64, beta: f64) -> Result<Self> {
        for (name, v) in [("eta", eta), ("beta", beta)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!(
                    "claim severity {name} must be a positive finite real, got {v}"
                )));
            }
        }
        Ok(GammaParams { eta, beta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Mean claim size eta / beta.
    pub fn mean(&self) -> f64 {
        self.eta / self.beta
    }

    fn sampler(&self) -> Gamma<f64> {
        // rand_distr parameterizes Gamma by shape and scale = 1 / rate.
        Gamma::new(self.eta, 1.0 / self.beta).expect("parameters validated at construction")
    }
}

/// Everything a surplus simulation needs: initial capital, safety loading,
/// count-process and claim parameters, and the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskConfig {
    u: f64,
    epsilon: f64,
    bt: BTParams,
    claims: GammaParams,
    horizon: f64,
}

impl RiskConfig {
    pub fn new(u: f64, epsilon: f64, bt: BTParams, claims: GammaParams, horizon: f64) -> Result<Self> {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::Domain(format!(
                "initial capital must be finite and nonnegative, got {u}"
            )));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::Domain(format!(
                "safety loading must be finite and nonnegative, got {epsilon}"
            )));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::Domain(format!(
                "horizon must be a positive finite real, got {horizon}"
            )));
        }
        Ok(RiskConfig {
            u,
            epsilon,
            bt,
            claims,
            horizon,
        })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn bt(&self) -> BTParams {
        self.bt
    }

    pub fn claims(&self) -> GammaParams {
        self.claims
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// One loss event: the epoch, its aggregate claim, and the running total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossEvent {
    pub time: f64,
    pub loss: f64,
    pub cumulative: f64,
}

/// E[L(t)] = alpha t theta e^theta eta / beta.
pub fn expected_loss(bt: BTParams, claims: GammaParams, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    Ok(bt.alpha() * t * bt.theta() * bt.theta().exp() * claims.mean())
}

/// Loaded premium rate rho = (1 + epsilon) alpha theta e^theta eta / beta,
/// the net rate E[L(t)] / t scaled by the safety loading.
pub fn premium_rate(bt: BTParams, claims: GammaParams, epsilon: f64) -> Result<f64> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::Domain(format!(
            "safety loading must be finite and nonnegative, got {epsilon}"
        )));
    }
    Ok((1.0 + epsilon) * bt.alpha() * bt.theta() * bt.theta().exp() * claims.mean())
}

/// Simulate the compound loss over [0, horizon]: a counting path, then one
/// Gamma claim per counted unit at each event.
pub fn simulate_compound_bt<R: Rng + ?Sized>(
    bt: BTParams,
    claims: GammaParams,
    horizon: f64,
    rng: &mut R,
) -> Result<Vec<LossEvent>> {
    let path = processes::simulate_bt(bt, horizon, rng)?;
    Ok(attach_claims(&path, claims, rng))
}

fn attach_claims<R: Rng + ?Sized>(path: &EventPath, claims: GammaParams, rng: &mut R) -> Vec<LossEvent> {
    let gamma = claims.sampler();
    let mut cumulative = 0.0;
    path.events()
        .iter()
        .map(|ev| {
            let loss: f64 = (0..ev.jump).map(|_| rng.sample(gamma)).sum();
            cumulative += loss;
            LossEvent {
                time: ev.time,
                loss,
                cumulative,
            }
        })
        .collect()
}

/// One surplus trajectory: the driving path, losses, the surplus sampled at
/// time zero and after every event, and the first ruin instant if any.
#[derive(Debug, Clone, Serialize)]
pub struct RiskPath {
    pub path: EventPath,
    pub losses: Vec<LossEvent>,
    /// (time, surplus) at t = 0 and immediately after each event.
    pub surplus: Vec<(f64, f64)>,
    pub ruined: bool,
    pub ruin_time: Option<f64>,
    /// Surplus at the horizon, u + rho horizon - L(horizon).
    pub terminal_surplus: f64,
}

/// Simulate one surplus path. The trajectory starts at (0, u); between events
/// the surplus is affine with slope rho, so ruin is checked exactly at the
/// post-event instants. The path continues past ruin to the horizon, which
/// keeps the draw count per path fixed and lets batches reuse common random
/// numbers across capital levels.
pub fn simulate_risk_path<R: Rng + ?Sized>(config: &RiskConfig, rng: &mut R) -> Result<RiskPath> {
    let rho = premium_rate(config.bt, config.claims, config.epsilon)?;
    let path = processes::simulate_bt(config.bt, config.horizon, rng)?;
    let losses = attach_claims(&path, config.claims, rng);
    let mut surplus = Vec::with_capacity(losses.len() + 1);
    surplus.push((0.0, config.u));
    let mut ruin_time = None;
    for ev in &losses {
        let r = config.u + rho * ev.time - ev.cumulative;
        surplus.push((ev.time, r));
        if r < 0.0 && ruin_time.is_none() {
            ruin_time = Some(ev.time);
        }
    }
    let total_loss = losses.last().map_or(0.0, |ev| ev.cumulative);
    Ok(RiskPath {
        path,
        losses,
        surplus,
        ruined: ruin_time.is_some(),
        ruin_time,
        terminal_surplus: config.u + rho * config.horizon - total_loss,
    })
}

/// Monte Carlo ruin estimate over the config horizon.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RuinEstimate {
    pub ruin_probability: f64,
    /// 95% normal-approximation half-width of the binomial estimate.
    pub ci_half_width: f64,
    pub mean_terminal_surplus: f64,
}

/// Estimate the finite-horizon ruin probability from independent paths. The
/// result is bit-reproducible for a fixed master seed regardless of worker
/// count: each path draws from its own derived stream and the aggregation
/// folds in path order.
pub fn ruin_probability_mc(
    config: &RiskConfig,
    n_paths: u64,
    master_seed: u64,
) -> Result<RuinEstimate> {
    if n_paths < MIN_RUIN_PATHS {
        return Err(Error::InsufficientData(format!(
            "ruin estimation needs at least {MIN_RUIN_PATHS} paths, got {n_paths}"
        )));
    }
    let outcomes = rng::run_paths(n_paths, master_seed, |_, rng| {
        let path = simulate_risk_path(config, rng).expect("config validated at construction");
        (path.ruined, path.terminal_surplus)
    });
    let mut ruins = 0u64;
    let mut surplus_sum = 0.0;
    for (ruined, terminal) in outcomes {
        ruins += ruined as u64;
        surplus_sum += terminal;
    }
    let n = n_paths as f64;
    let p = ruins as f64 / n;
    Ok(RuinEstimate {
        ruin_probability: p,
        ci_half_width: 1.96 * (p * (1.0 - p) / n).sqrt(),
        mean_terminal_surplus: surplus_sum / n,
    })
}

/// Write surplus trajectories as CSV with the fixed header
/// `path_id,time,surplus,event_flag`. The time-zero row carries flag 0,
/// post-event rows flag 1.
pub fn write_surplus_csv<W: Write>(mut out: W, paths: &[RiskPath]) -> io::Result<()> {
    writeln!(out, "path_id,time,surplus,event_flag")?;
    for (path_id, rp) in paths.iter().enumerate() {
        for (i, (time, surplus)) in rp.surplus.iter().enumerate() {
            writeln!(
                out,
                "{},{:.11e},{:.11e},{}",
                path_id,
                time,
                surplus,
                u8::from(i > 0)
            )?;
        }
    }
    Ok(())
}
