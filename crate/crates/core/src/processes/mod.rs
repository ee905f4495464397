//! Path simulation and the algebra of the counting process: superposition,
//! unit-level decomposition, convolution across different jump-size rates,
//! iterated Poisson composition, and the multiple-Poisson representation.
//!
//! A path is a compound Poisson draw: event epochs arrive at intensity
//! alpha (e^theta - 1) and each epoch delivers a zero-truncated Poisson batch,
//! so the count at time t is Bell-Touchard distributed with rate alpha t.

mod export;
mod nonhomogeneous;

pub use export::{batch_summary, write_events_csv, BatchSummary};
pub use nonhomogeneous::{iterated_nhpp_sample, mean_jump_fn, simulate_nhbt, RateFunction};

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::distributions::{draw_poisson, ztp_sample, BTParams, ZTPParams};
use crate::error::{Error, Result};
use crate::math;

/// Tail mass that a multiple-Poisson truncation must certify as negligible.
pub const MULTIPLE_POISSON_TAIL_TOL: f64 = 1e-12;

// Certified truncation for compound jump laws built from other laws.
const JUMP_PMF_TAIL_TOL: f64 = 1e-15;

/// One jump: the epoch and the batch size it delivered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventRecord {
    pub time: f64,
    pub jump: u64,
}

/// A simulated path over [0, horizon]: strictly increasing epochs in
/// (0, horizon], each with a batch size of at least one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventPath {
    params: BTParams,
    horizon: f64,
    events: Vec<EventRecord>,
    seed: u64,
}

impl EventPath {
    pub fn new(params: BTParams, horizon: f64, events: Vec<EventRecord>, seed: u64) -> Result<Self> {
        check_horizon(horizon)?;
        let mut last = 0.0;
        for ev in &events {
            if !ev.time.is_finite() || ev.time <= last || ev.time > horizon {
                return Err(Error::Domain(format!(
                    "event times must strictly increase within (0, {horizon}], got {} after {last}",
                    ev.time
                )));
            }
            if ev.jump == 0 {
                return Err(Error::Domain(format!("zero jump at time {}", ev.time)));
            }
            last = ev.time;
        }
        Ok(EventPath {
            params,
            horizon,
            events,
            seed,
        })
    }

    pub fn params(&self) -> BTParams {
        self.params
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    /// Provenance seed recorded by batch drivers; 0 when unset.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// N(t): accumulated jumps over (0, t].
    pub fn count_at(&self, t: f64) -> u64 {
        self.events
            .iter()
            .take_while(|ev| ev.time <= t)
            .map(|ev| ev.jump)
            .sum()
    }

    /// N(b) - N(a), the increment over (a, b].
    pub fn increment(&self, a: f64, b: f64) -> u64 {
        self.count_at(b) - self.count_at(a)
    }

    pub fn total_count(&self) -> u64 {
        self.events.iter().map(|ev| ev.jump).sum()
    }
}

fn check_horizon(horizon: f64) -> Result<()> {
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::Domain(format!(
            "horizon must be a positive finite real, got {horizon}"
        )));
    }
    Ok(())
}

/// Simulate one path: exponential epoch gaps at rate alpha (e^theta - 1),
/// zero-truncated Poisson batch per epoch.
pub fn simulate_bt<R: Rng + ?Sized>(
    params: BTParams,
    horizon: f64,
    rng: &mut R,
) -> Result<EventPath> {
    check_horizon(horizon)?;
    let gap = rand_distr::Exp::new(params.epoch_rate())
        .map_err(|e| Error::Domain(format!("epoch rate {}: {e}", params.epoch_rate())))?;
    let batch = ZTPParams::new(params.theta())?;
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        t += rng.sample(gap);
        if t > horizon {
            break;
        }
        events.push(EventRecord {
            time: t,
            jump: ztp_sample(batch, rng),
        });
    }
    EventPath::new(params, horizon, events, 0)
}

/// Pool independent paths with a shared theta and horizon into one path of
/// the summed rate.
pub fn superpose(paths: &[EventPath]) -> Result<EventPath> {
    if paths.is_empty() {
        return Err(Error::Domain("nothing to superpose".into()));
    }
    let first = &paths[0];
    for p in paths {
        if (p.params.theta() - first.params.theta()).abs() > 1e-12 {
            return Err(Error::Mismatch(format!(
                "superposition needs one shared theta, got {} and {}",
                first.params.theta(),
                p.params.theta()
            )));
        }
        if (p.horizon - first.horizon).abs() > 1e-12 {
            return Err(Error::Mismatch(format!(
                "superposition needs one shared horizon, got {} and {}",
                first.horizon, p.horizon
            )));
        }
    }
    let params = superpose_params(&paths.iter().map(|p| p.params()).collect::<Vec<_>>())?;
    let mut events: Vec<EventRecord> = paths.iter().flat_map(|p| p.events.iter().copied()).collect();
    events.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("times are finite"));
    // Coinciding epochs across paths pool their batches.
    let mut merged: Vec<EventRecord> = Vec::with_capacity(events.len());
    for ev in events {
        match merged.last_mut() {
            Some(last) if last.time == ev.time => last.jump += ev.jump,
            _ => merged.push(ev),
        }
    }
    EventPath::new(params, first.horizon, merged, first.seed)
}

/// Parameter form of superposition: rates add under a shared theta.
pub fn superpose_params(params: &[BTParams]) -> Result<BTParams> {
    if params.is_empty() {
        return Err(Error::Domain("nothing to superpose".into()));
    }
    let theta = params[0].theta();
    for p in params {
        if (p.theta() - theta).abs() > 1e-12 {
            return Err(Error::Mismatch(format!(
                "superposition needs one shared theta, got {theta} and {}",
                p.theta()
            )));
        }
    }
    BTParams::new(params.iter().map(|p| p.alpha()).sum(), theta)
}

/// Split every counted unit independently across classes with the given
/// probabilities. Class i is itself a path of the process with rate
/// alpha e^{(1-p_i) theta} and jump rate p_i theta; the classes are dependent.
pub fn decompose<R: Rng + ?Sized>(
    path: &EventPath,
    probs: &[f64],
    rng: &mut R,
) -> Result<Vec<EventPath>> {
    check_probability_vector(probs)?;
    let alpha = path.params.alpha();
    let theta = path.params.theta();
    let mut class_events: Vec<Vec<EventRecord>> = vec![Vec::new(); probs.len()];
    let mut split = vec![0u64; probs.len()];
    for ev in &path.events {
        split.fill(0);
        for _ in 0..ev.jump {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut class = probs.len() - 1;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    class = i;
                    break;
                }
            }
            split[class] += 1;
        }
        for (i, &jump) in split.iter().enumerate() {
            if jump > 0 {
                class_events[i].push(EventRecord {
                    time: ev.time,
                    jump,
                });
            }
        }
    }
    class_events
        .into_iter()
        .zip(probs)
        .map(|(events, &p)| {
            let marginal = BTParams::new(alpha * ((1.0 - p) * theta).exp(), p * theta)?;
            EventPath::new(marginal, path.horizon, events, path.seed)
        })
        .collect()
}

fn check_probability_vector(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Domain("empty probability vector".into()));
    }
    if let Some(bad) = probs
        .iter()
        .find(|p| !p.is_finite() || **p <= 0.0 || **p > 1.0)
    {
        return Err(Error::Domain(format!(
            "class probabilities must lie in (0, 1], got {bad}"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "class probabilities must sum to 1, got {total}"
        )));
    }
    Ok(())
}

fn check_split_probability(p: f64) -> Result<()> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(Error::Domain(format!(
            "split probability must lie strictly inside (0, 1), got {p}"
        )));
    }
    Ok(())
}

/// Joint law of a binary unit split of N(t) into (kept, discarded):
/// P[N1 = k, N2 = n] = C(n+k, k) p^k (1-p)^n P[N(t) = n+k].
pub fn decomposition_joint_pmf(
    params: BTParams,
    t: f64,
    p: f64,
    k: u64,
    n: u64,
) -> Result<f64> {
    check_split_probability(p)?;
    let total = crate::distributions::bt_log_pmf(params.at_time(t)?, n + k)?;
    let ln_joint = math::ln_binomial(n + k, k)
        + k as f64 * p.ln()
        + n as f64 * (1.0 - p).ln()
        + total;
    Ok(ln_joint.exp())
}

/// Joint mgf of the same split: exp(alpha t (e^{theta (p e^{u1} + (1-p) e^{u2})} - e^theta)).
pub fn decomposition_joint_mgf(
    params: BTParams,
    t: f64,
    p: f64,
    u1: f64,
    u2: f64,
) -> Result<f64> {
    check_split_probability(p)?;
    if !u1.is_finite() || !u2.is_finite() {
        return Err(Error::Domain(format!(
            "mgf arguments must be finite, got ({u1}, {u2})"
        )));
    }
    let scaled = params.at_time(t)?;
    let mix = p * u1.exp() + (1.0 - p) * u2.exp();
    let inner = scaled.theta() * mix;
    if inner > crate::bellpoly::MAX_EXP_ARG {
        return Err(Error::Overflow(format!("joint mgf inner exponent {inner}")));
    }
    let exponent = scaled.alpha() * (inner.exp() - scaled.theta().exp());
    if exponent > crate::bellpoly::MAX_EXP_ARG {
        return Err(Error::Overflow(format!("joint mgf outer exponent {exponent}")));
    }
    Ok(exponent.exp())
}

/// A compound Poisson specification: epoch rate plus a finitely supported
/// jump-size law on the positive integers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompoundPoissonSpec {
    rate: f64,
    jump_pmf: BTreeMap<u64, f64>,
}

impl CompoundPoissonSpec {
    pub fn new(rate: f64, jump_pmf: BTreeMap<u64, f64>) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::Domain(format!(
                "epoch rate must be a positive finite real, got {rate}"
            )));
        }
        if jump_pmf.is_empty() || jump_pmf.contains_key(&0) {
            return Err(Error::Domain(
                "jump law must be supported on the positive integers".into(),
            ));
        }
        if let Some((k, w)) = jump_pmf.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::Domain(format!("jump mass at {k} is {w}")));
        }
        let total: f64 = jump_pmf.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "jump law must sum to 1 within 1e-9, got {total}"
            )));
        }
        Ok(CompoundPoissonSpec { rate, jump_pmf })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn jump_pmf(&self) -> &BTreeMap<u64, f64> {
        &self.jump_pmf
    }

    /// Inversion draw from the jump law.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (&k, &w) in &self.jump_pmf {
            acc += w;
            if u < acc {
                return k;
            }
        }
        *self.jump_pmf.keys().next_back().expect("non-empty by construction")
    }

    /// Draw the compound count at time t: a Poisson number of epochs, each
    /// contributing one jump draw.
    pub fn sample_count<R: Rng + ?Sized>(&self, t: f64, rng: &mut R) -> Result<u64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Domain(format!(
                "time must be a positive finite real, got {t}"
            )));
        }
        let epochs = draw_poisson(self.rate * t, rng)?;
        Ok((0..epochs).map(|_| self.sample_jump(rng)).sum())
    }
}

/// Sum of two independent processes with different jump rates theta. The sum
/// leaves the family but stays compound Poisson: epoch rate
/// alpha1 (e^theta1 - 1) + alpha2 (e^theta2 - 1), and jump law the
/// rate-weighted mixture (alpha1 theta1^x + alpha2 theta2^x) / (lambda x!)
/// truncated once its certified tail drops below 1e-15.
pub fn convolve_different_theta(a: BTParams, b: BTParams) -> Result<CompoundPoissonSpec> {
    let lambda = a.epoch_rate() + b.epoch_rate();
    let mut jump_pmf = BTreeMap::new();
    let mut x = 1u64;
    loop {
        let mass = (unnormalized_jump_mass(a, x) + unnormalized_jump_mass(b, x)) / lambda;
        if mass > 0.0 {
            jump_pmf.insert(x, mass);
        }
        let tail = (a.alpha() * poisson_weight_tail(a.theta(), x)
            + b.alpha() * poisson_weight_tail(b.theta(), x))
            / lambda;
        if tail < JUMP_PMF_TAIL_TOL {
            break;
        }
        x += 1;
    }
    CompoundPoissonSpec::new(lambda, jump_pmf)
}

// alpha theta^x / x!
fn unnormalized_jump_mass(p: BTParams, x: u64) -> f64 {
    (p.alpha().ln() + x as f64 * p.theta().ln() - math::ln_factorial(x)).exp()
}

// sum_{n > k} theta^n / n! <= theta^{k+1} e^theta / (k+1)!
fn poisson_weight_tail(theta: f64, k: u64) -> f64 {
    ((k + 1) as f64 * theta.ln() + theta - math::ln_factorial(k + 1)).exp()
}

/// One draw of N1(N2(t)) where N2 is Poisson(omega) and N1 Poisson(nu): the
/// composed count is Bell-Touchard with rate omega e^{-nu} t and jump rate nu.
pub fn iterated_poisson_sample<R: Rng + ?Sized>(
    nu: f64,
    omega: f64,
    t: f64,
    rng: &mut R,
) -> Result<u64> {
    for (name, v) in [("nu", nu), ("omega", omega), ("t", t)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Domain(format!(
                "{name} must be a positive finite real, got {v}"
            )));
        }
    }
    let outer = draw_poisson(omega * t, rng)?;
    if outer == 0 {
        return Ok(0);
    }
    draw_poisson(nu * outer as f64, rng)
}

/// One draw from the multiple-Poisson representation: independent
/// Poisson(c_n t) counters with c_n = alpha theta^n / n!, summed as
/// sum_n n xi_n over n = 1..=k_trunc. The truncation must leave certified
/// tail mass below [`MULTIPLE_POISSON_TAIL_TOL`].
pub fn multiple_poisson_sample<R: Rng + ?Sized>(
    params: BTParams,
    t: f64,
    k_trunc: usize,
    rng: &mut R,
) -> Result<u64> {
    if k_trunc == 0 {
        return Err(Error::Domain("truncation level must be at least 1".into()));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!(
            "time must be a positive finite real, got {t}"
        )));
    }
    let tail = params.alpha() * poisson_weight_tail(params.theta(), k_trunc as u64);
    if tail >= MULTIPLE_POISSON_TAIL_TOL {
        return Err(Error::Truncation(format!(
            "component rates past K = {k_trunc} still carry {tail:.3e} >= {MULTIPLE_POISSON_TAIL_TOL:.0e}; \
             use K >= {}",
            multiple_poisson_min_k(params)?
        )));
    }
    let mut total = 0u64;
    for n in 1..=k_trunc as u64 {
        let rate = t * unnormalized_jump_mass(params, n);
        total += n * draw_poisson(rate, rng)?;
    }
    Ok(total)
}

/// Smallest truncation level whose certified tail is below
/// [`MULTIPLE_POISSON_TAIL_TOL`].
pub fn multiple_poisson_min_k(params: BTParams) -> Result<usize> {
    for k in 1..=10_000u64 {
        if params.alpha() * poisson_weight_tail(params.theta(), k) < MULTIPLE_POISSON_TAIL_TOL {
            return Ok(k as usize);
        }
    }
    Err(Error::NonConvergence { max_terms: 10_000 })
}
