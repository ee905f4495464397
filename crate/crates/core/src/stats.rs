//! Empirical count laws and the two comparison statistics behind every
//! Monte Carlo check here: total variation distance with a pooled tail, and
//! a chi-square goodness-of-fit test with minimum-expected-count pooling.

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Observed counts over the nonnegative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPmf {
    counts: BTreeMap<u64, u64>,
    n: u64,
}

impl EmpiricalPmf {
    pub fn mass(&self, k: u64) -> f64 {
        *self.counts.get(&k).unwrap_or(&0) as f64 / self.n as f64
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn count(&self, k: u64) -> u64 {
        *self.counts.get(&k).unwrap_or(&0)
    }

    pub fn max_value(&self) -> u64 {
        *self.counts.keys().next_back().expect("counts never empty")
    }

    /// Probabilities 0..=max_value as a dense vector.
    pub fn dense(&self) -> Vec<f64> {
        (0..=self.max_value()).map(|k| self.mass(k)).collect()
    }

    pub fn mean(&self) -> f64 {
        self.counts
            .iter()
            .map(|(&k, &c)| k as f64 * c as f64)
            .sum::<f64>()
            / self.n as f64
    }

    /// Population variance of the observed sample.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.counts
            .iter()
            .map(|(&k, &c)| (k as f64 - m).powi(2) * c as f64)
            .sum::<f64>()
            / self.n as f64
    }
}

/// Tally a sample of counts; rejects empty input.
pub fn empirical_pmf(samples: &[u64]) -> Result<EmpiricalPmf> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts = BTreeMap::new();
    for &s in samples {
        *counts.entry(s).or_insert(0u64) += 1;
    }
    Ok(EmpiricalPmf {
        counts,
        n: samples.len() as u64,
    })
}

/// Total variation distance: half the L1 gap over 0..=support_cap plus half
/// the gap between the pooled tails, so mass beyond the cap is not dropped.
pub fn tv_distance<P, Q>(p: P, q: Q, support_cap: u64) -> f64
where
    P: Fn(u64) -> f64,
    Q: Fn(u64) -> f64,
{
    let mut l1 = 0.0;
    let mut p_tail = 1.0;
    let mut q_tail = 1.0;
    for k in 0..=support_cap {
        let (pk, qk) = (p(k), q(k));
        l1 += (pk - qk).abs();
        p_tail -= pk;
        q_tail -= qk;
    }
    0.5 * (l1 + (p_tail.max(0.0) - q_tail.max(0.0)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of `samples` against the analytic `pmf`.
///
/// Cells walk k upward and pool until each expected count reaches
/// `min_expected`; whatever remains past the largest observation forms the
/// tail cell, merged backwards if it is itself too small. dof = cells - 1.
pub fn chi_square_gof<F>(samples: &[u64], pmf: F, min_expected: f64) -> Result<GofResult>
where
    F: Fn(u64) -> f64,
{
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if min_expected.is_nan() || min_expected <= 0.0 {
        return Err(Error::Domain(format!(
            "minimum expected count must be positive, got {min_expected}"
        )));
    }
    let emp = empirical_pmf(samples)?;
    let n = emp.n() as f64;
    let k_max = emp.max_value();

    let mut cells: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut obs_acc = 0.0;
    let mut exp_acc = 0.0;
    let mut mass_acc = 0.0;
    for k in 0..=k_max {
        let pk = pmf(k);
        if !pk.is_finite() || pk < 0.0 {
            return Err(Error::Domain(format!("pmf({k}) = {pk} is not a probability")));
        }
        obs_acc += emp.count(k) as f64;
        exp_acc += n * pk;
        mass_acc += pk;
        if exp_acc >= min_expected {
            cells.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    // Tail cell: any open partial cell plus all analytic mass past k_max.
    let tail_exp = exp_acc + n * (1.0 - mass_acc).max(0.0);
    let tail_obs = obs_acc;
    if tail_exp >= min_expected {
        cells.push((tail_obs, tail_exp));
    } else if let Some(last) = cells.last_mut() {
        last.0 += tail_obs;
        last.1 += tail_exp;
    }

    if cells.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "chi-square needs at least 2 cells after pooling, got {}",
            cells.len()
        )));
    }
    let statistic: f64 = cells
        .iter()
        .map(|&(o, e)| (o - e) * (o - e) / e)
        .sum();
    let dof = cells.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .expect("dof >= 1")
        .sf(statistic);
    Ok(GofResult {
        statistic,
        dof,
        p_value,
    })
}
