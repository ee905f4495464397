//! Negative-integer-order polylogarithms and the gamma-mixed marginal law
//! that arises when the base rate of the process is itself exponentially
//! distributed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::math;

/// Order cap for [`polylog_neg_int`]; the Eulerian-number rows stay well
/// inside f64 range through here.
pub const POLYLOG_MAX_ORDER: u32 = 60;

// The mixed pmf switches to an all-log evaluation, so it can go far beyond
// the linear-scale polylog cap; this only guards against absurd requests.
const MIXED_MAX_N: u64 = 10_000;

/// Mixed law parameters: jump rate theta, and the rate gamma of the
/// exponential mixing law on the base intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedBTParams {
    theta: f64,
    gamma: f64,
}

impl MixedBTParams {
    pub fn new(theta: f64, gamma: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::Domain(format!(
                "mixed law theta must be a positive finite real, got {theta}"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Domain(format!(
                "mixing rate gamma must be a positive finite real, got {gamma}"
            )));
        }
        Ok(MixedBTParams { theta, gamma })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Li_{-n}(x) = sum_{k>=1} k^n x^k for |x| < 1, n <= 60, by the Eulerian
/// closed form Li_{-n}(x) = (1-x)^{-(n+1)} sum_{k=0}^{n-1} A(n,k) x^{n-k}.
pub fn polylog_neg_int(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "polylogarithm argument must satisfy |x| < 1, got {x}"
        )));
    }
    if n > POLYLOG_MAX_ORDER {
        return Err(Error::DegreeExceeded {
            requested: n as usize,
            max: POLYLOG_MAX_ORDER as usize,
        });
    }
    if n == 0 {
        return Ok(x / (1.0 - x));
    }
    let row = eulerian_row(n as usize);
    let mut sum = 0.0;
    for (k, a) in row.iter().enumerate() {
        sum += a * x.powi((n as usize - k) as i32);
    }
    Ok(sum / (1.0 - x).powi(n as i32 + 1))
}

/// ln Li_{-n}(x) for x in (0,1), any order: same Eulerian form with the
/// triangle carried in log scale.
pub(crate) fn log_polylog_pos(n: u64, x: f64) -> f64 {
    debug_assert!(n >= 1 && x > 0.0 && x < 1.0);
    let n = n as usize;
    let log_row = log_eulerian_row(n);
    let ln_x = x.ln();
    let terms: Vec<f64> = (0..n)
        .map(|k| log_row[k] + (n - k) as f64 * ln_x)
        .collect();
    math::log_sum_exp(&terms) - (n as f64 + 1.0) * (-x).ln_1p()
}

// Row n of the Eulerian triangle: A(n,k) = (k+1)A(n-1,k) + (n-k)A(n-1,k-1).
fn eulerian_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for m in 2..=n {
        let mut next = vec![0.0; m];
        for k in 0..m {
            let keep = if k < row.len() { (k as f64 + 1.0) * row[k] } else { 0.0 };
            let carry = if k >= 1 { (m - k) as f64 * row[k - 1] } else { 0.0 };
            next[k] = keep + carry;
        }
        row = next;
    }
    row
}

fn log_eulerian_row(n: usize) -> Vec<f64> {
    let mut row = vec![0.0f64];
    for m in 2..=n {
        let mut next = vec![f64::NEG_INFINITY; m];
        for k in 0..m {
            let keep = if k < row.len() {
                (k as f64 + 1.0).ln() + row[k]
            } else {
                f64::NEG_INFINITY
            };
            let carry = if k >= 1 {
                ((m - k) as f64).ln() + row[k - 1]
            } else {
                f64::NEG_INFINITY
            };
            next[k] = math::log_add_exp(keep, carry);
        }
        row = next;
    }
    row
}

/// P[N(t) = n] when the base rate alpha carries an Exp(gamma) prior:
/// gamma / (t(e^theta - 1) + gamma) at n = 0, and
/// theta^n gamma / (n! z) Li_{-n}(t/z) with z = t e^theta + gamma for n >= 1.
pub fn mixed_bt_pmf(params: MixedBTParams, t: f64, n: u64) -> Result<f64> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!(
            "time must be a positive finite real, got {t}"
        )));
    }
    if n > MIXED_MAX_N {
        return Err(Error::DegreeExceeded {
            requested: n as usize,
            max: MIXED_MAX_N as usize,
        });
    }
    let (theta, gamma) = (params.theta, params.gamma);
    if n == 0 {
        // Direct integral of e^{-alpha t (e^theta - 1)} against gamma e^{-gamma alpha}.
        return Ok(gamma / (t * theta.exp_m1() + gamma));
    }
    let z = t * theta.exp() + gamma;
    let w = t / z; // in (0,1): z > t e^theta > t
    let ln_pmf = n as f64 * theta.ln() + gamma.ln() - math::ln_factorial(n) - z.ln()
        + log_polylog_pos(n, w);
    Ok(ln_pmf.exp())
}
