//! Zero-truncated Poisson: the batch-size law of the counting process.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::math;

// Above this, inversion from x = 1 walks too far; conditioning a plain
// Poisson on positivity accepts with probability 1 - e^-theta ~ 1 instead.
const INVERSION_THETA_MAX: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZTPParams {
    theta: f64,
}

impl ZTPParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::Domain(format!(
                "zero-truncated Poisson rate must be a positive finite real, got {theta}"
            )));
        }
        Ok(ZTPParams { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// E[X] = theta e^theta / (e^theta - 1) = theta / (1 - e^-theta).
    pub fn mean(&self) -> f64 {
        self.theta / -(-self.theta).exp_m1()
    }
}

/// P[X = x] = theta^x / (x! (e^theta - 1)) on x >= 1.
pub fn ztp_pmf(params: ZTPParams, x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::Domain(
            "zero-truncated Poisson has no mass at 0".into(),
        ));
    }
    let theta = params.theta;
    Ok((x as f64 * theta.ln() - math::ln_factorial(x) - math::ln_expm1(theta)).exp())
}

/// Draw one batch size.
///
/// Inversion by sequential search starting at x = 1; the mean number of steps
/// is about theta, so past [`INVERSION_THETA_MAX`] the draw switches to a
/// plain Poisson rejected at zero. Both routes are exact.
pub fn ztp_sample<R: Rng + ?Sized>(params: ZTPParams, rng: &mut R) -> u64 {
    let theta = params.theta;
    if theta <= INVERSION_THETA_MAX {
        // Compare against the unnormalized cumulative of theta^x / x!.
        let target = rng.random::<f64>() * theta.exp_m1();
        let mut x = 1u64;
        let mut term = theta;
        let mut acc = theta;
        while target > acc {
            x += 1;
            term *= theta / x as f64;
            if term == 0.0 {
                break; // cumulative saturated in f64; mass beyond is ~0
            }
            acc += term;
        }
        x
    } else {
        let poisson = rand_distr::Poisson::new(theta).expect("theta validated at construction");
        loop {
            let draw = rng.sample(poisson) as u64;
            if draw >= 1 {
                return draw;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pmf_at_ln_two() {
        // theta = ln 2 makes the normalizer e^theta - 1 equal 1.
        let p = ZTPParams::new(std::f64::consts::LN_2).unwrap();
        assert_relative_eq!(
            ztp_pmf(p, 1).unwrap(),
            std::f64::consts::LN_2,
            max_relative = 1e-12
        );
    }

    #[test]
    fn pmf_rejects_zero_and_normalizes() {
        let p = ZTPParams::new(1.2667).unwrap();
        assert!(matches!(ztp_pmf(p, 0), Err(Error::Domain(_))));
        let total: f64 = (1..=60).map(|x| ztp_pmf(p, x).unwrap()).sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_rate_is_rejected() {
        assert!(ZTPParams::new(0.0).is_err());
        assert!(ZTPParams::new(-1.0).is_err());
        assert!(ZTPParams::new(f64::INFINITY).is_err());
    }

    #[test]
    fn sampler_mean_matches_both_branches() {
        let mut rng = crate::rng::master_rng(2024);
        for &theta in &[0.3472, 1.2667, 5.0, 40.0] {
            let p = ZTPParams::new(theta).unwrap();
            let n = 100_000usize;
            let draws: Vec<u64> = (0..n).map(|_| ztp_sample(p, &mut rng)).collect();
            assert!(draws.iter().all(|&x| x >= 1));
            let mean = draws.iter().sum::<u64>() as f64 / n as f64;
            let raw_var = draws
                .iter()
                .map(|&x| (x as f64 - mean).powi(2))
                .sum::<f64>()
                / n as f64;
            let se = (raw_var / n as f64).sqrt();
            assert!(
                (mean - p.mean()).abs() < 3.0 * se.max(1e-12),
                "theta = {theta}: sample mean {mean} vs {}",
                p.mean()
            );
        }
    }
}
