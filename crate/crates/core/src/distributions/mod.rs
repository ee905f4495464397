//! The Bell-Touchard count distribution BT(alpha, theta) and its relatives.
//!
//! P[X = k] = e^{-alpha (e^theta - 1)} theta^k B_k(alpha) / k!, where B_k is
//! the Bell polynomial. The law is closed under convolution in alpha, equals
//! a Neyman Type A law after reparameterization, and is the marginal of the
//! counting process at unit time. All pmf work happens in log scale.

mod mixed;
mod ztp;

pub use mixed::{mixed_bt_pmf, polylog_neg_int, MixedBTParams, POLYLOG_MAX_ORDER};
pub use ztp::{ztp_pmf, ztp_sample, ZTPParams};

use rand::Rng;
use serde::Serialize;

use crate::bellpoly;
use crate::error::{Error, Result};
use crate::math;

/// Log-pmf threshold past the mode that closes adaptive support scans.
const SUPPORT_LOG_CUTOFF: f64 = -40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BTParams {
    alpha: f64,
    theta: f64,
}

impl BTParams {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Domain(format!(
                "alpha must be a positive finite real, got {alpha}"
            )));
        }
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::Domain(format!(
                "theta must be a positive finite real, got {theta}"
            )));
        }
        Ok(BTParams { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Marginal law of the process at time t: alpha scales linearly.
    pub fn at_time(&self, t: f64) -> Result<BTParams> {
        check_time(t)?;
        BTParams::new(self.alpha * t, self.theta)
    }

    /// Intensity of event epochs: alpha (e^theta - 1).
    pub fn epoch_rate(&self) -> f64 {
        self.alpha * self.theta.exp_m1()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!(
            "time must be a positive finite real, got {t}"
        )));
    }
    Ok(())
}

/// ln P[X = k].
pub fn bt_log_pmf(params: BTParams, k: u64) -> Result<f64> {
    let prefix = bellpoly::log_bell_prefix(k as usize, params.alpha)?;
    Ok(log_pmf_term(params, k, prefix[k as usize]))
}

/// ln P[X = k] for all k = 0..=k_max in one recurrence pass.
pub fn bt_log_pmf_vec(params: BTParams, k_max: u64) -> Result<Vec<f64>> {
    let prefix = bellpoly::log_bell_prefix(k_max as usize, params.alpha)?;
    Ok(prefix
        .iter()
        .enumerate()
        .map(|(k, &ln_bell)| log_pmf_term(params, k as u64, ln_bell))
        .collect())
}

fn log_pmf_term(params: BTParams, k: u64, ln_bell: f64) -> f64 {
    -params.alpha * params.theta.exp_m1() + k as f64 * params.theta.ln()
        - math::ln_factorial(k)
        + ln_bell
}

/// P[X = k].
pub fn bt_pmf(params: BTParams, k: u64) -> Result<f64> {
    Ok(bt_log_pmf(params, k)?.exp())
}

/// P[X <= k].
pub fn bt_cdf(params: BTParams, k: u64) -> Result<f64> {
    let log_pmf = bt_log_pmf_vec(params, k)?;
    Ok(log_pmf.iter().map(|lp| lp.exp()).sum::<f64>().min(1.0))
}

/// Smallest k past the mode where the log-pmf drops below -40; truncating
/// the support there leaves tail mass far under any tolerance used here.
pub fn bt_support_cap(params: BTParams) -> Result<u64> {
    let mut guess = (bt_mean(params) + 20.0 * bt_variance(params).sqrt() + 60.0).ceil() as u64;
    for _ in 0..8 {
        let lp = bt_log_pmf_vec(params, guess)?;
        let mode = lp
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("log-pmf is never NaN"))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if let Some(k) = (mode + 1..lp.len()).find(|&k| lp[k] < SUPPORT_LOG_CUTOFF) {
            return Ok(k as u64);
        }
        guess *= 2;
    }
    Err(Error::NonConvergence {
        max_terms: guess as usize,
    })
}

/// Probability generating function E[s^X] = exp(alpha (e^{s theta} - e^theta))
/// for |s| <= 1.
pub fn bt_pgf(params: BTParams, s: f64) -> Result<f64> {
    if !s.is_finite() || s.abs() > 1.0 {
        return Err(Error::Domain(format!(
            "pgf argument must satisfy |s| <= 1, got {s}"
        )));
    }
    // Exponent is <= 0 on the whole domain; s = 1 gives exactly 1.
    let exponent = params.alpha * ((s * params.theta).exp() - params.theta.exp());
    Ok(exponent.exp())
}

/// Moment generating function E[e^{tX}] = exp(alpha (e^{theta e^t} - e^theta)).
pub fn bt_mgf(params: BTParams, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("mgf argument must be finite, got {t}")));
    }
    let inner = params.theta * t.exp();
    if inner > bellpoly::MAX_EXP_ARG {
        return Err(Error::Overflow(format!("mgf inner exponent {inner}")));
    }
    let exponent = params.alpha * (inner.exp() - params.theta.exp());
    if exponent > bellpoly::MAX_EXP_ARG {
        return Err(Error::Overflow(format!("mgf outer exponent {exponent}")));
    }
    Ok(exponent.exp())
}

/// E[X] = alpha theta e^theta.
pub fn bt_mean(params: BTParams) -> f64 {
    params.alpha * params.theta * params.theta.exp()
}

/// Var[X] = theta (theta + 1) alpha e^theta.
pub fn bt_variance(params: BTParams) -> f64 {
    params.theta * (params.theta + 1.0) * params.alpha * params.theta.exp()
}

/// Exact draw of the time-t marginal: a Poisson number of epochs at rate
/// alpha t (e^theta - 1), each contributing a zero-truncated Poisson batch.
pub fn bt_sample<R: Rng + ?Sized>(params: BTParams, t: f64, rng: &mut R) -> Result<u64> {
    check_time(t)?;
    let epochs = draw_poisson(t * params.epoch_rate(), rng)?;
    let batch = ZTPParams::new(params.theta)?;
    Ok((0..epochs).map(|_| ztp_sample(batch, rng)).sum())
}

pub(crate) fn draw_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    let dist = rand_distr::Poisson::new(lambda)
        .map_err(|e| Error::Domain(format!("Poisson rate {lambda}: {e}")))?;
    Ok(rng.sample(dist) as u64)
}

/// Neyman Type A pmf: identical to BT(lambda e^{-theta}, theta).
pub fn neyman_a_pmf(lambda: f64, theta: f64, k: u64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "lambda must be a positive finite real, got {lambda}"
        )));
    }
    bt_pmf(BTParams::new(lambda * (-theta).exp(), theta)?, k)
}

/// Marginal pmf of a multiple Poisson process with component rates
/// c_1..c_K (jump size n arrives at rate c_n; anything beyond K is treated
/// as zero by the caller's truncation):
/// P[X = k] = e^{-t sum c} sum over partitions of k of prod (t c_j)^{r_j} / r_j!.
pub fn composed_poisson_pmf(c: &[f64], t: f64, k: usize) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::Domain("empty component rate sequence".into()));
    }
    if let Some(bad) = c.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Domain(format!(
            "component rates must be finite and nonnegative, got {bad}"
        )));
    }
    check_time(t)?;
    if k > c.len() {
        return Err(Error::Domain(format!(
            "count {k} exceeds the truncation level {}",
            c.len()
        )));
    }
    let lambda_total = t * c.iter().sum::<f64>();
    let mut sum = 0.0;
    math::for_each_partition(k, |parts| {
        let mut term = 1.0;
        for &(size, mult) in parts {
            let rate = t * c[size - 1];
            term *= rate.powi(mult as i32) / math::ln_factorial(mult as u64).exp();
        }
        sum += term;
    });
    Ok((-lambda_total).exp() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(alpha: f64, theta: f64) -> BTParams {
        BTParams::new(alpha, theta).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(BTParams::new(0.0, 1.0).is_err());
        assert!(BTParams::new(1.0, 0.0).is_err());
        assert!(BTParams::new(f64::NAN, 1.0).is_err());
        assert!(BTParams::new(1.0, f64::INFINITY).is_err());
        assert!(params(1.0, 1.0).at_time(0.0).is_err());
        assert_relative_eq!(
            params(0.5, 1.0).at_time(3.0).unwrap().alpha(),
            1.5,
            max_relative = 1e-15
        );
    }

    #[test]
    fn pmf_closed_forms_at_small_k() {
        let p = params(1.3, 0.9);
        let nu = 0.9f64.exp_m1();
        assert_relative_eq!(
            bt_pmf(p, 0).unwrap(),
            (-1.3 * nu).exp(),
            max_relative = 1e-13
        );
        // B_1(a) = a, B_2(a) = a^2 + a
        assert_relative_eq!(
            bt_pmf(p, 1).unwrap(),
            (-1.3 * nu).exp() * 0.9 * 1.3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            bt_pmf(p, 2).unwrap(),
            (-1.3 * nu).exp() * 0.9 * 0.9 * (1.3 * 1.3 + 1.3) / 2.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn pmf_normalizes_over_adaptive_support() {
        for p in [params(1.0, 1.0), params(0.4450, 0.6453), params(5.0, 2.0)] {
            let cap = bt_support_cap(p).unwrap();
            let total: f64 = bt_log_pmf_vec(p, cap)
                .unwrap()
                .iter()
                .map(|lp| lp.exp())
                .sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn log_pmf_finite_at_extreme_arguments() {
        let lp = bt_log_pmf(params(1e4, 1.0), 10_000).unwrap();
        assert!(lp.is_finite());
        let lp = bt_log_pmf(params(100.0, 2.0), 500).unwrap();
        assert!(lp.is_finite());
    }

    #[test]
    fn cdf_telescopes_and_reaches_one() {
        let p = params(1.0, 1.0);
        for k in 1..=20u64 {
            let diff = bt_cdf(p, k).unwrap() - bt_cdf(p, k - 1).unwrap();
            assert_relative_eq!(diff, bt_pmf(p, k).unwrap(), epsilon = 1e-12);
        }
        let cap = bt_support_cap(p).unwrap();
        assert!(bt_cdf(p, cap).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn convolution_closure_in_alpha() {
        for (a1, a2, theta) in [(1.0, 2.0, 0.5), (0.3, 0.7, 1.0)] {
            let len = 60u64;
            let p1: Vec<f64> = bt_log_pmf_vec(params(a1, theta), len)
                .unwrap()
                .iter()
                .map(|lp| lp.exp())
                .collect();
            let p2: Vec<f64> = bt_log_pmf_vec(params(a2, theta), len)
                .unwrap()
                .iter()
                .map(|lp| lp.exp())
                .collect();
            let sum = params(a1 + a2, theta);
            for k in 0..=len as usize {
                let conv: f64 = (0..=k).map(|j| p1[j] * p2[k - j]).sum();
                assert_relative_eq!(
                    conv,
                    bt_pmf(sum, k as u64).unwrap(),
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn pgf_matches_pmf_series() {
        let p = params(1.0, 1.0);
        let cap = bt_support_cap(p).unwrap();
        let pmf: Vec<f64> = bt_log_pmf_vec(p, cap + 40)
            .unwrap()
            .iter()
            .map(|lp| lp.exp())
            .collect();
        for &s in &[-0.9f64, 0.0, 0.5, 0.9] {
            let series: f64 = pmf
                .iter()
                .enumerate()
                .map(|(k, pk)| pk * s.powi(k as i32))
                .sum();
            assert_relative_eq!(bt_pgf(p, s).unwrap(), series, epsilon = 1e-9);
        }
        assert_eq!(bt_pgf(p, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            bt_pgf(p, 0.0).unwrap(),
            bt_pmf(p, 0).unwrap(),
            max_relative = 1e-12
        );
        assert!(matches!(bt_pgf(p, 1.1), Err(Error::Domain(_))));
        assert!(matches!(bt_pgf(p, -1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn mgf_finite_differences_recover_cumulants() {
        let p = params(1.0, 1.0);
        let h = 1e-4;
        let k = |t: f64| bt_mgf(p, t).unwrap().ln();
        let k1 = (k(h) - k(-h)) / (2.0 * h);
        let k2 = (k(h) - 2.0 * k(0.0) + k(-h)) / (h * h);
        assert_relative_eq!(k1, bt_mean(p), max_relative = 1e-4);
        assert_relative_eq!(k2, bt_variance(p), max_relative = 1e-4);
        assert!(matches!(bt_mgf(p, 10.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn moments_match_pmf_sums() {
        for p in [params(1.0, 1.0), params(0.1760, 0.3472)] {
            let cap = bt_support_cap(p).unwrap() + 60;
            let pmf: Vec<f64> = bt_log_pmf_vec(p, cap)
                .unwrap()
                .iter()
                .map(|lp| lp.exp())
                .collect();
            let mean: f64 = pmf.iter().enumerate().map(|(k, pk)| k as f64 * pk).sum();
            let second: f64 = pmf
                .iter()
                .enumerate()
                .map(|(k, pk)| (k as f64) * (k as f64) * pk)
                .sum();
            assert_relative_eq!(mean, bt_mean(p), max_relative = 1e-9);
            assert_relative_eq!(
                second - mean * mean,
                bt_variance(p),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn neyman_reparameterization_matches_direct_series() {
        let (lambda, theta) = (2.0f64, 1.0f64);
        for k in 0..=10u64 {
            // theta^k e^{-lambda} / k! * sum_j (lambda e^-theta)^j j^k / j!
            let a = lambda * (-theta).exp();
            let series: f64 = (0..400)
                .map(|j| {
                    (j as f64 * a.ln() - math::ln_factorial(j)).exp()
                        * (j as f64).powi(k as i32)
                })
                .sum();
            let direct =
                (k as f64 * theta.ln() - lambda - math::ln_factorial(k)).exp() * series;
            assert_relative_eq!(
                neyman_a_pmf(lambda, theta, k).unwrap(),
                direct,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn composed_poisson_reduces_to_bt_rates() {
        // c_n = alpha theta^n / n! reproduces the BT marginal.
        let (alpha, theta, t) = (1.0f64, 1.0f64, 1.0f64);
        let c: Vec<f64> = (1..=40)
            .map(|n| alpha * (n as f64 * theta.ln() - math::ln_factorial(n)).exp())
            .collect();
        let p = params(alpha, theta);
        for k in 0..=10usize {
            assert_relative_eq!(
                composed_poisson_pmf(&c, t, k).unwrap(),
                bt_pmf(p, k as u64).unwrap(),
                epsilon = 1e-9
            );
        }
        assert_relative_eq!(
            composed_poisson_pmf(&c, t, 0).unwrap(),
            (-t * c.iter().sum::<f64>()).exp(),
            max_relative = 1e-13
        );
        assert!(composed_poisson_pmf(&c, t, 41).is_err());
        assert!(composed_poisson_pmf(&[], t, 0).is_err());
        assert!(composed_poisson_pmf(&[1.0, -0.5], t, 1).is_err());
    }

    #[test]
    fn mixed_pmf_matches_quadrature_mixing() {
        // Integrate the conditional BT pmf against the Exp(gamma) prior.
        let (theta, gamma, t) = (0.5f64, 1.0f64, 1.0f64);
        let mp = MixedBTParams::new(theta, gamma).unwrap();
        for n in 0..=5u64 {
            let integrand = |a: f64| {
                if a <= 0.0 {
                    return if n == 0 { gamma } else { 0.0 };
                }
                let conditional = bt_pmf(params(a * t, theta), n).unwrap();
                conditional * gamma * (-gamma * a).exp()
            };
            let quad = math::adaptive_simpson(integrand, 0.0, 40.0 / gamma, 1e-10).unwrap();
            assert_relative_eq!(mixed_bt_pmf(mp, t, n).unwrap(), quad, epsilon = 1e-7);
        }
    }

    #[test]
    fn sampler_is_exact_against_the_pmf() {
        use crate::stats;
        let cases = [(1.0, 1.0, 1.0), (0.1760, 0.3472, 5.0)];
        for (alpha, theta, t) in cases {
            let p = params(alpha, theta);
            let scaled = p.at_time(t).unwrap();
            let mut rng = crate::rng::master_rng(7);
            let draws: Vec<u64> = (0..1_000_000)
                .map(|_| bt_sample(p, t, &mut rng).unwrap())
                .collect();
            let emp = stats::empirical_pmf(&draws).unwrap();
            let cap = bt_support_cap(scaled).unwrap();
            let pmf: Vec<f64> = bt_log_pmf_vec(scaled, cap)
                .unwrap()
                .iter()
                .map(|lp| lp.exp())
                .collect();
            let analytic = |k: u64| pmf.get(k as usize).copied().unwrap_or(0.0);
            let tv = stats::tv_distance(|k| emp.mass(k), analytic, cap);
            assert!(tv <= 0.005, "({alpha},{theta},{t}): tv = {tv}");
            let gof = stats::chi_square_gof(&draws, analytic, 5.0).unwrap();
            assert!(
                gof.p_value > 1e-4,
                "({alpha},{theta},{t}): p = {}",
                gof.p_value
            );
        }
    }
}
