//! Single-variable Bell polynomials B_n(x) = sum_k S(n,k) x^k, evaluated in
//! log scale so large degrees stay finite.
//!
//! The primary algorithm is Touchard's recurrence
//! B_{n+1}(x) = x * sum_{k<=n} C(n,k) B_k(x), run in log space with
//! log-sum-exp. Two independent routes cross-check it: the truncated Dobinski
//! series e^{-x} sum_k k^n x^k / k!, and the exact Faa di Bruno partition sum
//! (integer coefficients, feasible through degree 20).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::math;

/// Highest degree served by [`bell_poly_partition`]; the partition count and
/// the u128 factorial arithmetic both stay exact through here.
pub const PARTITION_MAX_DEGREE: usize = 20;

/// Hard cap on Dobinski series length before reporting non-convergence.
pub const DOBINSKI_TERM_CAP: usize = 10_000;

/// Degree cap for the standalone helpers; build a [`BellPolyEngine`] with an
/// explicit budget to go higher.
pub const FREE_FN_MAX_DEGREE: usize = 20_000;

/// Largest argument exp() maps to a finite f64, rounded down a little.
pub const MAX_EXP_ARG: f64 = 709.0;

// Pascal rows stay finite in f64 through C(1024, 512) ~ 1.4e306.
const PASCAL_ROWS: usize = 1025;

fn check_x(x: f64) -> Result<()> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "Bell polynomial argument must be a positive finite real, got {x}"
        )));
    }
    Ok(())
}

/// Cached evaluator for B_n(x) up to a fixed degree.
///
/// Construction precomputes the binomial table (Pascal's rule, so each row
/// satisfies C(n,k) = C(n-1,k-1) + C(n-1,k) exactly) and, via
/// [`BellPolyEngine::with_points`] or [`BellPolyEngine::prepare`], the log
/// Bell values for chosen arguments. Prepared values are keyed by the exact
/// bit pattern of x, no epsilon bucketing. After preparation the engine is
/// read-only and safe to share across threads.
#[derive(Debug, Clone)]
pub struct BellPolyEngine {
    max_degree: usize,
    binomials: Vec<Vec<f64>>,
    values: HashMap<u64, Vec<f64>>,
}

impl BellPolyEngine {
    /// Engine with combinatorial tables only; degree requests above
    /// `max_degree` are rejected.
    pub fn new(max_degree: usize) -> Self {
        let rows = max_degree.min(PASCAL_ROWS - 1) + 1;
        let mut binomials = Vec::with_capacity(rows);
        binomials.push(vec![1.0]);
        for n in 1..rows {
            let prev = &binomials[n - 1];
            let mut row = vec![1.0; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            binomials.push(row);
        }
        BellPolyEngine {
            max_degree,
            binomials,
            values: HashMap::new(),
        }
    }

    /// Engine with log Bell values precomputed for each of `points`.
    pub fn with_points(max_degree: usize, points: &[f64]) -> Result<Self> {
        let mut engine = Self::new(max_degree);
        for &x in points {
            engine.prepare(x)?;
        }
        Ok(engine)
    }

    /// Precompute ln B_0(x)..ln B_max_degree(x); call before sharing the
    /// engine, evaluation itself never mutates.
    pub fn prepare(&mut self, x: f64) -> Result<()> {
        check_x(x)?;
        if !self.values.contains_key(&x.to_bits()) {
            let prefix = self.compute_prefix(self.max_degree, x);
            self.values.insert(x.to_bits(), prefix);
        }
        Ok(())
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// ln B_n(x). Exactly 0.0 for n = 0.
    pub fn log_bell(&self, n: usize, x: f64) -> Result<f64> {
        self.check_degree(n)?;
        check_x(x)?;
        if let Some(prefix) = self.values.get(&x.to_bits()) {
            return Ok(prefix[n]);
        }
        Ok(self.compute_prefix(n, x)[n])
    }

    /// B_n(x) in linear scale; may overflow to +inf for degrees the log form
    /// still handles.
    pub fn bell(&self, n: usize, x: f64) -> Result<f64> {
        Ok(self.log_bell(n, x)?.exp())
    }

    /// ln B_0(x)..ln B_n_max(x) as one vector; the recurrence produces the
    /// whole prefix anyway, so batch consumers should use this.
    pub fn log_bell_prefix(&self, n_max: usize, x: f64) -> Result<Vec<f64>> {
        self.check_degree(n_max)?;
        check_x(x)?;
        if let Some(prefix) = self.values.get(&x.to_bits()) {
            return Ok(prefix[..=n_max].to_vec());
        }
        Ok(self.compute_prefix(n_max, x))
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.max_degree {
            return Err(Error::DegreeExceeded {
                requested: n,
                max: self.max_degree,
            });
        }
        Ok(())
    }

    fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        if n < self.binomials.len() {
            self.binomials[n][k].ln()
        } else {
            math::ln_binomial(n as u64, k as u64)
        }
    }

    fn compute_prefix(&self, n_max: usize, x: f64) -> Vec<f64> {
        let ln_x = x.ln();
        let mut ln_b = vec![f64::NEG_INFINITY; n_max + 1];
        ln_b[0] = 0.0;
        let mut terms = Vec::with_capacity(n_max.max(1));
        for n in 0..n_max {
            terms.clear();
            terms.extend((0..=n).map(|k| self.ln_binomial(n, k) + ln_b[k]));
            ln_b[n + 1] = ln_x + math::log_sum_exp(&terms);
        }
        ln_b
    }

    #[cfg(test)]
    fn binomial_rows(&self) -> &[Vec<f64>] {
        &self.binomials
    }
}

/// B_n(x) by the log-space Touchard recurrence (standalone form).
pub fn bell_poly(n: usize, x: f64) -> Result<f64> {
    Ok(log_bell_poly(n, x)?.exp())
}

/// ln B_n(x) by the log-space Touchard recurrence (standalone form).
pub fn log_bell_poly(n: usize, x: f64) -> Result<f64> {
    if n > FREE_FN_MAX_DEGREE {
        return Err(Error::DegreeExceeded {
            requested: n,
            max: FREE_FN_MAX_DEGREE,
        });
    }
    BellPolyEngine::new(n).log_bell(n, x)
}

/// ln B_0(x)..ln B_n_max(x) by the log-space recurrence (standalone form).
pub fn log_bell_prefix(n_max: usize, x: f64) -> Result<Vec<f64>> {
    if n_max > FREE_FN_MAX_DEGREE {
        return Err(Error::DegreeExceeded {
            requested: n_max,
            max: FREE_FN_MAX_DEGREE,
        });
    }
    BellPolyEngine::new(n_max).log_bell_prefix(n_max, x)
}

/// B_n(x) by the truncated Dobinski series e^{-x} sum_{k>=0} k^n x^k / k!.
///
/// Terms accumulate in log scale; the series is cut once the term index has
/// passed the mode of the summand and the current term falls below `tol`
/// times the running sum. Independent of the recurrence route, which makes it
/// the natural cross-check.
pub fn bell_poly_dobinski(n: usize, x: f64, tol: f64) -> Result<f64> {
    check_x(x)?;
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::Domain(format!(
            "Dobinski tolerance must lie in (0, 1e-4], got {tol}"
        )));
    }
    let ln_x = x.ln();
    let ln_tol = tol.ln();
    // k = 0 contributes 0^n: one for n = 0, nothing otherwise.
    let mut ln_sum = if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    // Terms k^n x^k / k! grow until roughly max(n, e*x); only stop after that.
    let mode = (n as f64).max(std::f64::consts::E * x);
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let ln_term = n as f64 * kf.ln() + kf * ln_x - math::ln_factorial(k as u64);
        ln_sum = math::log_add_exp(ln_sum, ln_term);
        if kf > mode && ln_term - ln_sum < ln_tol {
            break;
        }
        k += 1;
        if k > DOBINSKI_TERM_CAP {
            return Err(Error::NonConvergence {
                max_terms: DOBINSKI_TERM_CAP,
            });
        }
    }
    Ok((ln_sum - x).exp())
}

/// B_n(x) by the Faa di Bruno partition sum with exact integer coefficients.
///
/// Every partition of n with r_j parts of size j contributes
/// n! / (prod_j r_j! (j!)^{r_j}) * x^{sum_j r_j}; the coefficient counts set
/// partitions of that shape and is computed exactly in u128. Limited to
/// degree 20 where both the enumeration and the arithmetic stay cheap and
/// exact, which is what makes this the ground-truth route.
pub fn bell_poly_partition(n: usize, x: f64) -> Result<f64> {
    check_x(x)?;
    if n > PARTITION_MAX_DEGREE {
        return Err(Error::DegreeExceeded {
            requested: n,
            max: PARTITION_MAX_DEGREE,
        });
    }
    let n_fact = factorial_u128(n);
    let mut total = 0.0f64;
    math::for_each_partition(n, |parts| {
        let mut denom: u128 = 1;
        let mut blocks: u32 = 0;
        for &(size, mult) in parts {
            let size_fact = factorial_u128(size);
            for _ in 0..mult {
                denom *= size_fact;
            }
            denom *= factorial_u128(mult as usize);
            blocks += mult;
        }
        // Exact division: the quotient counts set partitions of this shape.
        let coeff = n_fact / denom;
        total += coeff as f64 * x.powi(blocks as i32);
    });
    Ok(total)
}

/// Exponential generating function value phi_x(theta) = e^{x (e^theta - 1)}.
pub fn bell_generating_fn(x: f64, theta: f64) -> Result<f64> {
    check_x(x)?;
    if !theta.is_finite() {
        return Err(Error::Domain(format!(
            "generating function scale point must be finite, got {theta}"
        )));
    }
    let exponent = x * theta.exp_m1();
    if exponent > MAX_EXP_ARG {
        return Err(Error::Overflow(format!(
            "generating function exponent {exponent}"
        )));
    }
    Ok(exponent.exp())
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}
