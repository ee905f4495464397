//! Log-scale arithmetic, factorial tables, integer partitions, and adaptive
//! quadrature shared across the crate.

use std::sync::LazyLock;

use crate::error::{Error, Result};

const LN_FACT_TABLE_LEN: usize = 1025;

// 0..=34 are exact in u128; the rest of the table comes from ln_gamma.
static LN_FACT: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let mut table = vec![0.0; LN_FACT_TABLE_LEN];
    let mut exact: u128 = 1;
    for (n, slot) in table.iter_mut().enumerate().skip(1) {
        if n <= 34 {
            exact *= n as u128;
            *slot = (exact as f64).ln();
        } else {
            *slot = statrs::function::gamma::ln_gamma(n as f64 + 1.0);
        }
    }
    table
});

/// Natural log of n!.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE_LEN {
        LN_FACT[n as usize]
    } else {
        statrs::function::gamma::ln_gamma(n as f64 + 1.0)
    }
}

/// Natural log of the binomial coefficient C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_binomial: k = {k} > n = {n}");
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// ln(a + b) given ln a and ln b. Neutral element is -inf.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// ln of the sum of exponentials, shifted by the maximum for stability.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || !m.is_finite() {
        return m;
    }
    let sum: f64 = values.iter().map(|v| (v - m).exp()).sum();
    m + sum.ln()
}

/// ln(e^x - 1) for x > 0 without overflow or cancellation.
pub fn ln_expm1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 33.0 {
        x.exp_m1().ln()
    } else {
        // e^x - 1 = e^x (1 - e^-x); the correction underflows past ~745.
        x + (-(-x).exp()).ln_1p()
    }
}

/// Visit every partition of `n` as a list of (part size, multiplicity) pairs
/// with sizes strictly decreasing. `n = 0` yields the empty partition.
pub fn for_each_partition<F: FnMut(&[(usize, u32)])>(n: usize, mut visit: F) {
    let mut acc: Vec<(usize, u32)> = Vec::new();
    descend(n, n, &mut acc, &mut visit);
}

fn descend<F: FnMut(&[(usize, u32)])>(
    largest: usize,
    remaining: usize,
    acc: &mut Vec<(usize, u32)>,
    visit: &mut F,
) {
    if remaining == 0 {
        visit(acc);
        return;
    }
    if largest == 0 {
        return;
    }
    for count in (0..=remaining / largest).rev() {
        if count > 0 {
            acc.push((largest, count as u32));
        }
        descend(largest - 1, remaining - count * largest, acc, visit);
        if count > 0 {
            acc.pop();
        }
    }
}

const SIMPSON_MAX_DEPTH: u32 = 60;

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance
/// `abs_tol`. Fails if the local error cannot be driven below the budget or
/// the integrand produces non-finite values.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::Domain(format!("bad interval [{a}, {b}]")));
    }
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance {abs_tol} must be > 0")));
    }
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    step(&f, a, b, fa, fm, fb, whole, abs_tol, SIMPSON_MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    if !whole.is_finite() {
        return Err(Error::Integration(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Integration(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Integration(format!(
            "tolerance not reached on [{a}, {b}] after {SIMPSON_MAX_DEPTH} refinements"
        )));
    }
    let half = 0.5 * tol;
    Ok(step(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + step(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}
