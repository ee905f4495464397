//! Time-varying base rates alpha(t): mean-jump integrals and path simulation
//! by thinning. The count of a path with instantaneous rate alpha(t) is
//! Bell-Touchard with rate m(t) = integral of alpha over [0, t].

use std::fmt;

use rand::Rng;

use crate::distributions::{draw_poisson, BTParams, ZTPParams, ztp_sample};
use crate::error::{Error, Result};
use crate::math;
use super::{EventPath, EventRecord};

/// Absolute tolerance for quadrature of rate functions without a declared
/// closed-form integral.
pub const MEAN_JUMP_QUADRATURE_TOL: f64 = 1e-9;

type DynRate = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonnegative instantaneous rate with a declared majorant and, when one is
/// known, a closed-form running integral m(t).
pub struct RateFunction {
    eval: DynRate,
    upper_bound: f64,
    cumulative: Option<DynRate>,
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateFunction")
            .field("upper_bound", &self.upper_bound)
            .field("cumulative", &self.cumulative.is_some())
            .finish()
    }
}

impl RateFunction {
    /// Wrap an arbitrary rate. The majorant must dominate the rate on every
    /// window the function is simulated over; violations surface as
    /// [`Error::RateBound`] at proposal epochs.
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        upper_bound: f64,
    ) -> Result<Self> {
        if !upper_bound.is_finite() || upper_bound <= 0.0 {
            return Err(Error::Domain(format!(
                "rate majorant must be a positive finite real, got {upper_bound}"
            )));
        }
        Ok(RateFunction {
            eval: Box::new(eval),
            upper_bound,
            cumulative: None,
        })
    }

    /// Attach a closed-form running integral; used in place of quadrature.
    pub fn with_cumulative(
        mut self,
        cumulative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.cumulative = Some(Box::new(cumulative));
        self
    }

    /// alpha(t) = c, reducing the process to its homogeneous form.
    pub fn constant(c: f64) -> Result<Self> {
        Ok(Self::new(move |_| c, c)?.with_cumulative(move |t| c * t))
    }

    /// alpha(t) = a + b t, majorized on [0, window].
    pub fn linear(a: f64, b: f64, window: f64) -> Result<Self> {
        for (name, v, low) in [("intercept", a, 0.0), ("slope", b, 0.0), ("window", window, f64::MIN_POSITIVE)] {
            if !v.is_finite() || v < low {
                return Err(Error::Domain(format!("linear rate {name} must be finite and nonnegative, got {v}")));
            }
        }
        if a + b == 0.0 {
            return Err(Error::Domain("linear rate vanishes identically".into()));
        }
        Ok(Self::new(move |t| a + b * t, a + b * window)?
            .with_cumulative(move |t| a * t + 0.5 * b * t * t))
    }

    /// alpha(t) = a + b sin^2(omega t).
    pub fn sinusoidal_squared(a: f64, b: f64, omega: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::Domain(format!(
                "sinusoidal rate floor must be finite and nonnegative, got {a}"
            )));
        }
        for (name, v) in [("amplitude", b), ("frequency", omega)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Domain(format!(
                    "sinusoidal rate {name} must be a positive finite real, got {v}"
                )));
            }
        }
        // sin^2 integrates to t/2 - sin(2 omega t) / (4 omega).
        Ok(Self::new(move |t| a + b * (omega * t).sin().powi(2), a + b)?
            .with_cumulative(move |t| a * t + b * (0.5 * t - (2.0 * omega * t).sin() / (4.0 * omega))))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper_bound
    }

    pub fn has_cumulative(&self) -> bool {
        self.cumulative.is_some()
    }
}

/// m(t): the integrated rate, via the declared closed form when present and
/// adaptive quadrature at tolerance [`MEAN_JUMP_QUADRATURE_TOL`] otherwise.
pub fn mean_jump_fn(rate: &RateFunction, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    match &rate.cumulative {
        Some(m) => Ok(m(t)),
        None => math::adaptive_simpson(|s| rate.eval(s), 0.0, t, MEAN_JUMP_QUADRATURE_TOL),
    }
}

/// Simulate a path with instantaneous rate alpha(t) by thinning a homogeneous
/// proposal stream at the majorant: proposals arrive at rate
/// upper_bound (e^theta - 1), each is kept with probability alpha(t) / bound,
/// and kept epochs draw a zero-truncated Poisson batch.
///
/// The recorded path parameters are (m(horizon) / horizon, theta): the
/// homogeneous law whose terminal count matches this path's.
pub fn simulate_nhbt<R: Rng + ?Sized>(
    rate: &RateFunction,
    theta: f64,
    horizon: f64,
    rng: &mut R,
) -> Result<EventPath> {
    super::check_horizon(horizon)?;
    let batch = ZTPParams::new(theta)?;
    let bound = rate.upper_bound;
    let proposal = rand_distr::Exp::new(bound * theta.exp_m1())
        .map_err(|e| Error::Domain(format!("proposal rate: {e}")))?;
    let mut events = Vec::new();
    let mut t = 0.0;
    loop {
        t += rng.sample(proposal);
        if t > horizon {
            break;
        }
        let a = rate.eval(t);
        if !a.is_finite() || a < 0.0 {
            return Err(Error::Domain(format!("rate evaluates to {a} at t = {t}")));
        }
        if a > bound {
            return Err(Error::RateBound {
                t,
                value: a,
                bound,
            });
        }
        if rng.random::<f64>() * bound < a {
            events.push(EventRecord {
                time: t,
                jump: ztp_sample(batch, rng),
            });
        }
    }
    let mean_rate = mean_jump_fn(rate, horizon)? / horizon;
    EventPath::new(BTParams::new(mean_rate, theta)?, horizon, events, 0)
}

/// One draw of the composed count N1(N2(t)) when the outer process is a
/// nonhomogeneous Poisson process with the given rate: Poisson(m(t)) outer
/// epochs, then Poisson(nu x outer).
pub fn iterated_nhpp_sample<R: Rng + ?Sized>(
    nu: f64,
    rate: &RateFunction,
    t: f64,
    rng: &mut R,
) -> Result<u64> {
    if !nu.is_finite() || nu <= 0.0 {
        return Err(Error::Domain(format!(
            "nu must be a positive finite real, got {nu}"
        )));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!(
            "time must be a positive finite real, got {t}"
        )));
    }
    let m = mean_jump_fn(rate, t)?;
    if m == 0.0 {
        return Ok(0);
    }
    let outer = draw_poisson(m, rng)?;
    if outer == 0 {
        return Ok(0);
    }
    draw_poisson(nu * outer as f64, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constructor_validation() {
        assert!(RateFunction::new(|_| 1.0, 0.0).is_err());
        assert!(RateFunction::new(|_| 1.0, f64::INFINITY).is_err());
        assert!(RateFunction::constant(-1.0).is_err());
        assert!(RateFunction::linear(-1.0, 1.0, 1.0).is_err());
        assert!(RateFunction::linear(0.0, 0.0, 1.0).is_err());
        assert!(RateFunction::linear(1.0, 1.0, 0.0).is_err());
        assert!(RateFunction::sinusoidal_squared(1.0, 0.0, 1.0).is_err());
        assert!(RateFunction::sinusoidal_squared(-0.1, 1.0, 1.0).is_err());
        assert!(RateFunction::sinusoidal_squared(1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn closed_form_integrals() {
        let c = RateFunction::constant(2.5).unwrap();
        assert_relative_eq!(mean_jump_fn(&c, 3.0).unwrap(), 7.5, max_relative = 1e-15);
        assert_eq!(mean_jump_fn(&c, 0.0).unwrap(), 0.0);

        let lin = RateFunction::linear(1.0, 2.0, 4.0).unwrap();
        assert_relative_eq!(
            mean_jump_fn(&lin, 3.0).unwrap(),
            3.0 + 9.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(lin.upper_bound(), 9.0);

        let s = RateFunction::sinusoidal_squared(1.0, 1.0, 1.0).unwrap();
        // integral of 1 + sin^2 over [0, 2] = 3 - sin(4)/4.
        assert_relative_eq!(
            mean_jump_fn(&s, 2.0).unwrap(),
            3.0 - (4.0f64).sin() / 4.0,
            max_relative = 1e-14
        );
        assert!(mean_jump_fn(&s, -1.0).is_err());
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        // Same sinusoidal rate with the cumulative withheld, forcing the
        // quadrature route.
        let raw = RateFunction::new(|t: f64| 1.0 + t.sin().powi(2), 2.0).unwrap();
        let closed = RateFunction::sinusoidal_squared(1.0, 1.0, 1.0).unwrap();
        assert!(!raw.has_cumulative());
        for &t in &[0.5f64, 1.0, 2.0, 5.0] {
            assert_relative_eq!(
                mean_jump_fn(&raw, t).unwrap(),
                mean_jump_fn(&closed, t).unwrap(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn thinning_rejects_majorant_violations() {
        // Claimed bound 1.0, true rate 2.0: the first proposal epoch trips
        // the check (horizon long enough that one arrives).
        let lying = RateFunction::new(|_| 2.0, 1.0).unwrap();
        let mut rng = crate::rng::master_rng(21);
        let err = simulate_nhbt(&lying, 1.0, 1000.0, &mut rng).unwrap_err();
        assert!(matches!(err, Error::RateBound { .. }));
    }

    #[test]
    fn thinned_path_records_the_average_rate() {
        let s = RateFunction::sinusoidal_squared(1.0, 1.0, 1.0).unwrap();
        let mut rng = crate::rng::master_rng(22);
        let path = simulate_nhbt(&s, 0.5, 2.0, &mut rng).unwrap();
        let expect = (3.0 - (4.0f64).sin() / 4.0) / 2.0;
        assert_relative_eq!(path.params().alpha(), expect, max_relative = 1e-12);
        assert_relative_eq!(path.params().theta(), 0.5, max_relative = 1e-15);
        assert!(path.events().windows(2).all(|w| w[0].time < w[1].time));
        assert!(simulate_nhbt(&s, 0.5, -1.0, &mut rng).is_err());
    }

    #[test]
    fn iterated_nhpp_argument_checks() {
        let c = RateFunction::constant(1.0).unwrap();
        let mut rng = crate::rng::master_rng(23);
        assert!(iterated_nhpp_sample(0.0, &c, 1.0, &mut rng).is_err());
        assert!(iterated_nhpp_sample(1.0, &c, 0.0, &mut rng).is_err());
        assert!(iterated_nhpp_sample(1.0, &c, 1.0, &mut rng).is_ok());
    }
}
