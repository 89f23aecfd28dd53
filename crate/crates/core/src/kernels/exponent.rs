use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// Shared scalar map `t -> value`.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Number of grid points used to spot-check declared bounds on `[0, b]`.
pub const VALIDATION_POINTS: usize = 1024;

/// Variable exponent `α(t)` of an Abel kernel `t^{-α(t)}`, with its derivative
/// and the declared constants (range `[alpha_lo, alpha_hi]` and Lipschitz
/// bound `L >= |α'|`).
#[derive(Clone)]
pub struct ExponentFunction {
    eval: ScalarFn,
    deriv: ScalarFn,
    lipschitz: f64,
    alpha_lo: f64,
    alpha_hi: f64,
}

impl fmt::Debug for ExponentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentFunction")
            .field("alpha0", &self.alpha0())
            .field("lipschitz", &self.lipschitz)
            .field("alpha_lo", &self.alpha_lo)
            .field("alpha_hi", &self.alpha_hi)
            .finish_non_exhaustive()
    }
}

impl ExponentFunction {
    pub fn new<E, D>(
        eval: E,
        deriv: D,
        lipschitz: f64,
        alpha_lo: f64,
        alpha_hi: f64,
    ) -> Result<Self>
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !lipschitz.is_finite() || lipschitz < 0.0 {
            return Err(domain("lipschitz", lipschitz, "L must be finite and >= 0"));
        }
        if !(alpha_lo > 0.0 && alpha_lo < 1.0) {
            return Err(domain("alpha_lo", alpha_lo, "0 < alpha_lo < 1"));
        }
        if !(alpha_hi > 0.0 && alpha_hi < 1.0) {
            return Err(domain("alpha_hi", alpha_hi, "0 < alpha_hi < 1"));
        }
        if alpha_lo > alpha_hi {
            return Err(domain("alpha_lo", alpha_lo, "alpha_lo <= alpha_hi"));
        }
        Ok(Self {
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            lipschitz,
            alpha_lo,
            alpha_hi,
        })
    }

    pub fn constant(alpha: f64) -> Result<Self> {
        Self::new(move |_| alpha, |_| 0.0, 0.0, alpha, alpha)
    }

    /// `α(t) = a0 + a1·t` on `[0, b]`, with range and Lipschitz constant taken
    /// from the endpoints.
    pub fn affine(a0: f64, a1: f64, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(domain("b", b, "horizon must be finite and > 0"));
        }
        if !a0.is_finite() || !a1.is_finite() {
            return Err(domain("a0", a0, "coefficients must be finite"));
        }
        let end = a0 + a1 * b;
        Self::new(
            move |t| a0 + a1 * t,
            move |_| a1,
            a1.abs(),
            a0.min(end),
            a0.max(end),
        )
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        (self.deriv)(t)
    }

    pub fn alpha0(&self) -> f64 {
        self.value(0.0)
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn alpha_lo(&self) -> f64 {
        self.alpha_lo
    }

    pub fn alpha_hi(&self) -> f64 {
        self.alpha_hi
    }

    fn grid(b: f64) -> impl Iterator<Item = f64> {
        let last = (VALIDATION_POINTS - 1) as f64;
        (0..VALIDATION_POINTS).map(move |j| b * j as f64 / last)
    }

    /// Spot-checks the declared range and Lipschitz bound on a uniform grid of
    /// [`VALIDATION_POINTS`] points spanning `[0, b]`.
    pub fn validate(&self, b: f64) -> Result<()> {
        if !(b.is_finite() && b > 0.0) {
            return Err(domain("b", b, "horizon must be finite and > 0"));
        }
        let slack = 1e-12;
        for t in Self::grid(b) {
            let a = self.value(t);
            if !a.is_finite() || a < self.alpha_lo - slack || a > self.alpha_hi + slack {
                return Err(Error::ExponentBounds(format!(
                    "alpha({t}) = {a} outside [{}, {}]",
                    self.alpha_lo, self.alpha_hi
                )));
            }
            if a <= 0.0 || a >= 1.0 {
                return Err(Error::ExponentBounds(format!("alpha({t}) = {a} outside (0, 1)")));
            }
            let d = self.derivative(t);
            if !d.is_finite() || d.abs() > self.lipschitz * (1.0 + slack) + 1e-15 {
                return Err(Error::ExponentBounds(format!(
                    "|alpha'({t})| = {} exceeds L = {}",
                    d.abs(),
                    self.lipschitz
                )));
            }
        }
        Ok(())
    }

    /// True when every grid sample equals `α(0)` and the derivative vanishes.
    pub fn is_constant_on(&self, b: f64) -> bool {
        let a0 = self.alpha0();
        Self::grid(b).all(|t| self.value(t) == a0 && self.derivative(t) == 0.0)
    }
}
