//! Kernel representations: classical and variable-exponent Abel kernels,
//! power kernels, tabulated kernels, and Sonine pairs built from them.
//!
//! Every kernel is stored in factored form `k(t) = t^{-λ}·s(t)` where `λ` is
//! the leading exponent at `t = 0` and `s` is bounded with a finite limit at
//! the origin. The quadrature layer integrates `t^{-λ}` exactly and
//! interpolates `s`.

mod exponent;
mod gamma;

pub use exponent::{ExponentFunction, ScalarFn, VALIDATION_POINTS};
pub use gamma::{beta, gamma, kappa, GAMMA_MAX_ARG};

pub(crate) use gamma::{beta_pos, kappa_unchecked};

use crate::error::{domain, Error, Result};

/// Relative slack accepted when a kernel is evaluated at the horizon.
const HORIZON_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    ClassicalAbel,
    VariableExponentAbel,
    Power,
    Tabulated,
}

impl KernelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::ClassicalAbel => "classical_abel",
            KernelKind::VariableExponentAbel => "variable_exponent_abel",
            KernelKind::Power => "power",
            KernelKind::Tabulated => "tabulated",
        }
    }
}

#[derive(Debug, Clone)]
enum Form {
    Power { coeff: f64, exponent: f64 },
    VariableExponent { af: ExponentFunction },
    Tabulated { times: Vec<f64>, smooth: Vec<f64>, exponent: f64 },
}

/// A weakly singular kernel on `(0, b]`.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    form: Form,
    kind: KernelKind,
    sing_exponent: f64,
    horizon: f64,
}

fn check_horizon(b: f64) -> Result<()> {
    if b.is_finite() && b > 0.0 {
        Ok(())
    } else {
        Err(domain("b", b, "horizon must be finite and > 0"))
    }
}

fn check_exponent(what: &'static str, a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(domain(what, a, "exponent must lie in (0, 1)"))
    }
}

impl KernelSpec {
    /// `k(t) = t^{-alpha}`.
    pub fn classical_abel(alpha: f64, b: f64) -> Result<Self> {
        check_exponent("alpha", alpha)?;
        check_horizon(b)?;
        Ok(Self {
            form: Form::Power {
                coeff: 1.0,
                exponent: alpha,
            },
            kind: KernelKind::ClassicalAbel,
            sing_exponent: alpha,
            horizon: b,
        })
    }

    /// `k(t) = coeff·t^{-exponent}`.
    pub fn power(coeff: f64, exponent: f64, b: f64) -> Result<Self> {
        check_exponent("exponent", exponent)?;
        check_horizon(b)?;
        if !coeff.is_finite() || coeff == 0.0 {
            return Err(domain("coeff", coeff, "coefficient must be finite and nonzero"));
        }
        Ok(Self {
            form: Form::Power { coeff, exponent },
            kind: KernelKind::Power,
            sing_exponent: exponent,
            horizon: b,
        })
    }

    /// `k(t) = t^{-α(t)}`; the declared singularity exponent is `alpha_hi`.
    pub fn variable_exponent(af: ExponentFunction, b: f64) -> Result<Self> {
        check_horizon(b)?;
        af.validate(b)?;
        let sing_exponent = af.alpha_hi();
        Ok(Self {
            form: Form::VariableExponent { af },
            kind: KernelKind::VariableExponentAbel,
            sing_exponent,
            horizon: b,
        })
    }

    /// Kernel known only through samples `values[j] = k(times[j])`, assumed to
    /// behave like `t^{-sing_exponent}` near the origin. Between samples the
    /// regular part `t^{sing_exponent}·k(t)` is interpolated linearly; below the
    /// first sample it is held constant.
    pub fn tabulated(times: &[f64], values: &[f64], sing_exponent: f64, b: f64) -> Result<Self> {
        check_exponent("sing_exponent", sing_exponent)?;
        check_horizon(b)?;
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::MeshMismatch(format!(
                "tabulated kernel needs >= 2 matching samples, got {} times and {} values",
                times.len(),
                values.len()
            )));
        }
        if times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("times", times[0], "sample times must be positive and increasing"));
        }
        let last = times[times.len() - 1];
        if (last - b).abs() > HORIZON_SLACK * b {
            return Err(domain("times", last, "last sample time must equal the horizon"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(domain("values", *v, "samples must be finite"));
        }
        let smooth = times
            .iter()
            .zip(values)
            .map(|(t, v)| t.powf(sing_exponent) * v)
            .collect();
        Ok(Self {
            form: Form::Tabulated {
                times: times.to_vec(),
                smooth,
                exponent: sing_exponent,
            },
            kind: KernelKind::Tabulated,
            sing_exponent,
            horizon: b,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Declared singularity exponent: `t^{sing_exponent}·k(t)` stays bounded as
    /// `t -> 0+`. Used for mesh grading.
    pub fn sing_exponent(&self) -> f64 {
        self.sing_exponent
    }

    /// Exact exponent of the factored form `t^{-λ}·s(t)` with `s(0+)` finite
    /// and nonzero. Equals `sing_exponent` except for variable-exponent
    /// kernels, where it is `α(0)`.
    pub fn leading_exponent(&self) -> f64 {
        match &self.form {
            Form::Power { exponent, .. } => *exponent,
            Form::VariableExponent { af } => af.alpha0(),
            Form::Tabulated { exponent, .. } => *exponent,
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `(coeff, exponent)` for power-law kernels.
    pub fn power_parts(&self) -> Option<(f64, f64)> {
        match &self.form {
            Form::Power { coeff, exponent } => Some((*coeff, *exponent)),
            _ => None,
        }
    }

    /// The exponent function behind an Abel kernel; a constant one for the
    /// classical kernel.
    pub fn exponent_function(&self) -> Option<ExponentFunction> {
        match (&self.form, self.kind) {
            (Form::VariableExponent { af }, _) => Some(af.clone()),
            (Form::Power { exponent, .. }, KernelKind::ClassicalAbel) => {
                ExponentFunction::constant(*exponent).ok()
            }
            _ => None,
        }
    }

    /// Evaluates the kernel on `(0, b]`. The origin is a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(domain("t", t, "kernels are evaluated on (0, b]"));
        }
        if t > self.horizon * (1.0 + HORIZON_SLACK) {
            return Err(domain("t", t, "beyond the kernel horizon"));
        }
        Ok(self.value(t))
    }

    #[inline]
    pub(crate) fn value(&self, t: f64) -> f64 {
        match &self.form {
            Form::Power { coeff, exponent } => coeff * t.powf(-exponent),
            Form::VariableExponent { af } => (-af.value(t) * t.ln()).exp(),
            Form::Tabulated { exponent, .. } => self.smooth(t) * t.powf(-exponent),
        }
    }

    /// Regular part `s(x) = x^{λ}·k(x)`, including its limit at `x = 0`.
    #[inline]
    pub(crate) fn smooth(&self, x: f64) -> f64 {
        match &self.form {
            Form::Power { coeff, .. } => *coeff,
            Form::VariableExponent { af } => {
                if x <= 0.0 {
                    1.0
                } else {
                    ((af.alpha0() - af.value(x)) * x.ln()).exp()
                }
            }
            Form::Tabulated { times, smooth, .. } => {
                if x <= times[0] {
                    return smooth[0];
                }
                let j = times.partition_point(|&t| t < x).min(times.len() - 1);
                let (t0, t1) = (times[j - 1], times[j]);
                let w = ((x - t0) / (t1 - t0)).clamp(0.0, 1.0);
                smooth[j - 1] + w * (smooth[j] - smooth[j - 1])
            }
        }
    }
}

/// A kernel `k` together with a candidate associate `K`.
#[derive(Debug, Clone)]
pub struct SoninePair {
    k: KernelSpec,
    associate: KernelSpec,
    kappa: Option<f64>,
    is_classical: bool,
    exponent: Option<ExponentFunction>,
}

/// Classical Abel pair `k = t^{-α}`, `K = t^{α-1}/κ(α)` with `K∗k ≡ 1`.
pub fn make_classical_abel_pair(alpha: f64, b: f64) -> Result<SoninePair> {
    check_exponent("alpha", alpha)?;
    check_horizon(b)?;
    let kap = kappa(alpha)?;
    let k = KernelSpec::classical_abel(alpha, b)?;
    let associate = KernelSpec::power(1.0 / kap, 1.0 - alpha, b)?;
    Ok(SoninePair {
        k,
        associate,
        kappa: Some(kap),
        is_classical: true,
        exponent: Some(ExponentFunction::constant(alpha)?),
    })
}

/// Variable-exponent pair `k = t^{-α(t)}`, `K = t^{α(0)-1}/κ(α(0))`.
pub fn make_variable_exponent_pair(af: ExponentFunction, b: f64) -> Result<SoninePair> {
    check_horizon(b)?;
    af.validate(b)?;
    let alpha0 = af.alpha0();
    let kap = kappa(alpha0)?;
    let is_classical = af.is_constant_on(b);
    let k = KernelSpec::variable_exponent(af.clone(), b)?;
    let associate = KernelSpec::power(1.0 / kap, 1.0 - alpha0, b)?;
    Ok(SoninePair {
        k,
        associate,
        kappa: Some(kap),
        is_classical,
        exponent: Some(af),
    })
}

impl SoninePair {
    /// Pairs two arbitrary kernels on the same horizon.
    ///
    /// When `k` is an Abel kernel and `associate` is its `t^{α(0)-1}/κ(α(0))`
    /// associate, the exponent function is attached so that the substituted
    /// form of `K∗k` and its analytic derivative become available.
    pub fn new(k: KernelSpec, associate: KernelSpec) -> Result<Self> {
        if k.horizon() != associate.horizon() {
            return Err(Error::MeshMismatch(format!(
                "kernel horizons differ: {} vs {}",
                k.horizon(),
                associate.horizon()
            )));
        }
        let b = k.horizon();
        let mut pair = SoninePair {
            k,
            associate,
            kappa: None,
            is_classical: false,
            exponent: None,
        };
        if let (Some(af), Some((coeff, exponent))) =
            (pair.k.exponent_function(), pair.associate.power_parts())
        {
            let alpha0 = af.alpha0();
            let kap = kappa_unchecked(alpha0);
            let matches_exponent = (exponent - (1.0 - alpha0)).abs() <= 1e-12;
            let matches_coeff = ((coeff * kap) - 1.0).abs() <= 1e-12;
            if matches_exponent && matches_coeff {
                pair.is_classical = af.is_constant_on(b);
                pair.kappa = Some(kap);
                pair.exponent = Some(af);
            }
        }
        Ok(pair)
    }

    pub fn k(&self) -> &KernelSpec {
        &self.k
    }

    pub fn associate(&self) -> &KernelSpec {
        &self.associate
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    /// True when `K∗k ≡ 1` holds analytically.
    pub fn is_classical(&self) -> bool {
        self.is_classical
    }

    pub fn exponent_function(&self) -> Option<&ExponentFunction> {
        self.exponent.as_ref()
    }

    pub fn horizon(&self) -> f64 {
        self.k.horizon()
    }

    /// Singularity exponent of `k` at the origin, `α(0)` for Abel kernels.
    pub fn alpha0(&self) -> f64 {
        self.k.leading_exponent()
    }

    /// Grading exponent `2/(1 - max sing_exponent)`, capped at 4.
    pub fn default_grading(&self) -> f64 {
        let worst = self.k.sing_exponent().max(self.associate.sing_exponent());
        (2.0 / (1.0 - worst)).clamp(1.0, 4.0)
    }
}
