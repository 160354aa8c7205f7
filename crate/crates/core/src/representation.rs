//! Integral representations of operator monotone and operator convex
//! functions on `[0, ∞)`:
//!
//! ```text
//! monotone:  f(t) = f(0) + βt       + ∫ λt/(λ+t)  dμ(λ)
//! convex:    f(t) = f(0) + βt + γt² + ∫ λt²/(λ+t) dμ(λ)
//! ```
//!
//! The measure `μ` is a finite list of atoms plus an optional power-law
//! density. The density integral is evaluated in the variable `x = ln λ`,
//! where a power-law integrand decays exponentially at both ends and is
//! analytic in a strip of half-width π; composite Gauss–Legendre is then
//! accurate to near machine precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `λt/(λ+t)`
    Monotone,
    /// `λt²/(λ+t)`
    Convex,
}

impl KernelKind {
    pub fn kernel(self, lambda: f64, t: f64) -> f64 {
        match self {
            KernelKind::Monotone => lambda * t / (lambda + t),
            KernelKind::Convex => lambda * t * t / (lambda + t),
        }
    }
}

/// `coefficient · λ^exponent` on `[support_start, ∞)`, zero below.
///
/// The exponent is the declared decay: integrability against either kernel
/// needs `exponent < -1` at infinity and, when the support reaches 0,
/// `exponent > -2` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub coefficient: f64,
    pub exponent: f64,
    pub support_start: f64,
}

impl Density {
    pub fn at(&self, lambda: f64) -> f64 {
        if lambda < self.support_start {
            0.0
        } else {
            self.coefficient * lambda.powf(self.exponent)
        }
    }

    pub fn check_decay(&self) -> Result<()> {
        if !(self.coefficient >= 0.0) {
            return Err(Error::Representation(format!(
                "density coefficient must be >= 0, got {}",
                self.coefficient
            )));
        }
        if !(self.exponent < -1.0) {
            return Err(Error::Representation(format!(
                "density λ^{} is not integrable at infinity",
                self.exponent
            )));
        }
        if self.support_start <= 0.0 && !(self.exponent > -2.0) {
            return Err(Error::Representation(format!(
                "density λ^{} is not integrable at the origin",
                self.exponent
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralRepresentation {
    pub kind: KernelKind,
    pub f0: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `(λ, weight)` pairs.
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<Density>,
}

const PANEL_WIDTH: f64 = 2.0;
const PANEL_NODES: usize = 32;
/// Tails are cut where the integrand has decayed by `e^{-40}`.
const TAIL_EXPONENT: f64 = 40.0;

impl IntegralRepresentation {
    pub fn empty(kind: KernelKind) -> Self {
        Self {
            kind,
            f0: 0.0,
            beta: 0.0,
            gamma: 0.0,
            atoms: Vec::new(),
            density: None,
        }
    }

    pub fn atom(kind: KernelKind, lambda: f64, weight: f64) -> Self {
        Self {
            atoms: vec![(lambda, weight)],
            ..Self::empty(kind)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta < 0.0 || self.gamma < 0.0 {
            return Err(Error::Representation("beta and gamma must be >= 0".into()));
        }
        if self.kind == KernelKind::Monotone && self.gamma != 0.0 {
            return Err(Error::Representation("monotone form has no quadratic term".into()));
        }
        if let Some(&(l, w)) = self.atoms.iter().find(|(l, w)| !(*l > 0.0) || !(*w > 0.0)) {
            return Err(Error::Representation(format!(
                "atoms need positive location and weight, got ({l}, {w})"
            )));
        }
        if let Some(d) = &self.density {
            d.check_decay()?;
        }
        Ok(())
    }

    /// Evaluates the representation at `t ≥ 0`.
    pub fn reconstruct(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Parameter(format!("reconstruct needs t >= 0, got {t}")));
        }
        self.validate()?;
        let mut value = self.f0 + self.beta * t + self.gamma * t * t;
        value += self.atoms.iter().map(|&(l, w)| w * self.kind.kernel(l, t)).sum::<f64>();
        if let Some(d) = &self.density {
            if t > 0.0 {
                value += self.density_integral(d, t);
            }
        }
        Ok(value)
    }

    fn density_integral(&self, d: &Density, t: f64) -> f64 {
        let center = t.ln();
        let rate_zero = d.exponent + 2.0;
        let rate_inf = -(d.exponent + 1.0);
        let mut lo = center - TAIL_EXPONENT / rate_zero;
        if d.support_start > 0.0 {
            lo = d.support_start.ln();
        }
        let hi = center.max(lo) + TAIL_EXPONENT / rate_inf;
        if hi <= lo {
            return 0.0;
        }
        let panels = ((hi - lo) / PANEL_WIDTH).ceil().max(1.0) as usize;
        let gl = GaussLegendre::new(PANEL_NODES);
        let kind = self.kind;
        // Combined in log space: λ^exponent alone overflows deep in the lower tail.
        gl.integrate_composite(lo, hi, panels, |x| {
            let kernel = kind.kernel(x.exp(), t);
            d.coefficient * ((d.exponent + 1.0) * x + kernel.ln()).exp()
        })
    }
}

/// See [`IntegralRepresentation::reconstruct`].
pub fn reconstruct(rep: &IntegralRepresentation, t: f64) -> Result<f64> {
    rep.reconstruct(t)
}
