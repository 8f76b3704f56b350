//! Named analytic coefficient families.

use num_complex::Complex;

use crate::coeffs::Triple;
use crate::error::{Error, Result};
use crate::jet::CField;
use crate::scalar::Real;
use crate::smooth::smooth_step;

/// Parameter caps: each family satisfies the hypotheses strictly inside them.
pub const SHEAR_BETA_CAP: f64 = 1.0;
pub const ANISOTROPIC_ALPHA_CAP: f64 = 1.0;
pub const ANISOTROPIC_GAMMA_CAP: f64 = 0.5;
pub const DEFAULT_W_MAX: f64 = 10.0;

/// Coefficient families, cut off smoothly beyond `|w| = w_max` (identically
/// zero for `|w| ≥ 2 w_max`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Preset<T> {
    /// `a = b = c = 0`.
    Integrable,
    /// `a = 0`, `b = β z̄ w`, `c = 0`.
    Shear { beta: T, w_max: T },
    /// `a = α z w / (1 + |w|²)`, `b = 0`, `c = γ / (1 + |w|²)`.
    Anisotropic { alpha: T, gamma: T, w_max: T },
}

impl<T: Real> Preset<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Integrable => "integrable",
            Preset::Shear { .. } => "shear",
            Preset::Anisotropic { .. } => "anisotropic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: T, cap: f64| {
            Err(Error::InvalidArgument(format!("{} preset: |{what}| = {v} must be below {cap}", self.name())))
        };
        let check_wmax = |w_max: T| {
            if !(w_max.is_finite() && w_max > T::zero()) {
                return Err(Error::InvalidArgument(format!("w_max must be positive, got {w_max}")));
            }
            Ok(())
        };
        match *self {
            Preset::Integrable => Ok(()),
            Preset::Shear { beta, w_max } => {
                check_wmax(w_max)?;
                if !(beta.abs() < T::lit(SHEAR_BETA_CAP)) {
                    return bad("beta", beta, SHEAR_BETA_CAP);
                }
                Ok(())
            }
            Preset::Anisotropic { alpha, gamma, w_max } => {
                check_wmax(w_max)?;
                if !(alpha.abs() < T::lit(ANISOTROPIC_ALPHA_CAP)) {
                    return bad("alpha", alpha, ANISOTROPIC_ALPHA_CAP);
                }
                if !(gamma.abs() < T::lit(ANISOTROPIC_GAMMA_CAP)) {
                    return bad("gamma", gamma, ANISOTROPIC_GAMMA_CAP);
                }
                Ok(())
            }
        }
    }

    /// `a0` with `|a|, |c| < a0 < 1`.
    pub fn ellipticity_bound(&self) -> T {
        let margin = T::lit(0.05);
        match *self {
            Preset::Integrable | Preset::Shear { .. } => margin,
            // |z w| / (1 + |w|²) ≤ 1/2 on the closed disc
            Preset::Anisotropic { alpha, gamma, .. } => (alpha.abs() * T::lit(0.5)).max(gamma.abs()) + margin,
        }
    }

    pub fn w_max(&self) -> Option<T> {
        match *self {
            Preset::Integrable => None,
            Preset::Shear { w_max, .. } | Preset::Anisotropic { w_max, .. } => Some(w_max),
        }
    }

    pub fn eval<S: CField<T>>(&self, z: Complex<T>, w: S) -> Triple<S> {
        let zero = S::real(T::zero());
        match *self {
            Preset::Integrable => Triple { a: zero, b: zero, c: zero },
            Preset::Shear { beta, w_max } => {
                let b = S::cst(z.conj() * beta) * w * cutoff(w, w_max);
                Triple { a: zero, b, c: zero }
            }
            Preset::Anisotropic { alpha, gamma, w_max } => {
                let damp = cutoff(w, w_max) / (S::real(T::one()) + w.norm_sqr());
                Triple { a: S::cst(z * alpha) * w * damp, b: zero, c: S::real(gamma) * damp }
            }
        }
    }
}

/// 1 for `|w| ≤ w_max`, 0 for `|w| ≥ 2 w_max`, smooth in between.
fn cutoff<T: Real, S: CField<T>>(w: S, w_max: T) -> S {
    if w.value().norm() <= w_max {
        return S::real(T::one());
    }
    let t = (w.norm_sqr().sqrt() - S::real(w_max)) / S::real(w_max);
    S::real(T::one()) - smooth_step(t)
}
