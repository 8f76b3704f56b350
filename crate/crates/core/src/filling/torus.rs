//! Star-shaped tori `{z} × γ_z` and the fiber rescaling that flattens them.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::jet::{CField, Jet};
use crate::scalar::Real;
use crate::smooth::smooth_step;

/// Fiber curves `γ_z = { ρ(z, θ) e^{iθ} }` over the unit circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TorusSpec<T> {
    /// `ρ ≡ 1`.
    Unit,
    /// `ρ ≡ r`.
    Constant(T),
    /// `ρ = 1 + ε cos θ`.
    CosineRipple(T),
    /// `ρ = 1 + ε cos(θ − arg z)`.
    TwistedRipple(T),
}

/// Largest ripple amplitude accepted.
pub const RIPPLE_CAP: f64 = 0.5;

impl<T: Real> TorusSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TorusSpec::Unit => Ok(()),
            TorusSpec::Constant(r) => {
                if r.is_finite() && r > T::zero() {
                    Ok(())
                } else {
                    Err(Error::Normalization(format!("fiber radius must be positive, got {r}")))
                }
            }
            TorusSpec::CosineRipple(e) | TorusSpec::TwistedRipple(e) => {
                if e.is_finite() && e.abs() <= T::lit(RIPPLE_CAP) {
                    Ok(())
                } else {
                    Err(Error::Normalization(format!("ripple amplitude {e} outside [-{RIPPLE_CAP}, {RIPPLE_CAP}]")))
                }
            }
        }
    }

    /// `ρ` at boundary direction `zdir` and fiber direction `wdir` (both unit).
    pub fn rho<S: CField<T>>(&self, zdir: S, wdir: S) -> S {
        let one = S::real(T::one());
        match *self {
            TorusSpec::Unit => one,
            TorusSpec::Constant(r) => S::real(r),
            TorusSpec::CosineRipple(e) => one + wdir.re().scale(e),
            TorusSpec::TwistedRipple(e) => one + (wdir * zdir.conj()).re().scale(e),
        }
    }

    /// Extension of `ρ` into the closed disc, harmonic in `z`: the
    /// `z`-independent families extend by themselves and the twisted ripple
    /// by `1 + ε Re(e^{iθ} z̄)`. `wdir` is the unit fiber direction.
    pub fn rho_extended<S: CField<T>>(&self, z: S, wdir: S) -> S {
        match *self {
            TorusSpec::TwistedRipple(e) => S::real(T::one()) + (wdir * z.conj()).re().scale(e),
            _ => self.rho(z, wdir),
        }
    }

    /// Mean of `ρ` (and of its extension) over the fiber angle.
    pub fn mean_rho(&self) -> T {
        match *self {
            TorusSpec::Constant(r) => r,
            _ => T::one(),
        }
    }

    /// `(min ρ, max ρ)`.
    pub fn rho_range(&self) -> (T, T) {
        match *self {
            TorusSpec::Unit => (T::one(), T::one()),
            TorusSpec::Constant(r) => (r, r),
            TorusSpec::CosineRipple(e) | TorusSpec::TwistedRipple(e) => (T::one() - e.abs(), T::one() + e.abs()),
        }
    }

    /// Point of `γ_z` at fiber angle `theta`.
    pub fn curve_point(&self, z: Complex<T>, theta: T) -> Complex<T> {
        let dir = Complex::from_polar(T::one(), theta);
        dir * self.rho(z / z.norm(), dir)
    }
}

/// Radial rescaling `w' = w · s(z, w)` that sends `γ_z` onto the unit circle.
///
/// `s = 1/ρ̄(z)` for `|w| ≤ inner_lo` (so `w'` is smooth at `w = 0`),
/// `s = 1/ρ̃(z, arg w)` on `[inner_hi, outer_lo]`, and `s = 1` from `outer_hi`
/// on. Between zones `ln s` is interpolated by a C^∞ step in `ln |w|`; the
/// ramps are long enough that `t ↦ t·s` stays increasing. `ρ̃` is
/// [`TorusSpec::rho_extended`] and `ρ̄` its fiber mean.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusMap<T> {
    spec: TorusSpec<T>,
    inner_lo: T,
    inner_hi: T,
    outer_lo: T,
    outer_hi: T,
}

impl<T: Real> TorusMap<T> {
    pub fn new(spec: TorusSpec<T>) -> Result<Self> {
        spec.validate()?;
        let (lo, hi) = spec.rho_range();
        let (lo, hi) = (lo.min(T::one()), hi.max(T::one()));
        // d ln(t·s)/d ln t = 1 + (ramp slope)·ln(ratio of scales); the step
        // has slope at most 2, so a ramp of log-length 3·|ln ratio| keeps it
        // above 1/3.
        let ramp = |ratio: T| ratio.max(T::one() / ratio).powi(3).max(T::lit(2.0));
        let outer_lo = T::lit(1.5) * hi;
        let outer_hi = outer_lo * ramp(hi).max(ramp(lo));
        let inner_hi = T::lit(0.5) * lo;
        let inner_lo = inner_hi / ramp(hi / lo);
        let map = Self { spec, inner_lo, inner_hi, outer_lo, outer_hi };
        map.check_monotone()?;
        Ok(map)
    }

    pub fn spec(&self) -> &TorusSpec<T> {
        &self.spec
    }

    /// Radius beyond which the change is the identity.
    pub fn identity_radius(&self) -> T {
        self.outer_hi
    }

    /// The rescale factor `s(z, w)`.
    pub fn scale<S: CField<T>>(&self, z: S, w: S) -> S {
        let one = S::real(T::one());
        let log_mean = S::real(-self.spec.mean_rho().ln());
        let t = w.value().norm();
        if t <= self.inner_lo {
            return log_mean.exp();
        }
        if t >= self.outer_hi {
            return one;
        }
        let log_t = w.norm_sqr().ln().scale(T::lit(0.5));
        let dir = w / log_t.exp();
        let log_local = -self.spec.rho_extended(z, dir).ln();
        let ramp = |lo: T, hi: T| smooth_step((log_t - S::real(lo.ln())) / S::real(hi.ln() - lo.ln()));
        let bi = ramp(self.inner_lo, self.inner_hi);
        let bo = ramp(self.outer_lo, self.outer_hi);
        ((log_mean + bi * (log_local - log_mean)) * (one - bo)).exp()
    }

    pub fn forward<S: CField<T>>(&self, z: S, w: S) -> S {
        w * self.scale(z, w)
    }

    /// Solves `forward(z, w) = wp` for `w`.
    pub fn inverse<S: CField<T>>(&self, z: S, wp: S) -> S {
        let zv = z.value();
        let target = wp.value();
        let w0 = self.inverse_value(zv, target);
        // Value-level Wirtinger partials of the forward map at the root.
        let j = self.forward(Jet::constant(zv), Jet::variable(w0));
        let (a, b) = (j.d, j.db);
        let den = a.norm_sqr() - b.norm_sqr();
        let mut w = S::cst(w0);
        // Each chord step with the exact value-level slope fixes one more
        // order of derivative parts.
        for _ in 0..S::order() {
            let r = wp - self.forward(z, w);
            let delta = (S::cst(a.conj()) * r - S::cst(b) * r.conj()) / S::real(den);
            w = w + delta;
        }
        w
    }

    fn inverse_value(&self, z: Complex<T>, wp: Complex<T>) -> Complex<T> {
        let target = wp.norm();
        if target == T::zero() || target >= self.outer_hi {
            return wp;
        }
        let dir = wp / target;
        // Safeguarded Newton on t ↦ t·s(z, t·dir) − |w'|, increasing in t.
        let radial = |t: T| {
            let j = self.forward(Jet::constant(z), Jet::variable(dir * t));
            let slope = (dir.conj() * (j.d * dir + j.db * dir.conj())).re;
            (j.v.norm() - target, slope)
        };
        let (mut lo, mut hi) = (T::zero(), self.outer_hi);
        let mut t = (target / self.scale(z, wp).re).min(hi);
        for _ in 0..100 {
            let (f, df) = radial(t);
            if f < T::zero() {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = t - f / df;
            if !(next > lo && next < hi) || !df.is_finite() || df <= T::zero() {
                next = (lo + hi) * T::lit(0.5);
            }
            if (next - t).abs() <= T::epsilon() * t.max(T::min_positive_value()) || hi - lo <= T::epsilon() * hi {
                t = next;
                break;
            }
            t = next;
        }
        dir * t
    }

    /// Checks that `t ↦ t·s(z, t e^{iθ})` increases and that the map keeps
    /// orientation (`|∂_w w'| > |∂_w̄ w'|`) on a sample of the closed disc.
    fn check_monotone(&self) -> Result<()> {
        let n_t = 300;
        let (t_min, t_max) = (self.inner_lo * T::lit(0.5), self.outer_hi * T::lit(1.1));
        let log_span = (t_max / t_min).ln();
        for &zr in &[0.0, 0.2, 0.35, 0.5, 0.65, 0.8, 1.0] {
            for zk in 0..8 {
                let z = Complex::from_polar(T::lit(zr), T::lit(std::f64::consts::TAU * zk as f64 / 8.0));
                for k in 0..24 {
                    let dir = Complex::from_polar(T::one(), T::lit(std::f64::consts::TAU * k as f64 / 24.0));
                    let mut prev = T::zero();
                    for i in 1..=n_t {
                        let t = t_min * (log_span * T::lit(i as f64 / n_t as f64)).exp();
                        let j = self.forward(Jet::constant(z), Jet::variable(dir * t));
                        let v = j.v.norm();
                        if !(v > prev) {
                            return Err(Error::Normalization(format!(
                                "fiber rescaling is not monotone at |z| = {zr}, |w| = {t}"
                            )));
                        }
                        if !(j.d.norm() > j.db.norm()) {
                            return Err(Error::Normalization(format!(
                                "fiber rescaling reverses orientation at |z| = {zr}, |w| = {t}"
                            )));
                        }
                        prev = v;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn unit_torus_gives_identity() {
        let m = TorusMap::new(TorusSpec::Unit).unwrap();
        for w in [C::new(0.0, 0.0), C::new(0.1, 0.0), C::new(0.7, -0.7), C::new(3.0, 4.0)] {
            assert_eq!(m.forward(C::new(0.9, 0.1), w), w);
        }
    }

    #[test]
    fn curves_are_flattened() {
        for spec in [TorusSpec::Constant(2.0), TorusSpec::Constant(0.6), TorusSpec::CosineRipple(0.2), TorusSpec::TwistedRipple(-0.3)] {
            let m = TorusMap::new(spec).unwrap();
            let mut worst: f64 = 0.0;
            for zk in 0..16 {
                let z = C::from_polar(1.0, std::f64::consts::TAU * zk as f64 / 16.0);
                for k in 0..512 {
                    let theta = std::f64::consts::TAU * k as f64 / 512.0;
                    let w = spec.curve_point(z, theta);
                    worst = worst.max((m.forward(z, w).norm() - 1.0).abs());
                }
            }
            assert!(worst < 1e-12, "{spec:?}: {worst:e}");
        }
    }

    #[test]
    fn inverse_roundtrips_with_derivatives() {
        let m = TorusMap::new(TorusSpec::TwistedRipple(0.3)).unwrap();
        for (z, w) in [(C::new(0.9, 0.3), C::new(0.4, 1.0)), (C::new(0.1, 0.0), C::new(0.05, 0.05)), (C::new(-0.5, 0.5), C::new(2.0, -1.5))] {
            let wp = m.forward(z, w);
            assert!((m.inverse(z, wp) - w).norm() < 1e-13);
            // derivative of the inverse composed with the forward map is the identity
            let j = m.inverse(Jet::constant(z), Jet::variable(wp));
            let f = m.forward(Jet::constant(z), Jet::variable(w));
            let d = f.d * j.d + f.db * j.db.conj();
            assert!((d - C::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert_eq!(m.inverse(C::new(0.3, 0.0), C::new(0.0, 0.0)), C::new(0.0, 0.0));
    }

    #[test]
    fn invalid_specs() {
        assert!(TorusMap::new(TorusSpec::Constant(0.0)).is_err());
        assert!(TorusMap::new(TorusSpec::CosineRipple(0.9)).is_err());
    }
}
