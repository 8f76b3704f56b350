//! Smooth (C^∞) cutoffs evaluated in jet arithmetic.

use crate::jet::CField;
use crate::scalar::Real;

/// C^∞ step: 0 for `t <= 0`, 1 for `t >= 1`, `f(t)/(f(t)+f(1-t))` with
/// `f(x) = exp(-1/x)` in between. `t` must be real-valued.
pub fn smooth_step<T: Real, S: CField<T>>(t: S) -> S {
    let x = t.value().re;
    if x <= T::zero() {
        return S::real(T::zero());
    }
    if x >= T::one() {
        return S::real(T::one());
    }
    let one = S::real(T::one());
    let f = |y: S| (-(one / y)).exp();
    let a = f(t);
    let b = f(one - t);
    a / (a + b)
}

/// Plain `f64` version for lattice checks and tests.
pub fn smooth_step_f64(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn step_is_monotone_with_flat_ends() {
        let mut prev = -1.0;
        for i in 0..=200 {
            let t = -0.5 + 2.0 * i as f64 / 200.0;
            let v = smooth_step_f64(t);
            assert!(v >= prev);
            prev = v;
            let c: Complex<f64> = smooth_step(Complex::new(t, 0.0));
            assert!((c.re - v).abs() < 1e-15);
        }
        assert_eq!(smooth_step_f64(0.5), 0.5);
    }
}
