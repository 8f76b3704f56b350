//! First-order Wirtinger jets: a value together with its `∂_ξ` and `∂_ξ̄`
//! derivatives in one complex direction `ξ`.
//!
//! Jets nest (`Jet<Jet<Complex<T>>>`) to carry mixed second derivatives, which
//! the coordinate-change formulas need when the solver linearizes a
//! transformed coefficient triple.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Complex-like arithmetic closed under conjugation and the exponential.
pub trait CField<T: Real>:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(c: Complex<T>) -> Self;
    /// Base complex value, all derivative parts discarded.
    fn value(&self) -> Complex<T>;
    fn conj(&self) -> Self;
    fn exp(&self) -> Self;
    /// Principal square root.
    fn sqrt(&self) -> Self;
    /// Principal logarithm.
    fn ln(&self) -> Self;
    /// Nesting depth of derivative parts: 0 for plain complex numbers.
    fn order() -> usize;

    fn real(x: T) -> Self {
        Self::cst(Complex::new(x, T::zero()))
    }

    fn re(&self) -> Self {
        (*self + self.conj()) * Self::real(T::lit(0.5))
    }

    fn norm_sqr(&self) -> Self {
        *self * self.conj()
    }

    fn scale(&self, s: T) -> Self {
        *self * Self::real(s)
    }
}

impl<T: Real> CField<T> for Complex<T> {
    fn cst(c: Complex<T>) -> Self {
        c
    }
    fn value(&self) -> Complex<T> {
        *self
    }
    fn conj(&self) -> Self {
        Complex::conj(self)
    }
    fn exp(&self) -> Self {
        Complex::exp(*self)
    }
    fn sqrt(&self) -> Self {
        Complex::sqrt(*self)
    }
    fn ln(&self) -> Self {
        Complex::ln(*self)
    }
    fn order() -> usize {
        0
    }
}

/// `v + d·δξ + db·δξ̄`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<S> {
    pub v: S,
    pub d: S,
    pub db: S,
}

impl<S> Jet<S> {
    pub fn new(v: S, d: S, db: S) -> Self {
        Self { v, d, db }
    }
}

impl<S: Copy> Jet<S> {
    pub fn constant<T: Real>(v: S) -> Self
    where
        S: CField<T>,
    {
        let z = S::real(T::zero());
        Self { v, d: z, db: z }
    }

    /// The independent variable itself: `∂_ξ ξ = 1`, `∂_ξ̄ ξ = 0`.
    pub fn variable<T: Real>(v: S) -> Self
    where
        S: CField<T>,
    {
        Self { v, d: S::real(T::one()), db: S::real(T::zero()) }
    }
}

impl<S: Add<Output = S>> Add for Jet<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d, db: self.db + o.db }
    }
}

impl<S: Sub<Output = S>> Sub for Jet<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: self.d - o.d, db: self.db - o.db }
    }
}

impl<S: Neg<Output = S>> Neg for Jet<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, d: -self.d, db: -self.db }
    }
}

impl<S: Copy + Add<Output = S> + Mul<Output = S>> Mul for Jet<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { v: self.v * o.v, d: self.d * o.v + self.v * o.d, db: self.db * o.v + self.v * o.db }
    }
}

impl<S: Copy + Sub<Output = S> + Mul<Output = S> + Div<Output = S>> Div for Jet<S> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        Self { v: q, d: (self.d - q * o.d) / o.v, db: (self.db - q * o.db) / o.v }
    }
}

impl<T: Real, S: CField<T>> CField<T> for Jet<S> {
    fn cst(c: Complex<T>) -> Self {
        Self::constant(S::cst(c))
    }
    fn value(&self) -> Complex<T> {
        self.v.value()
    }
    fn conj(&self) -> Self {
        // ∂_ξ conj(f) = conj(∂_ξ̄ f)
        Self { v: self.v.conj(), d: self.db.conj(), db: self.d.conj() }
    }
    fn exp(&self) -> Self {
        let e = self.v.exp();
        Self { v: e, d: e * self.d, db: e * self.db }
    }
    fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        let two_s = s + s;
        Self { v: s, d: self.d / two_s, db: self.db / two_s }
    }
    fn ln(&self) -> Self {
        Self { v: self.v.ln(), d: self.d / self.v, db: self.db / self.v }
    }
    fn order() -> usize {
        S::order() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn product_and_conjugate_rules() {
        let z = C::new(0.3, -0.4);
        let x = Jet::<C>::variable(z);
        // f = z² z̄ → ∂f = 2 z z̄, ∂̄f = z²
        let f = x * x * x.conj();
        assert!((f.d - 2.0 * z * z.conj()).norm() < 1e-15);
        assert!((f.db - z * z).norm() < 1e-15);
        // |z|² is real-valued
        let m = x.norm_sqr();
        assert!((m.d - z.conj()).norm() < 1e-15 && (m.db - z).norm() < 1e-15);
    }

    #[test]
    fn quotient_exp_sqrt_match_finite_differences() {
        let f = |x: Jet<C>| (x * x.conj() + Jet::real(1.0)).sqrt() * x.exp() / (x + Jet::real(2.0));
        let z = C::new(0.2, 0.7);
        let j = f(Jet::variable(z));
        let h = 1e-6;
        let g = |w: C| f(Jet::constant(w)).v;
        let dx = (g(z + h) - g(z - h)) / (2.0 * h);
        let dy = (g(z + C::new(0.0, h)) - g(z - C::new(0.0, h))) / (2.0 * h);
        let d = (dx - C::new(0.0, 1.0) * dy) * 0.5;
        let db = (dx + C::new(0.0, 1.0) * dy) * 0.5;
        assert!((j.d - d).norm() < 1e-8);
        assert!((j.db - db).norm() < 1e-8);
    }

    #[test]
    fn nested_jets_give_mixed_second_derivatives() {
        // f = z² z̄², ∂f = 2 z z̄²: ∂∂f = 2 z̄², ∂̄∂f = 4 z z̄
        let z = C::new(0.5, 0.25);
        let inner = Jet::<C>::variable(z);
        let outer = Jet::<Jet<C>>::new(inner, Jet::real(1.0), Jet::real(0.0));
        let f = outer * outer * outer.conj() * outer.conj();
        assert!((f.d.d - 2.0 * z.conj() * z.conj()).norm() < 1e-14);
        assert!((f.d.db - 4.0 * z * z.conj()).norm() < 1e-14);
    }
}
