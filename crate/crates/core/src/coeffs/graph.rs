//! Graph form `w_z̄ = a₁ w_z + c₁ conj(w_z) + b₁` and its exponential
//! substitution.

use num_complex::Complex;

use crate::coeffs::{CoeffTriple, Triple};
use crate::error::{Error, Result};
use crate::jet::CField;
use crate::scalar::Real;

/// Largest admissible `|q|` for the lifted product `q = ac`.
pub const ROOT_MARGIN: f64 = 1e-12;

#[derive(Clone, Debug)]
enum GraphSource<T: Real> {
    Reduced(CoeffTriple<T>),
    /// Constant `a₁`, `c₁` and `b₁ = w (k₀ + k_z z + k_z̄ z̄)`.
    Linear { a1: Complex<T>, c1: Complex<T>, k: [Complex<T>; 3] },
}

/// Coefficients `(a₁, b₁, c₁)` with `|a₁| + |c₁| ≤ a0 < 1`.
#[derive(Clone, Debug)]
pub struct GraphCoeffs<T: Real> {
    source: GraphSource<T>,
    a0: T,
}

impl<T: Real> GraphCoeffs<T> {
    /// Graph reduction of `ct`. With `m = max(|a|,|c|)` bounded by `a0`,
    /// `|a₁| + |c₁| = (|a| + |c|)/(1 + |ac|) ≤ 2a0/(1 + a0²) < 1`.
    pub fn from_triple(ct: CoeffTriple<T>) -> Self {
        let m = ct.a0();
        let a0 = (m + m) / (T::one() + m * m);
        Self { source: GraphSource::Reduced(ct), a0 }
    }

    /// Constant `a₁`, `c₁` with `b₁(z, w) = w (k₀ + k_z z + k_z̄ z̄)`; after the
    /// exponential substitution `b₂ = k₀ + k_z z + k_z̄ z̄`, which makes
    /// manufactured solutions easy to write down.
    pub fn linear(a1: Complex<T>, c1: Complex<T>, k: [Complex<T>; 3]) -> Result<Self> {
        let s = a1.norm() + c1.norm();
        if !(s < T::one()) {
            return Err(Error::BoundViolation(format!("|a1| + |c1| = {s} is not below 1")));
        }
        Ok(Self { source: GraphSource::Linear { a1, c1, k }, a0: s })
    }

    pub fn a0(&self) -> T {
        self.a0
    }

    /// The triple this was reduced from, if any.
    pub fn base(&self) -> Option<&CoeffTriple<T>> {
        match &self.source {
            GraphSource::Reduced(ct) => Some(ct),
            GraphSource::Linear { .. } => None,
        }
    }

    pub fn eval<S: CField<T>>(&self, z: Complex<T>, w: S) -> Result<Triple<S>> {
        match &self.source {
            GraphSource::Reduced(ct) => reduce_point(ct.eval(z, w)?),
            GraphSource::Linear { a1, c1, k } => {
                let lin = k[0] + k[1] * z + k[2] * z.conj();
                Ok(Triple { a: S::cst(*a1), b: w * S::cst(lin), c: S::cst(*c1) })
            }
        }
    }
}

/// `(a, b, c) ↦ (a₁, b₁, c₁)` at one point.
pub fn reduce_point<T: Real, S: CField<T>>(t: Triple<S>) -> Result<Triple<S>> {
    let (na, nc) = (t.a.value().norm(), t.c.value().norm());
    if !(na < T::one() && nc < T::one()) {
        return Err(Error::BoundViolation(format!("|a| = {na}, |c| = {nc}; both must be below 1")));
    }
    let one = S::real(T::one());
    let p = t.a * t.c;
    let delta = one - p.norm_sqr();
    Ok(Triple {
        a: -(t.a * (one - t.c.norm_sqr())) / delta,
        b: (t.b + p * t.b.conj()) / delta,
        c: t.c * (one - t.a.norm_sqr()) / delta,
    })
}

/// `(a₁, b₁, c₁) ↦ (a, b, c)` at one point, together with `q = ac`.
pub fn lift_point<T: Real>(g: Triple<Complex<T>>) -> Result<(Triple<Complex<T>>, Complex<T>)> {
    let s = g.a.norm() + g.c.norm();
    if !(s < T::one()) {
        return Err(Error::BoundViolation(format!("ellipticity |a1| + |c1| = {s} is not below 1")));
    }
    let p = g.a * g.c;
    let q = if p.norm() == T::zero() {
        Complex::new(T::zero(), T::zero())
    } else {
        // conj(p) q² + B q + p = 0; the small root via the stable form.
        let b = Complex::new(T::one() - g.a.norm_sqr() - g.c.norm_sqr(), T::zero());
        let disc = (b * b - p.conj() * p * T::lit(4.0)).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        -(p + p) / den
    };
    if !(q.norm() < T::one() - T::lit(ROOT_MARGIN)) {
        return Err(Error::NoAdmissibleRoot(format!("both roots have |q| >= 1 (|q| = {})", q.norm())));
    }
    let t = Triple { a: q * g.c.conj() - g.a, b: g.b - q * g.b.conj(), c: g.c - q * g.a.conj() };
    Ok((t, q))
}

/// `a₂ = a₁(z, eᵘ)`, `b₂ = e⁻ᵘ b₁(z, eᵘ)`, `c₂ = e^{ū−u} c₁(z, eᵘ)`.
pub fn exponential_substitution<T: Real, S: CField<T>>(gc: &GraphCoeffs<T>, z: Complex<T>, u: S) -> Result<Triple<S>> {
    let t = gc.eval(z, u.exp())?;
    Ok(Triple { a: t.a, b: (-u).exp() * t.b, c: (u.conj() - u).exp() * t.c })
}
