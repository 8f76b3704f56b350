//! Coefficient algebra for lower triangular almost complex structures.
//!
//! A [`CoeffTriple`] holds `(a, b, c)` as analytic samplers; the graph
//! equation `w_z̄ = a₁ w_z + c₁ conj(w_z) + b₁` is carried by [`GraphCoeffs`].
//! Everything evaluates in any [`CField`], so the same formulas give values,
//! first derivatives and mixed second derivatives.

mod fiber;
mod graph;
mod presets;
pub mod structure;

pub use fiber::{transform_coords, FiberChange, FiberPartials};
pub use graph::{exponential_substitution, lift_point, reduce_point, GraphCoeffs};
pub use presets::{Preset, ANISOTROPIC_ALPHA_CAP, ANISOTROPIC_GAMMA_CAP, DEFAULT_W_MAX, SHEAR_BETA_CAP};
pub use structure::{
    complex_matrix, is_elliptic, matrix_from_structure, standard_structure, structure_from_matrix,
    triple_from_structure, ComplexMatrix2, RealMatrix4, StructureMatrix,
};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::jet::{CField, Jet};
use crate::scalar::Real;

/// Three coefficients evaluated at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triple<S> {
    pub a: S,
    pub b: S,
    pub c: S,
}

impl<S: Copy> Triple<S> {
    pub fn map<R>(self, f: impl Fn(S) -> R) -> Triple<R> {
        Triple { a: f(self.a), b: f(self.b), c: f(self.c) }
    }
}

#[derive(Clone, Debug)]
enum TripleSource<T: Real> {
    Preset(Preset<T>),
    Transformed { base: Box<CoeffTriple<T>>, change: FiberChange<T> },
    Lifted(Box<GraphCoeffs<T>>),
}

/// Lower triangular coefficients `(a, b, c)` with `|a|, |c| < a0`.
#[derive(Clone, Debug)]
pub struct CoeffTriple<T: Real> {
    source: TripleSource<T>,
    a0: T,
}

impl<T: Real> CoeffTriple<T> {
    pub fn from_preset(preset: Preset<T>) -> Result<Self> {
        preset.validate()?;
        let a0 = preset.ellipticity_bound();
        Ok(Self { source: TripleSource::Preset(preset), a0 })
    }

    /// Coefficients seen in the fiber coordinate `w'` of `change`.
    pub fn transformed(base: &CoeffTriple<T>, change: &FiberChange<T>) -> Result<Self> {
        let mut out =
            Self { source: TripleSource::Transformed { base: Box::new(base.clone()), change: change.clone() }, a0: T::one() };
        out.a0 = out.lattice_bound()?;
        Ok(out)
    }

    /// Triple whose graph reduction is `gc`.
    pub fn lifted(gc: &GraphCoeffs<T>) -> Result<Self> {
        let mut out = Self { source: TripleSource::Lifted(Box::new(gc.clone())), a0: T::one() };
        out.a0 = out.lattice_bound()?;
        Ok(out)
    }

    /// Declared bound `a0` with `|a|, |c| < a0 < 1`.
    pub fn a0(&self) -> T {
        self.a0
    }

    pub fn preset(&self) -> Option<&Preset<T>> {
        match &self.source {
            TripleSource::Preset(p) => Some(p),
            _ => None,
        }
    }

    pub fn eval<S: CField<T>>(&self, z: Complex<T>, w: S) -> Result<Triple<S>> {
        match &self.source {
            TripleSource::Preset(p) => Ok(p.eval(z, w)),
            TripleSource::Transformed { base, change } => transform_coords(base, change, z, w),
            TripleSource::Lifted(gc) => {
                let t = gc.eval(z, w)?;
                let v = t.map(|s| s.value());
                let (_, q) = lift_point(v)?;
                Ok(lift_with_root(t, q))
            }
        }
    }

    /// Sup of `max(|a|, |c|)` on the verification lattice, padded by a small
    /// margin; fails if it reaches 1.
    fn lattice_bound(&self) -> Result<T> {
        let mut sup = T::zero();
        for (z, w) in verification_lattice::<T>() {
            let t = self.eval(z, w)?;
            sup = sup.max(t.a.norm()).max(t.c.norm());
        }
        let a0 = sup + T::lit(0.01);
        if a0 >= T::one() {
            return Err(Error::BoundViolation(format!("sup(|a|,|c|) = {sup} leaves no margin below 1")));
        }
        Ok(a0)
    }

    /// Spot-checks the hypotheses on the verification lattice.
    pub fn spot_check(&self) -> Result<HypothesisReport> {
        let mut rep = HypothesisReport::default();
        for (z, w) in verification_lattice::<T>() {
            let t = self.eval(z, Jet::variable(w))?;
            let sup_ac = t.a.v.norm().max(t.c.v.norm());
            rep.sup_ac = rep.sup_ac.max(sup_ac.to_f64_lossy());
            if w.norm() == T::zero() {
                let zero_section = t.a.v.norm() + t.b.v.norm();
                rep.zero_section = rep.zero_section.max(zero_section.to_f64_lossy());
            }
            for j in [t.a, t.b, t.c] {
                rep.b0 = rep.b0.max((j.d.norm() + j.db.norm()).to_f64_lossy());
            }
        }
        if rep.sup_ac >= self.a0.to_f64_lossy() {
            return Err(Error::BoundViolation(format!(
                "max(|a|,|c|) = {} reaches a0 = {}",
                rep.sup_ac, self.a0
            )));
        }
        Ok(rep)
    }
}

/// Lattice measurements of the hypotheses on `(a, b, c)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HypothesisReport {
    /// `max(|a|, |c|)`.
    pub sup_ac: f64,
    /// `max |a(z,0)| + |b(z,0)|`.
    pub zero_section: f64,
    /// Largest `|∂_w f| + |∂_w̄ f|` over `f ∈ {a, b, c}`.
    pub b0: f64,
}

/// Sample points `(z, w)` used for spot checks: five rings of `z` in the
/// closed disc and fiber radii from 0 to 25.
pub fn verification_lattice<T: Real>() -> Vec<(Complex<T>, Complex<T>)> {
    let mut pts = Vec::new();
    let zr = [0.0, 0.25, 0.5, 0.75, 1.0];
    let wr = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0];
    for &r in &zr {
        for k in 0..8 {
            let z = Complex::from_polar(T::lit(r), T::lit(std::f64::consts::TAU * k as f64 / 8.0));
            for &s in &wr {
                for m in 0..8 {
                    let phi = std::f64::consts::TAU * (m as f64 + 0.5) / 8.0;
                    pts.push((z, Complex::from_polar(T::lit(s), T::lit(phi))));
                }
            }
        }
    }
    pts
}

/// `(a, b, c)` from `(a₁, b₁, c₁)` and the admissible root `q = ac`.
fn lift_with_root<T: Real, S: CField<T>>(g: Triple<S>, q: Complex<T>) -> Triple<S> {
    // q solves conj(a₁c₁) q² + (1 − |a₁|² − |c₁|²) q + a₁c₁ = 0; its
    // derivatives follow by implicit differentiation in jet arithmetic.
    let qs = refine_root(&g, q);
    Triple { a: qs * g.c.conj() - g.a, b: g.b - qs * g.b.conj(), c: g.c - qs * g.a.conj() }
}

fn refine_root<T: Real, S: CField<T>>(g: &Triple<S>, q: Complex<T>) -> S {
    let one = S::real(T::one());
    let p = g.a * g.c;
    let bq = one - g.a.norm_sqr() - g.c.norm_sqr();
    let f = |x: S| p.conj() * x * x + bq * x + p;
    let dv = (p.conj() * S::cst(q) * S::real(T::lit(2.0)) + bq).value();
    let mut x = S::cst(q);
    // Chord steps with the exact value-level slope: each step fixes one
    // more order of derivative parts.
    for _ in 0..3 {
        x = x - f(x) / S::cst(dv);
    }
    x
}
