//! Fiber coordinate changes `z' = z`, `w' = w'(z, w)` and their action on
//! the triangular coefficients.

use num_complex::Complex;

use crate::coeffs::{CoeffTriple, Triple};
use crate::error::{Error, Result};
use crate::filling::{TorusMap, TorusSpec};
use crate::jet::{CField, Jet};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
enum ChangeKind<T> {
    /// `w' = λ w + k₀ + k_z z + k_z̄ z̄`.
    Affine { scale: Complex<T>, shift: [Complex<T>; 3] },
    Torus(TorusMap<T>),
}

/// Fiberwise orientation-preserving diffeomorphism `w ↦ w'(z, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberChange<T> {
    kind: ChangeKind<T>,
}

/// The old fiber coordinate `w` and its partials in `(z', w')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberPartials<S> {
    pub w: S,
    pub w_z: S,
    pub w_zb: S,
    pub w_w: S,
    pub w_wb: S,
}

impl<T: Real> FiberChange<T> {
    pub fn identity() -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Self { kind: ChangeKind::Affine { scale: Complex::new(T::one(), T::zero()), shift: [zero; 3] } }
    }

    /// `w' = λ w + k₀ + k_z z + k_z̄ z̄` with `λ ≠ 0`.
    pub fn affine(scale: Complex<T>, shift: [Complex<T>; 3]) -> Result<Self> {
        if !(scale.norm() > T::zero()) {
            return Err(Error::InvalidArgument("affine fiber change needs a nonzero scale".into()));
        }
        Ok(Self { kind: ChangeKind::Affine { scale, shift } })
    }

    /// Rescaling that flattens the torus `spec` to the unit circle bundle.
    pub fn torus(spec: TorusSpec<T>) -> Result<Self> {
        if spec == TorusSpec::Unit {
            return Ok(Self::identity());
        }
        Ok(Self { kind: ChangeKind::Torus(TorusMap::new(spec)?) })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn forward<S: CField<T>>(&self, z: S, w: S) -> S {
        match &self.kind {
            ChangeKind::Affine { scale, shift } => S::cst(*scale) * w + shift_at(shift, z),
            ChangeKind::Torus(m) => m.forward(z, w),
        }
    }

    pub fn inverse<S: CField<T>>(&self, z: S, wp: S) -> S {
        match &self.kind {
            ChangeKind::Affine { scale, shift } => (wp - shift_at(shift, z)) / S::cst(*scale),
            ChangeKind::Torus(m) => m.inverse(z, wp),
        }
    }

    /// `w(z', w')` with its first partials, carried in `S`.
    ///
    /// With `A, B, P, R` the `w, w̄, z, z̄` partials of the forward map at `w`
    /// and `D = |A|² − |B|²`, differentiating `w'(z, w(z, w')) = w'` gives
    /// `w_w' = Ā/D`, `w_w̄' = −B/D`, `w_z' = −(ĀP − BR̄)/D`,
    /// `w_z̄' = −(ĀR − BP̄)/D`.
    pub fn partials<S: CField<T>>(&self, z: Complex<T>, wp: S) -> FiberPartials<S> {
        let w = self.inverse(S::cst(z), wp);
        let by_w = self.forward(Jet::constant(S::cst(z)), Jet::variable(w));
        let by_z = self.forward(Jet::variable(S::cst(z)), Jet::constant(w));
        let (a, b, p, r) = (by_w.d, by_w.db, by_z.d, by_z.db);
        let d = a.norm_sqr() - b.norm_sqr();
        let ac = a.conj();
        FiberPartials {
            w,
            w_w: ac / d,
            w_wb: -b / d,
            w_z: -(ac * p - b * r.conj()) / d,
            w_zb: -(ac * r - b * p.conj()) / d,
        }
    }
}

fn shift_at<T: Real, S: CField<T>>(k: &[Complex<T>; 3], z: S) -> S {
    S::cst(k[0]) + S::cst(k[1]) * z + S::cst(k[2]) * z.conj()
}

/// Coefficients `(a', b', c')` in the coordinates `(z, w')` at `(z, wp)`:
///
/// `a' = a`,
/// `b' = (b − a(w_z' − c w̄_z') + c w̄_z̄' − w_z̄') / m`,
/// `c' = (c w̄_w̄' − w_w̄') / m`, with `m = w_w' − c w̄_w'`.
pub fn transform_coords<T: Real, S: CField<T>>(
    ct: &CoeffTriple<T>,
    change: &FiberChange<T>,
    z: Complex<T>,
    wp: S,
) -> Result<Triple<S>> {
    let p = change.partials(z, wp);
    let t = ct.eval(z, p.w)?;
    let wb_w = p.w_wb.conj();
    let wb_wb = p.w_w.conj();
    let wb_z = p.w_zb.conj();
    let wb_zb = p.w_z.conj();
    let m = p.w_w - t.c * wb_w;
    if !(m.value().norm() > T::lit(1e-14)) {
        return Err(Error::Degenerate(format!("w_w' − c·conj(w)_w' vanishes at z = {z}")));
    }
    Ok(Triple {
        a: t.a,
        b: (t.b - t.a * (p.w_z - t.c * wb_z) + t.c * wb_zb - p.w_zb) / m,
        c: (t.c * wb_wb - p.w_wb) / m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{structure_from_matrix, triple_from_structure, verification_lattice, Preset};
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn aniso() -> CoeffTriple<f64> {
        CoeffTriple::from_preset(Preset::Anisotropic { alpha: 0.6, gamma: 0.35, w_max: 10.0 }).unwrap()
    }

    #[test]
    fn identity_and_scaling() {
        let ct = aniso();
        let z = C::new(0.3, -0.5);
        let w = C::new(0.7, 0.2);
        let id = transform_coords(&ct, &FiberChange::identity(), z, w).unwrap();
        assert_eq!(id, ct.eval(z, w).unwrap());

        let dbl = FiberChange::affine(C::new(2.0, 0.0), [C::new(0.0, 0.0); 3]).unwrap();
        let t = transform_coords(&ct, &dbl, z, w * 2.0).unwrap();
        let base = ct.eval(z, w).unwrap();
        assert!((t.a - base.a).norm() < 1e-15);
        assert!((t.b - base.b * 2.0).norm() < 1e-15);
        assert!((t.c - base.c).norm() < 1e-15);
    }

    #[test]
    fn holomorphic_shift() {
        // w' = w + z: b' = b + a − c, so b' = 0 needs a = b = c = 0 at the point
        let shift = FiberChange::affine(C::new(1.0, 0.0), [C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]).unwrap();
        let z = C::new(0.2, 0.1);
        let t = transform_coords(&CoeffTriple::from_preset(Preset::Integrable).unwrap(), &shift, z, C::new(0.4, 0.0)).unwrap();
        assert_eq!(t.b, C::new(0.0, 0.0));
        let ct = aniso();
        let wp = C::new(0.9, -0.3);
        let t = transform_coords(&ct, &shift, z, wp).unwrap();
        let base = ct.eval(z, wp - z).unwrap();
        assert!((t.b - (base.b + base.a - base.c)).norm() < 1e-15);
    }

    /// Independent check: push the structure forward through the real
    /// differential of the change and recover the triple from `J'`.
    fn pushforward_triple(ct: &CoeffTriple<f64>, ch: &FiberChange<f64>, z: C, wp: C) -> Triple<C> {
        let p = ch.partials(z, wp);
        let t = ct.eval(z, p.w).unwrap();
        let j = structure_from_matrix(&[[t.a, C::new(0.0, 0.0)], [t.b, t.c]]).unwrap();
        // Real Jacobian of (z, w) ↦ (z, w') at the old point, by differences.
        let h = 1e-6;
        let f = |x: [f64; 4]| {
            let w2 = ch.forward(C::new(x[0], x[1]), C::new(x[2], x[3]));
            [x[0], x[1], w2.re, w2.im]
        };
        let x0 = [z.re, z.im, p.w.re, p.w.im];
        let mut d = [[0.0; 4]; 4];
        for col in 0..4 {
            let (mut xp, mut xm) = (x0, x0);
            xp[col] += h;
            xm[col] -= h;
            let (fp, fm) = (f(xp), f(xm));
            for row in 0..4 {
                d[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        let inv = invert4(&d);
        let mut jp = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                jp[r][c] = (0..4).flat_map(|i| (0..4).map(move |k| (i, k))).map(|(i, k)| d[r][i] * j[i][k] * inv[k][c]).sum();
            }
        }
        triple_from_structure(&jp).unwrap()
    }

    fn invert4(m: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
        let mut a = *m;
        let mut b = [[0.0; 4]; 4];
        for i in 0..4 {
            b[i][i] = 1.0;
        }
        for col in 0..4 {
            let piv = (col..4).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            let d = a[col][col];
            for k in 0..4 {
                a[col][k] /= d;
                b[col][k] /= d;
            }
            for row in 0..4 {
                if row != col {
                    let f = a[row][col];
                    for k in 0..4 {
                        a[row][k] -= f * a[col][k];
                        b[row][k] -= f * b[col][k];
                    }
                }
            }
        }
        b
    }

    #[test]
    fn formulas_match_structure_pushforward() {
        let ct = aniso();
        let changes = [
            FiberChange::affine(C::new(1.5, -0.5), [C::new(0.1, 0.0), C::new(0.3, 0.2), C::new(-0.2, 0.4)]).unwrap(),
            FiberChange::torus(TorusSpec::TwistedRipple(0.3)).unwrap(),
            FiberChange::torus(TorusSpec::Constant(2.0)).unwrap(),
        ];
        for ch in &changes {
            for (z, wp) in [(C::new(0.5, 0.4), C::new(0.3, 0.9)), (C::new(-0.1, 0.85), C::new(-1.2, 0.1)), (C::new(0.45, 0.0), C::new(0.2, -0.1))] {
                let t = transform_coords(&ct, ch, z, wp).unwrap();
                let o = pushforward_triple(&ct, ch, z, wp);
                assert!((t.a - o.a).norm() < 1e-7, "{ch:?} a {t:?} {o:?}");
                assert!((t.b - o.b).norm() < 1e-7, "{ch:?} b {t:?} {o:?}");
                assert!((t.c - o.c).norm() < 1e-7, "{ch:?} c {t:?} {o:?}");
            }
        }
    }

    #[test]
    fn torus_normalization_keeps_vanishing() {
        for spec in [TorusSpec::Constant(2.0), TorusSpec::CosineRipple(0.2)] {
            let ch = FiberChange::torus(spec).unwrap();
            for p in [Preset::Integrable, Preset::Shear { beta: 0.5, w_max: 10.0 }] {
                let ct = CoeffTriple::from_preset(p).unwrap();
                let tr = CoeffTriple::transformed(&ct, &ch).unwrap();
                let rep = tr.spot_check().unwrap();
                assert!(rep.zero_section < 1e-14, "{spec:?} {p:?} {rep:?}");
            }
        }
        // ρ ≡ 2 on the integrable triple: the change does not depend on z, so
        // b' stays zero, while the radial ramp makes c' nonzero there.
        let ch = FiberChange::torus(TorusSpec::Constant(2.0)).unwrap();
        let tr = CoeffTriple::transformed(&CoeffTriple::from_preset(Preset::Integrable).unwrap(), &ch).unwrap();
        let t = tr.eval(C::new(0.5, 0.0), C::new(4.0, 1.0)).unwrap();
        assert_eq!(t.b, C::new(0.0, 0.0));
        assert!(t.c.norm() > 1e-3);
        let t = tr.eval(C::new(0.5, 0.0), C::new(0.5, 0.0)).unwrap();
        assert!(t.c.norm() < 1e-15);
    }

    #[test]
    fn third_vanishing_claim_holds_when_its_hypotheses_do() {
        // w'_w̄(z, 0) = 0 for the torus rescaling (it is w·s̄(z) near 0), and
        // c(z, 0) = 0 fails for the anisotropic preset but holds for shear.
        let ch = FiberChange::torus(TorusSpec::TwistedRipple(0.25)).unwrap();
        let ct = CoeffTriple::from_preset(Preset::Shear { beta: 0.7, w_max: 10.0 }).unwrap();
        for (z, _) in verification_lattice::<f64>().into_iter().step_by(80) {
            let t = transform_coords(&ct, &ch, z, C::new(0.0, 0.0)).unwrap();
            assert!(t.c.norm() < 1e-14);
        }
    }

    fn sample_changes() -> &'static [FiberChange<f64>] {
        static CHANGES: std::sync::OnceLock<Vec<FiberChange<f64>>> = std::sync::OnceLock::new();
        CHANGES.get_or_init(|| {
            [TorusSpec::TwistedRipple(0.4), TorusSpec::TwistedRipple(-0.15), TorusSpec::CosineRipple(0.3), TorusSpec::Constant(1.7)]
                .into_iter()
                .map(|s| FiberChange::torus(s).unwrap())
                .collect()
        })
    }

    proptest! {
        #[test]
        fn a_is_invariant(zr in 0.0..1.0f64, za in 0.0..6.3f64, wr in 0.0..5.0f64, wa in 0.0..6.3f64, idx in 0..4usize) {
            let ch = &sample_changes()[idx];
            let ct = aniso();
            let z = C::from_polar(zr, za);
            let wp = C::from_polar(wr, wa);
            let t = transform_coords(&ct, ch, z, wp).unwrap();
            let w = ch.inverse(z, wp);
            prop_assert_eq!(t.a, ct.eval(z, w).unwrap().a);
        }
    }
}
