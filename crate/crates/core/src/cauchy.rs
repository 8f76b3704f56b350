//! Cauchy–Green operator `T`, its boundary-normalized modification `T₁`, and
//! `S₁ = ∂_z T₁`.
//!
//! With `Tu(z) = (1/π) ∫_𝔻 u(ζ) / (z − ζ) dA(ζ)` and `u = Σ_k u_k(ρ) e^{ikφ}`,
//! the angular integral collapses each mode onto one output mode:
//!
//! ```text
//! (Tu)_{k-1}(r) =  2 ∫_0^r u_k(ρ) (ρ/r)^{1-k} dρ      k <= 0
//! (Tu)_{k-1}(r) = -2 ∫_r^1 u_k(ρ) (r/ρ)^{k-1} dρ      k >= 1
//! ```
//!
//! Both kernels are bounded by one. Interpolating `u_k` on the ring radii turns
//! each mode into a dense real matrix, precomputed once per grid. Outside the
//! disc only the `k <= 0` modes survive, `Tu(z) = Σ 2 c_k z^{k-1}` with
//! `2 c_k = (Tu)_{k-1}(1)`, which gives the reflected term of `T₁` in closed
//! form. Differentiating the mode formulas gives
//! `(∂_z Tu)_{k-2}(r) = u_k(r) + (k-1)/r · (Tu)_{k-1}(r)`.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::{bin_of_mode, DiscGrid};
use crate::quadrature::{gauss_legendre_on, lagrange_row};
use crate::scalar::{is_finite, Real};

/// Per-mode radial kernels for one grid.
pub struct OperatorWorkspace<T: Real> {
    grid: Arc<DiscGrid<T>>,
    band: usize,
    kernels: Vec<T>,
    // powers[m * rings + j] = r_j^m for m in 0..=band + 1
    powers: Vec<T>,
}

impl<T: Real> std::fmt::Debug for OperatorWorkspace<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorWorkspace").field("grid", &self.grid).field("band", &self.band).finish()
    }
}

/// Output of one combined application: `T₁u` and `S₁u`.
#[derive(Clone, Debug)]
pub struct T1S1<T: Real> {
    pub t1: ComplexField<T>,
    pub s1: ComplexField<T>,
}

impl<T: Real> OperatorWorkspace<T> {
    pub fn new(grid: &Arc<DiscGrid<T>>) -> Self {
        let band = grid.band();
        let rings = grid.n_rings();
        let radii = grid.radii_f64();
        let bary = grid.bary_f64();
        let n_modes = 2 * band + 1;

        let rows: Vec<Vec<f64>> =
            (0..rings).into_par_iter().map(|j| kernel_rows(radii, bary, j, band, grid.n_r())).collect();

        let mut kernels = vec![T::zero(); n_modes * rings * rings];
        for (j, row) in rows.iter().enumerate() {
            for m in 0..n_modes {
                let dst = (m * rings + j) * rings;
                for i in 0..rings {
                    kernels[dst + i] = T::lit(row[m * rings + i]);
                }
            }
        }

        let mut powers = vec![T::zero(); (band + 2) * rings];
        for m in 0..band + 2 {
            for (j, r) in radii.iter().enumerate() {
                powers[m * rings + j] = T::lit(r.powi(m as i32));
            }
        }
        Self { grid: grid.clone(), band, kernels, powers }
    }

    pub fn grid(&self) -> &Arc<DiscGrid<T>> {
        &self.grid
    }

    fn check(&self, u: &ComplexField<T>) -> Result<()> {
        if !self.grid.same_shape(u.grid()) {
            return Err(Error::GridMismatch(
                self.grid.n_r(),
                self.grid.n_theta(),
                u.grid().n_r(),
                u.grid().n_theta(),
            ));
        }
        if u.values().iter().all(|v| is_finite(*v)) {
            Ok(())
        } else {
            Err(Error::NonFinite("operator input"))
        }
    }

    fn kernel(&self, k: isize, j: usize) -> &[T] {
        let rings = self.grid.n_rings();
        let m = (k + self.band as isize) as usize;
        let start = (m * rings + j) * rings;
        &self.kernels[start..start + rings]
    }

    fn power(&self, m: usize, j: usize) -> T {
        self.powers[m * self.grid.n_rings() + j]
    }

    /// Mode-space pass shared by all three operators. Returns the mode arrays
    /// of `Tu`, of the reflected term `conj(Tu(1/z̄))`, and, when requested, of
    /// `∂_z Tu` and of the derivative of the reflected term.
    fn modes(&self, u: &ComplexField<T>, with_derivative: bool) -> ModeOutput<T> {
        let n = self.grid.n_theta();
        let rings = self.grid.n_rings();
        let radii = self.grid.radii();
        let zero = Complex::new(T::zero(), T::zero());
        let input = u.to_modes();
        let mut out = ModeOutput {
            t: vec![zero; input.len()],
            reflected: vec![zero; input.len()],
            s: if with_derivative { vec![zero; input.len()] } else { Vec::new() },
            s_reflected: if with_derivative { vec![zero; input.len()] } else { Vec::new() },
        };
        let band = self.band as isize;
        let mut profile = vec![zero; rings];
        let mut image = vec![zero; rings];
        for k in -band..=band {
            let b = bin_of_mode(k, n);
            for j in 0..rings {
                profile[j] = input[j * n + b];
            }
            if profile.iter().all(|p| p.re == T::zero() && p.im == T::zero()) {
                continue;
            }
            for j in 0..rings {
                image[j] = self.kernel(k, j).iter().zip(&profile).fold(zero, |s, (&w, &p)| s + p * w);
            }
            let bt = bin_of_mode(k - 1, n);
            for j in 0..rings {
                out.t[j * n + bt] = image[j];
            }
            let km1 = T::from_isize(k - 1).unwrap();
            if with_derivative {
                let bs = bin_of_mode(k - 2, n);
                for j in 0..rings {
                    out.s[j * n + bs] = profile[j] + image[j] * (km1 / radii[j]);
                }
            }
            if k <= 0 {
                // conj(Tu(1/z̄)) = Σ conj((Tu)_{k-1}(1)) z^{1-k}
                let edge = image[rings - 1].conj();
                let m = (1 - k) as usize;
                let br = bin_of_mode(1 - k, n);
                for j in 0..rings {
                    out.reflected[j * n + br] = edge * self.power(m, j);
                }
                if with_derivative {
                    let bsr = bin_of_mode(-k, n);
                    let factor = T::from_usize(m).unwrap();
                    for j in 0..rings {
                        out.s_reflected[j * n + bsr] = edge * (factor * self.power(m - 1, j));
                    }
                }
            }
        }
        out
    }

    /// `Tu` on the closed disc.
    pub fn cauchy_green_t(&self, u: &ComplexField<T>) -> Result<ComplexField<T>> {
        self.check(u)?;
        let out = self.modes(u, false);
        ComplexField::from_modes(&self.grid, out.t, "cauchy-green T")
    }

    /// `Tu` at points outside the closed disc, from the exterior expansion.
    pub fn cauchy_green_t_exterior(&self, u: &ComplexField<T>, points: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check(u)?;
        if points.iter().any(|z| z.norm() <= T::one()) {
            return Err(Error::InvalidArgument("exterior evaluation needs |z| > 1".into()));
        }
        let out = self.modes(u, false);
        let n = self.grid.n_theta();
        let edge = self.grid.boundary_ring() * n;
        let band = self.band as isize;
        Ok(points
            .iter()
            .map(|&z| {
                (-band..=0).fold(Complex::new(T::zero(), T::zero()), |s, k| {
                    s + out.t[edge + bin_of_mode(k - 1, n)] * z.powi((k - 1) as i32)
                })
            })
            .collect())
    }

    /// `T₁u = Tu − conj(Tu(1/z̄)) − 2i·Im Tu(1)`: solves `∂_z̄ v = u`,
    /// `Re v = 0` on the boundary, `v(1) = 0`.
    pub fn modified_t1(&self, u: &ComplexField<T>) -> Result<ComplexField<T>> {
        self.check(u)?;
        let out = self.modes(u, false);
        self.assemble_t1(out.t, out.reflected)
    }

    /// `S₁u = ∂_z T₁u`, from the differentiated mode formulas.
    pub fn ahlfors_s1(&self, u: &ComplexField<T>) -> Result<ComplexField<T>> {
        self.check(u)?;
        let out = self.modes(u, true);
        self.assemble_s1(out.s, out.s_reflected)
    }

    /// `T₁u` and `S₁u` from a single mode pass.
    pub fn apply(&self, u: &ComplexField<T>) -> Result<T1S1<T>> {
        self.check(u)?;
        let out = self.modes(u, true);
        Ok(T1S1 { t1: self.assemble_t1(out.t, out.reflected)?, s1: self.assemble_s1(out.s, out.s_reflected)? })
    }

    fn assemble_t1(&self, t: Vec<Complex<T>>, reflected: Vec<Complex<T>>) -> Result<ComplexField<T>> {
        let diff: Vec<Complex<T>> = t.iter().zip(&reflected).map(|(a, b)| *a - *b).collect();
        let mut values = ComplexField::from_modes(&self.grid, diff, "modified T1")?.into_values();
        let n = self.grid.n_theta();
        let edge = self.grid.boundary_ring() * n;
        // Re v vanishes on the boundary identically; drop the rounding residue.
        for v in &mut values[edge..edge + n] {
            v.re = T::zero();
        }
        let shift = values[self.grid.one_index()].im;
        for v in &mut values {
            v.im = v.im - shift;
        }
        ComplexField::checked(self.grid.clone(), values, "modified T1")
    }

    fn assemble_s1(&self, s: Vec<Complex<T>>, s_reflected: Vec<Complex<T>>) -> Result<ComplexField<T>> {
        let diff: Vec<Complex<T>> = s.iter().zip(&s_reflected).map(|(a, b)| *a - *b).collect();
        ComplexField::from_modes(&self.grid, diff, "ahlfors S1")
    }
}

struct ModeOutput<T: Real> {
    t: Vec<Complex<T>>,
    reflected: Vec<Complex<T>>,
    s: Vec<Complex<T>>,
    s_reflected: Vec<Complex<T>>,
}

/// Kernel rows for output radius index `j`, all modes, laid out `[mode][i]`.
fn kernel_rows(radii: &[f64], bary: &[f64], j: usize, band: usize, n_r: usize) -> Vec<f64> {
    let rings = radii.len();
    let n_modes = 2 * band + 1;
    let r = radii[j];
    let mut acc = vec![0.0; n_modes * rings];
    let mut basis = vec![0.0; rings];
    let slot = |k: isize| (k + band as isize) as usize;

    // k <= 0: 2 ∫_0^r ℓ_i(ρ) (ρ/r)^{1-k} dρ, a polynomial integrand.
    let (xs, ws) = gauss_legendre_on((n_r + band) / 2 + 8, 0.0, r);
    for (&x, &w) in xs.iter().zip(&ws) {
        lagrange_row(radii, bary, x, &mut basis);
        let y = x / r;
        let mut p = y;
        for m in 1..=band + 1 {
            let k = 1 - m as isize;
            if k < -(band as isize) {
                break;
            }
            let coef = 2.0 * w * p;
            let row = &mut acc[slot(k) * rings..(slot(k) + 1) * rings];
            row.iter_mut().zip(&basis).for_each(|(a, b)| *a += coef * b);
            p *= y;
        }
    }

    // k >= 1: -2 ∫_r^1 ℓ_i(ρ) (r/ρ)^{k-1} dρ on geometrically graded panels.
    let pts = n_r / 2 + 24;
    let mut a = r;
    while a < 1.0 {
        let b = (2.0 * a).min(1.0);
        let (xs, ws) = gauss_legendre_on(pts, a, b);
        for (&x, &w) in xs.iter().zip(&ws) {
            lagrange_row(radii, bary, x, &mut basis);
            let y = r / x;
            let mut p = 1.0;
            for k in 1..=band as isize {
                let coef = -2.0 * w * p;
                let row = &mut acc[slot(k) * rings..(slot(k) + 1) * rings];
                row.iter_mut().zip(&basis).for_each(|(a, b)| *a += coef * b);
                p *= y;
            }
        }
        a = b;
    }
    acc
}
