//! Complex-valued samples on a [`DiscGrid`], norms, boundary traces and
//! spectral Wirtinger derivatives.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{bin_of_mode, mode_of_bin, DiscGrid};
use crate::scalar::{is_finite, Real};

/// Immutable complex samples, one per grid node, ring-major.
#[derive(Clone, Debug)]
pub struct ComplexField<T: Real> {
    grid: Arc<DiscGrid<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn from_values(grid: &Arc<DiscGrid<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Self::checked(grid.clone(), values, "field construction")
    }

    pub(crate) fn checked(grid: Arc<DiscGrid<T>>, values: Vec<Complex<T>>, op: &'static str) -> Result<Self> {
        if values.iter().all(|v| is_finite(*v)) {
            Ok(Self { grid, values })
        } else {
            Err(Error::NonFinite(op))
        }
    }

    pub fn zeros(grid: &Arc<DiscGrid<T>>) -> Self {
        Self::constant(grid, Complex::new(T::zero(), T::zero()))
    }

    pub fn constant(grid: &Arc<DiscGrid<T>>, value: Complex<T>) -> Self {
        Self { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    /// Samples `f(z)` at every node.
    pub fn from_fn(grid: &Arc<DiscGrid<T>>, f: impl Fn(Complex<T>) -> Complex<T>) -> Result<Self> {
        let values = grid.points().iter().map(|&z| f(z)).collect();
        Self::checked(grid.clone(), values, "field sampling")
    }

    pub fn grid(&self) -> &Arc<DiscGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn at(&self, ring: usize, angle: usize) -> Complex<T> {
        self.values[self.grid.index(ring, angle)]
    }

    /// Value at the boundary node `z = 1`.
    pub fn value_at_one(&self) -> Complex<T> {
        self.values[self.grid.one_index()]
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.grid.same_shape(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.grid.n_r(), self.grid.n_theta(), other.grid.n_r(), other.grid.n_theta()))
        }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Result<Self> {
        Self::checked(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect(), "field map")
    }

    /// Nodewise map that also sees the node coordinate.
    pub fn map_with_point(&self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        let values = self.grid.points().iter().zip(&self.values).map(|(&z, &v)| f(z, v)).collect();
        Self::checked(self.grid.clone(), values, "field map")
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        self.compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::checked(self.grid.clone(), values, "field combination")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: Complex<T>) -> Result<Self> {
        self.map(|v| v * s)
    }

    pub fn add_constant(&self, s: Complex<T>) -> Result<Self> {
        self.map(|v| v + s)
    }

    pub fn conj(&self) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    /// Discrete L² norm from the Gauss–Legendre × trapezoid area rule.
    pub fn l2_norm(&self) -> T {
        let w = self.grid.ring_weights();
        let n = self.grid.n_theta();
        let mut acc = T::zero();
        for (j, ring) in self.values.chunks(n).enumerate() {
            let s = ring.iter().fold(T::zero(), |s, v| s + v.norm_sqr());
            acc = acc + w[j] * s;
        }
        acc.sqrt()
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.l2_norm())
    }

    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.sup_norm())
    }

    /// Values on the `r = 1` ring in angle order, starting at `z = 1`.
    pub fn boundary_trace(&self) -> Vec<Complex<T>> {
        let n = self.grid.n_theta();
        let start = self.grid.boundary_ring() * n;
        self.values[start..start + n].to_vec()
    }

    /// Random polynomial `Σ c_mn z^m z̄^n` with `m + n <= degree`, rescaled to
    /// sup norm `sup` on the grid. Used to build test problems.
    pub fn random_smooth(grid: &Arc<DiscGrid<T>>, rng: &mut impl rand::Rng, degree: usize, sup: T) -> Result<Self> {
        let mut terms = Vec::new();
        for m in 0..=degree {
            for n in 0..=degree - m {
                let c = Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)));
                terms.push((m as i32, n as i32, c));
            }
        }
        let raw = Self::from_fn(grid, |z| {
            terms.iter().fold(Complex::new(T::zero(), T::zero()), |s, &(m, n, c)| s + c * z.powi(m) * z.conj().powi(n))
        })?;
        let peak = raw.sup_norm();
        if peak == T::zero() {
            return Ok(raw);
        }
        raw.scale(Complex::new(sup / peak, T::zero()))
    }

    /// Largest modulus over the boundary ring.
    pub fn boundary_max(&self) -> T {
        self.boundary_trace().iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn min_modulus(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, v| m.min(v.norm()))
    }

    /// Angular Fourier coefficients per ring, FFT bin order, normalized so that
    /// `f(r, θ) = Σ_k c_k(r) e^{ikθ}`.
    pub(crate) fn to_modes(&self) -> Vec<Complex<T>> {
        let n = self.grid.n_theta();
        let scale = T::one() / T::from_usize(n).unwrap();
        let mut buf = self.values.clone();
        for ring in buf.chunks_mut(n) {
            self.grid.forward_fft(ring);
            ring.iter_mut().for_each(|v| *v = *v * scale);
        }
        buf
    }

    pub(crate) fn from_modes(grid: &Arc<DiscGrid<T>>, mut modes: Vec<Complex<T>>, op: &'static str) -> Result<Self> {
        let n = grid.n_theta();
        for ring in modes.chunks_mut(n) {
            grid.inverse_fft(ring);
        }
        Self::checked(grid.clone(), modes, op)
    }
}

/// Returns `(∂f/∂z, ∂f/∂z̄)`.
///
/// Angular modes `|k| <= n_theta/2 - 2` are differentiated exactly through the
/// FFT; the radial factor uses the barycentric differentiation matrix on the
/// ring radii, so `z^m z̄^n` is reproduced exactly while `m + n <= n_r`.
pub fn wirtinger_derivatives<T: Real>(f: &ComplexField<T>) -> Result<(ComplexField<T>, ComplexField<T>)> {
    let grid = f.grid();
    let n = grid.n_theta();
    let rings = grid.n_rings();
    let band = grid.band() as isize;
    let modes = f.to_modes();
    let d = grid.diff_matrix();
    let radii = grid.radii();
    let half = T::lit(0.5);
    let zero = Complex::new(T::zero(), T::zero());

    let mut dz = vec![zero; modes.len()];
    let mut dzb = vec![zero; modes.len()];
    let mut profile = vec![zero; rings];
    for b in 0..n {
        let k = mode_of_bin(b, n);
        if k.abs() > band {
            continue;
        }
        for j in 0..rings {
            profile[j] = modes[j * n + b];
        }
        let kt = T::from_isize(k).unwrap();
        let bz = bin_of_mode(k - 1, n);
        let bzb = bin_of_mode(k + 1, n);
        for j in 0..rings {
            let row = &d[j * rings..(j + 1) * rings];
            let dr = row.iter().zip(&profile).fold(zero, |s, (&w, &p)| s + p * w);
            let ang = profile[j] * (kt / radii[j]);
            dz[j * n + bz] = (dr + ang) * half;
            dzb[j * n + bzb] = (dr - ang) * half;
        }
    }
    Ok((
        ComplexField::from_modes(grid, dz, "wirtinger ∂z")?,
        ComplexField::from_modes(grid, dzb, "wirtinger ∂z̄")?,
    ))
}
