//! Polar sample grid on the closed unit disc.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quadrature::{barycentric_weights, differentiation_matrix, gauss_legendre_on};
use crate::scalar::Real;

pub const MIN_RADIAL: usize = 8;
pub const MIN_ANGULAR: usize = 16;

/// Gauss–Legendre radii in `(0, 1)` plus a boundary ring at `r = 1`, with a
/// uniform angular partition whose first node sits at argument zero.
///
/// Node `(j, k)` is `radii[j] * exp(i * angles[k])`; ring `n_r` is the boundary.
pub struct DiscGrid<T: Real> {
    n_r: usize,
    n_theta: usize,
    radii: Vec<T>,
    angles: Vec<T>,
    points: Vec<Complex<T>>,
    area_weights: Vec<T>,
    radii_f64: Vec<f64>,
    bary_f64: Vec<f64>,
    diff: Vec<T>,
    fft: Arc<dyn Fft<T>>,
    ifft: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for DiscGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscGrid").field("n_r", &self.n_r).field("n_theta", &self.n_theta).finish()
    }
}

/// Builds the grid; `n_r` interior Gauss–Legendre rings plus the boundary ring.
pub fn make_grid<T: Real>(n_r: usize, n_theta: usize) -> Result<Arc<DiscGrid<T>>> {
    DiscGrid::new(n_r, n_theta).map(Arc::new)
}

impl<T: Real> DiscGrid<T> {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < MIN_RADIAL {
            return Err(Error::InvalidGrid(format!("n_r = {n_r} is below the minimum {MIN_RADIAL}")));
        }
        if n_theta < MIN_ANGULAR {
            return Err(Error::InvalidGrid(format!("n_theta = {n_theta} is below the minimum {MIN_ANGULAR}")));
        }
        if !n_theta.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n_theta = {n_theta} is not a power of two")));
        }

        let (nodes, weights) = gauss_legendre_on(n_r, 0.0, 1.0);
        let mut radii_f64 = nodes.clone();
        radii_f64.push(1.0);
        let bary_f64 = barycentric_weights(&radii_f64);
        let diff = differentiation_matrix(&radii_f64, &bary_f64).into_iter().map(T::lit).collect();

        let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
        let angles_f64: Vec<f64> = (0..n_theta).map(|k| dtheta * k as f64).collect();

        let mut points = Vec::with_capacity((n_r + 1) * n_theta);
        for &r in &radii_f64 {
            for (k, &a) in angles_f64.iter().enumerate() {
                // Exact values at the quarter turns keep z = 1, i, -1, -i on the nodes.
                let (s, c) = match (4 * k) % n_theta {
                    0 => exact_quarter(4 * k / n_theta),
                    _ => a.sin_cos(),
                };
                points.push(Complex::new(T::lit(r * c), T::lit(r * s)));
            }
        }

        let mut area_weights: Vec<T> =
            nodes.iter().zip(&weights).map(|(r, w)| T::lit(w * r * dtheta)).collect();
        area_weights.push(T::zero());

        let mut planner = FftPlanner::new();
        Ok(Self {
            n_r,
            n_theta,
            radii: radii_f64.iter().map(|&r| T::lit(r)).collect(),
            angles: angles_f64.iter().map(|&a| T::lit(a)).collect(),
            points,
            area_weights,
            radii_f64,
            bary_f64,
            diff,
            fft: planner.plan_fft_forward(n_theta),
            ifft: planner.plan_fft_inverse(n_theta),
        })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    /// Number of rings including the boundary ring.
    pub fn n_rings(&self) -> usize {
        self.n_r + 1
    }

    pub fn len(&self) -> usize {
        self.n_rings() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn index(&self, ring: usize, angle: usize) -> usize {
        ring * self.n_theta + angle
    }

    pub fn boundary_ring(&self) -> usize {
        self.n_r
    }

    /// Flat index of the boundary node `z = 1`.
    pub fn one_index(&self) -> usize {
        self.index(self.n_r, 0)
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        idx / self.n_theta == self.n_r
    }

    /// Weight of one node in the area quadrature of `r dr dθ`.
    pub fn area_weight(&self, idx: usize) -> T {
        self.area_weights[idx / self.n_theta]
    }

    pub(crate) fn ring_weights(&self) -> &[T] {
        &self.area_weights
    }

    pub(crate) fn radii_f64(&self) -> &[f64] {
        &self.radii_f64
    }

    pub(crate) fn bary_f64(&self) -> &[f64] {
        &self.bary_f64
    }

    pub(crate) fn diff_matrix(&self) -> &[T] {
        &self.diff
    }

    /// Largest angular mode `|k|` the operators act on; higher modes are dropped.
    pub fn band(&self) -> usize {
        self.n_theta / 2 - 2
    }

    pub(crate) fn forward_fft(&self, buf: &mut [Complex<T>]) {
        self.fft.process(buf);
    }

    pub(crate) fn inverse_fft(&self, buf: &mut [Complex<T>]) {
        self.ifft.process(buf);
    }

    pub fn same_shape(&self, other: &DiscGrid<T>) -> bool {
        self.n_r == other.n_r && self.n_theta == other.n_theta
    }
}

fn exact_quarter(q: usize) -> (f64, f64) {
    match q {
        0 => (0.0, 1.0),
        1 => (1.0, 0.0),
        2 => (0.0, -1.0),
        _ => (-1.0, 0.0),
    }
}

/// Signed angular mode stored in FFT bin `b`.
pub(crate) fn mode_of_bin(b: usize, n: usize) -> isize {
    if b < n / 2 {
        b as isize
    } else {
        b as isize - n as isize
    }
}

pub(crate) fn bin_of_mode(k: isize, n: usize) -> usize {
    k.rem_euclid(n as isize) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_has_uniform_angles() {
        let g = DiscGrid::<f64>::new(8, 16).unwrap();
        assert_eq!(g.angles().len(), 16);
        assert_eq!(g.angles()[4], std::f64::consts::FRAC_PI_2);
        for (k, a) in g.angles().iter().enumerate() {
            assert_eq!(*a, 2.0 * std::f64::consts::PI * k as f64 / 16.0);
        }
    }

    #[test]
    fn last_radius_is_one_and_radii_increase() {
        let g = DiscGrid::<f64>::new(64, 128).unwrap();
        assert_eq!(*g.radii().last().unwrap(), 1.0);
        assert!(g.radii().windows(2).all(|w| w[0] < w[1]));
        assert!(g.radii()[0] > 0.0);
        assert_eq!(g.points()[g.one_index()], Complex::new(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(DiscGrid::<f64>::new(8, 17), Err(Error::InvalidGrid(_))));
        assert!(DiscGrid::<f64>::new(7, 16).is_err());
        assert!(DiscGrid::<f64>::new(8, 8).is_err());
    }

    #[test]
    fn area_weights_sum_to_pi() {
        let g = DiscGrid::<f64>::new(16, 32).unwrap();
        let total: f64 = (0..g.len()).map(|i| g.area_weight(i)).sum();
        assert!((total - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn mode_bins_roundtrip() {
        for b in 0..32 {
            assert_eq!(bin_of_mode(mode_of_bin(b, 32), 32), b);
        }
        assert_eq!(mode_of_bin(16, 32), -16);
    }
}
