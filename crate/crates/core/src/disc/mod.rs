//! Pseudoholomorphic discs through the exponential substitution `w = eᵘ`.
//!
//! The unknown is the density `g = u_z̄`; `u = ℓ + iτ + T₁g` has
//! `Re u = ℓ` on the circle and `u(1) = ℓ + iτ` for every iterate
//! (`ℓ = 0` for the unit torus, `ℓ = ln r` for the circle of radius `r`).
//! One Picard step evaluates the right-hand side of
//! `u_z̄ = a₂ u_z + c₂ conj(u_z) + b₂` at the current `u`.

use std::f64::consts::TAU;

use num_complex::Complex;
use rayon::prelude::*;

use crate::beltrami::{contraction_factor, iterate, solve_linear_full, LinearConfig, LinearProblem, LinearSolution};
use crate::cauchy::OperatorWorkspace;
use crate::coeffs::{exponential_substitution, GraphCoeffs, Triple};
use crate::error::{Error, Result};
use crate::field::{wirtinger_derivatives, ComplexField};
use crate::jet::Jet;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Gate on the L² defect of the equation.
    pub tol_residual: f64,
    /// Gate on `max |Re u − ℓ|` over the circle and on the pin defect.
    pub tol_boundary: f64,
    /// Picard stops once the step is below `tol_step · (1 + ‖g‖)`.
    pub tol_step: f64,
    pub max_iterations: usize,
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol_residual: 1e-9, tol_boundary: 1e-10, tol_step: 1e-12, max_iterations: 500, damping: 1.0 }
    }
}

impl SolverConfig {
    pub fn linear(&self) -> LinearConfig {
        LinearConfig { tol: self.tol_step, max_iterations: self.max_iterations, damping: self.damping }
    }
}

/// A certified disc `w = eᵘ`.
#[derive(Clone, Debug)]
pub struct DiscSolution<T: Real> {
    /// `τ` reduced to `[0, 2π)`.
    pub tau: f64,
    /// `τ` as requested.
    pub tau_raw: f64,
    /// Boundary level `ℓ`: `|w| = e^ℓ` on the circle.
    pub log_radius: f64,
    pub u: ComplexField<T>,
    pub w: ComplexField<T>,
    /// `u_z̄` as carried by the iteration.
    pub density: ComplexField<T>,
    pub residual: f64,
    pub boundary_defect: f64,
    pub pin_defect: f64,
    pub iterations: usize,
    /// Picard step sizes `‖g_{n+1} − g_n‖`, one per iteration.
    pub steps: Vec<f64>,
    pub contraction: f64,
}

impl<T: Real> DiscSolution<T> {
    /// `max ||w| − e^ℓ|` over the circle.
    pub fn boundary_modulus_defect(&self) -> f64 {
        let r = self.log_radius.exp();
        self.w.boundary_trace().iter().fold(0.0, |m, v| m.max((v.norm().to_f64_lossy() - r).abs()))
    }

    /// Whether the step sizes decrease monotonically from iterate `from` on.
    pub fn monotone_after(&self, from: usize) -> bool {
        let floor = self.steps.first().copied().unwrap_or(0.0) * 1e-11;
        self.steps.windows(2).skip(from).all(|w| w[1] <= w[0] || w[1] <= floor)
    }
}

/// Coefficients `(a₂, b₂, c₂)` at every node for the given `u`.
fn coefficients_at<T: Real>(gc: &GraphCoeffs<T>, u: &ComplexField<T>) -> Result<Vec<Triple<Complex<T>>>> {
    let pts = u.grid().points();
    u.values().par_iter().zip(pts.par_iter()).map(|(&uv, &z)| exponential_substitution(gc, z, uv)).collect()
}

/// Solves for the disc with `u(1) = iτ` and `Re u = 0` on the circle,
/// starting from `u₀ = iτ`.
pub fn solve_disc<T: Real>(
    ws: &OperatorWorkspace<T>,
    gc: &GraphCoeffs<T>,
    tau: f64,
    cfg: &SolverConfig,
) -> Result<DiscSolution<T>> {
    solve_disc_with(ws, gc, tau, 0.0, None, cfg)
}

/// General form: boundary level `log_radius` and an optional initial density
/// (`u₀ = ℓ + iτ + T₁g₀`).
pub fn solve_disc_with<T: Real>(
    ws: &OperatorWorkspace<T>,
    gc: &GraphCoeffs<T>,
    tau: f64,
    log_radius: f64,
    initial: Option<&ComplexField<T>>,
    cfg: &SolverConfig,
) -> Result<DiscSolution<T>> {
    if !tau.is_finite() || !log_radius.is_finite() {
        return Err(Error::InvalidArgument(format!("tau = {tau}, log radius = {log_radius} must be finite")));
    }
    let grid = ws.grid();
    let tau_raw = tau;
    let tau = tau.rem_euclid(TAU);
    let tau = if tau >= TAU { 0.0 } else { tau };
    let base = Complex::new(T::lit(log_radius), T::lit(tau));
    let g0 = match initial {
        Some(g) if !grid.same_shape(g.grid()) => {
            return Err(Error::GridMismatch(grid.n_r(), grid.n_theta(), g.grid().n_r(), g.grid().n_theta()))
        }
        Some(g) => g.clone(),
        None => ComplexField::zeros(grid),
    };
    let tol_step = cfg.tol_step;
    let run = iterate(
        g0,
        cfg.max_iterations,
        cfg.damping,
        |g| tol_step * (1.0 + g.l2_norm().to_f64_lossy()),
        |g| {
            let ts = ws.apply(g)?;
            let u = ts.t1.add_constant(base)?;
            let coeffs = coefficients_at(gc, &u)?;
            let vals = coeffs.iter().zip(ts.s1.values()).map(|(t, &uz)| t.a * uz + t.c * uz.conj() + t.b).collect();
            ComplexField::from_values(grid, vals)
        },
    )?;
    let u = ws.modified_t1(&run.g)?.add_constant(base)?;
    let w = u.map(|x| x.exp())?;
    let residual = disc_residual(&u, gc)?;
    let boundary_defect = u.boundary_trace().iter().fold(0.0, |m: f64, x| m.max((x.re.to_f64_lossy() - log_radius).abs()));
    let pin_defect = (u.value_at_one() - base).norm().to_f64_lossy();
    if !(residual <= cfg.tol_residual && boundary_defect <= cfg.tol_boundary && pin_defect <= cfg.tol_boundary) {
        return Err(Error::NotCertified { tau, residual, boundary: boundary_defect, pin: pin_defect, iterations: run.iterations });
    }
    Ok(DiscSolution {
        tau,
        tau_raw,
        log_radius,
        u,
        w,
        density: run.g,
        residual,
        boundary_defect,
        pin_defect,
        iterations: run.iterations,
        contraction: contraction_factor(&run.steps),
        steps: run.steps,
    })
}

/// L² defect of `u_z̄ = a₂ u_z + c₂ conj(u_z) + b₂`, derivatives taken
/// spectrally from the samples of `u`.
pub fn disc_residual<T: Real>(u: &ComplexField<T>, gc: &GraphCoeffs<T>) -> Result<f64> {
    let (uz, uzb) = wirtinger_derivatives(u)?;
    let coeffs = coefficients_at(gc, u)?;
    let vals = coeffs
        .iter()
        .zip(uz.values().iter().zip(uzb.values()))
        .map(|(t, (&dz, &dzb))| dzb - t.a * dz - t.c * dz.conj() - t.b)
        .collect();
    Ok(ComplexField::from_values(u.grid(), vals)?.l2_norm().to_f64_lossy())
}

/// The linearized problem at a disc: `v_z̄ = a₂ v_z + c₂ conj(v_z) + Q₁ v + Q₂ v̄`
/// with `Q₁ = (a₂)_u u_z + (c₂)_u conj(u_z) + (b₂)_u` and `Q₂` the same with
/// `ū`-derivatives. Derivatives come from jet evaluation of the coefficient
/// formulas.
pub fn linearized_problem<T: Real>(
    ws: &OperatorWorkspace<T>,
    ds: &DiscSolution<T>,
    gc: &GraphCoeffs<T>,
) -> Result<LinearProblem<T>> {
    let grid = ws.grid();
    let uz = ws.ahlfors_s1(&ds.density)?;
    let pts = grid.points();
    let rows: Vec<[Complex<T>; 4]> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let t = exponential_substitution(gc, pts[i], Jet::variable(ds.u.values()[i]))?;
            let d = uz.values()[i];
            let q1 = t.a.d * d + t.c.d * d.conj() + t.b.d;
            let q2 = t.a.db * d + t.c.db * d.conj() + t.b.db;
            Ok([t.a.v, t.c.v, q1, q2])
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| ComplexField::from_values(grid, rows.iter().map(|r| r[k]).collect());
    LinearProblem::new(col(0)?, col(1)?, col(2)?, col(3)?)
}

/// Solves the linearized equation with `Re v = 0` on the circle and
/// `v(1) = i`; `v` is the `τ`-derivative of `u`.
pub fn solve_linearized<T: Real>(
    ws: &OperatorWorkspace<T>,
    ds: &DiscSolution<T>,
    gc: &GraphCoeffs<T>,
    cfg: &LinearConfig,
) -> Result<LinearSolution<T>> {
    let lp = linearized_problem(ws, ds, gc)?;
    solve_linear_full(ws, &lp, Complex::new(T::zero(), T::one()), cfg)
}

#[cfg(test)]
mod tests;
