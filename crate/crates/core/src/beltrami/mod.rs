//! Linear Beltrami-type problems on the disc with `Re w = 0` on the circle.
//!
//! Every solver works on the density `g = w_z̄`: the solution is
//! `w = pin + T₁g`, so `w_z = S₁g` and the boundary condition and the pin
//! hold for every iterate, and the equation becomes a fixed point in `g`.

mod picard;

pub(crate) use picard::{contraction_factor, iterate};

use num_complex::Complex;

use crate::cauchy::OperatorWorkspace;
use crate::error::{Error, Result};
use crate::field::{wirtinger_derivatives, ComplexField};
use crate::scalar::Real;

/// Residual gate above which an input field is not accepted as a solution.
pub const SOLUTION_GATE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearConfig {
    /// Stop when the step is below `tol · (1 + ‖Q‖)`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Relaxation factor in `(0, 1]`; 1 is plain Picard.
    pub damping: f64,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self { tol: 1e-12, max_iterations: 500, damping: 1.0 }
    }
}

/// `w_z̄ = q₁ w_z + q₂ conj(w_z) + Q₁ w + Q₂ w̄`.
#[derive(Clone, Debug)]
pub struct LinearProblem<T: Real> {
    pub q1: ComplexField<T>,
    pub q2: ComplexField<T>,
    pub big_q1: ComplexField<T>,
    pub big_q2: ComplexField<T>,
    q0: T,
    big_q0: T,
}

impl<T: Real> LinearProblem<T> {
    pub fn new(
        q1: ComplexField<T>,
        q2: ComplexField<T>,
        big_q1: ComplexField<T>,
        big_q2: ComplexField<T>,
    ) -> Result<Self> {
        let q0 = sup_of_sum(&q1, &q2)?;
        if !(q0 < T::one()) {
            return Err(Error::BoundViolation(format!("sup |q1| + |q2| = {q0} is not below 1")));
        }
        let big_q0 = sup_of_sum(&big_q1, &big_q2)?;
        Ok(Self { q1, q2, big_q1, big_q2, q0, big_q0 })
    }

    /// `sup |q₁| + |q₂|`.
    pub fn q0(&self) -> T {
        self.q0
    }

    /// `sup |Q₁| + |Q₂|`.
    pub fn big_q0(&self) -> T {
        self.big_q0
    }

    /// L² defect of the equation at `w`.
    pub fn residual(&self, w: &ComplexField<T>) -> Result<T> {
        let (wz, wzb) = wirtinger_derivatives(w)?;
        let vals: Vec<Complex<T>> = (0..w.values().len())
            .map(|i| {
                let (z, zb) = (wz.values()[i], wzb.values()[i]);
                let x = w.values()[i];
                zb - self.q1.values()[i] * z
                    - self.q2.values()[i] * z.conj()
                    - self.big_q1.values()[i] * x
                    - self.big_q2.values()[i] * x.conj()
            })
            .collect();
        Ok(ComplexField::from_values(w.grid(), vals)?.l2_norm())
    }
}

fn sup_of_sum<T: Real>(a: &ComplexField<T>, b: &ComplexField<T>) -> Result<T> {
    Ok(a.zip_with(b, |x, y| Complex::new(x.norm() + y.norm(), T::zero()))?.sup_norm())
}

/// A linear solve with its convergence record.
#[derive(Clone, Debug)]
pub struct LinearSolution<T: Real> {
    pub w: ComplexField<T>,
    /// `w_z̄` as carried by the iteration.
    pub density: ComplexField<T>,
    pub iterations: usize,
    pub steps: Vec<f64>,
    /// Geometric mean ratio of successive steps.
    pub contraction: f64,
    /// L² defect of the equation, from numerical derivatives of `w`.
    pub residual: f64,
}

/// Solves `v_z̄ = q v_z + Q` with `Re v = 0` on the circle and `v(1) = 0`.
pub fn solve_linear_rh<T: Real>(
    ws: &OperatorWorkspace<T>,
    q: &ComplexField<T>,
    big_q: &ComplexField<T>,
    cfg: &LinearConfig,
) -> Result<LinearSolution<T>> {
    let grid = ws.grid();
    if !grid.same_shape(q.grid()) || !grid.same_shape(big_q.grid()) {
        return Err(mismatch(grid, q.grid()));
    }
    let q0 = q.sup_norm();
    if !(q0 < T::one()) {
        return Err(Error::BoundViolation(format!("sup |q| = {q0} is not below 1")));
    }
    let threshold = cfg.tol * (1.0 + big_q.l2_norm().to_f64_lossy());
    let run = iterate(big_q.clone(), cfg.max_iterations, cfg.damping, |_| threshold, |u| {
        let s1 = ws.ahlfors_s1(u)?;
        q.mul(&s1)?.add(big_q)
    })?;
    let v = ws.modified_t1(&run.g)?;
    let (vz, vzb) = wirtinger_derivatives(&v)?;
    let defect = vzb.sub(&q.mul(&vz)?)?.sub(big_q)?;
    Ok(LinearSolution {
        contraction: contraction_factor(&run.steps),
        residual: defect.l2_norm().to_f64_lossy(),
        w: v,
        density: run.g,
        iterations: run.iterations,
        steps: run.steps,
    })
}

/// Solves the full linear equation with `Re w = 0` on the circle and
/// `w(1) = pin`, `pin` purely imaginary.
pub fn solve_linear_full<T: Real>(
    ws: &OperatorWorkspace<T>,
    lp: &LinearProblem<T>,
    pin: Complex<T>,
    cfg: &LinearConfig,
) -> Result<LinearSolution<T>> {
    let grid = ws.grid();
    for f in [&lp.q1, &lp.q2, &lp.big_q1, &lp.big_q2] {
        if !grid.same_shape(f.grid()) {
            return Err(mismatch(grid, f.grid()));
        }
    }
    if pin.re != T::zero() {
        return Err(Error::InvalidArgument(format!("pin {pin} is not purely imaginary")));
    }
    let scale = 1.0 + (lp.big_q1.l2_norm() + lp.big_q2.l2_norm()).to_f64_lossy() * (1.0 + pin.norm().to_f64_lossy());
    let threshold = cfg.tol * scale;
    let rhs = |g: &ComplexField<T>| -> Result<ComplexField<T>> {
        let ts = ws.apply(g)?;
        let w = ts.t1.add_constant(pin)?;
        let vals = (0..w.values().len())
            .map(|i| {
                let (x, xz) = (w.values()[i], ts.s1.values()[i]);
                lp.q1.values()[i] * xz
                    + lp.q2.values()[i] * xz.conj()
                    + lp.big_q1.values()[i] * x
                    + lp.big_q2.values()[i] * x.conj()
            })
            .collect();
        ComplexField::from_values(grid, vals)
    };
    let run = iterate(ComplexField::zeros(grid), cfg.max_iterations, cfg.damping, |_| threshold, rhs)?;
    let w = ws.modified_t1(&run.g)?.add_constant(pin)?;
    Ok(LinearSolution {
        contraction: contraction_factor(&run.steps),
        residual: lp.residual(&w)?.to_f64_lossy(),
        w,
        density: run.g,
        iterations: run.iterations,
        steps: run.steps,
    })
}

fn mismatch<T: Real>(a: &crate::grid::DiscGrid<T>, b: &crate::grid::DiscGrid<T>) -> Error {
    Error::GridMismatch(a.n_r(), a.n_theta(), b.n_r(), b.n_theta())
}

/// `w = h·e^v` with `v_z̄ = q v_z + Q`, `Im v = 0` on the circle, `v(1) = 0`.
#[derive(Clone, Debug)]
pub struct SimilarityCertificate<T: Real> {
    pub v: ComplexField<T>,
    pub h: ComplexField<T>,
    /// L² defect of `w_z̄ = q w_z + Q w` at the input.
    pub input_residual: f64,
    /// L² defect of `h_z̄ = q h_z`.
    pub residual: f64,
}

impl<T: Real> SimilarityCertificate<T> {
    /// `e^{max Re v − min_{circle} Re v}`: bounds `max |w| / max_{circle} |w|`
    /// because `|h|` obeys the maximum principle.
    pub fn max_principle_bound(&self) -> f64 {
        let re_max = self.v.values().iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.re.to_f64_lossy()));
        let re_min_b = self.v.boundary_trace().iter().fold(f64::INFINITY, |m, v| m.min(v.re.to_f64_lossy()));
        (re_max - re_min_b).exp()
    }

    /// `max |w| ≤ max |h| · e^{max |v|}`, checked on the grid.
    pub fn modulus_consistent(&self) -> bool {
        let bound = self.h.sup_norm().to_f64_lossy() * self.v.sup_norm().to_f64_lossy().exp();
        let w_max = self.h.zip_with(&self.v, |h, v| h * v.exp()).map(|w| w.sup_norm().to_f64_lossy()).unwrap_or(f64::NAN);
        w_max <= bound * (1.0 + 1e-12)
    }
}

/// Splits a solution of `w_z̄ = q w_z + Q w` into `h·e^v` with `h`
/// quasi-holomorphic.
pub fn similarity_decompose<T: Real>(
    ws: &OperatorWorkspace<T>,
    w: &ComplexField<T>,
    q: &ComplexField<T>,
    big_q: &ComplexField<T>,
    cfg: &LinearConfig,
) -> Result<SimilarityCertificate<T>> {
    let (wz, wzb) = wirtinger_derivatives(w)?;
    let input_residual = wzb.sub(&q.mul(&wz)?)?.sub(&big_q.mul(w)?)?.l2_norm().to_f64_lossy();
    if !(input_residual <= SOLUTION_GATE) {
        return Err(Error::NotASolution(input_residual));
    }
    // y = i·v solves y_z̄ = q y_z + iQ with Re y = 0 on the circle.
    let i = Complex::new(T::zero(), T::one());
    let y = solve_linear_rh(ws, q, &big_q.scale(i)?, cfg)?;
    let v = y.w.scale(-i)?;
    let h = w.zip_with(&v, |x, e| x * (-e).exp())?;
    let (hz, hzb) = wirtinger_derivatives(&h)?;
    let residual = hzb.sub(&q.mul(&hz)?)?.l2_norm().to_f64_lossy();
    Ok(SimilarityCertificate { v, h, input_residual, residual })
}

/// `max |w| / max_{circle} |w|`.
pub fn measure_max_principle<T: Real>(w: &ComplexField<T>) -> Result<f64> {
    let inner = w.sup_norm().to_f64_lossy();
    let boundary = w.boundary_max().to_f64_lossy();
    if boundary == 0.0 {
        if inner == 0.0 {
            return Ok(1.0);
        }
        return Err(Error::MaxPrincipleViolation);
    }
    Ok(inner / boundary)
}

#[cfg(test)]
mod tests;
