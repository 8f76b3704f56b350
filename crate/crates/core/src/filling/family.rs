//! One-parameter families of discs and their certificates.

use std::f64::consts::{PI, TAU};

use num_complex::Complex;
use rayon::prelude::*;

use crate::beltrami::{measure_max_principle, LinearConfig};
use crate::cauchy::OperatorWorkspace;
use crate::coeffs::{CoeffTriple, FiberChange, GraphCoeffs};
use crate::disc::{solve_disc_with, solve_linearized, DiscSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::filling::TorusSpec;
use crate::scalar::Real;

/// Torus flattened to the unit circle bundle, with the coefficients seen in
/// the new fiber coordinate.
#[derive(Clone, Debug)]
pub struct NormalizedTorus<T: Real> {
    pub change: FiberChange<T>,
    pub coeffs: CoeffTriple<T>,
    /// `max ||w'| − 1|` over a dense sample of the original torus.
    pub torus_defect: f64,
}

/// Largest accepted distance of the image torus from the unit circle bundle.
pub const TORUS_TOL: f64 = 1e-10;

pub fn normalize_torus<T: Real>(spec: TorusSpec<T>, ct: &CoeffTriple<T>) -> Result<NormalizedTorus<T>> {
    let change = FiberChange::torus(spec)?;
    let mut defect: f64 = 0.0;
    for zk in 0..32 {
        let z = Complex::from_polar(T::one(), T::lit(TAU * zk as f64 / 32.0));
        for k in 0..512 {
            let w = spec.curve_point(z, T::lit(TAU * k as f64 / 512.0));
            defect = defect.max((change.forward(z, w).norm() - T::one()).abs().to_f64_lossy());
        }
    }
    if !(defect <= TORUS_TOL) {
        return Err(Error::Normalization(format!("image torus deviates from |w'| = 1 by {defect:e}")));
    }
    let coeffs = if change.is_identity() { ct.clone() } else { CoeffTriple::transformed(ct, &change)? };
    Ok(NormalizedTorus { change, coeffs, torus_defect: defect })
}

/// `τ_k = 2πk/n`.
pub fn tau_grid(n_tau: usize) -> Vec<f64> {
    (0..n_tau).map(|k| TAU * k as f64 / n_tau as f64).collect()
}

/// Raw outcome of a sweep, one entry per `τ_k`, failures kept.
#[derive(Debug)]
pub struct Sweep<T: Real> {
    pub taus: Vec<f64>,
    pub log_radius: f64,
    pub results: Vec<Result<DiscSolution<T>>>,
}

impl<T: Real> Sweep<T> {
    pub fn failures(&self) -> usize {
        self.results.iter().filter(|r| r.is_err()).count()
    }

    pub fn into_hypersurface(self) -> Result<Hypersurface<T>> {
        let total = self.results.len();
        let failed = self.failures();
        if failed > 0 {
            let first = self.results.iter().find_map(|r| r.as_ref().err()).map(|e| e.to_string()).unwrap_or_default();
            return Err(Error::SweepFailed { failed, total, first });
        }
        let discs = self.results.into_iter().map(|r| r.unwrap()).collect();
        Hypersurface::new(discs, self.log_radius)
    }
}

/// Solves the discs `u(1) = ℓ + iτ_k`, `τ_k = 2πk/n_tau`, in parallel; the
/// result order follows `k`.
pub fn sweep<T: Real>(
    ws: &OperatorWorkspace<T>,
    gc: &GraphCoeffs<T>,
    n_tau: usize,
    log_radius: f64,
    cfg: &SolverConfig,
) -> Result<Sweep<T>> {
    if n_tau == 0 {
        return Err(Error::InvalidArgument("n_tau must be at least 1".into()));
    }
    let taus = tau_grid(n_tau);
    let results = taus.par_iter().map(|&tau| solve_disc_with(ws, gc, tau, log_radius, None, cfg)).collect();
    Ok(Sweep { taus, log_radius, results })
}

/// Sweep over the unit torus that fails unless every disc is certified.
pub fn sweep_family<T: Real>(
    ws: &OperatorWorkspace<T>,
    gc: &GraphCoeffs<T>,
    n_tau: usize,
    cfg: &SolverConfig,
) -> Result<Hypersurface<T>> {
    sweep(ws, gc, n_tau, 0.0, cfg)?.into_hypersurface()
}

/// Summary measurements of a family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilyMetrics {
    /// Fiberwise separation of distinct discs over interior nodes.
    pub min_separation: f64,
    /// `max ||w| − e^ℓ|` over all boundary nodes.
    pub boundary_defect: f64,
    /// `min |w|` over all discs and nodes.
    pub min_modulus: f64,
    /// `max |w| / e^ℓ`.
    pub radius_ratio: f64,
    /// Largest `max |w| / max_{circle} |w|` over the discs.
    pub max_principle_ratio: f64,
    pub max_residual: f64,
    pub max_iterations: usize,
    /// Smallest and largest winding number of `τ ↦ w(z, τ)` over boundary nodes.
    pub winding_min: i64,
    pub winding_max: i64,
    /// Smallest increment of `arg w(z, τ_k)` between consecutive `τ_k`.
    pub min_arg_step: f64,
}

/// Discs over a uniform `τ` grid with their metrics.
#[derive(Clone, Debug)]
pub struct Hypersurface<T: Real> {
    pub discs: Vec<DiscSolution<T>>,
    pub log_radius: f64,
    pub metrics: FamilyMetrics,
}

impl<T: Real> Hypersurface<T> {
    pub fn new(discs: Vec<DiscSolution<T>>, log_radius: f64) -> Result<Self> {
        if discs.is_empty() {
            return Err(Error::InvalidArgument("a family needs at least one disc".into()));
        }
        if discs.windows(2).any(|w| !(w[1].tau > w[0].tau)) {
            return Err(Error::InvalidArgument("disc parameters must increase strictly".into()));
        }
        let grid = discs[0].w.grid().clone();
        if discs.iter().any(|d| !grid.same_shape(d.w.grid())) {
            let g = discs.iter().find(|d| !grid.same_shape(d.w.grid())).unwrap().w.grid();
            return Err(Error::GridMismatch(grid.n_r(), grid.n_theta(), g.n_r(), g.n_theta()));
        }
        let r = log_radius.exp();
        let fold = |f: &dyn Fn(&DiscSolution<T>) -> f64, init: f64, pick: fn(f64, f64) -> f64| {
            discs.iter().map(f).fold(init, pick)
        };
        let coverage = boundary_coverage(&discs);
        let mut max_principle_ratio: f64 = 0.0;
        for d in &discs {
            max_principle_ratio = max_principle_ratio.max(measure_max_principle(&d.w)?);
        }
        let metrics = FamilyMetrics {
            min_separation: check_disjoint_discs(&discs),
            boundary_defect: fold(&|d| d.boundary_modulus_defect(), 0.0, f64::max),
            min_modulus: fold(&|d| d.w.min_modulus().to_f64_lossy(), f64::INFINITY, f64::min),
            radius_ratio: fold(&|d| d.w.sup_norm().to_f64_lossy() / r, 0.0, f64::max),
            max_principle_ratio,
            max_residual: fold(&|d| d.residual, 0.0, f64::max),
            max_iterations: discs.iter().map(|d| d.iterations).max().unwrap_or(0),
            winding_min: coverage.winding.iter().copied().min().unwrap_or(0),
            winding_max: coverage.winding.iter().copied().max().unwrap_or(0),
            min_arg_step: coverage.min_arg_step,
        };
        Ok(Self { discs, log_radius, metrics })
    }

    pub fn n_tau(&self) -> usize {
        self.discs.len()
    }
}

/// `min_{k≠l} min_z |w(z, τ_k) − w(z, τ_l)|` over interior nodes; `+∞` for a
/// single disc.
pub fn check_disjoint<T: Real>(hs: &Hypersurface<T>) -> f64 {
    check_disjoint_discs(&hs.discs)
}

fn check_disjoint_discs<T: Real>(discs: &[DiscSolution<T>]) -> f64 {
    let n = discs.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let grid = discs[0].w.grid();
    let interior = grid.boundary_ring() * grid.n_theta();
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut m = f64::INFINITY;
            for l in k + 1..n {
                let (a, b) = (discs[k].w.values(), discs[l].w.values());
                for i in 0..interior {
                    m = m.min((a[i] - b[i]).norm().to_f64_lossy());
                }
            }
            m
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Winding of `τ ↦ w(z, τ)` at each boundary node.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCoverage {
    pub winding: Vec<i64>,
    /// Smallest `arg(w_{k+1}/w_k)` in `(−π, π]` over all nodes and steps; a
    /// positive value means the traces are strictly ordered in argument.
    pub min_arg_step: f64,
}

pub fn boundary_coverage<T: Real>(discs: &[DiscSolution<T>]) -> BoundaryCoverage {
    let n = discs.len();
    let traces: Vec<Vec<Complex<T>>> = discs.iter().map(|d| d.w.boundary_trace()).collect();
    let nodes = traces[0].len();
    let mut winding = Vec::with_capacity(nodes);
    let mut min_arg_step = f64::INFINITY;
    for j in 0..nodes {
        let mut total = 0.0;
        for k in 0..n {
            let (a, b) = (traces[k][j], traces[(k + 1) % n][j]);
            let step = (b / a).arg().to_f64_lossy();
            min_arg_step = min_arg_step.min(step);
            total += step;
        }
        winding.push((total / TAU).round() as i64);
    }
    if n == 1 {
        // A single disc closes on itself: zero net turn, no ordering to check.
        min_arg_step = 0.0;
    }
    BoundaryCoverage { winding, min_arg_step }
}

/// Comparison of `∂u/∂τ` from the linearized equation with central
/// differences across the family.
#[derive(Clone, Debug, PartialEq)]
pub struct ImmersionReport {
    pub min_linearized: f64,
    pub min_findiff: f64,
    /// Largest relative L² gap `‖v − D_h u‖ / ‖v‖` with `h = Δτ`.
    pub gap_h: f64,
    /// Same with `h = 2Δτ`.
    pub gap_2h: f64,
    pub dtau: f64,
    pub max_linear_residual: f64,
}

impl ImmersionReport {
    /// `min |∂u/∂τ|`: the smaller of the two estimates.
    pub fn min_modulus(&self) -> f64 {
        self.min_linearized.min(self.min_findiff)
    }

    /// Second-order agreement: the gap shrinks by at least 3 when the step
    /// halves, unless it is already below `1e-7`.
    pub fn richardson_ok(&self) -> bool {
        self.gap_h < 1e-7 || self.gap_2h / self.gap_h >= 3.0
    }
}

/// Minimum `|∂u/∂τ|`, cross-checked between the linearized equation and
/// central differences (with `u(τ + 2π) = u(τ) + 2πi`).
pub fn check_immersion<T: Real>(
    ws: &OperatorWorkspace<T>,
    hs: &Hypersurface<T>,
    gc: &GraphCoeffs<T>,
    cfg: &LinearConfig,
) -> Result<ImmersionReport> {
    let n = hs.n_tau();
    if n < 8 {
        return Err(Error::InvalidArgument(format!("immersion check needs n_tau >= 8, got {n}")));
    }
    let dtau = TAU / n as f64;
    let lin: Vec<_> = hs.discs.par_iter().map(|d| solve_linearized(ws, d, gc, cfg)).collect::<Result<_>>()?;
    let shifted = |k: isize| -> Result<ComplexField<T>> {
        let m = k.rem_euclid(n as isize) as usize;
        let turns = (k - m as isize) / n as isize;
        hs.discs[m].u.add_constant(Complex::new(T::zero(), T::lit(TAU * turns as f64)))
    };
    let mut rep = ImmersionReport {
        min_linearized: f64::INFINITY,
        min_findiff: f64::INFINITY,
        gap_h: 0.0,
        gap_2h: 0.0,
        dtau,
        max_linear_residual: 0.0,
    };
    for (k, v) in lin.iter().enumerate() {
        let k = k as isize;
        let fd = |s: isize| -> Result<ComplexField<T>> {
            let h = T::lit(0.5 / (s as f64 * dtau));
            shifted(k + s)?.sub(&shifted(k - s)?)?.scale(Complex::new(h, T::zero()))
        };
        let (d1, d2) = (fd(1)?, fd(2)?);
        let norm = v.w.l2_norm().to_f64_lossy();
        rep.gap_h = rep.gap_h.max(d1.l2_distance(&v.w)?.to_f64_lossy() / norm);
        rep.gap_2h = rep.gap_2h.max(d2.l2_distance(&v.w)?.to_f64_lossy() / norm);
        rep.min_linearized = rep.min_linearized.min(v.w.min_modulus().to_f64_lossy());
        rep.min_findiff = rep.min_findiff.min(d1.min_modulus().to_f64_lossy());
        rep.max_linear_residual = rep.max_linear_residual.max(v.residual);
    }
    let allowed = dtau * dtau + 1e-8;
    if !(rep.gap_h <= allowed) {
        return Err(Error::ModelInconsistency { gap: rep.gap_h, allowed });
    }
    Ok(rep)
}

/// One row of the radius table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusRow {
    pub r: f64,
    /// `max_Γ |w| / r`.
    pub ratio: f64,
    pub min_modulus_ratio: f64,
}

/// Fills the round tori `|w| = r` and reports `max |w| / r` for each `r`.
pub fn radius_bound<T: Real>(
    ws: &OperatorWorkspace<T>,
    ct: &CoeffTriple<T>,
    r_values: &[f64],
    n_tau: usize,
    cfg: &SolverConfig,
) -> Result<Vec<RadiusRow>> {
    let w_max = ct.preset().and_then(|p| p.w_max()).map(|w| w.to_f64_lossy()).unwrap_or(f64::INFINITY);
    let gc = GraphCoeffs::from_triple(ct.clone());
    r_values
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r < w_max) {
                return Err(Error::InvalidArgument(format!("radius {r} must lie in (0, w_max = {w_max})")));
            }
            let hs = sweep(ws, &gc, n_tau, r.ln(), cfg)?.into_hypersurface()?;
            Ok(RadiusRow { r, ratio: hs.metrics.radius_ratio, min_modulus_ratio: hs.metrics.min_modulus / r })
        })
        .collect()
}

/// `2 sin(π/n)`: separation of `n` constant discs on the unit circle.
pub fn constant_family_separation(n: usize) -> f64 {
    2.0 * (PI / n as f64).sin()
}
