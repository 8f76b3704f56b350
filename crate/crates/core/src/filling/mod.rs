//! Filling a torus by a one-parameter family of pseudoholomorphic discs.

mod family;
mod torus;

pub use family::{
    boundary_coverage, check_disjoint, check_immersion, constant_family_separation, normalize_torus, radius_bound,
    sweep, sweep_family, tau_grid, BoundaryCoverage, FamilyMetrics, Hypersurface, ImmersionReport, NormalizedTorus,
    RadiusRow, Sweep, TORUS_TOL,
};
pub use torus::{TorusMap, TorusSpec, RIPPLE_CAP};
