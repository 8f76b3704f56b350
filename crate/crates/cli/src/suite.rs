//! The verification suite run by `verify`: operator identities, coefficient
//! algebra, linear and nonlinear solver oracles, and the certificates of the
//! configured family. Random inputs come from a fixed seed.

use std::f64::consts::TAU;
use std::sync::Arc;

use leviflat::beltrami::{measure_max_principle, similarity_decompose, solve_linear_full, solve_linear_rh, LinearConfig};
use leviflat::coeffs::{lift_point, reduce_point, verification_lattice, Triple};
use leviflat::disc::{solve_disc, SolverConfig};
use leviflat::field::wirtinger_derivatives;
use leviflat::filling::{check_immersion, constant_family_separation, sweep_family, TORUS_TOL};
use leviflat::grid::make_grid;
use leviflat::{Coefficients, Field, Graph, Grid, LinearProblem, Preset, Workspace, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{family_checks, solve_family, Setup};
use crate::config::RunConfig;
use crate::report::{Check, FamilySummary};
use crate::CliError;

pub const SEED: u64 = 20_240_917;
pub const RANDOM_FIELDS: usize = 20;
pub const RANDOM_TRIPLES: usize = 1000;

pub const DBAR_T_TOL: f64 = 1e-7;
pub const T1_BOUNDARY_TOL: f64 = 1e-12;
pub const ISOMETRY_TOL: f64 = 5e-3;
pub const CLOSED_FORM_TOL: f64 = 1e-8;
pub const ROUNDTRIP_TOL: f64 = 1e-12;
pub const WORKED_POINT_TOL: f64 = 1e-15;
pub const LINEAR_RESIDUAL_TOL: f64 = 1e-9;
pub const CONTRACTION_CAP: f64 = 0.9;
pub const MANUFACTURED_TOL: f64 = 1e-7;
pub const INTEGRABLE_TOL: f64 = 1e-10;
pub const SEPARATION_TOL: f64 = 1e-12;
pub const HOLOMORPHIC_TOL: f64 = 1e-12;
/// Bound on `max |w| / max_{circle} |w|` for every solution the suite
/// measures.
pub const MAX_PRINCIPLE_CONSTANT: f64 = 4.0;

pub struct SuiteOutcome {
    pub checks: Vec<Check>,
    pub family: Option<FamilySummary>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Runs every check; a check that cannot be evaluated is recorded as failed.
pub fn run_suite(cfg: &RunConfig) -> Result<SuiteOutcome, CliError> {
    let setup = Setup::new(cfg)?;
    let lin = cfg.solver.config().linear();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = vec![grid_check(&setup.grid)];
    checks.extend(operator_checks(&setup.ws, &mut rng));
    checks.extend(coefficient_checks(&setup, &mut rng));

    let mut ratios = Vec::new();
    let mut min_v = f64::INFINITY;
    checks.extend(linear_checks(&setup.ws, &lin, &mut rng, &mut ratios, &mut min_v));
    checks.extend(nonlinear_oracles(&setup.ws, &cfg.solver.config()));

    let mut family = None;
    match solve_family(cfg, &setup) {
        Ok(fam) => {
            let imm = check_immersion(&setup.ws, &fam, &setup.gc, &lin);
            if let Ok(rep) = &imm {
                min_v = min_v.min(rep.min_linearized);
            }
            ratios.push(fam.metrics.max_principle_ratio);
            checks.extend(family_checks(&fam, &imm, cfg.solver.tol_residual));
            family = Some(FamilySummary::of(&fam, setup.normalized.torus_defect, imm.as_ref().ok()));
        }
        Err(e) => checks.push(Check::failed("family.solve", e)),
    }

    let worst = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    checks.push(
        Check::at_most("max_principle.suite_constant", worst, MAX_PRINCIPLE_CONSTANT)
            .with_detail(format!("{} measured solutions", ratios.len())),
    );
    checks.push(Check::above("linear.nonvanishing", min_v, 0.0).with_detail("min |v| over solves pinned at i"));
    Ok(SuiteOutcome { checks, family })
}

fn grid_check(g: &Grid) -> Check {
    let n = g.n_theta();
    let angles_exact = g.angles().iter().enumerate().all(|(k, &a)| a == TAU * k as f64 / n as f64);
    let radii = g.radii();
    let increasing = radii.windows(2).all(|w| w[0] < w[1]) && radii[0] > 0.0;
    let ok = angles_exact && increasing && *radii.last().unwrap() == 1.0 && g.points()[g.one_index()] == c(1.0, 0.0);
    Check::equals("grid.invariants", ok as u8 as f64, 1.0)
}

fn max_relative<I: IntoIterator<Item = leviflat::Result<f64>>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, r| m.max(r.unwrap_or(f64::NAN)))
}

/// Random polynomial fields multiplied by `| |z|² − s |^{1/2}`: a radial kink
/// that limits the smoothness, so the isometry defect is visible and must
/// decrease as the radial grid is refined.
pub fn kinked_fields(grid: &Arc<Grid>, rng: &mut ChaCha8Rng, count: usize) -> Vec<Field> {
    (0..count)
        .map(|_| {
            let s: f64 = rng.gen_range(0.2..0.8);
            let base = Field::random_smooth(grid, rng, 4, 1.0).expect("random field");
            base.map_with_point(|z, v| v * (z.norm_sqr() - s).abs().sqrt()).expect("finite field")
        })
        .collect()
}

/// Largest `| ‖S₁u‖ − ‖u‖ | / ‖u‖` over `fields`.
pub fn isometry_defect(ws: &Workspace, fields: &[Field]) -> f64 {
    max_relative(fields.iter().map(|u| {
        let s = ws.ahlfors_s1(u)?;
        Ok((s.l2_norm() - u.l2_norm()).abs() / u.l2_norm())
    }))
}

fn operator_checks(ws: &Workspace, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let g = ws.grid();
    let fields: Vec<Field> =
        (0..RANDOM_FIELDS).map(|_| Field::random_smooth(g, rng, 6, 1.0).expect("random field")).collect();
    let dbar = max_relative(fields.iter().map(|u| {
        let (_, tzb) = wirtinger_derivatives(&ws.cauchy_green_t(u)?)?;
        Ok(tzb.l2_distance(u)? / u.l2_norm())
    }));
    let t1: Vec<Field> = fields.iter().map(|u| ws.modified_t1(u).expect("finite field")).collect();
    let re_boundary = t1.iter().flat_map(|v| v.boundary_trace()).fold(0.0, |m: f64, x| m.max(x.re.abs()));
    let pin = t1.iter().fold(0.0, |m: f64, v| m.max(v.value_at_one().norm()));
    let iso = isometry_defect(ws, &fields);

    // Refinement: the same kinked fields on a grid with twice the radial nodes.
    let seed = rng.gen::<u64>();
    let kinked = |grid: &Arc<Grid>| kinked_fields(grid, &mut ChaCha8Rng::seed_from_u64(seed), RANDOM_FIELDS);
    let coarse = isometry_defect(ws, &kinked(g));
    let refinement = match make_grid::<f64>(2 * g.n_r(), g.n_theta()) {
        Ok(fine) => {
            let fine_ws = Workspace::new(&fine);
            let d = isometry_defect(&fine_ws, &kinked(&fine));
            Check::below("cauchy.s1_refinement", d, coarse).with_detail(format!("n_r {} -> {}", g.n_r(), 2 * g.n_r()))
        }
        Err(e) => Check::failed("cauchy.s1_refinement", e),
    };

    let one = Field::constant(g, c(1.0, 0.0));
    let closed = (|| -> leviflat::Result<f64> {
        let t = ws.cauchy_green_t(&one)?.sup_distance(&Field::from_fn(g, |z| z.conj())?)?;
        let t1 = ws.modified_t1(&one)?.sup_distance(&Field::from_fn(g, |z| z.conj() - z)?)?;
        Ok(t.max(t1))
    })()
    .unwrap_or(f64::NAN);

    vec![
        Check::below("cauchy.dbar_of_t", dbar, DBAR_T_TOL),
        Check::below("cauchy.t1_boundary_real", re_boundary, T1_BOUNDARY_TOL),
        Check::below("cauchy.t1_pin", pin, T1_BOUNDARY_TOL),
        Check::below("cauchy.s1_isometry", iso.max(coarse), ISOMETRY_TOL),
        refinement,
        Check::below("cauchy.closed_forms", closed, CLOSED_FORM_TOL),
    ]
}

fn triple_distance(a: &Triple<C64>, b: &Triple<C64>) -> f64 {
    (a.a - b.a).norm().max((a.b - b.b).norm()).max((a.c - b.c).norm())
}

fn roundtrip(t: Triple<C64>) -> leviflat::Result<f64> {
    let g = reduce_point::<f64, C64>(t)?;
    let (back, _) = lift_point(g)?;
    Ok(triple_distance(&back, &t) / (1.0 + t.b.norm()))
}

fn random_in_disc(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    C64::from_polar(radius * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>())
}

fn coefficient_checks(setup: &Setup, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut checks = Vec::new();
    match setup.normalized.coeffs.spot_check() {
        Ok(h) => {
            checks.push(Check::below("coeffs.ellipticity", h.sup_ac, setup.normalized.coeffs.a0()));
            checks.push(Check::at_most("coeffs.zero_section", h.zero_section, 1e-14));
        }
        Err(e) => checks.push(Check::failed("coeffs.ellipticity", e)),
    }

    let lattice = verification_lattice::<f64>();
    let on_lattice = max_relative(lattice.iter().map(|&(z, w)| roundtrip(setup.normalized.coeffs.eval(z, w)?)));
    let random = max_relative((0..RANDOM_TRIPLES).map(|_| {
        let t = Triple { a: random_in_disc(rng, 0.95), b: random_in_disc(rng, 5.0), c: random_in_disc(rng, 0.95) };
        roundtrip(t)
    }));
    checks.push(
        Check::below("coeffs.graph_roundtrip", on_lattice.max(random), ROUNDTRIP_TOL)
            .with_detail(format!("{} lattice points, {RANDOM_TRIPLES} random triples", lattice.len())),
    );

    let worked = (|| -> leviflat::Result<f64> {
        let t = Triple { a: c(0.5, 0.0), b: c(1.0, 0.0), c: c(0.5, 0.0) };
        let want = Triple { a: c(-0.4, 0.0), b: c(4.0 / 3.0, 0.0), c: c(0.4, 0.0) };
        let g = reduce_point::<f64, C64>(t)?;
        let (back, q) = lift_point(want)?;
        Ok(triple_distance(&g, &want).max(triple_distance(&back, &t)).max((q - c(0.25, 0.0)).norm()))
    })()
    .unwrap_or(f64::NAN);
    checks.push(Check::at_most("coeffs.worked_point", worked, WORKED_POINT_TOL));

    let change = &setup.normalized.change;
    let a_kept = max_relative(lattice.iter().map(|&(z, wp)| {
        let a_new = setup.normalized.coeffs.eval(z, wp)?.a;
        let a_old = setup.base.eval(z, change.inverse(z, wp))?.a;
        Ok((a_new - a_old).norm())
    }));
    checks.push(Check::below("coeffs.transform_keeps_a", a_kept, ROUNDTRIP_TOL));
    checks.push(Check::at_most("torus.normalization", setup.normalized.torus_defect, TORUS_TOL));
    checks
}

fn linear_checks(
    ws: &Workspace,
    cfg: &LinearConfig,
    rng: &mut ChaCha8Rng,
    ratios: &mut Vec<f64>,
    min_v: &mut f64,
) -> Vec<Check> {
    let g = ws.grid();
    let constant = |v: C64| Field::constant(g, v);
    let mut checks = Vec::new();

    match solve_linear_rh(ws, &constant(c(0.5, 0.0)), &constant(c(1.0, 0.0)), cfg) {
        Ok(s) => {
            checks.push(Check::below("linear.constant_residual", s.residual, LINEAR_RESIDUAL_TOL));
            checks.push(Check::below("linear.contraction", s.contraction, CONTRACTION_CAP));
        }
        Err(e) => checks.push(Check::failed("linear.constant_residual", e)),
    }

    // Random full problems pinned at i.
    let zero = constant(c(0.0, 0.0));
    let mut residual: f64 = 0.0;
    let mut sim_excess: f64 = 0.0;
    let mut failure = None;
    for k in 0..RANDOM_FIELDS {
        let mut random = |sup: f64| Field::random_smooth(g, rng, 3, sup).expect("random field");
        let (q1, q2, b1, b2) = (random(0.2), random(0.1), random(0.3), random(0.2));
        let out = (|| -> leviflat::Result<()> {
            let lp = LinearProblem::new(q1.clone(), q2, b1.clone(), b2)?;
            let s = solve_linear_full(ws, &lp, c(0.0, 1.0), cfg)?;
            residual = residual.max(s.residual);
            *min_v = min_v.min(s.w.min_modulus());
            ratios.push(measure_max_principle(&s.w)?);
            // Problems of the form w_z̄ = q w_z + Q w also get a similarity
            // certificate whose bound must dominate the measured ratio.
            if k % 4 == 0 {
                let lp = LinearProblem::new(q1.clone(), zero.clone(), b1.clone(), zero.clone())?;
                let w = solve_linear_full(ws, &lp, c(0.0, 1.0), cfg)?.w;
                let ratio = measure_max_principle(&w)?;
                let cert = similarity_decompose(ws, &w, &q1, &b1, cfg)?;
                ratios.push(ratio);
                *min_v = min_v.min(w.min_modulus());
                sim_excess = sim_excess.max(ratio / cert.max_principle_bound() - 1.0);
            }
            Ok(())
        })();
        if let Err(e) = out {
            failure = Some(e);
            break;
        }
    }
    match failure {
        None => {
            checks.push(Check::below("linear.random_residual", residual, LINEAR_RESIDUAL_TOL));
            checks.push(Check::at_most("max_principle.similarity_bound", sim_excess, 1e-9));
        }
        Some(e) => checks.push(Check::failed("linear.random_residual", e)),
    }

    // Holomorphic controls: the discrete maximum sits on the circle.
    let controls: [fn(C64) -> C64; 4] = [
        |z| z.exp(),
        |z| (1.0 + z) * (1.0 + z) * 0.25,
        |z| 2.0 + z * z * z,
        |z| c(0.3, -0.2) + z * c(0.1, 0.4) + z * z * c(-0.2, 0.1),
    ];
    let holo = max_relative(controls.iter().map(|f| measure_max_principle(&Field::from_fn(g, f)?)));
    let trivial = (|| -> leviflat::Result<f64> {
        let lp = LinearProblem::new(zero.clone(), zero.clone(), zero.clone(), zero.clone())?;
        measure_max_principle(&solve_linear_full(ws, &lp, c(0.0, 1.0), cfg)?.w)
    })()
    .unwrap_or(f64::NAN);
    checks.push(Check::at_most("max_principle.holomorphic_controls", holo.max(trivial), 1.0 + HOLOMORPHIC_TOL));
    ratios.push(holo.max(trivial));
    checks
}

fn nonlinear_oracles(ws: &Workspace, cfg: &SolverConfig) -> Vec<Check> {
    let g = ws.grid();
    let mut checks = Vec::new();
    let tau = 0.7;
    let manufactured = (|| -> leviflat::Result<f64> {
        let exact = Field::from_fn(g, |z| c(1.0 - z.norm_sqr(), tau))?;
        let zero = c(0.0, 0.0);
        let cases = [
            Graph::linear(zero, zero, [zero, c(-1.0, 0.0), zero])?,
            Graph::linear(c(0.2, 0.0), zero, [zero, c(-1.0, 0.0), c(0.2, 0.0)])?,
        ];
        let mut err: f64 = 0.0;
        for gc in &cases {
            err = err.max(solve_disc(ws, gc, tau, cfg)?.u.sup_distance(&exact)?);
        }
        Ok(err)
    })();
    checks.push(match manufactured {
        Ok(e) => Check::below("disc.manufactured", e, MANUFACTURED_TOL),
        Err(e) => Check::failed("disc.manufactured", e),
    });

    let integrable = (|| -> leviflat::Result<(f64, f64)> {
        let gc = Graph::from_triple(Coefficients::from_preset(Preset::Integrable)?);
        let fam = sweep_family(ws, &gc, 8, cfg)?;
        let mut err: f64 = 0.0;
        for d in &fam.discs {
            err = err.max(d.w.sup_distance(&Field::constant(g, C64::from_polar(1.0, d.tau)))?);
        }
        Ok((err, (fam.metrics.min_separation - constant_family_separation(8)).abs()))
    })();
    match integrable {
        Ok((err, sep)) => {
            checks.push(Check::below("disc.integrable_oracle", err, INTEGRABLE_TOL));
            checks.push(Check::below("disc.integrable_separation", sep, SEPARATION_TOL));
        }
        Err(e) => checks.push(Check::failed("disc.integrable_oracle", e)),
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_suite_passes_for_shear() {
        let cfg = RunConfig::parse(
            "[grid]\nn_r = 32\nn_theta = 64\n[sweep]\nn_tau = 8\n[preset]\nname = \"shear\"\nbeta = 0.1\n",
        )
        .unwrap();
        let out = run_suite(&cfg).unwrap();
        let failed: Vec<String> = out.checks.iter().filter(|c| !c.passed).map(Check::line).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(out.family.is_some());
        let mut names: Vec<&str> = out.checks.iter().map(|c| c.name.as_str()).collect();
        let n = names.len();
        names.dedup();
        assert_eq!(names.len(), n, "check names are unique");
    }
}
