use std::sync::{Arc, OnceLock};

use num_complex::Complex;

use super::*;
use crate::coeffs::{CoeffTriple, FiberChange, Preset};
use crate::filling::TorusSpec;
use crate::grid::{make_grid, DiscGrid};

type C = Complex<f64>;

fn setup() -> &'static (Arc<DiscGrid<f64>>, OperatorWorkspace<f64>) {
    static WS: OnceLock<(Arc<DiscGrid<f64>>, OperatorWorkspace<f64>)> = OnceLock::new();
    WS.get_or_init(|| {
        let g = make_grid(32, 64).unwrap();
        let ws = OperatorWorkspace::new(&g);
        (g, ws)
    })
}

fn preset(p: Preset<f64>) -> GraphCoeffs<f64> {
    GraphCoeffs::from_triple(CoeffTriple::from_preset(p).unwrap())
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn integrable_disc_is_constant() {
    let (_, ws) = setup();
    let tau = std::f64::consts::PI / 3.0;
    let ds = solve_disc(ws, &preset(Preset::Integrable), tau, &SolverConfig::default()).unwrap();
    assert_eq!(ds.iterations, 1);
    assert!(ds.u.values().iter().all(|&u| (u - c(0.0, tau)).norm() < 1e-15));
    assert!(ds.w.values().iter().all(|&w| (w - C::from_polar(1.0, tau)).norm() < 1e-15));
    let v = solve_linearized(ws, &ds, &preset(Preset::Integrable), &LinearConfig::default()).unwrap();
    assert!(v.w.sup_distance(&ComplexField::constant(&setup().0, c(0.0, 1.0))).unwrap() < 1e-15);
}

#[test]
fn manufactured_solutions() {
    let (g, ws) = setup();
    let tau = 0.7;
    let exact = ComplexField::from_fn(g, |z| c(1.0 - z.norm_sqr(), tau)).unwrap();
    let cases = [
        GraphCoeffs::linear(c(0.0, 0.0), c(0.0, 0.0), [c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap(),
        GraphCoeffs::linear(c(0.2, 0.0), c(0.0, 0.0), [c(0.0, 0.0), c(-1.0, 0.0), c(0.2, 0.0)]).unwrap(),
    ];
    for gc in &cases {
        let ds = solve_disc(ws, gc, tau, &SolverConfig::default()).unwrap();
        assert!(ds.u.sup_distance(&exact).unwrap() < 1e-7);
        assert!(disc_residual(&exact, gc).unwrap() < 1e-9);
    }
}

#[test]
fn residual_scales_with_perturbation() {
    let (g, _) = setup();
    let gc = &GraphCoeffs::linear(c(0.2, 0.0), c(0.0, 0.0), [c(0.0, 0.0), c(-1.0, 0.0), c(0.2, 0.0)]).unwrap();
    let tau = 0.7;
    let mut prev = 0.0;
    for eps in [1e-3, 3e-3, 1e-2] {
        let u = ComplexField::from_fn(g, |z| c(1.0 - z.norm_sqr(), tau) + z.conj() * eps).unwrap();
        let r = disc_residual(&u, gc).unwrap();
        // the defect is exactly eps·(1) over the unit disc: eps·√π
        assert!((r / eps - std::f64::consts::PI.sqrt()).abs() < 1e-6, "{}", r / eps);
        assert!(r > prev);
        prev = r;
    }
    let flat = ComplexField::constant(g, c(0.0, 1.3));
    assert!(disc_residual(&flat, &preset(Preset::Integrable)).unwrap() < 1e-13);
}

#[test]
fn shear_matches_closed_form() {
    let (g, ws) = setup();
    let beta = 0.1;
    let gc = preset(Preset::Shear { beta, w_max: 10.0 });
    for tau in [0.0, 2.0, 5.5] {
        let ds = solve_disc(ws, &gc, tau, &SolverConfig::default()).unwrap();
        let exact = ComplexField::from_fn(g, |z| c(0.0, tau) + (z.conj() * z.conj() - z * z) * (beta / 2.0)).unwrap();
        assert!(ds.u.sup_distance(&exact).unwrap() < 1e-10);
        assert!(ds.boundary_modulus_defect() < 1e-12);
    }
}

#[test]
fn anisotropic_with_b_zero_keeps_constant_discs() {
    let (_, ws) = setup();
    let gc = preset(Preset::Anisotropic { alpha: 0.5, gamma: 0.3, w_max: 10.0 });
    let ds = solve_disc(ws, &gc, 2.5, &SolverConfig::default()).unwrap();
    assert_eq!(ds.iterations, 1);
    assert!(ds.u.values().iter().all(|&u| (u - c(0.0, 2.5)).norm() < 1e-15));
}

/// Anisotropic coefficients seen through a rippled torus: every coefficient
/// is nonzero and depends on `u`.
fn rippled() -> GraphCoeffs<f64> {
    let base = CoeffTriple::from_preset(Preset::Anisotropic { alpha: 0.5, gamma: 0.3, w_max: 10.0 }).unwrap();
    let change = FiberChange::torus(TorusSpec::TwistedRipple(0.2)).unwrap();
    GraphCoeffs::from_triple(CoeffTriple::transformed(&base, &change).unwrap())
}

#[test]
fn nonlinear_solve_properties() {
    let (g, ws) = setup();
    let gc = rippled();
    let cfg = SolverConfig::default();
    let tau = 1.1;
    let ds = solve_disc(ws, &gc, tau, &cfg).unwrap();
    assert!(ds.residual < 1e-9 && ds.boundary_defect < 1e-12 && ds.pin_defect < 1e-12);
    assert!(ds.w.min_modulus() > 0.0);
    assert!(ds.monotone_after(3));

    // Different starting point, same disc.
    let g0 = ComplexField::from_fn(g, |z| -z * 0.1).unwrap();
    let other = solve_disc_with(ws, &gc, tau, 0.0, Some(&g0), &cfg).unwrap();
    assert!(other.u.sup_distance(&ds.u).unwrap() < 1e-8);

    // 2π-periodicity.
    let shifted = solve_disc(ws, &gc, tau + std::f64::consts::TAU, &cfg).unwrap();
    assert!(shifted.w.sup_distance(&ds.w).unwrap() < 1e-10);
    assert!((shifted.tau - tau).abs() < 1e-12);

    // Linearization agrees with a central difference in τ.
    let v = solve_linearized(ws, &ds, &gc, &cfg.linear()).unwrap();
    assert!(v.residual < 1e-9, "{}", v.residual);
    assert!(v.w.min_modulus() > 0.0);
    let h = 1e-3;
    let up = solve_disc(ws, &gc, tau + h, &cfg).unwrap();
    let dn = solve_disc(ws, &gc, tau - h, &cfg).unwrap();
    let fd = up.u.sub(&dn.u).unwrap().scale(c(0.5 / h, 0.0)).unwrap();
    let gap = fd.l2_distance(&v.w).unwrap();
    assert!(gap < 1e-5, "{gap:e}");
}

#[test]
fn boundary_level_follows_log_radius() {
    let (_, ws) = setup();
    let gc = preset(Preset::Shear { beta: 0.1, w_max: 10.0 });
    let ds = solve_disc_with(ws, &gc, 0.3, 2f64.ln(), None, &SolverConfig::default()).unwrap();
    assert!(ds.boundary_modulus_defect() < 1e-12);
    assert!((ds.w.value_at_one() - C::from_polar(2.0, 0.3)).norm() < 1e-12);
}

#[test]
fn failures_are_reported() {
    let (_, ws) = setup();
    let gc = GraphCoeffs::linear(c(0.2, 0.0), c(0.0, 0.0), [c(0.0, 0.0), c(-1.0, 0.0), c(0.2, 0.0)]).unwrap();
    let cfg = SolverConfig { max_iterations: 2, ..SolverConfig::default() };
    assert!(matches!(solve_disc(ws, &gc, 1.0, &cfg), Err(Error::NonContraction { iterations: 2, .. })));
    let cfg = SolverConfig { tol_residual: 0.0, ..SolverConfig::default() };
    assert!(matches!(solve_disc(ws, &gc, 1.0, &cfg), Err(Error::NotCertified { .. })));
    assert!(solve_disc(ws, &gc, f64::NAN, &SolverConfig::default()).is_err());
}

