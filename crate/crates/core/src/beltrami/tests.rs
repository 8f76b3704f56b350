use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
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

fn constant(v: C) -> ComplexField<f64> {
    ComplexField::constant(&setup().0, v)
}

fn random(rng: &mut ChaCha8Rng, sup: f64) -> ComplexField<f64> {
    ComplexField::random_smooth(&setup().0, rng, 3, sup).unwrap()
}

#[test]
fn rh_closed_forms() {
    let (g, ws) = setup();
    let cfg = LinearConfig::default();
    let zero = constant(C::new(0.0, 0.0));
    let v = solve_linear_rh(ws, &zero, &zero, &cfg).unwrap();
    assert_eq!(v.w.sup_norm(), 0.0);

    let one = constant(C::new(1.0, 0.0));
    let v = solve_linear_rh(ws, &zero, &one, &cfg).unwrap();
    let want = ComplexField::from_fn(g, |z| z.conj() - z).unwrap();
    assert!(v.w.sup_distance(&want).unwrap() < 1e-8);

    let half = constant(C::new(0.5, 0.0));
    let v = solve_linear_rh(ws, &half, &one, &cfg).unwrap();
    assert!(v.residual < 1e-9, "{}", v.residual);
    assert!(v.contraction <= 0.5 + 0.05, "{}", v.contraction);
    let want = ComplexField::from_fn(g, |z| (z.conj() - z) * (2.0 / 3.0)).unwrap();
    assert!(v.w.sup_distance(&want).unwrap() < 1e-10);
}

#[test]
fn rh_is_additive_in_the_source() {
    let (_, ws) = setup();
    let cfg = LinearConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = random(&mut rng, 0.5);
    let a = random(&mut rng, 1.0);
    let b = random(&mut rng, 2.0);
    let va = solve_linear_rh(ws, &q, &a, &cfg).unwrap().w;
    let vb = solve_linear_rh(ws, &q, &b, &cfg).unwrap().w;
    let vab = solve_linear_rh(ws, &q, &a.add(&b).unwrap(), &cfg).unwrap().w;
    assert!(vab.sub(&va.add(&vb).unwrap()).unwrap().l2_norm() < 1e-10);
}

#[test]
fn rh_contracts_for_half_bounded_q() {
    let (_, ws) = setup();
    let cfg = LinearConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let q = random(&mut rng, 0.5);
        let src = random(&mut rng, 1.0);
        let v = solve_linear_rh(ws, &q, &src, &cfg).unwrap();
        assert!(v.contraction < 0.9, "{}", v.contraction);
        assert!(v.residual < 1e-9, "{}", v.residual);
        let trace = v.w.boundary_trace();
        assert!(trace.iter().all(|x| x.re.abs() < 1e-13));
        assert!(v.w.value_at_one().norm() < 1e-13);
    }
}

#[test]
fn rh_rejects_large_q() {
    let (_, ws) = setup();
    let q = constant(C::new(1.0, 0.0));
    let err = solve_linear_rh(ws, &q, &q, &LinearConfig::default()).unwrap_err();
    assert!(matches!(err, Error::BoundViolation(_)));
}

fn problem(q1: ComplexField<f64>, q2: ComplexField<f64>, b1: ComplexField<f64>, b2: ComplexField<f64>) -> LinearProblem<f64> {
    LinearProblem::new(q1, q2, b1, b2).unwrap()
}

#[test]
fn full_trivial_cases() {
    let (_, ws) = setup();
    let cfg = LinearConfig::default();
    let z = constant(C::new(0.0, 0.0));
    let lp = problem(z.clone(), z.clone(), z.clone(), z.clone());
    let w = solve_linear_full(ws, &lp, C::new(0.0, 1.0), &cfg).unwrap();
    assert!(w.w.sup_distance(&constant(C::new(0.0, 1.0))).unwrap() < 1e-14);
    let w = solve_linear_full(ws, &lp, C::new(0.0, 0.0), &cfg).unwrap();
    assert_eq!(w.w.sup_norm(), 0.0);
    assert!(matches!(solve_linear_full(ws, &lp, C::new(0.5, 1.0), &cfg), Err(Error::InvalidArgument(_))));

    let lp = problem(z.clone(), z.clone(), constant(C::new(0.1, 0.0)), z);
    let w = solve_linear_full(ws, &lp, C::new(0.0, 1.0), &cfg).unwrap();
    assert!(w.residual < 1e-9, "{}", w.residual);
    assert!(w.w.min_modulus() > 0.5);
}

#[test]
fn random_problems_have_nonvanishing_solutions() {
    let (_, ws) = setup();
    let cfg = LinearConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..20 {
        let lp = problem(random(&mut rng, 0.2), random(&mut rng, 0.1), random(&mut rng, 0.3), random(&mut rng, 0.2));
        let pin = C::new(0.0, 0.5 + case as f64 * 0.1);
        let w = solve_linear_full(ws, &lp, pin, &cfg).unwrap();
        assert!(w.residual < 1e-9, "case {case}: {}", w.residual);
        assert!(w.w.min_modulus() > 1e-3, "case {case}: {}", w.w.min_modulus());
        assert!((w.w.value_at_one() - pin).norm() < 1e-13);
    }
}

#[test]
fn similarity_examples() {
    let (g, ws) = setup();
    let cfg = LinearConfig::default();
    let zero = constant(C::new(0.0, 0.0));
    let one = constant(C::new(1.0, 0.0));
    let c = similarity_decompose(ws, &one, &zero, &zero, &cfg).unwrap();
    assert_eq!(c.v.sup_norm(), 0.0);
    assert!(c.h.sup_distance(&one).unwrap() < 1e-15);
    assert!(c.residual < 1e-14);

    // w = e^{z̄ − z} φ solves w_z̄ = w; the exponent with Im v = 0 on the
    // circle is v = z + z̄ − 2, so h = φ e^{2 − 2z}.
    let phi = |z: C| C::new(0.3, 0.1) + z * 0.2 - z * z * C::new(0.0, 0.1);
    let w = ComplexField::from_fn(g, |z| (z.conj() - z).exp() * phi(z)).unwrap();
    let c = similarity_decompose(ws, &w, &zero, &one, &cfg).unwrap();
    let want = ComplexField::from_fn(g, |z| phi(z) * (2.0 - 2.0 * z).exp()).unwrap();
    assert!(c.h.sup_distance(&want).unwrap() < 1e-7);
    assert!(c.residual < 1e-8, "{}", c.residual);
    assert!(c.modulus_consistent());

    let not_solution = ComplexField::from_fn(g, |z| z.conj()).unwrap();
    assert!(matches!(similarity_decompose(ws, &not_solution, &zero, &zero, &cfg), Err(Error::NotASolution(_))));
}

#[test]
fn max_principle_measurements() {
    let (g, ws) = setup();
    assert_eq!(measure_max_principle(&constant(C::new(0.0, 2.0))).unwrap(), 1.0);
    let hol = ComplexField::from_fn(g, |z| 1.0 + z * 0.5 + z * z * 0.25).unwrap();
    assert!(measure_max_principle(&hol).unwrap() <= 1.0 + 1e-12);
    let n = g.n_theta();
    let bump = ComplexField::from_values(g, (0..g.len()).map(|i| C::new(if i / n == g.boundary_ring() { 0.0 } else { 1.0 }, 0.0)).collect()).unwrap();
    assert!(matches!(measure_max_principle(&bump), Err(Error::MaxPrincipleViolation)));

    // Each ratio stays below the bound certified by its own decomposition.
    let cfg = LinearConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let zero = constant(C::new(0.0, 0.0));
    for _ in 0..6 {
        let q = random(&mut rng, 0.3);
        let big_q = random(&mut rng, 0.5);
        let lp = problem(q.clone(), zero.clone(), big_q.clone(), zero.clone());
        let w = solve_linear_full(ws, &lp, C::new(0.0, 1.0), &cfg).unwrap().w;
        let ratio = measure_max_principle(&w).unwrap();
        let cert = similarity_decompose(ws, &w, &q, &big_q, &cfg).unwrap();
        assert!(ratio <= cert.max_principle_bound() * (1.0 + 1e-9), "{ratio} {}", cert.max_principle_bound());
    }
}
