use std::sync::OnceLock;

use leviflat::coeffs::{reduce_point, lift_point, CoeffTriple, GraphCoeffs, Preset, Triple};
use leviflat::disc::{solve_disc, SolverConfig};
use leviflat::field::{wirtinger_derivatives, ComplexField};
use leviflat::grid::make_grid;
use leviflat::{Complex, Field, Workspace, C64};
use proptest::prelude::*;
use rand::SeedableRng;

fn workspace() -> &'static Workspace {
    static WS: OnceLock<Workspace> = OnceLock::new();
    WS.get_or_init(|| Workspace::new(&make_grid(32, 64).unwrap()))
}

fn random_field(seed: u64) -> Field {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Field::random_smooth(workspace().grid(), &mut rng, 6, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn t_inverts_dbar(seed in any::<u64>()) {
        let u = random_field(seed);
        let tu = workspace().cauchy_green_t(&u).unwrap();
        let (_, dzb) = wirtinger_derivatives(&tu).unwrap();
        prop_assert!(dzb.sup_distance(&u).unwrap() < 1e-9);
    }

    #[test]
    fn t1_is_imaginary_on_the_circle_and_vanishes_at_one(seed in any::<u64>()) {
        let v = workspace().modified_t1(&random_field(seed)).unwrap();
        prop_assert!(v.boundary_trace().iter().all(|x| x.re.abs() < 1e-12));
        prop_assert!(v.value_at_one().norm() < 1e-12);
    }

    #[test]
    fn t1_and_s1_are_linear(s1 in any::<u64>(), s2 in any::<u64>(), k in -3.0f64..3.0) {
        let (u, v) = (random_field(s1), random_field(s2));
        let ws = workspace();
        let combo = u.add(&v.scale(C64::new(k, 0.0)).unwrap()).unwrap();
        let lhs = ws.ahlfors_s1(&combo).unwrap();
        let rhs = ws.ahlfors_s1(&u).unwrap().add(&ws.ahlfors_s1(&v).unwrap().scale(C64::new(k, 0.0)).unwrap()).unwrap();
        prop_assert!(lhs.sup_distance(&rhs).unwrap() < 1e-10 * (1.0 + k.abs()));
    }

    #[test]
    fn graph_reduction_round_trips(
        (ra, ta) in (0.0f64..0.9, 0.0f64..6.3),
        (rb, tb) in (0.0f64..3.0, 0.0f64..6.3),
        (rc, tc) in (0.0f64..0.9, 0.0f64..6.3),
    ) {
        let t = Triple { a: C64::from_polar(ra, ta), b: C64::from_polar(rb, tb), c: C64::from_polar(rc, tc) };
        let g = reduce_point::<f64, C64>(t).unwrap();
        prop_assert!(g.a.norm() + g.c.norm() < 1.0);
        let (back, q) = lift_point(g).unwrap();
        prop_assert!((q - t.a * t.c).norm() < 1e-13);
        prop_assert!((back.a - t.a).norm() < 1e-12);
        prop_assert!((back.b - t.b).norm() < 1e-12);
        prop_assert!((back.c - t.c).norm() < 1e-12);
    }
}

#[test]
fn shear_disc_in_single_precision() {
    let grid = make_grid::<f32>(16, 32).unwrap();
    let ws = leviflat::cauchy::OperatorWorkspace::new(&grid);
    let beta = 0.1f32;
    let ct = CoeffTriple::from_preset(Preset::Shear { beta, w_max: 10.0 }).unwrap();
    let gc = GraphCoeffs::from_triple(ct);
    let cfg = SolverConfig { tol_residual: 1e-4, tol_boundary: 1e-5, tol_step: 1e-6, ..SolverConfig::default() };
    let tau = 0.7;
    let ds = solve_disc(&ws, &gc, tau, &cfg).unwrap();
    let exact = ComplexField::from_fn(&grid, |z| {
        Complex::new(0.0, tau as f32) + (z.conj() * z.conj() - z * z) * (beta / 2.0)
    })
    .unwrap();
    assert!(ds.u.sup_distance(&exact).unwrap() < 1e-4);
}
