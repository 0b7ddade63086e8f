use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use curvlink::duality::{dual_hyperplane, dual_point};
use curvlink::forms::{ModelPoint, SpaceTag};
use curvlink::obj::{lift_vertex, project_vertex};
use curvlink::polygons::{develop, random_polygon, regular_polygon, standard_frame, PolygonModel};
use curvlink::solvers::wrap_angle;

fn model() -> impl Strategy<Value = PolygonModel> {
    prop_oneof![Just(PolygonModel::Sphere), Just(PolygonModel::DeSitter)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_develop_back_to_a_closed_polygon(m in model(), k in 3usize..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_polygon(m, k, 0.3, &mut rng).unwrap();
        let inv = p.invariants().unwrap();
        let dev = develop(m, &inv.lengths, &inv.angles, &standard_frame()).unwrap();
        prop_assert!(dev.residual < 1e-8, "residual {}", dev.residual);
    }

    #[test]
    fn regular_polygons_are_equilateral(m in model(), k in 3usize..10, frac in 0.05f64..0.6) {
        let alpha = match m {
            PolygonModel::Sphere => frac * PI / 2.0,
            PolygonModel::DeSitter => frac * curvlink::polygons::desitter_alpha_barrier(k),
        };
        let inv = regular_polygon(m, k, alpha).unwrap().invariants().unwrap();
        for l in &inv.lengths {
            prop_assert!((l - inv.lengths[0]).abs() < 1e-10);
        }
        for a in &inv.angles {
            prop_assert!((a - inv.angles[0]).abs() < 1e-9);
            prop_assert!(*a >= -1e-12);
        }
    }

    #[test]
    fn wrapped_angles_stay_in_range(a in -1e4f64..1e4) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        let turns = (a - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn obj_chart_round_trips(x in -3.0f64..3.0, y in -3.0f64..3.0, t in -3.0f64..3.0) {
        let tag = SpaceTag::AntiDeSitter(3);
        let back = project_vertex(tag, &lift_vertex(tag, [x, y, t]).unwrap()).unwrap();
        prop_assert!((back[0] - x).abs() < 1e-10 && (back[1] - y).abs() < 1e-10);
        prop_assert!((wrap_angle(back[2] - t)).abs() < 1e-10);

        let tag = SpaceTag::Hyperbolic(3);
        let s = 0.9 / (1.0 + (x * x + y * y + t * t).sqrt());
        let k = [x * s, y * s, t * s];
        let back = project_vertex(tag, &lift_vertex(tag, k).unwrap()).unwrap();
        for i in 0..3 {
            prop_assert!((back[i] - k[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn duality_is_an_involution(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let w = (1.0 + a * a + b * b + c * c).sqrt();
        let p = ModelPoint::from_coords(SpaceTag::Hyperbolic(3), vec![a, b, c, w]).unwrap();
        let back = dual_hyperplane(&dual_point(&p).unwrap()).unwrap();
        for (u, v) in back.coords().iter().zip(p.coords().iter()) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }
}
