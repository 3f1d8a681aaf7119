use png_sources::analysis::{ecdf, ks_distance, EmpiricalSample};
use png_sources::finite_n::{finite_cdf, ContourConfig, LatticeWindow};
use png_sources::fredholm::normal_cdf;
use png_sources::geometry::{bulk_shape, critical_points, limit_shape, ScalingFrame, Variant};
use png_sources::png_model::{simulate_to, ModelParams, NucleationStream};
use png_sources::special_functions::{airy_ai, b_transition};
use proptest::prelude::*;

/// (α, γ₊, γ₋) with α ≤ γ± < 1/α.
fn admissible() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.1f64..0.8, 0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, u, v)| {
        let span = 1.0 / a - a;
        (a, a + span * u * 0.98, a + span * v * 0.98)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn edge_order_iff_product_below_one((a, gp, gm) in admissible()) {
        prop_assume!((gp * gm - 1.0).abs() > 1e-9);
        let p = ModelParams::new(a, gp, gm, gp * gm >= 1.0);
        let cp = critical_points(&p);
        prop_assert_eq!(cp.beta_minus < cp.beta_plus, gp * gm < 1.0);
        prop_assert_eq!(cp.beta_c.is_some(), gp * gm > 1.0);
    }

    #[test]
    fn limit_shape_dominates_bulk((a, gp, gm) in admissible(), beta in -0.99f64..0.99) {
        // the sources can only raise the profile
        let p = ModelParams::new(a, gp, gm, gp * gm >= 1.0);
        let (h, _) = limit_shape(beta, &p).unwrap();
        prop_assert!(h >= bulk_shape(a, beta) - 1e-12);
        prop_assert!(h.is_finite());
    }

    #[test]
    fn scaling_round_trip(v in -4.0f64..4.0, r in -150i64..150) {
        let p = ModelParams::new(0.32, 0.79, 0.63, false);
        let frame = ScalingFrame::new(p, 200, 0.0).unwrap();
        let h = frame.from_scaled(v, r, Variant::Bulk).unwrap();
        let back = frame.to_scaled(h.round() as i64, r, Variant::Bulk).unwrap();
        let (_, scale) = frame.center_scale(r, Variant::Bulk).unwrap();
        prop_assert!((back - v).abs() <= 0.5 / scale + 1e-9);
    }

    #[test]
    fn b_solves_its_x_equation(x in -6.0f64..6.0, w in -2.0f64..2.0) {
        let h = 1e-4;
        let d = (b_transition(x + h, w).unwrap() - b_transition(x - h, w).unwrap()) / (2.0 * h);
        let rhs = airy_ai(x).unwrap() - w * b_transition(x, w).unwrap();
        prop_assert!((d - rhs).abs() <= 1e-6 * (1.0 + rhs.abs()));
    }

    #[test]
    fn ecdf_and_ks_bounded(v in prop::collection::vec(-5.0f64..5.0, 1..60), s in -6.0f64..6.0) {
        let sample = EmpiricalSample::new(v).unwrap();
        let f = ecdf(&sample, s);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(ecdf(&sample, s + 0.5) >= f);
        let d = ks_distance(&sample, normal_cdf);
        prop_assert!(d > 0.0 && d <= 1.0);
    }

    #[test]
    fn heights_nonnegative_inside_light_cone((a, gp, gm) in admissible(), seed in 0u64..1000) {
        prop_assume!(gp * gm < 1.0);
        let p = ModelParams::new(a, gp, gm, false);
        let f = simulate_to(&p, 15, &NucleationStream::new(seed)).unwrap();
        prop_assert!(f.heights.iter().all(|&h| h >= 0));
        prop_assert_eq!(f.get(16), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn finite_cdf_is_a_probability(a in 0.15f64..0.5, gp in 0.2f64..0.7, gm in 0.2f64..0.7, l in 0i64..8) {
        let p = ModelParams::new(a, gp.max(a), gm.max(a), false);
        let cfg = ContourConfig { nodes: 96, ..ContourConfig::for_params(&p, 3).unwrap() };
        let lo = finite_cdf(&p, 3, &[(0, l)], LatticeWindow::default(), &cfg).unwrap().value;
        let hi = finite_cdf(&p, 3, &[(0, l + 1)], LatticeWindow::default(), &cfg).unwrap().value;
        prop_assert!(lo >= -1e-9 && hi <= 1.0 + 1e-9 && hi >= lo - 1e-9);
    }
}
