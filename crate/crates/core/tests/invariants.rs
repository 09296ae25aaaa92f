use nalgebra::{Rotation3, Unit};
use proptest::prelude::*;

use writhe_core::curve::hausdorff;
use writhe_core::deform::{helix_params, DeformOptions};
use writhe_core::{
    correct_writhe, fuller_check, make_perturbed_circle, make_torus_knot, reparameterize_constant,
    writhe_polygonal, writhe_quadrature, ClosedCurve, Error, Vec3,
};

fn perturbed() -> impl Strategy<Value = ClosedCurve> {
    (0.0..0.7f64, 2u32..5, 0.1..1.2f64, 1u32..6, 0.0..6.0f64)
        .prop_map(|(a, k, h, m, phase)| make_perturbed_circle(a, k, h, m, phase, 256).unwrap())
}

fn rigid() -> impl Strategy<Value = (Rotation3<f64>, Vec3)> {
    (
        prop::array::uniform3(-1.0..1.0f64),
        -3.1..3.1f64,
        prop::array::uniform3(-10.0..10.0f64),
    )
        .prop_filter("axis", |(a, _, _)| Vec3::from(*a).norm() > 1e-3)
        .prop_map(|(a, angle, t)| {
            (Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::from(a)), angle), Vec3::from(t))
        })
}

fn wr(curve: &ClosedCurve) -> f64 {
    writhe_polygonal(curve).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rigid_motion_preserves_writhe(curve in perturbed(), (rot, shift) in rigid()) {
        let moved = curve.rotated(&rot).translated(&shift);
        prop_assert!((wr(&moved) - wr(&curve)).abs() < 1e-10);
        let q0 = writhe_quadrature(&curve, 2).unwrap().value;
        let q1 = writhe_quadrature(&moved, 2).unwrap().value;
        prop_assert!((q1 - q0).abs() < 1e-10);
    }

    #[test]
    fn reflection_negates_writhe(curve in perturbed(), normal in prop::array::uniform3(-1.0..1.0f64)) {
        prop_assume!(Vec3::from(normal).norm() > 1e-3);
        let mirrored = curve.reflected(&Vec3::from(normal));
        prop_assert!((wr(&mirrored) + wr(&curve)).abs() < 1e-10);
    }

    #[test]
    fn scaling_preserves_writhe(curve in perturbed(), factor in 1e-3..1e3f64) {
        prop_assert!((wr(&curve.scaled(factor)) - wr(&curve)).abs() < 1e-10);
    }

    #[test]
    fn fuller_holds_for_polygons(curve in perturbed()) {
        prop_assert!(fuller_check(&curve).unwrap().residual_mod2 < 1e-9);
    }

    #[test]
    fn helix_pitch_identity(
        n in 1u32..12,
        u in -0.999..0.999f64,
        epsilon in 1e-4..2.0f64,
        scale in 1e-3..=1.0f64,
    ) {
        let w = u * n as f64;
        let h = helix_params(w, n, epsilon, scale, 0.45, 0.55).unwrap();
        prop_assert!((h.pitch_angle().sin() - (1.0 - w.abs() / n as f64)).abs() < 1e-12);
        prop_assert!(h.max_turn_extent(64 * n as usize + 1) <= h.turn_ball_radius());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn correction_reaches_target(
        (a, k, h, m, phase) in (0.0..0.6f64, 2u32..5, 0.2..1.0f64, 1u32..5, 0.0..6.0f64),
        target in -2.5..2.5f64,
    ) {
        let curve = make_perturbed_circle(a, k, h, m, phase, 1024).unwrap();
        let corrected = correct_writhe(&curve, target, &DeformOptions::default()).unwrap();
        prop_assert!((corrected.trace.wr_output - target).abs() < 1e-2);
        prop_assert!(corrected.trace.locality_ok);
        prop_assert!(corrected.trace.connector_area.abs() < 1e-6);
    }
}

#[test]
fn torus_guards() {
    assert!(matches!(make_torus_knot(2, 4, 2.0, 1.0, 1024), Err(Error::Construction(_))));
    assert!(matches!(make_torus_knot(2, 3, 1.0, 1.0, 1024), Err(Error::Construction(_))));
    assert!(matches!(make_torus_knot(2, 5, 2.0, 1.0, 256), Err(Error::Construction(_))));
    assert!(make_torus_knot(2, 5, 2.0, 1.0, 320).is_ok());
}

#[test]
fn mirrored_trefoil() {
    let trefoil = make_torus_knot(2, 3, 2.0, 1.0, 1024).unwrap();
    let mirror = make_torus_knot(2, -3, 2.0, 1.0, 1024).unwrap();
    assert!((wr(&trefoil) + wr(&mirror)).abs() < 1e-10);
}

#[test]
fn reparameterized_trefoil_keeps_its_image() {
    let trefoil = make_torus_knot(2, 3, 2.0, 1.0, 2048).unwrap();
    let (flat, interval) = reparameterize_constant(&trefoil, 0.5, 0.25).unwrap();
    assert_eq!(flat.constant_interval(), Some(&interval));
    let anchor = flat.sample(interval.first);
    for i in interval.first..=interval.last {
        assert_eq!(flat.sample(i), anchor);
    }
    let d = hausdorff(flat.samples(), trefoil.samples());
    assert!(d < 2.0 * trefoil.max_spacing(), "hausdorff {d}");
    assert!((wr(&flat) - wr(&trefoil)).abs() < 1e-3);
}
