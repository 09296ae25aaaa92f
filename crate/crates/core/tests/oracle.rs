//! Reference values from an independent numpy implementation, frozen.

use std::f64::consts::TAU;

use writhe_core::corpus::corpus;
use writhe_core::deform::DeformOptions;
use writhe_core::{
    correct_writhe, enclosed_area, make_torus_knot, min_self_distance, tangent_indicatrix,
    writhe_polygonal, writhe_quadrature,
};

const N: usize = 4096;
const EXACT_TOL: f64 = 1e-9;

struct Frozen {
    name: &'static str,
    polygonal: f64,
    quadrature: f64,
    area: f64,
    min_distance: f64,
}

const FROZEN: [Frozen; 7] = [
    Frozen { name: "circle", polygonal: 0.0, quadrature: 0.0, area: TAU, min_distance: 0.00460193830285108 },
    Frozen { name: "torus_2_3", polygonal: 3.518235617167484, quadrature: 3.5182321506436067, area: 3.2561704153395823, min_distance: 0.01659255305014705 },
    Frozen { name: "torus_3_2", polygonal: 3.9671797230137735, quadrature: 3.967141759323882, area: 6.076969427342543, min_distance: 0.02121382131746943 },
    Frozen { name: "torus_2_5", polygonal: 6.868088674834491, quadrature: 6.868095042778638, area: 11.737547314652375, min_distance: 0.024781961938106056 },
    Frozen { name: "perturbed_a", polygonal: 0.13885867656490258, quadrature: 0.13886673497604707, area: 0.8724748007616672, min_distance: 0.0038923969002805825 },
    Frozen { name: "perturbed_b", polygonal: 0.28022608672360794, quadrature: 0.2802430599044561, area: 1.7607124294296863, min_distance: 0.0025718309814786885 },
    Frozen { name: "perturbed_c", polygonal: 0.16542383027009136, quadrature: 0.16543715466003867, area: 1.039388581031199, min_distance: 0.0025070218322311806 },
];

fn circular_gap(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

#[test]
fn corpus_matches_reference() {
    let entries = corpus();
    assert_eq!(entries.len(), FROZEN.len());
    for (entry, frozen) in entries.iter().zip(&FROZEN) {
        assert_eq!(entry.name, frozen.name);
        let curve = entry.build(N).unwrap();
        let poly = writhe_polygonal(&curve).unwrap().value;
        let quad = writhe_quadrature(&curve, 2).unwrap().value;
        assert!((poly - frozen.polygonal).abs() < EXACT_TOL, "{}: polygonal {poly}", frozen.name);
        assert!((quad - frozen.quadrature).abs() < EXACT_TOL, "{}: quadrature {quad}", frozen.name);
        let dist = min_self_distance(&curve, 2);
        assert!((dist - frozen.min_distance).abs() < 1e-12, "{}: distance {dist}", frozen.name);
        // A turning-angle sum fixes the area only mod 2π once the indicatrix crosses itself.
        let area = enclosed_area(&tangent_indicatrix(&curve).unwrap()).unwrap();
        let gap = circular_gap(area, frozen.area, TAU).min(circular_gap(-area, frozen.area, TAU));
        assert!(gap < 1e-9, "{}: area {area} vs {}", frozen.name, frozen.area);
    }
}

#[test]
fn smaller_samplings() {
    let trefoil = make_torus_knot(2, 3, 2.0, 1.0, 1024).unwrap();
    let poly = writhe_polygonal(&trefoil).unwrap().value;
    assert!((poly - 3.5181814120432913).abs() < EXACT_TOL);
    let trefoil = make_torus_knot(2, 3, 2.0, 1.0, 2048).unwrap();
    assert!((min_self_distance(&trefoil, 2) - 0.03318518946340624).abs() < 1e-12);
}

#[test]
fn corrected_trefoils_match_reference() {
    let trefoil = make_torus_knot(2, 3, 2.0, 1.0, 2048).unwrap();
    let options = DeformOptions::default();
    for (target, reference) in [
        (0.0, 0.0005887498067752963),
        (1.0, 1.0005077421973285),
        (-0.5, -0.49797920199662005),
    ] {
        let corrected = correct_writhe(&trefoil, target, &options).unwrap();
        let value = writhe_polygonal(&corrected.curve).unwrap().value;
        assert!((value - reference).abs() < 1e-6, "target {target}: {value} vs {reference}");
        assert!((reference - target).abs() < 1e-2);
    }
}
