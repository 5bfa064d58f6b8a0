use std::f64::consts::TAU;

use proptest::prelude::*;

use falforge::geometry::{
    dual_circle, normalize_to_infinity, tangency_point, Complex, GeneralizedCircle, MobiusMap, Point,
};

fn complex(bound: f64) -> impl Strategy<Value = Complex> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| Complex::new(re, im))
}

/// Mobius maps with entries of modulus at most 10, rescaled to determinant
/// one; nearly singular draws are skipped.
fn mobius() -> impl Strategy<Value = MobiusMap> {
    (complex(7.0), complex(7.0), complex(7.0), complex(7.0))
        .prop_filter("well conditioned", |(a, b, c, d)| (a * d - b * c).norm() > 0.5)
        .prop_map(|(a, b, c, d)| MobiusMap::new(a, b, c, d).unwrap())
}

fn circle() -> impl Strategy<Value = GeneralizedCircle> {
    prop_oneof![
        (complex(5.0), 0.1f64..5.0).prop_map(|(z, r)| GeneralizedCircle::from_center_radius(z, r)),
        (complex(5.0), 0.0f64..std::f64::consts::TAU)
            .prop_map(|(p, t)| GeneralizedCircle::line(p, Complex::from_polar(1.0, t))),
    ]
}

/// Inversive product from the raw coefficients, without any rescaling.
fn oracle_product(c1: &GeneralizedCircle, c2: &GeneralizedCircle) -> f64 {
    (c1.b.re * c2.b.re + c1.b.im * c2.b.im) - 0.5 * (c1.a * c2.c + c2.a * c1.c)
}

fn tangent_triple(z: Complex, r: [f64; 3], theta: f64) -> [GeneralizedCircle; 3] {
    // Centers by the law of cosines.
    let (a, b, c) = (r[0] + r[1], r[0] + r[2], r[1] + r[2]);
    let angle = ((a * a + b * b - c * c) / (2.0 * a * b)).acos();
    let p1 = z + Complex::from_polar(a, theta);
    let p2 = z + Complex::from_polar(b, theta + angle);
    [
        GeneralizedCircle::from_center_radius(z, r[0]),
        GeneralizedCircle::from_center_radius(p1, r[1]),
        GeneralizedCircle::from_center_radius(p2, r[2]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn product_is_mobius_invariant(m in mobius(), c1 in circle(), c2 in circle()) {
        let before = oracle_product(&c1, &c2);
        let i1 = m.apply_circle(&c1).unwrap();
        let i2 = m.apply_circle(&c2).unwrap();
        prop_assert!((i1.product(&i2) - before).abs() < 1e-9 * (1.0 + before.abs()));
    }

    #[test]
    fn images_stay_normalized(m in mobius(), c in circle()) {
        prop_assert!(m.apply_circle(&c).unwrap().is_normalized(1e-9));
    }

    #[test]
    fn points_on_circles_map_to_points_on_images(m in mobius(), z in complex(5.0), r in 0.1f64..5.0, t in 0.0f64..TAU) {
        let c = GeneralizedCircle::from_center_radius(z, r);
        let p = Point::Finite(z + Complex::from_polar(r, t));
        let img = m.apply_circle(&c).unwrap();
        let q = m.apply_point(&p);
        if let Point::Finite(w) = q {
            let scale = 1.0 + img.radius().unwrap_or(0.0) + w.norm();
            prop_assert!(img.distance_to(&q) < 1e-8 * scale);
        }
    }

    #[test]
    fn composition_is_associative(a in mobius(), b in mobius(), c in mobius()) {
        let left = a.compose(&b).compose(&c);
        let right = a.compose(&b.compose(&c));
        prop_assert!(left.distance(&right) < 1e-9 * 1e3);
        prop_assert!(a.compose(&a.inverse()).distance(&MobiusMap::identity()) < 1e-9);
    }

    #[test]
    fn normalization_round_trip(p in complex(5.0), c in circle()) {
        let n = normalize_to_infinity(&Point::Finite(p));
        let back = n.inverse().apply_circle(&n.apply_circle(&c).unwrap()).unwrap();
        prop_assert!(back.coefficient_distance(&c) < 1e-9 * (1.0 + c.c.abs() + c.b.norm()));
        prop_assert!(n.apply_point(&Point::Finite(p)).is_infinite());
    }

    #[test]
    fn circles_through_the_pole_become_lines(p in complex(3.0), r in 0.2f64..3.0, t in 0.0f64..TAU) {
        let center = p + Complex::from_polar(r, t);
        let c = GeneralizedCircle::from_center_radius(center, r);
        let img = normalize_to_infinity(&Point::Finite(p)).apply_circle(&c).unwrap();
        prop_assert!(img.a.abs() < 1e-9);
    }

    #[test]
    fn tangent_triples(z in complex(3.0), r0 in 0.05f64..4.0, r1 in 0.05f64..4.0, r2 in 0.05f64..4.0, theta in 0.0f64..TAU) {
        let [c0, c1, c2] = tangent_triple(z, [r0, r1, r2], theta);
        for (x, y) in [(&c0, &c1), (&c1, &c2), (&c2, &c0)] {
            prop_assert!((oracle_product(x, y) + 1.0).abs() < 1e-9);
            let t = tangency_point(x, y, 1e-9).unwrap();
            let w = t.finite().unwrap();
            // On both circles, on the segment of centers.
            prop_assert!(x.distance_to(&t) < 1e-9 && y.distance_to(&t) < 1e-9);
            let (cx, cy) = (x.center().unwrap(), y.center().unwrap());
            let expect = cx + (cy - cx) * (x.radius().unwrap() / (x.radius().unwrap() + y.radius().unwrap()));
            prop_assert!((w - expect).norm() < 1e-9 * (1.0 + expect.norm()));
        }
        let d = dual_circle(&c0, &c1, &c2, 1e-9).unwrap();
        for c in [&c0, &c1, &c2] {
            prop_assert!(oracle_product(&d, c).abs() < 1e-9);
        }
    }
}

#[test]
fn reference_products() {
    let unit = GeneralizedCircle::from_center_radius(Complex::new(0.0, 0.0), 1.0);
    let right = GeneralizedCircle::from_center_radius(Complex::new(2.0, 0.0), 1.0);
    let inner = GeneralizedCircle::from_center_radius(Complex::new(0.5, 0.0), 0.5);
    let axis = GeneralizedCircle::line(Complex::new(0.0, 0.0), Complex::new(0.0, 1.0));
    assert!((unit.product(&right) + 1.0).abs() < 1e-15);
    assert!((unit.product(&inner) - 1.0).abs() < 1e-15);
    assert!(unit.product(&axis).abs() < 1e-15);
    assert_eq!(MobiusMap::identity().apply_circle(&right).unwrap(), right.renormalized().unwrap());
}

#[test]
fn far_small_circles_keep_their_precision() {
    // A circle of radius 1e-4 at distance 1e3 from the origin: |b|^2 and ac
    // are about 1e14 and cancel.
    let z = Complex::new(700.0, -700.0);
    let c1 = GeneralizedCircle::from_center_radius(z, 1e-4);
    let c2 = GeneralizedCircle::from_center_radius(z + Complex::new(1e-4 + 3e-4, 0.0), 3e-4);
    assert!((c1.product(&c2) + 1.0).abs() < 1e-9);
    let shift = MobiusMap::similarity(Complex::from_polar(1.0, 0.3), Complex::new(-650.0, 720.0));
    let (i1, i2) = (shift.apply_circle(&c1).unwrap(), shift.apply_circle(&c2).unwrap());
    assert!((i1.radius().unwrap() / 1e-4 - 1.0).abs() < 1e-9);
    assert!((i1.product(&i2) + 1.0).abs() < 1e-9);
}
