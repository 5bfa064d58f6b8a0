//! Mobius normalization on the Riemann sphere.

use crate::geometry::{Complex, MobiusMap, Point};

fn centroid(points: &[Point], m: &MobiusMap) -> [f64; 3] {
    let mut c = [0.0; 3];
    for p in points {
        let x = m.apply_point(p).to_sphere();
        (0..3).for_each(|i| c[i] += x[i]);
    }
    c.map(|v| v / points.len() as f64)
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Sphere rotation taking the point over `dir` to the south pole (0).
fn rotate_to_origin(dir: [f64; 3]) -> MobiusMap {
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    match Point::from_sphere(dir) {
        Point::Infinity => MobiusMap { m: [[zero, Complex::i()], [Complex::i(), zero]] },
        Point::Finite(p) => MobiusMap::new(one, -p, p.conj(), one).expect("unitary matrix"),
    }
}

/// A Mobius map after which the given points, lifted to the unit sphere,
/// have their center of mass at the origin (up to rounding).
///
/// Each step rotates the current center of mass to the south pole and
/// dilates away from it; steps that do not shrink the center of mass are
/// halved. Fewer than two distinct points leave the identity.
pub fn center_on_sphere(points: &[Point]) -> MobiusMap {
    let mut m = MobiusMap::identity();
    if points.len() < 2 {
        return m;
    }
    let mut c = centroid(points, &m);
    for _ in 0..500 {
        let size = norm(c);
        if size < 1e-15 {
            break;
        }
        let rot = rotate_to_origin(c.map(|v| v / size)).compose(&m);
        let mut log_scale = 0.5 * ((1.0 + size) / (1.0 - size).max(1e-300)).ln();
        let mut accepted = false;
        for _ in 0..60 {
            let k = Complex::new(log_scale.exp(), 0.0);
            let trial = MobiusMap::similarity(k, Complex::new(0.0, 0.0)).compose(&rot);
            let tc = centroid(points, &trial);
            if norm(tc) < size {
                m = trial;
                c = tc;
                accepted = true;
                break;
            }
            log_scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    m
}
