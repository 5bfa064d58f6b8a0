//! Placing a circle tangent to two placed circles, in each model.
//!
//! Every routine places the third circle of an oriented face `(u, v, w)` on
//! the side that makes the interstice boundary run `t_uv -> t_vw -> t_wu`
//! counterclockwise.

use crate::geometry::{
    normalize_to_infinity, tangency_point, Complex, GeneralizedCircle, GeometryError, MobiusMap, Point,
};

use super::{corner_angle, Geometry};

/// How radii are turned into circles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Model {
    /// Euclidean plane.
    Plane,
    /// Poincare disk; radii are hyperbolic and may be infinite.
    Disk,
    /// Unit sphere seen through stereographic projection.
    Sphere,
}

impl Model {
    pub(crate) fn for_geometry(g: Geometry) -> Self {
        match g {
            Geometry::Euclidean => Model::Plane,
            Geometry::Hyperbolic => Model::Disk,
            Geometry::Spherical => Model::Sphere,
        }
    }

    fn geometry(self) -> Geometry {
        match self {
            Model::Plane => Geometry::Euclidean,
            Model::Disk => Geometry::Hyperbolic,
            Model::Sphere => Geometry::Spherical,
        }
    }

    /// Circles of a first face `(u, v, w)` in a canonical position.
    pub(crate) fn first_face(self, r: [f64; 3]) -> Result<[GeneralizedCircle; 3], GeometryError> {
        match self {
            Model::Plane => {
                let cu = GeneralizedCircle::from_center_radius(Complex::new(0.0, 0.0), r[0]);
                let cv = GeneralizedCircle::from_center_radius(Complex::new(r[0] + r[1], 0.0), r[1]);
                let cw = self.place(&cu, &cv, r[0], r[1], r[2])?;
                Ok([cu, cv, cw])
            }
            Model::Sphere => {
                let pu = [0.0, 0.0, -1.0];
                let d = r[0] + r[1];
                let pv = [d.sin(), 0.0, -d.cos()];
                let cu = GeneralizedCircle::from_spherical_cap(pu, r[0]);
                let cv = GeneralizedCircle::from_spherical_cap(pv, r[1]);
                let cw = self.place(&cu, &cv, r[0], r[1], r[2])?;
                Ok([cu, cv, cw])
            }
            Model::Disk => {
                // Chart with the u/v tangency at infinity: u is y = 0, v is
                // y = 1 and the disk boundary is the circle Sigma with
                // <u, Sigma> = k_u, <v, Sigma> = k_v.
                let (ku, kv, kw) = (coth(r[0]), coth(r[1]), coth(r[2]));
                let cu = GeneralizedCircle { a: 0.0, b: Complex::new(0.0, 1.0), c: 0.0 };
                let cv = GeneralizedCircle { a: 0.0, b: Complex::new(0.0, -1.0), c: 2.0 };
                let a = -(ku + kv);
                let sigma = GeneralizedCircle { a, b: Complex::new(0.0, ku), c: (ku * ku - 1.0) / a };
                let x = strip_root(&sigma, kw)?;
                let cw = strip_circle(x);
                // Send Sigma (inside = outside of a Euclidean circle) to the
                // unit circle, inside to inside.
                let z0 = -sigma.b / sigma.a;
                let rho = 1.0 / sigma.a.abs();
                let to_disk =
                    MobiusMap::new(Complex::new(0.0, 0.0), Complex::new(rho, 0.0), Complex::new(1.0, 0.0), -z0)?;
                Ok([to_disk.apply_circle(&cu)?, to_disk.apply_circle(&cv)?, to_disk.apply_circle(&cw)?])
            }
        }
    }

    /// The circle `w` of an oriented face `(u, v, w)` given `u` and `v`.
    pub(crate) fn place(
        self,
        cu: &GeneralizedCircle,
        cv: &GeneralizedCircle,
        ru: f64,
        rv: f64,
        rw: f64,
    ) -> Result<GeneralizedCircle, GeometryError> {
        let alpha = corner_angle(self.geometry(), ru, rv, rw);
        match self {
            Model::Plane => {
                let (Some(pu), Some(pv)) = (cu.center(), cv.center()) else {
                    return Err(GeometryError::Degenerate("line in a Euclidean layout".into()));
                };
                let dir = (pv - pu) / (pv - pu).norm();
                let pw = pu + dir * Complex::from_polar(ru + rw, alpha);
                Ok(GeneralizedCircle::from_center_radius(pw, rw))
            }
            Model::Sphere => {
                let (pu, _) = cu.to_spherical_cap();
                let (pv, _) = cv.to_spherical_cap();
                let dot = pu[0] * pv[0] + pu[1] * pv[1] + pu[2] * pv[2];
                let mut e = [pv[0] - dot * pu[0], pv[1] - dot * pu[1], pv[2] - dot * pu[2]];
                let len = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
                e.iter_mut().for_each(|x| *x /= len);
                let n = cross(pu, e);
                let d = ru + rw;
                let (sa, ca) = alpha.sin_cos();
                // Stereographic projection from the north pole reverses the
                // outward orientation, hence the minus sign.
                let pw: [f64; 3] = std::array::from_fn(|i| d.cos() * pu[i] + d.sin() * (ca * e[i] - sa * n[i]));
                Ok(GeneralizedCircle::from_spherical_cap(pw, rw))
            }
            Model::Disk if ru.is_finite() && rv.is_finite() && rw.is_finite() => {
                // As in the plane, through hyperbolic centers: move u to the
                // origin with v on the positive axis. From the origin a
                // hyperbolic distance d is the Euclidean radius tanh(d/2).
                let to_origin = MobiusMap::disk_translation(-hyperbolic_center(cu)?);
                let pv =
                    to_origin.apply_point(&Point::Finite(hyperbolic_center(cv)?)).finite().expect("inside the disk");
                let pw = pv / pv.norm() * Complex::from_polar((0.5 * (ru + rw)).tanh(), alpha);
                let at_origin = GeneralizedCircle::from_center_radius(Complex::new(0.0, 0.0), (0.5 * rw).tanh());
                to_origin.inverse().compose(&MobiusMap::disk_translation(pw)).apply_circle(&at_origin)
            }
            Model::Disk => {
                let t = tangency_point(cu, cv, 1e-6)?;
                let chart = strip_chart(cu, cv, &t)?;
                let sigma = chart.apply_circle(&GeneralizedCircle::from_center_radius(Complex::new(0.0, 0.0), 1.0))?;
                let x = strip_root(&sigma, coth(rw))?;
                chart.inverse().apply_circle(&strip_circle(x))
            }
        }
    }
}

/// Hyperbolic center of a circle contained in the unit disk.
pub(crate) fn hyperbolic_center(c: &GeneralizedCircle) -> Result<Complex, GeometryError> {
    let (Some(ctr), Some(rho)) = (c.center(), c.radius()) else {
        return Err(GeometryError::Degenerate("line in a disk layout".into()));
    };
    let d = ctr.norm();
    if d + rho >= 1.0 {
        return Err(GeometryError::Degenerate("circle touches the disk boundary".into()));
    }
    let dir = if d > 0.0 { ctr / d } else { Complex::new(1.0, 0.0) };
    let s = 0.5 * ((d - rho).atanh() + (d + rho).atanh());
    Ok(dir * s.tanh())
}

/// `coth(r)`, which is the inversive product of a hyperbolic circle of
/// radius `r` with the boundary of the disk; 1 for horocycles.
pub(crate) fn coth(r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else {
        1.0 / r.tanh()
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Mobius chart sending `t` to infinity, `cu` to the line y = 0 (inside
/// below) and `cv` to y = 1 (inside above).
fn strip_chart(
    cu: &GeneralizedCircle,
    cv: &GeneralizedCircle,
    t: &crate::geometry::Point,
) -> Result<MobiusMap, GeometryError> {
    let inv = normalize_to_infinity(t);
    let lu = inv.apply_circle(cu)?;
    let lv = inv.apply_circle(cv)?;
    let k = Complex::i() / (lu.b / lu.b.norm());
    let shift = Complex::new(0.0, 0.5 * lu.c / lu.b.norm());
    let height = 0.5 * (lu.c / lu.b.norm() + lv.c / lv.b.norm());
    if !(height > 0.0) {
        return Err(GeometryError::Degenerate("tangent circles overlap".into()));
    }
    let sim = MobiusMap::similarity(k / height, shift / height);
    Ok(sim.compose(&inv))
}

/// Diameter-one circle in the strip 0 <= y <= 1 centered at `x + i/2`.
fn strip_circle(x: f64) -> GeneralizedCircle {
    GeneralizedCircle::from_center_radius(Complex::new(x, 0.5), 0.5)
}

/// Position of the strip circle whose product with `sigma` is `k`; the
/// larger root is the one on the correct side of the face.
fn strip_root(sigma: &GeneralizedCircle, k: f64) -> Result<f64, GeometryError> {
    let (a, b1, b2, c) = (sigma.a, sigma.b.re, sigma.b.im, sigma.c);
    let q = b2 + c + k;
    if a.abs() < 1e-14 {
        if b1.abs() < 1e-300 {
            return Err(GeometryError::Degenerate("boundary circle is parallel to the strip".into()));
        }
        return Ok(-q / (2.0 * b1));
    }
    let disc = (b1 * b1 - a * q).max(0.0);
    let s = disc.sqrt();
    let r1 = (-b1 + s) / a;
    let r2 = (-b1 - s) / a;
    Ok(r1.max(r2))
}
