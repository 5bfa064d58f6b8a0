//! Inversive-plane primitives.
//!
//! A [`GeneralizedCircle`] is the zero locus of the Hermitian form
//! `a|z|^2 + 2 Re(conj(b) z) + c`, scaled so that `|b|^2 - a c = 1`. The
//! overall sign is kept: the region where the form is negative is the
//! "inside" of the oriented circle. Lines are the case `a = 0`.
//!
//! With this normalization the inversive product of two positively oriented
//! circles is `-1` for external tangency, `+1` for internal tangency and `0`
//! for orthogonal circles.

use std::fmt;

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Complex = Complex64;

/// Absolute tolerance used by predicates on normalized coefficients.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("circle is not normalized (|b|^2 - ac - 1 = {residual:e})")]
    NotNormalized { residual: f64 },
    #[error("coefficients do not describe a real circle (|b|^2 - ac = {norm:e})")]
    ImaginaryCircle { norm: f64 },
    #[error("circles are not tangent (| |<C1,C2>| - 1 | = {residual:e})")]
    NotTangent { residual: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("singular Mobius matrix")]
    SingularMap,
}

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(Complex),
    Infinity,
}

impl Point {
    pub fn new(re: f64, im: f64) -> Self {
        Point::Finite(Complex::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn finite(&self) -> Option<Complex> {
        match *self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    /// Inverse stereographic projection (projection from the north pole,
    /// which corresponds to infinity).
    pub fn to_sphere(&self) -> [f64; 3] {
        match *self {
            Point::Infinity => [0.0, 0.0, 1.0],
            Point::Finite(z) => {
                let n = z.norm_sqr();
                let d = 1.0 + n;
                [2.0 * z.re / d, 2.0 * z.im / d, (n - 1.0) / d]
            }
        }
    }

    pub fn from_sphere(x: [f64; 3]) -> Self {
        let den = 1.0 - x[2];
        if den.abs() < 1e-300 {
            return Point::Infinity;
        }
        Point::Finite(Complex::new(x[0] / den, x[1] / den))
    }

    /// Chordal distance on the unit sphere; finite for every pair of points.
    pub fn chordal_distance(&self, other: &Point) -> f64 {
        let p = self.to_sphere();
        let q = other.to_sphere();
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) => write!(f, "({}, {})", z.re, z.im),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::Finite(z) => [z.re, z.im].serialize(s),
            Point::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Tag(String),
        }
        match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => Ok(Point::new(re, im)),
            Repr::Tag(t) if t == "inf" => Ok(Point::Infinity),
            Repr::Tag(t) => Err(de::Error::custom(format!("unknown point tag {t:?}"))),
        }
    }
}

/// Oriented circle or line in the inversive plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedCircle {
    pub a: f64,
    pub b: Complex,
    pub c: f64,
}

impl GeneralizedCircle {
    /// Builds and normalizes a circle from raw coefficients.
    pub fn new(a: f64, b: Complex, c: f64) -> Result<Self, GeometryError> {
        // Rescale by the largest coefficient first so that huge circles
        // (a close to zero) keep their precision.
        let scale = a.abs().max(b.norm()).max(c.abs());
        if scale == 0.0 || !scale.is_finite() {
            return Err(GeometryError::Degenerate("zero or non-finite coefficients".into()));
        }
        let (a, b, c) = (a / scale, b / scale, c / scale);
        let norm = b.norm_sqr() - a * c;
        if norm <= 1e-300 {
            return Err(GeometryError::ImaginaryCircle { norm });
        }
        let s = norm.sqrt();
        Ok(GeneralizedCircle { a: a / s, b: b / s, c: c / s })
    }

    /// Positively oriented circle (inside = bounded disk).
    pub fn from_center_radius(center: Complex, radius: f64) -> Self {
        debug_assert!(radius > 0.0);
        GeneralizedCircle { a: 1.0 / radius, b: -center / radius, c: (center.norm_sqr() - radius * radius) / radius }
    }

    /// Line through `p` with direction `dir`; the inside is the half-plane to
    /// the left of `dir`.
    pub fn line(p: Complex, dir: Complex) -> Self {
        let d = dir / dir.norm();
        let b = -Complex::i() * d;
        GeneralizedCircle { a: 0.0, b, c: -2.0 * (b.conj() * p).re }
    }

    /// Circle (or line) through three distinct points. Finite circles come
    /// back positively oriented.
    pub fn through_points(p: [Point; 3]) -> Result<Self, GeometryError> {
        // Solve around the centroid of the finite points: tight clusters far
        // from the origin would otherwise lose most of their digits.
        let finite: Vec<Complex> = p.iter().filter_map(Point::finite).collect();
        let shift = if finite.is_empty() {
            Complex::new(0.0, 0.0)
        } else {
            finite.iter().sum::<Complex>() / finite.len() as f64
        };
        let mut rows = [[0.0f64; 4]; 3];
        for (row, q) in rows.iter_mut().zip(p.iter()) {
            *row = match *q {
                Point::Infinity => [1.0, 0.0, 0.0, 0.0],
                Point::Finite(z) => {
                    let z = z - shift;
                    [z.norm_sqr(), 2.0 * z.re, 2.0 * z.im, 1.0]
                }
            };
            let m = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            row.iter_mut().for_each(|x| *x /= m);
        }
        let x = null_vector(&rows);
        let size = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if size < 1e-13 {
            return Err(GeometryError::Degenerate("points are not distinct".into()));
        }
        let circle = GeneralizedCircle::new(x[0], Complex::new(x[1], x[2]), x[3])?.translated(shift);
        Ok(if circle.a < 0.0 { circle.reversed() } else { circle })
    }

    /// Spherical cap with center `center` (unit vector) and angular radius
    /// `alpha`, carried to the plane by stereographic projection.
    pub fn from_spherical_cap(center: [f64; 3], alpha: f64) -> Self {
        let (s, co) = alpha.sin_cos();
        GeneralizedCircle {
            a: (co - center[2]) / s,
            b: -Complex::new(center[0], center[1]) / s,
            c: (co + center[2]) / s,
        }
    }

    /// Inverse of [`Self::from_spherical_cap`]: the cap on the unit sphere
    /// bounded by the image of this circle, on the side of its inside.
    pub fn to_spherical_cap(&self) -> ([f64; 3], f64) {
        let n = [2.0 * self.b.re, 2.0 * self.b.im, self.a - self.c];
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let center = [-n[0] / len, -n[1] / len, -n[2] / len];
        let cos_alpha = ((self.a + self.c) / len).clamp(-1.0, 1.0);
        (center, cos_alpha.acos())
    }

    pub fn reversed(&self) -> Self {
        GeneralizedCircle { a: -self.a, b: -self.b, c: -self.c }
    }

    /// Rescales to `|b|^2 - ac = 1`. A circle already normalized up to
    /// rounding keeps `a` and `b`: for a small circle far from the origin
    /// `c` is fixed by them, while `|b|^2 - ac` has lost most of its digits.
    pub fn renormalized(&self) -> Result<Self, GeometryError> {
        if self.is_normalized(1e-9) {
            return Ok(if self.a.abs() >= 1.0 {
                GeneralizedCircle { c: (self.b.norm_sqr() - 1.0) / self.a, ..*self }
            } else {
                *self
            });
        }
        GeneralizedCircle::new(self.a, self.b, self.c)
    }

    /// `|b|^2 - ac - 1`.
    pub fn norm_residual(&self) -> f64 {
        self.b.norm_sqr() - self.a * self.c - 1.0
    }

    /// Normalization check relative to the size of `|b|^2` and `ac`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        self.norm_residual().abs() <= tol * self.b.norm_sqr().max(1.0)
    }

    pub fn is_line(&self) -> bool {
        self.a == 0.0
    }

    /// +1 when the inside is the bounded disk (or the left half-plane of a
    /// line in its canonical direction), -1 otherwise.
    pub fn orientation(&self) -> i8 {
        if self.a > 0.0 || (self.a == 0.0 && self.c <= 0.0) {
            1
        } else {
            -1
        }
    }

    pub fn center(&self) -> Option<Complex> {
        (self.a != 0.0).then(|| -self.b / self.a)
    }

    pub fn radius(&self) -> Option<f64> {
        (self.a != 0.0).then(|| 1.0 / self.a.abs())
    }

    /// Value of the defining form at `z`; negative inside.
    pub fn evaluate(&self, z: Complex) -> f64 {
        self.a * z.norm_sqr() + 2.0 * (self.b.conj() * z).re + self.c
    }

    /// Euclidean distance from a finite point to the locus; for the point at
    /// infinity, zero iff the circle is a line.
    pub fn distance_to(&self, p: &Point) -> f64 {
        match *p {
            Point::Infinity => self.a.abs(),
            Point::Finite(z) => match self.center() {
                Some(ctr) => ((z - ctr).norm() - 1.0 / self.a.abs()).abs(),
                None => ((self.b.conj() * z).re + 0.5 * self.c).abs() / self.b.norm(),
            },
        }
    }

    /// Symmetric bilinear inversive product. Assumes normalized inputs.
    ///
    /// For two finite circles the same number is `(r1^2 + r2^2 - d^2) /
    /// (2 r1 r2)` with signed radii `1/a`. A small circle far from the origin
    /// has `|b|^2` and `ac` both huge and nearly equal, so whichever form has
    /// the smaller terms is used.
    pub fn product(&self, other: &GeneralizedCircle) -> f64 {
        let coef = (self.b * other.b.conj()).re - 0.5 * (self.a * other.c + other.a * self.c);
        if self.a == 0.0 || other.a == 0.0 {
            return coef;
        }
        let coef_scale = self.b.norm() * other.b.norm() + 0.5 * ((self.a * other.c).abs() + (other.a * self.c).abs());
        let (r1, r2) = (1.0 / self.a, 1.0 / other.a);
        let d2 = (self.b / self.a - other.b / other.a).norm_sqr();
        let ctr_scale = (r1 * r1 + r2 * r2 + d2) / (2.0 * (r1 * r2).abs());
        if ctr_scale < coef_scale {
            (r1 * r1 + r2 * r2 - d2) / (2.0 * r1 * r2)
        } else {
            coef
        }
    }

    /// The image under `z -> z + t`.
    pub fn translated(&self, t: Complex) -> Self {
        let b = self.b - self.a * t;
        // For small circles c is best recovered from the normalization.
        let c = if self.a.abs() >= 1.0 {
            (b.norm_sqr() - 1.0) / self.a
        } else {
            self.c + self.a * t.norm_sqr() - 2.0 * (self.b.conj() * t).re
        };
        GeneralizedCircle { a: self.a, b, c }
    }

    /// Hermitian matrix `[[a, b], [conj(b), c]]`.
    fn hermitian(&self) -> [[Complex; 2]; 2] {
        [[Complex::new(self.a, 0.0), self.b], [self.b.conj(), Complex::new(self.c, 0.0)]]
    }

    /// Largest absolute coefficient difference.
    pub fn coefficient_distance(&self, other: &GeneralizedCircle) -> f64 {
        (self.a - other.a).abs().max((self.b - other.b).norm()).max((self.c - other.c).abs())
    }
}

/// Unit null vector of a 3x4 matrix via signed 3x3 minors.
fn null_vector(m: &[[f64; 4]; 3]) -> [f64; 4] {
    let minor = |skip: usize| {
        let cols: Vec<usize> = (0..4).filter(|&j| j != skip).collect();
        let e = |i: usize, j: usize| m[i][cols[j]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    [minor(0), -minor(1), minor(2), -minor(3)]
}

fn check_normalized(c: &GeneralizedCircle, tol: f64) -> Result<(), GeometryError> {
    let residual = c.norm_residual();
    if !c.is_normalized(tol) || !residual.is_finite() {
        return Err(GeometryError::NotNormalized { residual });
    }
    Ok(())
}

/// Inversive product with input validation.
pub fn inversive_product(c1: &GeneralizedCircle, c2: &GeneralizedCircle, tol: f64) -> Result<f64, GeometryError> {
    check_normalized(c1, tol)?;
    check_normalized(c2, tol)?;
    Ok(c1.product(c2))
}

/// The common point of two tangent circles.
///
/// For tangent circles the pencil `C1 - <C1,C2> C2` is a rank-one Hermitian
/// form whose kernel is the tangency point.
pub fn tangency_point(c1: &GeneralizedCircle, c2: &GeneralizedCircle, tol: f64) -> Result<Point, GeometryError> {
    let p = inversive_product(c1, c2, tol)?;
    let residual = (p.abs() - 1.0).abs();
    if residual > tol {
        return Err(GeometryError::NotTangent { residual });
    }
    let alpha = c1.a - p * c2.a;
    let beta = c1.b - p * c2.b;
    let gamma = c1.c - p * c2.c;
    // Kernel of [[alpha, beta], [conj(beta), gamma]]; use the better row.
    let row1 = alpha.abs().max(beta.norm());
    let row2 = beta.norm().max(gamma.abs());
    if row1.max(row2) < 1e-300 {
        return Err(GeometryError::Degenerate("circles coincide".into()));
    }
    if row1 >= row2 {
        if alpha.abs() <= 1e-15 * row1 {
            return Ok(Point::Infinity);
        }
        Ok(Point::Finite(-beta / alpha))
    } else {
        if beta.norm() <= 1e-15 * row2 {
            return Ok(Point::Infinity);
        }
        Ok(Point::Finite(-gamma / beta.conj()))
    }
}

/// The circle through the three pairwise tangency points of a tangent
/// triple; it is orthogonal to all three circles.
pub fn dual_circle(
    c1: &GeneralizedCircle,
    c2: &GeneralizedCircle,
    c3: &GeneralizedCircle,
    tol: f64,
) -> Result<GeneralizedCircle, GeometryError> {
    let t12 = tangency_point(c1, c2, tol)?;
    let t23 = tangency_point(c2, c3, tol)?;
    let t31 = tangency_point(c3, c1, tol)?;
    let sep = t12.chordal_distance(&t23).min(t23.chordal_distance(&t31)).min(t31.chordal_distance(&t12));
    if sep < 1e-12 {
        return Err(GeometryError::Degenerate("coincident tangency points".into()));
    }
    GeneralizedCircle::through_points([t12, t23, t31])
}

/// Orientation-preserving Mobius transformation with determinant one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub m: [[Complex; 2]; 2],
}

impl MobiusMap {
    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        MobiusMap { m: [[one, zero], [zero, one]] }
    }

    /// `z -> (a z + b) / (c z + d)`, scaled to unit determinant.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, GeometryError> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 || !det.norm().is_finite() {
            return Err(GeometryError::SingularMap);
        }
        let s = det.sqrt();
        Ok(MobiusMap { m: [[a / s, b / s], [c / s, d / s]] })
    }

    pub fn det(&self) -> Complex {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `self` after `other`, i.e. `z -> self(other(z))`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let a = &self.m;
        let b = &other.m;
        let mut m = [[Complex::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        MobiusMap { m }
    }

    pub fn inverse(&self) -> MobiusMap {
        let [[a, b], [c, d]] = self.m;
        MobiusMap { m: [[d, -b], [-c, a]] }
    }

    /// Rotation `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Self {
        let h = Complex::from_polar(1.0, 0.5 * theta);
        MobiusMap { m: [[h, Complex::new(0.0, 0.0)], [Complex::new(0.0, 0.0), h.conj()]] }
    }

    /// Similarity `z -> k z + t` with `k != 0`.
    pub fn similarity(k: Complex, t: Complex) -> Self {
        MobiusMap::new(k, t, Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)).expect("similarity with nonzero scale")
    }

    /// Hyperbolic isometry of the unit disk sending 0 to `p` along the
    /// geodesic through them: `z -> (z + p) / (1 + conj(p) z)`.
    pub fn disk_translation(p: Complex) -> Self {
        let one = Complex::new(1.0, 0.0);
        MobiusMap::new(one, p, p.conj(), one).expect("|p| < 1")
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        let [[a, b], [c, d]] = self.m;
        match *p {
            Point::Infinity => {
                if c.norm() <= 1e-300 {
                    Point::Infinity
                } else {
                    Point::Finite(a / c)
                }
            }
            Point::Finite(z) => {
                let den = c * z + d;
                if den.norm() <= 1e-300 * (a * z + b).norm().max(1.0) {
                    Point::Infinity
                } else {
                    Point::Finite((a * z + b) / den)
                }
            }
        }
    }

    /// Image of a circle: `H' = N^* H N` with `N = M^{-1}`. Orientation is
    /// carried along.
    pub fn apply_circle(&self, circle: &GeneralizedCircle) -> Result<GeneralizedCircle, GeometryError> {
        if *self == MobiusMap::identity() {
            return circle.renormalized();
        }
        let n = self.inverse().m;
        let h = circle.hermitian();
        // hn = H N
        let mut hn = [[Complex::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                hn[i][j] = h[i][0] * n[0][j] + h[i][1] * n[1][j];
            }
        }
        let entry = |i: usize, j: usize| n[0][i].conj() * hn[0][j] + n[1][i].conj() * hn[1][j];
        // The form scales by |det N|^2. Dividing by that, rather than
        // renormalizing through |b|^2 - ac, keeps small circles far from the
        // origin accurate: there both terms are huge and nearly equal.
        let s = self.det().norm().recip();
        let (a, b) = (entry(0, 0).re * s, entry(0, 1) * s);
        if !(s.is_finite() && a.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(GeometryError::Degenerate("non-finite circle image".into()));
        }
        let c = if a.abs() >= 1.0 { (b.norm_sqr() - circle.norm_residual() - 1.0) / a } else { entry(1, 1).re * s };
        Ok(GeneralizedCircle { a, b, c })
    }

    /// Largest entry difference after fixing the sign ambiguity of SL(2,C).
    pub fn distance(&self, other: &MobiusMap) -> f64 {
        let diff = |s: f64| {
            let mut d = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    d = d.max((self.m[i][j] - other.m[i][j] * s).norm());
                }
            }
            d
        };
        diff(1.0).min(diff(-1.0))
    }
}

/// A Mobius map sending `p` to infinity, `z -> 1 / (z - p)`. Every circle
/// through `p` becomes a line. Infinity itself gives the identity.
pub fn normalize_to_infinity(p: &Point) -> MobiusMap {
    match *p {
        Point::Infinity => MobiusMap::identity(),
        Point::Finite(z) => {
            let i = Complex::i();
            MobiusMap { m: [[Complex::new(0.0, 0.0), i], [i, -i * z]] }
        }
    }
}
