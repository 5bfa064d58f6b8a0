//! Boundary complex of the scooped manifold.
//!
//! Removing the half-spaces bounded by the packing circles and their dual
//! circles leaves a region whose boundary is checkerboard coloured: a white
//! face for every packing circle, a black ideal triangle for every dual
//! circle, and a four-valent ideal vertex at every tangency point.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{normalize_to_infinity, GeneralizedCircle, GeometryError, MobiusMap, Point};
use crate::nerve::{validate_dimer, Dimer, Nerve, NerveError};
use crate::packing::{index_in, star_charts, Layout};

/// Default tolerance of the orthogonality and rectangle audits.
pub const AUDIT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoopError {
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error("colouring is not a dimer")]
    InvalidDimer,
    #[error("layout does not match the nerve: {0}")]
    LayoutMismatch(String),
    #[error("audit failed at {cell}: {reason}")]
    Audit { cell: String, reason: String },
    #[error("no horoball height up to {max_height:e} makes the cusp sections disjoint")]
    NoHeight { max_height: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn audit(cell: impl Into<String>, reason: impl Into<String>) -> ScoopError {
    ScoopError::Audit { cell: cell.into(), reason: reason.into() }
}

/// Face bounded by a packing circle.
#[derive(Debug, Clone, Serialize)]
pub struct WhiteFace {
    pub vertex: usize,
    /// Ideal vertices on the circle, counterclockwise.
    pub ideal_vertices: Vec<usize>,
    /// For each ideal vertex, the map from its chart into this face's chart.
    pub charts: Vec<MobiusMap>,
}

/// Ideal triangle bounded by a dual circle.
#[derive(Debug, Clone, Serialize)]
pub struct BlackFace {
    pub face: usize,
    pub ideal_vertices: [usize; 3],
    /// The black face glued to this one by the dimer.
    pub partner: usize,
}

/// Tangency point with its four incident faces. The circles are given in
/// a common chart, in which `point` is also expressed.
#[derive(Debug, Clone, Serialize)]
pub struct IdealVertex {
    pub edge: usize,
    pub point: Point,
    pub white: [usize; 2],
    pub black: [usize; 2],
    pub white_circles: [GeneralizedCircle; 2],
    pub black_circles: [GeneralizedCircle; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoopComplex {
    pub genus: usize,
    pub white: Vec<WhiteFace>,
    pub black: Vec<BlackFace>,
    pub ideal: Vec<IdealVertex>,
    /// Black faces glued by the dimer, one pair per coloured edge.
    pub pairs: Vec<[usize; 2]>,
    /// Coloured edges, equal to the ideal vertices shared by paired faces.
    pub dimer: Vec<usize>,
    pub orthogonality_residual: f64,
}

/// Euclidean rectangle cut from a horosphere about an ideal vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RectangleShape {
    /// Length of the sides lying in white faces.
    pub w: f64,
    /// Length of the sides lying in black faces.
    pub b: f64,
    /// Modulus `w / b`.
    pub m: f64,
    /// Angle between the white and the black line families.
    pub angle: f64,
}

/// Builds and audits the boundary complex.
pub fn build_scoop(nerve: &Nerve, dimer: &Dimer, layout: &Layout) -> Result<ScoopComplex, ScoopError> {
    if !validate_dimer(nerve, dimer)? {
        return Err(ScoopError::InvalidDimer);
    }
    if layout.face_circles.len() != nerve.face_count()
        || layout.circles.len() != nerve.vertex_count()
        || layout.transfer.len() != nerve.edge_count()
    {
        return Err(ScoopError::LayoutMismatch("cell counts differ".into()));
    }
    let faces = nerve.faces();

    let ideal: Vec<IdealVertex> = (0..nerve.edge_count())
        .map(|e| {
            let [u, v] = nerve.edges()[e];
            let [f, g] = nerve.edge_faces(e);
            let fc = &layout.face_circles[f];
            Ok(IdealVertex {
                edge: e,
                point: layout.tangency[e],
                white: [u, v],
                black: [f, g],
                white_circles: [fc[index_in(&faces[f], u)], fc[index_in(&faces[f], v)]],
                black_circles: [layout.duals[f], layout.transfer[e].apply_circle(&layout.duals[g])?],
            })
        })
        .collect::<Result<_, GeometryError>>()?;

    let white: Vec<WhiteFace> = (0..nerve.vertex_count())
        .map(|u| {
            let star = nerve.star(u);
            let charts = star_charts(nerve, &layout.transfer, u);
            let mut ideal_vertices = Vec::new();
            let mut maps = Vec::new();
            for (k, &w) in nerve.link(u).iter().enumerate() {
                let e = nerve.edge_index(u, w).expect("link edge");
                // Edge (u, w) separates star[k - 1] and star[k].
                let home = nerve.edge_faces(e)[0];
                let pos = if star[k] == home { k } else { (k + star.len() - 1) % star.len() };
                debug_assert_eq!(star[pos], home);
                ideal_vertices.push(e);
                maps.push(charts[pos]);
            }
            WhiteFace { vertex: u, ideal_vertices, charts: maps }
        })
        .collect();

    let mut partner = vec![usize::MAX; nerve.face_count()];
    let mut pairs = Vec::with_capacity(dimer.len());
    for &e in dimer.edges() {
        let [f, g] = nerve.edge_faces(e);
        partner[f] = g;
        partner[g] = f;
        pairs.push([f.min(g), f.max(g)]);
    }
    let black: Vec<BlackFace> = (0..nerve.face_count())
        .map(|f| BlackFace { face: f, ideal_vertices: nerve.face_edges(f), partner: partner[f] })
        .collect();

    let mut orthogonality_residual = 0.0f64;
    for (f, fc) in layout.face_circles.iter().enumerate() {
        for c in fc {
            orthogonality_residual = orthogonality_residual.max(layout.duals[f].product(c).abs());
        }
    }
    for iv in &ideal {
        for w in &iv.white_circles {
            for b in &iv.black_circles {
                orthogonality_residual = orthogonality_residual.max(w.product(b).abs());
            }
        }
    }

    let complex = ScoopComplex {
        genus: nerve.genus(),
        white,
        black,
        ideal,
        pairs,
        dimer: dimer.edges().to_vec(),
        orthogonality_residual,
    };
    complex.audit(AUDIT_TOL)?;
    Ok(complex)
}

impl ScoopComplex {
    /// Re-checks the combinatorial invariants and the right dihedral angles.
    pub fn audit(&self, tol: f64) -> Result<(), ScoopError> {
        let (nw, nb) = (self.white.len(), self.black.len());
        let mut seen = vec![usize::MAX; self.ideal.len()];
        for (i, iv) in self.ideal.iter().enumerate() {
            let cell = format!("ideal vertex {i}");
            if iv.edge >= seen.len() {
                return Err(audit(cell, "edge index out of range"));
            }
            if seen[iv.edge] != usize::MAX {
                return Err(audit(cell, format!("duplicates ideal vertex {}", seen[iv.edge])));
            }
            seen[iv.edge] = i;
            // Around the tangency point: white, black, white, black.
            if iv.white[0] == iv.white[1] || iv.black[0] == iv.black[1] {
                return Err(audit(cell, "incident faces do not alternate between four distinct faces"));
            }
            if iv.white.iter().any(|&w| w >= nw) || iv.black.iter().any(|&b| b >= nb) {
                return Err(audit(cell, "incident face out of range"));
            }
            for &b in &iv.black {
                if !self.black[b].ideal_vertices.contains(&i) {
                    return Err(audit(cell, format!("black face {b} does not list it")));
                }
            }
            for &w in &iv.white {
                if !self.white[w].ideal_vertices.contains(&i) {
                    return Err(audit(cell, format!("white face {w} does not list it")));
                }
            }
        }
        // Each side of a black triangle is an arc of the white face between
        // two of its ideal vertices, so every boundary edge has one white
        // and one black side.
        for bf in &self.black {
            let cell = format!("black face {}", bf.face);
            for &i in &bf.ideal_vertices {
                if !self.ideal.get(i).is_some_and(|iv| iv.black.contains(&bf.face)) {
                    return Err(audit(cell, format!("ideal vertex {i} is not incident")));
                }
            }
            let p = bf.partner;
            if p >= nb || p == bf.face || self.black[p].partner != bf.face {
                return Err(audit(cell, "dimer pairing is not a fixed-point-free involution"));
            }
        }
        if 2 * self.pairs.len() != nb {
            return Err(audit("dimer", format!("{} pairs for {} black faces", self.pairs.len(), nb)));
        }
        if self.orthogonality_residual > tol || self.orthogonality_residual.is_nan() {
            return Err(audit(
                "dihedral angles",
                format!("white/black orthogonality residual {:e}", self.orthogonality_residual),
            ));
        }
        Ok(())
    }

    /// Applies a Mobius map to every circle and point of the complex.
    pub fn transformed(&self, m: &MobiusMap) -> Result<ScoopComplex, GeometryError> {
        let inv = m.inverse();
        let mut out = self.clone();
        for iv in out.ideal.iter_mut() {
            iv.point = m.apply_point(&iv.point);
            for c in iv.white_circles.iter_mut().chain(iv.black_circles.iter_mut()) {
                *c = m.apply_circle(c)?;
            }
        }
        for wf in out.white.iter_mut() {
            for chart in wf.charts.iter_mut() {
                *chart = m.compose(chart).compose(&inv);
            }
        }
        Ok(out)
    }
}

/// Unit direction of a line (or of the nearly straight image of a circle
/// through infinity) and its signed offset along the normal.
fn line_data(c: &GeneralizedCircle) -> (crate::geometry::Complex, f64) {
    let n = c.b.norm();
    (c.b / n, -0.5 * c.c / n)
}

fn separation(l1: &GeneralizedCircle, l2: &GeneralizedCircle) -> (f64, f64) {
    let (d1, o1) = line_data(l1);
    let (d2, o2) = line_data(l2);
    let dot = d1 * d2.conj();
    let parallel = dot.im.abs();
    let o2 = if dot.re < 0.0 { -o2 } else { o2 };
    ((o1 - o2).abs(), parallel)
}

/// Rectangle at ideal vertex `v`, in the normalization where its shorter
/// side has length one.
pub fn rectangle_shape(s: &ScoopComplex, v: usize) -> Result<RectangleShape, ScoopError> {
    rectangle_raw(s, v, AUDIT_TOL).map(|(shape, _)| shape)
}

/// Rectangle at `v` together with the length of its shorter side on the
/// horosphere of height one in the chart sending `v` to infinity.
fn rectangle_raw(s: &ScoopComplex, v: usize, tol: f64) -> Result<(RectangleShape, f64), ScoopError> {
    let iv = s.ideal.get(v).ok_or_else(|| audit(format!("ideal vertex {v}"), "out of range"))?;
    let cell = || format!("ideal vertex {v}");
    if iv.point.is_infinite() {
        return Err(audit(cell(), "tangency point at infinity"));
    }
    let n = normalize_to_infinity(&iv.point);
    let w: Vec<GeneralizedCircle> = iv.white_circles.iter().map(|c| n.apply_circle(c)).collect::<Result<_, _>>()?;
    let b: Vec<GeneralizedCircle> = iv.black_circles.iter().map(|c| n.apply_circle(c)).collect::<Result<_, _>>()?;
    for l in w.iter().chain(b.iter()) {
        if l.a.abs() > tol * l.b.norm().max(1.0) {
            return Err(audit(cell(), format!("image is not a line (a = {:e})", l.a)));
        }
    }
    // White lines are one black side apart and vice versa.
    let (b_len, par_w) = separation(&w[0], &w[1]);
    let (w_len, par_b) = separation(&b[0], &b[1]);
    if par_w > tol || par_b > tol {
        return Err(audit(cell(), format!("line images not parallel ({par_w:e}, {par_b:e})")));
    }
    let (dw, _) = line_data(&w[0]);
    let (db, _) = line_data(&b[0]);
    let angle = (dw * db.conj()).re.abs().min(1.0).acos();
    if (angle - FRAC_PI_2).abs() > tol {
        return Err(audit(cell(), format!("line families meet at angle {angle}")));
    }
    if !(w_len > 0.0 && b_len > 0.0) {
        return Err(audit(cell(), "degenerate rectangle"));
    }
    let short = w_len.min(b_len);
    Ok((RectangleShape { w: w_len / short, b: b_len / short, m: w_len / b_len, angle }, short))
}

/// Finiteness certificate of the scooped manifold.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub white_faces: usize,
    pub black_faces: usize,
    pub ideal_vertices: usize,
    pub black_pairs: usize,
    /// Common horoball height: at every ideal vertex the horoball is taken
    /// where the shorter rectangle side has length `1 / height`.
    pub height: f64,
    pub rectangles: Vec<RectangleShape>,
    pub moduli: Vec<f64>,
}

const MAX_HEIGHT: f64 = 1e12;

/// Audits the complex, extracts every rectangle and finds a common height
/// at which the horoball neighborhoods of the ideal vertices are pairwise
/// disjoint.
///
/// Horoballs are compared whenever their ideal vertices lie on a common
/// white face, after moving them into that face's chart. A horoball at `t`
/// of Euclidean diameter `d` becomes one of diameter `d |M'(t)|` under a
/// Mobius map `M`, and two horoballs at `t1`, `t2` are disjoint iff
/// `|t1 - t2|^2 >= d1 d2`.
pub fn finite_volume_audit(s: &ScoopComplex) -> Result<VolumeReport, ScoopError> {
    s.audit(AUDIT_TOL)?;
    let mut rectangles = Vec::with_capacity(s.ideal.len());
    let mut base = Vec::with_capacity(s.ideal.len());
    for v in 0..s.ideal.len() {
        let (shape, short) = rectangle_raw(s, v, AUDIT_TOL)?;
        rectangles.push(shape);
        // Height-one horoball in the chart sending v to infinity has
        // diameter one at v; at height h * short the side is 1/h.
        base.push(1.0 / short);
    }

    // Pairs on a common white face, in that face's chart: (dist^2, d1*d2)
    // at height one.
    let mut constraints = Vec::new();
    for wf in &s.white {
        let placed: Vec<(crate::geometry::Complex, f64)> = wf
            .ideal_vertices
            .iter()
            .zip(&wf.charts)
            .map(|(&i, m)| {
                let t = s.ideal[i].point.finite().ok_or_else(|| audit(format!("ideal vertex {i}"), "at infinity"))?;
                let [[_, _], [c, d]] = m.m;
                let deriv = 1.0 / (c * t + d).norm_sqr();
                let image = m
                    .apply_point(&Point::Finite(t))
                    .finite()
                    .ok_or_else(|| audit(format!("ideal vertex {i}"), "chart sends it to infinity"))?;
                Ok((image, base[i] * deriv))
            })
            .collect::<Result<_, ScoopError>>()?;
        for i in 0..placed.len() {
            for j in i + 1..placed.len() {
                let dist2 = (placed[i].0 - placed[j].0).norm_sqr();
                if dist2 == 0.0 {
                    return Err(audit(
                        format!("white face {}", wf.vertex),
                        format!("ideal vertices {} and {} coincide", wf.ideal_vertices[i], wf.ideal_vertices[j]),
                    ));
                }
                constraints.push((dist2, placed[i].1 * placed[j].1));
            }
        }
    }
    let mut height = 1.0;
    while constraints.iter().any(|&(dist2, prod)| dist2 < prod / (height * height)) {
        height *= 2.0;
        if height > MAX_HEIGHT {
            return Err(ScoopError::NoHeight { max_height: MAX_HEIGHT });
        }
    }
    Ok(VolumeReport {
        white_faces: s.white.len(),
        black_faces: s.black.len(),
        ideal_vertices: s.ideal.len(),
        black_pairs: s.pairs.len(),
        height,
        moduli: rectangles.iter().map(|r| r.m).collect(),
        rectangles,
    })
}
