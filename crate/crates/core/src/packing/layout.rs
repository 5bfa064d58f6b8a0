//! Development of a packing label into explicit circles.
//!
//! Faces are placed breadth first from a root face. Every face keeps its own
//! copy of its three circles, so a face is always drawn in one consistent
//! chart. Edges of the spanning tree share the chart of both sides; each
//! remaining edge carries a side pairing, the rigid motion (or disk
//! isometry) taking the chart of the second face to the chart of the first.

use std::collections::VecDeque;

use serde::Serialize;

use crate::geometry::{dual_circle, tangency_point, Complex, GeneralizedCircle, MobiusMap, Point};
use crate::nerve::Nerve;
use crate::par::{self, Execution};

use super::normalize::center_on_sphere;
use super::place::{hyperbolic_center, Model};
use super::{Geometry, PackingError, PackingLabel};

#[derive(Debug, Clone, Copy)]
pub struct LayoutOptions {
    /// Largest accepted holonomy residual.
    pub tol: f64,
    pub execution: Execution,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions { tol: 1e-8, execution: Execution::default() }
    }
}

/// Identification of the two charts meeting along a non-tree edge.
#[derive(Debug, Clone, Serialize)]
pub struct SidePairing {
    pub edge: usize,
    /// Face whose chart is the target (it contains `u -> v`).
    pub target_face: usize,
    /// Face whose chart is the source.
    pub source_face: usize,
    pub map: MobiusMap,
}

/// Developed packing: circles, dual circles, tangency points and residuals.
#[derive(Debug, Clone, Serialize)]
pub struct Layout {
    pub geometry: Geometry,
    pub radii: Vec<f64>,
    /// One circle per vertex, taken from the first face that placed it.
    pub circles: Vec<GeneralizedCircle>,
    /// Circles of each face in the face's own chart, in face order.
    pub face_circles: Vec<[GeneralizedCircle; 3]>,
    /// Dual circle of each face, oriented so that its inside contains the
    /// interstice.
    pub duals: Vec<GeneralizedCircle>,
    /// Tangency point of each edge in the chart of `edge_faces(e)[0]`.
    pub tangency: Vec<Point>,
    /// Map from the chart of `edge_faces(e)[1]` to that of `edge_faces(e)[0]`
    /// (the identity on tree edges).
    pub transfer: Vec<MobiusMap>,
    pub side_pairings: Vec<SidePairing>,
    pub tangency_residual: f64,
    pub orthogonality_residual: f64,
    pub holonomy_residual: f64,
}

/// Per-face circles from a breadth-first development.
pub(crate) struct Development {
    pub circles: Vec<Option<[GeneralizedCircle; 3]>>,
    /// Whether each edge was crossed by the spanning tree.
    pub tree: Vec<bool>,
}

/// Places every face reachable from `first` through faces marked `allowed`.
pub(crate) fn develop_faces(
    nerve: &Nerve,
    radii: &[f64],
    model: Model,
    first: usize,
    allowed: &[bool],
) -> Result<Development, PackingError> {
    let faces = nerve.faces();
    let mut circles: Vec<Option<[GeneralizedCircle; 3]>> = vec![None; faces.len()];
    let mut tree = vec![false; nerve.edge_count()];
    let f0 = faces[first];
    circles[first] = Some(model.first_face([radii[f0[0]], radii[f0[1]], radii[f0[2]]])?);
    let mut queue = VecDeque::from([first]);
    while let Some(f) = queue.pop_front() {
        let fc = circles[f].expect("queued faces are placed");
        for (k, &e) in nerve.face_edges(f).iter().enumerate() {
            let g = nerve.opposite_face(f, e);
            if !allowed[g] || circles[g].is_some() {
                continue;
            }
            // Side k of f runs u -> v; g contains v -> u and a third vertex x.
            let (u, v) = (faces[f][k], faces[f][(k + 1) % 3]);
            let (cu, cv) = (fc[k], fc[(k + 1) % 3]);
            let gf = faces[g];
            let j = (0..3).find(|&j| gf[j] == v && gf[(j + 1) % 3] == u).expect("opposite orientation");
            let x = gf[(j + 2) % 3];
            let cx = model.place(&cv, &cu, radii[v], radii[u], radii[x])?;
            let mut gc = [cv; 3];
            gc[j] = cv;
            gc[(j + 1) % 3] = cu;
            gc[(j + 2) % 3] = cx;
            circles[g] = Some(gc);
            tree[e] = true;
            queue.push_back(g);
        }
    }
    Ok(Development { circles, tree })
}

/// Coefficient mismatch relative to the size of the circles compared.
fn mismatch(a: &GeneralizedCircle, b: &GeneralizedCircle) -> f64 {
    let size = [a.a, a.b.norm(), a.c, b.a, b.b.norm(), b.c].iter().fold(1.0f64, |m, x| m.max(x.abs()));
    a.coefficient_distance(b) / size
}

pub(crate) fn index_in(face: &[usize; 3], v: usize) -> usize {
    face.iter().position(|&x| x == v).expect("vertex in face")
}

/// Chart normalization putting circle `cu` at the origin with the center of
/// its neighbour `cv` on the positive real axis. The tangency point lies on
/// the same ray, but the neighbour's center is far better conditioned when
/// `cu` is small.
fn frame(model: Model, cu: &GeneralizedCircle, cv: &GeneralizedCircle) -> Result<MobiusMap, PackingError> {
    let (step, target) = match model {
        Model::Plane => {
            let center = |c: &GeneralizedCircle| {
                c.center().ok_or_else(|| PackingError::Degenerate("line in a plane layout".into()))
            };
            (MobiusMap::similarity(Complex::new(1.0, 0.0), -center(cu)?), center(cv)?)
        }
        Model::Disk => (MobiusMap::disk_translation(-hyperbolic_center(cu)?), hyperbolic_center(cv)?),
        Model::Sphere => return Ok(MobiusMap::identity()),
    };
    let t1 = step.apply_point(&Point::Finite(target)).finite().expect("finite image");
    Ok(MobiusMap::rotation(-t1.arg()).compose(&step))
}

/// Develops a converged label into a layout and audits it.
pub fn develop_layout(nerve: &Nerve, label: &PackingLabel, opts: &LayoutOptions) -> Result<Layout, PackingError> {
    if label.radii.len() != nerve.vertex_count() {
        return Err(PackingError::InvalidLabel(format!(
            "{} radii for {} vertices",
            label.radii.len(),
            nerve.vertex_count()
        )));
    }
    let model = Model::for_geometry(label.geometry);
    let faces = nerve.faces();
    let allowed = vec![true; faces.len()];
    let dev = develop_faces(nerve, &label.radii, model, 0, &allowed)?;
    let mut face_circles: Vec<[GeneralizedCircle; 3]> = dev
        .circles
        .into_iter()
        .enumerate()
        .map(|(f, c)| c.ok_or_else(|| PackingError::Degenerate(format!("face {f} was not reached"))))
        .collect::<Result<_, _>>()?;

    if model == Model::Sphere {
        // Center the tangency points so the picture does not depend on the
        // root face.
        let pts: Vec<Point> = (0..nerve.edge_count())
            .map(|e| {
                let f = nerve.edge_faces(e)[0];
                let [u, v] = nerve.edges()[e];
                let fc = &face_circles[f];
                tangency_point(&fc[index_in(&faces[f], u)], &fc[index_in(&faces[f], v)], 1e-6)
            })
            .collect::<Result<_, _>>()?;
        let m = center_on_sphere(&pts);
        for fc in face_circles.iter_mut() {
            for c in fc.iter_mut() {
                *c = m.apply_circle(c)?;
            }
        }
    }

    // Side pairings and per-pairing fit.
    let mut transfer = vec![MobiusMap::identity(); nerve.edge_count()];
    let mut side_pairings = Vec::new();
    let mut holonomy = 0.0f64;
    for (e, &in_tree) in dev.tree.iter().enumerate() {
        if in_tree {
            continue;
        }
        let [u, v] = nerve.edges()[e];
        let [f, g] = nerve.edge_faces(e);
        let (fu, fv) = (face_circles[f][index_in(&faces[f], u)], face_circles[f][index_in(&faces[f], v)]);
        let (gu, gv) = (face_circles[g][index_in(&faces[g], u)], face_circles[g][index_in(&faces[g], v)]);
        let map = frame(model, &fu, &fv)?.inverse().compose(&frame(model, &gu, &gv)?);
        holonomy = holonomy.max(mismatch(&map.apply_circle(&gu)?, &fu)).max(mismatch(&map.apply_circle(&gv)?, &fv));
        if label.geometry == Geometry::Euclidean {
            // Torus pairings are translations.
            let k = map.m[0][0] / map.m[1][1];
            holonomy = holonomy.max((k - 1.0).norm());
        }
        transfer[e] = map;
        side_pairings.push(SidePairing { edge: e, target_face: f, source_face: g, map });
    }

    // Closing up around every vertex star.
    let closure = par::max_range(opts.execution, nerve.vertex_count(), |v| {
        star_closure(nerve, &face_circles, &transfer, v).unwrap_or(f64::INFINITY)
    });
    holonomy = holonomy.max(closure);

    let circles: Vec<GeneralizedCircle> = (0..nerve.vertex_count())
        .map(|v| {
            let f = nerve.star(v)[0];
            face_circles[f][index_in(&faces[f], v)]
        })
        .collect();
    let circles = if model == Model::Sphere {
        // Every copy agrees on the sphere; take the first face in face order.
        let mut first: Vec<Option<GeneralizedCircle>> = vec![None; nerve.vertex_count()];
        for (f, fc) in face_circles.iter().enumerate() {
            for k in 0..3 {
                first[faces[f][k]].get_or_insert(fc[k]);
            }
        }
        first.into_iter().map(|c| c.expect("every vertex lies in a face")).collect()
    } else {
        circles
    };

    let duals: Vec<GeneralizedCircle> =
        par::map_slice(opts.execution, &face_circles, oriented_dual).into_iter().collect::<Result<_, _>>()?;
    let tangency: Vec<Point> = (0..nerve.edge_count())
        .map(|e| {
            let f = nerve.edge_faces(e)[0];
            let [u, v] = nerve.edges()[e];
            tangency_point(&face_circles[f][index_in(&faces[f], u)], &face_circles[f][index_in(&faces[f], v)], 1e-6)
        })
        .collect::<Result<_, _>>()?;

    let tangency_residual = par::max_range(opts.execution, faces.len(), |f| {
        let c = &face_circles[f];
        (0..3).map(|k| (c[k].product(&c[(k + 1) % 3]) + 1.0).abs()).fold(0.0, f64::max)
    });
    let tangency_residual = if model == Model::Sphere {
        nerve.edges().iter().fold(tangency_residual, |m, &[u, v]| m.max((circles[u].product(&circles[v]) + 1.0).abs()))
    } else {
        tangency_residual
    };
    let orthogonality_residual = par::max_range(opts.execution, faces.len(), |f| {
        face_circles[f].iter().map(|c| duals[f].product(c).abs()).fold(0.0, f64::max)
    });

    if !(holonomy <= opts.tol) {
        return Err(PackingError::Holonomy { residual: holonomy, tol: opts.tol });
    }
    Ok(Layout {
        geometry: label.geometry,
        radii: label.radii.clone(),
        circles,
        face_circles,
        duals,
        tangency,
        transfer,
        side_pairings,
        tangency_residual,
        orthogonality_residual,
        holonomy_residual: holonomy,
    })
}

/// Maps from the chart of each face in the star of `v` to the chart of the
/// first one, following the side pairings counterclockwise.
pub(crate) fn star_charts(nerve: &Nerve, transfer: &[MobiusMap], v: usize) -> Vec<MobiusMap> {
    let star = nerve.star(v);
    let link = nerve.link(v);
    let mut charts = Vec::with_capacity(star.len() + 1);
    let mut to_root = MobiusMap::identity();
    charts.push(to_root);
    for k in 0..star.len() {
        let f = star[k];
        let e = nerve.edge_index(v, link[(k + 1) % star.len()]).expect("star edge");
        let step = if nerve.edge_faces(e)[0] == f { transfer[e] } else { transfer[e].inverse() };
        to_root = to_root.compose(&step);
        charts.push(to_root);
    }
    // The last entry is the chart of star[0] after a full turn.
    charts
}

/// Develops once around the star of `v` and measures how far the charts
/// fail to close up.
fn star_closure(
    nerve: &Nerve,
    face_circles: &[[GeneralizedCircle; 3]],
    transfer: &[MobiusMap],
    v: usize,
) -> Result<f64, PackingError> {
    let faces = nerve.faces();
    let star = nerve.star(v);
    let charts = star_charts(nerve, transfer, v);
    let f0 = star[0];
    let v0 = face_circles[f0][index_in(&faces[f0], v)];
    let mut worst = 0.0f64;
    for (k, &f) in star.iter().enumerate().skip(1) {
        let vf = face_circles[f][index_in(&faces[f], v)];
        worst = worst.max(mismatch(&charts[k].apply_circle(&vf)?, &v0));
    }
    let turn = charts[star.len()];
    for c in &face_circles[f0] {
        worst = worst.max(mismatch(&turn.apply_circle(c)?, c));
    }
    Ok(worst)
}

/// Dual circle of a face, oriented with the interstice inside. The
/// interstice lies to the left of the tangency points taken in face order.
pub(crate) fn oriented_dual(c: &[GeneralizedCircle; 3]) -> Result<GeneralizedCircle, PackingError> {
    let d = dual_circle(&c[0], &c[1], &c[2], 1e-6)?;
    let t: Vec<Point> = (0..3).map(|k| tangency_point(&c[k], &c[(k + 1) % 3], 1e-6)).collect::<Result<_, _>>()?;
    let (Some(p), Some(q), Some(r)) = (t[0].finite(), t[1].finite(), t[2].finite()) else {
        return Ok(d);
    };
    let area = ((q - p).conj() * (r - p)).im;
    Ok(if (area > 0.0) == (d.a > 0.0) || d.a == 0.0 { d } else { d.reversed() })
}

/// Circle and interstice diameters in the natural normalization of each
/// geometry.
#[derive(Debug, Clone, Serialize)]
pub struct DiameterReport {
    pub geometry: Geometry,
    /// Angular diameters on the unit sphere, Euclidean diameters of a torus
    /// scaled to unit area, or hyperbolic diameters.
    pub circle_diameters: Vec<f64>,
    /// Diameter of each face's dual circle, which bounds the interstice.
    pub interstice_diameters: Vec<f64>,
    pub max_circle_diameter: f64,
    pub max_interstice_diameter: f64,
}

fn triangle_area(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt()
}

/// Summarizes circle and interstice diameters of a layout.
pub fn diameter_report(nerve: &Nerve, layout: &Layout) -> Result<DiameterReport, PackingError> {
    if layout.face_circles.len() < 2 || layout.face_circles.len() != nerve.face_count() {
        return Err(PackingError::Degenerate("diameter report needs a closed layout with at least two faces".into()));
    }
    let (circle_diameters, interstice_diameters): (Vec<f64>, Vec<f64>) = match layout.geometry {
        Geometry::Spherical => (
            layout.circles.iter().map(|c| 2.0 * c.to_spherical_cap().1).collect(),
            layout.duals.iter().map(|d| 2.0 * d.to_spherical_cap().1).collect(),
        ),
        Geometry::Euclidean => {
            let r = &layout.radii;
            let area: f64 =
                nerve.faces().iter().map(|&[i, j, k]| triangle_area(r[i] + r[j], r[j] + r[k], r[k] + r[i])).sum();
            let s = area.sqrt();
            (
                r.iter().map(|x| 2.0 * x / s).collect(),
                layout.duals.iter().map(|d| d.radius().map_or(f64::INFINITY, |rho| 2.0 * rho / s)).collect(),
            )
        }
        Geometry::Hyperbolic => {
            let unit = GeneralizedCircle::from_center_radius(Complex::new(0.0, 0.0), 1.0);
            (
                layout.radii.iter().map(|x| 2.0 * x).collect(),
                layout.duals.iter().map(|d| 2.0 * (1.0 / d.product(&unit).abs()).atanh()).collect(),
            )
        }
    };
    let max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(*x));
    Ok(DiameterReport {
        geometry: layout.geometry,
        max_circle_diameter: max(&circle_diameters),
        max_interstice_diameter: max(&interstice_diameters),
        circle_diameters,
        interstice_diameters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nerve::generate::{genus2, tetrahedron, torus7};
    use crate::packing::{solve_packing_label, SolverOptions};

    fn layout_of(nerve: &Nerve) -> Layout {
        let g = Geometry::for_genus(nerve.genus());
        let (label, _) = solve_packing_label(nerve, g, &SolverOptions::default()).unwrap();
        develop_layout(nerve, &label, &LayoutOptions::default()).unwrap()
    }

    #[test]
    fn tetrahedron_layout_is_tangent_and_symmetric() {
        let t = tetrahedron();
        let lay = layout_of(&t);
        for &[u, v] in t.edges() {
            assert!((lay.circles[u].product(&lay.circles[v]) + 1.0).abs() < 1e-9);
        }
        assert!(lay.orthogonality_residual < 1e-9);
        let rep = diameter_report(&t, &lay).unwrap();
        let d0 = rep.circle_diameters[0];
        assert!(rep.circle_diameters.iter().all(|d| (d - d0).abs() < 1e-9));
        // The tetrahedral packing is self-dual: the dual caps are congruent
        // to the circles, with angular radius arccos(1/sqrt(3)).
        let alpha = (1.0 / 3.0f64.sqrt()).acos();
        assert!((d0 - 2.0 * alpha).abs() < 1e-9);
        assert!(rep.interstice_diameters.iter().all(|d| (d - d0).abs() < 1e-9));
    }

    #[test]
    fn torus_layout_closes_with_translations() {
        let t = torus7();
        let lay = layout_of(&t);
        assert!(lay.holonomy_residual < 1e-9);
        assert_eq!(lay.side_pairings.len(), t.edge_count() - (t.face_count() - 1));
        // Pairings are either trivial (both faces developed in the same
        // place) or translations by the index-7 sublattice of the hexagonal
        // lattice, whose shortest vectors have length 2 sqrt(7).
        let mut nontrivial = 0;
        for p in &lay.side_pairings {
            let shift = (p.map.m[0][1] / p.map.m[1][1]).norm();
            assert!(shift < 1e-9 || shift > 2.0 * 7f64.sqrt() - 1e-9, "{shift}");
            if shift > 1.0 {
                nontrivial += 1;
            }
        }
        assert!(nontrivial >= 2);
    }

    #[test]
    fn genus_two_layout_closes() {
        let g = genus2();
        let lay = layout_of(&g);
        assert!(lay.holonomy_residual < 1e-8, "{}", lay.holonomy_residual);
        assert!(lay.tangency_residual < 1e-8);
        assert!(lay.orthogonality_residual < 1e-8);
    }

    #[test]
    fn wrong_label_breaks_holonomy() {
        let t = torus7();
        let mut radii = vec![1.0; 7];
        radii[0] = 1.3;
        let label = PackingLabel::new(Geometry::Euclidean, radii).unwrap();
        assert!(matches!(develop_layout(&t, &label, &LayoutOptions::default()), Err(PackingError::Holonomy { .. })));
    }
}
