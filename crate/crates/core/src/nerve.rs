//! Closed oriented surface triangulations ("nerves"), dimers and the cubic
//! dual graph.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

pub mod generate;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NerveError {
    #[error("nerve has no faces")]
    Empty,
    #[error("face {face} uses vertex {vertex}, but only {count} vertices are declared")]
    VertexOutOfRange { face: usize, vertex: usize, count: usize },
    #[error("face {face} repeats a vertex")]
    DegenerateFace { face: usize },
    #[error("edge ({0}, {1}) lies in {2} faces, expected 2")]
    NonManifoldEdge(usize, usize, usize),
    #[error("edge ({0}, {1}) is traversed twice in the same direction; orientations disagree")]
    NonOrientable(usize, usize),
    #[error("the faces around vertex {0} do not form a single disk")]
    NonManifoldVertex(usize),
    #[error("vertex {0} is not used by any face")]
    UnusedVertex(usize),
    #[error("complex is disconnected")]
    Disconnected,
    #[error("colouring is not a dimer: some face has zero or several coloured edges")]
    InvalidDimer,
    #[error("edge index {index} out of range ({count} edges)")]
    EdgeOutOfRange { index: usize, count: usize },
}

/// Vertex/edge/face counts and genus of a valid nerve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenusReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: usize,
}

/// Oriented closed-surface triangulation.
///
/// Edges are indexed canonically: each edge is stored as its sorted endpoint
/// pair and the list is sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    /// `[face containing u->v, face containing v->u]` for edge `[u, v]`, u < v.
    edge_faces: Vec<[usize; 2]>,
    /// Edge index of the face sides `(f0,f1)`, `(f1,f2)`, `(f2,f0)`.
    face_edges: Vec<[usize; 3]>,
    /// Neighbors of each vertex in counterclockwise order.
    links: Vec<Vec<usize>>,
    /// `stars[v][k]` is the face `(v, links[v][k], links[v][k+1])`.
    stars: Vec<Vec<usize>>,
    genus: usize,
}

impl Nerve {
    /// Validates a raw face list and builds the derived incidence data.
    pub fn new(vertex_count: usize, faces: Vec<[usize; 3]>) -> Result<Self, NerveError> {
        if faces.is_empty() {
            return Err(NerveError::Empty);
        }
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&v) = f.iter().find(|&&v| v >= vertex_count) {
                return Err(NerveError::VertexOutOfRange { face: fi, vertex: v, count: vertex_count });
            }
            if f[0] == f[1] || f[1] == f[2] || f[2] == f[0] {
                return Err(NerveError::DegenerateFace { face: fi });
            }
        }

        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut undirected: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut repeated: Option<(usize, usize)> = None;
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (u, v) = (f[k], f[(k + 1) % 3]);
                *undirected.entry((u.min(v), u.max(v))).or_insert(0) += 1;
                if directed.insert((u, v), fi).is_some() && repeated.is_none() {
                    repeated = Some((u.min(v), u.max(v)));
                }
            }
        }
        for (&(u, v), &n) in &undirected {
            if n != 2 {
                return Err(NerveError::NonManifoldEdge(u, v, n));
            }
        }
        if let Some((u, v)) = repeated {
            return Err(NerveError::NonOrientable(u, v));
        }

        let edges: Vec<[usize; 2]> = undirected.keys().map(|&(u, v)| [u, v]).collect();
        let index: BTreeMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, e)| ((e[0], e[1]), i)).collect();
        let edge_faces: Vec<[usize; 2]> = edges.iter().map(|&[u, v]| [directed[&(u, v)], directed[&(v, u)]]).collect();
        let face_edges: Vec<[usize; 3]> = faces
            .iter()
            .map(|f| {
                let mut out = [0; 3];
                for k in 0..3 {
                    let (u, v) = (f[k], f[(k + 1) % 3]);
                    out[k] = index[&(u.min(v), u.max(v))];
                }
                out
            })
            .collect();

        // Rotation around each vertex: from face (v, a, b) the next face
        // counterclockwise is the one containing v -> b.
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                incident[v].push(fi);
            }
        }
        let mut links = Vec::with_capacity(vertex_count);
        let mut stars = Vec::with_capacity(vertex_count);
        for v in 0..vertex_count {
            let Some(&start) = incident[v].iter().min() else {
                return Err(NerveError::UnusedVertex(v));
            };
            let mut link = Vec::new();
            let mut star = Vec::new();
            let mut f = start;
            loop {
                let (a, b) = corner_neighbors(&faces[f], v);
                link.push(a);
                star.push(f);
                f = directed[&(v, b)];
                if f == start {
                    break;
                }
                if star.len() > incident[v].len() {
                    return Err(NerveError::NonManifoldVertex(v));
                }
            }
            if star.len() != incident[v].len() {
                return Err(NerveError::NonManifoldVertex(v));
            }
            links.push(link);
            stars.push(star);
        }

        // Connectivity through shared edges.
        let mut seen = vec![false; faces.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(f) = queue.pop_front() {
            for &e in &face_edges[f] {
                let g = if edge_faces[e][0] == f { edge_faces[e][1] } else { edge_faces[e][0] };
                if !seen[g] {
                    seen[g] = true;
                    reached += 1;
                    queue.push_back(g);
                }
            }
        }
        if reached != faces.len() {
            return Err(NerveError::Disconnected);
        }

        let chi = vertex_count as i64 - edges.len() as i64 + faces.len() as i64;
        debug_assert!(chi <= 2 && chi % 2 == 0);
        let genus = ((2 - chi) / 2) as usize;
        Ok(Nerve { vertex_count, faces, edges, edge_faces, face_edges, links, stars, genus })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_faces(&self, e: usize) -> [usize; 2] {
        self.edge_faces[e]
    }

    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// Counterclockwise neighbors of `v`.
    pub fn link(&self, v: usize) -> &[usize] {
        &self.links[v]
    }

    /// Faces around `v`, aligned with [`Self::link`].
    pub fn star(&self, v: usize) -> &[usize] {
        &self.stars[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.links[v].len()
    }

    /// Canonical index of the edge `{u, v}`.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&[u.min(v), u.max(v)]).ok()
    }

    /// The face across edge `e` from face `f`.
    pub fn opposite_face(&self, f: usize, e: usize) -> usize {
        let [l, r] = self.edge_faces[e];
        if l == f {
            r
        } else {
            l
        }
    }

    pub fn report(&self) -> GenusReport {
        GenusReport { vertices: self.vertex_count, edges: self.edges.len(), faces: self.faces.len(), genus: self.genus }
    }
}

/// `(a, b)` such that the face reads `(v, a, b)` up to rotation.
pub(crate) fn corner_neighbors(face: &[usize; 3], v: usize) -> (usize, usize) {
    let k = face.iter().position(|&x| x == v).expect("vertex in face");
    (face[(k + 1) % 3], face[(k + 2) % 3])
}

/// Checks a raw face list and reports its counts and genus.
pub fn validate_nerve(vertex_count: usize, faces: &[[usize; 3]]) -> Result<GenusReport, NerveError> {
    Nerve::new(vertex_count, faces.to_vec()).map(|n| n.report())
}

/// A set of coloured edges, stored as sorted canonical edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dimer {
    edges: Vec<usize>,
}

impl Dimer {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Dimer { edges }
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }
}

/// True iff every face has exactly one coloured edge.
pub fn validate_dimer(nerve: &Nerve, dimer: &Dimer) -> Result<bool, NerveError> {
    let mut coloured = vec![false; nerve.edge_count()];
    for &e in dimer.edges() {
        if e >= nerve.edge_count() {
            return Err(NerveError::EdgeOutOfRange { index: e, count: nerve.edge_count() });
        }
        coloured[e] = true;
    }
    Ok((0..nerve.face_count()).all(|f| nerve.face_edges(f).iter().filter(|&&e| coloured[e]).count() == 1))
}

/// Stellar subdivision of every face. The original edges, which survive as
/// edges of the refinement, form a dimer: each new face has exactly one.
pub fn subdivide_with_dimer(nerve: &Nerve) -> (Nerve, Dimer) {
    let v0 = nerve.vertex_count();
    let mut faces = Vec::with_capacity(3 * nerve.face_count());
    for (fi, &[i, j, k]) in nerve.faces().iter().enumerate() {
        let m = v0 + fi;
        faces.push([i, j, m]);
        faces.push([j, k, m]);
        faces.push([k, i, m]);
    }
    let refined = Nerve::new(v0 + nerve.face_count(), faces).expect("subdivision of a valid nerve");
    let dimer = Dimer::new(
        nerve.edges().iter().map(|&[u, v]| refined.edge_index(u, v).expect("original edge survives")).collect(),
    );
    (refined, dimer)
}

/// One arc of the dual graph: dual to nerve edge `edge`, joining the two
/// faces on either side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DualArc {
    pub edge: usize,
    pub nodes: [usize; 2],
}

/// Cubic graph dual to a nerve, with its rotation system and an optional
/// perfect matching transferred from a dimer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    arcs: Vec<DualArc>,
    /// Arcs at each node in the cyclic order of the face's sides.
    rotation: Vec<[usize; 3]>,
    matched: Option<Vec<bool>>,
}

impl DualGraph {
    pub fn from_nerve(nerve: &Nerve) -> Self {
        let arcs = (0..nerve.edge_count()).map(|e| DualArc { edge: e, nodes: nerve.edge_faces(e) }).collect();
        let rotation = (0..nerve.face_count()).map(|f| nerve.face_edges(f)).collect();
        DualGraph { arcs, rotation, matched: None }
    }

    pub fn node_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn arcs(&self) -> &[DualArc] {
        &self.arcs
    }

    pub fn rotation(&self, node: usize) -> [usize; 3] {
        self.rotation[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.rotation[node].len()
    }

    pub fn is_matched(&self, arc: usize) -> bool {
        self.matched.as_ref().is_some_and(|m| m[arc])
    }

    pub fn has_matching(&self) -> bool {
        self.matched.is_some()
    }

    pub fn matching(&self) -> Vec<usize> {
        (0..self.arcs.len()).filter(|&a| self.is_matched(a)).collect()
    }

    /// The arc matched at `node`, if the matching covers it exactly once.
    pub fn matched_arc(&self, node: usize) -> Option<usize> {
        let m = self.matched.as_ref()?;
        let hits: Vec<usize> = self.rotation[node].iter().copied().filter(|&a| m[a]).collect();
        (hits.len() == 1).then(|| hits[0])
    }

    /// Every node meets exactly one matched arc.
    pub fn is_perfect_matching(&self) -> bool {
        self.matched.is_some() && (0..self.node_count()).all(|n| self.matched_arc(n).is_some())
    }

    /// Faces of the embedded dual graph, traced with the rotation system.
    /// Each is returned as the cyclic list of nodes it visits; for a dual of
    /// a nerve they correspond to the nerve's vertex stars.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut used = vec![[false; 3]; n];
        let mut out = Vec::new();
        for start in 0..n {
            for slot in 0..3 {
                if used[start][slot] {
                    continue;
                }
                let mut cycle = Vec::new();
                let (mut node, mut k) = (start, slot);
                while !used[node][k] {
                    used[node][k] = true;
                    cycle.push(node);
                    let arc = self.rotation[node][k];
                    let [l, r] = self.arcs[arc].nodes;
                    let next = if l == node { r } else { l };
                    let k_in = self.rotation[next].iter().position(|&a| a == arc).expect("arc in rotation");
                    node = next;
                    k = (k_in + 1) % 3;
                }
                out.push(cycle);
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &a in &self.rotation[x] {
                for &y in &self.arcs[a].nodes {
                    if !seen[y] {
                        seen[y] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
        }
        count == n
    }
}

/// Dual graph with the dimer transferred to a perfect matching.
pub fn dual_with_matching(nerve: &Nerve, dimer: &Dimer) -> Result<DualGraph, NerveError> {
    if !validate_dimer(nerve, dimer)? {
        return Err(NerveError::InvalidDimer);
    }
    let mut g = DualGraph::from_nerve(nerve);
    let mut matched = vec![false; nerve.edge_count()];
    for &e in dimer.edges() {
        matched[e] = true;
    }
    g.matched = Some(matched);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::generate::{tetrahedron, torus7};
    use super::*;

    #[test]
    fn tetrahedron_counts() {
        let r = tetrahedron().report();
        assert_eq!(r, GenusReport { vertices: 4, edges: 6, faces: 4, genus: 0 });
    }

    #[test]
    fn torus_counts() {
        let r = torus7().report();
        assert_eq!(r, GenusReport { vertices: 7, edges: 21, faces: 14, genus: 1 });
        let t = torus7();
        assert!((0..7).all(|v| t.degree(v) == 6));
    }

    #[test]
    fn reversed_face_is_an_orientation_defect() {
        let mut faces = tetrahedron().faces().to_vec();
        faces[2].swap(1, 2);
        assert!(matches!(validate_nerve(4, &faces), Err(NerveError::NonOrientable(..))));
    }

    #[test]
    fn structural_defects() {
        let faces = tetrahedron().faces().to_vec();
        assert!(matches!(validate_nerve(4, &faces[..3]), Err(NerveError::NonManifoldEdge(..))));
        assert!(matches!(validate_nerve(5, &faces), Err(NerveError::UnusedVertex(4))));
        assert!(matches!(validate_nerve(3, &faces), Err(NerveError::VertexOutOfRange { .. })));
        assert!(matches!(validate_nerve(4, &[]), Err(NerveError::Empty)));
        let mut two = faces.clone();
        two.extend(faces.iter().map(|f| [f[0] + 4, f[1] + 4, f[2] + 4]));
        assert!(matches!(validate_nerve(8, &two), Err(NerveError::Disconnected)));
        // Two tetrahedra sharing a vertex: every edge is fine, the vertex is not.
        let pinched: Vec<[usize; 3]> =
            faces.iter().copied().chain(faces.iter().map(|f| f.map(|v| if v == 0 { 0 } else { v + 3 }))).collect();
        assert!(matches!(validate_nerve(7, &pinched), Err(NerveError::NonManifoldVertex(0))));
    }

    #[test]
    fn subdivided_tetrahedron() {
        let (n, d) = subdivide_with_dimer(&tetrahedron());
        assert_eq!(n.report(), GenusReport { vertices: 8, edges: 18, faces: 12, genus: 0 });
        assert_eq!(d.len(), 6);
        assert!(validate_dimer(&n, &d).unwrap());
        for f in 0..n.face_count() {
            let original = n.face_edges(f).iter().filter(|&&e| d.contains(e)).count();
            assert_eq!(original, 1);
        }
    }

    #[test]
    fn double_subdivision_keeps_a_dimer() {
        let (n1, _) = subdivide_with_dimer(&torus7());
        let (n2, d2) = subdivide_with_dimer(&n1);
        assert!(validate_dimer(&n2, &d2).unwrap());
        assert_eq!(d2.len() * 2, n2.face_count());
    }

    #[test]
    fn dimer_rejections() {
        let t = tetrahedron();
        assert!(!validate_dimer(&t, &Dimer::new(vec![])).unwrap());
        assert!(!validate_dimer(&t, &Dimer::new((0..6).collect())).unwrap());
        assert!(matches!(
            validate_dimer(&t, &Dimer::new(vec![6])),
            Err(NerveError::EdgeOutOfRange { index: 6, count: 6 })
        ));
    }

    #[test]
    fn dual_of_subdivided_tetrahedron() {
        let (n, d) = subdivide_with_dimer(&tetrahedron());
        let g = dual_with_matching(&n, &d).unwrap();
        assert_eq!(g.node_count(), 12);
        assert!((0..12).all(|x| g.degree(x) == 3));
        assert_eq!(g.matching().len(), 6);
        assert!(g.is_perfect_matching());
        assert!(g.is_connected());
    }

    #[test]
    fn dual_faces_are_vertex_stars() {
        for nerve in [tetrahedron(), torus7(), subdivide_with_dimer(&torus7()).0] {
            let g = DualGraph::from_nerve(&nerve);
            let mut faces: Vec<Vec<usize>> = g
                .faces()
                .into_iter()
                .map(|mut c| {
                    c.sort_unstable();
                    c
                })
                .collect();
            faces.sort();
            let mut stars: Vec<Vec<usize>> = (0..nerve.vertex_count())
                .map(|v| {
                    let mut s = nerve.star(v).to_vec();
                    s.sort_unstable();
                    s
                })
                .collect();
            stars.sort();
            assert_eq!(faces, stars);
        }
    }

    #[test]
    fn stars_follow_links() {
        let t = torus7();
        for v in 0..7 {
            let link = t.link(v);
            for (k, &f) in t.star(v).iter().enumerate() {
                let (a, b) = corner_neighbors(&t.faces()[f], v);
                assert_eq!((a, b), (link[k], link[(k + 1) % link.len()]));
            }
        }
    }
}
