//! Standard nerves and random growth by local moves.

use rand::Rng;

use super::Nerve;

pub fn tetrahedron() -> Nerve {
    Nerve::new(4, vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]).expect("tetrahedron")
}

pub fn octahedron() -> Nerve {
    // Poles 0 and 5, equator 1..=4.
    let mut faces = Vec::new();
    for k in 0..4 {
        let (a, b) = (1 + k, 1 + (k + 1) % 4);
        faces.push([0, a, b]);
        faces.push([5, b, a]);
    }
    Nerve::new(6, faces).expect("octahedron")
}

/// The 7-vertex torus: every vertex has degree 6 and the 1-skeleton is K7.
pub fn torus7() -> Nerve {
    let mut faces = Vec::with_capacity(14);
    for i in 0..7 {
        faces.push([i, (i + 1) % 7, (i + 3) % 7]);
        faces.push([i, (i + 3) % 7, (i + 2) % 7]);
    }
    Nerve::new(7, faces).expect("7-vertex torus")
}

/// Genus-2 surface on 11 vertices: the connected sum of two copies of
/// [`torus7`] along the face `(0, 1, 3)`.
pub fn genus2() -> Nerve {
    let removed = [0, 1, 3];
    let a: Vec<[usize; 3]> = torus7().faces().iter().copied().filter(|f| *f != removed).collect();
    // The second copy is glued with the boundary triangle reversed.
    let relabel = |v: usize| match v {
        0 => 0,
        1 => 3,
        3 => 1,
        2 => 7,
        other => other + 4,
    };
    let b = torus7().faces().iter().filter(|f| **f != removed).map(|f| f.map(relabel)).collect::<Vec<_>>();
    Nerve::new(11, a.into_iter().chain(b).collect()).expect("genus-2 connected sum")
}

/// Inserts a vertex inside face `f`.
pub fn split_face(nerve: &Nerve, f: usize) -> Nerve {
    let m = nerve.vertex_count();
    let [i, j, k] = nerve.faces()[f];
    let mut faces = nerve.faces().to_vec();
    faces[f] = [i, j, m];
    faces.push([j, k, m]);
    faces.push([k, i, m]);
    Nerve::new(m + 1, faces).expect("face split keeps a valid nerve")
}

/// Flips edge `e` if the result is still a simplicial triangulation and
/// neither endpoint drops below degree 3.
pub fn flip_edge(nerve: &Nerve, e: usize) -> Option<Nerve> {
    let [u, v] = nerve.edges()[e];
    let [fl, fr] = nerve.edge_faces(e);
    let w = third(&nerve.faces()[fl], u, v);
    let x = third(&nerve.faces()[fr], u, v);
    if w == x || nerve.edge_index(w, x).is_some() || nerve.degree(u) <= 3 || nerve.degree(v) <= 3 {
        return None;
    }
    let mut faces = nerve.faces().to_vec();
    // fl reads (u, v, w) and fr reads (v, u, x) up to rotation.
    faces[fl] = [u, x, w];
    faces[fr] = [x, v, w];
    Nerve::new(nerve.vertex_count(), faces).ok()
}

fn third(face: &[usize; 3], u: usize, v: usize) -> usize {
    *face.iter().find(|&&x| x != u && x != v).expect("triangle")
}

/// Grows a nerve by `steps` random face splits interleaved with random edge
/// flips. The genus is preserved.
pub fn grow<R: Rng>(base: &Nerve, steps: usize, rng: &mut R) -> Nerve {
    let mut n = base.clone();
    for _ in 0..steps {
        let f = rng.gen_range(0..n.face_count());
        n = split_face(&n, f);
        for _ in 0..2 {
            let e = rng.gen_range(0..n.edge_count());
            if let Some(flipped) = flip_edge(&n, e) {
                n = flipped;
            }
        }
    }
    n
}
