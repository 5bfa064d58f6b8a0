#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use falforge::link::{synth_fal, FALDiagram};
use falforge::nerve::generate::{genus2, grow, octahedron, tetrahedron, torus7};
use falforge::nerve::{dual_with_matching, subdivide_with_dimer, Dimer, Nerve};
use falforge::packing::{
    develop_layout, solve_packing_label, Geometry, Layout, LayoutOptions, PackingLabel, SolverOptions,
};

/// Base seed for randomized tests; `FALFORGE_SEED` overrides it.
pub fn seed() -> u64 {
    std::env::var("FALFORGE_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(20_240_917)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

/// The four nerves every numerical criterion is checked on.
pub fn reference_nerves() -> Vec<(&'static str, Nerve)> {
    vec![
        ("tetrahedron", tetrahedron()),
        ("subdivided tetrahedron", subdivide_with_dimer(&tetrahedron()).0),
        ("7-vertex torus", torus7()),
        ("genus 2", genus2()),
    ]
}

/// Nerves with dimers, of every genus, from subdivision.
pub fn dimer_nerves() -> Vec<(&'static str, Nerve, Dimer)> {
    let mut r = rng(1);
    let bases = [
        ("tetrahedron", tetrahedron()),
        ("octahedron", octahedron()),
        ("grown sphere", grow(&tetrahedron(), 10, &mut r)),
        ("7-vertex torus", torus7()),
        ("grown torus", grow(&torus7(), 8, &mut r)),
        ("genus 2", genus2()),
    ];
    bases
        .into_iter()
        .map(|(name, n)| {
            let (s, d) = subdivide_with_dimer(&n);
            (name, s, d)
        })
        .collect()
}

pub fn pack(nerve: &Nerve) -> (PackingLabel, Layout) {
    let (label, _) = solve_packing_label(nerve, Geometry::for_genus(nerve.genus()), &SolverOptions::default()).unwrap();
    let layout = develop_layout(nerve, &label, &LayoutOptions::default()).unwrap();
    (label, layout)
}

/// Corner angle from the law of cosines, rewritten with the side lengths
/// `a = rv + ru`, `b = rv + rw`, `c = ru + rw` and `s = rv + ru + rw` as
///
///   cos = (S(s) S(rv) - S(ru) S(rw)) / (S(a) S(b))
///   sin = 2 sqrt(S(s) S(rv) S(ru) S(rw)) / (S(a) S(b))
///
/// with `S` the identity, sinh or sin. These product forms avoid the
/// cancellation of the textbook forms when radii are small.
pub fn oracle_corner(g: Geometry, rv: f64, ru: f64, rw: f64) -> f64 {
    let s: fn(f64) -> f64 = match g {
        Geometry::Euclidean => |x| x,
        Geometry::Hyperbolic => f64::sinh,
        Geometry::Spherical => f64::sin,
    };
    let total = rv + ru + rw;
    let cos = s(total) * s(rv) - s(ru) * s(rw);
    let sin = 2.0 * (s(total) * s(rv) * s(ru) * s(rw)).sqrt();
    // Both carry the same positive denominator S(a) S(b).
    sin.atan2(cos)
}

/// Largest |angle sum - 2 pi|, summing over the raw face list.
pub fn oracle_residual(n: &Nerve, label: &PackingLabel) -> f64 {
    let mut sums = vec![0.0; n.vertex_count()];
    for f in n.faces() {
        for k in 0..3 {
            let r = |j: usize| label.radii[f[(k + j) % 3]];
            sums[f[k]] += oracle_corner(label.geometry, r(0), r(1), r(2));
        }
    }
    sums.iter().map(|s| (s - 2.0 * PI).abs()).fold(0.0, f64::max)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Component label of every strand arc, by brute-force union-find over
/// strand ends: the two ends of an arc, and ends joined through a circle.
pub fn oracle_components(f: &FALDiagram) -> (usize, Vec<usize>) {
    let mut uf = UnionFind::new(2 * f.strands.len());
    for s in 0..f.strands.len() {
        uf.union(2 * s, 2 * s + 1);
    }
    for c in &f.crossing_circles {
        for [x, y] in c.pass_through() {
            uf.union(x, y);
        }
    }
    let roots: Vec<usize> = (0..f.strands.len()).map(|s| uf.find(2 * s)).collect();
    let mut distinct = roots.clone();
    distinct.sort();
    distinct.dedup();
    (distinct.len(), roots)
}

pub fn random_diagram(r: &mut impl Rng) -> FALDiagram {
    let base = match r.gen_range(0..3) {
        0 => tetrahedron(),
        1 => torus7(),
        _ => genus2(),
    };
    let steps = r.gen_range(0..12);
    let n = grow(&base, steps, r);
    let (s, d) = subdivide_with_dimer(&n);
    let mut f = synth_fal(&dual_with_matching(&s, &d).unwrap(), s.genus()).unwrap();
    for c in 0..f.crossing_circles.len() {
        if r.gen_bool(0.3) {
            f.toggle(c).unwrap();
        }
    }
    f.toggles.clear();
    f
}
