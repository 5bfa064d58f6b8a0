//! Radius solver: uniform-neighbor iteration with superstep extrapolation.
//!
//! Each sweep replaces the radius of every free vertex by the radius that
//! would give angle sum 2*pi if all its neighbors had the common radius
//! producing the current angle sum. Sweeps are Jacobi-style, so all vertices
//! are updated from the same snapshot and the sweep can run in parallel
//! without changing the result.

use std::f64::consts::PI;

use serde::Serialize;

use crate::geometry::{Complex, GeneralizedCircle, Point};
use crate::nerve::Nerve;
use crate::par::{self, Execution};

use super::normalize::center_on_sphere;
use super::{vertex_angle_sum, Geometry, Model, PackingError, PackingLabel};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub execution: Execution,
    /// Starting radii; all ones when absent.
    pub initial: Option<Vec<f64>>,
    /// Disable superstep extrapolation (plain iteration).
    pub plain: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iters: 1_000_000, execution: Execution::default(), initial: None, plain: false }
    }
}

/// Diagnostics of a successful solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub sweeps: usize,
    pub supersteps: usize,
    pub max_residual: f64,
}

/// Solves for radii whose angle sums are 2*pi at every vertex.
pub fn solve_packing_label(
    nerve: &Nerve,
    geometry: Geometry,
    opts: &SolverOptions,
) -> Result<(PackingLabel, SolveReport), PackingError> {
    let expected = Geometry::for_genus(nerve.genus());
    if geometry != expected {
        return Err(PackingError::GenusMismatch { genus: nerve.genus(), geometry });
    }
    if !(opts.tol > 0.0) {
        return Err(PackingError::InvalidLabel(format!("tolerance {} is not positive", opts.tol)));
    }
    if let Some(init) = &opts.initial {
        if init.len() != nerve.vertex_count() || init.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(PackingError::InvalidLabel("initial radii must be positive, one per vertex".into()));
        }
    }
    match geometry {
        Geometry::Euclidean => {
            let free = vec![true; nerve.vertex_count()];
            let init = opts.initial.clone().unwrap_or_else(|| vec![1.0; nerve.vertex_count()]);
            let (radii, report) = iterate(nerve, Geometry::Euclidean, init, &free, opts)?;
            Ok((PackingLabel::new(Geometry::Euclidean, normalize_scale(radii))?, report))
        }
        Geometry::Hyperbolic => {
            let free = vec![true; nerve.vertex_count()];
            let init = opts.initial.clone().unwrap_or_else(|| vec![1.0; nerve.vertex_count()]);
            let (radii, report) = iterate(nerve, Geometry::Hyperbolic, init, &free, opts)?;
            Ok((PackingLabel::new(Geometry::Hyperbolic, radii)?, report))
        }
        Geometry::Spherical => solve_sphere(nerve, opts),
    }
}

/// Scales Euclidean radii to unit geometric mean.
fn normalize_scale(mut radii: Vec<f64>) -> Vec<f64> {
    let mean = radii.iter().map(|r| r.ln()).sum::<f64>() / radii.len() as f64;
    let s = (-mean).exp();
    radii.iter_mut().for_each(|r| *r *= s);
    radii
}

fn max_residual(nerve: &Nerve, g: Geometry, radii: &[f64], free: &[bool], exec: Execution) -> f64 {
    par::max_range(exec, nerve.vertex_count(), |v| {
        if free[v] {
            (vertex_angle_sum(nerve, g, radii, v) - 2.0 * PI).abs()
        } else {
            0.0
        }
    })
}

/// Uniform-neighbor update for one vertex.
fn update(nerve: &Nerve, g: Geometry, radii: &[f64], v: usize) -> f64 {
    let k = nerve.degree(v) as f64;
    let theta = vertex_angle_sum(nerve, g, radii, v);
    let beta = (theta / (2.0 * k)).sin();
    let delta = (PI / k).sin();
    let r = radii[v];
    match g {
        Geometry::Euclidean => {
            let u = r * beta / (1.0 - beta);
            u * (1.0 - delta) / delta
        }
        Geometry::Hyperbolic => {
            // s = e^{-r}; uniform neighbor q = s_u^2 solves
            // beta = s (1 - q) / (1 - s^2 q).
            let s = (-r).exp();
            let q = ((s - beta) / (s * (1.0 - beta * s))).clamp(0.0, 1.0);
            let sn = 2.0 * delta / ((1.0 - q) + ((1.0 - q).powi(2) + 4.0 * delta * delta * q).sqrt());
            -sn.ln()
        }
        Geometry::Spherical => unreachable!("spherical labels are not iterated directly"),
    }
}

fn iterate(
    nerve: &Nerve,
    g: Geometry,
    mut radii: Vec<f64>,
    free: &[bool],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport), PackingError> {
    let exec = opts.execution;
    // Converge well below the requested tolerance; the last digits are
    // limited by rounding in the angle sums.
    let target = (opts.tol * 1e-2).max(64.0 * f64::EPSILON);
    let mut residual = max_residual(nerve, g, &radii, free, exec);
    let mut trace = vec![(0, residual)];
    let mut prev_step: Option<Vec<f64>> = None;
    let mut supersteps = 0;
    let mut best = residual;
    let mut since_best = 0;
    let mut sweep = 0;
    while sweep < opts.max_iters && residual > target {
        sweep += 1;
        let next: Vec<f64> =
            par::map_range(exec, radii.len(), |v| if free[v] { update(nerve, g, &radii, v) } else { radii[v] });
        let mut next = if g == Geometry::Euclidean { normalize_scale(next) } else { next };
        let step: Vec<f64> =
            (0..radii.len()).map(|v| if free[v] { next[v].ln() - radii[v].ln() } else { 0.0 }).collect();
        let mut next_res = max_residual(nerve, g, &next, free, exec);

        if let (Some(prev), false) = (&prev_step, opts.plain) {
            if let Some(factor) = extrapolation_factor(prev, &step) {
                let trial: Vec<f64> = (0..radii.len())
                    .map(|v| if free[v] { next[v] * (factor * step[v]).exp() } else { next[v] })
                    .collect();
                let trial = if g == Geometry::Euclidean { normalize_scale(trial) } else { trial };
                let trial_res = max_residual(nerve, g, &trial, free, exec);
                if trial_res < next_res {
                    next = trial;
                    next_res = trial_res;
                    supersteps += 1;
                }
            }
        }
        prev_step = Some(step);
        radii = next;
        residual = next_res;
        if residual < best * (1.0 - 1e-3) {
            best = residual;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if sweep % 1000 == 0 {
            trace.push((sweep, residual));
        }
        // Stagnation at rounding level.
        if since_best > 2000 && residual < opts.tol {
            break;
        }
    }
    trace.push((sweep, residual));
    if !(residual < opts.tol) {
        return Err(PackingError::NonConvergence { iterations: sweep, residual, trace });
    }
    Ok((radii, SolveReport { sweeps: sweep, supersteps, max_residual: residual }))
}

/// Geometric-series extrapolation when two consecutive steps are nearly
/// parallel and shrinking.
fn extrapolation_factor(prev: &[f64], step: &[f64]) -> Option<f64> {
    let dot: f64 = prev.iter().zip(step).map(|(a, b)| a * b).sum();
    let n0 = prev.iter().map(|a| a * a).sum::<f64>().sqrt();
    let n1 = step.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n0 == 0.0 || n1 == 0.0 {
        return None;
    }
    let cos = dot / (n0 * n1);
    let lambda = n1 / n0;
    (cos > 0.999 && lambda < 0.999).then(|| (lambda / (1.0 - lambda)).min(1e4))
}

/// Genus zero: remove the vertex of largest degree, pack the rest in the
/// disk with its neighbors as horocycles (the unit circle then plays the
/// removed circle), and read off spherical radii after centering.
fn solve_sphere(nerve: &Nerve, opts: &SolverOptions) -> Result<(PackingLabel, SolveReport), PackingError> {
    let n = nerve.vertex_count();
    let infinity = (0..n).max_by_key(|&v| (nerve.degree(v), std::cmp::Reverse(v))).expect("nonempty nerve");
    let mut free = vec![true; n];
    let mut radii = vec![1.0; n];
    free[infinity] = false;
    for &u in nerve.link(infinity) {
        free[u] = false;
        radii[u] = f64::INFINITY;
    }
    if let Some(init) = &opts.initial {
        for v in 0..n {
            if free[v] {
                radii[v] = init[v];
            }
        }
    }
    radii[infinity] = f64::INFINITY;

    let report = if free.iter().any(|&f| f) {
        iterate(nerve, Geometry::Hyperbolic, radii.clone(), &free, opts).map(|(r, rep)| {
            radii = r;
            rep
        })?
    } else {
        SolveReport { sweeps: 0, supersteps: 0, max_residual: 0.0 }
    };

    let circles = disk_layout(nerve, &radii, infinity)?;
    let spherical = spherical_radii(nerve, &circles, opts.execution)?;
    let label = PackingLabel::new(Geometry::Spherical, spherical)?;
    let all = vec![true; n];
    let residual = max_residual(nerve, Geometry::Spherical, &label.radii, &all, opts.execution);
    if !(residual < opts.tol) {
        return Err(PackingError::NonConvergence {
            iterations: report.sweeps,
            residual,
            trace: vec![(report.sweeps, residual)],
        });
    }
    Ok((label, SolveReport { max_residual: residual, ..report }))
}

/// Develops the disk packing of a genus-zero nerve with `infinity` removed;
/// the removed vertex gets the reversed unit circle.
fn disk_layout(nerve: &Nerve, radii: &[f64], infinity: usize) -> Result<Vec<GeneralizedCircle>, PackingError> {
    let faces = nerve.faces();
    let allowed: Vec<bool> = faces.iter().map(|f| !f.contains(&infinity)).collect();
    let Some(first) = allowed.iter().position(|&a| a) else {
        return Err(PackingError::Degenerate("every face meets the removed vertex".into()));
    };
    let mut circles: Vec<Option<GeneralizedCircle>> = vec![None; nerve.vertex_count()];
    let dev = super::layout::develop_faces(nerve, radii, Model::Disk, first, &allowed)?;
    for (f, fc) in dev.circles.iter().enumerate() {
        if let Some(fc) = fc {
            for k in 0..3 {
                circles[faces[f][k]].get_or_insert(fc[k]);
            }
        }
    }
    circles[infinity] = Some(GeneralizedCircle::from_center_radius(Complex::new(0.0, 0.0), 1.0).reversed());
    circles
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| PackingError::Degenerate(format!("vertex {v} was not reached"))))
        .collect()
}

/// Centers the packing on the sphere (tangency points have zero mean) and
/// returns the angular radii of the caps.
fn spherical_radii(nerve: &Nerve, circles: &[GeneralizedCircle], exec: Execution) -> Result<Vec<f64>, PackingError> {
    let points: Vec<Point> = nerve
        .edges()
        .iter()
        .map(|&[u, v]| crate::geometry::tangency_point(&circles[u], &circles[v], 1e-6))
        .collect::<Result<_, _>>()?;
    let m = center_on_sphere(&points);
    par::map_slice(exec, circles, |c| m.apply_circle(c).map(|img| img.to_spherical_cap().1))
        .into_iter()
        .collect::<Result<Vec<f64>, _>>()
        .map_err(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nerve::generate::{genus2, octahedron, tetrahedron, torus7};
    use crate::nerve::subdivide_with_dimer;

    #[test]
    fn torus_label_is_uniform() {
        let (label, rep) = solve_packing_label(&torus7(), Geometry::Euclidean, &SolverOptions::default()).unwrap();
        assert!(label.radii.iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(rep.max_residual < 1e-12);
    }

    #[test]
    fn geometry_must_match_genus() {
        let err = solve_packing_label(&torus7(), Geometry::Hyperbolic, &SolverOptions::default());
        assert!(matches!(err, Err(PackingError::GenusMismatch { genus: 1, .. })));
        let err = solve_packing_label(&tetrahedron(), Geometry::Euclidean, &SolverOptions::default());
        assert!(matches!(err, Err(PackingError::GenusMismatch { genus: 0, .. })));
    }

    #[test]
    fn symmetric_sphere_packings() {
        for nerve in [tetrahedron(), octahedron()] {
            let (label, rep) = solve_packing_label(&nerve, Geometry::Spherical, &SolverOptions::default()).unwrap();
            let r0 = label.radii[0];
            assert!(label.radii.iter().all(|r| (r - r0).abs() < 1e-9), "{:?}", label.radii);
            assert!(rep.max_residual < 1e-10);
        }
    }

    #[test]
    fn subdivided_and_hyperbolic_solves_converge() {
        let (sub, _) = subdivide_with_dimer(&tetrahedron());
        let (_, rep) = solve_packing_label(&sub, Geometry::Spherical, &SolverOptions::default()).unwrap();
        assert!(rep.max_residual < 1e-10);
        let (_, rep) = solve_packing_label(&genus2(), Geometry::Hyperbolic, &SolverOptions::default()).unwrap();
        assert!(rep.max_residual < 1e-10);
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let (sub, _) = subdivide_with_dimer(&genus2());
        let opts = SolverOptions { max_iters: 3, ..SolverOptions::default() };
        match solve_packing_label(&sub, Geometry::Hyperbolic, &opts) {
            Err(PackingError::NonConvergence { iterations, trace, .. }) => {
                assert_eq!(iterations, 3);
                assert!(!trace.is_empty());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
