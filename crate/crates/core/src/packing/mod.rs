//! Circle packings realizing a nerve: radii labels, the radius solver and
//! the developed layout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::nerve::{corner_neighbors, Nerve};

mod layout;
mod normalize;
mod place;
mod solver;

pub use layout::{develop_layout, diameter_report, DiameterReport, Layout, LayoutOptions, SidePairing};
pub use normalize::center_on_sphere;
pub use solver::{solve_packing_label, SolveReport, SolverOptions};

pub(crate) use layout::{index_in, star_charts};
pub(crate) use place::Model;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackingError {
    #[error("geometry {geometry} does not match genus {genus}")]
    GenusMismatch { genus: usize, geometry: Geometry },
    #[error("solver did not converge after {iterations} sweeps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64, trace: Vec<(usize, f64)> },
    #[error("holonomy residual {residual:e} exceeds tolerance {tol:e}")]
    Holonomy { residual: f64, tol: f64 },
    #[error("vertex {vertex} is not a vertex of the nerve")]
    NotIncident { vertex: usize },
    #[error("invalid label: {0}")]
    InvalidLabel(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Background geometry of a packing label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Euclidean,
    Hyperbolic,
    /// Genus zero: radii are angular radii on the unit sphere, computed
    /// through a Euclidean/hyperbolic solve in the disk.
    #[serde(rename = "sphere")]
    Spherical,
}

impl Geometry {
    /// The geometry a closed surface of the given genus carries.
    pub fn for_genus(genus: usize) -> Self {
        match genus {
            0 => Geometry::Spherical,
            1 => Geometry::Euclidean,
            _ => Geometry::Hyperbolic,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Geometry::Euclidean => "euclidean",
            Geometry::Hyperbolic => "hyperbolic",
            Geometry::Spherical => "sphere",
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Geometry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Geometry::Euclidean),
            "hyperbolic" => Ok(Geometry::Hyperbolic),
            "sphere" | "spherical" => Ok(Geometry::Spherical),
            other => Err(format!("unknown geometry {other:?}")),
        }
    }
}

/// Per-vertex radii in a background geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingLabel {
    pub geometry: Geometry,
    pub radii: Vec<f64>,
}

impl PackingLabel {
    pub fn new(geometry: Geometry, radii: Vec<f64>) -> Result<Self, PackingError> {
        if let Some((v, r)) = radii.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
            return Err(PackingError::InvalidLabel(format!("radius {r} at vertex {v}")));
        }
        Ok(PackingLabel { geometry, radii })
    }
}

/// Angle at the vertex with radius `rv` in the triangle formed by three
/// mutually tangent circles of radii `rv`, `ru`, `rw`.
///
/// Uses the half-angle form of the law of cosines. Hyperbolic radii may be
/// infinite (horocycles); the angle at a horocycle is zero.
pub fn corner_angle(geometry: Geometry, rv: f64, ru: f64, rw: f64) -> f64 {
    let sin2 = match geometry {
        Geometry::Euclidean => ru * rw / ((rv + ru) * (rv + rw)),
        Geometry::Hyperbolic => {
            if rv.is_infinite() {
                return 0.0;
            }
            let one_minus = |x: f64| -(-2.0 * x).exp_m1();
            (-2.0 * rv).exp() * one_minus(ru) * one_minus(rw) / (one_minus(rv + ru) * one_minus(rv + rw))
        }
        Geometry::Spherical => ru.sin() * rw.sin() / ((rv + ru).sin() * (rv + rw).sin()),
    };
    2.0 * sin2.clamp(0.0, 1.0).sqrt().asin()
}

/// Sum of the corner angles at `v` over its incident faces.
pub fn angle_sum(nerve: &Nerve, label: &PackingLabel, v: usize) -> Result<f64, PackingError> {
    if v >= nerve.vertex_count() || label.radii.len() != nerve.vertex_count() {
        return Err(PackingError::NotIncident { vertex: v });
    }
    Ok(vertex_angle_sum(nerve, label.geometry, &label.radii, v))
}

pub(crate) fn vertex_angle_sum(nerve: &Nerve, geometry: Geometry, radii: &[f64], v: usize) -> f64 {
    nerve
        .star(v)
        .iter()
        .map(|&f| {
            let (a, b) = corner_neighbors(&nerve.faces()[f], v);
            corner_angle(geometry, radii[v], radii[a], radii[b])
        })
        .sum()
}
