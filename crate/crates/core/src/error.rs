//! Top-level error type and process exit codes.

use thiserror::Error;

use crate::filling::FillingError;
use crate::geometry::GeometryError;
use crate::link::LinkError;
use crate::nerve::NerveError;
use crate::packing::PackingError;
use crate::render::RenderError;
use crate::scoop::ScoopError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {what}: {message}")]
    Parse { what: String, message: String },
    #[error("invalid input: {0}")]
    Validation(String),
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Scoop(#[from] ScoopError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Filling(#[from] FillingError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("certificate failed: circles {deficient:?} receive fewer than {required} crossings")]
    Certificate { deficient: Vec<usize>, required: u64 },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl Error {
    /// 2 parse, 3 validation, 4 numeric non-convergence, 5 audit failure,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Validation(_) | Error::Nerve(_) | Error::Filling(_) => 3,
            Error::Packing(e) => match e {
                PackingError::NonConvergence { .. } => 4,
                PackingError::Holonomy { .. } | PackingError::Geometry(_) | PackingError::Degenerate(_) => 5,
                PackingError::GenusMismatch { .. }
                | PackingError::NotIncident { .. }
                | PackingError::InvalidLabel(_) => 3,
            },
            Error::Scoop(ScoopError::Nerve(_) | ScoopError::InvalidDimer) => 3,
            Error::Geometry(_) | Error::Scoop(_) | Error::Link(_) | Error::Certificate { .. } => 5,
            Error::Render(_) | Error::Io { .. } => 1,
        }
    }
}
