//! File formats. All JSON is written in canonical form: keys sorted,
//! two-space indentation, shortest round-trip float formatting and a
//! trailing newline, so equal values give byte-identical files.

use serde::{Deserialize, Serialize};

use crate::nerve::{Dimer, Nerve, NerveError};

/// On-disk nerve: `{"vertices": n, "faces": [[i, j, k], ...], "dimer": [...]}`.
/// Dimer entries index the canonical edge list (sorted endpoint pairs in
/// lexicographic order).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NerveFile {
    pub vertices: usize,
    pub faces: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimer: Option<Vec<usize>>,
}

impl NerveFile {
    pub fn from_nerve(nerve: &Nerve, dimer: Option<&Dimer>) -> Self {
        NerveFile {
            vertices: nerve.vertex_count(),
            faces: nerve.faces().to_vec(),
            dimer: dimer.map(|d| d.edges().to_vec()),
        }
    }

    /// Validates the nerve; the dimer is only range-checked here.
    pub fn into_nerve(self) -> Result<(Nerve, Option<Dimer>), NerveError> {
        let nerve = Nerve::new(self.vertices, self.faces)?;
        let dimer = match self.dimer {
            None => None,
            Some(edges) => {
                if let Some(&index) = edges.iter().find(|&&e| e >= nerve.edge_count()) {
                    return Err(NerveError::EdgeOutOfRange { index, count: nerve.edge_count() });
                }
                Some(Dimer::new(edges))
            }
        };
        Ok((nerve, dimer))
    }
}

pub fn parse_nerve(text: &str) -> Result<NerveFile, serde_json::Error> {
    serde_json::from_str(text)
}

/// Canonical JSON text of any serializable value.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String, serde_json::Error> {
    // Going through `Value` sorts object keys (serde_json's map is ordered).
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}
