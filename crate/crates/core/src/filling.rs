//! Dehn filling of the crossing circles: crossing counts, normalized
//! lengths, the universal crossing threshold and the bilipschitz
//! certificate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FillingError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("crossing count must be at least 1")]
    ZeroCrossings,
    #[error("empty list of lengths")]
    Empty,
    #[error("plan was computed for different parameters")]
    ParameterMismatch,
}

fn positive(name: &'static str, value: f64) -> Result<f64, FillingError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(FillingError::NonPositive { name, value })
    }
}

/// Constants of the universal crossing bound.
pub const LENGTH_COEFF: f64 = 107.6;
pub const LOG_COEFF: f64 = 45.20;
pub const OFFSET: f64 = 14.41;

/// Cusp of a crossing circle: two copies of a rectangle with white side `w`
/// and black side `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspShape {
    pub w: f64,
    pub b: f64,
    pub half_twist: bool,
}

/// Crossings added by `1/n` filling: `|2n|`, or `|2n + 1|` at a half-twist.
pub fn crossing_count(n: i64, half_twist: bool) -> u64 {
    if half_twist {
        (2 * n + 1).unsigned_abs()
    } else {
        (2 * n).unsigned_abs()
    }
}

/// Normalized length `sqrt(w/2b + c^2 b/2w)` of the slope adding `c`
/// crossings. Always at least `sqrt(c)`, with equality iff `w/b = c`.
pub fn normalized_length(shape: &CuspShape, c: u64) -> Result<f64, FillingError> {
    let w = positive("w", shape.w)?;
    let b = positive("b", shape.b)?;
    if c == 0 {
        return Err(FillingError::ZeroCrossings);
    }
    let c = c as f64;
    Ok((w / (2.0 * b) + c * c * b / (2.0 * w)).sqrt())
}

/// `L` with `1/L^2 = sum 1/L_i^2`.
pub fn aggregate_length(lengths: &[f64]) -> Result<f64, FillingError> {
    if lengths.is_empty() {
        return Err(FillingError::Empty);
    }
    let mut s = 0.0;
    for &l in lengths {
        s += 1.0 / (positive("length", l)?).powi(2);
    }
    Ok(1.0 / s.sqrt())
}

/// Smallest filling integer of each parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityChoice {
    pub n: i64,
    pub crossings: u64,
}

/// Universal crossing threshold for `n_circles` crossing circles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// `max{107.6/delta^2 + 14.41, 45.20/(delta^{5/2} ln(1+eps)) + 14.41}`,
    /// the bound on the squared aggregate normalized length.
    pub length_sq_bound: f64,
    /// `n_circles * length_sq_bound` before rounding.
    pub raw: f64,
    /// Crossings each twist region needs: `ceil(raw)`.
    pub crossings: u64,
    /// Minimal filling without a half-twist (even count).
    pub untwisted: ParityChoice,
    /// Minimal filling at a half-twist of positive direction (odd count).
    pub twisted: ParityChoice,
}

/// Crossings per twist region guaranteeing a `(1+eps)`-bilipschitz
/// inclusion on the `delta`-thick part. Logarithms are natural.
pub fn min_crossings(epsilon: f64, delta: f64, n_circles: usize) -> Result<Threshold, FillingError> {
    positive("epsilon", epsilon)?;
    positive("delta", delta)?;
    if n_circles == 0 {
        return Err(FillingError::NonPositive { name: "number of crossing circles", value: 0.0 });
    }
    let first = LENGTH_COEFF / (delta * delta) + OFFSET;
    let second = LOG_COEFF / (delta.powf(2.5) * epsilon.ln_1p()) + OFFSET;
    let length_sq_bound = first.max(second);
    let raw = n_circles as f64 * length_sq_bound;
    let crossings = raw.ceil() as u64;
    Ok(Threshold {
        length_sq_bound,
        raw,
        crossings,
        untwisted: filling_for(crossings, false, 1),
        twisted: filling_for(crossings, true, 1),
    })
}

/// Smallest `|n|` with the sign of `sign` whose crossing count reaches `c`.
pub fn filling_for(c: u64, half_twist: bool, sign: i8) -> ParityChoice {
    let c = c.max(1) as i64;
    let n = match (half_twist, sign < 0) {
        (false, false) => (c + 1) / 2,
        (false, true) => -((c + 1) / 2),
        // 2n + 1 >= c
        (true, false) => c / 2,
        // -(2n + 1) >= c
        (true, true) => -((c + 2) / 2),
    };
    ParityChoice { n, crossings: crossing_count(n, half_twist) }
}

/// One row of a filling plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePlan {
    pub circle: usize,
    pub shape: CuspShape,
    pub n: i64,
    pub crossings: u64,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopePlan {
    pub epsilon: f64,
    pub big_r: f64,
    pub delta: f64,
    pub threshold: Threshold,
    pub circles: Vec<CirclePlan>,
    pub aggregate_length: f64,
}

/// Fills every crossing circle with the smallest slope reaching the
/// threshold. `signs` gives the half-twist direction at each circle.
pub fn plan(
    epsilon: f64,
    big_r: f64,
    delta: f64,
    shapes: &[CuspShape],
    signs: &[i8],
) -> Result<SlopePlan, FillingError> {
    positive("R", big_r)?;
    let threshold = min_crossings(epsilon, delta, shapes.len())?;
    let circles: Vec<CirclePlan> = shapes
        .iter()
        .enumerate()
        .map(|(i, shape)| {
            let sign = signs.get(i).copied().unwrap_or(1);
            let choice = filling_for(threshold.crossings, shape.half_twist, sign);
            Ok(CirclePlan {
                circle: i,
                shape: *shape,
                n: choice.n,
                crossings: choice.crossings,
                length: normalized_length(shape, choice.crossings)?,
            })
        })
        .collect::<Result<_, FillingError>>()?;
    let lengths: Vec<f64> = circles.iter().map(|c| c.length).collect();
    Ok(SlopePlan { epsilon, big_r, delta, threshold, aggregate_length: aggregate_length(&lengths)?, circles })
}

/// Outcome of checking a plan against the universal crossing bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub passed: bool,
    pub epsilon: f64,
    pub big_r: f64,
    pub delta: f64,
    pub n_circles: usize,
    /// Crossings every twist region must receive.
    pub required_crossings: u64,
    pub min_crossings: u64,
    /// Circles below the requirement.
    pub deficient: Vec<usize>,
    /// Squared aggregate normalized length of the plan.
    pub aggregate_length_sq: f64,
    /// `C / n` with `C` the smallest count over circles; a lower bound for
    /// the squared aggregate length.
    pub guaranteed_length_sq: f64,
    /// The squared length the effective filling theorem asks for.
    pub required_length_sq: f64,
    /// Distortion of the filling inclusion on the thick part.
    pub filling_bilipschitz: f64,
    /// Distortion of the approximating ball in the link complement.
    pub approximation_bilipschitz: f64,
    /// `(1 + eps)^2`.
    pub composite_bilipschitz: f64,
    /// Quasiconformal constant `K` with `K^{3/2} = 1 + eps`.
    pub qc_constant: f64,
    pub steps: Vec<String>,
}

/// Checks that every twist region receives at least the threshold number
/// of crossings and records the chain of bounds behind the verdict.
pub fn certificate(epsilon: f64, big_r: f64, delta: f64, plan: &SlopePlan) -> Result<Certificate, FillingError> {
    positive("R", big_r)?;
    if plan.epsilon != epsilon || plan.delta != delta || plan.big_r != big_r {
        return Err(FillingError::ParameterMismatch);
    }
    let n = plan.circles.len();
    let threshold = min_crossings(epsilon, delta, n)?;
    let required = threshold.crossings;
    let deficient: Vec<usize> = plan.circles.iter().filter(|c| c.crossings < required).map(|c| c.circle).collect();
    let min_c = plan.circles.iter().map(|c| c.crossings).min().unwrap_or(0);
    let lengths: Vec<f64> =
        plan.circles.iter().map(|c| normalized_length(&c.shape, c.crossings)).collect::<Result<_, _>>()?;
    let aggregate = aggregate_length(&lengths)?;
    let passed = deficient.is_empty();
    let one = 1.0 + epsilon;
    let guaranteed = min_c as f64 / n as f64;
    let steps = vec![
        format!("every crossing circle receives c_i >= {min_c} crossings (required {required})"),
        format!("normalized lengths satisfy L_i^2 >= c_i, so L^2 >= C/n = {guaranteed:.6}"),
        format!(
            "L^2 >= {:.6} gives a {one:.6}-bilipschitz filling inclusion on B(p, {big_r})",
            threshold.length_sq_bound
        ),
        format!("the ball itself is {one:.6}-bilipschitz to B(p, {big_r}), from a K-quasiconformal deformation with K^(3/2) = {one:.6}"),
        format!("composite distortion (1 + eps)^2 = {:.6}", one * one),
    ];
    Ok(Certificate {
        passed,
        epsilon,
        big_r,
        delta,
        n_circles: n,
        required_crossings: required,
        min_crossings: min_c,
        deficient,
        aggregate_length_sq: aggregate * aggregate,
        guaranteed_length_sq: guaranteed,
        required_length_sq: threshold.length_sq_bound,
        filling_bilipschitz: one,
        approximation_bilipschitz: one,
        composite_bilipschitz: one * one,
        qc_constant: one.powf(2.0 / 3.0),
        steps,
    })
}
