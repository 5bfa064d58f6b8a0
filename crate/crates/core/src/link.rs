//! Fully augmented links read off the dual graph of a nerve with a dimer.
//!
//! Every matched arc of the cubic dual graph becomes a crossing circle and
//! every unmatched arc a strand arc. At a cubic node the matched arc is
//! followed, counterclockwise, by two unmatched arcs; we call them the
//! node's side 0 and side 1. Looking along the matched arc from one node to
//! the other, side 0 of the first node and side 1 of the second lie on the
//! same side, so without a half-twist the strands pass straight through the
//! crossing circle from side 0 to side 1 and from side 1 to side 0. A
//! half-twist swaps the two punctures, connecting equal sides instead.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nerve::DualGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkError {
    #[error("dual graph carries no perfect matching")]
    NotPerfect,
    #[error("diagram graph is disconnected")]
    Disconnected,
    #[error("crossing circle {0} does not exist")]
    NoSuchCircle(usize),
    #[error("{components} components remain but no crossing circle joins two of them")]
    NoMerge { components: usize },
}

/// One end of a strand arc, sitting at a cubic node of a crossing circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandEnd {
    pub circle: usize,
    /// 0 or 1: which end of the crossing circle's matched arc.
    pub node: usize,
    /// 0 or 1: counterclockwise position after the matched arc.
    pub side: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandArc {
    /// Dual arc (equivalently nerve edge) carrying the strand.
    pub arc: usize,
    pub ends: [StrandEnd; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingCircle {
    /// Matched dual arc, which is also the coloured nerve edge.
    pub arc: usize,
    /// Dual nodes (nerve faces) at the two ends of the matched arc.
    pub nodes: [usize; 2],
    /// Strand-end ids `2 * strand + k` at `[node][side]`.
    pub ends: [[usize; 2]; 2],
    pub half_twist: bool,
    /// Direction of the half-twist: +1 or -1, 0 without a twist.
    pub twist_sign: i8,
}

impl CrossingCircle {
    /// The two pairs of strand ends joined through the circle.
    pub fn pass_through(&self) -> [[usize; 2]; 2] {
        let e = self.ends;
        if self.half_twist {
            [[e[0][0], e[1][0]], [e[0][1], e[1][1]]]
        } else {
            [[e[0][0], e[1][1]], [e[0][1], e[1][0]]]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FALDiagram {
    pub genus: usize,
    pub crossing_circles: Vec<CrossingCircle>,
    pub strands: Vec<StrandArc>,
    /// Crossing circles toggled by [`reduce_to_knot`], in order.
    pub toggles: Vec<usize>,
}

/// Strand components of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentPartition {
    /// Strand arcs of each component in traversal order.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
}

impl ComponentPartition {
    /// Number of components that are not crossing circles.
    pub fn count(&self) -> usize {
        self.components.len()
    }
}

/// Draws the fully augmented link of a dual graph with perfect matching.
pub fn synth_fal(g: &DualGraph, genus: usize) -> Result<FALDiagram, LinkError> {
    if !g.is_perfect_matching() {
        return Err(LinkError::NotPerfect);
    }
    let matching = g.matching();
    let mut circle_of_node = vec![usize::MAX; g.node_count()];
    let mut node_slot = vec![0usize; g.node_count()];
    for (ci, &a) in matching.iter().enumerate() {
        for (k, &n) in g.arcs()[a].nodes.iter().enumerate() {
            circle_of_node[n] = ci;
            node_slot[n] = k;
        }
    }
    let mut circles: Vec<CrossingCircle> = matching
        .iter()
        .map(|&a| CrossingCircle {
            arc: a,
            nodes: g.arcs()[a].nodes,
            ends: [[usize::MAX; 2]; 2],
            half_twist: false,
            twist_sign: 0,
        })
        .collect();
    let mut strands = Vec::new();
    for (a, arc) in g.arcs().iter().enumerate() {
        if g.is_matched(a) {
            continue;
        }
        let s = strands.len();
        let mut ends = [StrandEnd { circle: 0, node: 0, side: 0 }; 2];
        for (k, &n) in arc.nodes.iter().enumerate() {
            let rot = g.rotation(n);
            let m = g.matched_arc(n).expect("perfect matching");
            let j = rot.iter().position(|&x| x == m).expect("matched arc at node");
            // The same arc can reach a node twice only through a loop, which
            // a nerve cannot produce.
            let side = if rot[(j + 1) % 3] == a { 0 } else { 1 };
            let circle = circle_of_node[n];
            let node = node_slot[n];
            ends[k] = StrandEnd { circle, node, side };
            circles[circle].ends[node][side] = 2 * s + k;
        }
        strands.push(StrandArc { arc: a, ends });
    }
    let fal = FALDiagram { genus, crossing_circles: circles, strands, toggles: Vec::new() };
    if !fal.is_connected() {
        return Err(LinkError::Disconnected);
    }
    Ok(fal)
}

impl FALDiagram {
    /// Connectivity of the four-valent diagram graph (crossing circles
    /// joined by strand arcs).
    pub fn is_connected(&self) -> bool {
        let n = self.crossing_circles.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for s in &self.strands {
            adj[s.ends[0].circle].push(s.ends[1].circle);
            adj[s.ends[1].circle].push(s.ends[0].circle);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Partner of every strand end through its crossing circle.
    fn through(&self) -> Vec<usize> {
        let mut through = vec![usize::MAX; 2 * self.strands.len()];
        for c in &self.crossing_circles {
            for [x, y] in c.pass_through() {
                through[x] = y;
                through[y] = x;
            }
        }
        through
    }

    /// Flips the half-twist at crossing circle `c`.
    pub fn toggle(&mut self, c: usize) -> Result<(), LinkError> {
        let circle = self.crossing_circles.get_mut(c).ok_or(LinkError::NoSuchCircle(c))?;
        circle.half_twist = !circle.half_twist;
        circle.twist_sign = if circle.half_twist { 1 } else { 0 };
        Ok(())
    }

    /// Total number of cusps: crossing circles plus strand components.
    pub fn cusp_count(&self) -> usize {
        self.crossing_circles.len() + trace_components(self).count()
    }
}

/// Follows strands through the crossing circles to find link components.
pub fn trace_components(f: &FALDiagram) -> ComponentPartition {
    let through = f.through();
    let mut component_of = vec![usize::MAX; f.strands.len()];
    let mut components = Vec::new();
    for start in 0..f.strands.len() {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut comp = Vec::new();
        // Enter `start` at end 0, leave at end 1, cross, repeat. Strand
        // edges and pass-throughs pair up the ends, so the walk is a cycle
        // and returns through end 0.
        let mut entry = 2 * start;
        loop {
            let s = entry / 2;
            component_of[s] = id;
            comp.push(s);
            entry = through[entry ^ 1];
            if entry == 2 * start {
                break;
            }
        }
        components.push(comp);
    }
    ComponentPartition { components, component_of }
}

/// Adds half-twists until a single strand component remains, always at the
/// lowest-indexed crossing circle whose two pass-throughs belong to distinct
/// components.
pub fn reduce_to_knot(f: &FALDiagram) -> Result<FALDiagram, LinkError> {
    if !f.is_connected() {
        return Err(LinkError::Disconnected);
    }
    let mut out = f.clone();
    loop {
        let part = trace_components(&out);
        if part.count() <= 1 {
            return Ok(out);
        }
        let merging = out.crossing_circles.iter().position(|c| {
            let [p, q] = c.pass_through();
            part.component_of[p[0] / 2] != part.component_of[q[0] / 2]
        });
        let Some(c) = merging else {
            return Err(LinkError::NoMerge { components: part.count() });
        };
        out.toggle(c)?;
        out.toggles.push(c);
    }
}
