//! Predicted pose-graphs along candidate paths, scored by the D-optimality
//! of their weighted Laplacian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explore::grid::{Cell, CellState, OccupancyGrid};
use crate::graph::InfoMatrix;
use crate::sparse::SparseLaplacian;
use crate::spectral::{edge_weight, WeightScheme};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HallucinationConfig {
    /// Arc length between predicted nodes, metres.
    pub node_spacing: f64,
    /// Per-node information decay `δ`; node `s` is scaled by `δ^s`.
    pub decay: f64,
    /// Gain on the unknown fraction around a node.
    pub k_unknown: f64,
    /// Gain on the occupied fraction around a node.
    pub k_occupied: f64,
    /// Radius of the neighbourhood the fractions are taken over, metres.
    pub neighbourhood: f64,
    /// Occupied fraction above which a loop closure is predicted.
    pub loop_threshold: f64,
    /// Largest distance to the node a predicted loop closure attaches to.
    pub loop_attach_radius: f64,
    /// Most recent real nodes that predicted loop closures may not attach to.
    pub recent_exclusion: usize,
}

impl Default for HallucinationConfig {
    fn default() -> Self {
        Self {
            node_spacing: 1.0,
            decay: 0.95,
            k_unknown: 0.5,
            k_occupied: 1.0,
            neighbourhood: 3.0,
            loop_threshold: 0.05,
            loop_attach_radius: 2.0,
            recent_exclusion: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HallucinatedNode {
    pub position: (f64, f64),
    /// 1-based index along the path.
    pub step: usize,
    pub unknown_fraction: f64,
    pub occupied_fraction: f64,
    /// `D-opt(φ_s)` of the predicted odometry edge into this node.
    pub weight: f64,
    /// Real node a predicted loop closure attaches to.
    pub loop_to: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hallucination {
    pub laplacian: SparseLaplacian,
    pub nodes: Vec<HallucinatedNode>,
}

/// Fractions of `Unknown` and `Occupied` cells among the in-bounds cells
/// within `radius` of `p`.
pub fn neighbourhood_fractions(belief: &OccupancyGrid, p: (f64, f64), radius: f64) -> (f64, f64) {
    let disc = belief.disc(p.0, p.1, radius);
    if disc.is_empty() {
        return (0.0, 0.0);
    }
    let (mut u, mut o) = (0usize, 0usize);
    for c in &disc {
        match belief.get(*c) {
            CellState::Unknown => u += 1,
            CellState::Occupied => o += 1,
            CellState::Free => {}
        }
    }
    let k = disc.len() as f64;
    (u as f64 / k, o as f64 / k)
}

/// Positions every `spacing` metres of arc length along the polyline
/// (excluding its start), then its end point.
pub fn nodes_along(points: &[(f64, f64)], spacing: f64) -> Vec<(f64, f64)> {
    let Some(&end) = points.last() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut next = spacing;
    let mut walked = 0.0;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        while seg > 0.0 && next <= walked + seg {
            let t = (next - walked) / seg;
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
            next += spacing;
        }
        walked += seg;
    }
    // a node landing on the end point (up to rounding) is the goal node itself
    while let Some(&last) = out.last() {
        if ((last.0 - end.0).powi(2) + (last.1 - end.1).powi(2)).sqrt() < 1e-9 * spacing.max(1.0) {
            out.pop();
        } else {
            break;
        }
    }
    out.push(end);
    out
}

/// Extends `current` (whose last node is the robot's latest pose) with a chain
/// of predicted nodes along `path`.
///
/// Predicted edge `s` carries `φ_s = last_phi · δ^s · (1 + k_u u_s)(1 + k_o o_s)`
/// and weight `D-opt(φ_s)`; a node whose occupied fraction exceeds the
/// threshold also gets an edge of the same weight to the nearest old real
/// node within the attach radius. `positions` are the real nodes' positions.
pub fn hallucinate_graph(
    current: &SparseLaplacian,
    positions: &[(f64, f64)],
    path: &[Cell],
    belief: &OccupancyGrid,
    last_phi: &InfoMatrix,
    cfg: &HallucinationConfig,
) -> Result<Hallucination> {
    if path.is_empty() {
        return Err(Error::InvalidArgument("hallucination needs a non-empty path".into()));
    }
    if current.n() == 0 || positions.len() != current.n() {
        return Err(Error::InvalidArgument(format!(
            "{} positions for a graph of {} nodes",
            positions.len(),
            current.n()
        )));
    }
    let points: Vec<(f64, f64)> = path.iter().map(|&c| belief.center(c)).collect();
    let n_real = current.n();
    let attachable = n_real.saturating_sub(cfg.recent_exclusion);
    let mut lap = current.clone();
    let mut nodes = Vec::new();
    let mut prev = n_real - 1;
    for (i, p) in nodes_along(&points, cfg.node_spacing).into_iter().enumerate() {
        let step = i + 1;
        let (u, o) = neighbourhood_fractions(belief, p, cfg.neighbourhood);
        let scale = cfg.decay.powi(step as i32) * (1.0 + cfg.k_unknown * u) * (1.0 + cfg.k_occupied * o);
        let weight = edge_weight(&last_phi.scaled(scale), WeightScheme::Matched(0.0))?;
        let id = lap.add_vertex();
        lap.add_edge(prev, id, weight);
        let loop_to = if o > cfg.loop_threshold {
            let r2 = cfg.loop_attach_radius * cfg.loop_attach_radius;
            positions[..attachable]
                .iter()
                .enumerate()
                .map(|(j, q)| (j, (q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)))
                .filter(|&(_, d2)| d2 <= r2)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(j, _)| j)
        } else {
            None
        };
        if let Some(j) = loop_to {
            lap.add_edge(j, id, weight);
        }
        nodes.push(HallucinatedNode {
            position: p,
            step,
            unknown_fraction: u,
            occupied_fraction: o,
            weight,
            loop_to,
        });
        prev = id;
    }
    Ok(Hallucination { laplacian: lap, nodes })
}

/// `ln D-opt(L_w) = (ln n + ln t̃(G)) / n`; `-inf` when disconnected.
pub fn log_utility_dopt(l: &SparseLaplacian) -> f64 {
    let n = l.n() as f64;
    let log_t = l.log_det_reduced();
    if log_t == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    (n.ln() + log_t) / n
}

/// `D-opt(L_w) = (n·t̃(G))^(1/n)`, evaluated in the log domain.
pub fn utility_dopt(l: &SparseLaplacian) -> f64 {
    log_utility_dopt(l).exp()
}
