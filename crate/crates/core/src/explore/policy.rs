//! Candidate plans and the two decision rules that choose among them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explore::grid::Cell;
use crate::explore::planner::PlannedPath;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Policy {
    /// Go to the frontier with the cheapest path.
    #[serde(rename = "closest")]
    ClosestFrontier,
    /// Go to the frontier whose predicted pose-graph has the highest D-optimality.
    #[serde(rename = "dopt")]
    GraphDopt,
}

impl Policy {
    pub const ALL: [Policy; 2] = [Policy::ClosestFrontier, Policy::GraphDopt];
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::ClosestFrontier => "closest",
            Policy::GraphDopt => "dopt",
        })
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "closest" | "closest-frontier" | "closest_frontier" => Ok(Policy::ClosestFrontier),
            "dopt" | "graph-dopt" | "graph_dopt" => Ok(Policy::GraphDopt),
            other => Err(Error::InvalidArgument(format!(
                "unknown policy {other:?} (expected closest or dopt)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidatePlan {
    /// Position of the frontier in the detector's sort order.
    pub frontier: usize,
    pub goal: Cell,
    pub path: PlannedPath,
    /// `ln D-opt` of the predicted graph; `None` when not evaluated.
    pub log_utility: Option<f64>,
}

/// Index of the chosen candidate; `None` when there is nothing to choose.
/// Ties go to the earliest candidate. Candidates whose utility is missing or
/// `-inf` are never chosen by the D-opt rule.
pub fn select_action(candidates: &[CandidatePlan], policy: Policy) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in candidates.iter().enumerate() {
        let score = match policy {
            Policy::ClosestFrontier => -c.path.cost,
            Policy::GraphDopt => match c.log_utility {
                Some(u) if u > f64::NEG_INFINITY => u,
                _ => continue,
            },
        };
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}
