//! Dijkstra planning on the belief grid: 8-connected, diagonal steps cost
//! `√2` cells, diagonals may not cut the corner of a blocked cell.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::explore::grid::{Cell, CellState, OccupancyGrid};

pub const NEIGHBOURS8: [(isize, isize); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

#[derive(Clone, Debug, PartialEq)]
pub struct PlannedPath {
    /// Start to goal inclusive.
    pub cells: Vec<Cell>,
    /// Length in metres.
    pub cost: f64,
}

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    index: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest paths from one cell over known-free space.
#[derive(Clone, Debug)]
pub struct DistanceField {
    width: usize,
    resolution: f64,
    cost: Vec<f64>,
    parent: Vec<usize>,
}

impl DistanceField {
    /// Explores `Free` cells (plus `extra`, if given) from `start`.
    pub fn compute(belief: &OccupancyGrid, start: Cell, extra: Option<Cell>) -> Self {
        let n = belief.len();
        let passable = |c: Cell| belief.get(c) == CellState::Free || Some(c) == extra;
        let mut cost = vec![f64::INFINITY; n];
        let mut parent = vec![usize::MAX; n];
        let s = belief.index(start);
        cost[s] = 0.0;
        let mut heap = BinaryHeap::from([Entry { cost: 0.0, index: s }]);
        while let Some(Entry { cost: d, index }) = heap.pop() {
            if d > cost[index] {
                continue;
            }
            let c = belief.cell_at(index);
            if index != s && Some(c) == extra && belief.get(c) != CellState::Free {
                continue; // the extra goal cell is a sink
            }
            for &(dx, dy) in &NEIGHBOURS8 {
                let Some(nb) = belief.offset(c, dx, dy) else {
                    continue;
                };
                if !passable(nb) {
                    continue;
                }
                let diagonal = dx != 0 && dy != 0;
                if diagonal {
                    let side_a = belief.offset(c, dx, 0).is_some_and(passable);
                    let side_b = belief.offset(c, 0, dy).is_some_and(passable);
                    if !(side_a && side_b) {
                        continue;
                    }
                }
                let nd = d + if diagonal { std::f64::consts::SQRT_2 } else { 1.0 };
                let ni = belief.index(nb);
                if nd < cost[ni] {
                    cost[ni] = nd;
                    parent[ni] = index;
                    heap.push(Entry { cost: nd, index: ni });
                }
            }
        }
        Self {
            width: belief.width(),
            resolution: belief.resolution(),
            cost,
            parent,
        }
    }

    /// Path cost in metres; `None` if unreachable.
    pub fn cost_to(&self, goal: Cell) -> Option<f64> {
        let c = self.cost[goal.y * self.width + goal.x];
        c.is_finite().then_some(c * self.resolution)
    }

    pub fn path_to(&self, goal: Cell) -> Option<PlannedPath> {
        let cost = self.cost_to(goal)?;
        let mut i = goal.y * self.width + goal.x;
        let mut cells = vec![goal];
        while self.parent[i] != usize::MAX {
            i = self.parent[i];
            cells.push(Cell::new(i % self.width, i / self.width));
        }
        cells.reverse();
        Some(PlannedPath { cells, cost })
    }
}

/// Minimum-cost path from `start` to `goal` through `Free` cells (the goal
/// itself may be of any state but `Occupied`). `None` if unreachable.
pub fn plan_path(belief: &OccupancyGrid, start: Cell, goal: Cell) -> Option<PlannedPath> {
    if belief.get(goal) == CellState::Occupied {
        return None;
    }
    DistanceField::compute(belief, start, Some(goal)).path_to(goal)
}
