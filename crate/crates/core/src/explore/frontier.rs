//! Frontier cells (known-free cells bordering unknown space) grouped into clusters.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::explore::grid::{Cell, CellState, OccupancyGrid};

pub const DEFAULT_MIN_FRONTIER: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    /// Mean of the member cell centres, metres.
    pub centroid: (f64, f64),
    /// Member cells in row-major order.
    pub cells: Vec<Cell>,
    /// Member closest to the centroid; the navigation goal.
    pub goal: Cell,
}

impl Frontier {
    pub fn size(&self) -> usize {
        self.cells.len()
    }
}

pub fn is_frontier_cell(belief: &OccupancyGrid, c: Cell) -> bool {
    belief.get(c) == CellState::Free
        && belief.neighbours4(c).any(|n| belief.get(n) == CellState::Unknown)
}

/// 8-connected clusters of frontier cells with at least `min_size` members,
/// largest first; equal sizes ordered by centroid `y`, then `x`. Cells in
/// `exclude` are never frontier cells.
pub fn detect_frontiers(belief: &OccupancyGrid, min_size: usize, exclude: &HashSet<Cell>) -> Vec<Frontier> {
    let is_member = |c: Cell| is_frontier_cell(belief, c) && !exclude.contains(&c);
    let mut seen = vec![false; belief.len()];
    let mut out = Vec::new();
    for start in 0..belief.len() {
        let c0 = belief.cell_at(start);
        if seen[start] || !is_member(c0) {
            continue;
        }
        seen[start] = true;
        let mut cells = Vec::new();
        let mut queue = VecDeque::from([c0]);
        while let Some(c) = queue.pop_front() {
            cells.push(c);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if let Some(n) = belief.offset(c, dx, dy) {
                        let i = belief.index(n);
                        if !seen[i] && is_member(n) {
                            seen[i] = true;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        if cells.len() < min_size {
            continue;
        }
        cells.sort_by_key(|c| (c.y, c.x));
        let k = cells.len() as f64;
        let (sx, sy) = cells.iter().fold((0.0, 0.0), |(sx, sy), &c| {
            let (x, y) = belief.center(c);
            (sx + x, sy + y)
        });
        let centroid = (sx / k, sy / k);
        let dist = |c: &Cell| {
            let (x, y) = belief.center(*c);
            (x - centroid.0).powi(2) + (y - centroid.1).powi(2)
        };
        let goal = *cells
            .iter()
            .min_by(|a, b| dist(a).total_cmp(&dist(b)))
            .expect("non-empty cluster");
        out.push(Frontier {
            centroid,
            cells,
            goal,
        });
    }
    out.sort_by(|a, b| {
        b.size()
            .cmp(&a.size())
            .then(a.centroid.1.total_cmp(&b.centroid.1))
            .then(a.centroid.0.total_cmp(&b.centroid.0))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_known_map_has_no_frontier() {
        let g = OccupancyGrid::new(10, 10, 0.25, CellState::Free).unwrap();
        assert!(detect_frontiers(&g, 5, &HashSet::new()).is_empty());
    }

    #[test]
    fn known_square_in_unknown_gives_one_ring() {
        let mut g = OccupancyGrid::new(20, 20, 0.25, CellState::Unknown).unwrap();
        for y in 5..12 {
            for x in 5..12 {
                g.set(Cell::new(x, y), CellState::Free);
            }
        }
        let f = detect_frontiers(&g, 5, &HashSet::new());
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].size(), 24); // perimeter of a 7x7 block
        assert!(f[0].cells.contains(&f[0].goal));
    }

    #[test]
    fn small_clusters_dropped_and_order_is_by_size() {
        let mut g = OccupancyGrid::new(30, 10, 0.25, CellState::Occupied).unwrap();
        // a free row; unknown above cells 2..5 (3 cells) and 10..20 (10 cells)
        for x in 0..30 {
            g.set(Cell::new(x, 5), CellState::Free);
        }
        for x in 2..5 {
            g.set(Cell::new(x, 6), CellState::Unknown);
        }
        for x in 10..20 {
            g.set(Cell::new(x, 6), CellState::Unknown);
        }
        for x in 22..28 {
            g.set(Cell::new(x, 4), CellState::Unknown);
        }
        let f = detect_frontiers(&g, 5, &HashSet::new());
        assert_eq!(f.iter().map(Frontier::size).collect::<Vec<_>>(), vec![10, 6]);
        let excluded: HashSet<Cell> = f[0].cells.iter().copied().collect();
        assert_eq!(detect_frontiers(&g, 5, &excluded).len(), 1);
    }
}
