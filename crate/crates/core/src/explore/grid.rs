//! Ternary occupancy grids and the plain-text world format.
//!
//! ```text
//! width height resolution
//! ########
//! #......#
//! ```
//!
//! The first grid row is `y = 0`. Cell `(x, y)` covers
//! `[x·res, (x+1)·res) × [y·res, (y+1)·res)` metres.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Unknown,
    Free,
    Occupied,
}

/// Integer cell coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    resolution_bits: u64,
    cells: Vec<CellState>,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize, resolution: f64, fill: CellState) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("grid dimensions must be positive".into()));
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidArgument(format!("bad grid resolution {resolution}")));
        }
        Ok(Self {
            width,
            height,
            resolution_bits: resolution.to_bits(),
            cells: vec![fill; width * height],
        })
    }

    /// Parses the world text format. Only `#` and `.` are accepted, so the
    /// result never contains `Unknown`.
    pub fn parse_world(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let bad_header = || Error::Parse {
            line: 1,
            message: format!("header must be \"width height resolution\", got {header:?}"),
        };
        if fields.len() != 3 {
            return Err(bad_header());
        }
        let width: usize = fields[0].parse().map_err(|_| bad_header())?;
        let height: usize = fields[1].parse().map_err(|_| bad_header())?;
        let resolution: f64 = fields[2].parse().map_err(|_| bad_header())?;
        let mut grid = Self::new(width, height, resolution, CellState::Occupied)?;
        let mut y = 0;
        for (idx, line) in lines {
            let row = line.trim_end();
            if y >= height {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("more than {height} rows"),
                });
            }
            if row.chars().count() != width {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("row has {} cells, expected {width}", row.chars().count()),
                });
            }
            for (x, ch) in row.chars().enumerate() {
                let state = match ch {
                    '#' => CellState::Occupied,
                    '.' => CellState::Free,
                    other => {
                        return Err(Error::Parse {
                            line: idx + 1,
                            message: format!("unexpected cell character {other:?}"),
                        })
                    }
                };
                grid.set(Cell::new(x, y), state);
            }
            y += 1;
        }
        if y != height {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("expected {height} rows, found {y}"),
            });
        }
        Ok(grid)
    }

    pub fn load_world(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_world(&std::fs::read_to_string(path)?)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        f64::from_bits(self.resolution_bits)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.width, index / self.width)
    }

    pub fn get(&self, c: Cell) -> CellState {
        self.cells[self.index(c)]
    }

    pub fn set(&mut self, c: Cell, s: CellState) {
        let i = self.index(c);
        self.cells[i] = s;
    }

    pub fn states(&self) -> &[CellState] {
        &self.cells
    }

    pub fn count(&self, s: CellState) -> usize {
        self.cells.iter().filter(|&&c| c == s).count()
    }

    /// Cell containing the metric point, if inside the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<Cell> {
        let r = self.resolution();
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let (cx, cy) = ((x / r).floor() as usize, (y / r).floor() as usize);
        (cx < self.width && cy < self.height).then_some(Cell::new(cx, cy))
    }

    pub fn center(&self, c: Cell) -> (f64, f64) {
        let r = self.resolution();
        ((c.x as f64 + 0.5) * r, (c.y as f64 + 0.5) * r)
    }

    /// In-bounds cells whose centre lies within `radius` metres of `(x, y)`,
    /// in row-major order.
    pub fn disc(&self, x: f64, y: f64, radius: f64) -> Vec<Cell> {
        let r = self.resolution();
        let lo = |v: f64| (((v - radius) / r).floor().max(0.0)) as usize;
        let hi = |v: f64, n: usize| ((((v + radius) / r).ceil()) as usize).min(n.saturating_sub(1));
        if x + radius < 0.0 || y + radius < 0.0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for cy in lo(y)..=hi(y, self.height) {
            for cx in lo(x)..=hi(x, self.width) {
                let (px, py) = self.center(Cell::new(cx, cy));
                if (px - x).powi(2) + (py - y).powi(2) <= radius * radius {
                    out.push(Cell::new(cx, cy));
                }
            }
        }
        out
    }

    /// The 4-neighbours of `c` inside the grid.
    pub fn neighbours4(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        const D: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        D.iter().filter_map(move |&(dx, dy)| self.offset(c, dx, dy))
    }

    pub fn offset(&self, c: Cell, dx: isize, dy: isize) -> Option<Cell> {
        let x = c.x.checked_add_signed(dx)?;
        let y = c.y.checked_add_signed(dy)?;
        (x < self.width && y < self.height).then_some(Cell::new(x, y))
    }

    /// Bounding box (metres) of all non-`Unknown` cells; `(0, 0)` when none.
    pub fn known_extent(&self) -> (f64, f64) {
        let mut bounds: Option<(usize, usize, usize, usize)> = None;
        for (i, s) in self.cells.iter().enumerate() {
            if *s != CellState::Unknown {
                let c = self.cell_at(i);
                bounds = Some(match bounds {
                    None => (c.x, c.x, c.y, c.y),
                    Some((x0, x1, y0, y1)) => (x0.min(c.x), x1.max(c.x), y0.min(c.y), y1.max(c.y)),
                });
            }
        }
        let r = self.resolution();
        bounds.map_or((0.0, 0.0), |(x0, x1, y0, y1)| {
            ((x1 - x0 + 1) as f64 * r, (y1 - y0 + 1) as f64 * r)
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.width, self.height, self.resolution());
        for y in 0..self.height {
            for x in 0..self.width {
                out.push(match self.get(Cell::new(x, y)) {
                    CellState::Occupied => '#',
                    CellState::Free => '.',
                    CellState::Unknown => '?',
                });
            }
            out.push('\n');
        }
        out
    }
}
