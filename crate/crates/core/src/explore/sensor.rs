//! Planar laser: a fan of rays traced cell by cell through the true world.

use serde::{Deserialize, Serialize};

use crate::explore::grid::{Cell, CellState, OccupancyGrid};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorConfig {
    pub rays: usize,
    /// Field of view in degrees, centred on the heading.
    pub fov_deg: f64,
    pub range: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            rays: 181,
            fov_deg: 180.0,
            range: 6.0,
        }
    }
}

/// Planar pose in metres and radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Cells a ray from `(x, y)` along `angle` enters before `range` metres,
/// in order (grid traversal of Amanatides and Woo).
pub fn ray_cells(grid: &OccupancyGrid, x: f64, y: f64, angle: f64, range: f64) -> Vec<Cell> {
    let Some(mut c) = grid.cell_of(x, y) else {
        return Vec::new();
    };
    let r = grid.resolution();
    let (dx, dy) = (angle.cos(), angle.sin());
    let axis = |pos: f64, d: f64, idx: usize| -> (isize, f64, f64) {
        if d > 1e-12 {
            (1, ((idx + 1) as f64 * r - pos) / d, r / d)
        } else if d < -1e-12 {
            (-1, (idx as f64 * r - pos) / d, -r / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (sx, mut tx, dtx) = axis(x, dx, c.x);
    let (sy, mut ty, dty) = axis(y, dy, c.y);
    let mut out = vec![c];
    loop {
        let (t, step) = if tx < ty { (tx, (sx, 0)) } else { (ty, (0, sy)) };
        if t > range {
            break;
        }
        match grid.offset(c, step.0, step.1) {
            Some(next) => c = next,
            None => break,
        }
        if step.0 != 0 {
            tx += dtx;
        } else {
            ty += dty;
        }
        out.push(c);
    }
    out
}

/// Updates `belief` with one scan from `pose`: every cell a ray passes
/// through becomes `Free` and the first occupied cell on it `Occupied`.
/// Returns how many cells changed from `Unknown`.
pub fn sense(world: &OccupancyGrid, belief: &mut OccupancyGrid, pose: Pose2, cfg: &SensorConfig) -> usize {
    let fov = cfg.fov_deg.to_radians();
    let mut revealed = 0;
    for k in 0..cfg.rays {
        let frac = if cfg.rays == 1 {
            0.5
        } else {
            k as f64 / (cfg.rays - 1) as f64
        };
        let angle = pose.theta - fov / 2.0 + frac * fov;
        for c in ray_cells(world, pose.x, pose.y, angle, cfg.range) {
            let truth = world.get(c);
            if belief.get(c) == CellState::Unknown {
                revealed += 1;
            }
            belief.set(c, truth);
            if truth == CellState::Occupied {
                break;
            }
        }
    }
    revealed
}
