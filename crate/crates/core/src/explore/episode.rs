//! One exploration episode: sense, detect frontiers, plan, score, move.
//!
//! The map is built from the true pose. A separate pose estimate integrates
//! noisy odometry between pose-graph nodes; a loop closure moves every node
//! of the closed loop part of the way back toward the truth, perturbed by the
//! closure's own measurement error. Every random draw comes from one seeded generator, consumed in a
//! fixed order, so an episode is a pure function of its inputs.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dataset::export::format_sig12;
use crate::error::{Error, Result};
use crate::explore::config::ExplorerConfig;
use crate::explore::frontier::{detect_frontiers, is_frontier_cell, Frontier};
use crate::explore::grid::{Cell, CellState, OccupancyGrid};
use crate::explore::hallucinate::{hallucinate_graph, log_utility_dopt};
use crate::explore::planner::DistanceField;
use crate::explore::policy::{select_action, CandidatePlan, Policy};
use crate::explore::sensor::{sense, Pose2};
use crate::graph::{Edge, InfoMatrix, PoseGraph};
use crate::sparse::SparseLaplacian;
use crate::spectral::{edge_weight, graph_health_metrics, WeightScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The motion budget ran out.
    Budget,
    /// No frontier is left.
    Complete,
    /// Frontiers remain but none is reachable.
    Trapped,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplorationMetrics {
    /// Bounding box of the known map, metres.
    pub map_size: (f64, f64),
    /// Percentage of the world's free cells known to be free.
    pub coverage: f64,
    /// Largest distance between estimated and true node position, metres.
    pub rmse: f64,
    pub avg_degree: f64,
    pub norm_tree_connectivity: f64,
    pub nodes: usize,
    pub edges: usize,
    pub loop_closures: usize,
    pub steps: usize,
    pub decisions: usize,
    pub termination: Termination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Odometry,
    LoopClosure,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlamNode {
    pub truth: Pose2,
    pub estimate: Pose2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlamEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

/// True and estimated robot pose.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub cell: Cell,
    pub true_pose: Pose2,
    pub estimated_pose: Pose2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult {
    pub metrics: ExplorationMetrics,
    /// JSON-lines trajectory log: a header, one record per decision and a result record.
    pub log: String,
    pub nodes: Vec<SlamNode>,
    pub edges: Vec<SlamEdge>,
    pub belief: OccupancyGrid,
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// `a ⊕ d` with `d` expressed in `a`'s frame.
fn compose(a: Pose2, d: (f64, f64, f64)) -> Pose2 {
    let (s, c) = a.theta.sin_cos();
    Pose2 {
        x: a.x + c * d.0 - s * d.1,
        y: a.y + s * d.0 + c * d.1,
        theta: wrap(a.theta + d.2),
    }
}

/// `b` expressed in `a`'s frame.
fn relative(a: Pose2, b: Pose2) -> (f64, f64, f64) {
    let (s, c) = a.theta.sin_cos();
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    (c * dx + s * dy, -s * dx + c * dy, wrap(b.theta - a.theta))
}

fn sig(v: f64) -> f64 {
    format_sig12(v).parse().expect("formatted float")
}

/// Free cell nearest the world centre (lowest `(y, x)` on ties).
pub fn default_start(world: &OccupancyGrid) -> Result<Cell> {
    let (cx, cy) = (world.width() as f64 / 2.0, world.height() as f64 / 2.0);
    let mut best: Option<(f64, Cell)> = None;
    for i in 0..world.len() {
        let c = world.cell_at(i);
        if world.get(c) != CellState::Free {
            continue;
        }
        let d = (c.x as f64 + 0.5 - cx).powi(2) + (c.y as f64 + 0.5 - cy).powi(2);
        if best.is_none_or(|(b, _)| d < b) {
            best = Some((d, c));
        }
    }
    best.map(|(_, c)| c)
        .ok_or_else(|| Error::InvalidArgument("world has no free cell".into()))
}

struct Episode<'a> {
    world: &'a OccupancyGrid,
    cfg: &'a ExplorerConfig,
    belief: OccupancyGrid,
    robot: RobotState,
    nodes: Vec<SlamNode>,
    edges: Vec<SlamEdge>,
    odometry_phi: InfoMatrix,
    loop_phi: InfoMatrix,
    odometry_weight: f64,
    loop_weight: f64,
    travelled: f64,
    last_loop_partner: Option<usize>,
    loop_closures: usize,
    steps: usize,
    rng: ChaCha8Rng,
    odo_xy: Normal<f64>,
    odo_theta: Normal<f64>,
    loop_xy: Normal<f64>,
    loop_theta: Normal<f64>,
}

impl<'a> Episode<'a> {
    fn new(world: &'a OccupancyGrid, cfg: &'a ExplorerConfig, start: Cell, seed: u64) -> Result<Self> {
        let od = &cfg.odometry;
        let lc = &cfg.loop_closure;
        let info = |sxy: f64, st: f64| {
            InfoMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                1.0 / (sxy * sxy),
                1.0 / (sxy * sxy),
                1.0 / (st * st),
            ])))
        };
        let odometry_phi = info(od.sigma_xy, od.sigma_theta)?;
        let loop_phi = odometry_phi.scaled(lc.info_scale);
        let odometry_weight = edge_weight(&odometry_phi, WeightScheme::Matched(0.0))?;
        let loop_weight = edge_weight(&loop_phi, WeightScheme::Matched(0.0))?;
        let normal = |s: f64| Normal::new(0.0, s).map_err(|e| Error::InvalidArgument(e.to_string()));
        let shrink = lc.info_scale.sqrt();
        let (x, y) = world.center(start);
        let pose = Pose2 { x, y, theta: 0.0 };
        let mut ep = Self {
            world,
            cfg,
            belief: OccupancyGrid::new(world.width(), world.height(), world.resolution(), CellState::Unknown)?,
            robot: RobotState {
                cell: start,
                true_pose: pose,
                estimated_pose: pose,
            },
            nodes: vec![SlamNode {
                truth: pose,
                estimate: pose,
            }],
            edges: Vec::new(),
            odometry_phi,
            loop_phi,
            odometry_weight,
            loop_weight,
            travelled: 0.0,
            last_loop_partner: None,
            loop_closures: 0,
            steps: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            odo_xy: normal(od.sigma_xy)?,
            odo_theta: normal(od.sigma_theta)?,
            loop_xy: normal(od.sigma_xy / shrink)?,
            loop_theta: normal(od.sigma_theta / shrink)?,
        };
        for c in world.disc(x, y, cfg.initial_reveal) {
            ep.belief.set(c, world.get(c));
        }
        sense(world, &mut ep.belief, pose, &cfg.sensor);
        sense(world, &mut ep.belief, Pose2 { theta: PI, ..pose }, &cfg.sensor);
        Ok(ep)
    }

    fn laplacian(&self) -> SparseLaplacian {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let w = match e.kind {
                    EdgeKind::Odometry => self.odometry_weight,
                    EdgeKind::LoopClosure => self.loop_weight,
                };
                (e.from, e.to, w)
            })
            .collect();
        SparseLaplacian::from_edges(self.nodes.len(), edges)
    }

    fn positions(&self) -> Vec<(f64, f64)> {
        self.nodes.iter().map(|n| (n.truth.x, n.truth.y)).collect()
    }

    fn candidates(&self, frontiers: &[Frontier], policy: Policy) -> Vec<CandidatePlan> {
        let field = DistanceField::compute(&self.belief, self.robot.cell, None);
        let mut plans: Vec<CandidatePlan> = frontiers
            .iter()
            .enumerate()
            .filter_map(|(i, f)| {
                field.path_to(f.goal).map(|path| CandidatePlan {
                    frontier: i,
                    goal: f.goal,
                    path,
                    log_utility: None,
                })
            })
            .collect();
        if policy == Policy::GraphDopt {
            let current = self.laplacian();
            let positions = self.positions();
            let utilities: Vec<f64> = plans
                .par_iter()
                .map(|p| {
                    hallucinate_graph(
                        &current,
                        &positions,
                        &p.path.cells,
                        &self.belief,
                        &self.odometry_phi,
                        &self.cfg.hallucination,
                    )
                    .map_or(f64::NEG_INFINITY, |h| log_utility_dopt(&h.laplacian))
                })
                .collect();
            for (p, u) in plans.iter_mut().zip(utilities) {
                p.log_utility = Some(u);
            }
        }
        plans
    }

    fn sense_here(&mut self) {
        sense(self.world, &mut self.belief, self.robot.true_pose, &self.cfg.sensor);
    }

    /// Moves one cell and senses; adds a pose-graph node once far enough.
    fn step_to(&mut self, next: Cell) {
        let cur = self.robot.cell;
        let (dx, dy) = (next.x as f64 - cur.x as f64, next.y as f64 - cur.y as f64);
        let (x, y) = self.world.center(next);
        let before = self.robot.true_pose;
        self.robot.cell = next;
        self.robot.true_pose = Pose2 {
            x,
            y,
            theta: dy.atan2(dx),
        };
        let delta = relative(before, self.robot.true_pose);
        self.robot.estimated_pose = compose(self.robot.estimated_pose, delta);
        self.steps += 1;
        self.travelled += (dx * dx + dy * dy).sqrt() * self.world.resolution();
        self.sense_here();
        if self.travelled >= self.cfg.odometry.node_spacing - 1e-9 {
            self.travelled = 0.0;
            self.add_node();
        }
    }

    fn add_node(&mut self) {
        let prev = *self.nodes.last().expect("episode starts with a node");
        let truth = self.robot.true_pose;
        let rel = relative(prev.truth, truth);
        let noisy = (
            rel.0 + self.odo_xy.sample(&mut self.rng),
            rel.1 + self.odo_xy.sample(&mut self.rng),
            rel.2 + self.odo_theta.sample(&mut self.rng),
        );
        let estimate = compose(prev.estimate, noisy);
        let k = self.nodes.len();
        self.nodes.push(SlamNode { truth, estimate });
        self.edges.push(SlamEdge {
            from: k - 1,
            to: k,
            kind: EdgeKind::Odometry,
        });
        self.robot.estimated_pose = estimate;
        self.close_loop(k);
    }

    /// Adds a loop closure from node `k` to the nearest old node within the
    /// radius, unless the previous node already closed with that node.
    fn close_loop(&mut self, k: usize) {
        let lc = self.cfg.loop_closure;
        if k < lc.min_index_gap {
            self.last_loop_partner = None;
            return;
        }
        let here = self.nodes[k].truth;
        let partner = self.nodes[..=k - lc.min_index_gap]
            .iter()
            .enumerate()
            .map(|(j, n)| (j, (n.truth.x - here.x).powi(2) + (n.truth.y - here.y).powi(2)))
            .filter(|&(_, d2)| d2 <= lc.radius * lc.radius)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| j);
        let previous = std::mem::replace(&mut self.last_loop_partner, partner);
        let Some(j) = partner else {
            return;
        };
        if previous == Some(j) {
            return;
        }
        let rel = relative(self.nodes[j].truth, here);
        let z = (
            rel.0 + self.loop_xy.sample(&mut self.rng),
            rel.1 + self.loop_xy.sample(&mut self.rng),
            rel.2 + self.loop_theta.sample(&mut self.rng),
        );
        // measurement error of the closure, carried in the world frame
        let measured = compose(self.nodes[j].truth, z);
        let eta = (measured.x - here.x, measured.y - here.y, wrap(measured.theta - here.theta));
        let span = (k - j) as f64;
        for i in j + 1..=k {
            let f = (i - j) as f64 / span;
            let node = &mut self.nodes[i];
            let (t, e) = (node.truth, &mut node.estimate);
            e.x += lc.snap_gain * (t.x + f * eta.0 - e.x);
            e.y += lc.snap_gain * (t.y + f * eta.1 - e.y);
            e.theta = wrap(e.theta + lc.snap_gain * wrap(t.theta + f * eta.2 - e.theta));
        }
        self.robot.estimated_pose = self.nodes[k].estimate;
        self.edges.push(SlamEdge {
            from: j,
            to: k,
            kind: EdgeKind::LoopClosure,
        });
        self.loop_closures += 1;
    }

    fn pose_graph(&self) -> PoseGraph {
        let mut g = PoseGraph::with_vertex_count(self.nodes.len(), 3).expect("at least one node");
        for e in &self.edges {
            let phi = match e.kind {
                EdgeKind::Odometry => self.odometry_phi.clone(),
                EdgeKind::LoopClosure => self.loop_phi.clone(),
            };
            g.add_edge(Edge::new(e.from, e.to, phi)).expect("valid simulator edge");
        }
        g
    }

    fn rmse(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| ((n.estimate.x - n.truth.x).powi(2) + (n.estimate.y - n.truth.y).powi(2)).sqrt())
            .fold(0.0, f64::max)
    }

    fn coverage(&self) -> f64 {
        let mut free = 0usize;
        let mut seen = 0usize;
        for (w, b) in self.world.states().iter().zip(self.belief.states()) {
            if *w == CellState::Free {
                free += 1;
                if *b == CellState::Free {
                    seen += 1;
                }
            }
        }
        100.0 * seen as f64 / free.max(1) as f64
    }
}

fn cell_json(c: Cell) -> serde_json::Value {
    json!([c.x, c.y])
}

/// Runs one episode until the motion budget (cells moved, plus in-place
/// turns) is spent, no frontier remains, or none is reachable.
pub fn run_episode(
    world: &OccupancyGrid,
    policy: Policy,
    budget: usize,
    seed: u64,
    cfg: &ExplorerConfig,
) -> Result<EpisodeResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    if world.count(CellState::Unknown) > 0 {
        return Err(Error::InvalidArgument("the true world may not contain unknown cells".into()));
    }
    cfg.validate()?;
    let start = match cfg.start {
        Some((x, y)) => {
            let c = world
                .cell_of(x, y)
                .ok_or_else(|| Error::InvalidArgument(format!("start ({x}, {y}) outside the world")))?;
            if world.get(c) != CellState::Free {
                return Err(Error::InvalidArgument(format!("start ({x}, {y}) is not free")));
            }
            c
        }
        None => default_start(world)?,
    };
    let mut ep = Episode::new(world, cfg, start, seed)?;
    let mut log = String::new();
    let mut push = |v: serde_json::Value| {
        log.push_str(&v.to_string());
        log.push('\n');
    };
    push(json!({
        "type": "config",
        "policy": policy,
        "budget": budget,
        "seed": seed,
        "world": { "width": world.width(), "height": world.height(), "resolution": world.resolution() },
        "start": cell_json(start),
        "explorer": cfg,
    }));

    let mut blacklist: HashSet<Cell> = HashSet::new();
    let mut decisions = 0usize;
    let termination = loop {
        if ep.steps >= budget {
            break Termination::Budget;
        }
        let frontiers = detect_frontiers(&ep.belief, cfg.min_frontier, &blacklist);
        if frontiers.is_empty() {
            break Termination::Complete;
        }
        let plans = ep.candidates(&frontiers, policy);
        let Some(choice) = select_action(&plans, policy) else {
            break Termination::Trapped;
        };
        let plan = plans[choice].clone();
        push(json!({
            "type": "decision",
            "index": decisions,
            "step": ep.steps,
            "robot": cell_json(ep.robot.cell),
            "frontiers": frontiers.iter().enumerate().map(|(i, f)| {
                let p = plans.iter().find(|p| p.frontier == i);
                json!({
                    "centroid": [sig(f.centroid.0), sig(f.centroid.1)],
                    "size": f.size(),
                    "goal": cell_json(f.goal),
                    "cost": p.map(|p| sig(p.path.cost)),
                    "log_utility": p.and_then(|p| p.log_utility).filter(|u| u.is_finite()).map(sig),
                })
            }).collect::<Vec<_>>(),
            "chosen": plan.frontier,
            "snapshot": {
                "nodes": ep.nodes.len(),
                "edges": ep.edges.len(),
                "loop_closures": ep.loop_closures,
                "coverage": sig(ep.coverage()),
            },
        }));
        decisions += 1;

        let goal = plan.goal;
        for &next in &plan.path.cells[1..] {
            if ep.steps >= budget || !is_frontier_cell(&ep.belief, goal) {
                break;
            }
            debug_assert_eq!(ep.belief.get(next), CellState::Free);
            ep.step_to(next);
        }
        if ep.robot.cell == goal && is_frontier_cell(&ep.belief, goal) && ep.steps < budget {
            // look back over the shoulder before giving up on this goal
            ep.robot.true_pose.theta = wrap(ep.robot.true_pose.theta + PI);
            ep.robot.estimated_pose.theta = wrap(ep.robot.estimated_pose.theta + PI);
            ep.steps += 1;
            ep.sense_here();
            if is_frontier_cell(&ep.belief, goal) {
                blacklist.insert(goal);
            }
        }
    };

    let graph = ep.pose_graph();
    let health = graph_health_metrics(&graph);
    let (w, h) = ep.belief.known_extent();
    let metrics = ExplorationMetrics {
        map_size: (sig(w), sig(h)),
        coverage: sig(ep.coverage()),
        rmse: sig(ep.rmse()),
        avg_degree: sig(health.avg_degree),
        norm_tree_connectivity: sig(health.norm_tree_connectivity),
        nodes: graph.n(),
        edges: graph.m(),
        loop_closures: ep.loop_closures,
        steps: ep.steps,
        decisions,
        termination,
    };
    push(json!({ "type": "result", "metrics": metrics }));
    Ok(EpisodeResult {
        metrics,
        log,
        nodes: ep.nodes,
        edges: ep.edges,
        belief: ep.belief,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pose_algebra() {
        let a = Pose2 {
            x: 1.0,
            y: 2.0,
            theta: 0.7,
        };
        let b = Pose2 {
            x: -0.5,
            y: 4.0,
            theta: -2.9,
        };
        let back = compose(a, relative(a, b));
        assert!((back.x - b.x).abs() < 1e-12 && (back.y - b.y).abs() < 1e-12);
        assert!(wrap(back.theta - b.theta).abs() < 1e-12);
        assert!((wrap(3.5 * PI) - (-0.5 * PI)).abs() < 1e-12);
    }

    #[test]
    fn start_is_free_and_central() {
        let w = OccupancyGrid::parse_world("5 3 1\n#####\n#.#.#\n#####\n").unwrap();
        assert_eq!(default_start(&w).unwrap(), Cell::new(1, 1));
    }
}
