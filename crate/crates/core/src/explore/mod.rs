//! Grid-world active exploration driven by graph D-optimality.

pub mod config;
pub mod episode;
pub mod frontier;
pub mod grid;
pub mod hallucinate;
pub mod planner;
pub mod policy;
pub mod sensor;

pub use config::{ExplorerConfig, LoopClosureConfig, OdometryConfig};
pub use episode::{run_episode, EpisodeResult, ExplorationMetrics, RobotState, Termination};
pub use frontier::{detect_frontiers, Frontier};
pub use grid::{Cell, CellState, OccupancyGrid};
pub use hallucinate::{hallucinate_graph, log_utility_dopt, utility_dopt, HallucinationConfig};
pub use planner::{plan_path, DistanceField, PlannedPath};
pub use policy::{select_action, CandidatePlan, Policy};
pub use sensor::{sense, Pose2, SensorConfig};
