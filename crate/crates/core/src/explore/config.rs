use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explore::frontier::DEFAULT_MIN_FRONTIER;
use crate::explore::hallucinate::HallucinationConfig;
use crate::explore::sensor::SensorConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdometryConfig {
    /// Per-edge translation noise, metres.
    pub sigma_xy: f64,
    /// Per-edge heading noise, radians.
    pub sigma_theta: f64,
    /// Distance travelled between pose-graph nodes, metres.
    pub node_spacing: f64,
}

impl Default for OdometryConfig {
    fn default() -> Self {
        Self {
            sigma_xy: 0.3,
            sigma_theta: 0.063,
            node_spacing: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoopClosureConfig {
    /// A new node closes a loop with an old node within this distance, metres.
    pub radius: f64,
    /// Old nodes must be at least this many indices behind the new one.
    pub min_index_gap: usize,
    /// Information of a loop-closure edge relative to an odometry edge.
    pub info_scale: f64,
    /// Fraction of the loop residual removed from the estimate.
    pub snap_gain: f64,
}

impl Default for LoopClosureConfig {
    fn default() -> Self {
        Self {
            radius: 1.0,
            min_index_gap: 10,
            info_scale: 2.0,
            snap_gain: 0.5,
        }
    }
}

/// Simulator constants; every field can be overridden from a TOML file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplorerConfig {
    /// Start position in metres; defaults to the free cell nearest the world centre.
    pub start: Option<(f64, f64)>,
    /// Radius of the disc around the start that is known from the outset, metres.
    pub initial_reveal: f64,
    pub min_frontier: usize,
    pub sensor: SensorConfig,
    pub hallucination: HallucinationConfig,
    pub odometry: OdometryConfig,
    pub loop_closure: LoopClosureConfig,
}

impl Default for ExplorerConfig {
    fn default() -> Self {
        Self {
            start: None,
            initial_reveal: 1.0,
            min_frontier: DEFAULT_MIN_FRONTIER,
            sensor: SensorConfig::default(),
            hallucination: HallucinationConfig::default(),
            odometry: OdometryConfig::default(),
            loop_closure: LoopClosureConfig::default(),
        }
    }
}

impl ExplorerConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sensor.range", self.sensor.range),
            ("sensor.fov_deg", self.sensor.fov_deg),
            ("hallucination.node_spacing", self.hallucination.node_spacing),
            ("hallucination.decay", self.hallucination.decay),
            ("odometry.sigma_xy", self.odometry.sigma_xy),
            ("odometry.sigma_theta", self.odometry.sigma_theta),
            ("odometry.node_spacing", self.odometry.node_spacing),
            ("loop_closure.info_scale", self.loop_closure.info_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.sensor.rays == 0 {
            return Err(Error::InvalidArgument("sensor.rays must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.loop_closure.snap_gain) {
            return Err(Error::InvalidArgument("loop_closure.snap_gain must lie in [0, 1]".into()));
        }
        Ok(())
    }
}
