use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::InfoMatrix;
use crate::spectral::{Criterion, WeightScheme};

pub const DEFAULT_FIM_ROUTE_CAP: usize = 3000;

/// Knobs of one incremental run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: WeightScheme,
    /// Criteria audited for gaps and bound violations.
    pub criteria: Vec<Criterion>,
    /// Evaluate every `stride`-th edge insertion (and always the last one).
    pub stride: usize,
    /// Largest `nℓ` for which the information-matrix route runs.
    pub fim_route_cap: usize,
    pub seed: u64,
    /// `φ̄` for the unit scheme; defaults to the first edge's information matrix.
    pub phi_bar: Option<InfoMatrix>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: WeightScheme::Unit,
            criteria: vec![Criterion::T, Criterion::D, Criterion::E],
            stride: 1,
            fim_route_cap: DEFAULT_FIM_ROUTE_CAP,
            seed: 0,
            phi_bar: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scheme: Option<WeightScheme>,
    criteria: Option<Vec<String>>,
    stride: Option<usize>,
    fim_route_cap: Option<usize>,
    seed: Option<u64>,
    phi_bar_diag: Option<Vec<f64>>,
    phi_bar_upper: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn validate(&self, ell: usize) -> Result<()> {
        if self.stride == 0 {
            return Err(Error::InvalidArgument("stride must be at least 1".into()));
        }
        if self.fim_route_cap < 2 * ell {
            return Err(Error::InvalidArgument(format!(
                "fim_route_cap {} is below 2ℓ = {}",
                self.fim_route_cap,
                2 * ell
            )));
        }
        if let Some(phi) = &self.phi_bar {
            if phi.dim() != ell {
                return Err(Error::MixedBlockDim {
                    expected: ell,
                    found: phi.dim(),
                });
            }
        }
        Ok(())
    }

    /// Reads `key = value` lines (TOML). Keys: `scheme`, `criteria`,
    /// `stride`, `fim_route_cap`, `seed`, and one of `phi_bar_diag` or
    /// `phi_bar_upper` (row-major upper triangle).
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))?;
        let mut cfg = Self::default();
        if let Some(s) = raw.scheme {
            cfg.scheme = s;
        }
        if let Some(list) = raw.criteria {
            cfg.criteria = list
                .iter()
                .map(|s| {
                    Criterion::parse(s)
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown criterion {s:?}")))
                })
                .collect::<Result<_>>()?;
        }
        cfg.stride = raw.stride.unwrap_or(cfg.stride);
        cfg.fim_route_cap = raw.fim_route_cap.unwrap_or(cfg.fim_route_cap);
        cfg.seed = raw.seed.unwrap_or(cfg.seed);
        cfg.phi_bar = match (raw.phi_bar_diag, raw.phi_bar_upper) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidArgument(
                    "give phi_bar_diag or phi_bar_upper, not both".into(),
                ))
            }
            (Some(d), None) => Some(InfoMatrix::diagonal(&d)?),
            (None, Some(u)) => {
                let dim = (((8 * u.len() + 1) as f64).sqrt() as usize - 1) / 2;
                let m = InfoMatrix::from_upper_triangle(dim, &u)?;
                Some(InfoMatrix::new(m.matrix().clone())?)
            }
            (None, None) => None,
        };
        if cfg.stride == 0 {
            return Err(Error::InvalidArgument("stride must be at least 1".into()));
        }
        Ok(cfg)
    }
}
