use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::arbiter::ArbiterConfig;
use crate::gridmap::{generate_perlin_map, load_map, CellState, CostMap, PerlinMapParams};
use crate::lattice::Pose;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapSource {
    Perlin {
        params: PerlinMapParams,
        /// Obstacles are inflated by this radius, meters.
        #[serde(default)]
        footprint_radius: f64,
        /// Cells within this distance of start and goal are forced free
        /// before inflation, meters.
        #[serde(default = "default_clear_radius")]
        clear_radius: f64,
    },
    File {
        path: PathBuf,
    },
}

fn default_clear_radius() -> f64 {
    0.6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub map_source: MapSource,
    pub start: Pose,
    pub goal: Pose,
    pub sensor_radius: f64,
    pub step_time: f64,
    pub max_cycles: u32,
    #[serde(default)]
    pub arbiter: ArbiterConfig,
    pub rng_seed: u64,
    /// Standard deviation of lateral tracking error per step, meters.
    #[serde(default)]
    pub tracking_noise_sigma: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidScenario(m));
        if self.max_cycles < 1 {
            return bad("max_cycles must be at least 1".into());
        }
        if !(self.step_time > 0.0) {
            return bad(format!("step_time must be positive, got {}", self.step_time));
        }
        if !(self.sensor_radius >= 0.0) {
            return bad(format!("sensor_radius must be non-negative, got {}", self.sensor_radius));
        }
        if !(self.tracking_noise_sigma >= 0.0) {
            return bad(format!(
                "tracking_noise_sigma must be non-negative, got {}",
                self.tracking_noise_sigma
            ));
        }
        self.arbiter.validate()?;
        Ok(())
    }

    /// Hex SHA-256 of the scenario's JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Ground-truth map for the scenario.
    pub fn build_map(&self) -> Result<CostMap, HarnessError> {
        match &self.map_source {
            MapSource::File { path } => {
                let bytes = std::fs::read(path).map_err(|e| HarnessError::Io {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
                Ok(load_map(&bytes)?)
            }
            MapSource::Perlin {
                params,
                footprint_radius,
                clear_radius,
            } => {
                let mut map = generate_perlin_map(params)?;
                for p in [&self.start, &self.goal] {
                    clear_disk(&mut map, p.x, p.y, *clear_radius);
                }
                Ok(map.inflate_obstacles(*footprint_radius)?)
            }
        }
    }

    /// Copy with map seed and rng seed both shifted by `offset`.
    pub fn reseeded(&self, offset: u64) -> Scenario {
        let mut s = self.clone();
        s.rng_seed = self.rng_seed.wrapping_add(offset);
        if let MapSource::Perlin { params, .. } = &mut s.map_source {
            params.seed = params.seed.wrapping_add(offset);
        }
        s
    }
}

fn clear_disk(map: &mut CostMap, x: f64, y: f64, radius: f64) {
    let (ci, cj) = map.cell_index(x, y);
    let reach = (radius / map.resolution()).ceil() as i32 + 1;
    for j in cj - reach..=cj + reach {
        for i in ci - reach..=ci + reach {
            let (px, py) = map.cell_center(i, j);
            if (px - x).powi(2) + (py - y).powi(2) <= radius * radius
                && map.state(i, j) == Some(CellState::Obstacle)
            {
                map.set_state(i, j, CellState::Free);
            }
        }
    }
}
