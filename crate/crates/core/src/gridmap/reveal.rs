use super::{CellState, CostMap, MapError};

/// Progressive sensor reveal of a ground-truth map.
#[derive(Debug, Clone)]
pub struct RevealModel {
    ground_truth: CostMap,
    revealed: CostMap,
    sensor_radius: f64,
}

impl RevealModel {
    /// Starts with every cell Unknown.
    pub fn new(ground_truth: CostMap, sensor_radius: f64) -> Result<Self, MapError> {
        if !(sensor_radius >= 0.0) {
            return Err(MapError::InvalidParameter(format!(
                "sensor radius must be non-negative, got {sensor_radius}"
            )));
        }
        let revealed = CostMap::with_unknown_factor(
            ground_truth.width(),
            ground_truth.height(),
            ground_truth.resolution(),
            ground_truth.origin(),
            ground_truth.v_max(),
            ground_truth.unknown_speed_factor(),
            CellState::Unknown,
        )?;
        Ok(RevealModel {
            ground_truth,
            revealed,
            sensor_radius,
        })
    }

    pub fn ground_truth(&self) -> &CostMap {
        &self.ground_truth
    }

    pub fn revealed(&self) -> &CostMap {
        &self.revealed
    }

    pub fn sensor_radius(&self) -> f64 {
        self.sensor_radius
    }

    pub fn revealed_count(&self) -> usize {
        self.revealed.cells().len() - self.revealed.count(CellState::Unknown)
    }

    /// Copies every ground-truth cell whose center lies strictly within the
    /// sensor radius of `(x, y)`.
    pub fn reveal(&mut self, x: f64, y: f64) -> Result<(), MapError> {
        if !self.ground_truth.contains_point(x, y) {
            return Err(MapError::PoseOutOfBounds { x, y });
        }
        let res = self.ground_truth.resolution();
        let (ci, cj) = self.ground_truth.cell_index(x, y);
        let reach = (self.sensor_radius / res).ceil() as i32 + 1;
        let r2 = self.sensor_radius * self.sensor_radius;
        for j in (cj - reach)..=(cj + reach) {
            for i in (ci - reach)..=(ci + reach) {
                let Some(cell) = self.ground_truth.cell(i, j) else {
                    continue;
                };
                let (px, py) = self.ground_truth.cell_center(i, j);
                if (px - x).powi(2) + (py - y).powi(2) < r2 {
                    self.revealed.set_cell_unchecked(i, j, cell);
                }
            }
        }
        Ok(())
    }
}
