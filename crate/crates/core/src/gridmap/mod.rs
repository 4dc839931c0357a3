//! Environment map: a 2-D grid of cell states with per-cell speed limits.
//!
//! Cells are indexed `(i, j)` with `i` along x and `j` along y. Cell `(i, j)`
//! covers `[origin.x + i*res, origin.x + (i+1)*res)` and likewise in y; its
//! center is the reference point for every distance test in this module.

mod io;
mod noise;
mod reveal;

pub use io::{load_map, store_map};
pub use noise::{generate_perlin_map, GradientNoise, PerlinMapParams};
pub use reveal::RevealModel;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_RESOLUTION: f64 = 0.2;
pub const DEFAULT_UNKNOWN_SPEED_FACTOR: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("malformed map header: {0}")]
    MalformedHeader(String),
    #[error("dimension mismatch: header declares {expected} cells, payload has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pose ({x:.3}, {y:.3}) lies outside the map")]
    PoseOutOfBounds { x: f64, y: f64 },
    #[error("invalid map parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Unknown,
    Free,
    Obstacle,
    Inflated,
}

impl CellState {
    pub fn symbol(self) -> char {
        match self {
            CellState::Unknown => 'U',
            CellState::Free => 'F',
            CellState::Obstacle => 'O',
            CellState::Inflated => 'I',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'U' => Some(CellState::Unknown),
            'F' => Some(CellState::Free),
            'O' => Some(CellState::Obstacle),
            'I' => Some(CellState::Inflated),
            _ => None,
        }
    }

    /// Obstacle and Inflated cells block motion.
    pub fn is_blocked(self) -> bool {
        matches!(self, CellState::Obstacle | CellState::Inflated)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub state: CellState,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostMap {
    width: usize,
    height: usize,
    resolution: f64,
    origin: (f64, f64),
    v_max: f64,
    unknown_speed_factor: f64,
    cells: Vec<Cell>,
}

impl CostMap {
    /// A map with every cell in `state` at that state's default speed.
    pub fn filled(
        width: usize,
        height: usize,
        resolution: f64,
        origin: (f64, f64),
        v_max: f64,
        state: CellState,
    ) -> Result<Self, MapError> {
        Self::with_unknown_factor(
            width,
            height,
            resolution,
            origin,
            v_max,
            DEFAULT_UNKNOWN_SPEED_FACTOR,
            state,
        )
    }

    pub fn with_unknown_factor(
        width: usize,
        height: usize,
        resolution: f64,
        origin: (f64, f64),
        v_max: f64,
        unknown_speed_factor: f64,
        state: CellState,
    ) -> Result<Self, MapError> {
        if width == 0 || height == 0 {
            return Err(MapError::InvalidParameter(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(MapError::InvalidParameter(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if !(v_max > 0.0 && v_max.is_finite()) {
            return Err(MapError::InvalidParameter(format!(
                "v_max must be positive, got {v_max}"
            )));
        }
        if !(unknown_speed_factor > 0.0 && unknown_speed_factor <= 1.0) {
            return Err(MapError::InvalidParameter(format!(
                "unknown speed factor must lie in (0, 1], got {unknown_speed_factor}"
            )));
        }
        let mut map = CostMap {
            width,
            height,
            resolution,
            origin,
            v_max,
            unknown_speed_factor,
            cells: Vec::new(),
        };
        let cell = Cell {
            state,
            speed: map.default_speed(state),
        };
        map.cells = vec![cell; width * height];
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn unknown_speed_factor(&self) -> f64 {
        self.unknown_speed_factor
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn default_speed(&self, state: CellState) -> f64 {
        match state {
            CellState::Free => self.v_max,
            CellState::Unknown => self.unknown_speed_factor * self.v_max,
            CellState::Obstacle | CellState::Inflated => 0.0,
        }
    }

    pub fn contains(&self, i: i32, j: i32) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.width && (j as usize) < self.height
    }

    fn offset(&self, i: i32, j: i32) -> Option<usize> {
        self.contains(i, j)
            .then(|| j as usize * self.width + i as usize)
    }

    pub fn cell(&self, i: i32, j: i32) -> Option<Cell> {
        self.offset(i, j).map(|k| self.cells[k])
    }

    pub fn state(&self, i: i32, j: i32) -> Option<CellState> {
        self.cell(i, j).map(|c| c.state)
    }

    /// Speed of a traversable cell, `None` when blocked or off-map.
    pub fn traversable_speed(&self, i: i32, j: i32) -> Option<f64> {
        self.cell(i, j)
            .filter(|c| !c.state.is_blocked())
            .map(|c| c.speed)
    }

    /// Sets a cell's state and resets its speed to the state default.
    pub fn set_state(&mut self, i: i32, j: i32, state: CellState) {
        let speed = self.default_speed(state);
        if let Some(k) = self.offset(i, j) {
            self.cells[k] = Cell { state, speed };
        }
    }

    /// Overrides the speed of a Free cell. Must satisfy `0 < speed <= v_max`.
    pub fn set_free_speed(&mut self, i: i32, j: i32, speed: f64) -> Result<(), MapError> {
        let k = self.offset(i, j).ok_or(MapError::InvalidParameter(format!(
            "cell ({i}, {j}) is off the map"
        )))?;
        if self.cells[k].state != CellState::Free {
            return Err(MapError::InvalidParameter(format!(
                "cell ({i}, {j}) is not free"
            )));
        }
        if !(speed > 0.0 && speed <= self.v_max) {
            return Err(MapError::InvalidParameter(format!(
                "free-cell speed must lie in (0, v_max], got {speed}"
            )));
        }
        self.cells[k].speed = speed;
        Ok(())
    }

    pub(crate) fn set_cell_unchecked(&mut self, i: i32, j: i32, cell: Cell) {
        if let Some(k) = self.offset(i, j) {
            self.cells[k] = cell;
        }
    }

    pub fn cell_center(&self, i: i32, j: i32) -> (f64, f64) {
        (
            self.origin.0 + (i as f64 + 0.5) * self.resolution,
            self.origin.1 + (j as f64 + 0.5) * self.resolution,
        )
    }

    /// Index of the cell containing `(x, y)`; may lie off the map.
    pub fn cell_index(&self, x: f64, y: f64) -> (i32, i32) {
        (
            ((x - self.origin.0) / self.resolution).floor() as i32,
            ((y - self.origin.1) / self.resolution).floor() as i32,
        )
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        let (i, j) = self.cell_index(x, y);
        self.contains(i, j)
    }

    pub fn same_frame(&self, other: &CostMap) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.resolution == other.resolution
            && self.origin == other.origin
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|c| c.state == state).count()
    }

    /// Checks the speed/state consistency rules for every cell.
    pub fn is_consistent(&self) -> bool {
        self.cells.iter().all(|c| match c.state {
            CellState::Obstacle | CellState::Inflated => c.speed == 0.0,
            CellState::Free => c.speed > 0.0 && c.speed <= self.v_max,
            CellState::Unknown => c.speed == self.unknown_speed_factor * self.v_max,
        })
    }

    /// Marks every Free/Unknown cell whose center lies within `footprint_radius`
    /// of an Obstacle cell center as Inflated.
    pub fn inflate_obstacles(&self, footprint_radius: f64) -> Result<CostMap, MapError> {
        if !(footprint_radius >= 0.0 && footprint_radius.is_finite()) {
            return Err(MapError::InvalidParameter(format!(
                "footprint radius must be non-negative, got {footprint_radius}"
            )));
        }
        let mut out = self.clone();
        let reach = footprint_radius / self.resolution;
        let r = reach.floor() as i32;
        let limit = reach * reach + 1e-9;
        let disk: Vec<(i32, i32)> = (-r..=r)
            .flat_map(|di| (-r..=r).map(move |dj| (di, dj)))
            .filter(|&(di, dj)| ((di * di + dj * dj) as f64) <= limit)
            .filter(|&d| d != (0, 0))
            .collect();
        if disk.is_empty() {
            return Ok(out);
        }
        for j in 0..self.height as i32 {
            for i in 0..self.width as i32 {
                if self.state(i, j) != Some(CellState::Obstacle) {
                    continue;
                }
                for &(di, dj) in &disk {
                    let (ni, nj) = (i + di, j + dj);
                    if matches!(
                        out.state(ni, nj),
                        Some(CellState::Free | CellState::Unknown)
                    ) {
                        out.set_state(ni, nj, CellState::Inflated);
                    }
                }
            }
        }
        Ok(out)
    }
}
