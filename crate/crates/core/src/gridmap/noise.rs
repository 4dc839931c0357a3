use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CellState, CostMap, MapError};

/// Unit gradients; with unit-length gradients the 2-D lattice noise stays
/// within `[-sqrt(0.5), sqrt(0.5)]`.
const GRADIENTS: [(f64, f64); 8] = [
    (1.0, 0.0),
    (-1.0, 0.0),
    (0.0, 1.0),
    (0.0, -1.0),
    (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    (std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
    (-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
];

/// Classic lattice gradient noise with a seeded permutation table.
#[derive(Debug, Clone)]
pub struct GradientNoise {
    perm: [u8; 512],
}

impl GradientNoise {
    pub fn new(seed: u64) -> Self {
        let mut table: Vec<u8> = (0..=255).collect();
        table.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut perm = [0u8; 512];
        for (k, slot) in perm.iter_mut().enumerate() {
            *slot = table[k & 255];
        }
        GradientNoise { perm }
    }

    pub fn permutation(&self) -> &[u8; 512] {
        &self.perm
    }

    pub fn gradient(&self, ix: i64, iy: i64) -> (f64, f64) {
        let a = self.perm[(ix & 255) as usize] as usize;
        let h = self.perm[a + (iy & 255) as usize] as usize;
        GRADIENTS[h & 7]
    }

    /// Single-octave noise at `(x, y)`.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (x0, y0) = (x.floor(), y.floor());
        let (fx, fy) = (x - x0, y - y0);
        let (ix, iy) = (x0 as i64, y0 as i64);
        let dot = |cx: i64, cy: i64, dx: f64, dy: f64| {
            let (gx, gy) = self.gradient(cx, cy);
            gx * dx + gy * dy
        };
        let n00 = dot(ix, iy, fx, fy);
        let n10 = dot(ix + 1, iy, fx - 1.0, fy);
        let n01 = dot(ix, iy + 1, fx, fy - 1.0);
        let n11 = dot(ix + 1, iy + 1, fx - 1.0, fy - 1.0);
        let (u, v) = (fade(fx), fade(fy));
        lerp(lerp(n00, n10, u), lerp(n01, n11, u), v)
    }

    /// Octave sum normalized by total amplitude, so the result stays in [-1, 1].
    pub fn fractal(&self, x: f64, y: f64, octaves: u32, persistence: f64) -> f64 {
        let mut total = 0.0;
        let mut amplitude = 1.0;
        let mut norm = 0.0;
        let mut freq = 1.0;
        for _ in 0..octaves.max(1) {
            total += amplitude * self.sample(x * freq, y * freq);
            norm += amplitude;
            amplitude *= persistence;
            freq *= 2.0;
        }
        total / norm
    }
}

fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerlinMapParams {
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    pub obstacle_threshold: f64,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
    /// Base-octave frequency in noise periods per cell.
    #[serde(default = "default_frequency")]
    pub frequency: f64,
    #[serde(default = "default_octaves")]
    pub octaves: u32,
}

fn default_resolution() -> f64 {
    super::DEFAULT_RESOLUTION
}
fn default_v_max() -> f64 {
    1.0
}
fn default_frequency() -> f64 {
    1.0 / 12.0
}
fn default_octaves() -> u32 {
    3
}

impl PerlinMapParams {
    pub fn new(seed: u64, width: usize, height: usize, obstacle_threshold: f64) -> Self {
        PerlinMapParams {
            seed,
            width,
            height,
            resolution: default_resolution(),
            obstacle_threshold,
            v_max: default_v_max(),
            frequency: default_frequency(),
            octaves: default_octaves(),
        }
    }
}

/// A map whose cells are Obstacle where the noise value at the cell center
/// exceeds the threshold and Free at `v_max` elsewhere.
pub fn generate_perlin_map(params: &PerlinMapParams) -> Result<CostMap, MapError> {
    let mut map = CostMap::filled(
        params.width,
        params.height,
        params.resolution,
        (0.0, 0.0),
        params.v_max,
        CellState::Free,
    )?;
    let noise = GradientNoise::new(params.seed);
    for j in 0..params.height {
        for i in 0..params.width {
            let x = (i as f64 + 0.5) * params.frequency;
            let y = (j as f64 + 0.5) * params.frequency;
            if noise.fractal(x, y, params.octaves, 0.5) > params.obstacle_threshold {
                map.set_state(i as i32, j as i32, CellState::Obstacle);
            }
        }
    }
    Ok(map)
}
