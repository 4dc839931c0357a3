//! JSON map files.
//!
//! `{width, height, resolution, origin:[x,y], v_max, cells:"FFOU..."}` with one
//! character per cell in row-major order (row `j = 0` first). An optional
//! `speeds` array overrides the per-state default speeds; it is only written
//! when some cell deviates from its default.

use serde::{Deserialize, Serialize};

use super::{Cell, CellState, CostMap, MapError, DEFAULT_UNKNOWN_SPEED_FACTOR};

#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    width: usize,
    height: usize,
    resolution: f64,
    origin: [f64; 2],
    v_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unknown_speed_factor: Option<f64>,
    cells: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    speeds: Option<Vec<f64>>,
}

pub fn store_map(map: &CostMap) -> Vec<u8> {
    let cells: String = map.cells().iter().map(|c| c.state.symbol()).collect();
    let overridden = map
        .cells()
        .iter()
        .any(|c| c.speed != map.default_speed(c.state));
    let file = MapFile {
        width: map.width(),
        height: map.height(),
        resolution: map.resolution(),
        origin: [map.origin().0, map.origin().1],
        v_max: map.v_max(),
        unknown_speed_factor: (map.unknown_speed_factor() != DEFAULT_UNKNOWN_SPEED_FACTOR)
            .then(|| map.unknown_speed_factor()),
        cells,
        speeds: overridden.then(|| map.cells().iter().map(|c| c.speed).collect()),
    };
    serde_json::to_vec(&file).expect("map serialization cannot fail")
}

pub fn load_map(bytes: &[u8]) -> Result<CostMap, MapError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(MapError::MalformedHeader("empty payload".into()));
    }
    let file: MapFile =
        serde_json::from_slice(bytes).map_err(|e| MapError::MalformedHeader(e.to_string()))?;
    let mut map = CostMap::with_unknown_factor(
        file.width,
        file.height,
        file.resolution,
        (file.origin[0], file.origin[1]),
        file.v_max,
        file.unknown_speed_factor
            .unwrap_or(DEFAULT_UNKNOWN_SPEED_FACTOR),
        CellState::Unknown,
    )
    .map_err(|e| MapError::MalformedHeader(e.to_string()))?;

    let expected = file.width * file.height;
    let symbols: Vec<char> = file.cells.chars().collect();
    if symbols.len() != expected {
        return Err(MapError::DimensionMismatch {
            expected,
            found: symbols.len(),
        });
    }
    if let Some(speeds) = &file.speeds {
        if speeds.len() != expected {
            return Err(MapError::DimensionMismatch {
                expected,
                found: speeds.len(),
            });
        }
    }
    for (k, &c) in symbols.iter().enumerate() {
        let state = CellState::from_symbol(c)
            .ok_or_else(|| MapError::MalformedHeader(format!("unknown cell symbol {c:?}")))?;
        let speed = match &file.speeds {
            Some(s) => s[k],
            None => map.default_speed(state),
        };
        let (i, j) = ((k % file.width) as i32, (k / file.width) as i32);
        map.set_cell_unchecked(i, j, Cell { state, speed });
    }
    if !map.is_consistent() {
        return Err(MapError::MalformedHeader(
            "speeds inconsistent with cell states".into(),
        ));
    }
    Ok(map)
}
