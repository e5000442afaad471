//! Grid abstraction of the environment for the advisor.
//!
//! The cell side is the UAV-UAV connection range divided by sqrt(2), so
//! UAVs placed at the centers of 8-adjacent cells can always talk to each
//! other. UE density is summarized by per-cell counts.

use serde::{Deserialize, Serialize};

use crate::radio::{max_link_range_m, LinkClass, RadioParams};
use crate::world::{NodeKind, ScenarioConfig, WorldState};

/// Coarse cell summary of the world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    /// Cell side length, meters.
    pub cell_side: f64,
    /// (rows, cols); row 0 is the low-y edge.
    pub dims: (usize, usize),
    /// UE count per cell, row-major.
    pub ue_counts: Vec<usize>,
    /// Cells containing a BS, as (row, col).
    pub bs_cells: Vec<(usize, usize)>,
    /// Environment side length, meters (carried for rendering and checks).
    pub side_length: f64,
}

impl GridSummary {
    pub fn n_cells(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.dims.1 + col
    }

    pub fn cell_of_index(&self, idx: usize) -> (usize, usize) {
        (idx / self.dims.1, idx % self.dims.1)
    }

    /// Center coordinates of a cell.
    pub fn center(&self, row: usize, col: usize) -> (f64, f64) {
        ((col as f64 + 0.5) * self.cell_side, (row as f64 + 0.5) * self.cell_side)
    }

    /// Cell containing a point; boundary points bind to the lower-index
    /// cell.
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let bin = |v: f64, n: usize| -> usize {
            let raw = (v / self.cell_side).ceil() as isize - 1;
            raw.clamp(0, n as isize - 1) as usize
        };
        (bin(y, self.dims.0), bin(x, self.dims.1))
    }

    /// Cell whose center is nearest to a point.
    pub fn nearest_cell(&self, x: f64, y: f64) -> (usize, usize) {
        let snap = |v: f64, n: usize| -> usize {
            let raw = (v / self.cell_side - 0.5).round() as isize;
            raw.clamp(0, n as isize - 1) as usize
        };
        (snap(y, self.dims.0), snap(x, self.dims.1))
    }

    pub fn total_ues(&self) -> usize {
        self.ue_counts.iter().sum()
    }
}

/// Connection range between two UAVs at the configured radio parameters.
pub fn uav_link_range_m(params: &RadioParams) -> f64 {
    max_link_range_m(LinkClass::UavUav, NodeKind::Uav, NodeKind::Uav, params)
}

/// Build the grid summary for the current state.
///
/// The cell side is nudged fractionally below `range / sqrt(2)` so that
/// diagonal neighbors, whose centers sit exactly at the range limit,
/// still meet the SNR threshold after floating-point rounding.
pub fn grid_summary(
    state: &WorldState,
    params: &RadioParams,
    cfg: &ScenarioConfig,
) -> GridSummary {
    let range = uav_link_range_m(params);
    let cell_side = (range / std::f64::consts::SQRT_2) * (1.0 - 1e-9);
    let n = (cfg.side_length / cell_side).ceil().max(1.0) as usize;
    let mut summary = GridSummary {
        cell_side,
        dims: (n, n),
        ue_counts: vec![0; n * n],
        bs_cells: Vec::new(),
        side_length: cfg.side_length,
    };
    for ue in &state.ue {
        let (r, c) = summary.cell_of(ue.x, ue.y);
        let idx = summary.index(r, c);
        summary.ue_counts[idx] += 1;
    }
    for bs in &state.bs {
        let cell = summary.cell_of(bs.x, bs.y);
        if !summary.bs_cells.contains(&cell) {
            summary.bs_cells.push(cell);
        }
    }
    summary
}
