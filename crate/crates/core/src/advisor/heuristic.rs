//! Deterministic built-in plan backend.
//!
//! Greedy placement on the densest cells, followed by a connectivity
//! repair pass that paves shortest cell paths back to a BS cell with the
//! lowest-value placements, and a final fold that pulls any leftover
//! isolated placements onto the reachable component. The output always
//! verifies.

use std::collections::VecDeque;

use super::grid::GridSummary;
use super::AdvisorPlan;
use crate::world::{Position, ScenarioConfig};

const NEIGHBORS: [(isize, isize); 8] =
    [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

fn neighbors(summary: &GridSummary, idx: usize) -> impl Iterator<Item = usize> + '_ {
    let (rows, cols) = summary.dims;
    let (r, c) = summary.cell_of_index(idx);
    NEIGHBORS.iter().filter_map(move |(dr, dc)| {
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        (nr >= 0 && nr < rows as isize && nc >= 0 && nc < cols as isize)
            .then(|| nr as usize * cols + nc as usize)
    })
}

/// Cells reachable from the BS cells through occupied cells (8-adjacency).
fn reachable_cells(summary: &GridSummary, occupied: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; summary.n_cells()];
    let mut queue = VecDeque::new();
    for &(r, c) in &summary.bs_cells {
        let idx = summary.index(r, c);
        if !seen[idx] {
            seen[idx] = true;
            queue.push_back(idx);
        }
    }
    while let Some(idx) = queue.pop_front() {
        for n in neighbors(summary, idx) {
            if !seen[n] && occupied[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Shortest path (cell indices, endpoints included) from `from` to the
/// nearest cell satisfying `is_goal`, over the full grid.
fn shortest_path_to(
    summary: &GridSummary,
    from: usize,
    is_goal: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; summary.n_cells()];
    let mut seen = vec![false; summary.n_cells()];
    let mut queue = VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(idx) = queue.pop_front() {
        if is_goal(idx) {
            let mut path = vec![idx];
            let mut cur = idx;
            while prev[cur] != usize::MAX {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for n in neighbors(summary, idx) {
            if !seen[n] {
                seen[n] = true;
                prev[n] = idx;
                queue.push_back(n);
            }
        }
    }
    None
}

/// Greedy density placement with connectivity repair.
pub fn heuristic_plan(summary: &GridSummary, cfg: &ScenarioConfig) -> AdvisorPlan {
    let n_uav = cfg.n_uav;
    let n_cells = summary.n_cells();
    let mut plan_cells: Vec<usize> = Vec::with_capacity(n_uav);
    if n_uav > 0 {
        let mut ranked: Vec<usize> = (0..n_cells).collect();
        ranked.sort_by(|&a, &b| {
            summary.ue_counts[b].cmp(&summary.ue_counts[a]).then(a.cmp(&b))
        });
        for k in 0..n_uav {
            plan_cells.push(ranked[k % n_cells]);
        }
    }

    let occupancy = |cells: &[usize]| -> Vec<bool> {
        let mut occ = vec![false; n_cells];
        for &c in cells {
            occ[c] = true;
        }
        for &(r, c) in &summary.bs_cells {
            occ[summary.index(r, c)] = true;
        }
        occ
    };
    let is_bs = {
        let mut v = vec![false; n_cells];
        for &(r, c) in &summary.bs_cells {
            v[summary.index(r, c)] = true;
        }
        v
    };

    // Repair: connect the most valuable stranded cell by paving a shortest
    // path with the least valuable stranded placements.
    for _ in 0..n_uav + 1 {
        let reach = reachable_cells(summary, &occupancy(&plan_cells));
        let mut stranded: Vec<usize> = (0..plan_cells.len())
            .filter(|&i| !reach[plan_cells[i]])
            .collect();
        let Some(&target_slot) = stranded.iter().max_by(|&&a, &&b| {
            summary.ue_counts[plan_cells[a]]
                .cmp(&summary.ue_counts[plan_cells[b]])
                .then(plan_cells[b].cmp(&plan_cells[a]))
        }) else {
            break;
        };
        let target_cell = plan_cells[target_slot];
        let Some(path) = shortest_path_to(summary, target_cell, |c| reach[c] || is_bs[c]) else {
            break;
        };
        let occ = occupancy(&plan_cells);
        let needed: Vec<usize> =
            path[1..path.len() - 1].iter().copied().filter(|&c| !occ[c]).collect();
        // Donors: stranded placements of lowest cell value, excluding the
        // target itself; one placement stays on every stranded cell we are
        // trying to save.
        stranded.retain(|&slot| slot != target_slot && plan_cells[slot] != target_cell);
        stranded.sort_by(|&a, &b| {
            summary.ue_counts[plan_cells[a]]
                .cmp(&summary.ue_counts[plan_cells[b]])
                .then(plan_cells[a].cmp(&plan_cells[b]))
        });
        if stranded.len() < needed.len() {
            break;
        }
        for (donor_slot, cell) in stranded.into_iter().zip(needed.into_iter()) {
            plan_cells[donor_slot] = cell;
        }
    }

    // Fold: anything still stranded moves next to (or onto) the reachable
    // component, preferring dense cells.
    for _ in 0..n_uav + 1 {
        let reach = reachable_cells(summary, &occupancy(&plan_cells));
        let Some(slot) = (0..plan_cells.len()).find(|&i| !reach[plan_cells[i]]) else {
            break;
        };
        let mut candidates: Vec<usize> = (0..n_cells)
            .filter(|&c| reach[c] || neighbors(summary, c).any(|n| reach[n]))
            .collect();
        candidates.sort_by(|&a, &b| {
            summary.ue_counts[b].cmp(&summary.ue_counts[a]).then(a.cmp(&b))
        });
        match candidates.first() {
            Some(&cell) => plan_cells[slot] = cell,
            None => break,
        }
    }

    let positions = plan_cells
        .into_iter()
        .map(|idx| {
            let (r, c) = summary.cell_of_index(idx);
            let (x, y) = summary.center(r, c);
            Position::new(x, y, cfg.uav_altitude)
        })
        .collect();
    AdvisorPlan {
        positions,
        backend_id: "heuristic".to_string(),
        issued_at_step: 0,
        verified: false,
    }
}
