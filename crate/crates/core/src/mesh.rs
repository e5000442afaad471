//! Multi-hop connectivity analysis over a link table.
//!
//! A UAV is connected when it can reach any BS through links whose SNR
//! meets the threshold; the recursive definition is evaluated as BFS
//! reachability from the BS set, which is its unique fixed point. Backhaul
//! paths take the fewest hops, UEs associate with the connected UAV that
//! offers the highest rate, and relay sets collect the UAVs whose paths
//! pass through a given node.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::radio::{LinkTable, RadioParams};
use crate::world::NodeId;

/// Connectivity flags, backhaul paths, UE association, and relay sets for
/// one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    /// Whether each UAV reaches a BS through the thresholded link graph.
    pub uav_connected: Vec<bool>,
    /// Min-hop node sequence from each UAV to a BS (starts at the UAV,
    /// ends at the BS); `None` when disconnected.
    pub backhaul_path: Vec<Option<Vec<NodeId>>>,
    pub ue_connected: Vec<bool>,
    /// Index of the UAV serving each UE, if any.
    pub serving_uav: Vec<Option<usize>>,
    /// Rate delivered to each UE, bits/s; 0 when disconnected.
    pub ue_rate_bps: Vec<f64>,
    /// For each UAV, the set of UAV indices whose backhaul path relays
    /// through it.
    pub relay_set: Vec<Vec<usize>>,
}

/// The three headline metrics of a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    /// Fraction of UEs connected to the core network.
    pub connected_ue_proportion: f64,
    /// Mean rate over all UEs (disconnected count as 0), bits/s.
    pub avg_rate_bps: f64,
    /// Fraction of UAVs with a backhaul connection.
    pub available_uav_ratio: f64,
}

/// BFS hop distance from the BS set to every UAV; `None` if unreachable.
/// Direct BS links count as one hop.
fn hop_distances(links: &LinkTable, params: &RadioParams) -> Vec<Option<usize>> {
    let th = params.snr_threshold_db;
    let n = links.n_uav;
    let mut dist: Vec<Option<usize>> = vec![None; n];
    let mut queue = VecDeque::new();
    for u in 0..n {
        if (0..links.n_bs).any(|g| links.bs_uav(g, u).snr_db >= th) {
            dist[u] = Some(1);
            queue.push_back(u);
        }
    }
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued nodes have distances");
        for v in 0..n {
            if v != u && dist[v].is_none() && links.uav_uav(u, v).snr_db >= th {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Per-UAV backhaul connectivity flags.
pub fn uav_connectivity(links: &LinkTable, params: &RadioParams) -> Vec<bool> {
    hop_distances(links, params).iter().map(Option::is_some).collect()
}

/// Min-hop backhaul path for each UAV, or `None` when disconnected.
///
/// Equal-hop ties resolve to the lowest next-hop UAV index, and the final
/// hop to the lowest BS index, so paths are unique and reproducible.
pub fn backhaul_paths(links: &LinkTable, params: &RadioParams) -> Vec<Option<Vec<NodeId>>> {
    let th = params.snr_threshold_db;
    let dist = hop_distances(links, params);
    (0..links.n_uav)
        .map(|start| {
            dist[start]?;
            let mut path = vec![NodeId::uav(start)];
            let mut u = start;
            loop {
                let d = dist[u].expect("on a connected path");
                if d == 1 {
                    let g = (0..links.n_bs)
                        .find(|&g| links.bs_uav(g, u).snr_db >= th)
                        .expect("distance 1 implies a direct BS link");
                    path.push(NodeId::bs(g));
                    return Some(path);
                }
                let next = (0..links.n_uav)
                    .find(|&v| {
                        v != u && dist[v] == Some(d - 1) && links.uav_uav(u, v).snr_db >= th
                    })
                    .expect("distance d > 1 implies a neighbor at d - 1");
                path.push(NodeId::uav(next));
                u = next;
            }
        })
        .collect()
}

/// Associate each UE with the highest-rate connected UAV whose link meets
/// the threshold. Rate ties resolve to the lowest UAV index.
pub fn associate_ues(
    links: &LinkTable,
    uav_connected: &[bool],
    params: &RadioParams,
) -> (Vec<bool>, Vec<Option<usize>>, Vec<f64>) {
    let th = params.snr_threshold_db;
    let mut connected = vec![false; links.n_ue];
    let mut serving = vec![None; links.n_ue];
    let mut rate = vec![0.0; links.n_ue];
    for m in 0..links.n_ue {
        let mut best: Option<(usize, f64)> = None;
        for u in 0..links.n_uav {
            if !uav_connected[u] || links.uav_ue(u, m).snr_db < th {
                continue;
            }
            let r = links.uav_ue(u, m).rate_bps;
            if best.map_or(true, |(_, br)| r > br) {
                best = Some((u, r));
            }
        }
        if let Some((u, r)) = best {
            connected[m] = true;
            serving[m] = Some(u);
            rate[m] = r;
        }
    }
    (connected, serving, rate)
}

/// For each UAV, the UAVs whose backhaul path relays through it.
pub fn relay_sets(paths: &[Option<Vec<NodeId>>]) -> Vec<Vec<usize>> {
    let n = paths.len();
    let mut sets = vec![Vec::new(); n];
    for (v, path) in paths.iter().enumerate() {
        if let Some(path) = path {
            for hop in &path[1..] {
                if hop.kind == crate::world::NodeKind::Uav {
                    sets[hop.index].push(v);
                }
            }
        }
    }
    for s in sets.iter_mut() {
        s.sort_unstable();
    }
    sets
}

/// Run the full connectivity pipeline for one step.
pub fn analyze(links: &LinkTable, params: &RadioParams) -> ConnectivityReport {
    let uav_connected = uav_connectivity(links, params);
    let backhaul_path = backhaul_paths(links, params);
    let (ue_connected, serving_uav, ue_rate_bps) = associate_ues(links, &uav_connected, params);
    let relay_set = relay_sets(&backhaul_path);
    ConnectivityReport {
        uav_connected,
        backhaul_path,
        ue_connected,
        serving_uav,
        ue_rate_bps,
        relay_set,
    }
}

/// Connected-UE proportion, average rate, and available-UAV ratio.
pub fn metrics(report: &ConnectivityReport) -> NetworkMetrics {
    let m = report.ue_connected.len().max(1) as f64;
    let u = report.uav_connected.len().max(1) as f64;
    NetworkMetrics {
        connected_ue_proportion: report.ue_connected.iter().filter(|c| **c).count() as f64 / m,
        avg_rate_bps: report.ue_rate_bps.iter().sum::<f64>() / m,
        available_uav_ratio: report.uav_connected.iter().filter(|c| **c).count() as f64 / u,
    }
}
