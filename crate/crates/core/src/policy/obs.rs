//! Per-agent observation construction.
//!
//! Every agent sees the same shared block (all node positions, the
//! UAV-to-UAV/BS SNR sub-matrix, per-UE served rates, per-UAV
//! connectivity flags) followed by a local block (own position, own SNR
//! row to every node). The layout is fixed for a given scenario shape and
//! all entries are clipped into [-1, 1].

use serde::{Deserialize, Serialize};

use crate::mesh::ConnectivityReport;
use crate::radio::LinkTable;
use crate::world::WorldState;

fn default_snr_clip() -> [f64; 2] {
    [-30.0, 60.0]
}
fn default_rate_ref() -> f64 {
    10e6
}

/// Observation normalization constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObsNorm {
    /// SNR features are clipped to this dB window then mapped to [-1, 1].
    #[serde(default = "default_snr_clip")]
    pub snr_clip_db: [f64; 2],
    /// Served rates are divided by this reference before clipping, bits/s.
    #[serde(default = "default_rate_ref")]
    pub rate_ref_bps: f64,
}

impl Default for ObsNorm {
    fn default() -> Self {
        ObsNorm { snr_clip_db: default_snr_clip(), rate_ref_bps: default_rate_ref() }
    }
}

/// Fixed observation layout for one scenario shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObsLayout {
    pub n_uav: usize,
    pub n_ue: usize,
    pub n_bs: usize,
}

impl ObsLayout {
    pub fn new(n_uav: usize, n_ue: usize, n_bs: usize) -> ObsLayout {
        ObsLayout { n_uav, n_ue, n_bs }
    }

    fn n_nodes(&self) -> usize {
        self.n_uav + self.n_ue + self.n_bs
    }

    /// Length of the shared block.
    pub fn shared_dim(&self) -> usize {
        3 * self.n_nodes() + self.n_uav * (self.n_uav + self.n_bs) + self.n_ue + self.n_uav
    }

    /// Total observation length (shared block plus local block).
    pub fn dim(&self) -> usize {
        self.shared_dim() + 3 + self.n_nodes()
    }
}

fn norm_snr(snr_db: f64, norm: &ObsNorm) -> f64 {
    let [lo, hi] = norm.snr_clip_db;
    let clipped = snr_db.clamp(lo, hi);
    2.0 * (clipped - lo) / (hi - lo) - 1.0
}

/// Build the observation vector for every UAV agent at one step.
///
/// The output depends only on `(state, links, report)`; it never draws
/// randomness. The shared block is bit-identical across agents.
pub fn build_observations(
    state: &WorldState,
    links: &LinkTable,
    report: &ConnectivityReport,
    side_length: f64,
    norm: &ObsNorm,
) -> Vec<Vec<f64>> {
    let layout = ObsLayout::new(state.n_uav(), state.n_ue(), state.n_bs());
    let mut shared = Vec::with_capacity(layout.shared_dim());

    // (1) all node positions, normalized by the side length, global order.
    for id in state.node_ids() {
        let p = state.position(id);
        shared.push((p.x / side_length).clamp(-1.0, 1.0));
        shared.push((p.y / side_length).clamp(-1.0, 1.0));
        shared.push((p.z / side_length).clamp(-1.0, 1.0));
    }

    // (2) UAV x (UAV ++ BS) SNR sub-matrix; the self entry saturates high.
    let self_snr = norm.snr_clip_db[1];
    for u in 0..layout.n_uav {
        for v in 0..layout.n_uav {
            let snr = if u == v { self_snr } else { links.uav_uav(u, v).snr_db };
            shared.push(norm_snr(snr, norm));
        }
        for g in 0..layout.n_bs {
            shared.push(norm_snr(links.bs_uav(g, u).snr_db, norm));
        }
    }

    // (3) per-UE served rate.
    for m in 0..layout.n_ue {
        shared.push((report.ue_rate_bps[m] / norm.rate_ref_bps).clamp(0.0, 1.0));
    }

    // (4) per-UAV backhaul flags.
    for u in 0..layout.n_uav {
        shared.push(f64::from(u8::from(report.uav_connected[u])));
    }

    debug_assert_eq!(shared.len(), layout.shared_dim());

    (0..layout.n_uav)
        .map(|u| {
            let mut obs = Vec::with_capacity(layout.dim());
            obs.extend_from_slice(&shared);
            let p = state.uav[u];
            obs.push((p.x / side_length).clamp(-1.0, 1.0));
            obs.push((p.y / side_length).clamp(-1.0, 1.0));
            obs.push((p.z / side_length).clamp(-1.0, 1.0));
            for v in 0..layout.n_uav {
                let snr = if u == v { self_snr } else { links.uav_uav(u, v).snr_db };
                obs.push(norm_snr(snr, norm));
            }
            for m in 0..layout.n_ue {
                obs.push(norm_snr(links.uav_ue(u, m).snr_db, norm));
            }
            for g in 0..layout.n_bs {
                obs.push(norm_snr(links.bs_uav(g, u).snr_db, norm));
            }
            debug_assert_eq!(obs.len(), layout.dim());
            obs
        })
        .collect()
}
