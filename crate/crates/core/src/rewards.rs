//! Team reward, quantile grouping, and per-agent reward decomposition.
//!
//! The team reward mixes connected-UE proportion with rate; each UAV's
//! individual reward adds its own connection and relay contributions,
//! weighted by the quantile group it was assigned to at episode start
//! (UAVs nearest a BS land in the relay-oriented groups).

use serde::{Deserialize, Serialize};

use crate::mesh::ConnectivityReport;
use crate::world::{distance, WorldState};

fn default_kappa() -> f64 {
    0.025
}
fn default_n_groups() -> usize {
    4
}

/// Reward-shaping configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardConfig {
    /// Rate weight in the team reward, per Mbps.
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    /// Number of quantile groups when `group_sizes` is not given.
    #[serde(default = "default_n_groups")]
    pub n_groups: usize,
    /// Explicit group sizes (must sum to `n_uav`); overrides `n_groups`.
    #[serde(default)]
    pub group_sizes: Option<Vec<usize>>,
    /// Per-group `(alpha1, alpha2)` connection/relay weights; defaults
    /// emphasize relaying for the two BS-side groups and connection for
    /// the outer ones.
    #[serde(default)]
    pub group_weights: Option<Vec<[f64; 2]>>,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            kappa: default_kappa(),
            n_groups: default_n_groups(),
            group_sizes: None,
            group_weights: None,
        }
    }
}

impl RewardConfig {
    /// Group sizes for a population: the explicit list if given, otherwise
    /// the BS-side group sized to the BS count with the remainder split
    /// evenly (larger groups toward the UE-facing side).
    pub fn group_sizes_for(&self, n_uav: usize, n_bs: usize) -> Vec<usize> {
        if let Some(sizes) = &self.group_sizes {
            return sizes.clone();
        }
        let k = self.n_groups.clamp(1, n_uav);
        if k == 1 {
            return vec![n_uav];
        }
        let first = n_bs.min(n_uav - (k - 1)).max(1);
        let rest = n_uav - first;
        let base = rest / (k - 1);
        let extra = rest % (k - 1);
        let mut sizes = vec![first];
        for i in 0..(k - 1) {
            sizes.push(base + usize::from(i >= (k - 1 - extra)));
        }
        sizes
    }

    /// Per-group `(alpha1, alpha2)` weights aligned with `group_sizes_for`.
    pub fn group_weights_for(&self, n_groups: usize) -> Vec<[f64; 2]> {
        if let Some(weights) = &self.group_weights {
            return weights.clone();
        }
        if n_groups == 1 {
            return vec![[1.0, 3.0]];
        }
        (0..n_groups).map(|i| if i <= 1 { [0.25, 3.0] } else { [1.0, 0.75] }).collect()
    }

    pub fn validate(&self, n_uav: usize, n_bs: usize) -> Result<(), String> {
        if !(self.kappa >= 0.0) {
            return Err("rewards.kappa: must be >= 0".into());
        }
        if self.n_groups < 1 {
            return Err("rewards.n_groups: must be >= 1".into());
        }
        let sizes = self.group_sizes_for(n_uav, n_bs);
        if sizes.iter().sum::<usize>() != n_uav {
            return Err(format!(
                "rewards.group_sizes: sum {} != n_uav {}",
                sizes.iter().sum::<usize>(),
                n_uav
            ));
        }
        if sizes.iter().any(|s| *s == 0) {
            return Err("rewards.group_sizes: groups must be non-empty".into());
        }
        let weights = self.group_weights_for(sizes.len());
        if weights.len() != sizes.len() {
            return Err(format!(
                "rewards.group_weights: {} entries for {} groups",
                weights.len(),
                sizes.len()
            ));
        }
        if weights.iter().any(|w| w[0] < 0.0 || w[1] < 0.0) {
            return Err("rewards.group_weights: must be >= 0".into());
        }
        Ok(())
    }
}

/// Quantile group assignment fixed at episode start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAssignment {
    /// Group index per UAV.
    pub group_of: Vec<usize>,
    pub group_sizes: Vec<usize>,
    /// Connection-reward weight per group.
    pub alpha1: Vec<f64>,
    /// Relay-reward weight per group.
    pub alpha2: Vec<f64>,
    /// True for the group nearest the BSs (exactly one).
    pub is_bs_group: Vec<bool>,
}

impl GroupAssignment {
    pub fn n_groups(&self) -> usize {
        self.group_sizes.len()
    }

    /// Whether a UAV belongs to the BS-side group.
    pub fn in_bs_group(&self, uav: usize) -> bool {
        self.is_bs_group[self.group_of[uav]]
    }
}

/// Assign UAVs to quantile groups by their distance to the nearest BS in
/// the initial state. Ties break by UAV index; the first group (nearest
/// the BSs) is the BS group.
///
/// # Panics
/// If `group_sizes` does not sum to the UAV count or weights mismatch.
pub fn assign_groups(
    initial_state: &WorldState,
    group_sizes: &[usize],
    group_weights: &[[f64; 2]],
) -> GroupAssignment {
    let n = initial_state.n_uav();
    assert_eq!(group_sizes.iter().sum::<usize>(), n, "group sizes must cover every UAV");
    assert_eq!(group_sizes.len(), group_weights.len(), "one weight pair per group");

    let mut order: Vec<usize> = (0..n).collect();
    let bs_dist = |u: usize| {
        initial_state
            .bs
            .iter()
            .map(|g| distance(&initial_state.uav[u], g))
            .fold(f64::INFINITY, f64::min)
    };
    order.sort_by(|&a, &b| bs_dist(a).partial_cmp(&bs_dist(b)).unwrap().then(a.cmp(&b)));

    let mut group_of = vec![0usize; n];
    let mut cursor = 0;
    for (g, &size) in group_sizes.iter().enumerate() {
        for &u in &order[cursor..cursor + size] {
            group_of[u] = g;
        }
        cursor += size;
    }

    let mut is_bs_group = vec![false; group_sizes.len()];
    is_bs_group[0] = true;

    GroupAssignment {
        group_of,
        group_sizes: group_sizes.to_vec(),
        alpha1: group_weights.iter().map(|w| w[0]).collect(),
        alpha2: group_weights.iter().map(|w| w[1]).collect(),
        is_bs_group,
    }
}

/// Team reward: connected-UE proportion plus `kappa`-weighted mean rate
/// in Mbps.
pub fn team_reward(report: &ConnectivityReport, kappa: f64) -> f64 {
    let m = report.ue_connected.len().max(1) as f64;
    let connected = report.ue_connected.iter().filter(|c| **c).count() as f64;
    let rate_mbps: f64 = report.ue_rate_bps.iter().map(|r| r / 1e6).sum();
    connected / m + kappa * rate_mbps / m
}

/// Total rate each UAV delivers to the UEs it serves, Mbps.
pub fn connection_reward(report: &ConnectivityReport) -> Vec<f64> {
    let mut conn = vec![0.0; report.uav_connected.len()];
    for (m, serving) in report.serving_uav.iter().enumerate() {
        if let Some(u) = serving {
            conn[*u] += report.ue_rate_bps[m] / 1e6;
        }
    }
    conn
}

/// Total connection reward of the UAVs relayed through each UAV, Mbps.
pub fn relay_reward(report: &ConnectivityReport, conn_mbps: &[f64]) -> Vec<f64> {
    report
        .relay_set
        .iter()
        .map(|set| set.iter().map(|&v| conn_mbps[v]).sum())
        .collect()
}

/// Decomposed rewards for one step.
///
/// `conn` and `relay` are stored scaled by `kappa / M` so they are
/// commensurate with the team reward, making the combination exactly
/// `individual = team + alpha1 * conn + alpha2 * relay`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub team: f64,
    pub conn: Vec<f64>,
    pub relay: Vec<f64>,
    pub individual: Vec<f64>,
}

/// Combine the components into per-UAV individual rewards using the
/// group weights.
pub fn individual_rewards(
    report: &ConnectivityReport,
    groups: &GroupAssignment,
    kappa: f64,
) -> RewardBreakdown {
    let team = team_reward(report, kappa);
    let conn_mbps = connection_reward(report);
    let relay_mbps = relay_reward(report, &conn_mbps);
    let scale = kappa / report.ue_connected.len().max(1) as f64;
    let conn: Vec<f64> = conn_mbps.iter().map(|c| c * scale).collect();
    let relay: Vec<f64> = relay_mbps.iter().map(|r| r * scale).collect();
    let individual = (0..conn.len())
        .map(|u| {
            let g = groups.group_of[u];
            team + groups.alpha1[g] * conn[u] + groups.alpha2[g] * relay[u]
        })
        .collect();
    RewardBreakdown { team, conn, relay, individual }
}
