//! Scenario definition, node kinematics, and episode stepping.
//!
//! The world is the single source of truth for positions. UAVs move on a
//! fixed-altitude plane through nine discrete actions (eight compass
//! directions plus hover), UEs follow a constant-speed Brownian heading
//! process reflected at the boundary, and base stations are static.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

/// Node population kind. The fixed global node order is UAVs, then UEs,
/// then BSs, each ascending by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Uav,
    Ue,
    Bs,
}

/// Identity of one node: its kind plus the index within that kind's set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeId {
    pub kind: NodeKind,
    pub index: usize,
}

impl NodeId {
    pub fn uav(index: usize) -> Self {
        Self { kind: NodeKind::Uav, index }
    }
    pub fn ue(index: usize) -> Self {
        Self { kind: NodeKind::Ue, index }
    }
    pub fn bs(index: usize) -> Self {
        Self { kind: NodeKind::Bs, index }
    }
}

/// A point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Squared planar (x, y) distance.
    pub fn planar_dist2(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Euclidean distance between two positions, in meters.
pub fn distance(a: &Position, b: &Position) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    (dx * dx + dy * dy + dz * dz).sqrt()
}

const FRAC_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Unit direction vectors for action codes 0..7, hover (code 8) is (0, 0).
/// Order is fixed across the whole system: N, NE, E, SE, S, SW, W, NW.
pub const ACTION_DIRECTIONS: [(f64, f64); 9] = [
    (0.0, 1.0),
    (FRAC_SQRT2, FRAC_SQRT2),
    (1.0, 0.0),
    (FRAC_SQRT2, -FRAC_SQRT2),
    (0.0, -1.0),
    (-FRAC_SQRT2, -FRAC_SQRT2),
    (-1.0, 0.0),
    (-FRAC_SQRT2, FRAC_SQRT2),
    (0.0, 0.0),
];

/// Number of discrete actions (eight directions plus hover).
pub const ACTION_COUNT: usize = 9;

/// One UAV movement decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action(u8);

impl Action {
    pub const HOVER: Action = Action(8);

    /// Build from a raw code in `[0, 8]`.
    pub fn from_code(code: u8) -> Option<Action> {
        (code < ACTION_COUNT as u8).then_some(Action(code))
    }

    pub fn code(&self) -> u8 {
        self.0
    }

    pub fn is_hover(&self) -> bool {
        self.0 == 8
    }

    /// Unit movement direction; the zero vector for hover.
    pub fn direction(&self) -> (f64, f64) {
        ACTION_DIRECTIONS[self.0 as usize]
    }

    /// All actions in code order.
    pub fn all() -> impl Iterator<Item = Action> {
        (0..ACTION_COUNT as u8).map(Action)
    }
}

/// Initial UE placement distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum UeInit {
    Uniform,
    GaussianMixture {
        /// Component centers in meters.
        centers: Vec<[f64; 2]>,
        /// Per-component standard deviation in meters.
        sigmas: Vec<f64>,
        /// Relative component weights; need not be normalized.
        weights: Vec<f64>,
    },
}

impl Default for UeInit {
    fn default() -> Self {
        UeInit::Uniform
    }
}

fn default_uav_altitude() -> f64 {
    100.0
}
fn default_bs_height() -> f64 {
    30.0
}
fn default_sigma_heading() -> f64 {
    0.3
}

/// Static description of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Side length of the square environment, meters.
    pub side_length: f64,
    pub n_uav: usize,
    pub n_ue: usize,
    pub n_bs: usize,
    /// Fixed UAV flight altitude, meters. The action space is planar.
    #[serde(default = "default_uav_altitude")]
    pub uav_altitude: f64,
    /// BS antenna mount height, meters.
    #[serde(default = "default_bs_height")]
    pub bs_height: f64,
    /// UE displacement per step, meters.
    pub ue_speed: f64,
    /// UAV displacement per step, meters.
    pub uav_step: f64,
    /// Steps per episode.
    pub horizon: usize,
    /// Std-dev of the per-step Gaussian UE heading rotation, radians.
    #[serde(default = "default_sigma_heading")]
    pub sigma_heading: f64,
    #[serde(default)]
    pub ue_init: UeInit,
    #[serde(default)]
    pub rng_seed: u64,
}

/// A scenario field failed validation.
#[derive(Debug, Error)]
#[error("invalid scenario config: {field}: {reason}")]
pub struct ScenarioError {
    pub field: &'static str,
    pub reason: String,
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError { field, reason: reason.into() }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.side_length > 0.0) {
            return Err(invalid("side_length", "must be > 0"));
        }
        if self.n_uav < 1 {
            return Err(invalid("n_uav", "must be >= 1"));
        }
        if self.n_ue < 1 {
            return Err(invalid("n_ue", "must be >= 1"));
        }
        if self.n_bs < 1 {
            return Err(invalid("n_bs", "must be >= 1"));
        }
        if !(self.uav_step > 0.0) {
            return Err(invalid("uav_step", "must be > 0"));
        }
        if self.horizon < 1 {
            return Err(invalid("horizon", "must be >= 1"));
        }
        if !(self.ue_speed >= 0.0) {
            return Err(invalid("ue_speed", "must be >= 0"));
        }
        if !(self.uav_altitude > 0.0) {
            return Err(invalid("uav_altitude", "must be > 0"));
        }
        if !(self.bs_height >= 0.0) {
            return Err(invalid("bs_height", "must be >= 0"));
        }
        if !(self.sigma_heading >= 0.0) {
            return Err(invalid("sigma_heading", "must be >= 0"));
        }
        if let UeInit::GaussianMixture { centers, sigmas, weights } = &self.ue_init {
            if centers.is_empty() {
                return Err(invalid("ue_init.centers", "must be non-empty"));
            }
            if sigmas.len() != centers.len() || weights.len() != centers.len() {
                return Err(invalid("ue_init", "centers, sigmas, weights must have equal length"));
            }
            if weights.iter().any(|w| *w < 0.0) || weights.iter().sum::<f64>() <= 0.0 {
                return Err(invalid("ue_init.weights", "must be non-negative with positive sum"));
            }
        }
        Ok(())
    }
}

/// Positions and kinematics of every node plus the episode clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub t: usize,
    pub uav: Vec<Position>,
    pub ue: Vec<Position>,
    pub bs: Vec<Position>,
    /// Unit heading per UE, planar.
    pub ue_headings: Vec<[f64; 2]>,
}

impl WorldState {
    pub fn n_uav(&self) -> usize {
        self.uav.len()
    }
    pub fn n_ue(&self) -> usize {
        self.ue.len()
    }
    pub fn n_bs(&self) -> usize {
        self.bs.len()
    }
    pub fn n_nodes(&self) -> usize {
        self.uav.len() + self.ue.len() + self.bs.len()
    }

    pub fn position(&self, id: NodeId) -> Position {
        match id.kind {
            NodeKind::Uav => self.uav[id.index],
            NodeKind::Ue => self.ue[id.index],
            NodeKind::Bs => self.bs[id.index],
        }
    }

    /// All node ids in the fixed global order (UAVs, UEs, BSs).
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        let (u, m, g) = (self.uav.len(), self.ue.len(), self.bs.len());
        (0..u)
            .map(NodeId::uav)
            .chain((0..m).map(NodeId::ue))
            .chain((0..g).map(NodeId::bs))
    }
}

/// Corner coordinates of the square environment, in index order.
fn corners(side: f64) -> [(f64, f64); 4] {
    [(0.0, 0.0), (side, 0.0), (side, side), (0.0, side)]
}

/// Build the initial world from the scenario's own seed.
pub fn init_world(cfg: &ScenarioConfig) -> Result<WorldState, ScenarioError> {
    let mut rng = rng::stream(cfg.rng_seed, "world-init", &[]);
    init_world_with_rng(cfg, &mut rng)
}

/// Build the initial world drawing from an externally derived stream.
///
/// Placement order: UEs are sampled first, BSs go to the corners farthest
/// from the UE centroid (all four when `n_bs = 4`; equal-arc boundary
/// spacing beyond that), and UAVs are spread along the segments from each
/// BS toward the region center with a small jitter so their initial BS
/// distances are distinct.
pub fn init_world_with_rng<R: Rng>(
    cfg: &ScenarioConfig,
    rng: &mut R,
) -> Result<WorldState, ScenarioError> {
    cfg.validate()?;
    let side = cfg.side_length;

    let ue = sample_ues(cfg, rng);
    let centroid = {
        let (sx, sy) = ue.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.x, acc.1 + p.y));
        (sx / ue.len() as f64, sy / ue.len() as f64)
    };

    let bs = place_bs(cfg, centroid);

    let center = (side / 2.0, side / 2.0);
    let mut uav = Vec::with_capacity(cfg.n_uav);
    let per_bs = {
        let mut counts = vec![0usize; cfg.n_bs];
        for u in 0..cfg.n_uav {
            counts[u % cfg.n_bs] += 1;
        }
        counts
    };
    for u in 0..cfg.n_uav {
        let b = u % cfg.n_bs;
        let rank = u / cfg.n_bs;
        let frac = (rank + 1) as f64 / (per_bs[b] + 1) as f64;
        let bx = bs[b].x + frac * (center.0 - bs[b].x);
        let by = bs[b].y + frac * (center.1 - bs[b].y);
        let jx = rng.gen_range(-0.05..=0.05) * side;
        let jy = rng.gen_range(-0.05..=0.05) * side;
        uav.push(Position::new(
            (bx + jx).clamp(0.0, side),
            (by + jy).clamp(0.0, side),
            cfg.uav_altitude,
        ));
    }

    let ue_headings = (0..cfg.n_ue)
        .map(|_| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            [theta.cos(), theta.sin()]
        })
        .collect();

    Ok(WorldState { t: 0, uav, ue, bs, ue_headings })
}

fn sample_ues<R: Rng>(cfg: &ScenarioConfig, rng: &mut R) -> Vec<Position> {
    let side = cfg.side_length;
    match &cfg.ue_init {
        UeInit::Uniform => (0..cfg.n_ue)
            .map(|_| Position::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side), 0.0))
            .collect(),
        UeInit::GaussianMixture { centers, sigmas, weights } => {
            let total: f64 = weights.iter().sum();
            (0..cfg.n_ue)
                .map(|_| {
                    let mut pick = rng.gen_range(0.0..total);
                    let mut k = 0;
                    for (i, w) in weights.iter().enumerate() {
                        if pick < *w {
                            k = i;
                            break;
                        }
                        pick -= w;
                        k = i;
                    }
                    let normal = Normal::new(0.0, sigmas[k]).expect("validated sigma");
                    let x = centers[k][0] + normal.sample(rng);
                    let y = centers[k][1] + normal.sample(rng);
                    Position::new(x.clamp(0.0, side), y.clamp(0.0, side), 0.0)
                })
                .collect()
        }
    }
}

fn place_bs(cfg: &ScenarioConfig, ue_centroid: (f64, f64)) -> Vec<Position> {
    let side = cfg.side_length;
    let h = cfg.bs_height;
    if cfg.n_bs <= 4 {
        // Farthest corners from the UE centroid, so UEs rarely connect to a
        // BS directly; ties broken by corner index.
        let mut ranked: Vec<(usize, f64)> = corners(side)
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d2 = (c.0 - ue_centroid.0).powi(2) + (c.1 - ue_centroid.1).powi(2);
                (i, d2)
            })
            .collect();
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let mut chosen: Vec<usize> = ranked.iter().take(cfg.n_bs).map(|(i, _)| *i).collect();
        chosen.sort_unstable();
        chosen
            .into_iter()
            .map(|i| {
                let c = corners(side)[i];
                Position::new(c.0, c.1, h)
            })
            .collect()
    } else {
        // Equal arc spacing along the boundary, starting at the origin corner.
        let perimeter = 4.0 * side;
        (0..cfg.n_bs)
            .map(|k| {
                let s = k as f64 * perimeter / cfg.n_bs as f64;
                let (x, y) = if s < side {
                    (s, 0.0)
                } else if s < 2.0 * side {
                    (side, s - side)
                } else if s < 3.0 * side {
                    (3.0 * side - s, side)
                } else {
                    (0.0, 4.0 * side - s)
                };
                Position::new(x, y, h)
            })
            .collect()
    }
}

/// Advance all UEs by one step of the constant-speed heading process.
///
/// Each heading is rotated by Gaussian angle noise, the UE moves
/// `ue_speed` along it, and positions reflect off the boundary (the
/// heading component flips with the reflection). UE `z` stays 0.
pub fn step_ues<R: Rng>(state: &WorldState, cfg: &ScenarioConfig, rng: &mut R) -> WorldState {
    let mut next = state.clone();
    let side = cfg.side_length;
    let noise = Normal::new(0.0, cfg.sigma_heading.max(0.0)).expect("non-negative sigma");
    for (pos, heading) in next.ue.iter_mut().zip(next.ue_headings.iter_mut()) {
        let dtheta: f64 = noise.sample(rng);
        let (sin, cos) = dtheta.sin_cos();
        let h = *heading;
        *heading = [h[0] * cos - h[1] * sin, h[0] * sin + h[1] * cos];
        pos.x += cfg.ue_speed * heading[0];
        pos.y += cfg.ue_speed * heading[1];
        reflect(&mut pos.x, &mut heading[0], side);
        reflect(&mut pos.y, &mut heading[1], side);
    }
    next
}

fn reflect(coord: &mut f64, heading: &mut f64, side: f64) {
    loop {
        if *coord < 0.0 {
            *coord = -*coord;
            *heading = -*heading;
        } else if *coord > side {
            *coord = 2.0 * side - *coord;
            *heading = -*heading;
        } else {
            return;
        }
    }
}

/// Apply one action per UAV and advance the episode clock.
///
/// Moves are clamped to the boundary: a UAV choosing an out-of-bounds
/// direction loses the out-of-bounds component. Displacement never
/// exceeds `uav_step`.
///
/// # Panics
/// If `actions.len() != n_uav`.
pub fn apply_actions(state: &WorldState, actions: &[Action], cfg: &ScenarioConfig) -> WorldState {
    assert_eq!(
        actions.len(),
        state.uav.len(),
        "one action per UAV required (got {}, need {})",
        actions.len(),
        state.uav.len()
    );
    let mut next = state.clone();
    let side = cfg.side_length;
    for (pos, action) in next.uav.iter_mut().zip(actions) {
        let (dx, dy) = action.direction();
        pos.x = (pos.x + cfg.uav_step * dx).clamp(0.0, side);
        pos.y = (pos.y + cfg.uav_step * dy).clamp(0.0, side);
    }
    next.t += 1;
    next
}
