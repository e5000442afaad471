//! Link-budget computation for the three link classes.
//!
//! BS-UAV and UAV-UAV links use free-space path loss; UAV-UE links use the
//! elevation-angle LoS/NLoS probability mixture. Received power, SNR, and
//! Shannon rate follow from the per-class transmit power, antenna gains,
//! bandwidth, and noise figure. All operations are pure functions in 64-bit
//! floating point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::world::{NodeId, NodeKind, Position, WorldState};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Floor applied to link distances so coincident nodes do not produce
/// log(0) in the path-loss formulas.
pub const DISTANCE_FLOOR_M: f64 = 1.0;

/// Link class, derived from the endpoint node kinds. UE-UE, BS-UE, and
/// BS-BS links do not exist in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkClass {
    BsUav,
    UavUav,
    UavUe,
}

impl LinkClass {
    /// Classify an ordered (transmitter, receiver) node-kind pair.
    pub fn of(tx: NodeKind, rx: NodeKind) -> Option<LinkClass> {
        match (tx, rx) {
            (NodeKind::Bs, NodeKind::Uav) | (NodeKind::Uav, NodeKind::Bs) => Some(LinkClass::BsUav),
            (NodeKind::Uav, NodeKind::Uav) => Some(LinkClass::UavUav),
            (NodeKind::Uav, NodeKind::Ue) | (NodeKind::Ue, NodeKind::Uav) => Some(LinkClass::UavUe),
            _ => None,
        }
    }
}

fn default_f_c() -> f64 {
    2.4e9
}
fn default_eta_los() -> f64 {
    1.0
}
fn default_eta_nlos() -> f64 {
    20.0
}
fn default_env_a() -> f64 {
    9.61
}
fn default_env_b() -> f64 {
    0.16
}
fn default_p_tx() -> KindMap {
    KindMap { uav: 1.0, ue: 0.4, bs: 10.0 }
}
fn default_gain() -> KindMap {
    KindMap { uav: 0.0, ue: 0.0, bs: 5.0 }
}
fn default_bandwidth() -> ClassMap {
    ClassMap { bs_uav: 7.0e6, uav_uav: 5.0e6, uav_ue: 1.0e6 }
}
fn default_noise_figure() -> f64 {
    15.0
}
fn default_snr_threshold() -> f64 {
    25.0
}

/// Per-node-kind scalar (transmit power in watts, or antenna gain in dBi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KindMap {
    pub uav: f64,
    pub ue: f64,
    pub bs: f64,
}

impl KindMap {
    pub fn get(&self, kind: NodeKind) -> f64 {
        match kind {
            NodeKind::Uav => self.uav,
            NodeKind::Ue => self.ue,
            NodeKind::Bs => self.bs,
        }
    }
}

/// Per-link-class scalar (bandwidth in Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassMap {
    pub bs_uav: f64,
    pub uav_uav: f64,
    pub uav_ue: f64,
}

impl ClassMap {
    pub fn get(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::BsUav => self.bs_uav,
            LinkClass::UavUav => self.uav_uav,
            LinkClass::UavUe => self.uav_ue,
        }
    }
}

/// Physical-layer parameters. Defaults are the system's reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioParams {
    /// Carrier frequency, Hz.
    #[serde(default = "default_f_c")]
    pub f_c: f64,
    /// Excess path loss for LoS propagation, dB.
    #[serde(default = "default_eta_los")]
    pub eta_los: f64,
    /// Excess path loss for NLoS propagation, dB.
    #[serde(default = "default_eta_nlos")]
    pub eta_nlos: f64,
    /// Environment constant `a` of the LoS-probability sigmoid.
    #[serde(default = "default_env_a")]
    pub env_a: f64,
    /// Environment constant `b` of the LoS-probability sigmoid.
    #[serde(default = "default_env_b")]
    pub env_b: f64,
    /// Transmit power per node kind, watts.
    #[serde(default = "default_p_tx")]
    pub p_tx_w: KindMap,
    /// Antenna gain per node kind, dBi (used for both transmit and receive).
    #[serde(default = "default_gain")]
    pub gain_dbi: KindMap,
    /// Bandwidth per link class, Hz.
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: ClassMap,
    /// Receiver noise figure, dB.
    #[serde(default = "default_noise_figure")]
    pub noise_figure_db: f64,
    /// SNR threshold below which a link counts as disconnected, dB.
    #[serde(default = "default_snr_threshold")]
    pub snr_threshold_db: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            f_c: default_f_c(),
            eta_los: default_eta_los(),
            eta_nlos: default_eta_nlos(),
            env_a: default_env_a(),
            env_b: default_env_b(),
            p_tx_w: default_p_tx(),
            gain_dbi: default_gain(),
            bandwidth_hz: default_bandwidth(),
            noise_figure_db: default_noise_figure(),
            snr_threshold_db: default_snr_threshold(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RadioError {
    #[error("invalid radio params: {field}: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("no link class exists between {tx:?} and {rx:?}")]
    InvalidLink { tx: NodeKind, rx: NodeKind },
    #[error("non-positive distance {0} m")]
    BadDistance(f64),
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), RadioError> {
        let bad = |field: &'static str, reason: &str| {
            Err(RadioError::InvalidParams { field, reason: reason.to_string() })
        };
        if !(self.f_c > 0.0) {
            return bad("f_c", "must be > 0");
        }
        if self.eta_nlos < self.eta_los {
            return bad("eta_nlos", "must be >= eta_los");
        }
        for (v, field) in [
            (self.bandwidth_hz.bs_uav, "bandwidth_hz.bs_uav"),
            (self.bandwidth_hz.uav_uav, "bandwidth_hz.uav_uav"),
            (self.bandwidth_hz.uav_ue, "bandwidth_hz.uav_ue"),
        ] {
            if !(v > 0.0) {
                return bad(field, "must be > 0");
            }
        }
        Ok(())
    }

    fn p_tx_dbm(&self, kind: NodeKind) -> f64 {
        10.0 * (self.p_tx_w.get(kind) * 1e3).log10()
    }
}

/// Free-space path loss in dB at distance `d` meters, including the LoS
/// excess term: `20 log10(4 pi f_c / c) + 20 log10(d) + eta_los`.
pub fn fspl_db(d: f64, params: &RadioParams) -> Result<f64, RadioError> {
    if !(d > 0.0) {
        return Err(RadioError::BadDistance(d));
    }
    let d = d.max(DISTANCE_FLOOR_M);
    Ok(20.0 * (4.0 * std::f64::consts::PI * params.f_c / SPEED_OF_LIGHT).log10()
        + 20.0 * d.log10()
        + params.eta_los)
}

/// Probability that a UAV-UE link is line-of-sight, from the elevation
/// angle sigmoid `1 / (1 + a exp(-b (theta_deg - a)))`.
///
/// # Panics
/// If the geometry is impossible (UAV height above the link distance).
pub fn los_probability(uav: &Position, ue: &Position, params: &RadioParams) -> f64 {
    let d = crate::world::distance(uav, ue).max(DISTANCE_FLOOR_M);
    let dz = uav.z - ue.z;
    assert!(
        dz <= d + 1e-9,
        "UAV height {dz} exceeds link distance {d}; invalid geometry"
    );
    let theta_deg = (dz / d).min(1.0).asin().to_degrees();
    1.0 / (1.0 + params.env_a * (-params.env_b * (theta_deg - params.env_a)).exp())
}

/// Path loss in dB between two nodes.
///
/// UAV-UE links mix the LoS and NLoS losses by the LoS probability (the
/// expected value, not a per-step draw); the other two classes are
/// free-space with the LoS excess term.
pub fn path_loss_db(
    i: (NodeId, &Position),
    j: (NodeId, &Position),
    params: &RadioParams,
) -> Result<f64, RadioError> {
    let class = LinkClass::of(i.0.kind, j.0.kind).ok_or(RadioError::InvalidLink {
        tx: i.0.kind,
        rx: j.0.kind,
    })?;
    let d = crate::world::distance(i.1, j.1).max(DISTANCE_FLOOR_M);
    match class {
        LinkClass::BsUav | LinkClass::UavUav => fspl_db(d, params),
        LinkClass::UavUe => {
            let (uav, ue) = if i.0.kind == NodeKind::Uav { (i.1, j.1) } else { (j.1, i.1) };
            let p_los = los_probability(uav, ue, params);
            let base = fspl_db(d, params)?;
            // fspl_db already carries eta_los; the NLoS branch swaps it out.
            let pl_los = base;
            let pl_nlos = base - params.eta_los + params.eta_nlos;
            Ok(p_los * pl_los + (1.0 - p_los) * pl_nlos)
        }
    }
}

/// Noise power in dBm for a link class:
/// `-174 + 10 log10(B) + NF`.
pub fn noise_dbm(class: LinkClass, params: &RadioParams) -> f64 {
    -174.0 + 10.0 * params.bandwidth_hz.get(class).log10() + params.noise_figure_db
}

/// SNR in dB from transmitter `i` to receiver `j`:
/// `P_tx(dBm) + G_tx + G_rx - PL - N`.
pub fn snr_db(
    i: (NodeId, &Position),
    j: (NodeId, &Position),
    params: &RadioParams,
) -> Result<f64, RadioError> {
    let class = LinkClass::of(i.0.kind, j.0.kind).ok_or(RadioError::InvalidLink {
        tx: i.0.kind,
        rx: j.0.kind,
    })?;
    let pl = path_loss_db(i, j, params)?;
    Ok(params.p_tx_dbm(i.0.kind) + params.gain_dbi.get(i.0.kind) + params.gain_dbi.get(j.0.kind)
        - pl
        - noise_dbm(class, params))
}

/// Shannon rate in bits/s for an SNR given in dB: `B log2(1 + 10^(snr/10))`.
pub fn rate_bps_from_snr(snr_db: f64, class: LinkClass, params: &RadioParams) -> f64 {
    let snr_linear = 10f64.powf(snr_db / 10.0);
    params.bandwidth_hz.get(class) * (1.0 + snr_linear).log2()
}

/// Shannon rate in bits/s from transmitter `i` to receiver `j`.
pub fn rate_bps(
    i: (NodeId, &Position),
    j: (NodeId, &Position),
    params: &RadioParams,
) -> Result<f64, RadioError> {
    let class = LinkClass::of(i.0.kind, j.0.kind).ok_or(RadioError::InvalidLink {
        tx: i.0.kind,
        rx: j.0.kind,
    })?;
    Ok(rate_bps_from_snr(snr_db(i, j, params)?, class, params))
}

/// Largest distance at which a link of `class` still meets the SNR
/// threshold, found by inverting the free-space budget analytically.
///
/// Only meaningful for the FSPL classes (BS-UAV, UAV-UAV); `tx`/`rx` name
/// the endpoint kinds whose power and gains apply.
pub fn max_link_range_m(class: LinkClass, tx: NodeKind, rx: NodeKind, params: &RadioParams) -> f64 {
    let budget = params.p_tx_dbm(tx) + params.gain_dbi.get(tx) + params.gain_dbi.get(rx)
        - params.snr_threshold_db
        - noise_dbm(class, params);
    let k = 20.0 * (4.0 * std::f64::consts::PI * params.f_c / SPEED_OF_LIGHT).log10();
    10f64.powf((budget - k - params.eta_los) / 20.0)
}

/// Dense per-step table of path loss, SNR, and rate for every relevant
/// pair: BS→UAV, UAV↔UAV (stored once per unordered pair, symmetric
/// because powers and gains match), and UAV→UE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkTable {
    pub n_uav: usize,
    pub n_ue: usize,
    pub n_bs: usize,
    /// Indexed `[g * n_uav + u]`.
    bs_uav: Vec<LinkEntry>,
    /// Indexed `[u * n_uav + v]`; the diagonal is unused.
    uav_uav: Vec<LinkEntry>,
    /// Indexed `[u * n_ue + m]`.
    uav_ue: Vec<LinkEntry>,
}

/// One directed link's budget figures.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkEntry {
    pub path_loss_db: f64,
    pub snr_db: f64,
    pub rate_bps: f64,
}

impl LinkTable {
    pub fn bs_uav(&self, g: usize, u: usize) -> &LinkEntry {
        &self.bs_uav[g * self.n_uav + u]
    }

    pub fn uav_uav(&self, u: usize, v: usize) -> &LinkEntry {
        debug_assert_ne!(u, v, "no self link");
        &self.uav_uav[u * self.n_uav + v]
    }

    pub fn uav_ue(&self, u: usize, m: usize) -> &LinkEntry {
        &self.uav_ue[u * self.n_ue + m]
    }

    /// Total number of stored link entries (unordered UAV pairs counted once).
    pub fn len(&self) -> usize {
        self.n_bs * self.n_uav + self.n_uav * (self.n_uav - 1) / 2 + self.n_uav * self.n_ue
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluate every relevant pair of the current state exactly once.
pub fn build_link_table(state: &WorldState, params: &RadioParams) -> LinkTable {
    let (n_uav, n_ue, n_bs) = (state.n_uav(), state.n_ue(), state.n_bs());
    let entry = |i: (NodeId, &Position), j: (NodeId, &Position)| {
        let class = LinkClass::of(i.0.kind, j.0.kind).expect("valid link class");
        let pl = path_loss_db(i, j, params).expect("valid link");
        let snr = params.p_tx_dbm(i.0.kind)
            + params.gain_dbi.get(i.0.kind)
            + params.gain_dbi.get(j.0.kind)
            - pl
            - noise_dbm(class, params);
        LinkEntry { path_loss_db: pl, snr_db: snr, rate_bps: rate_bps_from_snr(snr, class, params) }
    };

    let mut bs_uav = Vec::with_capacity(n_bs * n_uav);
    for g in 0..n_bs {
        for u in 0..n_uav {
            bs_uav.push(entry((NodeId::bs(g), &state.bs[g]), (NodeId::uav(u), &state.uav[u])));
        }
    }

    let mut uav_uav = vec![LinkEntry::default(); n_uav * n_uav];
    for u in 0..n_uav {
        for v in (u + 1)..n_uav {
            let e = entry((NodeId::uav(u), &state.uav[u]), (NodeId::uav(v), &state.uav[v]));
            uav_uav[u * n_uav + v] = e;
            uav_uav[v * n_uav + u] = e;
        }
    }

    let mut uav_ue = Vec::with_capacity(n_uav * n_ue);
    for u in 0..n_uav {
        for m in 0..n_ue {
            uav_ue.push(entry((NodeId::uav(u), &state.uav[u]), (NodeId::ue(m), &state.ue[m])));
        }
    }

    LinkTable { n_uav, n_ue, n_bs, bs_uav, uav_uav, uav_ue }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{distance, Position};
    use rand::Rng;

    fn params() -> RadioParams {
        RadioParams::default()
    }

    #[test]
    fn fspl_worked_values() {
        let p = params();
        assert!((fspl_db(100.0, &p).unwrap() - 81.05).abs() < 0.01);
        assert!((fspl_db(1000.0, &p).unwrap() - 101.05).abs() < 0.01);
        // Doubling distance adds 20 log10(2).
        let six = fspl_db(200.0, &p).unwrap() - fspl_db(100.0, &p).unwrap();
        assert!((six - 20.0 * 2f64.log10()).abs() < 1e-12);
        assert!(fspl_db(0.0, &p).is_err());
        assert!(fspl_db(-3.0, &p).is_err());
    }

    #[test]
    fn los_probability_worked_values() {
        let p = params();
        let ue = Position::new(0.0, 0.0, 0.0);
        let overhead = Position::new(0.0, 0.0, 100.0);
        assert!((los_probability(&overhead, &ue, &p) - 0.99997).abs() < 1e-4);
        // z = 100, d = 500 -> theta = 11.537 degrees.
        let slanted = Position::new((500f64.powi(2) - 100.0 * 100.0).sqrt(), 0.0, 100.0);
        assert!((los_probability(&slanted, &ue, &p) - 0.1241).abs() < 1e-3);
    }

    #[test]
    fn los_probability_monotone_in_elevation() {
        let p = params();
        let ue = Position::new(0.0, 0.0, 0.0);
        let mut last = 0.0;
        for k in 1..=50 {
            // Fixed range, rising elevation angle.
            let theta = (k as f64 / 50.0) * std::f64::consts::FRAC_PI_2;
            let uav = Position::new(400.0 * theta.cos(), 0.0, 400.0 * theta.sin());
            let prob = los_probability(&uav, &ue, &p);
            assert!(prob > last, "not increasing at step {k}");
            last = prob;
        }
    }

    #[test]
    fn mixture_path_loss() {
        let p = params();
        let ue = (NodeId::ue(0), &Position::new(0.0, 0.0, 0.0));
        let overhead = Position::new(0.0, 0.0, 100.0);
        let uav = (NodeId::uav(0), &overhead);
        // Directly overhead the mixture is essentially the LoS term.
        let pl = path_loss_db(uav, ue, &p).unwrap();
        assert!((pl - 81.05).abs() < 0.05, "pl = {pl}");

        // Degenerate mixture: equal excess losses collapse to FSPL.
        let mut flat = params();
        flat.eta_nlos = flat.eta_los;
        let far = Position::new(400.0, 300.0, 100.0);
        let d = distance(&far, ue.1);
        let pl = path_loss_db((NodeId::uav(0), &far), ue, &flat).unwrap();
        assert!((pl - fspl_db(d, &flat).unwrap()).abs() < 1e-12);

        // UAV-UAV dispatches to plain FSPL.
        let a = Position::new(0.0, 0.0, 100.0);
        let b = Position::new(100.0, 0.0, 100.0);
        let pl = path_loss_db((NodeId::uav(0), &a), (NodeId::uav(1), &b), &p).unwrap();
        assert_eq!(pl, fspl_db(100.0, &p).unwrap());

        // No UE-UE class.
        assert!(path_loss_db(ue, (NodeId::ue(1), &far), &p).is_err());
    }

    #[test]
    fn noise_worked_values() {
        let p = params();
        assert!((noise_dbm(LinkClass::UavUe, &p) - (-99.0)).abs() < 1e-9);
        assert!((noise_dbm(LinkClass::BsUav, &p) - (-90.55)).abs() < 0.01);
        assert!((noise_dbm(LinkClass::UavUav, &p) - (-92.01)).abs() < 0.01);
    }

    #[test]
    fn snr_worked_values() {
        let p = params();
        // BS -> UAV at 1 km slant range: 40 dBm + 5 dBi - PL + 90.55.
        let bs = Position::new(0.0, 0.0, 0.0);
        let uav = Position::new(1000.0, 0.0, 0.0);
        let snr = snr_db((NodeId::bs(0), &bs), (NodeId::uav(0), &uav), &p).unwrap();
        assert!((snr - 34.5).abs() < 0.05, "snr = {snr}");
        assert!(snr >= p.snr_threshold_db);
    }

    #[test]
    fn uav_uav_max_range_inverts_budget() {
        let p = params();
        let d = max_link_range_m(LinkClass::UavUav, NodeKind::Uav, NodeKind::Uav, &p);
        // At the range limit the SNR equals the threshold.
        let a = Position::new(0.0, 0.0, 100.0);
        let b = Position::new(d, 0.0, 100.0);
        let snr = snr_db((NodeId::uav(0), &a), (NodeId::uav(1), &b), &p).unwrap();
        assert!((snr - p.snr_threshold_db).abs() < 1e-9, "snr at limit = {snr}");
        assert!((d - 627.8).abs() < 0.8, "max range = {d}");
    }

    #[test]
    fn snr_symmetric_for_uav_pairs() {
        let p = params();
        let mut rng = crate::rng::stream(2, "test-sym", &[]);
        for _ in 0..100 {
            let a = Position::new(rng.gen_range(0.0..2000.0), rng.gen_range(0.0..2000.0), 100.0);
            let b = Position::new(rng.gen_range(0.0..2000.0), rng.gen_range(0.0..2000.0), 100.0);
            let ab = snr_db((NodeId::uav(0), &a), (NodeId::uav(1), &b), &p).unwrap();
            let ba = snr_db((NodeId::uav(1), &b), (NodeId::uav(0), &a), &p).unwrap();
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn path_loss_increases_with_distance() {
        let p = params();
        let ue = Position::new(0.0, 0.0, 0.0);
        let mut last = f64::NEG_INFINITY;
        for k in 1..=60 {
            let uav = Position::new(50.0 * k as f64, 0.0, 100.0);
            let pl = path_loss_db((NodeId::uav(0), &uav), (NodeId::ue(0), &ue), &p).unwrap();
            assert!(pl > last);
            last = pl;
        }
        let mut last = f64::NEG_INFINITY;
        for k in 1..=60 {
            let pl = fspl_db(50.0 * k as f64, &p).unwrap();
            assert!(pl > last);
            last = pl;
        }
    }

    #[test]
    fn rate_matches_shannon_form() {
        let p = params();
        let mut rng = crate::rng::stream(4, "test-rate", &[]);
        for _ in 0..1000 {
            let snr = rng.gen_range(-40.0..80.0);
            let rate = rate_bps_from_snr(snr, LinkClass::UavUe, &p);
            // Independent evaluation through natural logs.
            let expect = p.bandwidth_hz.uav_ue * (1.0 + 10f64.powf(snr / 10.0)).ln()
                / std::f64::consts::LN_2;
            assert!((rate - expect).abs() <= 1e-9 * expect.abs().max(1.0));
        }
        // Vanishing SNR gives vanishing rate; rate decreases with distance.
        assert!(rate_bps_from_snr(-300.0, LinkClass::UavUe, &p) < 1e-3);
        let ue = (NodeId::ue(0), &Position::new(0.0, 0.0, 0.0));
        let near = Position::new(10.0, 0.0, 100.0);
        let far = Position::new(500.0, 0.0, 100.0);
        assert!(
            rate_bps((NodeId::uav(0), &near), ue, &p).unwrap()
                > rate_bps((NodeId::uav(0), &far), ue, &p).unwrap()
        );
    }

    #[test]
    fn link_table_counts_and_values() {
        let cfg = crate::world::ScenarioConfig {
            side_length: 1000.0,
            n_uav: 2,
            n_ue: 1,
            n_bs: 1,
            uav_altitude: 100.0,
            bs_height: 30.0,
            ue_speed: 0.0,
            uav_step: 30.0,
            horizon: 1,
            sigma_heading: 0.0,
            ue_init: crate::world::UeInit::Uniform,
            rng_seed: 9,
        };
        let world = crate::world::init_world(&cfg).unwrap();
        let p = params();
        let table = build_link_table(&world, &p);
        assert_eq!(table.len(), 2 + 1 + 2);

        // Every entry equals the corresponding scalar call.
        for g in 0..1 {
            for u in 0..2 {
                let snr =
                    snr_db((NodeId::bs(g), &world.bs[g]), (NodeId::uav(u), &world.uav[u]), &p)
                        .unwrap();
                assert_eq!(table.bs_uav(g, u).snr_db, snr);
            }
        }
        let snr =
            snr_db((NodeId::uav(0), &world.uav[0]), (NodeId::uav(1), &world.uav[1]), &p).unwrap();
        assert_eq!(table.uav_uav(0, 1).snr_db, snr);
        assert_eq!(table.uav_uav(1, 0).snr_db, snr);
        for u in 0..2 {
            let rate =
                rate_bps((NodeId::uav(u), &world.uav[u]), (NodeId::ue(0), &world.ue[0]), &p)
                    .unwrap();
            assert_eq!(table.uav_ue(u, 0).rate_bps, rate);
        }
    }

    #[test]
    fn link_table_permutation_equivariant() {
        // Swapping two UAVs' positions swaps their rows/columns.
        let cfg = crate::world::ScenarioConfig {
            side_length: 1000.0,
            n_uav: 4,
            n_ue: 3,
            n_bs: 2,
            uav_altitude: 100.0,
            bs_height: 30.0,
            ue_speed: 0.0,
            uav_step: 30.0,
            horizon: 1,
            sigma_heading: 0.0,
            ue_init: crate::world::UeInit::Uniform,
            rng_seed: 10,
        };
        let world = crate::world::init_world(&cfg).unwrap();
        let mut swapped = world.clone();
        swapped.uav.swap(1, 3);
        let p = params();
        let a = build_link_table(&world, &p);
        let b = build_link_table(&swapped, &p);
        let map = |u: usize| match u {
            1 => 3,
            3 => 1,
            other => other,
        };
        for g in 0..2 {
            for u in 0..4 {
                assert_eq!(a.bs_uav(g, u), b.bs_uav(g, map(u)));
            }
        }
        for u in 0..4 {
            for m in 0..3 {
                assert_eq!(a.uav_ue(u, m), b.uav_ue(map(u), m));
            }
            for v in 0..4 {
                if u != v {
                    assert_eq!(a.uav_uav(u, v), b.uav_uav(map(u), map(v)));
                }
            }
        }
    }
}
