//! Desk-scale simulator and training system for UAV multi-hop emergency
//! networks.
//!
//! The crate is organized around the simulation pipeline:
//!
//! - [`world`] owns node positions, UE mobility, and UAV action stepping.
//! - [`radio`] computes link budgets (path loss, SNR, Shannon rate) for the
//!   three link classes (BS-UAV, UAV-UAV, UAV-UE).
//! - [`mesh`] derives multi-hop connectivity, min-hop backhaul paths, relay
//!   sets, and UE association from a link table.
//! - [`rewards`] decomposes the team reward into per-agent connection and
//!   relay components weighted by quantile group.
//! - [`policy`] builds per-agent observations and trains small tanh MLPs
//!   with a clipped-surrogate PPO objective and analytic gradients.
//! - [`guard`] emits behavioral-constraint targets that steer backhaul-risk
//!   UAVs toward the best base station.
//! - [`advisor`] produces verified high-level deployment plans from a grid
//!   abstraction, via a remote chat-completions backend or a deterministic
//!   built-in heuristic.
//! - [`distill`] aligns advisor plans with agents by minimum-cost bipartite
//!   matching and derives soft-target distributions for distillation.
//! - [`trainer`] orchestrates episode rollouts, the combined objective,
//!   schedules, checkpoints, and run records.

pub mod advisor;
pub mod checkpoint;
pub mod config;
pub mod distill;
pub mod guard;
pub mod mesh;
pub mod policy;
pub mod radio;
pub mod rewards;
pub mod rng;
pub mod trace;
pub mod trainer;
pub mod world;

pub use config::RunConfig;
