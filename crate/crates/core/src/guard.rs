//! Behavioral constraint for the BS-side UAV group.
//!
//! When a BS-group UAV loses direct reach of every base station, it is
//! guided toward the BS with the highest SNR: the guidance direction is
//! mapped to the nearest compass action and a distance-weighted
//! log-likelihood penalty pulls the policy toward that action.

use serde::{Deserialize, Serialize};

use crate::policy::{bc_term, softmax_parts, PolicyNet};
use crate::radio::LinkTable;
use crate::world::{Action, WorldState, ACTION_DIRECTIONS};

/// Behavioral-constraint target for one UAV at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcTarget {
    /// Whether the constraint fires (no BS link meets the threshold).
    pub active: bool,
    pub target_action: Action,
    /// Planar distance to the best BS, meters.
    pub weight_m: f64,
}

impl BcTarget {
    pub fn inactive() -> BcTarget {
        BcTarget { active: false, target_action: Action::HOVER, weight_m: 0.0 }
    }
}

/// The BS with the highest SNR toward UAV `u`; ties take the lowest index.
pub fn best_bs(u: usize, links: &LinkTable) -> usize {
    let mut best = 0;
    for g in 1..links.n_bs {
        if links.bs_uav(g, u).snr_db > links.bs_uav(best, u).snr_db {
            best = g;
        }
    }
    best
}

/// Compute the constraint target for UAV `u`.
///
/// Active iff the best BS link sits below the SNR threshold. The target
/// action maximizes cosine similarity between the planar direction toward
/// that BS and the eight move directions (hover is excluded: guidance
/// exists to move the UAV, and the zero vector has no cosine). Cosine
/// ties take the lower action code. Coincident positions fall back to
/// north with a 1 m weight floor.
pub fn guidance_action(u: usize, state: &WorldState, links: &LinkTable, snr_threshold_db: f64) -> BcTarget {
    let best = best_bs(u, links);
    if links.bs_uav(best, u).snr_db >= snr_threshold_db {
        return BcTarget::inactive();
    }
    let uav = state.uav[u];
    let bs = state.bs[best];
    let (dx, dy) = (bs.x - uav.x, bs.y - uav.y);
    let dist = (dx * dx + dy * dy).sqrt();
    if dist == 0.0 {
        return BcTarget { active: true, target_action: Action::from_code(0).unwrap(), weight_m: 1.0 };
    }
    let (gx, gy) = (dx / dist, dy / dist);
    let mut best_action = 0usize;
    let mut best_cos = f64::NEG_INFINITY;
    for (i, (ax, ay)) in ACTION_DIRECTIONS.iter().enumerate().take(8) {
        let cos = gx * ax + gy * ay;
        if cos > best_cos {
            best_cos = cos;
            best_action = i;
        }
    }
    BcTarget {
        active: true,
        target_action: Action::from_code(best_action as u8).unwrap(),
        weight_m: dist.max(1.0),
    }
}

/// Behavioral-constraint loss `w * (-log pi(target | obs))` with the
/// weight normalized by the environment side length; inactive targets
/// contribute exactly zero. Returns the scalar and the actor gradient.
pub fn bc_loss(
    net: &PolicyNet,
    obs: &[f64],
    target: &BcTarget,
    side_length: f64,
) -> (f64, Vec<f64>) {
    let mut grads = vec![0.0; net.actor.params().len()];
    if !target.active {
        return (0.0, grads);
    }
    let (logits, tape) = net.actor.forward_cached(obs);
    let (probs, log_probs) = softmax_parts(&logits);
    let w = target.weight_m / side_length;
    let (loss, dlogits) = bc_term(&probs, &log_probs, target.target_action, w);
    net.actor.backward(&tape, &dlogits, &mut grads);
    (loss, grads)
}
