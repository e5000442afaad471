//! Advisor-plan alignment and knowledge distillation targets.
//!
//! Agents are matched one-to-one to advised positions by minimum-cost
//! bipartite assignment (Hungarian algorithm, lexicographically smallest
//! optimum). The matched displacement becomes a soft target distribution
//! over the action space via cosine similarity, and the distillation loss
//! is the cross-entropy between that target and the policy.

use serde::{Deserialize, Serialize};

use crate::policy::{kd_term, softmax_parts, PolicyNet};
use crate::world::{Position, ACTION_COUNT, ACTION_DIRECTIONS};

/// A one-to-one agent-to-plan assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// `sigma[u]` is the plan index assigned to agent `u`.
    pub sigma: Vec<usize>,
    /// Total planar distance of the assignment, meters.
    pub total_cost: f64,
}

/// Soft target distribution over the nine actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftTarget {
    pub probs: Vec<f64>,
}

/// Exact minimum-cost assignment on a square matrix via shortest
/// augmenting paths with dual potentials. Returns the per-row column
/// choice (any optimum).
fn solve_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    // job[w]: row assigned to column w; column n is the virtual start.
    let mut job: Vec<Option<usize>> = vec![None; n + 1];
    let mut potential_row = vec![0.0f64; n];
    let mut potential_col = vec![0.0f64; n + 1];
    for row in 0..n {
        let mut w_curr = n;
        job[w_curr] = Some(row);
        let mut min_to = vec![f64::INFINITY; n + 1];
        let mut prev = vec![usize::MAX; n + 1];
        let mut in_tree = vec![false; n + 1];
        while let Some(r) = job[w_curr] {
            in_tree[w_curr] = true;
            let mut delta = f64::INFINITY;
            let mut w_next = 0;
            for w in 0..n {
                if in_tree[w] {
                    continue;
                }
                let reduced = cost[r * n + w] - potential_row[r] - potential_col[w];
                if reduced < min_to[w] {
                    min_to[w] = reduced;
                    prev[w] = w_curr;
                }
                if min_to[w] < delta {
                    delta = min_to[w];
                    w_next = w;
                }
            }
            for w in 0..=n {
                if in_tree[w] {
                    potential_row[job[w].expect("tree columns are assigned")] += delta;
                    potential_col[w] -= delta;
                } else {
                    min_to[w] -= delta;
                }
            }
            w_curr = w_next;
        }
        // Augment along the alternating path back to the virtual column.
        while w_curr != n {
            let w_prev = prev[w_curr];
            job[w_curr] = job[w_prev];
            w_curr = w_prev;
        }
    }
    let mut sigma = vec![0usize; n];
    for w in 0..n {
        sigma[job[w].expect("square problem assigns every column")] = w;
    }
    sigma
}

fn assignment_cost(cost: &[f64], n: usize, sigma: &[usize]) -> f64 {
    (0..n).map(|u| cost[u * n + sigma[u]]).sum()
}

/// Minimum-total-cost matching of agents to plan positions under planar
/// Euclidean cost; among optimal assignments, the lexicographically
/// smallest permutation is returned.
///
/// # Panics
/// If the two position lists differ in length.
pub fn hungarian_match(agents: &[Position], plan: &[Position]) -> Matching {
    assert_eq!(agents.len(), plan.len(), "agent and plan counts must match");
    let n = agents.len();
    if n == 0 {
        return Matching { sigma: Vec::new(), total_cost: 0.0 };
    }
    let cost: Vec<f64> = agents
        .iter()
        .flat_map(|a| plan.iter().map(move |p| a.planar_dist2(p).sqrt()))
        .collect();
    let optimum = assignment_cost(&cost, n, &solve_assignment(&cost, n));
    let tol = 1e-9 * (1.0 + optimum.abs());

    // Fix agents in order to the smallest column that still allows an
    // optimal completion; each check solves the remaining subproblem.
    let mut available: Vec<usize> = (0..n).collect();
    let mut sigma = Vec::with_capacity(n);
    let mut fixed_cost = 0.0;
    for u in 0..n {
        let rest_rows: Vec<usize> = ((u + 1)..n).collect();
        let mut chosen = None;
        for (slot, &j) in available.iter().enumerate() {
            let candidate = fixed_cost + cost[u * n + j];
            let completion = if rest_rows.is_empty() {
                0.0
            } else {
                let cols: Vec<usize> =
                    available.iter().copied().filter(|&c| c != j).collect();
                let m = rest_rows.len();
                let sub: Vec<f64> = rest_rows
                    .iter()
                    .flat_map(|&r| cols.iter().map(move |&c| cost[r * n + c]))
                    .collect();
                assignment_cost(&sub, m, &solve_assignment(&sub, m))
            };
            if candidate + completion <= optimum + tol {
                chosen = Some((slot, j));
                break;
            }
        }
        let (slot, j) = chosen.expect("an optimal completion always exists");
        fixed_cost += cost[u * n + j];
        sigma.push(j);
        available.remove(slot);
    }

    let total_cost = assignment_cost(&cost, n, &sigma);
    Matching { sigma, total_cost }
}

/// Soft target for agent `u` from the matched plan displacement.
///
/// Cosines against the eight move directions are tempered by `omega` and
/// soft-maxed; hover scores zero among moves. A zero displacement means
/// the advisor wants the agent to stay: hover scores one, moves zero.
pub fn soft_target(
    u: usize,
    matching: &Matching,
    plan: &[Position],
    agents: &[Position],
    omega: f64,
) -> SoftTarget {
    assert!(omega > 0.0, "temperature must be positive");
    let target = plan[matching.sigma[u]];
    let from = agents[u];
    let (dx, dy) = (target.x - from.x, target.y - from.y);
    let norm = (dx * dx + dy * dy).sqrt();
    let mut cosines = [0.0f64; ACTION_COUNT];
    if norm == 0.0 {
        cosines[8] = 1.0;
    } else {
        let (gx, gy) = (dx / norm, dy / norm);
        for (i, (ax, ay)) in ACTION_DIRECTIONS.iter().enumerate().take(8) {
            cosines[i] = gx * ax + gy * ay;
        }
    }
    let scaled: Vec<f64> = cosines.iter().map(|c| c / omega).collect();
    let (probs, _) = softmax_parts(&scaled);
    SoftTarget { probs }
}

/// Distillation cross-entropy `-sum p_target log pi` and its gradient
/// through the actor parameters.
pub fn kd_loss(net: &PolicyNet, obs: &[f64], target: &SoftTarget) -> (f64, Vec<f64>) {
    let (logits, tape) = net.actor.forward_cached(obs);
    let (probs, log_probs) = softmax_parts(&logits);
    let (loss, dlogits) = kd_term(&probs, &log_probs, &target.probs);
    let mut grads = vec![0.0; net.actor.params().len()];
    net.actor.backward(&tape, &dlogits, &mut grads);
    (loss, grads)
}
