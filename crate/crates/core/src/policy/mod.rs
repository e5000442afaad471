//! Per-agent stochastic policy, value function, and the PPO loss family.
//!
//! Policy and critic are tanh MLPs with five hidden layers and analytic
//! gradients. The combined objective adds distillation cross-entropy and
//! the behavioral-constraint term to the clipped PPO surrogate.

pub mod nn;
pub mod obs;

pub use nn::{clip_grad_norm, Adam, Mlp};
pub use obs::{build_observations, ObsLayout, ObsNorm};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::world::{Action, ACTION_COUNT};

/// Categorical distribution over the nine actions.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    pub probs: Vec<f64>,
    pub log_probs: Vec<f64>,
}

impl ActionDistribution {
    pub fn from_logits(logits: &[f64]) -> ActionDistribution {
        let (probs, log_probs) = softmax_parts(logits);
        ActionDistribution { probs, log_probs }
    }

    pub fn log_prob(&self, action: Action) -> f64 {
        self.log_probs[action.code() as usize]
    }

    /// Shannon entropy in nats; at most `ln(9)`.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .zip(self.log_probs.iter())
            .map(|(p, lp)| if *p > 0.0 { p * lp } else { 0.0 })
            .sum::<f64>()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Action {
        let draw: f64 = rng.gen_range(0.0..1.0);
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if draw < acc {
                return Action::from_code(i as u8).expect("index in range");
            }
        }
        Action::from_code((self.probs.len() - 1) as u8).expect("non-empty")
    }

    /// Highest-probability action; ties resolve to the lowest code.
    pub fn greedy(&self) -> Action {
        let mut best = 0;
        for (i, p) in self.probs.iter().enumerate() {
            if *p > self.probs[best] {
                best = i;
            }
        }
        Action::from_code(best as u8).expect("index in range")
    }
}

/// Numerically stable softmax; returns (probs, log-probs).
pub fn softmax_parts(logits: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = logits.iter().map(|z| z - max).collect();
    let log_norm = shifted.iter().map(|z| z.exp()).sum::<f64>().ln();
    let log_probs: Vec<f64> = shifted.iter().map(|z| z - log_norm).collect();
    let probs = log_probs.iter().map(|lp| lp.exp()).collect();
    (probs, log_probs)
}

/// One agent's (or share slot's) policy and value approximators.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyNet {
    pub actor: Mlp,
    pub critic: Mlp,
}

const N_HIDDEN: usize = 5;

impl PolicyNet {
    /// Standard shape: five tanh hidden layers, zero-initialized heads so
    /// the initial policy is uniform and the initial value estimate zero.
    pub fn new<R: Rng>(obs_dim: usize, hidden: usize, rng: &mut R) -> PolicyNet {
        let mut actor_dims = vec![obs_dim];
        actor_dims.extend(std::iter::repeat(hidden).take(N_HIDDEN));
        actor_dims.push(ACTION_COUNT);
        let mut critic_dims = vec![obs_dim];
        critic_dims.extend(std::iter::repeat(hidden).take(N_HIDDEN));
        critic_dims.push(1);
        PolicyNet {
            actor: Mlp::new(&actor_dims, rng, true),
            critic: Mlp::new(&critic_dims, rng, true),
        }
    }

    /// Arbitrary shapes, for tests and gradient checks.
    pub fn with_dims<R: Rng>(actor_dims: &[usize], critic_dims: &[usize], rng: &mut R) -> PolicyNet {
        assert_eq!(*actor_dims.last().unwrap(), ACTION_COUNT);
        assert_eq!(*critic_dims.last().unwrap(), 1);
        PolicyNet {
            actor: Mlp::new(actor_dims, rng, false),
            critic: Mlp::new(critic_dims, rng, false),
        }
    }

    /// Action distribution and value estimate for one observation.
    ///
    /// # Panics
    /// If the observation length does not match the network input.
    pub fn forward(&self, obs: &[f64]) -> (ActionDistribution, f64) {
        let logits = self.actor.forward(obs);
        let value = self.critic.forward(obs)[0];
        (ActionDistribution::from_logits(&logits), value)
    }

    /// Sample an action; returns (action, log-prob, value).
    pub fn sample<R: Rng>(&self, obs: &[f64], rng: &mut R) -> (Action, f64, f64) {
        let (dist, value) = self.forward(obs);
        let action = dist.sample(rng);
        (action, dist.log_prob(action), value)
    }

    pub fn greedy(&self, obs: &[f64]) -> Action {
        let logits = self.actor.forward(obs);
        ActionDistribution::from_logits(&logits).greedy()
    }
}

/// Generalized advantage estimation over one trajectory.
///
/// `values[t]` estimates the state at step `t`; `bootstrap_value`
/// estimates the state after the last step and is ignored where `dones`
/// terminates the trajectory. Returns raw (unnormalized) advantages and
/// the value targets `advantage + value`.
pub fn gae_advantages(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap_value: f64,
    gamma: f64,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = rewards.len();
    assert_eq!(values.len(), n);
    assert_eq!(dones.len(), n);
    let mut advantages = vec![0.0; n];
    let mut next_adv = 0.0;
    for t in (0..n).rev() {
        let cont = if dones[t] { 0.0 } else { 1.0 };
        let next_value = if t + 1 < n { values[t + 1] } else { bootstrap_value };
        let delta = rewards[t] + gamma * cont * next_value - values[t];
        next_adv = delta + gamma * lambda * cont * next_adv;
        advantages[t] = next_adv;
    }
    let returns = advantages.iter().zip(values.iter()).map(|(a, v)| a + v).collect();
    (advantages, returns)
}

/// In-place batch normalization of advantages (mean 0, std 1, eps 1e-8).
pub fn normalize_advantages(advantages: &mut [f64]) {
    if advantages.is_empty() {
        return;
    }
    let n = advantages.len() as f64;
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let denom = var.sqrt() + 1e-8;
    for a in advantages.iter_mut() {
        *a = (*a - mean) / denom;
    }
}

/// PPO coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PpoHyper {
    pub clip_eps: f64,
    pub entropy_coef: f64,
    pub value_coef: f64,
}

impl Default for PpoHyper {
    fn default() -> Self {
        PpoHyper { clip_eps: 0.2, entropy_coef: 0.01, value_coef: 0.5 }
    }
}

/// One optimization sample: an observation with its collected action,
/// advantage, value target, and optional distillation / behavioral
/// targets. `bc_target` carries the weight already normalized by the
/// environment side length.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRow {
    pub obs: Vec<f64>,
    pub action: Action,
    pub old_log_prob: f64,
    pub advantage: f64,
    pub value_target: f64,
    pub soft_target: Option<Vec<f64>>,
    pub bc_target: Option<(Action, f64)>,
}

/// Mean loss components over a batch. `total` is the minimized scalar.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossStats {
    pub total: f64,
    /// Mean clipped surrogate (the maximized PPO objective term).
    pub surrogate: f64,
    pub entropy: f64,
    pub value_mse: f64,
    pub kd: f64,
    pub bc: f64,
}

/// Distillation cross-entropy between a soft target and the policy:
/// returns the scalar and d loss / d logits.
pub(crate) fn kd_term(probs: &[f64], log_probs: &[f64], target: &[f64]) -> (f64, Vec<f64>) {
    let loss = -target.iter().zip(log_probs.iter()).map(|(t, lp)| t * lp).sum::<f64>();
    let dlogits = probs.iter().zip(target.iter()).map(|(p, t)| p - t).collect();
    (loss, dlogits)
}

/// Behavioral-constraint term `w * (-log pi(target))`: scalar and
/// d loss / d logits.
pub(crate) fn bc_term(
    probs: &[f64],
    log_probs: &[f64],
    target_action: Action,
    weight: f64,
) -> (f64, Vec<f64>) {
    let a = target_action.code() as usize;
    let loss = -weight * log_probs[a];
    let dlogits = probs
        .iter()
        .enumerate()
        .map(|(i, p)| weight * (p - f64::from(u8::from(i == a))))
        .collect();
    (loss, dlogits)
}

/// Combined objective over a batch: clipped PPO surrogate with entropy
/// bonus and value error, plus `beta1` times the distillation loss and
/// `beta2` times the behavioral-constraint loss. Rows without targets
/// contribute zero to the corresponding terms.
///
/// Returns mean loss components and the actor/critic gradients of
/// `LossStats::total`.
pub fn total_loss(
    net: &PolicyNet,
    rows: &[TrainRow],
    hyper: &PpoHyper,
    beta1: f64,
    beta2: f64,
) -> (LossStats, Vec<f64>, Vec<f64>) {
    assert!(!rows.is_empty(), "empty batch");
    let n = rows.len() as f64;
    let mut stats = LossStats::default();
    let mut actor_grads = vec![0.0; net.actor.params().len()];
    let mut critic_grads = vec![0.0; net.critic.params().len()];

    for row in rows {
        let (logits, actor_tape) = net.actor.forward_cached(&row.obs);
        let (probs, log_probs) = softmax_parts(&logits);
        let a = row.action.code() as usize;

        // Clipped surrogate, maximized; gradient flows only through the
        // unclipped branch when it is the active minimum.
        let ratio = (log_probs[a] - row.old_log_prob).exp();
        let unclipped = ratio * row.advantage;
        let clipped = ratio.clamp(1.0 - hyper.clip_eps, 1.0 + hyper.clip_eps) * row.advantage;
        let surrogate = unclipped.min(clipped);
        let surr_coef = if unclipped <= clipped { ratio * row.advantage } else { 0.0 };

        let entropy = -probs
            .iter()
            .zip(log_probs.iter())
            .map(|(p, lp)| if *p > 0.0 { p * lp } else { 0.0 })
            .sum::<f64>();

        // d(total)/d(logit_j), accumulated across the terms.
        let mut dlogits = vec![0.0; logits.len()];
        for j in 0..logits.len() {
            let onehot = f64::from(u8::from(j == a));
            // -surrogate
            dlogits[j] -= surr_coef * (onehot - probs[j]);
            // -entropy_coef * H
            dlogits[j] += hyper.entropy_coef * probs[j] * (log_probs[j] + entropy);
        }

        let mut kd_loss = 0.0;
        if beta1 != 0.0 {
            if let Some(target) = &row.soft_target {
                let (loss, dkd) = kd_term(&probs, &log_probs, target);
                kd_loss = loss;
                for (d, g) in dlogits.iter_mut().zip(dkd.iter()) {
                    *d += beta1 * g;
                }
            }
        } else if let Some(target) = &row.soft_target {
            kd_loss = kd_term(&probs, &log_probs, target).0;
        }

        let mut bc_loss = 0.0;
        if let Some((action, weight)) = row.bc_target {
            let (loss, dbc) = bc_term(&probs, &log_probs, action, weight);
            bc_loss = loss;
            if beta2 != 0.0 {
                for (d, g) in dlogits.iter_mut().zip(dbc.iter()) {
                    *d += beta2 * g;
                }
            }
        }

        for d in dlogits.iter_mut() {
            *d /= n;
        }
        net.actor.backward(&actor_tape, &dlogits, &mut actor_grads);

        let (value_out, critic_tape) = net.critic.forward_cached(&row.obs);
        let err = value_out[0] - row.value_target;
        let dvalue = [2.0 * hyper.value_coef * err / n];
        net.critic.backward(&critic_tape, &dvalue, &mut critic_grads);

        stats.surrogate += surrogate / n;
        stats.entropy += entropy / n;
        stats.value_mse += err * err / n;
        stats.kd += kd_loss / n;
        stats.bc += bc_loss / n;
    }

    stats.total = -stats.surrogate - hyper.entropy_coef * stats.entropy
        + hyper.value_coef * stats.value_mse
        + beta1 * stats.kd
        + beta2 * stats.bc;
    (stats, actor_grads, critic_grads)
}

/// Plain PPO loss (no distillation or behavioral terms).
pub fn ppo_loss(
    net: &PolicyNet,
    rows: &[TrainRow],
    hyper: &PpoHyper,
) -> (LossStats, Vec<f64>, Vec<f64>) {
    total_loss(net, rows, hyper, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn tiny_net(seed: u64) -> PolicyNet {
        let mut rng = crate::rng::stream(seed, "policy-test", &[]);
        PolicyNet::with_dims(&[6, 10, ACTION_COUNT], &[6, 10, 1], &mut rng)
    }

    fn random_obs(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
        (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn zero_head_gives_uniform_distribution() {
        let mut rng = crate::rng::stream(1, "policy-uniform", &[]);
        let net = PolicyNet::new(12, 16, &mut rng);
        let obs = random_obs(&mut rng, 12);
        let (dist, value) = net.forward(&obs);
        for p in &dist.probs {
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
        }
        assert_eq!(value, 0.0);
        // Greedy tie-break lands on the lowest code.
        assert_eq!(net.greedy(&obs).code(), 0);
    }

    #[test]
    fn distribution_sums_to_one_and_entropy_bounded() {
        let mut rng = crate::rng::stream(2, "policy-sum", &[]);
        for _ in 0..200 {
            let logits: Vec<f64> = (0..ACTION_COUNT).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let dist = ActionDistribution::from_logits(&logits);
            let sum: f64 = dist.probs.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            let h = dist.entropy();
            assert!(h >= -1e-12 && h <= (ACTION_COUNT as f64).ln() + 1e-12);
        }
    }

    #[test]
    fn gae_collapses_to_td_residual_at_lambda_zero() {
        let rewards = [1.0, -0.5, 2.0, 0.25];
        let values = [0.3, 0.6, -0.2, 0.9];
        let dones = [false, false, false, true];
        let (adv, _) = gae_advantages(&rewards, &values, &dones, 10.0, 0.99, 0.0);
        for t in 0..4 {
            let next = if t + 1 < 4 { values[t + 1] } else { 10.0 };
            let cont = if dones[t] { 0.0 } else { 1.0 };
            let td = rewards[t] + 0.99 * cont * next - values[t];
            assert!((adv[t] - td).abs() < 1e-12);
        }
    }

    #[test]
    fn gae_gamma_zero_returns_rewards() {
        let rewards = [1.0, 2.0, 3.0];
        let values = [0.5, 0.5, 0.5];
        let dones = [false, false, true];
        let (_, returns) = gae_advantages(&rewards, &values, &dones, 0.0, 0.0, 0.95);
        for t in 0..3 {
            assert!((returns[t] - rewards[t]).abs() < 1e-12);
        }
    }

    #[test]
    fn gae_matches_double_loop_oracle() {
        let mut rng = crate::rng::stream(3, "gae-oracle", &[]);
        for _ in 0..50 {
            let n = 10;
            let rewards: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut dones = vec![false; n];
            dones[n - 1] = rng.gen_bool(0.5);
            let bootstrap = rng.gen_range(-1.0..1.0);
            let (gamma, lambda) = (0.99, 0.95);
            let (adv, _) = gae_advantages(&rewards, &values, &dones, bootstrap, gamma, lambda);

            // Naive summation: A_t = sum_k (gamma*lambda)^k delta_{t+k},
            // truncated at the first done.
            for t in 0..n {
                let mut expect = 0.0;
                let mut factor = 1.0;
                for k in t..n {
                    let next = if k + 1 < n { values[k + 1] } else { bootstrap };
                    let cont = if dones[k] { 0.0 } else { 1.0 };
                    let delta = rewards[k] + gamma * cont * next - values[k];
                    expect += factor * delta;
                    if dones[k] {
                        break;
                    }
                    factor *= gamma * lambda;
                }
                assert!((adv[t] - expect).abs() < 1e-10, "t = {t}");
            }
        }
    }

    #[test]
    fn surrogate_worked_values() {
        // Construct single-row batches with a controlled ratio.
        let net = tiny_net(4);
        let mut rng = crate::rng::stream(5, "ppo-worked", &[]);
        let obs = random_obs(&mut rng, 6);
        let (dist, _) = net.forward(&obs);
        let action = Action::from_code(3).unwrap();
        let hyper = PpoHyper { clip_eps: 0.2, entropy_coef: 0.0, value_coef: 0.0 };

        // ratio = 1.5, A = 1 -> clip binds at 1.2.
        let row = TrainRow {
            obs: obs.clone(),
            action,
            old_log_prob: dist.log_prob(action) - 1.5f64.ln(),
            advantage: 1.0,
            value_target: 0.0,
            soft_target: None,
            bc_target: None,
        };
        let (stats, _, _) = ppo_loss(&net, &[row], &hyper);
        assert!((stats.surrogate - 1.2).abs() < 1e-9, "surrogate = {}", stats.surrogate);

        // ratio = 0.5, A = -1 -> min takes the clipped branch at -0.8.
        let row = TrainRow {
            obs: obs.clone(),
            action,
            old_log_prob: dist.log_prob(action) - 0.5f64.ln(),
            advantage: -1.0,
            value_target: 0.0,
            soft_target: None,
            bc_target: None,
        };
        let (stats, _, _) = ppo_loss(&net, &[row], &hyper);
        assert!((stats.surrogate - (-0.8)).abs() < 1e-9);

        // Unchanged params -> ratio 1, surrogate = mean advantage.
        let advantages = [0.7, -0.3, 1.1];
        let rows: Vec<TrainRow> = advantages
            .iter()
            .map(|a| TrainRow {
                obs: obs.clone(),
                action,
                old_log_prob: dist.log_prob(action),
                advantage: *a,
                value_target: 0.0,
                soft_target: None,
                bc_target: None,
            })
            .collect();
        let (stats, _, _) = ppo_loss(&net, &rows, &hyper);
        let mean: f64 = advantages.iter().sum::<f64>() / 3.0;
        assert!((stats.surrogate - mean).abs() < 1e-9);
    }

    #[test]
    fn total_loss_reduces_to_ppo_when_betas_zero() {
        let net = tiny_net(6);
        let mut rng = crate::rng::stream(7, "total-reduce", &[]);
        let rows = random_rows(&net, &mut rng, 16, true, true);
        let hyper = PpoHyper::default();
        let (a, ga, gc) = ppo_loss(&net, &rows, &hyper);
        let (b, gb, gd) = total_loss(&net, &rows, &hyper, 0.0, 0.0);
        assert_eq!(a.total, b.total);
        assert_eq!(ga, gb);
        assert_eq!(gc, gd);
    }

    pub(crate) fn random_rows(
        net: &PolicyNet,
        rng: &mut impl Rng,
        n: usize,
        with_kd: bool,
        with_bc: bool,
    ) -> Vec<TrainRow> {
        let dim = net.actor.input_dim();
        (0..n)
            .map(|_| {
                let obs = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>();
                let (dist, _) = net.forward(&obs);
                let action = dist.sample(rng);
                let soft_target = (with_kd && rng.gen_bool(0.8)).then(|| {
                    let raw: Vec<f64> =
                        (0..ACTION_COUNT).map(|_| rng.gen_range(0.05..1.0)).collect();
                    let sum: f64 = raw.iter().sum();
                    raw.into_iter().map(|x| x / sum).collect()
                });
                let bc_target = (with_bc && rng.gen_bool(0.5)).then(|| {
                    (
                        Action::from_code(rng.gen_range(0..9)).unwrap(),
                        rng.gen_range(0.05..1.0),
                    )
                });
                TrainRow {
                    obs,
                    action,
                    old_log_prob: dist.log_prob(action) + rng.gen_range(-0.2..0.2),
                    advantage: rng.gen_range(-2.0..2.0),
                    value_target: rng.gen_range(-2.0..2.0),
                    soft_target,
                    bc_target,
                }
            })
            .collect()
    }

    /// Central finite differences over a sample of parameters of both nets.
    pub(crate) fn finite_diff_check(
        net: &PolicyNet,
        rows: &[TrainRow],
        hyper: &PpoHyper,
        beta1: f64,
        beta2: f64,
        samples: usize,
    ) {
        let (_, actor_grads, critic_grads) = total_loss(net, rows, hyper, beta1, beta2);
        let mut net = net.clone();
        let h = 1e-5;
        let mut rng = crate::rng::stream(99, "fd-sample", &[]);
        for s in 0..samples {
            let on_actor = s % 2 == 0;
            let len = if on_actor { net.actor.params().len() } else { net.critic.params().len() };
            let k = rng.gen_range(0..len);
            let params = if on_actor { net.actor.params_mut() } else { net.critic.params_mut() };
            let orig = params[k];
            params[k] = orig + h;
            let up = total_loss(&net, rows, hyper, beta1, beta2).0.total;
            let params = if on_actor { net.actor.params_mut() } else { net.critic.params_mut() };
            params[k] = orig - h;
            let down = total_loss(&net, rows, hyper, beta1, beta2).0.total;
            let params = if on_actor { net.actor.params_mut() } else { net.critic.params_mut() };
            params[k] = orig;
            let fd = (up - down) / (2.0 * h);
            let analytic = if on_actor { actor_grads[k] } else { critic_grads[k] };
            let tol = 1e-3 * fd.abs().max(1e-6 / 1e-3);
            assert!(
                (fd - analytic).abs() <= tol,
                "{} param {k}: fd {fd} vs analytic {analytic}",
                if on_actor { "actor" } else { "critic" }
            );
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let net = tiny_net(8);
        let mut rng = crate::rng::stream(9, "fd-rows", &[]);
        let rows = random_rows(&net, &mut rng, 12, true, true);
        let hyper = PpoHyper::default();
        finite_diff_check(&net, &rows, &hyper, 0.5, 0.3, 120);
        finite_diff_check(&net, &rows, &hyper, 0.0, 0.0, 60);
    }

    #[test]
    fn normalize_advantages_zero_mean_unit_std() {
        let mut adv: Vec<f64> = (0..64).map(|i| (i as f64) * 0.37 - 5.0).collect();
        normalize_advantages(&mut adv);
        let mean: f64 = adv.iter().sum::<f64>() / adv.len() as f64;
        let var: f64 = adv.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / adv.len() as f64;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sampling_follows_probabilities() {
        let dist = ActionDistribution::from_logits(&[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let mut rng = crate::rng::stream(10, "sample-freq", &[]);
        let mut counts = [0usize; 9];
        for _ in 0..20_000 {
            counts[dist.sample(&mut rng).code() as usize] += 1;
        }
        let freq0 = counts[0] as f64 / 20_000.0;
        assert!((freq0 - dist.probs[0]).abs() < 0.02, "freq {freq0} vs p {}", dist.probs[0]);
    }
}
