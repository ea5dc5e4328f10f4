//! Tanh-squashed Gaussian policies and the risk-sensitive actor objectives.
//!
//! A policy network maps a 6-d observation to `[mean (D), raw_log_std (D)]`.
//! The log-std is squashed smoothly into `[LOG_STD_MIN, LOG_STD_MAX]`:
//!
//! ```text
//! log_std = LOG_STD_MIN + 0.5 (LOG_STD_MAX - LOG_STD_MIN) (tanh(raw) + 1)
//! x       = mean + exp(log_std) * xi,   xi ~ N(0, I)
//! a       = tanh(x),   physical = scale * a
//! log pi(a|s) = sum_j [ -xi_j^2 / 2 - log_std_j - ln(2 pi) / 2 - ln(1 - tanh(x_j)^2) ]
//! ```
//!
//! `log pi` is the density of the normalized action `a` in `(-1, 1)^D`.
//!
//! Protagonist (descent on) `alpha log pi(a|s) - Q(s,a,u) + lambda_a std(s,a,u)`,
//! adversary (descent on) `Q(s,a,u) - lambda_u std(s,a,u)`. In both losses the
//! other agent's action is the replayed one and is held fixed.

use std::f64::consts::LN_2;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::critic::{Critic, CriticInput, ACTION_INDEX, ADVERSARY_INDEX};
use crate::env::{ADVERSARY_DIM, OBS_DIM};
use crate::error::{check_dim, Error, Result};
use crate::exec;
use crate::nn::{Activation, Architecture, NetParams};

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const LOG_STD_HALF_SPAN: f64 = 0.5 * (LOG_STD_MAX - LOG_STD_MIN);

/// `ln(1 - tanh(x)^2)` without cancellation for large `|x|`.
#[inline]
fn log_one_minus_tanh_sq(x: f64) -> f64 {
    2.0 * (LN_2 - x - crate::critic::softplus(-2.0 * x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub net: NetParams,
    scale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSample {
    pub physical: Vec<f64>,
    pub log_prob: f64,
    pub normalized: Vec<f64>,
}

/// Intermediate values of one reparameterized draw, kept for the backward pass.
struct Draw {
    normalized: Vec<f64>,
    std: Vec<f64>,
    raw_log_std: Vec<f64>,
    log_prob: f64,
}

impl Policy {
    pub fn architecture(hidden: Vec<usize>, activation: Activation, action_dim: usize) -> Architecture {
        Architecture::new(OBS_DIM, hidden, 2 * action_dim, activation)
    }

    pub fn new(net: NetParams, scale: Vec<f64>) -> Result<Self> {
        check_dim("policy input width", OBS_DIM, net.arch().input)?;
        check_dim("policy output width", 2 * scale.len(), net.arch().output)?;
        if scale.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Config("action scale must be positive".into()));
        }
        Ok(Self { net, scale })
    }

    pub fn action_dim(&self) -> usize {
        self.scale.len()
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    fn draw(&self, out: &[f64], xi: &[f64]) -> Draw {
        let d = self.action_dim();
        let mut normalized = Vec::with_capacity(d);
        let mut std = Vec::with_capacity(d);
        let mut log_prob = 0.0;
        for j in 0..d {
            let log_std = LOG_STD_MIN + LOG_STD_HALF_SPAN * (out[d + j].tanh() + 1.0);
            let s = log_std.exp();
            let x = out[j] + s * xi[j];
            log_prob += -0.5 * xi[j] * xi[j] - log_std - HALF_LN_2PI - log_one_minus_tanh_sq(x);
            normalized.push(x.tanh());
            std.push(s);
        }
        Draw {
            normalized,
            std,
            raw_log_std: out[d..].to_vec(),
            log_prob,
        }
    }

    /// Reparameterized sample `a = tanh(mean + std * xi)`.
    pub fn sample_action(&self, obs: &[f64; OBS_DIM], xi: &[f64]) -> Result<ActionSample> {
        check_dim("policy noise", self.action_dim(), xi.len())?;
        let out = self.net.forward(obs)?;
        let draw = self.draw(&out, xi);
        Ok(ActionSample {
            physical: draw.normalized.iter().zip(&self.scale).map(|(a, s)| a * s).collect(),
            log_prob: draw.log_prob,
            normalized: draw.normalized,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, obs: &[f64; OBS_DIM], rng: &mut R) -> Result<ActionSample> {
        let xi: Vec<f64> = (0..self.action_dim()).map(|_| rng.sample(StandardNormal)).collect();
        self.sample_action(obs, &xi)
    }

    /// Noise-free action `tanh(mean)`, as `(physical, normalized)`.
    pub fn deterministic_action(&self, obs: &[f64; OBS_DIM]) -> Result<(Vec<f64>, Vec<f64>)> {
        let out = self.net.forward(obs)?;
        let normalized: Vec<f64> = out[..self.action_dim()].iter().map(|m| m.tanh()).collect();
        let physical = normalized.iter().zip(&self.scale).map(|(a, s)| a * s).collect();
        Ok((physical, normalized))
    }

    /// `log pi(a|s)` of a given normalized action, used for density checks.
    pub fn log_prob_of(&self, obs: &[f64; OBS_DIM], normalized: &[f64]) -> Result<f64> {
        check_dim("policy action", self.action_dim(), normalized.len())?;
        let out = self.net.forward(obs)?;
        let d = self.action_dim();
        let mut lp = 0.0;
        for j in 0..d {
            let log_std = LOG_STD_MIN + LOG_STD_HALF_SPAN * (out[d + j].tanh() + 1.0);
            let x = normalized[j].atanh();
            let xi = (x - out[j]) / log_std.exp();
            lp += -0.5 * xi * xi - log_std - HALF_LN_2PI - log_one_minus_tanh_sq(x);
        }
        Ok(lp)
    }
}

/// One replayed sample for an actor update: the observation, the other agent's
/// stored normalized action, and this agent's frozen reparameterization noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorSample {
    pub obs: [f64; OBS_DIM],
    pub other_action: Vec<f64>,
    pub noise: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ActorLoss {
    pub loss: f64,
    pub grads: Vec<f64>,
    /// `log pi` of each drawn action (protagonist only; zeros for the adversary).
    pub log_probs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Protagonist,
    Adversary,
}

/// Loss and gradient for one sample, accumulating `scale * dL/dparams` into `grads`.
fn actor_sample(
    role: Role,
    policy: &Policy,
    critic: &Critic,
    sample: &ActorSample,
    alpha: f64,
    lambda: f64,
    scale: f64,
    grads: &mut [f64],
) -> Result<(f64, f64)> {
    let d = policy.action_dim();
    check_dim("actor noise", d, sample.noise.len())?;
    let trace = policy.net.forward_trace(&sample.obs)?;
    let draw = policy.draw(trace.output(), &sample.noise);

    let input = match role {
        Role::Protagonist => {
            check_dim("replayed adversary action", ADVERSARY_DIM, sample.other_action.len())?;
            CriticInput {
                obs: sample.obs,
                action: [draw.normalized[0]],
                adversary_action: [sample.other_action[0], sample.other_action[1]],
            }
        }
        Role::Adversary => {
            check_dim("replayed protagonist action", 1, sample.other_action.len())?;
            CriticInput {
                obs: sample.obs,
                action: [sample.other_action[0]],
                adversary_action: [draw.normalized[0], draw.normalized[1]],
            }
        }
    };
    // protagonist: -Q + lambda std; adversary: Q - lambda std
    let (c_mean, c_std, entropy_weight, slot) = match role {
        Role::Protagonist => (-1.0, lambda, alpha, ACTION_INDEX),
        Role::Adversary => (1.0, -lambda, 0.0, ADVERSARY_INDEX),
    };
    let (ret, input_grad) = critic.input_gradient(&input, c_mean, c_std)?;
    let loss = entropy_weight * draw.log_prob + c_mean * ret.mean + c_std * ret.std;

    let mut cot = vec![0.0; 2 * d];
    for j in 0..d {
        let a = draw.normalized[j];
        let xi = sample.noise[j];
        // d log pi / dx = 2 tanh(x), d a / dx = 1 - a^2
        let dl_dx = entropy_weight * 2.0 * a + (1.0 - a * a) * input_grad[slot + j];
        let dl_dlog_std = -entropy_weight + dl_dx * draw.std[j] * xi;
        let t = draw.raw_log_std[j].tanh();
        cot[j] = scale * dl_dx;
        cot[d + j] = scale * dl_dlog_std * LOG_STD_HALF_SPAN * (1.0 - t * t);
    }
    policy.net.backward(&trace, &cot, Some(grads))?;
    Ok((loss, draw.log_prob))
}

fn actor_loss_and_grad(
    role: Role,
    policy: &Policy,
    critic: &Critic,
    batch: &[ActorSample],
    alpha: f64,
    lambda: f64,
) -> Result<ActorLoss> {
    if batch.is_empty() {
        return Err(Error::Degenerate("empty actor batch".into()));
    }
    let n = batch.len();
    let scale = 1.0 / n as f64;
    let per_chunk: Vec<Result<(f64, Vec<f64>, Vec<f64>)>> = exec::map(n.div_ceil(exec::CHUNK), |c| {
        let mut g = vec![0.0; policy.net.len()];
        let mut loss = 0.0;
        let mut lps = Vec::with_capacity(exec::CHUNK);
        for i in c * exec::CHUNK..((c + 1) * exec::CHUNK).min(n) {
            let (l, lp) = actor_sample(role, policy, critic, &batch[i], alpha, lambda, scale, &mut g)?;
            loss += l;
            lps.push(lp);
        }
        Ok((loss, g, lps))
    });
    let mut loss = 0.0;
    let mut grads = vec![0.0; policy.net.len()];
    let mut log_probs = Vec::with_capacity(n);
    for part in per_chunk {
        let (l, g, lps) = part?;
        loss += l;
        grads.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
        log_probs.extend(lps);
    }
    let loss = loss / n as f64;
    if !loss.is_finite() {
        return Err(Error::NonFinite {
            what: "actor loss",
            index: 0,
        });
    }
    crate::error::check_finite("actor gradient", &grads)?;
    if role == Role::Adversary {
        log_probs.iter_mut().for_each(|l| *l = 0.0);
    }
    Ok(ActorLoss {
        loss,
        grads,
        log_probs,
    })
}

/// Mean of `alpha log pi(a|s) - Q(s,a,u) + lambda_a std(s,a,u)`, `a = f(xi; s)`.
pub fn protagonist_loss_and_grad(
    policy: &Policy,
    critic: &Critic,
    batch: &[ActorSample],
    alpha: f64,
    lambda_a: f64,
) -> Result<ActorLoss> {
    actor_loss_and_grad(Role::Protagonist, policy, critic, batch, alpha, lambda_a)
}

/// Mean of `Q(s,a,u) - lambda_u std(s,a,u)`, `u = h(xi; s)`. No entropy term.
pub fn adversary_loss_and_grad(policy: &Policy, critic: &Critic, batch: &[ActorSample], lambda_u: f64) -> Result<ActorLoss> {
    actor_loss_and_grad(Role::Adversary, policy, critic, batch, 0.0, lambda_u)
}

/// Entropy temperature, optimized in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureState {
    pub log_alpha: f64,
    pub target_entropy: f64,
}

impl TemperatureState {
    pub fn new(alpha: f64, target_entropy: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Config(format!("initial alpha must be positive, got {alpha}")));
        }
        Ok(Self {
            log_alpha: alpha.ln(),
            target_entropy,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    /// Mean of `-alpha (log pi + H_target)` and its derivative in `log_alpha`.
    /// The gradient vanishes when `-mean(log pi)` equals the target entropy.
    pub fn loss_and_grad(&self, log_probs: &[f64]) -> (f64, f64) {
        if log_probs.is_empty() {
            return (0.0, 0.0);
        }
        let mean = log_probs.iter().sum::<f64>() / log_probs.len() as f64;
        let loss = -self.alpha() * (mean + self.target_entropy);
        // d/d log_alpha of -exp(log_alpha) c is the loss itself
        (loss, loss)
    }
}
