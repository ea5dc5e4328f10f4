//! Gaussian return distribution `Z(s, a, u) ~ N(Q, std^2)` and its training signal.
//!
//! The critic network maps `[obs (6), a (1), u (2)]` to two raw heads
//! `[mean, raw_std]`; `std = sigma_min + softplus(raw_std)`. Targets are one
//! sampled soft-Bellman backup per transition, clipped into `Q +- b` around the
//! current mean, and the critic is fit by Gaussian negative log-likelihood.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::env::{AdversaryMode, ADVERSARY_DIM, OBS_DIM};
use crate::error::{check_dim, Error, Result};
use crate::exec;
use crate::nn::{Architecture, NetParams, Trace};
use crate::policy::Policy;
use crate::replay::Transition;

pub const CRITIC_INPUT_DIM: usize = OBS_DIM + 1 + ADVERSARY_DIM;
pub const ACTION_INDEX: usize = OBS_DIM;
pub const ADVERSARY_INDEX: usize = OBS_DIM + 1;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianReturn {
    pub mean: f64,
    pub std: f64,
}

impl GaussianReturn {
    /// Negative log-likelihood of `y`.
    pub fn nll(&self, y: f64) -> f64 {
        let z = (y - self.mean) / self.std;
        0.5 * z * z + self.std.ln() + HALF_LN_2PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticInput {
    pub obs: [f64; OBS_DIM],
    pub action: [f64; 1],
    pub adversary_action: [f64; ADVERSARY_DIM],
}

impl CriticInput {
    pub fn to_array(&self) -> [f64; CRITIC_INPUT_DIM] {
        let mut x = [0.0; CRITIC_INPUT_DIM];
        x[..OBS_DIM].copy_from_slice(&self.obs);
        x[ACTION_INDEX] = self.action[0];
        x[ADVERSARY_INDEX..].copy_from_slice(&self.adversary_action);
        x
    }

    pub fn from_transition(t: &Transition) -> Self {
        Self {
            obs: t.obs,
            action: t.action,
            adversary_action: t.adversary_action,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Critic {
    pub net: NetParams,
    pub sigma_min: f64,
}

impl Critic {
    pub fn architecture(hidden: Vec<usize>, activation: crate::nn::Activation) -> Architecture {
        Architecture::new(CRITIC_INPUT_DIM, hidden, 2, activation)
    }

    pub fn new(net: NetParams, sigma_min: f64) -> Result<Self> {
        check_dim("critic input width", CRITIC_INPUT_DIM, net.arch().input)?;
        check_dim("critic output width", 2, net.arch().output)?;
        if !(sigma_min > 0.0) {
            return Err(Error::Config(format!("sigma_min must be positive, got {sigma_min}")));
        }
        Ok(Self { net, sigma_min })
    }

    fn head(&self, out: &[f64]) -> Result<GaussianReturn> {
        if !out[0].is_finite() || !out[1].is_finite() {
            return Err(Error::NonFinite {
                what: "critic output",
                index: if out[0].is_finite() { 1 } else { 0 },
            });
        }
        Ok(GaussianReturn {
            mean: out[0],
            std: self.sigma_min + softplus(out[1]),
        })
    }

    pub fn forward(&self, input: &CriticInput) -> Result<GaussianReturn> {
        let out = self.net.forward(&input.to_array())?;
        self.head(&out)
    }

    pub(crate) fn trace(&self, input: &CriticInput) -> Result<(Trace, GaussianReturn)> {
        let trace = self.net.forward_trace(&input.to_array())?;
        let ret = self.head(trace.output())?;
        Ok((trace, ret))
    }

    /// Output cotangent `[dL/dmean, dL/draw]` for a loss `c_mean * Q + c_std * std`.
    pub(crate) fn head_cotangent(&self, trace: &Trace, c_mean: f64, c_std: f64) -> [f64; 2] {
        [c_mean, c_std * sigmoid(trace.output()[1])]
    }

    /// Gradient of `c_mean * Q + c_std * std` with respect to the critic input.
    pub fn input_gradient(&self, input: &CriticInput, c_mean: f64, c_std: f64) -> Result<(GaussianReturn, Vec<f64>)> {
        let (trace, ret) = self.trace(input)?;
        let cot = self.head_cotangent(&trace, c_mean, c_std);
        let ig = self.net.backward(&trace, &cot, None)?;
        Ok((ret, ig))
    }
}

/// Soft Bellman backup for one sampled next return `z_next`.
/// Terminal transitions do not bootstrap.
pub fn soft_bellman_target(reward: f64, done: bool, z_next: f64, next_log_prob: f64, alpha: f64, gamma: f64) -> f64 {
    if done {
        reward
    } else {
        reward + gamma * (z_next - alpha * next_log_prob)
    }
}

pub fn clip_target(y: f64, q_current: f64, b: f64) -> f64 {
    y.max(q_current - b).min(q_current + b)
}

/// Where the next-state adversary action of a backup comes from.
#[derive(Debug, Clone, Copy)]
pub enum AdversarySource<'a> {
    /// Target adversary policy.
    Policy(&'a Policy),
    /// Scripted adversary; the physical draw is divided by `bound` to normalize it.
    Scripted { mode: AdversaryMode, bound: f64 },
}

/// All randomness consumed by one backup, drawn up front so batches can be
/// evaluated in any order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetDraw {
    pub action_noise: [f64; 1],
    pub adversary: AdversaryDraw,
    pub z_noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryDraw {
    Noise([f64; ADVERSARY_DIM]),
    Normalized([f64; ADVERSARY_DIM]),
}

impl TargetDraw {
    pub fn sample<R: Rng + ?Sized>(adversary: &AdversarySource<'_>, rng: &mut R) -> Self {
        let action_noise = [rng.sample(StandardNormal)];
        let adversary = match *adversary {
            AdversarySource::Policy(_) => AdversaryDraw::Noise([rng.sample(StandardNormal), rng.sample(StandardNormal)]),
            AdversarySource::Scripted { mode, bound } => {
                let [u1, u2] = mode.sample(rng, bound);
                AdversaryDraw::Normalized([u1 / bound, u2 / bound])
            }
        };
        Self {
            action_noise,
            adversary,
            z_noise: rng.sample(StandardNormal),
        }
    }
}

/// Target networks used to build backups.
#[derive(Debug, Clone, Copy)]
pub struct TargetNets<'a> {
    pub critic: &'a Critic,
    pub protagonist: &'a Policy,
    pub adversary: AdversarySource<'a>,
}

impl TargetNets<'_> {
    /// `r` when terminal; otherwise `r + gamma * (z' - alpha * log pi(a'|s'))` with
    /// `a' ~ pi_target(s')`, `u'` from the adversary source and `z' ~ Z_target(s', a', u')`.
    pub fn td_target_with(&self, t: &Transition, draw: &TargetDraw, alpha: f64, gamma: f64) -> Result<f64> {
        if t.done {
            return Ok(t.reward);
        }
        let a = self.protagonist.sample_action(&t.next_obs, &draw.action_noise)?;
        let u = match (self.adversary, draw.adversary) {
            (AdversarySource::Policy(p), AdversaryDraw::Noise(xi)) => {
                let s = p.sample_action(&t.next_obs, &xi)?;
                [s.normalized[0], s.normalized[1]]
            }
            (_, AdversaryDraw::Normalized(u)) => u,
            (AdversarySource::Scripted { .. }, AdversaryDraw::Noise(_)) => {
                return Err(Error::Config("scripted adversary needs a pre-drawn action".into()));
            }
        };
        let next = CriticInput {
            obs: t.next_obs,
            action: [a.normalized[0]],
            adversary_action: u,
        };
        let z = self.critic.forward(&next)?;
        let z_next = z.mean + z.std * draw.z_noise;
        Ok(soft_bellman_target(t.reward, t.done, z_next, a.log_prob, alpha, gamma))
    }

    pub fn td_target<R: Rng + ?Sized>(&self, t: &Transition, alpha: f64, gamma: f64, rng: &mut R) -> Result<f64> {
        let draw = TargetDraw::sample(&self.adversary, rng);
        self.td_target_with(t, &draw, alpha, gamma)
    }

    /// Backups for a whole batch. Draws happen sequentially, evaluation in parallel.
    pub fn td_targets<R: Rng + ?Sized>(&self, batch: &[Transition], alpha: f64, gamma: f64, rng: &mut R) -> Result<Vec<f64>> {
        let draws: Vec<TargetDraw> = batch.iter().map(|_| TargetDraw::sample(&self.adversary, rng)).collect();
        exec::map(batch.len(), |i| self.td_target_with(&batch[i], &draws[i], alpha, gamma))
            .into_iter()
            .collect()
    }
}

fn nll_sample(critic: &Critic, input: &CriticInput, y: f64, scale: f64, grads: &mut [f64]) -> Result<f64> {
    let (trace, ret) = critic.trace(input)?;
    let diff = y - ret.mean;
    let var = ret.std * ret.std;
    let loss = ret.nll(y);
    let d_mean = -diff / var;
    let d_std = 1.0 / ret.std - diff * diff / (var * ret.std);
    let cot = critic.head_cotangent(&trace, scale * d_mean, scale * d_std);
    critic.net.backward(&trace, &cot, Some(grads))?;
    Ok(loss)
}

fn locate_bad_sample(critic: &Critic, batch: &[(CriticInput, f64)]) -> Error {
    for (i, (input, y)) in batch.iter().enumerate() {
        let ok = critic.forward(input).map(|r| r.nll(*y).is_finite()).unwrap_or(false);
        if !ok || !y.is_finite() {
            return Error::NonFinite { what: "critic loss batch", index: i };
        }
    }
    Error::NonFinite { what: "critic loss gradient", index: 0 }
}

/// Mean Gaussian NLL of already-clipped targets and its exact gradient.
/// The targets are constants: no gradient flows through them.
pub fn critic_loss_and_grad(critic: &Critic, batch: &[(CriticInput, f64)]) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::Degenerate("empty critic batch".into()));
    }
    let n = batch.len();
    let scale = 1.0 / n as f64;
    let (sum, grads) = exec::chunked_sum(n, critic.net.len(), |range, g| {
        range
            .map(|i| nll_sample(critic, &batch[i].0, batch[i].1, scale, g).unwrap_or(f64::NAN))
            .sum()
    });
    let loss = sum / n as f64;
    if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
        return Err(locate_bad_sample(critic, batch));
    }
    Ok((loss, grads))
}

/// Result of one critic training pass over a batch of raw backups.
#[derive(Debug, Clone)]
pub struct CriticStep {
    pub loss: f64,
    pub grads: Vec<f64>,
    pub clipped_targets: Vec<f64>,
    pub q_values: Vec<f64>,
}

/// Clips every raw backup into `Q +- b` around the current mean and evaluates
/// the NLL gradient, sharing one forward pass per sample.
pub fn critic_step(critic: &Critic, inputs: &[CriticInput], raw_targets: &[f64], b: f64) -> Result<CriticStep> {
    check_dim("critic targets", inputs.len(), raw_targets.len())?;
    if inputs.is_empty() {
        return Err(Error::Degenerate("empty critic batch".into()));
    }
    struct Chunk {
        loss: f64,
        q_values: Vec<f64>,
        targets: Vec<f64>,
        grads: Vec<f64>,
    }
    let n = inputs.len();
    let scale = 1.0 / n as f64;
    let chunks: Vec<Result<Chunk>> = exec::map(n.div_ceil(exec::CHUNK), |c| {
        let range = c * exec::CHUNK..((c + 1) * exec::CHUNK).min(n);
        let mut out = Chunk {
            loss: 0.0,
            q_values: Vec::with_capacity(range.len()),
            targets: Vec::with_capacity(range.len()),
            grads: vec![0.0; critic.net.len()],
        };
        for i in range {
            let (trace, ret) = critic.trace(&inputs[i])?;
            let y = clip_target(raw_targets[i], ret.mean, b);
            let diff = y - ret.mean;
            let var = ret.std * ret.std;
            let d_mean = -diff / var;
            let d_std = 1.0 / ret.std - diff * diff / (var * ret.std);
            let cot = critic.head_cotangent(&trace, scale * d_mean, scale * d_std);
            critic.net.backward(&trace, &cot, Some(&mut out.grads))?;
            out.loss += ret.nll(y);
            out.q_values.push(ret.mean);
            out.targets.push(y);
        }
        Ok(out)
    });
    let mut loss = 0.0;
    let mut grads = vec![0.0; critic.net.len()];
    let mut clipped_targets = Vec::with_capacity(n);
    let mut q_values = Vec::with_capacity(n);
    for chunk in chunks {
        let chunk = chunk?;
        loss += chunk.loss;
        q_values.extend(chunk.q_values);
        clipped_targets.extend(chunk.targets);
        grads.iter_mut().zip(&chunk.grads).for_each(|(a, b)| *a += b);
    }
    let loss = loss / n as f64;
    if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
        let batch: Vec<(CriticInput, f64)> = inputs.iter().copied().zip(clipped_targets.iter().copied()).collect();
        return Err(locate_bad_sample(critic, &batch));
    }
    Ok(CriticStep {
        loss,
        grads,
        clipped_targets,
        q_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Activation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn input(seed: f64) -> CriticInput {
        CriticInput {
            obs: [seed, 0.1, -0.2, 0.3, 0.4, -0.5],
            action: [0.2],
            adversary_action: [-0.3, 0.6],
        }
    }

    fn random_critic(seed: u64) -> Critic {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = NetParams::init_uniform(Critic::architecture(vec![8, 8], Activation::Gelu), &mut rng);
        Critic::new(net, 1e-3).unwrap()
    }

    #[test]
    fn zero_output_layer_gives_softplus_zero_std() {
        let mut critic = random_critic(1);
        let last = critic.net.arch().num_layers() - 1;
        let (w, b) = critic.net.layer_mut(last);
        w.fill(0.0);
        b.fill(0.0);
        let r = critic.forward(&input(0.3)).unwrap();
        assert_eq!(r.mean, 0.0);
        assert!((r.std - (1e-3 + 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn std_is_positive_for_extreme_raw_heads() {
        for raw in [-100.0, 0.0, 100.0] {
            let std = 1e-3 + softplus(raw);
            assert!(std > 0.0 && std >= 1e-3, "raw {raw}");
        }
        assert!(softplus(-800.0) >= 0.0);
        assert!((softplus(800.0) - 800.0).abs() < 1e-9);
    }

    #[test]
    fn nll_closed_forms() {
        let r = GaussianReturn { mean: 3.0, std: 1.0 };
        assert!((r.nll(3.0) - 0.918_938_533_204_672_7).abs() < 1e-12);
        let r = GaussianReturn { mean: -2.0, std: 2.5 };
        assert!((r.nll(0.5) - (0.5 + 2.5f64.ln() + HALF_LN_2PI)).abs() < 1e-12);
    }

    #[test]
    fn clip_cases() {
        assert_eq!(clip_target(50.0, 20.0, 20.0), 40.0);
        assert_eq!(clip_target(25.0, 20.0, 20.0), 25.0);
        assert_eq!(clip_target(20.0 - 20.0 - 1e-3, 20.0, 20.0), 0.0);
    }

    #[test]
    fn terminal_and_zero_discount_targets() {
        assert_eq!(soft_bellman_target(-110.0, true, 55.0, -3.0, 0.2, 0.99), -110.0);
        assert_eq!(soft_bellman_target(-1.0, false, 55.0, -3.0, 0.2, 0.0), -1.0);
        assert!((soft_bellman_target(-1.0, false, 10.0, -2.0, 0.5, 0.9) - (-1.0 + 0.9 * 11.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_batch_is_rejected() {
        assert!(critic_loss_and_grad(&random_critic(0), &[]).is_err());
    }

    #[test]
    fn non_finite_target_reports_index() {
        let critic = random_critic(2);
        let batch = vec![(input(0.1), 1.0), (input(0.2), f64::NAN), (input(0.3), 0.0)];
        match critic_loss_and_grad(&critic, &batch) {
            Err(Error::NonFinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn critic_step_matches_loss_on_clipped_targets() {
        let critic = random_critic(4);
        let inputs: Vec<_> = (0..20).map(|i| input(i as f64 / 10.0)).collect();
        let raw: Vec<f64> = (0..20).map(|i| (i as f64 - 10.0) * 7.0).collect();
        let step = critic_step(&critic, &inputs, &raw, 20.0).unwrap();
        for (y, q) in step.clipped_targets.iter().zip(&step.q_values) {
            assert!(*y >= q - 20.0 && *y <= q + 20.0);
        }
        let batch: Vec<_> = inputs.iter().copied().zip(step.clipped_targets.iter().copied()).collect();
        let (loss, grads) = critic_loss_and_grad(&critic, &batch).unwrap();
        assert!((loss - step.loss).abs() < 1e-12);
        for (a, b) in grads.iter().zip(&step.grads) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_min_must_be_positive() {
        let net = NetParams::zeros(Critic::architecture(vec![], Activation::Identity));
        assert!(Critic::new(net, 0.0).is_err());
    }
}
