//! Random gradient-check instances. Each returns the relative error between
//! the analytic gradient and central differences (h = 1e-5) with frozen noise.

use minimax_dsac::critic::{critic_loss_and_grad, Critic, CriticInput};
use minimax_dsac::nn::{Activation, Architecture, NetParams};
use minimax_dsac::policy::{adversary_loss_and_grad, protagonist_loss_and_grad, ActorSample, Policy, TemperatureState};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{central_diff, rel_err};

pub const H: f64 = 1e-5;

fn random_obs<R: Rng>(rng: &mut R) -> [f64; 6] {
    std::array::from_fn(|_| rng.random_range(-1.5..1.5))
}

fn random_critic<R: Rng>(rng: &mut R) -> Critic {
    let arch = Critic::architecture(vec![8, 8], Activation::Gelu);
    Critic::new(NetParams::init_uniform(arch, rng), 1e-3).unwrap()
}

fn random_policy<R: Rng>(rng: &mut R, dim: usize) -> Policy {
    let arch = Policy::architecture(vec![8], Activation::Gelu, dim);
    let scale = if dim == 1 { vec![3.0] } else { vec![2.0; dim] };
    Policy::new(NetParams::init_uniform(arch, rng), scale).unwrap()
}

fn with_params(net: &NetParams, p: &[f64]) -> NetParams {
    NetParams::from_vec(net.arch().clone(), p.to_vec()).unwrap()
}

/// Mean Gaussian NLL over a random batch of 8 with random targets.
pub fn critic_instance<R: Rng>(rng: &mut R) -> f64 {
    let critic = random_critic(rng);
    let batch: Vec<(CriticInput, f64)> = (0..8)
        .map(|_| {
            let input = CriticInput {
                obs: random_obs(rng),
                action: [rng.random_range(-1.0..1.0)],
                adversary_action: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            };
            let q = critic.forward(&input).unwrap();
            (input, q.mean + q.std * rng.random_range(-3.0..3.0))
        })
        .collect();
    let (_, grads) = critic_loss_and_grad(&critic, &batch).unwrap();
    let fd = central_diff(critic.net.values(), H, |p| {
        let c = Critic::new(with_params(&critic.net, p), critic.sigma_min).unwrap();
        critic_loss_and_grad(&c, &batch).unwrap().0
    });
    rel_err(&grads, &fd)
}

fn actor_batch<R: Rng>(rng: &mut R, own_dim: usize, other_dim: usize) -> Vec<ActorSample> {
    (0..8)
        .map(|_| ActorSample {
            obs: random_obs(rng),
            other_action: (0..other_dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
            noise: (0..own_dim).map(|_| rng.sample(StandardNormal)).collect(),
        })
        .collect()
}

/// `alpha log pi - Q + lambda_a std` over a batch of 8.
pub fn protagonist_instance<R: Rng>(rng: &mut R) -> f64 {
    let critic = random_critic(rng);
    let policy = random_policy(rng, 1);
    let batch = actor_batch(rng, 1, 2);
    let alpha = rng.random_range(0.0..0.5);
    let lambda = rng.random_range(0.0..1.0);
    let loss = protagonist_loss_and_grad(&policy, &critic, &batch, alpha, lambda).unwrap();
    let fd = central_diff(policy.net.values(), H, |p| {
        let pol = Policy::new(with_params(&policy.net, p), policy.scale().to_vec()).unwrap();
        protagonist_loss_and_grad(&pol, &critic, &batch, alpha, lambda).unwrap().loss
    });
    rel_err(&loss.grads, &fd)
}

/// `Q - lambda_u std` over a batch of 8.
pub fn adversary_instance<R: Rng>(rng: &mut R) -> f64 {
    let critic = random_critic(rng);
    let policy = random_policy(rng, 2);
    let batch = actor_batch(rng, 2, 1);
    let lambda = rng.random_range(0.0..1.0);
    let loss = adversary_loss_and_grad(&policy, &critic, &batch, lambda).unwrap();
    let fd = central_diff(policy.net.values(), H, |p| {
        let pol = Policy::new(with_params(&policy.net, p), policy.scale().to_vec()).unwrap();
        adversary_loss_and_grad(&pol, &critic, &batch, lambda).unwrap().loss
    });
    rel_err(&loss.grads, &fd)
}

/// Temperature loss in `log alpha` for a random batch of log-probabilities.
pub fn temperature_instance<R: Rng>(rng: &mut R) -> f64 {
    let log_probs: Vec<f64> = (0..16).map(|_| rng.random_range(-4.0..4.0)).collect();
    let state = TemperatureState::new(rng.random_range(1e-3..1.0), -1.0).unwrap();
    let (_, grad) = state.loss_and_grad(&log_probs);
    let fd = central_diff(&[state.log_alpha], H, |x| {
        TemperatureState {
            log_alpha: x[0],
            ..state
        }
        .loss_and_grad(&log_probs)
        .0
    });
    rel_err(&[grad], &fd)
}

/// Architecture of a linear critic used by contrived-critic tests.
pub fn linear_critic_arch() -> Architecture {
    Critic::architecture(vec![], Activation::Identity)
}
