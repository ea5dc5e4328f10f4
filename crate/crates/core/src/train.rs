//! Synchronous actor/learner loop.
//!
//! Every environment step selects actions, steps the simulator and stores the
//! transition. Once the buffer holds a full batch, each step also runs
//! `updates_per_env_step` update rounds in a fixed order: critic, protagonist,
//! adversary (minimax only), temperature, then all target networks.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::checkpoint::{Checkpoint, NamedNet};
use crate::config::{Algo, TrainConfig};
use crate::critic::{critic_step, AdversarySource, Critic, CriticInput, TargetNets};
use crate::env::{AdversaryMode, Intersection, OBS_DIM};
use crate::error::{Error, Result};
use crate::eval::{evaluate_detailed, EpisodeRecord, EvalSummary};
use crate::nn::{AdamState, NetParams};
use crate::policy::{adversary_loss_and_grad, protagonist_loss_and_grad, ActorSample, Policy, TemperatureState};
use crate::replay::{ReplayBuffer, Transition};
use crate::stats;

/// `tau * online + (1 - tau) * target`, elementwise.
pub fn soft_update(online: &NetParams, target: &NetParams, tau: f64) -> Result<NetParams> {
    let mut next = target.clone();
    next.soft_update_from(online, tau)?;
    Ok(next)
}

/// Linear interpolation from `start` (step 0) to `end` (step `total`).
pub fn lr_schedule(start: f64, end: f64, step: u64, total: u64) -> f64 {
    if total == 0 {
        return start;
    }
    let frac = step.min(total) as f64 / total as f64;
    start + (end - start) * frac
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    /// Update rounds completed so far.
    pub iteration: u64,
    pub env_steps: u64,
    /// Mean return of the trailing completed episodes; NaN before the first one ends.
    pub avg_return: f64,
    pub critic_loss: f64,
    pub protagonist_loss: f64,
    /// NaN in dsac mode.
    pub adversary_loss: f64,
    pub alpha: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub alpha_lr: f64,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub config: TrainConfig,
    pub log: Vec<LogRow>,
    pub checkpoints: Vec<Checkpoint>,
    pub evals: Vec<EvalSummary>,
    /// First evaluation episode of every mode, for trajectory plots.
    pub trajectories: Vec<(AdversaryMode, EpisodeRecord)>,
    pub episode_returns: Vec<f64>,
}

impl RunArtifacts {
    pub fn empty(config: TrainConfig) -> Self {
        Self {
            config,
            log: Vec::new(),
            checkpoints: Vec::new(),
            evals: Vec::new(),
            trajectories: Vec::new(),
            episode_returns: Vec::new(),
        }
    }
}

/// Learned adversary and its target copy.
#[derive(Debug, Clone)]
pub struct AdversaryNets {
    pub online: Policy,
    pub target: Policy,
    pub adam: AdamState,
}

/// Every learned quantity of one run.
#[derive(Debug, Clone)]
pub struct Agent {
    pub critic: Critic,
    pub critic_target: Critic,
    pub protagonist: Policy,
    pub protagonist_target: Policy,
    pub adversary: Option<AdversaryNets>,
    pub temperature: TemperatureState,
    pub critic_adam: AdamState,
    pub protagonist_adam: AdamState,
    pub alpha_adam: AdamState,
}

impl Agent {
    pub fn new<R: Rng + ?Sized>(cfg: &TrainConfig, rng: &mut R) -> Result<Self> {
        let hidden = cfg.hidden();
        let critic = Critic::new(
            NetParams::init_uniform(Critic::architecture(hidden.clone(), cfg.activation), rng),
            cfg.sigma_min,
        )?;
        let protagonist = Policy::new(
            NetParams::init_uniform(Policy::architecture(hidden.clone(), cfg.activation, 1), rng),
            vec![cfg.env.protagonist_accel],
        )?;
        let adversary = match cfg.algo {
            Algo::Dsac => None,
            Algo::MinimaxDsac => {
                let online = Policy::new(
                    NetParams::init_uniform(Policy::architecture(hidden, cfg.activation, 2), rng),
                    vec![cfg.env.adversary_accel; 2],
                )?;
                Some(AdversaryNets {
                    adam: AdamState::new(online.net.len(), cfg.adam_beta1, cfg.adam_beta2),
                    target: online.clone(),
                    online,
                })
            }
        };
        Ok(Self {
            critic_adam: AdamState::new(critic.net.len(), cfg.adam_beta1, cfg.adam_beta2),
            protagonist_adam: AdamState::new(protagonist.net.len(), cfg.adam_beta1, cfg.adam_beta2),
            alpha_adam: AdamState::new(1, cfg.adam_beta1, cfg.adam_beta2),
            critic_target: critic.clone(),
            protagonist_target: protagonist.clone(),
            critic,
            protagonist,
            adversary,
            temperature: TemperatureState::new(cfg.alpha_init, cfg.target_entropy)?,
        })
    }

    pub fn checkpoint(&self, algo: Algo, env_steps: u64) -> Checkpoint {
        let named = |name: &str, params: &NetParams, scale: &[f64]| NamedNet {
            name: name.to_string(),
            params: params.clone(),
            scale: scale.to_vec(),
        };
        let mut nets = vec![
            named("critic", &self.critic.net, &[]),
            named("critic_target", &self.critic_target.net, &[]),
            named("protagonist", &self.protagonist.net, self.protagonist.scale()),
            named("protagonist_target", &self.protagonist_target.net, self.protagonist_target.scale()),
        ];
        if let Some(adv) = &self.adversary {
            nets.push(named("adversary", &adv.online.net, adv.online.scale()));
            nets.push(named("adversary_target", &adv.target.net, adv.target.scale()));
        }
        Checkpoint {
            algo,
            env_steps,
            log_alpha: self.temperature.log_alpha,
            sigma_min: self.critic.sigma_min,
            nets,
        }
    }
}

/// Losses of one update round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateStats {
    pub critic_loss: f64,
    pub protagonist_loss: f64,
    pub adversary_loss: f64,
    pub temperature_loss: f64,
}

#[derive(Debug, Default, Clone, Copy)]
struct LossWindow {
    critic: f64,
    protagonist: f64,
    adversary: f64,
    count: u64,
}

pub struct Trainer {
    cfg: TrainConfig,
    rng: ChaCha8Rng,
    agent: Agent,
    env: Intersection,
    buffer: ReplayBuffer,
    obs: [f64; OBS_DIM],
    env_steps: u64,
    updates: u64,
    episode_return: f64,
    episode_returns: Vec<f64>,
    recent_returns: VecDeque<f64>,
    window: LossWindow,
    log: Vec<LogRow>,
    checkpoints: Vec<Checkpoint>,
}

impl Trainer {
    pub fn new(cfg: TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let agent = Agent::new(&cfg, &mut rng)?;
        let mut env = Intersection::new(cfg.env.clone(), &mut rng);
        let obs = env.observe();
        env.clamped_actions = 0;
        let buffer = ReplayBuffer::new(cfg.buffer_capacity)?;
        let initial = agent.checkpoint(cfg.algo, 0);
        Ok(Self {
            rng,
            agent,
            env,
            buffer,
            obs,
            env_steps: 0,
            updates: 0,
            episode_return: 0.0,
            episode_returns: Vec::new(),
            recent_returns: VecDeque::with_capacity(cfg.return_window),
            window: LossWindow::default(),
            log: Vec::new(),
            checkpoints: vec![initial],
            cfg,
        })
    }

    pub fn agent(&self) -> &Agent {
        &self.agent
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn log(&self) -> &[LogRow] {
        &self.log
    }

    pub fn episode_returns(&self) -> &[f64] {
        &self.episode_returns
    }

    /// Number of acceleration components the simulator had to clamp.
    pub fn clamped_actions(&self) -> u64 {
        self.env.clamped_actions
    }

    fn lrs(&self) -> (f64, f64, f64) {
        let (s, t, c) = (self.env_steps, self.cfg.total_steps, &self.cfg);
        (
            lr_schedule(c.actor_lr_start, c.actor_lr_end, s, t),
            lr_schedule(c.critic_lr_start, c.critic_lr_end, s, t),
            lr_schedule(c.alpha_lr_start, c.alpha_lr_end, s, t),
        )
    }

    /// One interaction with the simulator followed by the update rounds it triggers.
    pub fn step(&mut self) -> Result<()> {
        let protagonist = self.agent.protagonist.sample(&self.obs, &mut self.rng)?;
        let (u_phys, u_norm) = match &self.agent.adversary {
            Some(adv) => {
                let s = adv.online.sample(&self.obs, &mut self.rng)?;
                ([s.physical[0], s.physical[1]], [s.normalized[0], s.normalized[1]])
            }
            None => {
                let bound = self.cfg.env.adversary_accel;
                let u = AdversaryMode::TrainRandom.sample(&mut self.rng, bound);
                (u, [u[0] / bound, u[1] / bound])
            }
        };
        let outcome = self.env.step(protagonist.physical[0], u_phys);
        let next_obs = self.env.observe();
        self.buffer.push(Transition {
            obs: self.obs,
            action: [protagonist.normalized[0]],
            adversary_action: u_norm,
            reward: outcome.reward,
            next_obs,
            done: outcome.kind.is_terminal(),
        });
        self.env_steps += 1;
        self.episode_return += outcome.reward;
        self.obs = next_obs;
        if outcome.done {
            self.finish_episode();
        }

        if self.buffer.len() >= self.cfg.batch_size {
            for _ in 0..self.cfg.updates_per_env_step {
                let stats = self.update_round()?;
                self.window.critic += stats.critic_loss;
                self.window.protagonist += stats.protagonist_loss;
                self.window.adversary += stats.adversary_loss;
                self.window.count += 1;
            }
        }

        if self.env_steps % self.cfg.log_interval == 0 {
            self.push_log_row();
        }
        if self.env_steps % self.cfg.eval_interval == 0 {
            self.checkpoints.push(self.agent.checkpoint(self.cfg.algo, self.env_steps));
        }
        Ok(())
    }

    fn finish_episode(&mut self) {
        self.episode_returns.push(self.episode_return);
        if self.recent_returns.len() == self.cfg.return_window {
            self.recent_returns.pop_front();
        }
        self.recent_returns.push_back(self.episode_return);
        self.episode_return = 0.0;
        self.obs = self.env.reset(&mut self.rng);
    }

    fn push_log_row(&mut self) {
        let w = std::mem::take(&mut self.window);
        let avg = |s: f64| if w.count == 0 { f64::NAN } else { s / w.count as f64 };
        let (actor_lr, critic_lr, alpha_lr) = self.lrs();
        let recent: Vec<f64> = self.recent_returns.iter().copied().collect();
        self.log.push(LogRow {
            iteration: self.updates,
            env_steps: self.env_steps,
            avg_return: stats::mean(&recent),
            critic_loss: avg(w.critic),
            protagonist_loss: avg(w.protagonist),
            adversary_loss: if self.agent.adversary.is_some() {
                avg(w.adversary)
            } else {
                f64::NAN
            },
            alpha: self.agent.temperature.alpha(),
            actor_lr,
            critic_lr,
            alpha_lr,
        });
    }

    fn diverged(&self, batch: &[Transition], err: Error) -> Error {
        let rewards: Vec<f64> = batch.iter().map(|t| t.reward).collect();
        Error::Diverged {
            step: self.env_steps,
            reason: format!(
                "{err}; batch of {} with reward mean {:.3}, {} terminal, alpha {:.3e}",
                batch.len(),
                stats::mean(&rewards),
                batch.iter().filter(|t| t.done).count(),
                self.agent.temperature.alpha()
            ),
        }
    }

    /// One round of updates on a freshly sampled batch.
    pub fn update_round(&mut self) -> Result<UpdateStats> {
        let (actor_lr, critic_lr, alpha_lr) = self.lrs();
        let cfg = &self.cfg;
        let batch = self.buffer.sample_batch(cfg.batch_size, &mut self.rng)?;
        let agent = &mut self.agent;
        let alpha = agent.temperature.alpha();

        // critic
        let adversary_source = match &agent.adversary {
            Some(adv) => AdversarySource::Policy(&adv.target),
            None => AdversarySource::Scripted {
                mode: AdversaryMode::TrainRandom,
                bound: cfg.env.adversary_accel,
            },
        };
        let targets = TargetNets {
            critic: &agent.critic_target,
            protagonist: &agent.protagonist_target,
            adversary: adversary_source,
        };
        let raw = targets.td_targets(&batch, alpha, cfg.gamma, &mut self.rng);
        let inputs: Vec<CriticInput> = batch.iter().map(CriticInput::from_transition).collect();
        let critic = raw.and_then(|raw| critic_step(&agent.critic, &inputs, &raw, cfg.clip_boundary));
        let critic = match critic {
            Ok(c) => c,
            Err(e) => {
                let err = Error::Diverged {
                    step: self.env_steps,
                    reason: e.to_string(),
                };
                return Err(self.diverged(&batch, err));
            }
        };
        for (y, q) in critic.clipped_targets.iter().zip(&critic.q_values) {
            assert!(
                (q - cfg.clip_boundary..=q + cfg.clip_boundary).contains(y),
                "clipped target {y} outside Q +- b around {q}"
            );
        }
        agent
            .critic_adam
            .step(agent.critic.net.values_mut(), &critic.grads, critic_lr)?;

        // protagonist
        let samples: Vec<ActorSample> = batch
            .iter()
            .map(|t| ActorSample {
                obs: t.obs,
                other_action: t.adversary_action.to_vec(),
                noise: vec![self.rng.sample(StandardNormal)],
            })
            .collect();
        let prot = protagonist_loss_and_grad(&agent.protagonist, &agent.critic, &samples, alpha, cfg.lambda_a);
        let prot = match prot {
            Ok(p) => p,
            Err(e) => return Err(self.diverged(&batch, e)),
        };
        agent
            .protagonist_adam
            .step(agent.protagonist.net.values_mut(), &prot.grads, actor_lr)?;

        // adversary
        let mut adversary_loss = f64::NAN;
        if let Some(adv) = agent.adversary.as_mut() {
            let samples: Vec<ActorSample> = batch
                .iter()
                .map(|t| ActorSample {
                    obs: t.obs,
                    other_action: t.action.to_vec(),
                    noise: vec![self.rng.sample(StandardNormal), self.rng.sample(StandardNormal)],
                })
                .collect();
            let loss = adversary_loss_and_grad(&adv.online, &agent.critic, &samples, cfg.lambda_u)?;
            adv.adam.step(adv.online.net.values_mut(), &loss.grads, actor_lr)?;
            adversary_loss = loss.loss;
        }

        // temperature
        let (temperature_loss, grad) = agent.temperature.loss_and_grad(&prot.log_probs);
        let mut log_alpha = [agent.temperature.log_alpha];
        agent.alpha_adam.step(&mut log_alpha, &[grad], alpha_lr)?;
        agent.temperature.log_alpha = log_alpha[0];

        // targets
        let tau = cfg.tau;
        agent.critic_target.net.soft_update_from(&agent.critic.net, tau)?;
        agent
            .protagonist_target
            .net
            .soft_update_from(&agent.protagonist.net, tau)?;
        if let Some(adv) = agent.adversary.as_mut() {
            adv.target.net.soft_update_from(&adv.online.net, tau)?;
        }

        self.updates += 1;
        Ok(UpdateStats {
            critic_loss: critic.loss,
            protagonist_loss: prot.loss,
            adversary_loss,
            temperature_loss,
        })
    }

    /// Runs until `total_steps` environment steps have been taken.
    pub fn run(&mut self) -> Result<()> {
        while self.env_steps < self.cfg.total_steps {
            self.step()?;
        }
        Ok(())
    }

    /// Final checkpoint plus evaluation of the current protagonist under every
    /// scripted mode (`TrainRandom` included).
    pub fn finish(mut self) -> Result<RunArtifacts> {
        if self.checkpoints.last().map(|c| c.env_steps) != Some(self.env_steps) {
            self.checkpoints.push(self.agent.checkpoint(self.cfg.algo, self.env_steps));
        }
        let mut evals = Vec::new();
        let mut trajectories = Vec::new();
        let seed = eval_seed(self.cfg.seed);
        for mode in AdversaryMode::EVAL_MODES.into_iter().chain([AdversaryMode::TrainRandom]) {
            let (summary, mut records) =
                evaluate_detailed(&self.agent.protagonist, mode, self.cfg.eval_episodes, &self.cfg.env, seed)?;
            evals.push(summary);
            if !records.is_empty() {
                trajectories.push((mode, records.swap_remove(0)));
            }
        }
        Ok(RunArtifacts {
            config: self.cfg,
            log: self.log,
            checkpoints: self.checkpoints,
            evals,
            trajectories,
            episode_returns: self.episode_returns,
        })
    }
}

/// Seed of the evaluation episodes that close a run with training seed `seed`.
pub fn eval_seed(seed: u64) -> u64 {
    seed ^ 0x5eed_e7a1_0000_0000
}

/// Trains from scratch and evaluates the final protagonist.
pub fn train(cfg: TrainConfig) -> Result<RunArtifacts> {
    let mut trainer = Trainer::new(cfg)?;
    trainer.run()?;
    trainer.finish()
}
