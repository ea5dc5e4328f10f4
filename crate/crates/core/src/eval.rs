//! Evaluation of a protagonist against scripted adversaries.
//!
//! The protagonist acts with its noise-free action `scale * tanh(mean)`.
//! Every episode owns its own ChaCha stream (`seed`, stream = episode index),
//! so episodes run in parallel and still reproduce exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::env::{self, AdversaryMode, EnvConfig, EnvState, OutcomeKind};
use crate::error::Result;
use crate::exec;
use crate::policy::Policy;
use crate::stats;

/// One step of a recorded episode: the state after the step and what produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub state: EnvState,
    pub action: f64,
    pub adversary_action: [f64; 2],
    pub reward: f64,
    pub outcome: OutcomeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub initial: EnvState,
    pub rows: Vec<TrajectoryRow>,
    pub total_return: f64,
    pub outcome: OutcomeKind,
}

impl EpisodeRecord {
    pub fn steps(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub mode: AdversaryMode,
    pub returns: Vec<f64>,
    pub steps: Vec<u32>,
    pub outcomes: Vec<OutcomeKind>,
    pub mean: f64,
    /// Sample standard deviation of `returns`.
    pub std: f64,
    pub pass_rate: f64,
    pub collision_rate: f64,
    /// Mean time to pass over successful episodes, seconds; NaN without passes.
    pub mean_crossing_time: f64,
}

impl EvalSummary {
    pub fn from_episodes(mode: AdversaryMode, episodes: &[EpisodeRecord], dt: f64) -> Self {
        let returns: Vec<f64> = episodes.iter().map(|e| e.total_return).collect();
        let steps: Vec<u32> = episodes.iter().map(|e| e.steps() as u32).collect();
        let outcomes: Vec<OutcomeKind> = episodes.iter().map(|e| e.outcome).collect();
        Self::from_parts(mode, returns, steps, outcomes, dt)
    }

    pub fn from_parts(mode: AdversaryMode, returns: Vec<f64>, steps: Vec<u32>, outcomes: Vec<OutcomeKind>, dt: f64) -> Self {
        let n = returns.len().max(1) as f64;
        let rate = |k: OutcomeKind| outcomes.iter().filter(|&&o| o == k).count() as f64 / n;
        let crossing: Vec<f64> = steps
            .iter()
            .zip(&outcomes)
            .filter(|(_, &o)| o == OutcomeKind::Pass)
            .map(|(&s, _)| s as f64 * dt)
            .collect();
        Self {
            mode,
            mean: stats::mean(&returns),
            std: stats::sample_std(&returns),
            pass_rate: rate(OutcomeKind::Pass),
            collision_rate: rate(OutcomeKind::Collision),
            mean_crossing_time: stats::mean(&crossing),
            returns,
            steps,
            outcomes,
        }
    }
}

/// Runs one episode with the deterministic protagonist against a scripted adversary.
pub fn run_episode(policy: &Policy, mode: AdversaryMode, cfg: &EnvConfig, rng: &mut ChaCha8Rng) -> Result<EpisodeRecord> {
    let initial = env::reset(cfg, rng);
    let mut state = initial;
    let mut rows = Vec::new();
    let mut total_return = 0.0;
    loop {
        let (a_phys, _) = policy.deterministic_action(&env::observe(&state, cfg))?;
        let u_phys = mode.sample(rng, cfg.adversary_accel);
        let (next, out) = env::step(&state, a_phys[0], u_phys, cfg);
        state = next;
        total_return += out.reward;
        rows.push(TrajectoryRow {
            t: state.step_count as f64 * cfg.dt,
            state,
            action: a_phys[0],
            adversary_action: u_phys,
            reward: out.reward,
            outcome: out.kind,
        });
        if out.done {
            return Ok(EpisodeRecord {
                initial,
                rows,
                total_return,
                outcome: out.kind,
            });
        }
    }
}

pub fn episode_rng(seed: u64, episode: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode as u64);
    rng
}

/// Runs `episodes` independent episodes and keeps every trajectory.
pub fn evaluate_detailed(
    policy: &Policy,
    mode: AdversaryMode,
    episodes: usize,
    cfg: &EnvConfig,
    seed: u64,
) -> Result<(EvalSummary, Vec<EpisodeRecord>)> {
    let records = exec::map(episodes, |i| run_episode(policy, mode, cfg, &mut episode_rng(seed, i)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((EvalSummary::from_episodes(mode, &records, cfg.dt), records))
}

pub fn evaluate(policy: &Policy, mode: AdversaryMode, episodes: usize, cfg: &EnvConfig, seed: u64) -> Result<EvalSummary> {
    evaluate_detailed(policy, mode, episodes, cfg, seed).map(|(s, _)| s)
}
