//! Training configuration and its flat `key = value` file format.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Environment fields live under the `env.` prefix; ranges are split into
//! `_min` / `_max` keys. Unknown keys and repeated keys are errors.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::nn::Activation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    /// Baseline: no adversary networks, scripted random adversaries.
    Dsac,
    MinimaxDsac,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Dsac => "dsac",
            Algo::MinimaxDsac => "minimax-dsac",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dsac" => Ok(Algo::Dsac),
            "minimax-dsac" | "minimax_dsac" => Ok(Algo::MinimaxDsac),
            other => Err(Error::Config(format!("unknown algo `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub algo: Algo,
    pub seed: u64,
    pub total_steps: u64,
    pub updates_per_env_step: u32,
    pub eval_interval: u64,
    pub eval_episodes: usize,
    pub log_interval: u64,
    /// Completed episodes averaged into the logged training return.
    pub return_window: usize,

    pub buffer_capacity: usize,
    pub batch_size: usize,
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub activation: Activation,

    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub actor_lr_start: f64,
    pub actor_lr_end: f64,
    pub critic_lr_start: f64,
    pub critic_lr_end: f64,
    pub alpha_lr_start: f64,
    pub alpha_lr_end: f64,

    pub gamma: f64,
    pub tau: f64,
    pub target_entropy: f64,
    pub clip_boundary: f64,
    pub lambda_a: f64,
    pub lambda_u: f64,
    pub alpha_init: f64,
    pub sigma_min: f64,

    pub env: EnvConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            algo: Algo::MinimaxDsac,
            seed: 0,
            total_steps: 100_000,
            updates_per_env_step: 1,
            eval_interval: 10_000,
            eval_episodes: 20,
            log_interval: 1_000,
            return_window: 20,
            buffer_capacity: 500,
            batch_size: 256,
            hidden_layers: 2,
            hidden_width: 256,
            activation: Activation::Gelu,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            actor_lr_start: 5e-5,
            actor_lr_end: 5e-6,
            critic_lr_start: 1e-4,
            critic_lr_end: 1e-5,
            alpha_lr_start: 5e-5,
            alpha_lr_end: 5e-6,
            gamma: 0.99,
            tau: 0.001,
            target_entropy: -1.0,
            clip_boundary: 20.0,
            lambda_a: 0.1,
            lambda_u: 0.1,
            alpha_init: 0.01,
            sigma_min: 1e-3,
            env: EnvConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn hidden(&self) -> Vec<usize> {
        vec![self.hidden_width; self.hidden_layers]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad(format!("tau must lie in (0, 1], got {}", self.tau));
        }
        for (name, start, end) in [
            ("actor_lr", self.actor_lr_start, self.actor_lr_end),
            ("critic_lr", self.critic_lr_start, self.critic_lr_end),
            ("alpha_lr", self.alpha_lr_start, self.alpha_lr_end),
        ] {
            // zero freezes learning; negative rates are never valid
            if !(start >= 0.0 && end >= 0.0) {
                return bad(format!("{name} schedule must be non-negative, got {start} -> {end}"));
            }
            if end > start {
                return bad(format!("{name} schedule must not increase, got {start} -> {end}"));
            }
        }
        if self.buffer_capacity == 0 || self.batch_size == 0 {
            return bad("buffer_capacity and batch_size must be positive".into());
        }
        if self.batch_size > self.buffer_capacity {
            return bad(format!(
                "batch_size {} exceeds buffer_capacity {}",
                self.batch_size, self.buffer_capacity
            ));
        }
        if self.hidden_layers > 0 && self.hidden_width == 0 {
            return bad("hidden_width must be positive".into());
        }
        if self.eval_interval == 0 || self.log_interval == 0 || self.eval_episodes == 0 || self.return_window == 0 {
            return bad("eval_interval, log_interval, eval_episodes and return_window must be positive".into());
        }
        if self.updates_per_env_step == 0 {
            return bad("updates_per_env_step must be at least 1".into());
        }
        if !(self.clip_boundary > 0.0) || !(self.sigma_min > 0.0) || !(self.alpha_init > 0.0) {
            return bad("clip_boundary, sigma_min and alpha_init must be positive".into());
        }
        if self.lambda_a < 0.0 || self.lambda_u < 0.0 {
            return bad("lambda_a and lambda_u must be non-negative".into());
        }
        if !(self.adam_beta1 >= 0.0 && self.adam_beta1 < 1.0 && self.adam_beta2 >= 0.0 && self.adam_beta2 < 1.0) {
            return bad("adam betas must lie in [0, 1)".into());
        }
        self.env.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_string()).map_err(|e| Error::io(path, e))
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
        }
        let e = &mut self.env;
        match key {
            "algo" => self.algo = value.parse()?,
            "seed" => self.seed = num(key, value)?,
            "total_steps" => self.total_steps = num(key, value)?,
            "updates_per_env_step" => self.updates_per_env_step = num(key, value)?,
            "eval_interval" => self.eval_interval = num(key, value)?,
            "eval_episodes" => self.eval_episodes = num(key, value)?,
            "log_interval" => self.log_interval = num(key, value)?,
            "return_window" => self.return_window = num(key, value)?,
            "buffer_capacity" => self.buffer_capacity = num(key, value)?,
            "batch_size" => self.batch_size = num(key, value)?,
            "hidden_layers" => self.hidden_layers = num(key, value)?,
            "hidden_width" => self.hidden_width = num(key, value)?,
            "activation" => self.activation = value.parse()?,
            "adam_beta1" => self.adam_beta1 = num(key, value)?,
            "adam_beta2" => self.adam_beta2 = num(key, value)?,
            "actor_lr_start" => self.actor_lr_start = num(key, value)?,
            "actor_lr_end" => self.actor_lr_end = num(key, value)?,
            "critic_lr_start" => self.critic_lr_start = num(key, value)?,
            "critic_lr_end" => self.critic_lr_end = num(key, value)?,
            "alpha_lr_start" => self.alpha_lr_start = num(key, value)?,
            "alpha_lr_end" => self.alpha_lr_end = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "tau" => self.tau = num(key, value)?,
            "target_entropy" => self.target_entropy = num(key, value)?,
            "clip_boundary" => self.clip_boundary = num(key, value)?,
            "lambda_a" => self.lambda_a = num(key, value)?,
            "lambda_u" => self.lambda_u = num(key, value)?,
            "alpha_init" => self.alpha_init = num(key, value)?,
            "sigma_min" => self.sigma_min = num(key, value)?,
            "env.dt" => e.dt = num(key, value)?,
            "env.protagonist_d0" => e.protagonist_d0 = num(key, value)?,
            "env.protagonist_v0_min" => e.protagonist_v0.0 = num(key, value)?,
            "env.protagonist_v0_max" => e.protagonist_v0.1 = num(key, value)?,
            "env.adversary_d0_min" => e.adversary_d0.0 = num(key, value)?,
            "env.adversary_d0_max" => e.adversary_d0.1 = num(key, value)?,
            "env.adversary_v0_min" => e.adversary_v0.0 = num(key, value)?,
            "env.adversary_v0_max" => e.adversary_v0.1 = num(key, value)?,
            "env.protagonist_accel" => e.protagonist_accel = num(key, value)?,
            "env.adversary_accel" => e.adversary_accel = num(key, value)?,
            "env.v_max" => e.v_max = num(key, value)?,
            "env.conflict_half_length" => e.conflict_half_length = num(key, value)?,
            "env.conflict_point_1" => e.conflict_points[0] = num(key, value)?,
            "env.conflict_point_2" => e.conflict_points[1] = num(key, value)?,
            "env.pass_threshold" => e.pass_threshold = num(key, value)?,
            "env.max_episode_steps" => e.max_episode_steps = num(key, value)?,
            "env.distance_scale" => e.distance_scale = num(key, value)?,
            "env.speed_scale" => e.speed_scale = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

impl FromStr for TrainConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            cfg.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for TrainConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.env;
        let mut s = String::new();
        let mut kv = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("algo", &self.algo);
        kv("seed", &self.seed);
        kv("total_steps", &self.total_steps);
        kv("updates_per_env_step", &self.updates_per_env_step);
        kv("eval_interval", &self.eval_interval);
        kv("eval_episodes", &self.eval_episodes);
        kv("log_interval", &self.log_interval);
        kv("return_window", &self.return_window);
        kv("buffer_capacity", &self.buffer_capacity);
        kv("batch_size", &self.batch_size);
        kv("hidden_layers", &self.hidden_layers);
        kv("hidden_width", &self.hidden_width);
        kv("activation", &self.activation);
        kv("adam_beta1", &self.adam_beta1);
        kv("adam_beta2", &self.adam_beta2);
        kv("actor_lr_start", &self.actor_lr_start);
        kv("actor_lr_end", &self.actor_lr_end);
        kv("critic_lr_start", &self.critic_lr_start);
        kv("critic_lr_end", &self.critic_lr_end);
        kv("alpha_lr_start", &self.alpha_lr_start);
        kv("alpha_lr_end", &self.alpha_lr_end);
        kv("gamma", &self.gamma);
        kv("tau", &self.tau);
        kv("target_entropy", &self.target_entropy);
        kv("clip_boundary", &self.clip_boundary);
        kv("lambda_a", &self.lambda_a);
        kv("lambda_u", &self.lambda_u);
        kv("alpha_init", &self.alpha_init);
        kv("sigma_min", &self.sigma_min);
        kv("env.dt", &e.dt);
        kv("env.protagonist_d0", &e.protagonist_d0);
        kv("env.protagonist_v0_min", &e.protagonist_v0.0);
        kv("env.protagonist_v0_max", &e.protagonist_v0.1);
        kv("env.adversary_d0_min", &e.adversary_d0.0);
        kv("env.adversary_d0_max", &e.adversary_d0.1);
        kv("env.adversary_v0_min", &e.adversary_v0.0);
        kv("env.adversary_v0_max", &e.adversary_v0.1);
        kv("env.protagonist_accel", &e.protagonist_accel);
        kv("env.adversary_accel", &e.adversary_accel);
        kv("env.v_max", &e.v_max);
        kv("env.conflict_half_length", &e.conflict_half_length);
        kv("env.conflict_point_1", &e.conflict_points[0]);
        kv("env.conflict_point_2", &e.conflict_points[1]);
        kv("env.pass_threshold", &e.pass_threshold);
        kv("env.max_episode_steps", &e.max_episode_steps);
        kv("env.distance_scale", &e.distance_scale);
        kv("env.speed_scale", &e.speed_scale);
        f.write_str(&s)
    }
}
