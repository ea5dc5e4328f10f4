//! Unsignalized four-way intersection with one protagonist and two adversarial vehicles.
//!
//! Each vehicle moves along a fixed path and is described by `(d, v)`: signed
//! distance to the intersection centre (positive while approaching) and speed.
//! The protagonist drives down to up, adversary 1 right to left, adversary 2
//! left to right. Adversary `k` crosses the protagonist path at conflict point
//! `k`; both conflict points sit at the centre by default.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

pub const OBS_DIM: usize = 6;
pub const ADVERSARY_DIM: usize = 2;

pub const REWARD_PASS: f64 = 110.0;
pub const REWARD_COLLISION: f64 = -110.0;
pub const REWARD_STEP: f64 = -1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub dt: f64,
    pub protagonist_d0: f64,
    pub protagonist_v0: (f64, f64),
    pub adversary_d0: (f64, f64),
    pub adversary_v0: (f64, f64),
    pub protagonist_accel: f64,
    pub adversary_accel: f64,
    pub v_max: f64,
    /// Half-length of each conflict zone.
    pub conflict_half_length: f64,
    /// Protagonist path coordinate of the conflict point with each adversary.
    pub conflict_points: [f64; 2],
    pub pass_threshold: f64,
    pub max_episode_steps: u32,
    pub distance_scale: f64,
    pub speed_scale: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            protagonist_d0: 25.0,
            protagonist_v0: (2.0, 8.0),
            adversary_d0: (20.0, 30.0),
            adversary_v0: (2.0, 8.0),
            protagonist_accel: 3.0,
            adversary_accel: 2.0,
            v_max: 12.0,
            conflict_half_length: 2.0,
            conflict_points: [0.0, 0.0],
            pass_threshold: -15.0,
            max_episode_steps: 200,
            distance_scale: 25.0,
            speed_scale: 10.0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("protagonist_accel", self.protagonist_accel),
            ("adversary_accel", self.adversary_accel),
            ("v_max", self.v_max),
            ("conflict_half_length", self.conflict_half_length),
            ("distance_scale", self.distance_scale),
            ("speed_scale", self.speed_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, (lo, hi)) in [
            ("protagonist_v0", self.protagonist_v0),
            ("adversary_d0", self.adversary_d0),
            ("adversary_v0", self.adversary_v0),
        ] {
            if !(lo <= hi) {
                return Err(Error::Config(format!("{name} range is empty: [{lo}, {hi}]")));
            }
        }
        if self.protagonist_v0.0 < 0.0 || self.protagonist_v0.1 > self.v_max {
            return Err(Error::Config("protagonist_v0 outside [0, v_max]".into()));
        }
        if self.adversary_v0.0 < 0.0 || self.adversary_v0.1 > self.v_max {
            return Err(Error::Config("adversary_v0 outside [0, v_max]".into()));
        }
        if self.max_episode_steps == 0 {
            return Err(Error::Config("max_episode_steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub d: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvState {
    pub protagonist: VehicleState,
    pub adversaries: [VehicleState; 2],
    pub step_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Running,
    Collision,
    Pass,
    TimeLimit,
}

impl OutcomeKind {
    /// True for collision and pass; time-limit truncation is not terminal.
    pub fn is_terminal(self) -> bool {
        matches!(self, OutcomeKind::Collision | OutcomeKind::Pass)
    }

    pub fn ends_episode(self) -> bool {
        self != OutcomeKind::Running
    }

    pub fn reward(self) -> f64 {
        match self {
            OutcomeKind::Collision => REWARD_COLLISION,
            OutcomeKind::Pass => REWARD_PASS,
            OutcomeKind::Running | OutcomeKind::TimeLimit => REWARD_STEP,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OutcomeKind::Running => "running",
            OutcomeKind::Collision => "collision",
            OutcomeKind::Pass => "pass",
            OutcomeKind::TimeLimit => "time_limit",
        }
    }
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutcomeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "running" => Ok(OutcomeKind::Running),
            "collision" => Ok(OutcomeKind::Collision),
            "pass" => Ok(OutcomeKind::Pass),
            "time_limit" => Ok(OutcomeKind::TimeLimit),
            other => Err(Error::Config(format!("unknown outcome `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    /// The episode is over (terminal or truncated).
    pub done: bool,
    pub kind: OutcomeKind,
    /// Number of acceleration components that had to be clamped into bounds.
    pub clamped: u8,
}

pub fn reset<R: Rng + ?Sized>(cfg: &EnvConfig, rng: &mut R) -> EnvState {
    let mut uniform = |(lo, hi): (f64, f64)| if lo == hi { lo } else { rng.random_range(lo..hi) };
    let protagonist = VehicleState {
        d: cfg.protagonist_d0,
        v: uniform(cfg.protagonist_v0),
    };
    let mut adversary = || VehicleState {
        d: uniform(cfg.adversary_d0),
        v: uniform(cfg.adversary_v0),
    };
    let adversaries = [adversary(), adversary()];
    EnvState {
        protagonist,
        adversaries,
        step_count: 0,
    }
}

fn advance(vehicle: VehicleState, accel: f64, cfg: &EnvConfig) -> VehicleState {
    let v = (vehicle.v + accel * cfg.dt).clamp(0.0, cfg.v_max);
    VehicleState {
        d: vehicle.d - v * cfg.dt,
        v,
    }
}

fn clamp_accel(a: f64, bound: f64, clamped: &mut u8) -> f64 {
    if a.is_nan() {
        *clamped += 1;
        return 0.0;
    }
    if a.abs() > bound {
        *clamped += 1;
    }
    a.clamp(-bound, bound)
}

/// Advances every vehicle by one `dt` with the given physical accelerations.
pub fn step(state: &EnvState, a_phys: f64, u_phys: [f64; 2], cfg: &EnvConfig) -> (EnvState, StepOutcome) {
    let mut clamped = 0;
    let a = clamp_accel(a_phys, cfg.protagonist_accel, &mut clamped);
    let u = [
        clamp_accel(u_phys[0], cfg.adversary_accel, &mut clamped),
        clamp_accel(u_phys[1], cfg.adversary_accel, &mut clamped),
    ];
    let next = EnvState {
        protagonist: advance(state.protagonist, a, cfg),
        adversaries: [
            advance(state.adversaries[0], u[0], cfg),
            advance(state.adversaries[1], u[1], cfg),
        ],
        step_count: state.step_count + 1,
    };
    let kind = check_termination(&next, cfg);
    (
        next,
        StepOutcome {
            reward: kind.reward(),
            done: kind.ends_episode(),
            kind,
            clamped,
        },
    )
}

/// Collision > Pass > TimeLimit > Running.
pub fn check_termination(state: &EnvState, cfg: &EnvConfig) -> OutcomeKind {
    let half = cfg.conflict_half_length;
    let dp = state.protagonist.d;
    let collision = state
        .adversaries
        .iter()
        .zip(cfg.conflict_points)
        .any(|(adv, p)| (dp - p).abs() < half && adv.d.abs() < half);
    if collision {
        OutcomeKind::Collision
    } else if dp < cfg.pass_threshold {
        OutcomeKind::Pass
    } else if state.step_count >= cfg.max_episode_steps {
        OutcomeKind::TimeLimit
    } else {
        OutcomeKind::Running
    }
}

pub fn observe(state: &EnvState, cfg: &EnvConfig) -> [f64; OBS_DIM] {
    let (ds, vs) = (cfg.distance_scale, cfg.speed_scale);
    let [a1, a2] = state.adversaries;
    [
        state.protagonist.d / ds,
        state.protagonist.v / vs,
        a1.d / ds,
        a1.v / vs,
        a2.d / ds,
        a2.v / vs,
    ]
}

/// Inverse of [`observe`]; the step counter is not part of the observation and comes back as 0.
pub fn unobserve(obs: &[f64; OBS_DIM], cfg: &EnvConfig) -> EnvState {
    let (ds, vs) = (cfg.distance_scale, cfg.speed_scale);
    let vehicle = |i: usize| VehicleState {
        d: obs[i] * ds,
        v: obs[i + 1] * vs,
    };
    EnvState {
        protagonist: vehicle(0),
        adversaries: [vehicle(2), vehicle(4)],
        step_count: 0,
    }
}

/// Scripted driving styles for the adversarial vehicles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdversaryMode {
    Aggressive,
    Conservative,
    Random,
    /// Uniform over the full adversary bound; drives the adversaries while training the baseline.
    TrainRandom,
}

impl AdversaryMode {
    pub const EVAL_MODES: [AdversaryMode; 3] = [
        AdversaryMode::Aggressive,
        AdversaryMode::Conservative,
        AdversaryMode::Random,
    ];

    /// Physical accelerations for both adversaries. `bound` is the adversary
    /// acceleration limit used by [`AdversaryMode::TrainRandom`].
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R, bound: f64) -> [f64; 2] {
        const POSITIVE: (f64, f64) = (1.0, 2.0);
        const NEGATIVE: (f64, f64) = (-2.0, -1.0);
        let mut draw = |(lo, hi): (f64, f64)| rng.random_range(lo..=hi);
        match self {
            AdversaryMode::Aggressive => [draw(POSITIVE), draw(POSITIVE)],
            AdversaryMode::Conservative => [draw(NEGATIVE), draw(NEGATIVE)],
            AdversaryMode::Random => [draw(NEGATIVE), draw(POSITIVE)],
            AdversaryMode::TrainRandom => [draw((-bound, bound)), draw((-bound, bound))],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AdversaryMode::Aggressive => "aggressive",
            AdversaryMode::Conservative => "conservative",
            AdversaryMode::Random => "random",
            AdversaryMode::TrainRandom => "train_random",
        }
    }
}

impl fmt::Display for AdversaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "aggressive" => Ok(AdversaryMode::Aggressive),
            "conservative" => Ok(AdversaryMode::Conservative),
            "random" => Ok(AdversaryMode::Random),
            "train_random" | "trainrandom" => Ok(AdversaryMode::TrainRandom),
            other => Err(Error::Config(format!("unknown adversary mode `{other}`"))),
        }
    }
}

/// A running simulator instance with a diagnostics counter for clamped actions.
#[derive(Debug, Clone)]
pub struct Intersection {
    pub cfg: EnvConfig,
    pub state: EnvState,
    pub clamped_actions: u64,
}

impl Intersection {
    pub fn new<R: Rng + ?Sized>(cfg: EnvConfig, rng: &mut R) -> Self {
        let state = reset(&cfg, rng);
        Self {
            cfg,
            state,
            clamped_actions: 0,
        }
    }

    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> [f64; OBS_DIM] {
        self.state = reset(&self.cfg, rng);
        self.observe()
    }

    pub fn observe(&self) -> [f64; OBS_DIM] {
        observe(&self.state, &self.cfg)
    }

    pub fn step(&mut self, a_phys: f64, u_phys: [f64; 2]) -> StepOutcome {
        let (next, outcome) = step(&self.state, a_phys, u_phys, &self.cfg);
        self.state = next;
        self.clamped_actions += u64::from(outcome.clamped);
        outcome
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn at(dp: f64, d1: f64, d2: f64) -> EnvState {
        let v = |d| VehicleState { d, v: 5.0 };
        EnvState {
            protagonist: v(dp),
            adversaries: [v(d1), v(d2)],
            step_count: 1,
        }
    }

    #[test]
    fn constant_speed_step() {
        let cfg = EnvConfig::default();
        let s = at(25.0, 30.0, 30.0);
        let (n, out) = step(&s, 0.0, [0.0, 0.0], &cfg);
        assert!((n.protagonist.d - 24.5).abs() < 1e-12);
        assert_eq!(n.protagonist.v, 5.0);
        assert_eq!(n.step_count, 2);
        assert_eq!(out.kind, OutcomeKind::Running);
        assert_eq!(out.reward, -1.0);
    }

    #[test]
    fn braking_never_reverses() {
        let cfg = EnvConfig::default();
        let mut s = at(10.0, 30.0, 30.0);
        s.protagonist.v = 0.0;
        let (n, _) = step(&s, -2.0, [0.0, 0.0], &cfg);
        assert_eq!(n.protagonist.v, 0.0);
        assert_eq!(n.protagonist.d, 10.0);
    }

    #[test]
    fn out_of_bound_acceleration_is_clamped_and_counted() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut env = Intersection::new(EnvConfig::default(), &mut rng);
        let v0 = env.state.protagonist.v;
        let out = env.step(10.0, [-5.0, 1.0]);
        assert_eq!(out.clamped, 2);
        assert_eq!(env.clamped_actions, 2);
        assert!((env.state.protagonist.v - (v0 + 0.3)).abs() < 1e-12);
    }

    #[test]
    fn termination_cases() {
        let cfg = EnvConfig::default();
        assert_eq!(check_termination(&at(0.5, 0.5, 30.0), &cfg), OutcomeKind::Collision);
        assert_eq!(check_termination(&at(0.5, 30.0, -1.9), &cfg), OutcomeKind::Collision);
        assert_eq!(check_termination(&at(-16.0, 30.0, 30.0), &cfg), OutcomeKind::Pass);
        assert_eq!(check_termination(&at(5.0, 0.0, 0.0), &cfg), OutcomeKind::Running);
        let mut s = at(5.0, 30.0, 30.0);
        s.step_count = cfg.max_episode_steps;
        assert_eq!(check_termination(&s, &cfg), OutcomeKind::TimeLimit);
        // collision outranks the time limit
        let mut s = at(0.0, 0.0, 30.0);
        s.step_count = cfg.max_episode_steps;
        assert_eq!(check_termination(&s, &cfg), OutcomeKind::Collision);
    }

    #[test]
    fn observe_scaling() {
        let cfg = EnvConfig::default();
        let mut s = at(25.0, 20.0, -5.0);
        s.protagonist.v = 5.0;
        let o = observe(&s, &cfg);
        assert_eq!(o[0], 1.0);
        assert_eq!(o[1], 0.5);
        assert_eq!(o[2], 0.8);
        assert_eq!(o[4], -0.2);
    }

    #[test]
    fn reset_is_seeded() {
        let cfg = EnvConfig::default();
        let a = reset(&cfg, &mut ChaCha8Rng::seed_from_u64(11));
        let b = reset(&cfg, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        assert_eq!(a.protagonist.d, 25.0);
        assert_eq!(a.step_count, 0);
    }

    #[test]
    fn scripted_modes_stay_in_their_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let [x, y] = AdversaryMode::Aggressive.sample(&mut rng, 2.0);
            assert!((1.0..=2.0).contains(&x) && (1.0..=2.0).contains(&y));
            let [x, y] = AdversaryMode::Conservative.sample(&mut rng, 2.0);
            assert!((-2.0..=-1.0).contains(&x) && (-2.0..=-1.0).contains(&y));
            let [x, y] = AdversaryMode::TrainRandom.sample(&mut rng, 2.0);
            assert!(x.abs() <= 2.0 && y.abs() <= 2.0);
        }
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [
            AdversaryMode::Aggressive,
            AdversaryMode::Conservative,
            AdversaryMode::Random,
            AdversaryMode::TrainRandom,
        ] {
            assert_eq!(m.name().parse::<AdversaryMode>().unwrap(), m);
        }
        assert!("sideways".parse::<AdversaryMode>().is_err());
    }

    #[test]
    fn default_config_is_valid() {
        EnvConfig::default().validate().unwrap();
        let bad = EnvConfig {
            dt: 0.0,
            ..EnvConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
