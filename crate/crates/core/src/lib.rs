//! Minimax distributional soft actor-critic on an unsignalized intersection.
//!
//! A protagonist vehicle learns to cross a four-way intersection while a
//! learned adversary drives two crossing vehicles. The critic models the
//! return as a Gaussian `N(Q, std^2)`; the protagonist maximizes
//! `Q - lambda_a * std` plus policy entropy, the adversary minimizes
//! `Q - lambda_u * std`. The `dsac` baseline drops the adversary and trains
//! against uniformly random scripted vehicles.
//!
//! Per-sample batch work runs on rayon with the `parallel` feature (default)
//! and sequentially without it; both produce bit-identical results.

pub mod checkpoint;
pub mod config;
pub mod critic;
pub mod env;
pub mod error;
pub mod eval;
pub mod exec;
pub mod nn;
pub mod policy;
pub mod replay;
pub mod report;
pub mod stats;
pub mod train;

pub use checkpoint::Checkpoint;
pub use config::{Algo, TrainConfig};
pub use critic::{Critic, CriticInput, GaussianReturn};
pub use env::{AdversaryMode, EnvConfig, EnvState, OutcomeKind};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalSummary};
pub use nn::{Activation, AdamState, Architecture, NetParams};
pub use policy::{Policy, TemperatureState};
pub use replay::{ReplayBuffer, Transition};
pub use train::{train, RunArtifacts, Trainer};
