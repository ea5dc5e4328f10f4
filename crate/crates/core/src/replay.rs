use std::collections::VecDeque;

use rand::Rng;

use crate::env::{ADVERSARY_DIM, OBS_DIM};
use crate::error::{Error, Result};

/// One environment interaction. Actions are stored normalized to `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub obs: [f64; OBS_DIM],
    pub action: [f64; 1],
    pub adversary_action: [f64; ADVERSARY_DIM],
    pub reward: f64,
    pub next_obs: [f64; OBS_DIM],
    /// The episode terminated at `next_obs` by collision or pass. Time-limit
    /// truncation stores `false`.
    pub done: bool,
}

/// Fixed-capacity FIFO of transitions, sampled uniformly with replacement.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    items: VecDeque<Transition>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        Ok(Self {
            items: VecDeque::with_capacity(capacity),
            capacity,
        })
    }

    pub fn push(&mut self, t: Transition) {
        if self.items.len() == self.capacity {
            self.items.pop_front();
        }
        self.items.push_back(t);
    }

    pub fn sample_batch<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<Transition>> {
        if n == 0 || self.items.len() < n {
            return Err(Error::WarmUp {
                size: self.items.len(),
                requested: n,
            });
        }
        let len = self.items.len();
        Ok((0..n).map(|_| self.items[rng.random_range(0..len)]).collect())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Retained transitions, oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }
}
