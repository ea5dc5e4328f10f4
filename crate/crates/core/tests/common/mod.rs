//! Independent oracles shared by the integration tests. Nothing here calls into
//! the library's numerical code; the formulas are re-derived from scratch.

#![allow(dead_code)]

use rand::Rng;

pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (SQRT_2_OVER_PI * (x + 0.044715 * x * x * x)).tanh())
}

/// Naive matrix-vector MLP over explicit per-layer weight matrices.
/// `layers[l] = (W as rows, b)`; hidden layers apply `act`, the last is linear.
pub fn mlp_oracle(layers: &[(Vec<Vec<f64>>, Vec<f64>)], input: &[f64], act: fn(f64) -> f64) -> Vec<f64> {
    let mut h = input.to_vec();
    for (l, (w, b)) in layers.iter().enumerate() {
        let mut next = Vec::with_capacity(w.len());
        for (row, bias) in w.iter().zip(b) {
            let mut s = *bias;
            for (wij, xj) in row.iter().zip(&h) {
                s += wij * xj;
            }
            next.push(s);
        }
        if l + 1 < layers.len() {
            next = next.into_iter().map(act).collect();
        }
        h = next;
    }
    h
}

/// Splits a flat parameter vector with layout "row-major W then b, per layer".
pub fn unflatten(dims: &[usize], flat: &[f64]) -> Vec<(Vec<Vec<f64>>, Vec<f64>)> {
    let mut out = Vec::new();
    let mut pos = 0;
    for pair in dims.windows(2) {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let mut w = Vec::with_capacity(fan_out);
        for _ in 0..fan_out {
            w.push(flat[pos..pos + fan_in].to_vec());
            pos += fan_in;
        }
        let b = flat[pos..pos + fan_out].to_vec();
        pos += fan_out;
        out.push((w, b));
    }
    assert_eq!(pos, flat.len(), "layout does not cover the parameter vector");
    out
}

pub fn softplus(x: f64) -> f64 {
    (1.0 + x.exp()).ln()
}

/// `||a - b|| / max(||a||, ||b||)`, or the absolute difference norm when both are tiny.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale < 1e-8 {
        norm(&diff)
    } else {
        norm(&diff) / scale
    }
}

/// Central finite differences of `f` around `x` with step `h`.
pub fn central_diff(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Textbook Adam, written independently of the library optimizer.
pub struct RefAdam {
    pub lr: f64,
    pub b1: f64,
    pub b2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl RefAdam {
    pub fn new(n: usize, lr: f64) -> Self {
        Self {
            lr,
            b1: 0.9,
            b2: 0.999,
            eps: 1e-8,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn update(&mut self, x: &mut [f64], g: &[f64]) {
        self.t += 1;
        for i in 0..x.len() {
            self.m[i] = self.b1 * self.m[i] + (1.0 - self.b1) * g[i];
            self.v[i] = self.b2 * self.v[i] + (1.0 - self.b2) * g[i] * g[i];
            let mh = self.m[i] / (1.0 - self.b1.powi(self.t));
            let vh = self.v[i] / (1.0 - self.b2.powi(self.t));
            x[i] -= self.lr * mh / (vh.sqrt() + self.eps);
        }
    }
}

/// Brute-force zone-overlap test for one grid point.
pub enum Verdict {
    Collision,
    Pass,
    Neither,
}

pub fn termination_oracle(dp: f64, da: [f64; 2], half: f64, conflict: [f64; 2], pass_at: f64) -> Verdict {
    // The protagonist occupies [dp - half, dp + half] around each conflict point
    // iff |dp - c| < half; an adversary occupies the zone iff |da| < half.
    for k in 0..2 {
        let p_in = dp > conflict[k] - half && dp < conflict[k] + half;
        let a_in = da[k] > -half && da[k] < half;
        if p_in && a_in {
            return Verdict::Collision;
        }
    }
    if dp < pass_at {
        Verdict::Pass
    } else {
        Verdict::Neither
    }
}

/// Pearson chi-square statistic of observed counts against a uniform expectation.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

pub fn uniform_vec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub mod gradcheck;
pub mod welch_cases;
