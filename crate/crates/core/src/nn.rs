//! Fixed-topology feed-forward networks with hand-written reverse-mode gradients.
//!
//! Every learned function in the crate (critic, protagonist, adversary and the
//! target copies) is an [`NetParams`]: an immutable [`Architecture`] plus one
//! flat `f64` parameter vector. Layers are stored back to back, each as a
//! row-major `out x in` weight block followed by `out` biases. Hidden layers
//! apply the activation, the output layer is linear.
//!
//! The GELU used for hidden layers is the tanh approximation
//!
//! ```text
//! gelu(x)  = 0.5 x (1 + tanh(k (x + c x^3))),   k = sqrt(2/pi), c = 0.044715
//! gelu'(x) = 0.5 (1 + t) + 0.5 x (1 - t^2) k (1 + 3 c x^2),   t = tanh(k (x + c x^3))
//! ```

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{check_dim, check_finite, Error, Result};

const GELU_K: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
const GELU_C: f64 = 0.044_715;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Gelu,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Gelu => {
                let t = (GELU_K * (x + GELU_C * x * x * x)).tanh();
                0.5 * x * (1.0 + t)
            }
            Activation::Identity => x,
        }
    }

    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Gelu => {
                let t = (GELU_K * (x + GELU_C * x * x * x)).tanh();
                0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * GELU_K * (1.0 + 3.0 * GELU_C * x * x)
            }
            Activation::Identity => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Gelu => "gelu",
            Activation::Identity => "identity",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gelu" => Ok(Activation::Gelu),
            "identity" => Ok(Activation::Identity),
            other => Err(Error::Config(format!("unknown activation `{other}`"))),
        }
    }
}

/// Shape of an MLP: input width, hidden widths, output width and the hidden activation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub input: usize,
    pub hidden: Vec<usize>,
    pub output: usize,
    pub activation: Activation,
}

impl Architecture {
    pub fn new(input: usize, hidden: Vec<usize>, output: usize, activation: Activation) -> Self {
        Self {
            input,
            hidden,
            output,
            activation,
        }
    }

    /// `(fan_in, fan_out)` for every layer, output layer last.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut widths = Vec::with_capacity(self.hidden.len() + 2);
        widths.push(self.input);
        widths.extend_from_slice(&self.hidden);
        widths.push(self.output);
        widths.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn param_count(&self) -> usize {
        self.layer_dims().iter().map(|&(i, o)| i * o + o).sum()
    }

    pub fn num_layers(&self) -> usize {
        self.hidden.len() + 1
    }
}

/// Parameters of one network. The architecture cannot change after construction;
/// only the values are mutable.
#[derive(Debug, Clone, PartialEq)]
pub struct NetParams {
    arch: Architecture,
    layers: Vec<LayerSpan>,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LayerSpan {
    fan_in: usize,
    fan_out: usize,
    offset: usize,
}

impl LayerSpan {
    fn weights(self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.fan_in * self.fan_out
    }

    fn biases(self) -> std::ops::Range<usize> {
        let start = self.offset + self.fan_in * self.fan_out;
        start..start + self.fan_out
    }
}

fn spans(arch: &Architecture) -> Vec<LayerSpan> {
    let mut offset = 0;
    arch.layer_dims()
        .into_iter()
        .map(|(fan_in, fan_out)| {
            let span = LayerSpan {
                fan_in,
                fan_out,
                offset,
            };
            offset += fan_in * fan_out + fan_out;
            span
        })
        .collect()
}

/// Cached activations of one forward pass, consumed by [`NetParams::backward`].
#[derive(Debug, Clone)]
pub struct Trace {
    /// `acts[0]` is the input, `acts[l + 1]` the output of layer `l`.
    acts: Vec<Vec<f64>>,
    /// Pre-activation values of the hidden layers.
    pre: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("trace always holds the input")
    }

    pub fn input(&self) -> &[f64] {
        &self.acts[0]
    }
}

impl NetParams {
    pub fn zeros(arch: Architecture) -> Self {
        let n = arch.param_count();
        Self::from_parts(arch, vec![0.0; n])
    }

    /// Uniform fan-in initialisation: every weight and bias of a layer is drawn
    /// from `U(-1/sqrt(fan_in), 1/sqrt(fan_in))`.
    pub fn init_uniform<R: Rng + ?Sized>(arch: Architecture, rng: &mut R) -> Self {
        let mut net = Self::zeros(arch);
        for span in net.layers.clone() {
            let bound = 1.0 / (span.fan_in.max(1) as f64).sqrt();
            for v in &mut net.values[span.offset..span.biases().end] {
                *v = rng.random_range(-bound..=bound);
            }
        }
        net
    }

    pub fn from_vec(arch: Architecture, values: Vec<f64>) -> Result<Self> {
        check_dim("parameter vector", arch.param_count(), values.len())?;
        Ok(Self::from_parts(arch, values))
    }

    fn from_parts(arch: Architecture, values: Vec<f64>) -> Self {
        let layers = spans(&arch);
        Self {
            arch,
            layers,
            values,
        }
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Weight block (row-major `fan_out x fan_in`) and bias vector of `layer`.
    pub fn layer(&self, layer: usize) -> (&[f64], &[f64]) {
        let span = self.layers[layer];
        (&self.values[span.weights()], &self.values[span.biases()])
    }

    pub fn layer_mut(&mut self, layer: usize) -> (&mut [f64], &mut [f64]) {
        let span = self.layers[layer];
        let (w, b) = self.values[span.offset..span.biases().end].split_at_mut(span.fan_in * span.fan_out);
        (w, b)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        check_dim("network input", self.arch.input, input.len())?;
        let mut x = input.to_vec();
        let last = self.layers.len() - 1;
        for (l, span) in self.layers.iter().enumerate() {
            let mut z = self.affine(*span, &x);
            if l != last {
                let act = self.arch.activation;
                z.iter_mut().for_each(|v| *v = act.apply(*v));
            }
            x = z;
        }
        Ok(x)
    }

    /// Forward pass that keeps what the backward pass needs.
    pub fn forward_trace(&self, input: &[f64]) -> Result<Trace> {
        check_dim("network input", self.arch.input, input.len())?;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        let mut pre = Vec::with_capacity(self.layers.len() - 1);
        acts.push(input.to_vec());
        let last = self.layers.len() - 1;
        for (l, span) in self.layers.iter().enumerate() {
            let z = self.affine(*span, &acts[l]);
            if l == last {
                acts.push(z);
            } else {
                let act = self.arch.activation;
                acts.push(z.iter().map(|&v| act.apply(v)).collect());
                pre.push(z);
            }
        }
        Ok(Trace { acts, pre })
    }

    #[inline]
    fn affine(&self, span: LayerSpan, x: &[f64]) -> Vec<f64> {
        let w = &self.values[span.weights()];
        let b = &self.values[span.biases()];
        w.chunks_exact(span.fan_in)
            .zip(b)
            .map(|(row, bias)| bias + dot(row, x))
            .collect()
    }

    /// Reverse-mode pass for the scalar `<output, output_grad>`.
    ///
    /// Parameter gradients are *accumulated* into `param_grads` when given;
    /// the input gradient is returned.
    pub fn backward(
        &self,
        trace: &Trace,
        output_grad: &[f64],
        mut param_grads: Option<&mut [f64]>,
    ) -> Result<Vec<f64>> {
        check_dim("output gradient", self.arch.output, output_grad.len())?;
        if let Some(g) = param_grads.as_deref() {
            check_dim("parameter gradient buffer", self.values.len(), g.len())?;
        }
        let mut delta = output_grad.to_vec();
        for (l, span) in self.layers.iter().enumerate().rev() {
            let x = &trace.acts[l];
            if let Some(g) = param_grads.as_deref_mut() {
                let (gw, gb) = g[span.offset..span.biases().end].split_at_mut(span.fan_in * span.fan_out);
                for ((row, gb), &d) in gw.chunks_exact_mut(span.fan_in).zip(gb.iter_mut()).zip(&delta) {
                    *gb += d;
                    if d != 0.0 {
                        row.iter_mut().zip(x).for_each(|(g, &xi)| *g += d * xi);
                    }
                }
            }
            let w = &self.values[span.weights()];
            let mut next = vec![0.0; span.fan_in];
            for (row, &d) in w.chunks_exact(span.fan_in).zip(&delta) {
                if d != 0.0 {
                    next.iter_mut().zip(row).for_each(|(n, &wij)| *n += d * wij);
                }
            }
            if l > 0 {
                let act = self.arch.activation;
                next.iter_mut()
                    .zip(&trace.pre[l - 1])
                    .for_each(|(n, &z)| *n *= act.derivative(z));
            }
            delta = next;
        }
        Ok(delta)
    }

    /// Convenience form returning fresh `(param_grads, input_grads)`.
    pub fn gradients(&self, input: &[f64], output_grad: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let trace = self.forward_trace(input)?;
        let mut pg = vec![0.0; self.values.len()];
        let ig = self.backward(&trace, output_grad, Some(&mut pg))?;
        Ok((pg, ig))
    }

    /// Elementwise `self <- tau * online + (1 - tau) * self`.
    pub fn soft_update_from(&mut self, online: &NetParams, tau: f64) -> Result<()> {
        if self.arch != online.arch {
            return Err(Error::Architecture(
                "soft update between networks of different shape".into(),
            ));
        }
        self.values
            .iter_mut()
            .zip(&online.values)
            .for_each(|(t, &o)| *t = tau * o + (1.0 - tau) * *t);
        Ok(())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the compiler vectorise without reassociating.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = 4 * i;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for j in 4 * chunks..a.len() {
        s += a[j] * b[j];
    }
    s
}

/// Adam moment estimates for one parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(len: usize, beta1: f64, beta2: f64) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            beta1,
            beta2,
            eps: 1e-8,
        }
    }

    /// One bias-corrected Adam step. Rejects the step, leaving both state and
    /// parameters untouched, if any gradient component is non-finite.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) -> Result<()> {
        check_dim("adam parameters", self.m.len(), params.len())?;
        check_dim("adam gradients", self.m.len(), grads.len())?;
        check_finite("adam gradients", grads)?;
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powf(self.t as f64);
        let bc2 = 1.0 - self.beta2.powf(self.t as f64);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}
