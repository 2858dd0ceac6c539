use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::dot;
use super::Targets;
use crate::error::bail;
use crate::sim::shuffle;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        }
    }

    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => libm::tanh(z),
        }
    }

    /// Derivative expressed through the activation output `a`.
    fn derivative(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct MlpConfig {
    pub hidden_layers: Vec<usize>,
    pub activation: Activation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_layers: vec![128, 64],
            activation: Activation::Relu,
            learning_rate: 0.01,
            epochs: 40,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl MlpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_layers.is_empty() || self.hidden_layers.contains(&0) {
            bail!(Config, "the network needs at least one hidden layer, all of positive width");
        }
        if self.epochs == 0 || self.batch_size == 0 {
            bail!(Config, "epochs and batch size must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            bail!(Config, "learning rate {} must be positive", self.learning_rate);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MlpTarget {
    Class(usize),
    Value(f64),
}

/// Fully connected network. Hidden layers use `activation`; the output layer
/// is linear and, for classification, read through a softmax with
/// cross-entropy loss. Regression uses the loss `(y - t)^2 / 2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub activation: Activation,
    pub classification: bool,
    /// Per layer, `out x in` row-major.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Mlp {
    /// Glorot-uniform weights (He-scaled for ReLU), zero biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], activation: Activation, classification: bool, rng: &mut R) -> Self {
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0] as f64, w[1] as f64);
            let limit = match activation {
                Activation::Relu => libm::sqrt(6.0 / fan_in),
                Activation::Tanh => libm::sqrt(6.0 / (fan_in + fan_out)),
            };
            weights.push((0..w[0] * w[1]).map(|_| rng.random_range(-limit..limit)).collect());
            biases.push(vec![0.0; w[1]]);
        }
        Self { sizes: sizes.to_vec(), activation, classification, weights, biases }
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().chain(&self.biases).map(Vec::len).sum()
    }

    /// Parameters flattened as all weight matrices followed by all biases.
    pub fn params(&self) -> Vec<f64> {
        self.weights.iter().chain(&self.biases).flatten().copied().collect()
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let mut it = p.iter().copied();
        for layer in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            layer.iter_mut().for_each(|v| *v = it.next().expect("parameter count"));
        }
    }

    /// Layer outputs, input first, final entry the raw output layer.
    fn forward_all(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let last = self.weights.len() - 1;
        let mut acts = vec![x.to_vec()];
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let input = &acts[l];
            let n_in = input.len();
            let z: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(o, bo)| {
                    let s = dot(&w[o * n_in..(o + 1) * n_in], input) + bo;
                    if l < last {
                        self.activation.apply(s)
                    } else {
                        s
                    }
                })
                .collect();
            acts.push(z);
        }
        acts
    }

    /// Output layer before any softmax.
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_all(x).pop().expect("at least one layer")
    }

    /// Adds the gradient of one sample's loss into `gw`/`gb` and returns the loss.
    fn accumulate(&self, x: &[f64], target: MlpTarget, gw: &mut [Vec<f64>], gb: &mut [Vec<f64>]) -> f64 {
        let acts = self.forward_all(x);
        let out = acts.last().expect("output");
        let (loss, mut delta) = match target {
            MlpTarget::Class(c) => {
                let m = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = out.iter().map(|v| libm::exp(v - m)).collect();
                let z: f64 = exps.iter().sum();
                let delta: Vec<f64> =
                    exps.iter().enumerate().map(|(i, e)| e / z - if i == c { 1.0 } else { 0.0 }).collect();
                (libm::log(z) + m - out[c], delta)
            }
            MlpTarget::Value(t) => {
                let e = out[0] - t;
                (0.5 * e * e, vec![e])
            }
        };
        for l in (0..self.weights.len()).rev() {
            let input = &acts[l];
            let n_in = input.len();
            for (o, d) in delta.iter().enumerate() {
                gb[l][o] += d;
                for (g, a) in gw[l][o * n_in..(o + 1) * n_in].iter_mut().zip(input) {
                    *g += d * a;
                }
            }
            if l > 0 {
                let w = &self.weights[l];
                delta = (0..n_in)
                    .map(|i| {
                        let back: f64 = delta.iter().enumerate().map(|(o, d)| w[o * n_in + i] * d).sum();
                        back * self.activation.derivative(input[i])
                    })
                    .collect();
            }
        }
        loss
    }

    fn zero_grads(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        (
            self.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        )
    }

    /// Mean loss over the rows of `x` and its gradient in [`Mlp::params`] order.
    pub fn loss_gradient(&self, x: &[f64], targets: &[MlpTarget]) -> (f64, Vec<f64>) {
        let d = self.sizes[0];
        let (mut gw, mut gb) = self.zero_grads();
        let mut loss = 0.0;
        for (row, &t) in x.chunks_exact(d).zip(targets) {
            loss += self.accumulate(row, t, &mut gw, &mut gb);
        }
        let n = targets.len() as f64;
        let grad = gw.iter().chain(&gb).flatten().map(|g| g / n).collect();
        (loss / n, grad)
    }

    pub fn loss(&self, x: &[f64], targets: &[MlpTarget]) -> f64 {
        self.loss_gradient(x, targets).0
    }
}

/// A trained network plus the target scaling used for regression.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MlpModel {
    pub net: Mlp,
    pub target_mean: f64,
    pub target_scale: f64,
}

impl MlpModel {
    /// Mini-batch gradient descent. Regression targets are standardized
    /// internally and mapped back at prediction time.
    pub(crate) fn fit(cfg: &MlpConfig, x: &[f64], d: usize, targets: &Targets, n_classes: usize) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (classification, n_out) = match targets {
            Targets::Classes(_) => (true, n_classes),
            Targets::Values(_) => (false, 1),
        };
        let (mut target_mean, mut target_scale) = (0.0, 1.0);
        let t: Vec<MlpTarget> = match targets {
            Targets::Classes(c) => c.iter().map(|&c| MlpTarget::Class(c)).collect(),
            Targets::Values(v) => {
                let n = v.len() as f64;
                target_mean = v.iter().sum::<f64>() / n;
                let var = v.iter().map(|y| (y - target_mean) * (y - target_mean)).sum::<f64>() / n;
                target_scale = if var > 0.0 { libm::sqrt(var) } else { 1.0 };
                v.iter().map(|y| MlpTarget::Value((y - target_mean) / target_scale)).collect()
            }
        };
        let mut sizes = vec![d];
        sizes.extend_from_slice(&cfg.hidden_layers);
        sizes.push(n_out);
        let mut net = Mlp::new(&sizes, cfg.activation, classification, &mut rng);
        let mut order: Vec<usize> = (0..t.len()).collect();
        for epoch in 0..cfg.epochs {
            shuffle(&mut order, &mut rng);
            for batch in order.chunks(cfg.batch_size) {
                let (mut gw, mut gb) = net.zero_grads();
                let mut loss = 0.0;
                for &i in batch {
                    loss += net.accumulate(&x[i * d..(i + 1) * d], t[i], &mut gw, &mut gb);
                }
                if !loss.is_finite() {
                    bail!(Validation, "network training diverged in epoch {epoch}; lower the learning rate");
                }
                let step = cfg.learning_rate / batch.len() as f64;
                for (layer, g) in net.weights.iter_mut().chain(net.biases.iter_mut()).zip(gw.iter().chain(&gb)) {
                    for (p, gi) in layer.iter_mut().zip(g) {
                        *p -= step * gi;
                    }
                }
            }
        }
        Ok(Self { net, target_mean, target_scale })
    }

    pub fn decision_values(&self, z: &[f64]) -> Vec<f64> {
        let out = self.net.forward(z);
        if self.net.classification {
            out
        } else {
            vec![out[0] * self.target_scale + self.target_mean]
        }
    }
}
