//! One-level encoder-decoder with a skip connection.
//!
//! ```text
//! x (3) -> conv3x3 -> relu = e (8) --------------------------.
//!            avgpool2 -> conv3x3 -> relu (16) -> upsample2 -> concat (24)
//!                                          -> conv3x3 -> relu (8) -> conv1x1 (1) = logits
//! ```

use super::IrlError;
use crate::numerics::{
    avgpool2_backward, avgpool2_forward, concat_channels_backward, concat_channels_forward,
    conv2d_backward, conv2d_forward, relu_backward, relu_forward, softplus_inverse,
    upsample_nearest2_backward, upsample_nearest2_to, ConvLayer, Tensor,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

/// Architecture tag written into model files.
pub const ARCH_VERSION: u32 = 1;

/// `(out_ch, in_ch, kh, kw)` for each layer, in order.
pub const ARCHITECTURE: [[usize; 4]; 4] = [[8, 3, 3, 3], [16, 8, 3, 3], [8, 24, 3, 3], [1, 8, 1, 1]];

/// Smallest spatial side the network accepts.
pub const MIN_SIDE: usize = 8;

/// Scale applied to the He standard deviation of the output layer, keeping
/// the untrained cost map close to uniform.
pub const OUTPUT_INIT_GAIN: f64 = 0.1;

/// A differentiable map from terrain features to per-cell logits, with its
/// parameters exposed as one flat vector.
pub trait CostModel {
    type Cache;

    /// Logits of shape `(1, h, w)` plus whatever backward needs.
    fn logits(&self, feats: &Tensor) -> Result<(Tensor, Self::Cache), IrlError>;

    /// Gradient of the loss with respect to the flat parameters, given its
    /// gradient with respect to the logits.
    fn backward(&self, cache: &Self::Cache, grad_logits: &Tensor) -> Result<Vec<f64>, IrlError>;

    fn flat_params(&self) -> Vec<f64>;

    fn set_flat_params(&mut self, flat: &[f64]);
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub version: u32,
    pub layers: Vec<ConvLayer>,
}

/// Activations kept from the forward pass.
#[derive(Debug, Clone)]
pub struct UNetCache {
    input: Tensor,
    enc_pre: Tensor,
    enc: Tensor,
    pooled: Tensor,
    mid_pre: Tensor,
    mid: Tensor,
    merged: Tensor,
    dec_pre: Tensor,
    dec: Tensor,
}

impl UNetCache {
    /// Hash of every ReLU input's sign; equal fingerprints mean the network
    /// is the same linear map around both evaluations.
    pub fn relu_fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for t in [&self.enc_pre, &self.mid_pre, &self.dec_pre] {
            for chunk in t.data().chunks(64) {
                let mut bits = 0u64;
                for (k, v) in chunk.iter().enumerate() {
                    bits |= ((*v > 0.0) as u64) << k;
                }
                bits.hash(&mut h);
            }
        }
        h.finish()
    }
}

impl ModelParams {
    /// Validates layer shapes against [`ARCHITECTURE`].
    pub fn new(version: u32, layers: Vec<ConvLayer>) -> Result<Self, IrlError> {
        if version != ARCH_VERSION {
            return Err(IrlError::Architecture(format!(
                "version {version}, expected {ARCH_VERSION}"
            )));
        }
        if layers.len() != ARCHITECTURE.len() {
            return Err(IrlError::Architecture(format!(
                "{} layers, expected {}",
                layers.len(),
                ARCHITECTURE.len()
            )));
        }
        for (i, (layer, dims)) in layers.iter().zip(ARCHITECTURE).enumerate() {
            if layer.dims() != dims {
                return Err(IrlError::Architecture(format!(
                    "layer {i} has dims {:?}, expected {dims:?}",
                    layer.dims()
                )));
            }
        }
        Ok(Self { version, layers })
    }

    /// All weights and biases zero.
    pub fn zeros() -> Self {
        let layers = ARCHITECTURE
            .iter()
            .map(|[o, i, kh, kw]| ConvLayer::zeros(*o, *i, *kh, *kw).expect("odd kernels"))
            .collect();
        Self {
            version: ARCH_VERSION,
            layers,
        }
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(ConvLayer::param_count).sum()
    }

    pub fn forward(&self, feats: &Tensor) -> Result<(Tensor, UNetCache), IrlError> {
        let (c, h, w) = feats.shape();
        if c != ARCHITECTURE[0][1] {
            return Err(IrlError::Shape(format!(
                "features have {c} channels, expected {}",
                ARCHITECTURE[0][1]
            )));
        }
        if h < MIN_SIDE || w < MIN_SIDE {
            return Err(IrlError::Shape(format!(
                "features are {h}x{w}, need at least {MIN_SIDE}x{MIN_SIDE}"
            )));
        }
        let enc_pre = conv2d_forward(feats, &self.layers[0])?;
        let enc = relu_forward(&enc_pre);
        let pooled = avgpool2_forward(&enc);
        let mid_pre = conv2d_forward(&pooled, &self.layers[1])?;
        let mid = relu_forward(&mid_pre);
        let up = upsample_nearest2_to(&mid, h, w)?;
        let merged = concat_channels_forward(&up, &enc)?;
        let dec_pre = conv2d_forward(&merged, &self.layers[2])?;
        let dec = relu_forward(&dec_pre);
        let logits = conv2d_forward(&dec, &self.layers[3])?;
        let cache = UNetCache {
            input: feats.clone(),
            enc_pre,
            enc,
            pooled,
            mid_pre,
            mid,
            merged,
            dec_pre,
            dec,
        };
        Ok((logits, cache))
    }

    pub fn backward_pass(&self, cache: &UNetCache, grad_logits: &Tensor) -> Result<Vec<f64>, IrlError> {
        let out = conv2d_backward(&cache.dec, &self.layers[3], grad_logits)?;
        let g_dec_pre = relu_backward(&cache.dec_pre, &out.input)?;
        let dec = conv2d_backward(&cache.merged, &self.layers[2], &g_dec_pre)?;
        let up_channels = self.layers[1].out_ch();
        let (g_up, g_skip) = concat_channels_backward(up_channels, &dec.input)?;
        let g_mid = upsample_nearest2_backward(&cache.mid, &g_up)?;
        let g_mid_pre = relu_backward(&cache.mid_pre, &g_mid)?;
        let mid = conv2d_backward(&cache.pooled, &self.layers[1], &g_mid_pre)?;
        let mut g_enc = avgpool2_backward(&cache.enc, &mid.input)?;
        for (a, b) in g_enc.data_mut().iter_mut().zip(g_skip.data()) {
            *a += b;
        }
        let g_enc_pre = relu_backward(&cache.enc_pre, &g_enc)?;
        let enc = conv2d_backward(&cache.input, &self.layers[0], &g_enc_pre)?;

        let mut flat = Vec::with_capacity(self.param_count());
        for g in [enc, mid, dec, out] {
            flat.extend_from_slice(&g.weights);
            flat.extend_from_slice(&g.bias);
        }
        Ok(flat)
    }
}

impl CostModel for ModelParams {
    type Cache = UNetCache;

    fn logits(&self, feats: &Tensor) -> Result<(Tensor, UNetCache), IrlError> {
        self.forward(feats)
    }

    fn backward(&self, cache: &UNetCache, grad_logits: &Tensor) -> Result<Vec<f64>, IrlError> {
        self.backward_pass(cache, grad_logits)
    }

    fn flat_params(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            flat.extend_from_slice(&l.weights);
            flat.extend_from_slice(&l.bias);
        }
        flat
    }

    fn set_flat_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "flat parameter length");
        let mut rest = flat;
        for l in &mut self.layers {
            let (w, tail) = rest.split_at(l.weights.len());
            l.weights.copy_from_slice(w);
            let (b, tail) = tail.split_at(l.bias.len());
            l.bias.copy_from_slice(b);
            rest = tail;
        }
    }
}

/// He-normal weights from `ChaCha8Rng::seed_from_u64(seed)`, drawn layer by
/// layer in storage order. Biases are zero except the output bias, which is
/// `softplus^-1(1)` so the untrained cost map sits near 1.
pub fn init_params(seed: u64) -> ModelParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::zeros();
    let last = params.layers.len() - 1;
    for (i, layer) in params.layers.iter_mut().enumerate() {
        let [_, in_ch, kh, kw] = layer.dims();
        let mut std = (2.0 / (in_ch * kh * kw) as f64).sqrt();
        if i == last {
            std *= OUTPUT_INIT_GAIN;
        }
        let normal = Normal::new(0.0, std).expect("finite std");
        for w in &mut layer.weights {
            *w = normal.sample(&mut rng);
        }
    }
    params.layers[last].bias[0] = softplus_inverse(1.0);
    params
}
