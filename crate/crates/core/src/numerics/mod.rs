//! Minimal `(channels, height, width)` tensor kernel.
//!
//! Every layer is a pair of free functions, `*_forward` and `*_backward`,
//! with the backward pass written out by hand. All arithmetic is `f64` and
//! loops run in a fixed order, so results are bit-reproducible.

mod adam;
mod conv;
mod gradcheck;
mod layers;

use thiserror::Error;

pub use adam::{adam_step, AdamConfig, OptimizerState};
pub use conv::{conv2d_backward, conv2d_forward, ConvGrads, ConvLayer};
pub use gradcheck::{grad_check, relative_error, GradCheckReport, Probe, DENOM_FLOOR, FD_STEP};
pub use layers::{
    avgpool2_backward, avgpool2_forward, concat_channels_backward, concat_channels_forward,
    relu_backward, relu_forward, softplus, softplus_backward, softplus_forward, softplus_inverse,
    upsample_nearest2_backward, upsample_nearest2_forward, upsample_nearest2_to,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("shape error: {0}")]
    Shape(String),
}

pub(crate) fn shape_err<T>(msg: impl Into<String>) -> Result<T, NumericsError> {
    Err(NumericsError::Shape(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self, NumericsError> {
        if data.len() != channels * height * width {
            return shape_err(format!(
                "data length {} does not match shape ({channels}, {height}, {width})",
                data.len()
            ));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self::filled(channels, height, width, 0.0)
    }

    pub fn filled(channels: usize, height: usize, width: usize, value: f64) -> Self {
        Self {
            channels,
            height,
            width,
            data: vec![value; channels * height * width],
        }
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn plane(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let p = self.plane();
        &self.data[c * p..(c + 1) * p]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        let p = self.plane();
        &mut self.data[c * p..(c + 1) * p]
    }

    pub fn at(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        Tensor {
            channels: self.channels,
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn same_shape(&self, other: &Tensor) -> bool {
        self.shape() == other.shape()
    }

    /// Inner product with another tensor of the same shape.
    pub fn dot(&self, other: &Tensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }
}
