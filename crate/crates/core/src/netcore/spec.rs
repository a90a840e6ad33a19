use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::NetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    Relu,
    Sigmoid,
    Tanh,
}

fn default_kernel() -> usize {
    3
}

fn default_stride() -> usize {
    1
}

fn default_padding() -> usize {
    1
}

/// One layer of a sequential network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerSpec {
    /// Square convolution over a `(C, H, W)` map.
    Conv {
        out_channels: usize,
        #[serde(default = "default_kernel")]
        kernel: usize,
        #[serde(default = "default_stride")]
        stride: usize,
        #[serde(default = "default_padding")]
        padding: usize,
    },
    /// 2x2 max pooling with stride 2 (odd trailing rows/columns are dropped).
    MaxPool,
    /// Spatial pyramid max pooling to a fixed-length vector.
    Spp { levels: Vec<usize> },
    /// Fully connected layer on a vector, or row-wise on a sequence.
    Dense { out: usize },
    Activation { kind: ActivationKind },
    /// Stacked bidirectional LSTM over a `(T, F)` sequence; output `(T, 2*hidden)`.
    BiLstm { hidden: usize, num_layers: usize },
    /// Max over the height of a `(C, H, W)` map, giving the sequence `(W, C)`.
    CollapseHeight,
    /// Softmax over the last dimension.
    Softmax,
}

/// A sequential network: input shape plus layers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub input: Vec<usize>,
    pub layers: Vec<LayerSpec>,
}

impl NetSpec {
    pub fn new(input: &[usize], layers: Vec<LayerSpec>) -> Self {
        Self {
            input: input.to_vec(),
            layers,
        }
    }

    /// Chain-check the layers and return every intermediate shape:
    /// `shapes[0]` is the input and `shapes[i + 1]` the output of layer `i`.
    pub fn shapes(&self) -> Result<Vec<Vec<usize>>, NetError> {
        if self.input.is_empty() || self.input.len() > 4 || self.input.contains(&0) {
            return Err(NetError::ShapeMismatch {
                layer: 0,
                reason: format!("invalid input shape {:?}", self.input),
            });
        }
        let mut shapes = vec![self.input.clone()];
        for (i, layer) in self.layers.iter().enumerate() {
            let next = output_shape(i, layer, shapes.last().expect("non-empty"))?;
            shapes.push(next);
        }
        Ok(shapes)
    }

    pub fn output_shape(&self) -> Result<Vec<usize>, NetError> {
        Ok(self.shapes()?.pop().expect("non-empty"))
    }
}

fn mismatch(layer: usize, reason: alloc::string::String) -> NetError {
    NetError::ShapeMismatch { layer, reason }
}

fn output_shape(i: usize, layer: &LayerSpec, shape: &[usize]) -> Result<Vec<usize>, NetError> {
    let need_map = || -> Result<(usize, usize, usize), NetError> {
        match *shape {
            [c, h, w] => Ok((c, h, w)),
            _ => Err(mismatch(i, format!("{layer:?} needs a (C, H, W) input, got {shape:?}"))),
        }
    };
    let invalid = |reason: &str| NetError::InvalidSpec {
        layer: i,
        reason: reason.into(),
    };
    match layer {
        LayerSpec::Conv {
            out_channels,
            kernel,
            stride,
            padding,
        } => {
            let (_, h, w) = need_map()?;
            if *out_channels == 0 || *kernel == 0 || *stride == 0 {
                return Err(invalid("conv sizes must be positive"));
            }
            let span_h = h + 2 * padding;
            let span_w = w + 2 * padding;
            if span_h < *kernel || span_w < *kernel {
                return Err(mismatch(i, format!("{h}x{w} input is smaller than kernel {kernel}")));
            }
            Ok(vec![
                *out_channels,
                (span_h - kernel) / stride + 1,
                (span_w - kernel) / stride + 1,
            ])
        }
        LayerSpec::MaxPool => {
            let (c, h, w) = need_map()?;
            if h < 2 || w < 2 {
                return Err(mismatch(i, format!("{h}x{w} input is too small to pool")));
            }
            Ok(vec![c, h / 2, w / 2])
        }
        LayerSpec::Spp { levels } => {
            let (c, h, w) = need_map()?;
            if levels.is_empty() || levels.contains(&0) {
                return Err(invalid("SPP levels must be non-empty and positive"));
            }
            let max = *levels.iter().max().expect("non-empty");
            if h < max || w < max {
                return Err(NetError::TooSmall {
                    height: h,
                    width: w,
                    level: max,
                });
            }
            Ok(vec![c * levels.iter().map(|l| l * l).sum::<usize>()])
        }
        LayerSpec::Dense { out } => {
            if *out == 0 {
                return Err(invalid("dense width must be positive"));
            }
            match *shape {
                [_] => Ok(vec![*out]),
                [t, _] => Ok(vec![t, *out]),
                _ => Err(mismatch(i, format!("dense needs a vector or sequence, got {shape:?}"))),
            }
        }
        LayerSpec::Activation { .. } => Ok(shape.to_vec()),
        LayerSpec::Softmax => match shape.len() {
            1 | 2 => Ok(shape.to_vec()),
            _ => Err(mismatch(i, format!("softmax needs a vector or sequence, got {shape:?}"))),
        },
        LayerSpec::BiLstm { hidden, num_layers } => {
            if *hidden == 0 || *num_layers == 0 {
                return Err(invalid("LSTM sizes must be positive"));
            }
            match *shape {
                [t, _] => Ok(vec![t, 2 * hidden]),
                _ => Err(mismatch(i, format!("BiLSTM needs a (T, F) sequence, got {shape:?}"))),
            }
        }
        LayerSpec::CollapseHeight => {
            let (c, _, w) = need_map()?;
            Ok(vec![w, c])
        }
    }
}
