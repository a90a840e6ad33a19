use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::layers::conv::ConvGeom;
use super::layers::lstm::{self, LstmCache};
use super::layers::{act, dense, pool};
use super::{LayerSpec, NetError, NetSpec, Param, Real, Tensor};

#[derive(Clone, Debug)]
enum Cache<R> {
    None,
    Indices(Vec<usize>),
    Lstm(LstmCache<R>),
}

/// Every intermediate output of one forward pass plus the state backward needs.
#[derive(Clone, Debug)]
pub struct Activations<R> {
    outputs: Vec<Tensor<R>>,
    caches: Vec<Cache<R>>,
    version: u64,
}

impl<R: Real> Activations<R> {
    pub fn output(&self) -> &Tensor<R> {
        self.outputs.last().expect("input is always retained")
    }

    /// `outputs()[0]` is the input, `outputs()[i + 1]` the output of layer `i`.
    pub fn outputs(&self) -> &[Tensor<R>] {
        &self.outputs
    }
}

/// A sequential network with its parameters and gradient buffers.
#[derive(Clone, Debug)]
pub struct Net<R> {
    spec: NetSpec,
    shapes: Vec<Vec<usize>>,
    params: Vec<Param<R>>,
    slots: Vec<Range<usize>>,
    version: u64,
}

fn map3(shape: &[usize]) -> (usize, usize, usize) {
    (shape[0], shape[1], shape[2])
}

fn rows_cols(shape: &[usize]) -> (usize, usize) {
    match *shape {
        [n] => (1, n),
        [t, n] => (t, n),
        _ => unreachable!("chain check admits only vectors and sequences here"),
    }
}

fn conv_geom(spec: &LayerSpec, inp: &[usize], out: &[usize]) -> ConvGeom {
    let LayerSpec::Conv {
        kernel,
        stride,
        padding,
        ..
    } = *spec
    else {
        unreachable!()
    };
    ConvGeom {
        in_c: inp[0],
        in_h: inp[1],
        in_w: inp[2],
        out_c: out[0],
        out_h: out[1],
        out_w: out[2],
        kernel,
        stride,
        padding,
    }
}

impl<R: Real> Net<R> {
    /// Builds the network, initializing every parameter from `(seed, name)`.
    /// Parameter names are `{prefix}.{layer}.{tensor}`.
    pub fn new(spec: NetSpec, prefix: &str, seed: u64) -> Result<Self, NetError> {
        let shapes = spec.shapes()?;
        let mut params = Vec::new();
        let mut slots = Vec::with_capacity(spec.layers.len());
        for (i, layer) in spec.layers.iter().enumerate() {
            let start = params.len();
            let inp = &shapes[i];
            let name = |t: &str| -> String { format!("{prefix}.{i}.{t}") };
            match *layer {
                LayerSpec::Conv {
                    out_channels, kernel, ..
                } => {
                    let fan_in = inp[0] * kernel * kernel;
                    let fan_out = out_channels * kernel * kernel;
                    params.push(Param::glorot(
                        name("weight"),
                        &[out_channels, inp[0], kernel, kernel],
                        fan_in,
                        fan_out,
                        seed,
                    ));
                    params.push(Param::zeros(name("bias"), &[out_channels]));
                }
                LayerSpec::Dense { out: width } => {
                    let fan_in = *inp.last().expect("non-empty");
                    params.push(Param::glorot(name("weight"), &[width, fan_in], fan_in, width, seed));
                    params.push(Param::zeros(name("bias"), &[width]));
                }
                LayerSpec::BiLstm { hidden, num_layers } => {
                    let mut feat = inp[1];
                    for l in 0..num_layers {
                        for dir in ["fwd", "bwd"] {
                            let base = format!("l{l}.{dir}");
                            params.push(Param::glorot(
                                name(&format!("{base}.wx")),
                                &[4 * hidden, feat],
                                feat,
                                4 * hidden,
                                seed,
                            ));
                            params.push(Param::glorot(
                                name(&format!("{base}.wh")),
                                &[4 * hidden, hidden],
                                hidden,
                                4 * hidden,
                                seed,
                            ));
                            let mut b = Param::zeros(name(&format!("{base}.b")), &[4 * hidden]);
                            b.value[hidden..2 * hidden].fill(R::one());
                            params.push(b);
                        }
                        feat = 2 * hidden;
                    }
                }
                _ => {}
            }
            slots.push(start..params.len());
        }
        Ok(Self {
            spec,
            shapes,
            params,
            slots,
            version: 0,
        })
    }

    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn input_shape(&self) -> &[usize] {
        &self.shapes[0]
    }

    pub fn output_shape(&self) -> &[usize] {
        self.shapes.last().expect("non-empty")
    }

    pub fn shapes(&self) -> &[Vec<usize>] {
        &self.shapes
    }

    pub fn params(&self) -> &[Param<R>] {
        &self.params
    }

    /// Mutable access invalidates activations recorded before the call.
    pub fn params_mut(&mut self) -> &mut [Param<R>] {
        self.version += 1;
        &mut self.params
    }

    /// Parameters owned by layer `index`.
    pub fn layer_params(&self, index: usize) -> &[Param<R>] {
        &self.params[self.slots[index].clone()]
    }

    pub fn param(&self, name: &str) -> Option<&Param<R>> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn num_params(&self) -> usize {
        self.params.iter().map(Param::len).sum()
    }

    pub fn zero_grad(&mut self) {
        for p in &mut self.params {
            p.zero_grad();
        }
    }

    pub fn forward(&self, input: &Tensor<R>) -> Result<Activations<R>, NetError> {
        if input.shape() != self.shapes[0].as_slice() {
            return Err(NetError::ShapeMismatch {
                layer: 0,
                reason: format!("input shape {:?}, expected {:?}", input.shape(), self.shapes[0]),
            });
        }
        let mut outputs = Vec::with_capacity(self.spec.layers.len() + 1);
        let mut caches = Vec::with_capacity(self.spec.layers.len());
        outputs.push(input.clone());
        for (i, layer) in self.spec.layers.iter().enumerate() {
            let x = outputs[i].data();
            let (inp, out_shape) = (&self.shapes[i], &self.shapes[i + 1]);
            let p = &self.params[self.slots[i].clone()];
            let mut y = vec![R::zero(); out_shape.iter().product()];
            let cache = match layer {
                LayerSpec::Conv { .. } => {
                    conv_geom(layer, inp, out_shape).forward(x, &p[0].value, &p[1].value, &mut y);
                    Cache::None
                }
                LayerSpec::MaxPool => {
                    let (c, h, w) = map3(inp);
                    let (v, arg) = pool::max_pool(x, c, h, w);
                    y = v;
                    Cache::Indices(arg)
                }
                LayerSpec::Spp { levels } => {
                    let (c, h, w) = map3(inp);
                    let (v, arg) = pool::spp_with_indices(x, c, h, w, levels)?;
                    y = v;
                    Cache::Indices(arg)
                }
                LayerSpec::CollapseHeight => {
                    let (c, h, w) = map3(inp);
                    let (v, arg) = pool::collapse_height(x, c, h, w);
                    y = v;
                    Cache::Indices(arg)
                }
                LayerSpec::Dense { out } => {
                    let (rows, cols) = rows_cols(inp);
                    dense::forward(x, rows, cols, *out, &p[0].value, &p[1].value, &mut y);
                    Cache::None
                }
                LayerSpec::Activation { kind } => {
                    act::apply(*kind, x, &mut y);
                    Cache::None
                }
                LayerSpec::Softmax => {
                    act::softmax(x, rows_cols(inp).1, &mut y);
                    Cache::None
                }
                LayerSpec::BiLstm { hidden, .. } => {
                    let (v, cache) = lstm::forward(x, inp[0], inp[1], *hidden, p);
                    y = v;
                    Cache::Lstm(cache)
                }
            };
            let t = Tensor::from_vec(out_shape, y)?;
            debug_assert!(
                !outputs[i].all_finite() || t.all_finite(),
                "layer {i} produced a non-finite value from finite input"
            );
            outputs.push(t);
            caches.push(cache);
        }
        Ok(Activations {
            outputs,
            caches,
            version: self.version,
        })
    }

    /// Accumulates parameter gradients for `upstream = dL/d(output)` and
    /// returns `dL/d(input)`.
    pub fn backward(&mut self, acts: &Activations<R>, upstream: &Tensor<R>) -> Result<Tensor<R>, NetError> {
        if acts.outputs.len() != self.spec.layers.len() + 1 || acts.outputs[0].shape() != self.shapes[0].as_slice() {
            return Err(NetError::State("activations were recorded by a different network".into()));
        }
        if acts.version != self.version {
            return Err(NetError::State("parameters changed since the forward pass".into()));
        }
        if upstream.shape() != self.output_shape() {
            return Err(NetError::ShapeMismatch {
                layer: self.spec.layers.len(),
                reason: format!("upstream gradient {:?}, output {:?}", upstream.shape(), self.output_shape()),
            });
        }
        let mut grad = upstream.data().to_vec();
        for i in (0..self.spec.layers.len()).rev() {
            let layer = &self.spec.layers[i];
            let (inp, out_shape) = (&self.shapes[i], &self.shapes[i + 1]);
            let x = acts.outputs[i].data();
            let y = acts.outputs[i + 1].data();
            let p = &mut self.params[self.slots[i].clone()];
            let mut gx = vec![R::zero(); inp.iter().product()];
            match (layer, &acts.caches[i]) {
                (LayerSpec::Conv { .. }, _) => {
                    let (w, b) = p.split_at_mut(1);
                    conv_geom(layer, inp, out_shape).backward(
                        x,
                        &w[0].value,
                        &grad,
                        &mut w[0].grad,
                        &mut b[0].grad,
                        &mut gx,
                    );
                }
                (LayerSpec::MaxPool | LayerSpec::Spp { .. } | LayerSpec::CollapseHeight, Cache::Indices(arg)) => {
                    pool::scatter(&grad, arg, &mut gx);
                }
                (LayerSpec::Dense { out }, _) => {
                    let (rows, cols) = rows_cols(inp);
                    let (w, b) = p.split_at_mut(1);
                    dense::backward(x, rows, cols, *out, &w[0].value, &grad, &mut w[0].grad, &mut b[0].grad, &mut gx);
                }
                (LayerSpec::Activation { kind }, _) => act::backward(*kind, y, &grad, &mut gx),
                (LayerSpec::Softmax, _) => act::softmax_backward(y, rows_cols(inp).1, &grad, &mut gx),
                (LayerSpec::BiLstm { hidden, .. }, Cache::Lstm(cache)) => {
                    gx = lstm::backward(cache, inp[0], *hidden, &grad, p);
                }
                _ => return Err(NetError::State(format!("cache of layer {i} does not match its kind"))),
            }
            grad = gx;
        }
        Tensor::from_vec(&self.shapes[0], grad)
    }
}
