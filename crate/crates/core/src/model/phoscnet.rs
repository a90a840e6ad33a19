use alloc::vec;
use alloc::vec::Vec;

use super::{ModelError, PhoscNetConfig};
use crate::image::GrayImage;
use crate::netcore::{Activations, ActivationKind, LayerSpec, Net, NetSpec, Param, Real, Tensor};

/// Shared convolutional backbone and SPP feeding a PHOC head (sigmoid) and a
/// PHOS head (ReLU).
#[derive(Clone, Debug)]
pub struct PhoscNetModel<R: Real = f32> {
    config: PhoscNetConfig,
    seed: u64,
    pub(crate) backbone: Net<R>,
    spp: Net<R>,
    phoc_head: Net<R>,
    phos_head: Net<R>,
}

/// Intermediate state of one forward pass.
#[derive(Clone, Debug)]
pub struct PhoscForward<R> {
    backbone: Activations<R>,
    spp: Activations<R>,
    phoc: Activations<R>,
    phos: Activations<R>,
}

impl<R: Real> PhoscForward<R> {
    pub fn phoc(&self) -> &[R] {
        self.phoc.output().data()
    }

    pub fn phos(&self) -> &[R] {
        self.phos.output().data()
    }

    /// `[phi_c(x), phi_s(x)]`.
    pub fn combined(&self) -> Vec<R> {
        let mut v = self.phoc().to_vec();
        v.extend_from_slice(self.phos());
        v
    }
}

fn head(input: usize, hidden: usize, out: usize, last: ActivationKind) -> NetSpec {
    NetSpec::new(
        &[input],
        vec![
            LayerSpec::Dense { out: hidden },
            LayerSpec::Activation {
                kind: ActivationKind::Relu,
            },
            LayerSpec::Dense { out },
            LayerSpec::Activation { kind: last },
        ],
    )
}

pub(crate) fn backbone_spec(input: [usize; 2], layers: &[LayerSpec]) -> Result<NetSpec, ModelError> {
    if let Some((i, l)) = layers.iter().enumerate().find(|(_, l)| {
        !matches!(l, LayerSpec::Conv { .. } | LayerSpec::MaxPool | LayerSpec::Activation { .. })
    }) {
        return Err(ModelError::InvalidConfig(alloc::format!(
            "backbone layer {i} ({l:?}) is not a convolution, pooling or activation"
        )));
    }
    Ok(NetSpec::new(&[1, input[0], input[1]], layers.to_vec()))
}

impl<R: Real> PhoscNetModel<R> {
    pub fn new(config: PhoscNetConfig, seed: u64) -> Result<Self, ModelError> {
        if config.head_hidden == 0 || config.phoc_len == 0 || config.phos_len == 0 {
            return Err(ModelError::InvalidConfig("head widths must be positive".into()));
        }
        let backbone = Net::new(backbone_spec(config.input, &config.backbone)?, "backbone", seed)?;
        let spp = Net::new(
            NetSpec::new(
                backbone.output_shape(),
                vec![LayerSpec::Spp {
                    levels: config.spp_levels.clone(),
                }],
            ),
            "spp",
            seed,
        )?;
        let features = spp.output_shape()[0];
        let phoc_head = Net::new(head(features, config.head_hidden, config.phoc_len, ActivationKind::Sigmoid), "phoc", seed)?;
        let phos_head = Net::new(head(features, config.head_hidden, config.phos_len, ActivationKind::Relu), "phos", seed)?;
        Ok(Self {
            config,
            seed,
            backbone,
            spp,
            phoc_head,
            phos_head,
        })
    }

    pub fn config(&self) -> &PhoscNetConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn nets(&self) -> [&Net<R>; 4] {
        [&self.backbone, &self.spp, &self.phoc_head, &self.phos_head]
    }

    pub fn nets_mut(&mut self) -> [&mut Net<R>; 4] {
        [&mut self.backbone, &mut self.spp, &mut self.phoc_head, &mut self.phos_head]
    }

    pub fn params(&self) -> impl Iterator<Item = &Param<R>> {
        self.nets().into_iter().flat_map(|n| n.params().iter())
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<R>> {
        self.nets_mut().into_iter().flat_map(|n| n.params_mut().iter_mut()).collect()
    }

    pub fn zero_grad(&mut self) {
        for n in self.nets_mut() {
            n.zero_grad();
        }
    }

    pub fn forward(&self, input: &Tensor<R>) -> Result<PhoscForward<R>, ModelError> {
        let backbone = self.backbone.forward(input)?;
        let spp = self.spp.forward(backbone.output())?;
        let phoc = self.phoc_head.forward(spp.output())?;
        let phos = self.phos_head.forward(spp.output())?;
        Ok(PhoscForward {
            backbone,
            spp,
            phoc,
            phos,
        })
    }

    /// Accumulates parameter gradients for head-output gradients and returns
    /// the gradient with respect to the input image.
    pub fn backward(&mut self, fwd: &PhoscForward<R>, grad_phoc: &[R], grad_phos: &[R]) -> Result<Tensor<R>, ModelError> {
        let gc = self
            .phoc_head
            .backward(&fwd.phoc, &Tensor::from_vec(&[grad_phoc.len()], grad_phoc.to_vec())?)?;
        let gs = self
            .phos_head
            .backward(&fwd.phos, &Tensor::from_vec(&[grad_phos.len()], grad_phos.to_vec())?)?;
        let mut g = gc;
        for (a, &b) in g.data_mut().iter_mut().zip(gs.data()) {
            *a += b;
        }
        let g = self.spp.backward(&fwd.spp, &g)?;
        Ok(self.backbone.backward(&fwd.backbone, &g)?)
    }

    /// `[phi_c(x), phi_s(x)]` for a normalized word image.
    pub fn predict_signature(&self, image: &GrayImage) -> Result<Vec<f32>, ModelError> {
        let x = image.to_input::<R>(self.config.input[0], self.config.input[1])?;
        Ok(self.forward(&x)?.combined().iter().map(|v| Real::to_f64(*v) as f32).collect())
    }
}
