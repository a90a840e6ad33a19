//! Finite-difference checks of every differentiable component, run in f64.

use phosc_core::ctc::ctc_loss_and_grad_indices;
use phosc_core::image::GrayImage;
use phosc_core::model::{CtcConfig, CtcProbe, PhoscCtcModel, PhoscNetConfig, PhoscNetModel, PhoscProbe};
use phosc_core::netcore::{
    grad_check, ActivationKind, GradCheckOptions, GradCheckReport, LayerSpec, Net, NetProbe, NetSpec, Objective,
    ProbeLoss, Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    /// Number of independent problems aggregated into this entry.
    pub instances: usize,
    pub checked: usize,
    pub max_rel_error: f64,
    pub passed: bool,
}

impl SuiteEntry {
    fn from_reports(name: &str, reports: &[GradCheckReport]) -> Self {
        Self {
            name: name.into(),
            instances: reports.len(),
            checked: reports.iter().map(|r| r.checked).sum(),
            max_rel_error: reports.iter().map(|r| r.max_rel_error).fold(0.0, f64::max),
            passed: reports.iter().all(GradCheckReport::passed),
        }
    }
}

/// CTC loss as a function of the unnormalised scores.
pub struct CtcLogitsProbe {
    pub logits: Vec<f64>,
    pub classes: usize,
    pub label: Vec<usize>,
}

impl Objective for CtcLogitsProbe {
    type Error = phosc_core::ctc::CtcError;

    fn coordinates(&self) -> usize {
        self.logits.len()
    }

    fn value(&self, index: usize) -> f64 {
        self.logits[index]
    }

    fn set_value(&mut self, index: usize, value: f64) {
        self.logits[index] = value;
    }

    fn loss(&mut self) -> Result<f64, Self::Error> {
        Ok(ctc_loss_and_grad_indices(&self.logits, self.classes, &self.label)?.neg_log_prob)
    }

    fn loss_and_gradient(&mut self) -> Result<(f64, Vec<f64>), Self::Error> {
        let r = ctc_loss_and_grad_indices(&self.logits, self.classes, &self.label)?;
        Ok((r.neg_log_prob, r.grad_wrt_logits))
    }
}

fn uniform(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

fn layer_probe(rng: &mut ChaCha8Rng, input: &[usize], layers: Vec<LayerSpec>, seed: u64) -> Result<NetProbe> {
    let net = Net::<f64>::new(NetSpec::new(input, layers), "probe", seed).map_err(phosc_core::model::ModelError::from)?;
    let n_in = input.iter().product();
    let n_out = net.output_shape().iter().product();
    let x = Tensor::from_vec(input, uniform(rng, n_in, 1.0)).map_err(phosc_core::model::ModelError::from)?;
    Ok(NetProbe {
        net,
        input: x,
        loss: ProbeLoss::Linear(uniform(rng, n_out, 1.0)),
    })
}

fn tiny_backbone() -> Vec<LayerSpec> {
    vec![
        LayerSpec::Conv {
            out_channels: 4,
            kernel: 3,
            stride: 1,
            padding: 1,
        },
        LayerSpec::Activation {
            kind: ActivationKind::Tanh,
        },
        LayerSpec::MaxPool,
    ]
}

fn tiny_image(rng: &mut ChaCha8Rng) -> GrayImage {
    GrayImage::from_pixels(40, 8, (0..320).map(|_| rng.random()).collect()).expect("8x40 pixels")
}

/// Runs the layer, composite-model and CTC-loss checks. `ctc_instances`
/// random (scores, label) problems are aggregated into the `ctc_loss` entry.
pub fn run_suite(opts: &GradCheckOptions, ctc_instances: usize) -> Result<Vec<SuiteEntry>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let conv = |out_channels, stride, padding| LayerSpec::Conv {
        out_channels,
        kernel: 3,
        stride,
        padding,
    };
    let act = |kind| LayerSpec::Activation { kind };
    let layers: Vec<(&str, Vec<usize>, Vec<LayerSpec>)> = vec![
        ("conv", vec![2, 8, 9], vec![conv(4, 1, 1)]),
        ("conv_strided", vec![2, 9, 11], vec![conv(4, 2, 1)]),
        ("conv_unpadded", vec![2, 8, 9], vec![conv(4, 1, 0)]),
        ("dense", vec![24], vec![LayerSpec::Dense { out: 8 }]),
        ("dense_rows", vec![12, 12], vec![LayerSpec::Dense { out: 6 }]),
        ("max_pool", vec![4, 8, 8], vec![LayerSpec::MaxPool]),
        ("spp", vec![4, 8, 9], vec![LayerSpec::Spp { levels: vec![1, 2, 3] }]),
        ("collapse_height", vec![4, 8, 8], vec![LayerSpec::CollapseHeight]),
        ("sigmoid", vec![220], vec![act(ActivationKind::Sigmoid)]),
        ("relu", vec![220], vec![act(ActivationKind::Relu)]),
        ("tanh", vec![220], vec![act(ActivationKind::Tanh)]),
        ("softmax", vec![10, 22], vec![LayerSpec::Softmax]),
        ("bilstm", vec![5, 4], vec![LayerSpec::BiLstm { hidden: 3, num_layers: 2 }]),
    ];
    let mut out = Vec::new();
    for (i, (name, input, spec)) in layers.into_iter().enumerate() {
        let mut probe = layer_probe(&mut rng, &input, spec, opts.seed + i as u64)?;
        let report = grad_check(&mut probe, opts).map_err(phosc_core::model::ModelError::from)?;
        out.push(SuiteEntry::from_reports(name, &[report]));
    }

    let cfg = PhoscNetConfig {
        input: [8, 40],
        backbone: tiny_backbone(),
        spp_levels: vec![1, 2],
        head_hidden: 8,
        phoc_len: 12,
        phos_len: 6,
    };
    let mut probe = PhoscProbe {
        model: PhoscNetModel::new(cfg, opts.seed)?,
        input: tiny_image(&mut rng).to_tensor(),
        phoc: (0..12).map(|_| f32::from(rng.random_bool(0.3))).collect(),
        phos: (0..6).map(|_| rng.random_range(0..3) as f32).collect(),
        lambda_c: 1.0,
        lambda_s: 4.5,
    };
    out.push(SuiteEntry::from_reports("phoscnet_multitask", &[grad_check(&mut probe, opts)?]));

    let cfg = CtcConfig {
        input: [8, 40],
        backbone: tiny_backbone(),
        lstm_hidden: 4,
        lstm_layers: 1,
        alphabet: "abc".into(),
    };
    let model = PhoscCtcModel::new(cfg, opts.seed)?;
    let label = model.encode_label("abca")?;
    let mut probe = CtcProbe {
        model,
        input: tiny_image(&mut rng).to_tensor(),
        label,
    };
    out.push(SuiteEntry::from_reports("ctc_model", &[grad_check(&mut probe, opts)?]));

    let mut reports = Vec::with_capacity(ctc_instances);
    for _ in 0..ctc_instances {
        let classes = rng.random_range(2..=5);
        let len = rng.random_range(0..=3);
        let label: Vec<usize> = (0..len).map(|_| rng.random_range(0..classes - 1)).collect();
        let steps = phosc_core::ctc::required_steps(&label).max(1) + rng.random_range(0..4);
        let mut probe = CtcLogitsProbe {
            logits: uniform(&mut rng, steps * classes, 2.0),
            classes,
            label,
        };
        reports.push(grad_check(&mut probe, opts).map_err(phosc_core::model::ModelError::from)?);
    }
    if ctc_instances > 0 {
        out.push(SuiteEntry::from_reports("ctc_loss", &reports));
    }
    Ok(out)
}
