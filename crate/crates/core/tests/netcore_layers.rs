use phosc_core::netcore::{
    grad_check, spp_pool, ActivationKind, GradCheckOptions, LayerSpec, Net, NetError, NetProbe, NetSpec, Objective,
    ProbeLoss, Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

fn probe(input: &[usize], layers: Vec<LayerSpec>, seed: u64) -> NetProbe {
    let net = Net::<f64>::new(NetSpec::new(input, layers), "probe", seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
    let n_out: usize = net.output_shape().iter().product();
    let n_in: usize = input.iter().product();
    let x = Tensor::from_vec(input, random_vec(&mut rng, n_in, 1.0)).unwrap();
    let r = random_vec(&mut rng, n_out, 1.0);
    NetProbe {
        net,
        input: x,
        loss: ProbeLoss::Linear(r),
    }
}

fn check(name: &str, mut p: NetProbe) {
    let report = grad_check(&mut p, &GradCheckOptions::default()).unwrap();
    assert!(report.checked >= 200.min(p.coordinates()), "{name}: only {} coordinates", report.checked);
    assert!(report.passed(), "{name}: {report:?}");
}

fn conv(out: usize, stride: usize) -> LayerSpec {
    LayerSpec::Conv {
        out_channels: out,
        kernel: 3,
        stride,
        padding: 1,
    }
}

#[test]
fn conv_gradients() {
    check("conv", probe(&[2, 6, 9], vec![conv(3, 1)], 1));
    check("strided conv", probe(&[2, 7, 10], vec![conv(3, 2)], 2));
    check(
        "unpadded conv",
        probe(
            &[1, 5, 6],
            vec![LayerSpec::Conv {
                out_channels: 2,
                kernel: 3,
                stride: 1,
                padding: 0,
            }],
            3,
        ),
    );
}

#[test]
fn pooling_gradients() {
    check("maxpool", probe(&[2, 6, 8], vec![conv(2, 1), LayerSpec::MaxPool], 4));
    check("spp", probe(&[2, 7, 9], vec![conv(2, 1), LayerSpec::Spp { levels: vec![1, 2, 3] }], 5));
    check("collapse", probe(&[2, 4, 7], vec![conv(3, 1), LayerSpec::CollapseHeight], 6));
}

#[test]
fn dense_and_activation_gradients() {
    for (i, kind) in [ActivationKind::Relu, ActivationKind::Sigmoid, ActivationKind::Tanh].into_iter().enumerate() {
        check(
            "activation",
            probe(&[12], vec![LayerSpec::Dense { out: 15 }, LayerSpec::Activation { kind }], 10 + i as u64),
        );
    }
    check("row-wise dense", probe(&[5, 6], vec![LayerSpec::Dense { out: 4 }], 13));
    check("softmax", probe(&[4, 6], vec![LayerSpec::Dense { out: 5 }, LayerSpec::Softmax], 14));
}

#[test]
fn bilstm_gradients() {
    check(
        "bilstm",
        probe(&[6, 4], vec![LayerSpec::BiLstm { hidden: 3, num_layers: 2 }, LayerSpec::Dense { out: 5 }], 20),
    );
}

#[test]
fn linear_net_with_squared_loss_is_exact() {
    let mut p = probe(&[7], vec![LayerSpec::Dense { out: 5 }, LayerSpec::Dense { out: 3 }], 30);
    p.loss = ProbeLoss::Squared(vec![0.5, -1.0, 2.0]);
    let report = grad_check(
        &mut p,
        &GradCheckOptions {
            tolerance: 1e-7,
            ..GradCheckOptions::default()
        },
    )
    .unwrap();
    assert!(report.passed(), "{report:?}");
}

/// An objective whose "analytic" gradient is deliberately wrong.
struct Broken;

impl Objective for Broken {
    type Error = ();
    fn coordinates(&self) -> usize {
        3
    }
    fn value(&self, _: usize) -> f64 {
        1.0
    }
    fn set_value(&mut self, _: usize, _: f64) {}
    fn loss(&mut self) -> Result<f64, ()> {
        Ok(0.0)
    }
    fn loss_and_gradient(&mut self) -> Result<(f64, Vec<f64>), ()> {
        Ok((0.0, vec![0.0, 5.0, 1.0]))
    }
}

#[test]
fn violation_lists_worst_coordinates() {
    let report = grad_check(&mut Broken, &GradCheckOptions::default()).unwrap();
    assert!(!report.passed());
    assert_eq!(report.worst[0].index, 1);
    assert_eq!(report.worst.len(), 3);
}

fn small_net() -> Net<f64> {
    Net::new(
        NetSpec::new(
            &[1, 8, 12],
            vec![
                conv(4, 1),
                LayerSpec::Activation {
                    kind: ActivationKind::Relu,
                },
                LayerSpec::MaxPool,
                LayerSpec::Spp { levels: vec![1, 2] },
                LayerSpec::Dense { out: 6 },
            ],
        ),
        "n",
        9,
    )
    .unwrap()
}

fn grads(net: &Net<f64>) -> Vec<f64> {
    net.params().iter().flat_map(|p| p.grad.clone()).collect()
}

#[test]
fn backward_is_linear_in_upstream() {
    let mut net = small_net();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = Tensor::from_vec(&[1, 8, 12], random_vec(&mut rng, 96, 1.0)).unwrap();
    let acts = net.forward(&x).unwrap();
    let up = Tensor::from_vec(&[6], random_vec(&mut rng, 6, 1.0)).unwrap();
    let gx1 = net.backward(&acts, &up).unwrap();
    let g1 = grads(&net);
    net.zero_grad();
    let mut up2 = up.clone();
    up2.scale(2.0);
    let gx2 = net.backward(&acts, &up2).unwrap();
    let g2 = grads(&net);
    for (a, b) in g1.iter().zip(&g2).chain(gx1.data().iter().zip(gx2.data())) {
        assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
    net.zero_grad();
    net.backward(&acts, &Tensor::zeros(&[6])).unwrap();
    assert!(grads(&net).iter().all(|&g| g == 0.0));
}

#[test]
fn stale_or_foreign_activations_are_rejected() {
    let mut net = small_net();
    let x = Tensor::zeros(&[1, 8, 12]);
    let acts = net.forward(&x).unwrap();
    net.params_mut()[0].value[0] += 1.0;
    assert!(matches!(net.backward(&acts, &Tensor::zeros(&[6])), Err(NetError::State(_))));
    let other = Net::<f64>::new(NetSpec::new(&[3], vec![LayerSpec::Dense { out: 6 }]), "o", 0).unwrap();
    let foreign = other.forward(&Tensor::zeros(&[3])).unwrap();
    assert!(matches!(net.backward(&foreign, &Tensor::zeros(&[6])), Err(NetError::State(_))));
}

#[test]
fn identity_dense_and_zero_conv() {
    let mut net = Net::<f32>::new(NetSpec::new(&[4], vec![LayerSpec::Dense { out: 4 }]), "id", 0).unwrap();
    let w = &mut net.params_mut()[0].value;
    w.fill(0.0);
    for i in 0..4 {
        w[i * 4 + i] = 1.0;
    }
    let x = Tensor::from_vec(&[4], vec![0.5, -2.0, 3.25, 0.0]).unwrap();
    assert_eq!(net.forward(&x).unwrap().output(), &x);

    let mut net = Net::<f32>::new(NetSpec::new(&[2, 5, 5], vec![conv(3, 1)]), "z", 0).unwrap();
    net.params_mut()[0].value.fill(0.0);
    let x = Tensor::from_vec(&[2, 5, 5], (0..50).map(|i| i as f32).collect()).unwrap();
    assert!(net.forward(&x).unwrap().output().data().iter().all(|&v| v == 0.0));
}

#[test]
fn forward_is_deterministic() {
    let a = small_net();
    let b = small_net();
    let x = Tensor::from_vec(&[1, 8, 12], (0..96).map(|i| (i as f64 * 0.3).sin()).collect()).unwrap();
    let ya = a.forward(&x).unwrap().output().data().to_vec();
    let yb = b.forward(&x).unwrap().output().data().to_vec();
    assert_eq!(ya.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), yb.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
}

#[test]
fn input_shape_is_checked() {
    let net = small_net();
    assert!(matches!(net.forward(&Tensor::zeros(&[1, 8, 11])), Err(NetError::ShapeMismatch { .. })));
}

mod props {
    use super::{spp_pool, ChaCha8Rng, Rng, SeedableRng};
    use proptest::prelude::{any, prop_assert_eq, proptest};

    proptest! {
        #[test]
        fn spp_length_ignores_map_size(c in 1usize..4, h in 4usize..20, w in 4usize..40, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let map: Vec<f32> = (0..c * h * w).map(|_| rng.random_range(-1.0..1.0)).collect();
            let out = spp_pool(&map, [c, h, w], &[1, 2, 4]).unwrap();
            prop_assert_eq!(out.len(), c * 21);
            let global = map.iter().copied().fold(f32::NEG_INFINITY, f32::max);
            prop_assert_eq!(out[..c].iter().copied().fold(f32::NEG_INFINITY, f32::max), global);
        }
    }
}
