use phosc_core::image::GrayImage;
use phosc_core::model::{
    phosc_loss, train_ctc, CtcProbe, PhoscProbe, train_phoscnet, transfer_conv_weights, Checkpoint, CtcConfig, Decoder, ModelError,
    PhoscCtcModel, PhoscNetConfig, PhoscNetModel, Sample, StopReason, TrainConfig,
};
use phosc_core::netcore::{grad_check, ActivationKind, GradCheckOptions, LayerSpec};
use phosc_core::signature::{PhocConfig, PhosConfig, SignatureEncoder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: usize = 8;
const W: usize = 40;

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

fn tiny_phoscnet(phoc_len: usize, phos_len: usize) -> PhoscNetConfig {
    PhoscNetConfig {
        input: [H, W],
        backbone: tiny_backbone(),
        spp_levels: vec![1, 2],
        head_hidden: 8,
        phoc_len,
        phos_len,
    }
}

fn tiny_ctc(alphabet: &str) -> CtcConfig {
    CtcConfig {
        input: [H, W],
        backbone: tiny_backbone(),
        lstm_hidden: 4,
        lstm_layers: 1,
        alphabet: alphabet.into(),
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

fn random_image(rng: &mut ChaCha8Rng) -> GrayImage {
    GrayImage::from_pixels(W, H, (0..W * H).map(|_| rng.random()).collect()).unwrap()
}

#[test]
fn phosc_loss_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pc = random_vec(&mut rng, 7, 0.05, 0.95);
    let ps = random_vec(&mut rng, 5, 0.0, 3.0);
    let tc: Vec<f32> = (0..7).map(|i| (i % 2) as f32).collect();
    let ts: Vec<f32> = (0..5).map(|i| i as f32).collect();
    let base = phosc_loss(&pc, &ps, &tc, &ts, 1.0, 4.5).unwrap();
    let eps = 1e-6;
    for i in 0..7 {
        let mut up = pc.clone();
        let mut dn = pc.clone();
        up[i] += eps;
        dn[i] -= eps;
        let num = (phosc_loss(&up, &ps, &tc, &ts, 1.0, 4.5).unwrap().total
            - phosc_loss(&dn, &ps, &tc, &ts, 1.0, 4.5).unwrap().total)
            / (2.0 * eps);
        assert!((num - base.grad_phoc[i]).abs() < 1e-6, "phoc {i}: {num} vs {}", base.grad_phoc[i]);
    }
    for i in 0..5 {
        let mut up = ps.clone();
        let mut dn = ps.clone();
        up[i] += eps;
        dn[i] -= eps;
        let num = (phosc_loss(&pc, &up, &tc, &ts, 1.0, 4.5).unwrap().total
            - phosc_loss(&pc, &dn, &tc, &ts, 1.0, 4.5).unwrap().total)
            / (2.0 * eps);
        assert!((num - base.grad_phos[i]).abs() < 1e-6, "phos {i}: {num} vs {}", base.grad_phos[i]);
    }
    assert!((base.total - (base.phoc + 4.5 * base.phos)).abs() < 1e-12);
}

#[test]
fn phosc_loss_is_minimal_at_the_target() {
    let tc = [0.0f32, 1.0, 1.0];
    let ts = [2.0f32, 0.0];
    let exact = phosc_loss(&[0.0f64, 1.0, 1.0], &[2.0, 0.0], &tc, &ts, 1.0, 4.5).unwrap();
    let off = phosc_loss(&[0.2f64, 0.8, 0.9], &[1.5, 0.5], &tc, &ts, 1.0, 4.5).unwrap();
    assert!(exact.total < 1e-5);
    assert!(off.total > exact.total);
    assert!(matches!(
        phosc_loss(&[0.5f64], &[1.0], &tc, &ts, 1.0, 4.5),
        Err(ModelError::ShapeMismatch(_))
    ));
}

#[test]
fn phoscnet_end_to_end_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = PhoscNetModel::<f64>::new(tiny_phoscnet(12, 6), 5).unwrap();
    let input = random_image(&mut rng).to_tensor();
    let phoc = (0..12).map(|i| ((i * 7) % 3 == 0) as u8 as f32).collect();
    let phos = (0..6).map(|i| (i % 3) as f32).collect();
    let mut obj = PhoscProbe {
        model,
        input,
        phoc,
        phos,
        lambda_c: 1.0,
        lambda_s: 4.5,
    };
    let report = grad_check(&mut obj, &GradCheckOptions::default()).unwrap();
    assert!(report.checked >= 200);
    assert!(report.passed(), "{report:?}");
}

#[test]
fn ctc_end_to_end_gradient_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let model = PhoscCtcModel::<f64>::new(tiny_ctc("abc"), 6).unwrap();
    let label = model.encode_label("abca").unwrap();
    let input = random_image(&mut rng).to_tensor();
    let mut obj = CtcProbe { model, input, label };
    let report = grad_check(&mut obj, &GradCheckOptions::default()).unwrap();
    assert!(report.checked >= 200);
    assert!(report.passed(), "{report:?}");
}

#[test]
fn checkpoints_round_trip_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let img = random_image(&mut rng);

    let net = PhoscNetModel::<f32>::new(tiny_phoscnet(12, 6), 9).unwrap();
    let ckpt = Checkpoint::from_phoscnet(&net);
    let back: PhoscNetModel<f32> = ckpt.to_phoscnet().unwrap();
    assert_eq!(net.predict_signature(&img).unwrap(), back.predict_signature(&img).unwrap());
    assert!(ckpt.to_ctc::<f32>().is_err());

    let ctc = PhoscCtcModel::<f32>::new(tiny_ctc("ab"), 9).unwrap();
    let ckpt = Checkpoint::from_ctc(&ctc);
    assert_eq!(ckpt.header.alphabet.as_deref(), Some("ab"));
    assert_eq!(ckpt.header.blank_index, Some(2));
    let back: PhoscCtcModel<f32> = ckpt.to_ctc().unwrap();
    assert_eq!(
        ctc.predict_probs(&img).unwrap().data(),
        back.predict_probs(&img).unwrap().data()
    );

    let mut broken = ckpt.clone();
    broken.data[0].pop();
    assert!(broken.to_ctc::<f32>().is_err());
    let mut renamed = ckpt;
    renamed.header.alphabet = Some("ba".into());
    assert!(renamed.to_ctc::<f32>().is_err());
}

#[test]
fn transfer_copies_only_the_backbone() {
    let src = PhoscNetModel::<f32>::new(tiny_phoscnet(12, 6), 1).unwrap();
    let ckpt = Checkpoint::from_phoscnet(&src);
    let fresh = PhoscCtcModel::<f32>::new(tiny_ctc("abc"), 2).unwrap();
    assert!(!fresh.is_pretrained());
    let moved = transfer_conv_weights(&ckpt, fresh.clone()).unwrap();
    assert!(moved.is_pretrained());

    let mut copied = 0;
    for p in moved.params() {
        let before = fresh.params().find(|q| q.name == p.name).unwrap();
        if let Some(stem) = p.name.strip_prefix("backbone.") {
            let expect = ckpt.tensor(&format!("backbone.{stem}")).unwrap();
            assert_eq!(p.value, expect, "{}", p.name);
            if stem.ends_with("weight") {
                assert_ne!(p.value, before.value, "{}", p.name);
            }
            copied += 1;
        } else {
            assert_eq!(p.value, before.value, "{}", p.name);
        }
    }
    assert_eq!(copied, 2);

    let mut other = tiny_ctc("abc");
    other.backbone[0] = LayerSpec::Conv {
        out_channels: 5,
        kernel: 3,
        stride: 1,
        padding: 1,
    };
    let target = PhoscCtcModel::<f32>::new(other, 2).unwrap();
    assert!(matches!(
        transfer_conv_weights(&ckpt, target),
        Err(ModelError::SpecMismatch { layer: 0, .. })
    ));
    assert!(matches!(
        transfer_conv_weights(&Checkpoint::from_ctc(&fresh), fresh.clone()),
        Err(ModelError::SpecMismatch { .. })
    ));
}

#[test]
fn infeasible_labels_are_rejected() {
    let model = PhoscCtcModel::<f32>::new(tiny_ctc("ab"), 0).unwrap();
    assert_eq!(model.time_steps(), W / 2);
    let long = "ab".repeat(W / 4 + 1);
    assert!(matches!(
        model.encode_label(&long),
        Err(ModelError::InfeasibleLabel { .. })
    ));
    assert!(model.encode_label("aa").is_ok());
    assert!(model.encode_label("c").is_err());
}

/// Distinct striped images per word so that a small model can separate them.
fn toy_set(words: &[&str], copies: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (k, w) in words.iter().enumerate() {
        for _ in 0..copies {
            let mut px = vec![255u8; W * H];
            for y in 0..H {
                for x in 0..W {
                    if (x / (k + 2)) % 2 == 0 {
                        px[y * W + x] = rng.random_range(0..60);
                    }
                }
            }
            out.push(Sample {
                image: GrayImage::from_pixels(W, H, px).unwrap(),
                label: (*w).into(),
            });
        }
    }
    out
}

fn toy_cfg(lr: f64, epochs: usize) -> TrainConfig {
    TrainConfig {
        learning_rate: lr,
        batch_size: 4,
        max_epochs: epochs,
        patience: 1,
        seed: 4,
        ..TrainConfig::phoscnet_defaults()
    }
}

#[test]
fn phoscnet_training_reduces_loss_and_is_deterministic() {
    let encoder = SignatureEncoder::new(PhosConfig::default(), PhocConfig::default()).unwrap();
    let words = ["cat", "hello", "moon"];
    let train = toy_set(&words, 4, 1);
    let val = toy_set(&words, 1, 2);
    let cfg = TrainConfig {
        patience: 50,
        ..toy_cfg(3e-3, 8)
    };
    let run = || {
        let model = PhoscNetModel::new(tiny_phoscnet(364, 165), 7).unwrap();
        train_phoscnet(model, &encoder, &train, &val, &cfg, |_| {}).unwrap()
    };
    let a = run();
    let first = a.log.epochs.first().unwrap().train_loss;
    let last = a.log.epochs.last().unwrap().train_loss;
    assert!(last < 0.8 * first, "loss {first} -> {last}");
    assert_eq!(a.log.epochs.len(), 8);
    assert_eq!(a.log.stop_reason, StopReason::MaxEpochs);
    let b = run();
    assert_eq!(a.checkpoint, b.checkpoint);
    assert_eq!(a.log, b.log);
}

#[test]
fn ctc_training_stops_on_a_plateau() {
    let words = ["ab", "ba"];
    let train = toy_set(&words, 2, 1);
    let val = toy_set(&words, 1, 2);
    let model = PhoscCtcModel::new(tiny_ctc("ab"), 3).unwrap();
    let mut seen = Vec::new();
    let out = train_ctc(model, &train, &val, &toy_cfg(1e-12, 30), |r| seen.push(r.epoch)).unwrap();
    // Epoch 1 sets the best, two reductions follow, then training stops.
    assert_eq!(out.log.stop_reason, StopReason::Plateau);
    assert_eq!(seen, vec![1, 2, 3, 4]);
    assert_eq!(out.log.best_epoch, 1);
    let lrs: Vec<f64> = out.log.epochs.iter().map(|e| e.lr).collect();
    assert_eq!(lrs[0], lrs[1]);
    assert!((lrs[2] - lrs[1] * 0.25).abs() < 1e-24);
    assert!((lrs[3] - lrs[2] * 0.25).abs() < 1e-24);
    let pred = out.model.predict_string(&val[0].image, Decoder::BestPath).unwrap();
    assert!(pred.chars().all(|c| c == 'a' || c == 'b'));
}

#[test]
fn training_rejects_bad_inputs() {
    let model = PhoscCtcModel::new(tiny_ctc("ab"), 3).unwrap();
    let train = toy_set(&["ab"], 1, 1);
    assert!(matches!(
        train_ctc(model.clone(), &train, &[], &toy_cfg(1e-3, 1), |_| {}),
        Err(ModelError::EmptyDataset(_))
    ));
    let bad = toy_set(&["abc"], 1, 1);
    assert!(train_ctc(model.clone(), &bad, &train, &toy_cfg(1e-3, 1), |_| {}).is_err());
    let mut cfg = toy_cfg(1e-3, 1);
    cfg.momentum = 1.0;
    assert!(matches!(
        train_ctc(model, &train, &train, &cfg, |_| {}),
        Err(ModelError::InvalidConfig(_))
    ));
}
