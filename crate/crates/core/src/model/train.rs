use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Checkpoint, ModelError, PhoscCtcModel, PhoscNetModel, TrainConfig, phosc_loss};
use crate::ctc::best_path_decode;
use crate::image::GrayImage;
use crate::matcher::{Lexicon, SearchSpace};
use crate::metrics;
use crate::netcore::{Adam, AdamConfig, Param};
use crate::rng;
use crate::signature::SignatureEncoder;

/// A labelled word image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub image: GrayImage,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean per-sample training loss.
    pub train_loss: f64,
    /// Seen-word top-1 for PhoscNet, character error rate for CTC models.
    pub val_metric: f64,
    /// Learning rate used during the epoch.
    pub lr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEpochs,
    /// Two learning-rate reductions passed without a validation improvement.
    Plateau,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_metric: f64,
    pub stop_reason: StopReason,
}

/// The best-validation model with its checkpoint and the training log.
#[derive(Clone, Debug)]
pub struct Trained<M> {
    pub model: M,
    pub checkpoint: Checkpoint,
    pub log: TrainLog,
}

/// Reduce-on-plateau bookkeeping.
struct Schedule {
    higher_is_better: bool,
    best: Option<f64>,
    stale_epochs: usize,
    reductions_since_best: usize,
    patience: usize,
    factor: f64,
}

enum Verdict {
    Improved,
    Continue,
    Stop,
}

impl Schedule {
    fn observe(&mut self, metric: f64, lr: &mut f64) -> Verdict {
        let improved = match self.best {
            None => true,
            Some(b) if self.higher_is_better => metric > b,
            Some(b) => metric < b,
        };
        if improved {
            self.best = Some(metric);
            self.stale_epochs = 0;
            self.reductions_since_best = 0;
            return Verdict::Improved;
        }
        self.stale_epochs += 1;
        if self.stale_epochs < self.patience {
            return Verdict::Continue;
        }
        if self.reductions_since_best >= 2 {
            return Verdict::Stop;
        }
        *lr *= self.factor;
        self.reductions_since_best += 1;
        self.stale_epochs = 0;
        Verdict::Continue
    }
}

trait Trainable: Clone {
    fn zero_grad(&mut self);
    fn trainable(&mut self) -> Vec<&mut Param<f32>>;
}

impl Trainable for PhoscNetModel<f32> {
    fn zero_grad(&mut self) {
        PhoscNetModel::zero_grad(self);
    }
    fn trainable(&mut self) -> Vec<&mut Param<f32>> {
        self.params_mut()
    }
}

impl Trainable for PhoscCtcModel<f32> {
    fn zero_grad(&mut self) {
        PhoscCtcModel::zero_grad(self);
    }
    fn trainable(&mut self) -> Vec<&mut Param<f32>> {
        self.params_mut()
    }
}

fn fit<M: Trainable>(
    mut model: M,
    train_len: usize,
    cfg: &TrainConfig,
    higher_is_better: bool,
    mut step: impl FnMut(&mut M, usize) -> Result<f64, ModelError>,
    mut validate: impl FnMut(&M) -> Result<f64, ModelError>,
    mut observer: impl FnMut(&EpochRecord),
) -> Result<(M, TrainLog), ModelError> {
    cfg.validate()?;
    let mut adam = Adam::new(AdamConfig {
        learning_rate: cfg.learning_rate,
        beta1: cfg.momentum,
        weight_decay: cfg.weight_decay,
        ..AdamConfig::default()
    });
    let mut schedule = Schedule {
        higher_is_better,
        best: None,
        stale_epochs: 0,
        reductions_since_best: 0,
        patience: cfg.patience,
        factor: cfg.lr_reduction_factor,
    };
    let mut lr = cfg.learning_rate;
    let mut best = model.clone();
    let mut best_epoch = 0;
    let mut epochs = Vec::new();
    let mut order: Vec<usize> = (0..train_len).collect();
    let mut stop_reason = StopReason::MaxEpochs;
    for epoch in 1..=cfg.max_epochs {
        order.sort_unstable();
        order.shuffle(&mut rng::stream(cfg.seed, "shuffle", epoch as u64));
        adam.config.learning_rate = lr;
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            model.zero_grad();
            for &i in batch {
                total += step(&mut model, i)?;
            }
            adam.step(&mut model.trainable())?;
        }
        let train_loss = total / train_len as f64;
        if !train_loss.is_finite() {
            return Err(ModelError::DivergedLoss { epoch });
        }
        let val_metric = validate(&model)?;
        let record = EpochRecord {
            epoch,
            train_loss,
            val_metric,
            lr,
        };
        observer(&record);
        epochs.push(record);
        match schedule.observe(val_metric, &mut lr) {
            Verdict::Improved => {
                best = model.clone();
                best_epoch = epoch;
            }
            Verdict::Continue => {}
            Verdict::Stop => {
                stop_reason = StopReason::Plateau;
                break;
            }
        }
    }
    let log = TrainLog {
        best_val_metric: schedule.best.unwrap_or(f64::NAN),
        best_epoch,
        epochs,
        stop_reason,
    };
    Ok((best, log))
}

fn check_data(train: &[Sample], val: &[Sample]) -> Result<(), ModelError> {
    if train.is_empty() {
        return Err(ModelError::EmptyDataset("train"));
    }
    if val.is_empty() {
        return Err(ModelError::EmptyDataset("val"));
    }
    Ok(())
}

/// Seen-word top-1 accuracy by cosine matching over the training lexicon.
pub fn seen_accuracy(
    model: &PhoscNetModel<f32>,
    lexicon: &Lexicon,
    samples: &[Sample],
) -> Result<f64, ModelError> {
    let mut correct = 0usize;
    for s in samples {
        let pred = model.predict_signature(&s.image)?;
        if lexicon.predict(&pred, SearchSpace::Seen)? == s.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / samples.len() as f64)
}

/// Trains the multi-task network with reduce-on-plateau early stopping on
/// seen-word validation accuracy and returns the best-validation model.
pub fn train_phoscnet(
    model: PhoscNetModel<f32>,
    encoder: &SignatureEncoder,
    train: &[Sample],
    val: &[Sample],
    cfg: &TrainConfig,
    observer: impl FnMut(&EpochRecord),
) -> Result<Trained<PhoscNetModel<f32>>, ModelError> {
    check_data(train, val)?;
    if encoder.phoc_len() != model.config().phoc_len || encoder.phos_len() != model.config().phos_len {
        return Err(ModelError::InvalidConfig("head widths differ from the signature encoder".into()));
    }
    let mut targets: BTreeMap<&str, (Vec<f32>, Vec<f32>)> = BTreeMap::new();
    let mut words = Vec::new();
    for s in train.iter().chain(val) {
        if !targets.contains_key(s.label.as_str()) {
            let sig = encoder.encode(&s.label)?;
            targets.insert(&s.label, (sig.phoc, sig.phos));
        }
    }
    for s in train {
        if !words.contains(&s.label.as_str()) {
            words.push(s.label.as_str());
        }
    }
    let lexicon = Lexicon::build::<&str>(&words, &[], encoder)?;
    let (lc, ls) = (cfg.lambda_c, cfg.lambda_s);
    let (model, log) = fit(
        model,
        train.len(),
        cfg,
        true,
        |m, i| {
            let s = &train[i];
            let x = s.image.to_input(m.config().input[0], m.config().input[1])?;
            let fwd = m.forward(&x)?;
            let (tc, ts) = &targets[s.label.as_str()];
            let loss = phosc_loss(fwd.phoc(), fwd.phos(), tc, ts, lc, ls)?;
            m.backward(&fwd, &loss.grad_phoc, &loss.grad_phos)?;
            Ok(loss.total)
        },
        |m| seen_accuracy(m, &lexicon, val),
        observer,
    )?;
    Ok(Trained {
        checkpoint: Checkpoint::from_phoscnet(&model),
        model,
        log,
    })
}

/// Mean character error rate of best-path decoding.
pub fn best_path_cer(model: &PhoscCtcModel<f32>, samples: &[Sample]) -> Result<f64, ModelError> {
    let mut preds = Vec::with_capacity(samples.len());
    for s in samples {
        preds.push(best_path_decode(&model.predict_probs(&s.image)?, model.alphabet())?);
    }
    let truths: Vec<&str> = samples.iter().map(|s| s.label.as_str()).collect();
    Ok(metrics::cer(&preds, &truths)?.mean)
}

/// Trains a CTC model (from scratch or after weight transfer) with early
/// stopping on validation CER and returns the best-validation model.
pub fn train_ctc(
    model: PhoscCtcModel<f32>,
    train: &[Sample],
    val: &[Sample],
    cfg: &TrainConfig,
    observer: impl FnMut(&EpochRecord),
) -> Result<Trained<PhoscCtcModel<f32>>, ModelError> {
    check_data(train, val)?;
    let labels = train.iter().map(|s| model.encode_label(&s.label)).collect::<Result<Vec<_>, _>>()?;
    for s in val {
        model.encode_label(&s.label)?;
    }
    let (model, log) = fit(
        model,
        train.len(),
        cfg,
        false,
        |m, i| {
            let x = train[i].image.to_input(m.config().input[0], m.config().input[1])?;
            m.loss_and_backward(&x, &labels[i])
        },
        |m| best_path_cer(m, val),
        observer,
    )?;
    Ok(Trained {
        checkpoint: Checkpoint::from_ctc(&model),
        model,
        log,
    })
}
