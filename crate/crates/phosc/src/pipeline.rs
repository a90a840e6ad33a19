//! Training and evaluation on an on-disk corpus.

use clap::ValueEnum;
use phosc_core::matcher::{Lexicon, SearchSpace};
use phosc_core::metrics::EvalReport;
use phosc_core::model::{
    train_ctc, train_phoscnet, transfer_conv_weights, Checkpoint, Decoder, EpochRecord, ModelConfig, PhoscCtcModel,
    PhoscNetModel, TrainLog,
};
use phosc_core::signature::SignatureEncoder;
use phosc_core::synth::Partition;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Workspace};
use crate::corpus::Corpus;
use crate::error::{PhoscError, Result};
use crate::formats::lexicon::LexiconFile;
use crate::formats::report::{ModelResult, Protocol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Multi-task PHOC + PHOS network.
    Phoscnet,
    /// CTC recognizer trained from scratch.
    Ctc,
    /// CTC recognizer whose backbone starts from a trained PhoscNet.
    #[value(name = "ctc_p")]
    CtcP,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Phoscnet => "phoscnet",
            Self::Ctc => "ctc",
            Self::CtcP => "ctc_p",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub log: TrainLog,
}

/// Trains one variant on the corpus train split, early-stopping on val.
/// `source` is the PhoscNet checkpoint required by `ctc_p`.
pub fn train(
    cfg: &ExperimentConfig,
    ws: &Workspace,
    corpus: &Corpus,
    variant: Variant,
    source: Option<&Checkpoint>,
    observer: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    if variant == Variant::CtcP && source.is_none() {
        return Err(PhoscError::Usage("ctc_p needs a PhoscNet checkpoint to start from".into()));
    }
    let train = corpus.samples(Partition::Train)?;
    let val = corpus.samples(Partition::Val)?;
    let (checkpoint, log) = match variant {
        Variant::Phoscnet => {
            let encoder = cfg.encoder(ws)?;
            let model = PhoscNetModel::new(cfg.phoscnet_config(&encoder), cfg.seed)?;
            let tc = cfg.phoscnet_training.to_train_config(cfg.seed);
            let out = train_phoscnet(model, &encoder, &train, &val, &tc, observer)?;
            (out.checkpoint, out.log)
        }
        Variant::Ctc | Variant::CtcP => {
            let mut model = PhoscCtcModel::new(cfg.ctc_config(), cfg.seed)?;
            if let Some(src) = source {
                model = transfer_conv_weights(src, model)?;
            }
            let tc = cfg.ctc_training.to_train_config(cfg.seed);
            let out = train_ctc(model, &train, &val, &tc, observer)?;
            (out.checkpoint, out.log)
        }
    };
    Ok(TrainOutcome { checkpoint, log })
}

/// Seen labels from the train split and unseen labels from test_unseen.
pub fn corpus_lexicon(corpus: &Corpus) -> LexiconFile {
    LexiconFile {
        seen: corpus.labels(Partition::Train),
        unseen: corpus.labels(Partition::TestUnseen),
    }
}

/// Scores a checkpoint on test_seen and test_unseen. PhoscNet predictions
/// are matched by cosine similarity within the protocol's search space; CTC
/// predictions are decoded and scored by exact match, with CER.
pub fn evaluate(
    name: &str,
    ckpt: &Checkpoint,
    corpus: &Corpus,
    encoder: &SignatureEncoder,
    lexicon: &LexiconFile,
    protocol: Protocol,
    decoder: Decoder,
) -> Result<ModelResult> {
    let seen = corpus.samples(Partition::TestSeen)?;
    let unseen = corpus.samples(Partition::TestUnseen)?;
    let (report, decoder) = match &ckpt.header.model {
        ModelConfig::PhoscNet(pc) => {
            if pc.phoc_len != encoder.phoc_len() || pc.phos_len != encoder.phos_len() {
                return Err(PhoscError::Config(format!(
                    "{name} predicts {}+{} attributes, the signature config gives {}+{}",
                    pc.phoc_len,
                    pc.phos_len,
                    encoder.phoc_len(),
                    encoder.phos_len()
                )));
            }
            let model: PhoscNetModel = ckpt.to_phoscnet()?;
            let lex = Lexicon::build(&lexicon.seen, &lexicon.unseen, encoder)?;
            let (seen_space, unseen_space) = match protocol {
                Protocol::Zsl => (SearchSpace::Seen, SearchSpace::Unseen),
                Protocol::Gzsl => (SearchSpace::All, SearchSpace::All),
            };
            let score = |set: &[phosc_core::model::Sample], space| {
                set.iter()
                    .map(|s| {
                        let sig = model.predict_signature(&s.image)?;
                        Ok((lex.predict(&sig, space)?.to_string(), s.label.clone()))
                    })
                    .collect::<Result<Vec<_>>>()
            };
            let report = EvalReport::from_predictions(&score(&seen, seen_space)?, &score(&unseen, unseen_space)?, false)?;
            (report, None)
        }
        ModelConfig::Ctc(_) => {
            let model: PhoscCtcModel = ckpt.to_ctc()?;
            let score = |set: &[phosc_core::model::Sample]| {
                set.iter()
                    .map(|s| Ok((model.predict_string(&s.image, decoder)?, s.label.clone())))
                    .collect::<Result<Vec<_>>>()
            };
            (EvalReport::from_predictions(&score(&seen)?, &score(&unseen)?, true)?, Some(decoder))
        }
    };
    Ok(ModelResult {
        name: name.to_string(),
        kind: ckpt.header.kind,
        decoder,
        report,
    })
}
