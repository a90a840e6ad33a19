//! The experiment config: one JSON document describing a whole run.
//!
//! Every section and field has a default (the desk-scale setup), so `{}` is a
//! valid config. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use phosc_core::image::{IMAGE_HEIGHT, IMAGE_WIDTH};
use phosc_core::model::{default_backbone, CtcConfig, Decoder, PhoscNetConfig, TrainConfig};
use phosc_core::netcore::LayerSpec;
use phosc_core::signature::{PhocConfig, PhosConfig, ShapeTable, SignatureEncoder};
use phosc_core::synth::CorpusConfig;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{PhoscError, Result};
use crate::formats::read_text;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed for corpus planning, initialization and shuffling.
    pub seed: u64,
    pub signature: SignatureSection,
    pub corpus: CorpusSection,
    pub model: ModelSection,
    pub phoscnet_training: TrainSection,
    pub ctc_training: TrainSection,
    /// Decoder used when evaluating CTC models.
    pub decoder: Decoder,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct SignatureSection {
    pub phos_levels: Vec<usize>,
    pub phoc_levels: Vec<usize>,
    pub phoc_alphabet: String,
    pub occupancy_threshold: f64,
    /// Shape table file; the built-in Latin table when absent.
    pub shape_table: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    /// Corpus directory; holds `manifest.tsv` and the images.
    pub dir: PathBuf,
    /// Frequency-ordered word list; the bundled list when absent.
    pub word_list: Option<PathBuf>,
    pub n_seen: usize,
    pub n_unseen: usize,
    pub styles: u32,
    pub copies_per_word: usize,
    pub max_shear_degrees: f64,
    pub max_noise_sigma: f64,
}

/// Shared by both architectures so that the CTC backbone can take the
/// PhoscNet weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// `[height, width]`.
    pub input: [usize; 2],
    pub backbone: Vec<LayerSpec>,
    pub spp_levels: Vec<usize>,
    pub head_hidden: usize,
    pub lstm_hidden: usize,
    pub lstm_layers: usize,
    /// CTC output symbols; the blank is appended as the last class.
    pub ctc_alphabet: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub weight_decay: f64,
    /// Adam first-moment decay.
    pub momentum: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub lr_reduction_factor: f64,
    /// PHOC loss weight (ignored by CTC training).
    pub lambda_c: f64,
    /// PHOS loss weight (ignored by CTC training).
    pub lambda_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Checkpoints, training logs and reports go here.
    pub dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            signature: SignatureSection::default(),
            corpus: CorpusSection::default(),
            model: ModelSection::default(),
            phoscnet_training: TrainSection {
                learning_rate: 1e-3,
                max_epochs: 25,
                ..TrainSection::default()
            },
            ctc_training: TrainSection {
                learning_rate: 3e-3,
                max_epochs: 30,
                ..TrainSection::default()
            },
            decoder: Decoder::BestPath,
            output: OutputSection::default(),
        }
    }
}

impl Default for SignatureSection {
    fn default() -> Self {
        let phoc = PhocConfig::default();
        Self {
            phos_levels: PhosConfig::default().levels,
            phoc_levels: phoc.levels,
            phoc_alphabet: phoc.alphabet.into_iter().collect(),
            occupancy_threshold: phoc.occupancy_threshold,
            shape_table: None,
        }
    }
}

impl Default for CorpusSection {
    fn default() -> Self {
        let c = CorpusConfig::default();
        Self {
            dir: "corpus".into(),
            word_list: None,
            n_seen: c.n_seen,
            n_unseen: c.n_unseen,
            styles: c.styles,
            copies_per_word: c.copies_per_word,
            max_shear_degrees: c.max_shear_degrees,
            max_noise_sigma: c.max_noise_sigma,
        }
    }
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = PhoscNetConfig::default();
        let c = CtcConfig::default();
        Self {
            input: [IMAGE_HEIGHT, IMAGE_WIDTH],
            backbone: default_backbone(),
            spp_levels: p.spp_levels,
            head_hidden: p.head_hidden,
            lstm_hidden: c.lstm_hidden,
            lstm_layers: c.lstm_layers,
            ctc_alphabet: c.alphabet,
        }
    }
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::phoscnet_defaults();
        Self {
            learning_rate: t.learning_rate,
            weight_decay: t.weight_decay,
            momentum: t.momentum,
            batch_size: t.batch_size,
            max_epochs: t.max_epochs,
            patience: t.patience,
            lr_reduction_factor: t.lr_reduction_factor,
            lambda_c: t.lambda_c,
            lambda_s: t.lambda_s,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "runs".into() }
    }
}

/// Objects merge key by key; anything else replaces the default.
fn merge(base: &mut serde_json::Value, over: serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Resolves relative paths against the working directory.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        self.root.join(path)
    }
}

impl TrainSection {
    pub fn to_train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            momentum: self.momentum,
            batch_size: self.batch_size,
            max_epochs: self.max_epochs,
            patience: self.patience,
            lr_reduction_factor: self.lr_reduction_factor,
            seed,
            lambda_c: self.lambda_c,
            lambda_s: self.lambda_s,
        }
    }
}

impl ExperimentConfig {
    /// Parses a config, filling every missing key from the desk defaults.
    /// Partial sections keep the defaults of their own section, so an
    /// override of `ctc_training.max_epochs` leaves the CTC learning rate alone.
    pub fn parse(text: &str) -> Result<Self> {
        let user: serde_json::Value = serde_json::from_str(text).map_err(|e| PhoscError::Config(e.to_string()))?;
        if !user.is_object() {
            return Err(PhoscError::Config("top level must be a JSON object".into()));
        }
        let mut merged = serde_json::to_value(Self::default()).expect("defaults serialize");
        merge(&mut merged, user);
        serde_json::from_value(merged).map_err(|e| PhoscError::Config(e.to_string()))
    }

    /// Reads, parses and validates a config file.
    pub fn load(path: &Path, ws: &Workspace) -> Result<Self> {
        let cfg = Self::parse(&read_text(path)?)?;
        cfg.validate(ws)?;
        Ok(cfg)
    }

    /// The JSON Schema that config files must satisfy.
    pub fn schema() -> serde_json::Value {
        serde_json::to_value(schemars::schema_for!(ExperimentConfig)).expect("schema serializes")
    }

    /// Checks every section without touching the corpus or outputs.
    pub fn validate(&self, ws: &Workspace) -> Result<()> {
        let config_err = |e: phosc_core::model::ModelError| PhoscError::Config(e.to_string());
        let encoder = self.encoder(ws)?;
        phosc_core::model::PhoscNetModel::<f32>::new(self.phoscnet_config(&encoder), self.seed).map_err(config_err)?;
        phosc_core::model::PhoscCtcModel::<f32>::new(self.ctc_config(), self.seed).map_err(config_err)?;
        self.phoscnet_training.to_train_config(self.seed).validate().map_err(config_err)?;
        self.ctc_training.to_train_config(self.seed).validate().map_err(config_err)?;
        let c = &self.corpus;
        if c.n_seen == 0 || c.n_unseen == 0 || c.styles == 0 || c.copies_per_word == 0 {
            return Err(PhoscError::Config("corpus: counts must be positive".into()));
        }
        if !(0.0..=phosc_core::synth::MAX_SHEAR_DEGREES).contains(&c.max_shear_degrees) || !(0.0..=f64::INFINITY).contains(&c.max_noise_sigma) {
            return Err(PhoscError::Config("corpus: shear or noise bound out of range".into()));
        }
        Ok(())
    }

    pub fn encoder(&self, ws: &Workspace) -> Result<SignatureEncoder> {
        let s = &self.signature;
        let shape_table = match &s.shape_table {
            Some(p) => {
                let path = ws.resolve(p);
                ShapeTable::parse(&read_text(&path)?).map_err(|e| PhoscError::format(&path, e.to_string()))?
            }
            None => ShapeTable::default_latin(),
        };
        let phos = PhosConfig {
            levels: s.phos_levels.clone(),
            shape_table,
        };
        let phoc = PhocConfig {
            levels: s.phoc_levels.clone(),
            alphabet: s.phoc_alphabet.chars().collect(),
            occupancy_threshold: s.occupancy_threshold,
        };
        SignatureEncoder::new(phos, phoc).map_err(|e| PhoscError::Config(e.to_string()))
    }

    pub fn corpus_config(&self) -> CorpusConfig {
        let c = &self.corpus;
        CorpusConfig {
            n_seen: c.n_seen,
            n_unseen: c.n_unseen,
            styles: c.styles,
            copies_per_word: c.copies_per_word,
            max_shear_degrees: c.max_shear_degrees,
            max_noise_sigma: c.max_noise_sigma,
        }
    }

    pub fn phoscnet_config(&self, encoder: &SignatureEncoder) -> PhoscNetConfig {
        let m = &self.model;
        PhoscNetConfig {
            input: m.input,
            backbone: m.backbone.clone(),
            spp_levels: m.spp_levels.clone(),
            head_hidden: m.head_hidden,
            phoc_len: encoder.phoc_len(),
            phos_len: encoder.phos_len(),
        }
    }

    pub fn ctc_config(&self) -> CtcConfig {
        let m = &self.model;
        CtcConfig {
            input: m.input,
            backbone: m.backbone.clone(),
            lstm_hidden: m.lstm_hidden,
            lstm_layers: m.lstm_layers,
            alphabet: m.ctc_alphabet.clone(),
        }
    }
}
