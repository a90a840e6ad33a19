use std::io::{self, Read, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phosc::config::{ExperimentConfig, Workspace};
use phosc::corpus::{build_corpus, Corpus, MANIFEST_FILE};
use phosc::error::{PhoscError, Result};
use phosc::formats::report::{EvalSummary, Protocol};
use phosc::formats::signature::{encode_words, SignatureMode};
use phosc::formats::{self, checkpoint, lexicon, log, pgm, probmatrix, report};
use phosc::gradcheck::run_suite;
use phosc::pipeline::{self, Variant};
use phosc_core::ctc::{beam_search_decode, best_path_decode};
use phosc_core::model::{Decoder, ModelConfig};
use phosc_core::netcore::GradCheckOptions;
use phosc_core::synth::{default_word_list, parse_word_list};

/// Zero-shot word-image recognition with PHOC/PHOS attribute signatures and CTC.
#[derive(Parser, Debug)]
#[command(name = "phosc", version)]
struct Cli {
    /// Directory that every relative path is resolved against.
    #[arg(long, global = true, default_value = ".")]
    workdir: PathBuf,
    /// Experiment config (JSON). Defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides PHOSC_SEED and the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic corpus and its split manifest.
    Synth(SynthArgs),
    /// Write attribute signatures of a word list as TSV.
    Encode(EncodeArgs),
    /// Train a model variant on the corpus.
    Train(TrainArgs),
    /// Evaluate checkpoints on the test splits.
    Eval(EvalArgs),
    /// Decode an image (with a CTC checkpoint) or a probability matrix.
    Decode(DecodeArgs),
    /// Finite-difference gradient checks of every differentiable component.
    Gradcheck(GradcheckArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Output directory (overrides corpus.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Word list, one word per line (overrides corpus.word_list).
    #[arg(long)]
    words: Option<PathBuf>,
    #[arg(long)]
    n_seen: Option<usize>,
    #[arg(long)]
    n_unseen: Option<usize>,
    #[arg(long)]
    styles: Option<u32>,
    #[arg(long)]
    copies: Option<usize>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// Word list, one word per line; `-` reads stdin.
    #[arg(long)]
    words: PathBuf,
    #[arg(long, value_enum, default_value_t = SignatureMode::Phosc)]
    mode: SignatureMode,
    /// Shape table file (overrides signature.shape_table).
    #[arg(long)]
    shape_table: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long, value_enum)]
    variant: Variant,
    /// PhoscNet checkpoint whose convolution weights start a ctc_p model.
    #[arg(long)]
    source: Option<PathBuf>,
    /// Corpus directory (overrides corpus.dir).
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Checkpoint path; `<output.dir>/<variant>.ckpt` by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress per-epoch progress on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct DecoderFlags {
    /// Prefix beam search with this many beams.
    #[arg(long, conflicts_with = "best_path")]
    beam: Option<NonZeroUsize>,
    /// Per-step argmax followed by collapse.
    #[arg(long)]
    best_path: bool,
}

impl DecoderFlags {
    fn resolve(&self, fallback: Decoder) -> Decoder {
        match (self.beam, self.best_path) {
            (Some(width), _) => Decoder::Beam { width },
            (None, true) => Decoder::BestPath,
            (None, false) => fallback,
        }
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Checkpoints to evaluate; each becomes one group of table columns.
    #[arg(long = "checkpoint", required = true)]
    checkpoints: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Protocol::Gzsl)]
    protocol: Protocol,
    /// Lexicon file; the corpus train and test_unseen labels by default.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Corpus directory (overrides corpus.dir).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Report path prefix; `<output.dir>/eval_<protocol>` by default.
    #[arg(long)]
    out_prefix: Option<PathBuf>,
    #[command(flatten)]
    decoder: DecoderFlags,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    /// PGM word image or probability-matrix TSV.
    #[arg(long)]
    input: PathBuf,
    /// CTC checkpoint, required for images.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[command(flatten)]
    decoder: DecoderFlags,
    /// Also print every retained beam with its log probability.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args, Debug)]
struct GradcheckArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
    /// Random CTC loss problems to check.
    #[arg(long, default_value_t = 100)]
    ctc_instances: usize,
}

struct Context {
    ws: Workspace,
    cfg: ExperimentConfig,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let ws = Workspace::new(&cli.workdir);
        let mut cfg = match &cli.config {
            Some(p) => ExperimentConfig::load(&ws.resolve(p), &ws)?,
            None => ExperimentConfig::default(),
        };
        if let Ok(v) = std::env::var("PHOSC_SEED") {
            cfg.seed = v
                .trim()
                .parse()
                .map_err(|_| PhoscError::Usage(format!("PHOSC_SEED={v:?} is not an unsigned integer")))?;
        }
        if let Some(s) = cli.seed {
            cfg.seed = s;
        }
        Ok(Self { ws, cfg })
    }

    fn path(&self, p: &Path) -> PathBuf {
        self.ws.resolve(p)
    }

    fn output(&self, name: &str) -> PathBuf {
        self.path(&self.cfg.output.dir.join(name))
    }

    fn corpus(&self, flag: &Option<PathBuf>) -> Result<Corpus> {
        Corpus::open(&self.path(flag.as_ref().unwrap_or(&self.cfg.corpus.dir)))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => formats::write_bytes(p, text.as_bytes()),
        None => {
            io::stdout().write_all(text.as_bytes()).map_err(|e| PhoscError::write(Path::new("<stdout>"), e))
        }
    }
}

fn synth(ctx: &mut Context, a: &SynthArgs) -> Result<()> {
    let c = &mut ctx.cfg.corpus;
    c.n_seen = a.n_seen.unwrap_or(c.n_seen);
    c.n_unseen = a.n_unseen.unwrap_or(c.n_unseen);
    c.styles = a.styles.unwrap_or(c.styles);
    c.copies_per_word = a.copies.unwrap_or(c.copies_per_word);
    if let Some(w) = &a.words {
        c.word_list = Some(w.clone());
    }
    ctx.cfg.validate(&ctx.ws)?;
    let words = match &ctx.cfg.corpus.word_list {
        Some(p) => {
            let path = ctx.path(p);
            parse_word_list(&formats::read_text(&path)?).map_err(|e| PhoscError::format(&path, e.to_string()))?
        }
        None => default_word_list(),
    };
    let dir = ctx.path(a.out.as_ref().unwrap_or(&ctx.cfg.corpus.dir));
    let rows = build_corpus(&words, &ctx.cfg.corpus_config(), ctx.cfg.seed, &dir)?;
    eprintln!("wrote {} images", rows.len());
    println!("{}", dir.join(MANIFEST_FILE).display());
    Ok(())
}

fn encode(ctx: &mut Context, a: &EncodeArgs) -> Result<()> {
    if let Some(p) = &a.shape_table {
        ctx.cfg.signature.shape_table = Some(p.clone());
    }
    let encoder = ctx.cfg.encoder(&ctx.ws)?;
    let text = if a.words.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| PhoscError::read(Path::new("<stdin>"), e))?;
        s
    } else {
        formats::read_text(&ctx.path(&a.words))?
    };
    let words: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let tsv = encode_words(&words, &encoder, a.mode)?;
    emit(a.out.as_ref().map(|p| ctx.path(p)).as_deref(), &tsv)
}

fn train(ctx: &mut Context, a: &TrainArgs) -> Result<()> {
    let section = match a.variant {
        Variant::Phoscnet => &mut ctx.cfg.phoscnet_training,
        Variant::Ctc | Variant::CtcP => &mut ctx.cfg.ctc_training,
    };
    section.max_epochs = a.epochs.unwrap_or(section.max_epochs);
    section.learning_rate = a.lr.unwrap_or(section.learning_rate);
    section.batch_size = a.batch_size.unwrap_or(section.batch_size);
    ctx.cfg.validate(&ctx.ws)?;
    let source = match (a.variant, &a.source) {
        (Variant::CtcP, Some(p)) => Some(checkpoint::read(&ctx.path(p))?),
        (Variant::CtcP, None) => return Err(PhoscError::Usage("--variant ctc_p requires --source <phoscnet checkpoint>".into())),
        (_, Some(_)) => return Err(PhoscError::Usage("--source only applies to --variant ctc_p".into())),
        (_, None) => None,
    };
    let corpus = ctx.corpus(&a.corpus)?;
    let quiet = a.quiet;
    let outcome = pipeline::train(&ctx.cfg, &ctx.ws, &corpus, a.variant, source.as_ref(), |r| {
        if !quiet {
            eprintln!(
                "epoch {:>3}  loss {:.4}  val {:.4}  lr {:.2e}",
                r.epoch, r.train_loss, r.val_metric, r.lr
            );
        }
    })?;
    let ckpt_path = match &a.out {
        Some(p) => ctx.path(p),
        None => ctx.output(&format!("{}.ckpt", a.variant.as_str())),
    };
    let log_path = ckpt_path.with_extension("log.jsonl");
    checkpoint::write(&ckpt_path, &outcome.checkpoint)?;
    log::write(&log_path, &outcome.log.epochs)?;
    eprintln!(
        "best epoch {} (val {:.4}), stopped: {:?}",
        outcome.log.best_epoch, outcome.log.best_val_metric, outcome.log.stop_reason
    );
    println!("{}", ckpt_path.display());
    Ok(())
}

fn eval(ctx: &mut Context, a: &EvalArgs) -> Result<()> {
    let corpus = ctx.corpus(&a.corpus)?;
    let encoder = ctx.cfg.encoder(&ctx.ws)?;
    let lex = match &a.lexicon {
        Some(p) => lexicon::read(&ctx.path(p))?,
        None => pipeline::corpus_lexicon(&corpus),
    };
    let decoder = a.decoder.resolve(ctx.cfg.decoder);
    let mut models = Vec::new();
    for p in &a.checkpoints {
        let path = ctx.path(p);
        let ckpt = checkpoint::read(&path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        models.push(pipeline::evaluate(&name, &ckpt, &corpus, &encoder, &lex, a.protocol, decoder)?);
    }
    let summary = EvalSummary {
        protocol: a.protocol,
        split: "desk".into(),
        models,
    };
    let prefix = match &a.out_prefix {
        Some(p) => ctx.path(p),
        None => ctx.output(&format!("eval_{}", a.protocol.as_str())),
    };
    let json = prefix.with_extension("json");
    let tsv = prefix.with_extension("tsv");
    report::write(&json, &tsv, &summary)?;
    print!("{}", report::to_tsv(&summary));
    eprintln!("wrote {} and {}", json.display(), tsv.display());
    Ok(())
}

fn decode(ctx: &mut Context, a: &DecodeArgs) -> Result<()> {
    let input = ctx.path(&a.input);
    let bytes = formats::read_bytes(&input)?;
    let (probs, alphabet) = if bytes.starts_with(b"P5") {
        let Some(cp) = &a.checkpoint else {
            return Err(PhoscError::Usage("decoding an image needs --checkpoint".into()));
        };
        let cpath = ctx.path(cp);
        let ckpt = checkpoint::read(&cpath)?;
        if !matches!(ckpt.header.model, ModelConfig::Ctc(_)) {
            return Err(PhoscError::Usage(format!("{} is not a CTC checkpoint", cpath.display())));
        }
        let model: phosc_core::model::PhoscCtcModel = ckpt.to_ctc()?;
        let image = pgm::decode(&bytes).map_err(|e| PhoscError::format(&input, e))?;
        (model.predict_probs(&image)?, model.alphabet().clone())
    } else {
        let text = String::from_utf8(bytes).map_err(|_| PhoscError::format(&input, "neither PGM nor UTF-8 text"))?;
        probmatrix::parse(&text).map_err(|e| PhoscError::format(&input, e))?
    };
    match a.decoder.resolve(ctx.cfg.decoder) {
        Decoder::BestPath => println!("{}", best_path_decode(&probs, &alphabet)?),
        Decoder::Beam { width } => {
            let out = beam_search_decode(&probs, &alphabet, width)?;
            println!("{}", out.best);
            if a.verbose {
                for b in &out.beams {
                    println!("{:.6}\t{}", b.log_prob, b.text);
                }
            }
        }
    }
    Ok(())
}

fn gradcheck(a: &GradcheckArgs, seed: u64) -> Result<bool> {
    let opts = GradCheckOptions {
        epsilon: a.epsilon,
        samples: a.samples,
        tolerance: a.tolerance,
        seed,
    };
    let entries = run_suite(&opts, a.ctc_instances)?;
    println!("component\tinstances\tchecked\tmax_rel_error\tresult");
    for e in &entries {
        println!(
            "{}\t{}\t{}\t{:.3e}\t{}",
            e.name,
            e.instances,
            e.checked,
            e.max_rel_error,
            if e.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(entries.iter().all(|e| e.passed))
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let mut ctx = Context::new(cli)?;
    match &cli.command {
        Command::Synth(a) => synth(&mut ctx, a)?,
        Command::Encode(a) => encode(&mut ctx, a)?,
        Command::Train(a) => train(&mut ctx, a)?,
        Command::Eval(a) => eval(&mut ctx, a)?,
        Command::Decode(a) => decode(&mut ctx, a)?,
        Command::Gradcheck(a) => {
            if !gradcheck(a, ctx.cfg.seed)? {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
