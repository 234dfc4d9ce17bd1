//! Command-line front end: train victims and detectors, generate
//! adversarial pools, run attack and defense protocols, score texts, and
//! emit reports. Runs on a user-supplied dataset file or, when none is
//! given, on the built-in synthetic desk corpus from the config document.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use textguard::attacks::{
    run_attack, AdaptiveWrapConfig, AttackFamily, AttackSpec, QueryBudget,
};
use textguard::constraints::{
    ConstraintSet, HashedWordVecEncoder, LexiconGrammarChecker, PolarityAwareEncoder,
    PolarityLexicon,
};
use textguard::core::{
    load_dataset, read_records, write_records, Dataset, DatasetFormat, RngStream, Split,
};
use textguard::defense::{
    evaluate_after_attack, evaluate_during_attack, evaluate_during_attack_adaptive,
    DefendedEndpoint,
};
use textguard::detector::{DetectorModel, DEFAULT_THRESHOLD};
use textguard::harness::{
    degree_histogram, ExperimentConfig, Pipeline, ReportBundle, Table,
};
use textguard::transforms::{
    apply, default_neutral_adverbs, load_adverb_list, Lexicon, LexiconPosTagger, LexiconRestorer,
    NgramSuggester, RuleParaphraser, SynonymLexicon, TransformConfig, TransformKind,
    TransformResources,
};
use textguard::victim::{
    augment_with_transform, train_classifier, ClassifierEndpoint, ClassifierModel, EncoderSpec,
    OutputMode, TrainConfig,
};

#[derive(Parser)]
#[command(name = "textguard", version, about = "Textual attack/defense toolkit")]
struct Cli {
    /// Experiment config document (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Dataset file; the synthetic desk corpus is used when omitted.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Dataset file format.
    #[arg(long, default_value = "tsv")]
    format: String,
    /// Synonym lexicon file (`word<TAB>syn1,syn2`).
    #[arg(long)]
    synonyms: Option<PathBuf>,
    /// Neutral adverb list (one per line).
    #[arg(long)]
    adverbs: Option<PathBuf>,
    /// POS lexicon (`word<TAB>tag`).
    #[arg(long)]
    pos_lexicon: Option<PathBuf>,
    /// Use only the first N examples.
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the victim classifier.
    TrainVictim {
        #[command(flatten)]
        data: DatasetArgs,
        /// Augment the train split with this transform before training.
        #[arg(long)]
        augment: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate an adversarial pool for one attack family.
    GenAdv {
        #[arg(long)]
        family: String,
        /// Which synthetic split to attack (train or test).
        #[arg(long, default_value = "train")]
        split: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train an anomaly detector (specific to one family, or general).
    TrainDetector {
        #[arg(long, default_value = "general")]
        mode: String,
        /// Family for specific mode.
        #[arg(long)]
        family: Option<String>,
        /// Family held out of general-mode training.
        #[arg(long)]
        exclude: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score texts with a trained detector.
    Detect {
        #[arg(long)]
        detector: PathBuf,
        /// Single text to score.
        #[arg(long)]
        text: Option<String>,
        /// File with one text per line.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Run a black-box attack and write records.
    Attack {
        #[arg(long)]
        family: String,
        #[command(flatten)]
        data: DatasetArgs,
        /// Victim checkpoint; trained fresh when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Enforce the degree-of-anomaly constraint with this detector.
        #[arg(long)]
        detector: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply one transform draw to a text.
    Randomize {
        #[arg(long)]
        transform: String,
        #[arg(long)]
        text: String,
    },
    /// During-attack defended run (detector gate + randomization).
    Defend {
        #[arg(long)]
        family: String,
        /// Transform kind for the defense.
        #[arg(long)]
        transform: Option<String>,
        /// Adaptive (expectation-over-transformation) attack instead of the
        /// plain one.
        #[arg(long)]
        adaptive: bool,
        /// Randomized copies averaged per candidate in adaptive mode.
        #[arg(long)]
        k: Option<usize>,
        /// Randomize every query unconditionally (no detector gate).
        #[arg(long)]
        no_gate: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute and verify metrics from stored records; optionally apply
    /// one randomization pass to successful adversarial texts.
    Evaluate {
        #[arg(long)]
        records: PathBuf,
        /// After-attack randomization transform.
        #[arg(long)]
        after_transform: Option<String>,
    },
    /// Fold record files in a directory into report tables.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also emit a degree histogram using this detector.
        #[arg(long)]
        detector: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            // missing inputs and malformed invocations exit 2, runtime
            // failures exit 1
            if err.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Invocation problems (missing files, bad flag values) exit with status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn load_config(cli_config: &Option<PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = match cli_config {
        Some(path) => {
            let content = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("config {path:?} unreadable: {e}")))?;
            toml::from_str(&content).context("parsing config document")?
        }
        None => ExperimentConfig::with_seed(0),
    };
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn parse_family(name: &str) -> Result<AttackFamily> {
    AttackFamily::parse(name).ok_or_else(|| usage(format!("unknown attack family {name:?}")))
}

fn parse_kind(name: &str) -> Result<TransformKind> {
    TransformKind::parse(name).ok_or_else(|| usage(format!("unknown transform kind {name:?}")))
}

fn parse_format(name: &str) -> Result<DatasetFormat> {
    match name {
        "tsv" => Ok(DatasetFormat::Tsv),
        "jsonl" => Ok(DatasetFormat::Jsonl),
        other => Err(usage(format!("unknown dataset format {other:?}"))),
    }
}

/// Build transform resources for a user-supplied dataset.
fn resources_from_dataset(dataset: &Dataset, args: &DatasetArgs) -> Result<TransformResources> {
    let synonyms = Arc::new(match &args.synonyms {
        Some(path) => SynonymLexicon::load(path)
            .map_err(|e| usage(format!("synonym lexicon {path:?}: {e}")))?,
        None => SynonymLexicon::new(),
    });
    let adverbs = match &args.adverbs {
        Some(path) => {
            load_adverb_list(path).map_err(|e| usage(format!("adverb list {path:?}: {e}")))?
        }
        None => default_neutral_adverbs(),
    };
    let tagger = match &args.pos_lexicon {
        Some(path) => LexiconPosTagger::load(path)
            .map_err(|e| usage(format!("pos lexicon {path:?}: {e}")))?,
        None => LexiconPosTagger::default(),
    };
    let texts: Vec<&str> = dataset.examples.iter().map(|e| e.text.as_str()).collect();
    let mut lexicon = Lexicon::from_texts(texts.iter().copied());
    lexicon.absorb(synonyms.vocabulary());
    lexicon.absorb(adverbs.iter().cloned());
    let semantic_encoder = PolarityAwareEncoder::new(
        HashedWordVecEncoder::new(256).with_frequencies(lexicon.frequencies().clone()),
        PolarityLexicon::induce(texts.iter().copied()).propagate_synonyms(&synonyms),
        1.0,
    );
    Ok(TransformResources {
        synonyms: synonyms.clone(),
        adverbs: Arc::new(adverbs),
        tagger: Arc::new(tagger),
        suggester: Arc::new(NgramSuggester::train(texts.iter().copied())),
        paraphraser: Arc::new(RuleParaphraser::new(synonyms)),
        restorer: Some(Arc::new(LexiconRestorer::new(lexicon))),
        semantic_encoder: Arc::new(semantic_encoder),
    })
}

fn load_user_dataset(args: &DatasetArgs, split: Split) -> Result<Option<Dataset>> {
    let Some(path) = &args.dataset else {
        return Ok(None);
    };
    if !path.exists() {
        return Err(usage(format!("dataset file {path:?} does not exist")));
    }
    let format = parse_format(&args.format)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".into());
    let mut dataset =
        load_dataset(path, format, &name, split, None).context("loading dataset")?;
    if let Some(limit) = args.limit {
        dataset = dataset.take(limit);
    }
    Ok(Some(dataset))
}

fn attack_spec_for(
    family: AttackFamily,
    config: &ExperimentConfig,
    resources: &TransformResources,
    grammar: Arc<LexiconGrammarChecker>,
) -> AttackSpec {
    let constraints = match family {
        AttackFamily::CharEdit => ConstraintSet::char_profile(),
        AttackFamily::WordSynonym | AttackFamily::WordMlm => {
            ConstraintSet::word_profile(resources.semantic_encoder.clone())
                .with_grammar_checker(grammar)
        }
        AttackFamily::SentenceParaphrase => {
            ConstraintSet::sentence_profile(resources.semantic_encoder.clone())
        }
    };
    let mut spec = AttackSpec::new(family, constraints)
        .with_synonyms(resources.synonyms.clone())
        .with_suggester(resources.suggester.clone())
        .with_paraphraser(resources.paraphraser.clone());
    spec.query_budget = QueryBudget::PerWord {
        factor: config.attack.budget_factor,
        base: config.attack.budget_base,
    };
    spec.mlm_top_k = config.attack.mlm_top_k;
    spec.paraphrase_count = config.attack.paraphrase_count;
    spec.strict_anomaly = config.attack.strict_anomaly;
    spec
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli.config, cli.seed)?;

    match cli.command {
        Command::TrainVictim { data, augment, out } => {
            let augment_kind = augment.as_deref().map(parse_kind).transpose()?;
            if let Some(dataset) = load_user_dataset(&data, Split::Train)? {
                let mut train_set = dataset;
                let mut train_config = TrainConfig {
                    encoder: EncoderSpec::hashed(config.victim.hashed_dim),
                    epochs: config.victim.epochs,
                    learning_rate: config.victim.learning_rate,
                    batch_size: config.victim.batch_size,
                    seed: config.seed,
                    augment_transform: None,
                };
                if let Some(kind) = augment_kind {
                    let resources = resources_from_dataset(&train_set, &data)?;
                    let transform = TransformConfig::new(
                        kind,
                        resources,
                        RngStream::new(config.seed).derive_label("augment"),
                    );
                    train_set = augment_with_transform(&train_set, &transform, config.seed);
                    train_config.augment_transform = Some(kind.name().to_string());
                }
                let model = train_classifier(&train_set, &train_config)?;
                model.save(&out)?;
                println!(
                    "trained victim on {} examples, train accuracy {:.3}, saved to {}",
                    train_set.len(),
                    model.accuracy(&train_set),
                    out.display()
                );
            } else {
                let pipeline = Pipeline::new(config);
                let model = match augment_kind {
                    Some(kind) => pipeline.victim_augmented(kind),
                    None => pipeline.victim(),
                };
                model.save(&out)?;
                println!(
                    "trained desk victim, test accuracy {:.3}, saved to {}",
                    model.accuracy(&pipeline.corpus.test),
                    out.display()
                );
            }
        }

        Command::GenAdv { family, split, out } => {
            let family = parse_family(&family)?;
            let split = match split.as_str() {
                "train" => Split::Train,
                "test" => Split::Test,
                other => return Err(usage(format!("unknown split {other:?}"))),
            };
            let pipeline = Pipeline::new(config);
            let pool = pipeline.adversarial_pool(family, split);
            if let Some(parent) = out.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(&out, serde_json::to_string_pretty(pool.as_ref())?)?;
            println!(
                "generated {} adversarial examples for {} ({:?} split) -> {}",
                pool.len(),
                family.name(),
                split,
                out.display()
            );
        }

        Command::TrainDetector {
            mode,
            family,
            exclude,
            out,
        } => {
            let pipeline = Pipeline::new(config);
            let model = match mode.as_str() {
                "specific" => {
                    let family = family
                        .as_deref()
                        .map(parse_family)
                        .transpose()?
                        .ok_or_else(|| usage("specific mode requires --family"))?;
                    pipeline.specific_detector(family)
                }
                "general" => {
                    let exclude = exclude.as_deref().map(parse_family).transpose()?;
                    pipeline.general_detector(exclude)
                }
                other => return Err(usage(format!("unknown detector mode {other:?}"))),
            };
            model.save(&out)?;
            println!("trained {mode} detector -> {}", out.display());
        }

        Command::Detect {
            detector,
            text,
            file,
            threshold,
        } => {
            if !detector.exists() {
                return Err(usage(format!("detector file {detector:?} does not exist")));
            }
            let model = DetectorModel::load(&detector)?;
            let texts: Vec<String> = match (text, file) {
                (Some(t), None) => vec![t],
                (None, Some(path)) => std::fs::read_to_string(&path)
                    .map_err(|e| usage(format!("text file {path:?}: {e}")))?
                    .lines()
                    .map(str::to_string)
                    .filter(|l| !l.trim().is_empty())
                    .collect(),
                _ => return Err(usage("pass exactly one of --text or --file")),
            };
            for t in texts {
                let result = model.detect(&t, threshold)?;
                println!(
                    "{:.4}\t{}\t{t}",
                    result.degree,
                    if result.flag { "anomalous" } else { "clean" }
                );
            }
        }

        Command::Attack {
            family,
            data,
            model,
            detector,
            out,
        } => {
            let family = parse_family(&family)?;
            let record = if let Some(dataset) = load_user_dataset(&data, Split::Test)? {
                let model_path = model
                    .ok_or_else(|| usage("attacking a dataset file requires --model"))?;
                if !model_path.exists() {
                    return Err(usage(format!("model file {model_path:?} does not exist")));
                }
                let victim = Arc::new(ClassifierModel::load(&model_path)?);
                let endpoint = ClassifierEndpoint::new(victim, OutputMode::Score);
                let resources = resources_from_dataset(&dataset, &data)?;
                let mut vocab: Vec<String> = dataset
                    .examples
                    .iter()
                    .flat_map(|e| textguard::core::tokenize(&e.text))
                    .collect();
                vocab.extend(resources.synonyms.vocabulary());
                let grammar = Arc::new(LexiconGrammarChecker::new(vocab));
                let mut spec = attack_spec_for(family, &config, &resources, grammar);
                if let Some(det_path) = detector {
                    let det = Arc::new(DetectorModel::load(&det_path)?);
                    spec = spec.with_anomaly_constraint(det, config.attack.strict_anomaly);
                }
                run_attack(&spec, &endpoint, &dataset, config.seed, &config.digest())
            } else {
                let pipeline = Pipeline::new(config.clone());
                let mut spec = pipeline.attack_spec(family);
                if let Some(det_path) = detector {
                    let det = Arc::new(DetectorModel::load(&det_path)?);
                    spec = spec.with_anomaly_constraint(det, config.attack.strict_anomaly);
                }
                let endpoint = pipeline.endpoint(pipeline.victim());
                run_attack(
                    &spec,
                    endpoint.as_ref(),
                    &pipeline.attack_eval_set(),
                    config.seed,
                    &config.digest(),
                )
            };
            write_records(std::slice::from_ref(&record), &out)?;
            println!(
                "attack {} done: success rate {:.3}, after-attack accuracy {:.3}, avg queries {:.1} -> {}",
                family.name(),
                record.metrics.attack_success_rate,
                record.metrics.after_attack_accuracy,
                record.metrics.avg_queries,
                out.display()
            );
        }

        Command::Randomize { transform, text } => {
            let kind = parse_kind(&transform)?;
            let pipeline = Pipeline::new(config.clone());
            let transform = pipeline
                .corpus
                .transform(kind, RngStream::new(config.seed).derive_label("randomize"));
            println!("{}", apply(&transform, &text)?);
        }

        Command::Defend {
            family,
            transform,
            adaptive,
            k,
            no_gate,
            out,
        } => {
            let family = parse_family(&family)?;
            let mut config = config;
            if let Some(kind) = transform {
                config.defense.transform = parse_kind(&kind)?.name().to_string();
            }
            if let Some(k) = k {
                config.adaptive.k = k;
            }
            if no_gate {
                config.defense.gate = false;
            }
            let pipeline = Pipeline::new(config.clone());
            let kind = parse_kind(&config.defense.transform)?;
            let victim = pipeline.victim_augmented(kind);
            let inner = pipeline.endpoint(victim);
            let detector = if config.defense.gate {
                Some(pipeline.general_detector(None))
            } else {
                None
            };
            let defended = Arc::new(
                DefendedEndpoint::new(inner, detector, pipeline.defense_transform(config.seed))
                    .with_threshold(config.defense.threshold),
            );
            let spec = pipeline.attack_spec(family);
            let eval = pipeline.attack_eval_set();
            let record = if adaptive {
                evaluate_during_attack_adaptive(
                    &spec,
                    defended,
                    AdaptiveWrapConfig { k: config.adaptive.k },
                    &eval,
                    config.seed,
                    &config.digest(),
                    config.defense.verdict_m,
                )
            } else {
                evaluate_during_attack(
                    &spec,
                    defended.as_ref(),
                    &eval,
                    config.seed,
                    &config.digest(),
                    config.defense.verdict_m,
                )
            };
            write_records(std::slice::from_ref(&record), &out)?;
            println!(
                "defended run ({}, {}): after-attack accuracy {:.3} -> {}",
                family.name(),
                if adaptive { "adaptive" } else { "plain" },
                record.metrics.after_attack_accuracy,
                out.display()
            );
        }

        Command::Evaluate {
            records,
            after_transform,
        } => {
            if !records.exists() {
                return Err(usage(format!("records file {records:?} does not exist")));
            }
            let loaded = read_records(&records)?;
            for (i, record) in loaded.iter().enumerate() {
                let recomputed = textguard::core::recompute_metrics(&record.per_example);
                let consistent = recomputed == record.metrics;
                println!(
                    "record {i}: seed {} examples {} success_rate {:.3} after_attack {:.3} metrics {}",
                    record.seed,
                    record.per_example.len(),
                    recomputed.attack_success_rate,
                    recomputed.after_attack_accuracy,
                    if consistent { "consistent" } else { "INCONSISTENT" }
                );
                if !consistent {
                    bail!("stored metrics do not match recomputation");
                }
            }
            if let Some(kind) = after_transform {
                let kind = parse_kind(&kind)?;
                let pipeline = Pipeline::new(config.clone());
                let endpoint = pipeline.endpoint(pipeline.victim());
                let gold: Vec<(String, String)> = pipeline
                    .corpus
                    .test
                    .examples
                    .iter()
                    .chain(pipeline.corpus.train.examples.iter())
                    .map(|e| (e.id.clone(), e.gold_label.clone()))
                    .collect();
                let transform = pipeline
                    .corpus
                    .transform(kind, RngStream::new(config.seed).derive_label("after"));
                for record in &loaded {
                    let stats = evaluate_after_attack(
                        &record.per_example,
                        &gold,
                        &transform,
                        endpoint.as_ref(),
                        config.seed,
                    );
                    println!(
                        "after-attack randomization: {}/{} restored ({:.1}%), accuracy {:.3} -> {:.3}",
                        stats.restored,
                        stats.successful,
                        stats.restored_fraction * 100.0,
                        stats.accuracy_before,
                        stats.accuracy_after
                    );
                }
            }
        }

        Command::Report {
            records,
            out,
            detector,
        } => {
            if !records.is_dir() {
                return Err(usage(format!("records path {records:?} is not a directory")));
            }
            let mut files: Vec<PathBuf> = std::fs::read_dir(&records)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().map(|e| e == "jsonl").unwrap_or(false))
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(usage(format!("no record files in {records:?}")));
            }
            let mut bundle = ReportBundle::default();
            let mut table = Table::new(
                "metrics",
                &[
                    "run",
                    "seed",
                    "original_accuracy",
                    "after_attack_accuracy",
                    "attack_success_rate",
                    "avg_queries",
                ],
            );
            for file in &files {
                let label = file
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_default();
                for record in read_records(file)? {
                    table.push_row(ReportBundle::metrics_row(&label, &record));
                }
            }
            bundle.tables.push(table);
            if let Some(det_path) = detector {
                let model = DetectorModel::load(&det_path)?;
                let texts: Vec<String> = files
                    .iter()
                    .flat_map(|f| read_records(f).unwrap_or_default())
                    .flat_map(|r| r.per_example.into_iter().map(|o| o.final_text))
                    .collect();
                bundle
                    .histograms
                    .push(("degrees".into(), degree_histogram(&model, &texts, 10)));
            }
            bundle.write_dir(&out)?;
            println!("report written to {}", out.display());
        }
    }
    Ok(())
}
