//! Focused diagnostics: what does the fill-in attack substitute, what
//! semantic similarity do those candidates score, and how do detector
//! hyperparameters move polarization.

use textguard::attacks::{run_attack, AttackFamily, AttackStatus};
use textguard::constraints::cosine_similarity;
use textguard::core::{tokenize, Split};
use textguard::detector::{
    evaluate_detector, train_detector, DetectorConfig, DetectorMode, TrainingProvenance,
};
use textguard::harness::{degree_histogram, ExperimentConfig, Pipeline};

fn main() {
    let mut config = ExperimentConfig::with_seed(17);
    config.corpus.n_train = 800;
    config.corpus.n_test = 300;
    config.corpus.attack_eval = 100;
    config.pool.per_family = 400;
    config.pool.eval_per_family = 300;
    let pipeline = Pipeline::new(config.clone()).with_cache_dir(None);

    // --- polarity scores of typical words
    println!("== induced polarity ==");
    polarity_dump(&pipeline);
    let sem = &pipeline.corpus.semantic_encoder;
    println!("== semantic veto check ==");
    for (orig, swap) in [
        ("the movie was really great .", "the movie was really dull ."),
        ("the movie was really great .", "the movie was really monotonous ."),
        ("the movie was really great .", "the movie was really fine ."),
        ("the movie was really great .", "the movie was really the ."),
        ("the story was great and moving .", "the story was dull and moving ."),
    ] {
        let sim = cosine_similarity(&sem.embed(orig), &sem.embed(swap)).unwrap();
        println!("  sim {:>6.3}  {orig:?} -> {swap:?}", sim);
    }

    // --- what does the mlm attack actually substitute?
    let victim = pipeline.victim();
    let endpoint = pipeline.endpoint(victim.clone());
    let eval = pipeline.attack_eval_set();
    let spec = pipeline.attack_spec(AttackFamily::WordMlm);
    let record = run_attack(&spec, endpoint.as_ref(), &eval, 101, "diag");
    println!("== fill-in attack substitutions (first 15 successes) ==");
    let mut shown = 0;
    for o in &record.per_example {
        if o.status != AttackStatus::Success || shown >= 15 {
            continue;
        }
        let a = tokenize(&o.original_text);
        let b = tokenize(&o.final_text);
        let diffs: Vec<String> = a
            .iter()
            .zip(&b)
            .filter(|(x, y)| x != y)
            .map(|(x, y)| format!("{x}->{y}"))
            .collect();
        let sim = cosine_similarity(
            &sem.embed(&o.original_text),
            &sem.embed(&o.final_text),
        )
        .unwrap();
        println!("  sim {sim:>6.3} {diffs:?}");
        println!("        orig: {}", o.original_text);
        println!("        finl: {}", o.final_text);
        shown += 1;
    }

    // --- detector hyperparameter sweep for polarization
    println!("== detector sweep (general pool) ==");
    let mut normal = Vec::new();
    let mut adversarial = Vec::new();
    for family in AttackFamily::ALL {
        let pool = pipeline.adversarial_pool(family, Split::Train);
        for pair in pool.iter() {
            normal.push(pair.original.clone());
            adversarial.push(pair.adversarial.clone());
        }
    }
    let char_eval = pipeline.detector_eval_set(AttackFamily::CharEdit);
    let syn_eval = pipeline.detector_eval_set(AttackFamily::WordSynonym);
    let mlm_eval = pipeline.detector_eval_set(AttackFamily::WordMlm);

    let mut mixed: Vec<String> = pipeline
        .corpus
        .test
        .examples
        .iter()
        .take(250)
        .map(|e| e.text.clone())
        .collect();
    for family in AttackFamily::ALL {
        let pool = pipeline.adversarial_pool(family, Split::Test);
        mixed.extend(pool.iter().take(63).map(|p| p.adversarial.clone()));
    }

    for (label, epochs, lr, dropout, batch) in [
        ("e120 lr2.0 d0.02 b16", 120usize, 2.0, 0.02, 16usize),
        ("e240 lr2.0 d0.02 b16", 240, 2.0, 0.02, 16),
        ("e240 lr2.0 d0.00 b16", 240, 2.0, 0.00, 16),
        ("e240 lr2.0 d0.02 b8 ", 240, 2.0, 0.02, 8),
        ("e320 lr3.0 d0.02 b8 ", 320, 3.0, 0.02, 8),
        ("e240 lr4.0 d0.02 b16", 240, 4.0, 0.02, 16),
    ] {
        let cfg = DetectorConfig {
            hashed_dim: 512,
            epochs,
            learning_rate: lr,
            batch_size: batch,
            dropout,
            seed: 5,
        };
        let model = train_detector(
            &normal,
            &adversarial,
            &cfg,
            DetectorMode::General,
            TrainingProvenance::default(),
        )
        .unwrap();
        let hist = degree_histogram(&model, &mixed, 10);
        let total: u64 = hist.iter().sum();
        let extreme = (hist[0] + hist[9]) as f64 / total as f64;
        let acc = |eval: &[(String, bool)]| evaluate_detector(&model, eval).unwrap().accuracy;
        println!(
            "  {label}: polarization {extreme:.3} char {:.3} syn {:.3} mlm {:.3}",
            acc(&char_eval),
            acc(&syn_eval),
            acc(&mlm_eval)
        );
    }
}

#[allow(dead_code)]
fn polarity_dump(pipeline: &Pipeline) {
    use textguard::constraints::PolarityLexicon;
    let texts: Vec<&str> = pipeline
        .corpus
        .train
        .examples
        .iter()
        .map(|e| e.text.as_str())
        .collect();
    let raw = PolarityLexicon::induce(texts.iter().copied());
    let prop = raw.clone().propagate_synonyms(&pipeline.corpus.synonyms);
    for w in [
        "good", "great", "fine", "decent", "wonderful", "excellent", "moving", "touching",
        "slow", "sluggish", "plodding", "languid", "bad", "dull", "boring", "tedious",
        "monotonous", "messy", "funny", "charming", "silly", "clever", "strong", "movie",
        "story", "was", "really",
    ] {
        println!("  {w:>12}: raw {:>6.3} propagated {:>6.3}", raw.score(w), prop.score(w));
    }
}
