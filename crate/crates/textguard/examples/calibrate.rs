//! Desk-scale calibration driver: prints every trend number the acceptance
//! suite checks, so thresholds can be verified against real runs.

use std::sync::Arc;
use textguard::attacks::{
    run_attack, AdaptiveWrapConfig, AttackFamily, AttackStatus,
};
use textguard::core::{RngStream, Split};
use textguard::defense::{
    evaluate_after_attack, evaluate_during_attack, evaluate_during_attack_adaptive,
    DefendedEndpoint,
};
use textguard::detector::evaluate_detector;
use textguard::harness::{
    degree_histogram, learning_curve, ExperimentConfig, Pipeline,
};
use textguard::transforms::TransformKind;
use textguard::victim::TextClassifierEndpoint;

fn main() {
    let t0 = std::time::Instant::now();
    let mut config = ExperimentConfig::with_seed(17);
    config.corpus.n_train = 2000;
    config.corpus.n_test = 500;
    config.corpus.attack_eval = 150;
    config.pool.per_family = 500;
    config.pool.eval_per_family = 500;
    let pipeline = Pipeline::new(config.clone()).with_cache_dir(None);

    let victim = pipeline.victim();
    println!(
        "[victim] train acc {:.3} test acc {:.3}  ({:?})",
        victim.accuracy(&pipeline.corpus.train),
        victim.accuracy(&pipeline.corpus.test),
        t0.elapsed()
    );

    // undefended attack runs on the eval subset
    let eval = pipeline.attack_eval_set();
    let endpoint = pipeline.endpoint(victim.clone());
    let mut undefended = std::collections::BTreeMap::new();
    for family in AttackFamily::ALL {
        let spec = pipeline.attack_spec(family);
        let record = run_attack(&spec, endpoint.as_ref(), &eval, 101, "cal");
        println!(
            "[undefended {}] orig_acc {:.3} after_acc {:.3} success {:.3} queries {:.1}  ({:?})",
            family.name(),
            record.metrics.original_accuracy,
            record.metrics.after_attack_accuracy,
            record.metrics.attack_success_rate,
            record.metrics.avg_queries,
            t0.elapsed()
        );
        undefended.insert(family.name(), record);
    }

    // pools + detectors
    for family in AttackFamily::ALL {
        let pool = pipeline.adversarial_pool(family, Split::Train);
        println!("[pool {}] train pool size {}", family.name(), pool.len());
    }
    for family in AttackFamily::ALL {
        let det = pipeline.specific_detector(family);
        let eval_set = pipeline.detector_eval_set(family);
        let metrics = evaluate_detector(&det, &eval_set).unwrap();
        println!(
            "[specific {}] eval n {} acc {:.3} prec {:.3} rec {:.3} f1 {:.3}  ({:?})",
            family.name(),
            eval_set.len(),
            metrics.accuracy,
            metrics.precision,
            metrics.recall,
            metrics.f1,
            t0.elapsed()
        );
    }

    let general = pipeline.general_detector(None);
    for family in AttackFamily::ALL {
        let eval_set = pipeline.detector_eval_set(family);
        let metrics = evaluate_detector(&general, &eval_set).unwrap();
        println!(
            "[general {}] acc {:.3} f1 {:.3}",
            family.name(),
            metrics.accuracy,
            metrics.f1
        );
    }
    // held-out family: train general without word_synonym, eval on it
    let held_out = pipeline.general_detector(Some(AttackFamily::WordSynonym));
    let eval_set = pipeline.detector_eval_set(AttackFamily::WordSynonym);
    let metrics = evaluate_detector(&held_out, &eval_set).unwrap();
    println!(
        "[general held-out word_synonym] acc {:.3} f1 {:.3}  ({:?})",
        metrics.accuracy,
        metrics.f1,
        t0.elapsed()
    );

    // anomaly constraint effect
    for family in [AttackFamily::CharEdit, AttackFamily::WordMlm, AttackFamily::WordSynonym] {
        let constrained_spec = pipeline
            .attack_spec(family)
            .with_anomaly_constraint(general.clone(), false);
        let record = run_attack(&constrained_spec, endpoint.as_ref(), &eval, 101, "cal");
        let unc = &undefended[family.name()];
        println!(
            "[constrained {}] success {:.3} vs unconstrained {:.3} (ratio {:.2})",
            family.name(),
            record.metrics.attack_success_rate,
            unc.metrics.attack_success_rate,
            record.metrics.attack_success_rate / unc.metrics.attack_success_rate.max(1e-9)
        );
        // subset property
        let unc_successes: std::collections::BTreeSet<&String> = unc
            .per_example
            .iter()
            .filter(|o| o.status == AttackStatus::Success)
            .map(|o| &o.example_id)
            .collect();
        let subset = record
            .per_example
            .iter()
            .filter(|o| o.status == AttackStatus::Success)
            .all(|o| unc_successes.contains(&o.example_id));
        println!("  subset property: {subset}");
    }

    // invalidation: one synonym pass on successful adversarial examples
    let gold: Vec<(String, String)> = eval
        .examples
        .iter()
        .map(|e| (e.id.clone(), e.gold_label.clone()))
        .collect();
    for family in [AttackFamily::CharEdit, AttackFamily::WordSynonym, AttackFamily::WordMlm] {
        let mut fractions = Vec::new();
        for seed in [1u64, 2, 3] {
            let transform = pipeline
                .corpus
                .transform(TransformKind::SynonymSubstitution, RngStream::new(seed));
            let stats = evaluate_after_attack(
                &undefended[family.name()].per_example,
                &gold,
                &transform,
                endpoint.as_ref(),
                seed,
            );
            fractions.push(stats.restored_fraction);
        }
        let mean = fractions.iter().sum::<f64>() / fractions.len() as f64;
        println!("[invalidate {}] 3-seed mean restored {:.3} {:?}", family.name(), mean, fractions);
    }

    // during-attack defense, gate off (pure randomization)
    let kind = TransformKind::SynonymSubstitution;
    let victim_aug = pipeline.victim_augmented(kind);
    println!(
        "[victim-aug] clean test acc {:.3}  ({:?})",
        victim_aug.accuracy(&pipeline.corpus.test),
        t0.elapsed()
    );
    let mut during_improvements = Vec::new();
    for family in AttackFamily::ALL {
        let mut defended_accs = Vec::new();
        for seed in [201u64, 202, 203] {
            let inner = pipeline.endpoint(victim_aug.clone());
            let defended = DefendedEndpoint::new(
                inner,
                None,
                pipeline.defense_transform(seed),
            );
            let spec = pipeline.attack_spec(family);
            let record = evaluate_during_attack(&spec, &defended, &eval, seed, "cal", 1);
            defended_accs.push(record.metrics.after_attack_accuracy);
        }
        let mean = defended_accs.iter().sum::<f64>() / defended_accs.len() as f64;
        let base = undefended[family.name()].metrics.after_attack_accuracy;
        during_improvements.push(mean - base);
        println!(
            "[during {}] defended after_acc {:.3} vs undefended {:.3} (+{:.3})",
            family.name(),
            mean,
            base,
            mean - base
        );
    }
    println!(
        "[during avg improvement] {:.3}",
        during_improvements.iter().sum::<f64>() / during_improvements.len() as f64
    );

    // universal framework: gate on, general detector, augmented victim
    let mut clean_accs = Vec::new();
    let mut framework_improvements = Vec::new();
    for family in AttackFamily::ALL {
        let mut accs = Vec::new();
        for seed in [301u64, 302, 303] {
            let inner = pipeline.endpoint(victim_aug.clone());
            let defended = DefendedEndpoint::new(
                inner,
                Some(general.clone()),
                pipeline.defense_transform(seed),
            );
            // clean accuracy through the gate
            if family == AttackFamily::CharEdit {
                let correct = pipeline
                    .corpus
                    .test
                    .examples
                    .iter()
                    .filter(|e| defended.query(None, &e.text).label == e.gold_label)
                    .count();
                clean_accs.push(correct as f64 / pipeline.corpus.test.len() as f64);
            }
            let spec = pipeline.attack_spec(family);
            let record = evaluate_during_attack(&spec, &defended, &eval, seed, "cal", 1);
            accs.push(record.metrics.after_attack_accuracy);
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let base = undefended[family.name()].metrics.after_attack_accuracy;
        framework_improvements.push(mean - base);
        println!(
            "[framework {}] defended after_acc {:.3} vs undefended {:.3} (+{:.3})  ({:?})",
            family.name(),
            mean,
            base,
            mean - base,
            t0.elapsed()
        );
    }
    let undef_clean = victim.accuracy(&pipeline.corpus.test);
    let def_clean = clean_accs.iter().sum::<f64>() / clean_accs.len().max(1) as f64;
    println!(
        "[framework clean] defended {:.3} vs undefended {:.3} (diff {:.3})",
        def_clean,
        undef_clean,
        (def_clean - undef_clean).abs()
    );

    // adaptive attack vs plain, word families
    for family in [AttackFamily::WordSynonym, AttackFamily::WordMlm] {
        let mut plain_accs = Vec::new();
        let mut adaptive_accs = Vec::new();
        for seed in [401u64, 402, 403] {
            let inner = pipeline.endpoint(victim_aug.clone());
            let defended = Arc::new(DefendedEndpoint::new(
                inner,
                Some(general.clone()),
                pipeline.defense_transform(seed),
            ));
            let spec = pipeline.attack_spec(family);
            let plain = evaluate_during_attack(&spec, defended.as_ref(), &eval, seed, "cal", 1);
            plain_accs.push(plain.metrics.after_attack_accuracy);
            let adaptive = evaluate_during_attack_adaptive(
                &spec,
                defended,
                AdaptiveWrapConfig { k: 5 },
                &eval,
                seed,
                "cal",
                1,
            );
            adaptive_accs.push(adaptive.metrics.after_attack_accuracy);
        }
        let plain = plain_accs.iter().sum::<f64>() / 3.0;
        let adaptive = adaptive_accs.iter().sum::<f64>() / 3.0;
        println!(
            "[adaptive {}] plain {:.3} adaptive {:.3} (drop {:.3})  ({:?})",
            family.name(),
            plain,
            adaptive,
            plain - adaptive,
            t0.elapsed()
        );
    }

    // polarization
    let char_pool = pipeline.adversarial_pool(AttackFamily::CharEdit, Split::Test);
    let syn_pool = pipeline.adversarial_pool(AttackFamily::WordSynonym, Split::Test);
    let mut texts: Vec<String> = pipeline
        .corpus
        .test
        .examples
        .iter()
        .take(250)
        .map(|e| e.text.clone())
        .collect();
    texts.extend(char_pool.iter().take(125).map(|p| p.adversarial.clone()));
    texts.extend(syn_pool.iter().take(125).map(|p| p.adversarial.clone()));
    let hist = degree_histogram(&general, &texts, 10);
    let total: u64 = hist.iter().sum();
    let extreme = hist[0] + hist[9];
    println!(
        "[polarization] {:.3} of {} in extreme bins {:?}",
        extreme as f64 / total as f64,
        total,
        hist
    );

    // learning curve
    let char_pool_train = pipeline.adversarial_pool(AttackFamily::CharEdit, Split::Train);
    let syn_pool_train = pipeline.adversarial_pool(AttackFamily::WordSynonym, Split::Train);
    let mut det_config = textguard::detector::DetectorConfig::default();
    det_config.hashed_dim = config.detector.hashed_dim;
    det_config.epochs = config.detector.epochs;
    for (name, pool, eval_family) in [
        ("char", &char_pool_train, AttackFamily::CharEdit),
        ("word", &syn_pool_train, AttackFamily::WordSynonym),
    ] {
        let normal: Vec<String> = pool.iter().map(|p| p.original.clone()).collect();
        let adv: Vec<String> = pool.iter().map(|p| p.adversarial.clone()).collect();
        let eval_set = pipeline.detector_eval_set(eval_family);
        let points = learning_curve(name, &normal, &adv, &[10, 100], &eval_set, &det_config);
        println!("[curve {name}] {points:?}");
    }

    println!("total time {:?}", t0.elapsed());
}
