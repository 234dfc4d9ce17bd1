//! Analyses behind the plots: detector learning curve, degree-of-anomaly
//! histogram, and the 2-D representation scatter.

use crate::detector::{
    evaluate_detector, project_2d, train_detector, DetectorConfig, DetectorMode, DetectorModel,
    DetectorError, TrainingProvenance,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("pool of {available} adversarial examples cannot cover size {requested}")]
    PoolTooSmall { available: usize, requested: usize },
    #[error("cannot train a detector on zero examples")]
    ZeroSize,
    #[error(transparent)]
    Detector(#[from] DetectorError),
}

/// Train a specific detector at each pool size and record eval accuracy.
/// Returns `(n, accuracy)` pairs in the order of `sizes`.
pub fn learning_curve(
    attack_id: &str,
    normal_pool: &[String],
    adversarial_pool: &[String],
    sizes: &[usize],
    eval: &[(String, bool)],
    config: &DetectorConfig,
) -> Result<Vec<(usize, f64)>, AnalysisError> {
    let max = sizes.iter().copied().max().unwrap_or(0);
    if sizes.iter().any(|n| *n == 0) {
        return Err(AnalysisError::ZeroSize);
    }
    if adversarial_pool.len() < max || normal_pool.len() < max {
        return Err(AnalysisError::PoolTooSmall {
            available: adversarial_pool.len().min(normal_pool.len()),
            requested: max,
        });
    }
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let model = train_detector(
            &normal_pool[..n],
            &adversarial_pool[..n],
            config,
            DetectorMode::Specific {
                attack_id: attack_id.to_string(),
            },
            TrainingProvenance::default(),
        )?;
        let metrics = evaluate_detector(&model, eval)?;
        points.push((n, metrics.accuracy));
    }
    Ok(points)
}

/// Histogram of degree-of-anomaly scores over `[0, 1]` with `bins`
/// half-open equal-width bins (the last bin closed). Counts sum to the
/// number of scoreable texts.
pub fn degree_histogram(model: &DetectorModel, texts: &[String], bins: usize) -> Vec<u64> {
    let bins = bins.max(1);
    let mut counts = vec![0u64; bins];
    for text in texts {
        if let Ok(degree) = model.degree_of_anomaly(None, text) {
            let idx = ((degree * bins as f64).floor() as usize).min(bins - 1);
            counts[idx] += 1;
        }
    }
    counts
}

/// One plotted representation point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub adversarial: bool,
}

/// Project clean and adversarial representations to 2-D with the
/// deterministic linear projection; identical inputs give identical plots.
pub fn projection_scatter(
    model: &DetectorModel,
    clean: &[String],
    adversarial: &[String],
) -> Vec<ScatterPoint> {
    let mut texts: Vec<String> = Vec::with_capacity(clean.len() + adversarial.len());
    texts.extend(clean.iter().cloned());
    texts.extend(adversarial.iter().cloned());
    let matrix = model.export_representations(&texts);
    let projected = project_2d(&matrix);
    projected
        .into_iter()
        .enumerate()
        .map(|(i, [x, y])| ScatterPoint {
            x,
            y,
            adversarial: i >= clean.len(),
        })
        .collect()
}

/// Separation diagnostic for a scatter: distance between class centroids in
/// units of the pooled per-axis standard deviation.
pub fn centroid_separation(points: &[ScatterPoint]) -> f64 {
    let (clean, adv): (Vec<&ScatterPoint>, Vec<&ScatterPoint>) =
        points.iter().partition(|p| !p.adversarial);
    if clean.is_empty() || adv.is_empty() {
        return 0.0;
    }
    let centroid = |pts: &[&ScatterPoint]| -> (f64, f64) {
        let n = pts.len() as f64;
        (
            pts.iter().map(|p| p.x).sum::<f64>() / n,
            pts.iter().map(|p| p.y).sum::<f64>() / n,
        )
    };
    let (cx, cy) = centroid(&clean);
    let (ax, ay) = centroid(&adv);
    let dist = ((cx - ax).powi(2) + (cy - ay).powi(2)).sqrt();

    let pooled_var = |pts: &[&ScatterPoint], mx: f64, my: f64| -> f64 {
        pts.iter()
            .map(|p| (p.x - mx).powi(2) + (p.y - my).powi(2))
            .sum::<f64>()
            / pts.len() as f64
    };
    let var = (pooled_var(&clean, cx, cy) + pooled_var(&adv, ax, ay)) / 2.0;
    if var == 0.0 {
        return if dist > 0.0 { f64::INFINITY } else { 0.0 };
    }
    dist / var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clean(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| format!("the movie was {} today", ["good", "fine", "great"][i % 3]))
            .collect()
    }

    fn typos(n: usize) -> Vec<String> {
        clean(n)
            .into_iter()
            .map(|t| t.replace('o', "0"))
            .collect()
    }

    fn config() -> DetectorConfig {
        DetectorConfig {
            hashed_dim: 64,
            epochs: 30,
            ..DetectorConfig::default()
        }
    }

    fn eval_set(n: usize) -> Vec<(String, bool)> {
        clean(n)
            .into_iter()
            .map(|t| (t, false))
            .chain(typos(n).into_iter().map(|t| (t, true)))
            .collect()
    }

    #[test]
    fn curve_shapes_and_errors() {
        let points = learning_curve(
            "char_edit",
            &clean(40),
            &typos(40),
            &[10, 40],
            &eval_set(15),
            &config(),
        )
        .unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[0].0, 10);
        assert!(points[1].1 >= 0.5);

        assert!(matches!(
            learning_curve("x", &clean(5), &typos(5), &[10], &eval_set(3), &config()),
            Err(AnalysisError::PoolTooSmall { .. })
        ));
        assert!(matches!(
            learning_curve("x", &clean(5), &typos(5), &[0], &eval_set(3), &config()),
            Err(AnalysisError::ZeroSize)
        ));
    }

    #[test]
    fn histogram_conserves_mass() {
        let model = crate::detector::train_detector(
            &clean(30),
            &typos(30),
            &config(),
            DetectorMode::General,
            TrainingProvenance::default(),
        )
        .unwrap();
        let texts = clean(12);
        let counts = degree_histogram(&model, &texts, 10);
        assert_eq!(counts.len(), 10);
        assert_eq!(counts.iter().sum::<u64>(), 12);
    }

    #[test]
    fn histogram_low_degrees_land_in_bin_zero() {
        // a detector trained on wildly different classes scores clean texts
        // near zero
        let model = crate::detector::train_detector(
            &clean(30),
            &typos(30),
            &config(),
            DetectorMode::General,
            TrainingProvenance::default(),
        )
        .unwrap();
        let counts = degree_histogram(&model, &clean(10), 10);
        assert!(counts[0] >= 8, "expected mass in bin 0: {counts:?}");
    }

    #[test]
    fn scatter_counts_and_determinism() {
        let model = crate::detector::train_detector(
            &clean(30),
            &typos(30),
            &config(),
            DetectorMode::General,
            TrainingProvenance::default(),
        )
        .unwrap();
        let points = projection_scatter(&model, &clean(7), &typos(5));
        assert_eq!(points.len(), 12);
        assert_eq!(points.iter().filter(|p| p.adversarial).count(), 5);
        let again = projection_scatter(&model, &clean(7), &typos(5));
        assert_eq!(points, again);
        assert!(centroid_separation(&points) > 1.0);
    }
}
