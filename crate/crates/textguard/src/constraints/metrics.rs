//! The perceptual-difference metrics themselves. All pure functions.

use super::{ConstraintError, Result};
use crate::core::tokenize;
use std::collections::BTreeSet;

/// Cosine similarity `x·y / (‖x‖‖y‖)` in [-1, 1].
pub fn cosine_similarity(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(ConstraintError::DimensionMismatch(x.len(), y.len()));
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let ny: f64 = y.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(ConstraintError::ZeroVector);
    }
    Ok(dot / (nx * ny))
}

/// Jaccard similarity `|A∩B| / |A∪B|` over deduplicated word sets.
pub fn jaccard(a: &str, b: &str) -> Result<f64> {
    let set_a: BTreeSet<String> = tokenize(a).into_iter().collect();
    let set_b: BTreeSet<String> = tokenize(b).into_iter().collect();
    if set_a.is_empty() && set_b.is_empty() {
        return Err(ConstraintError::BothEmpty);
    }
    let intersection = set_a.intersection(&set_b).count();
    let union = set_a.union(&set_b).count();
    Ok(intersection as f64 / union as f64)
}

/// Character-level Levenshtein distance (minimal insert/delete/substitute
/// count), two-row dynamic program.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a_chars: Vec<char> = a.chars().collect();
    let b_chars: Vec<char> = b.chars().collect();
    if a_chars.is_empty() {
        return b_chars.len();
    }
    if b_chars.is_empty() {
        return a_chars.len();
    }
    let mut prev: Vec<usize> = (0..=b_chars.len()).collect();
    let mut cur = vec![0usize; b_chars.len() + 1];
    for (i, ca) in a_chars.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b_chars.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b_chars.len()]
}

/// Fraction of word positions that differ between two equal-length word
/// sequences. A length mismatch signals a non-substitution edit and is an
/// error.
pub fn perturbation_rate(original: &str, adversarial: &str) -> Result<f64> {
    let orig = tokenize(original);
    let adv = tokenize(adversarial);
    if orig.len() != adv.len() {
        return Err(ConstraintError::LengthMismatch(orig.len(), adv.len()));
    }
    if orig.is_empty() {
        return Err(ConstraintError::EmptyText);
    }
    let changed = orig.iter().zip(&adv).filter(|(a, b)| a != b).count();
    Ok(changed as f64 / orig.len() as f64)
}
