use std::collections::BTreeMap;

use super::DistanceMatrix;
use crate::error::{Error, Result};

/// Majority label among the `k` nearest training items.
///
/// Neighbors are ranked by `(distance, index)`. Vote ties go to the label
/// with the smallest summed neighbor distance, then to the smallest label.
/// `exclude` removes one training index (for leave-one-out).
pub fn knn_vote<L: Ord + Clone>(
    distances: &[f64],
    labels: &[L],
    k: usize,
    exclude: Option<usize>,
) -> Result<L> {
    if distances.len() != labels.len() {
        return Err(Error::Shape {
            expected: labels.len(),
            found: distances.len(),
        });
    }
    let mut candidates: Vec<usize> = (0..labels.len()).filter(|&i| Some(i) != exclude).collect();
    if candidates.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if k == 0 || k > candidates.len() {
        return Err(Error::param(format!(
            "k must be in 1..={}, got {k}",
            candidates.len()
        )));
    }
    candidates.sort_by(|&a, &b| distances[a].total_cmp(&distances[b]).then(a.cmp(&b)));

    let mut tally: BTreeMap<&L, (usize, f64)> = BTreeMap::new();
    for &i in &candidates[..k] {
        let entry = tally.entry(&labels[i]).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += distances[i];
    }
    // BTreeMap iterates labels in ascending order, so `min_by` keeps the
    // smallest label among exact ties.
    let (label, _) = tally
        .into_iter()
        .min_by(|a, b| b.1 .0.cmp(&a.1 .0).then(a.1 .1.total_cmp(&b.1 .1)))
        .expect("k >= 1");
    Ok(label.clone())
}

/// Classifies each test item from its row of distances to the training set.
pub fn knn_classify<L: Ord + Clone>(
    test_to_train: &[Vec<f64>],
    train_labels: &[L],
    k: usize,
) -> Result<Vec<L>> {
    if train_labels.is_empty() {
        return Err(Error::Empty("training set"));
    }
    test_to_train
        .iter()
        .map(|row| knn_vote(row, train_labels, k, None))
        .collect()
}

/// Leave-one-out k-NN accuracy over a full distance matrix.
pub fn loo_knn_accuracy<L: Ord + Clone>(
    matrix: &DistanceMatrix,
    labels: &[L],
    k: usize,
) -> Result<f64> {
    if labels.len() != matrix.len() {
        return Err(Error::Shape {
            expected: matrix.len(),
            found: labels.len(),
        });
    }
    let mut correct = 0usize;
    for (i, truth) in labels.iter().enumerate() {
        if knn_vote(matrix.row(i), labels, k, Some(i))? == *truth {
            correct += 1;
        }
    }
    Ok(correct as f64 / labels.len() as f64)
}
