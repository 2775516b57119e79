//! Mutual-information filter: equal-frequency binning of feature and
//! response, plug-in discrete MI on the binned contingency table.
//!
//! Bin assignments depend only on value ranks (ties broken by sample index),
//! so scores are exactly invariant under strictly monotone transforms of a
//! feature.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Equal-frequency bin assignment by rank; sample `order[r]` lands in bin
/// `r * bins / n`.
fn bin_by_rank(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut assignment = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        assignment[i] = rank * bins / n;
    }
    assignment
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Plug-in discrete MI (in nats) of two bin assignments.
fn discrete_mi(xb: &[usize], yb: &[usize], bins: usize) -> f64 {
    let n = xb.len() as f64;
    let mut joint = vec![0.0f64; bins * bins];
    let mut px = vec![0.0f64; bins];
    let mut py = vec![0.0f64; bins];
    for (&a, &b) in xb.iter().zip(yb) {
        joint[a * bins + b] += 1.0;
        px[a] += 1.0;
        py[b] += 1.0;
    }
    let mut mi = 0.0;
    for a in 0..bins {
        for b in 0..bins {
            let c = joint[a * bins + b];
            if c > 0.0 {
                mi += (c / n) * ((c * n) / (px[a] * py[b])).ln();
            }
        }
    }
    mi
}

/// Estimated I(x_j; y) for every feature. Constant features score 0.
pub fn mi_scores(dataset: &Dataset, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(Error::Config(format!("bins must be >= 2, got {bins}")));
    }
    let n = dataset.num_samples();
    let bins = bins.min(n);
    let yb = bin_by_rank(dataset.response(), bins);
    let mut column = vec![0.0; n];
    let mut scores = Vec::with_capacity(dataset.num_features());
    for j in 0..dataset.num_features() {
        for (i, v) in column.iter_mut().enumerate() {
            *v = dataset.features().at(i, j);
        }
        if is_constant(&column) {
            scores.push(0.0);
            continue;
        }
        let xb = bin_by_rank(&column, bins);
        scores.push(discrete_mi(&xb, &yb, bins));
    }
    Ok(scores)
}

/// The `t` highest-MI feature positions (1-based), ties broken by lower
/// index, returned sorted ascending.
pub fn mi_select(dataset: &Dataset, t: usize, bins: usize) -> Result<Vec<usize>> {
    if t < 1 || t > dataset.num_features() {
        return Err(Error::Config(format!(
            "target size {t} out of range 1..={}",
            dataset.num_features()
        )));
    }
    let scores = mi_scores(dataset, bins)?;
    let mut ranked: Vec<usize> = (0..scores.len()).collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut selected: Vec<usize> = ranked[..t].iter().map(|&j| j + 1).collect();
    selected.sort_unstable();
    Ok(selected)
}
