use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{AssetKind, ModelDocument, Network, SnapshotSet};

/// Contiguous grouping of snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segmentation {
    /// Segment id of every original snapshot (non-decreasing).
    pub assignment: Vec<usize>,
    /// Hours represented by each segment.
    pub weights: Vec<f64>,
    /// Weighted mean of each input series per segment (`segments × series`).
    pub values: Vec<Vec<f64>>,
}

impl Segmentation {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weighted segment means of a profile defined on the original snapshots.
    pub fn reduce(&self, profile: &[f64], original_weights: &[f64]) -> Vec<f64> {
        let mut sums = vec![0.0; self.len()];
        for ((&s, &v), &w) in self.assignment.iter().zip(profile).zip(original_weights) {
            sums[s] += v * w;
        }
        sums.iter().zip(&self.weights).map(|(s, w)| s / w).collect()
    }
}

/// Greedy agglomerative segmentation of `series` (one row per snapshot) into `n` contiguous
/// segments. Each step merges the adjacent pair whose merge increases the weighted
/// within-segment sum of squares least, on per-series standardised values; ties go to the
/// earliest pair.
pub fn segment(series: &[Vec<f64>], weights: &[f64], n: usize) -> Result<Segmentation> {
    let t = series.len();
    if t == 0 {
        return Err(Error::InvalidArgument("cannot segment an empty series matrix".into()));
    }
    if weights.len() != t {
        return Err(Error::Dimension(format!("{} weights for {t} snapshots", weights.len())));
    }
    if n == 0 || n > t {
        return Err(Error::InvalidArgument(format!("segment count {n} outside 1..={t}")));
    }
    let s = series[0].len();
    if series.iter().any(|r| r.len() != s) {
        return Err(Error::Dimension("ragged series matrix".into()));
    }
    if series.iter().flatten().any(|v| !v.is_finite()) || weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidArgument("series must be finite and weights positive".into()));
    }

    let scale: Vec<f64> = (0..s)
        .map(|j| {
            let mean = series.iter().map(|r| r[j]).sum::<f64>() / t as f64;
            let var = series.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / t as f64;
            if var > 0.0 {
                1.0 / var.sqrt()
            } else {
                0.0
            }
        })
        .collect();

    // Doubly linked list of live segments with their weight and standardised mean.
    let mut weight: Vec<f64> = weights.to_vec();
    let mut mean: Vec<Vec<f64>> = series.iter().map(|r| r.iter().zip(&scale).map(|(v, k)| v * k).collect()).collect();
    let mut next: Vec<Option<usize>> = (0..t).map(|i| (i + 1 < t).then_some(i + 1)).collect();
    let mut prev: Vec<Option<usize>> = (0..t).map(|i| i.checked_sub(1)).collect();
    let merge_cost = |a: usize, b: usize, weight: &[f64], mean: &[Vec<f64>]| -> f64 {
        let d: f64 = mean[a].iter().zip(&mean[b]).map(|(x, y)| (x - y).powi(2)).sum();
        weight[a] * weight[b] / (weight[a] + weight[b]) * d
    };
    // cost[i] = cost of merging live segment i with its successor.
    let mut cost: Vec<f64> =
        (0..t).map(|i| next[i].map_or(f64::INFINITY, |j| merge_cost(i, j, &weight, &mean))).collect();
    let mut alive = vec![true; t];
    let mut live = t;
    while live > n {
        let mut best = None;
        let mut best_cost = f64::INFINITY;
        let mut i = Some(0);
        while let Some(k) = i {
            if next[k].is_some() && (best.is_none() || cost[k] < best_cost) {
                best = Some(k);
                best_cost = cost[k];
            }
            i = next[k];
        }
        let a = best.expect("at least two live segments");
        let b = next[a].expect("a has a successor");
        let (wa, wb) = (weight[a], weight[b]);
        let merged: Vec<f64> = mean[a].iter().zip(&mean[b]).map(|(x, y)| (wa * x + wb * y) / (wa + wb)).collect();
        mean[a] = merged;
        weight[a] = wa + wb;
        next[a] = next[b];
        if let Some(c) = next[b] {
            prev[c] = Some(a);
        }
        alive[b] = false;
        live -= 1;
        cost[a] = next[a].map_or(f64::INFINITY, |c| merge_cost(a, c, &weight, &mean));
        if let Some(p) = prev[a] {
            cost[p] = merge_cost(p, a, &weight, &mean);
        }
    }

    // A merged segment keeps the index of its first snapshot.
    let starts: Vec<usize> = (0..t).filter(|&i| alive[i]).collect();
    let mut assignment = vec![0; t];
    for (seg, &s0) in starts.iter().enumerate() {
        let end = starts.get(seg + 1).copied().unwrap_or(t);
        assignment[s0..end].iter_mut().for_each(|a| *a = seg);
    }
    let mut seg_weights = vec![0.0; starts.len()];
    for (i, &a) in assignment.iter().enumerate() {
        seg_weights[a] += weights[i];
    }
    let mut values = vec![vec![0.0; s]; starts.len()];
    for (i, &a) in assignment.iter().enumerate() {
        for j in 0..s {
            values[a][j] += series[i][j] * weights[i];
        }
    }
    for (row, w) in values.iter_mut().zip(&seg_weights) {
        row.iter_mut().for_each(|v| *v /= w);
    }
    Ok(Segmentation { assignment, weights: seg_weights, values })
}

/// Every time-varying profile of the network as columns of a `snapshots × series` matrix.
pub fn network_series(network: &Network) -> Vec<Vec<f64>> {
    let n = network.snapshots.len();
    let mut cols: Vec<&Vec<f64>> = Vec::new();
    for a in &network.assets {
        if a.availability.len() == n {
            cols.push(&a.availability);
        }
        cols.extend(a.availability_variants.values().filter(|v| v.len() == n));
        if a.kind == AssetKind::Load && a.demand.len() == n {
            cols.push(&a.demand);
        }
    }
    (0..n).map(|t| cols.iter().map(|c| c[t]).collect()).collect()
}

pub fn document_series(doc: &ModelDocument) -> Vec<Vec<f64>> {
    let n = doc.snapshots.weights.len();
    let mut cols: Vec<&Vec<f64>> = Vec::new();
    for a in &doc.assets {
        if a.availability.len() == n {
            cols.push(&a.availability);
        }
        cols.extend(a.availability_variants.values().filter(|v| v.len() == n));
        if a.demand.len() == n {
            cols.push(&a.demand);
        }
    }
    (0..n).map(|t| cols.iter().map(|c| c[t]).collect()).collect()
}

fn check_fit(seg: &Segmentation, n: usize) -> Result<()> {
    if seg.assignment.len() != n {
        return Err(Error::Dimension(format!("segmentation covers {} snapshots, model has {n}", seg.assignment.len())));
    }
    Ok(())
}

/// Replace every profile by its segment means and the snapshot weights by segment weights.
pub fn apply_segmentation(network: &Network, seg: &Segmentation) -> Result<Network> {
    let n = network.snapshots.len();
    check_fit(seg, n)?;
    let w = &network.snapshots.weights;
    let mut out = network.clone();
    for a in &mut out.assets {
        if a.availability.len() == n {
            a.availability = seg.reduce(&a.availability, w);
        }
        for v in a.availability_variants.values_mut() {
            if v.len() == n {
                *v = seg.reduce(v, w);
            }
        }
        if a.demand.len() == n {
            a.demand = seg.reduce(&a.demand, w);
        }
    }
    out.snapshots = SnapshotSet { weights: seg.weights.clone(), hours: network.snapshots.hours };
    Ok(out)
}

pub fn apply_segmentation_doc(doc: &ModelDocument, seg: &Segmentation) -> Result<ModelDocument> {
    let n = doc.snapshots.weights.len();
    check_fit(seg, n)?;
    let w = doc.snapshots.weights.clone();
    let mut out = doc.clone();
    for a in &mut out.assets {
        if a.availability.len() == n {
            a.availability = seg.reduce(&a.availability, &w);
        }
        for v in a.availability_variants.values_mut() {
            if v.len() == n {
                *v = seg.reduce(v, &w);
            }
        }
        if a.demand.len() == n {
            a.demand = seg.reduce(&a.demand, &w);
        }
    }
    out.snapshots.weights = seg.weights.clone();
    Ok(out)
}
