//! Ranking evaluation against reference groups.

mod experiment;
mod methods;

pub use experiment::*;
pub use methods::*;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Group;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapScore {
    pub candidate: String,
    pub candidate_size: usize,
    pub best_reference: String,
    pub recall: f64,
    pub precision: f64,
    /// `sqrt(recall * precision)`.
    pub score: f64,
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Best match of each candidate over all references (not one-to-one).
/// Ties go to the earliest reference.
pub fn overlap_scores(candidates: &[Group], references: &[Group]) -> Result<Vec<OverlapScore>> {
    if references.is_empty() {
        return Err(Error::invalid("no reference groups"));
    }
    Ok(candidates
        .iter()
        .map(|c| {
            let mut best = OverlapScore {
                candidate: c.id().to_string(),
                candidate_size: c.len(),
                best_reference: references[0].id().to_string(),
                recall: 0.0,
                precision: 0.0,
                score: 0.0,
            };
            for r in references {
                let shared = intersection_size(c.members(), r.members()) as f64;
                let recall = shared / r.len() as f64;
                let precision = shared / c.len() as f64;
                let score = (recall * precision).sqrt();
                if score > best.score {
                    best = OverlapScore {
                        best_reference: r.id().to_string(),
                        recall,
                        precision,
                        score,
                        ..best
                    };
                }
            }
            best
        })
        .collect())
}

/// Keeps groups with at least `min_size` members.
pub fn filter_min_size(groups: &[Group], min_size: usize) -> Vec<Group> {
    groups.iter().filter(|g| g.len() >= min_size).cloned().collect()
}

/// 1-based ranks in ascending order, ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Spearman correlation of two score lists. `None` when either list is
/// constant.
pub fn spearman(reference: &[f64], method: &[f64]) -> Result<Option<f64>> {
    if reference.len() != method.len() {
        return Err(Error::invalid(format!(
            "score lists differ in length ({} vs {})",
            reference.len(),
            method.len()
        )));
    }
    if reference.len() < 2 || is_constant(reference) || is_constant(method) {
        return Ok(None);
    }
    let (a, b) = (average_ranks(reference), average_ranks(method));
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    Ok(Some((cov / (va * vb).sqrt()).clamp(-1.0, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Direction {
    /// Higher is better.
    #[default]
    Descending,
    Ascending,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankMetrics {
    pub top_pr: f64,
    pub top5_pr: f64,
    /// Mean size of the candidates tied at the top.
    pub top_size: f64,
}

/// Mean of `values` over the best `k` items by `keys`, splitting the slots
/// left at the cut evenly across the tied block.
fn top_k_mean(keys: &[f64], values: &[f64], k: usize) -> f64 {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
    let k = k.min(keys.len());
    let cut = keys[order[k - 1]];
    let mut above = 0.0;
    let mut above_n = 0;
    let mut tied = 0.0;
    let mut tied_n = 0;
    for &i in &order {
        if keys[i] > cut {
            above += values[i];
            above_n += 1;
        } else if keys[i] == cut {
            tied += values[i];
            tied_n += 1;
        }
    }
    let slots = (k - above_n) as f64;
    (above + slots * tied / tied_n as f64) / k as f64
}

pub fn rank_metrics(overlaps: &[OverlapScore], scores: &[f64], direction: Direction) -> Result<RankMetrics> {
    if overlaps.is_empty() {
        return Err(Error::invalid("no candidates to rank"));
    }
    if overlaps.len() != scores.len() {
        return Err(Error::invalid("overlaps and scores differ in length"));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("NaN score"));
    }
    let keys: Vec<f64> = match direction {
        Direction::Descending => scores.to_vec(),
        Direction::Ascending => scores.iter().map(|s| -s).collect(),
    };
    let pr: Vec<f64> = overlaps.iter().map(|o| o.score).collect();
    let sizes: Vec<f64> = overlaps.iter().map(|o| o.candidate_size as f64).collect();
    Ok(RankMetrics {
        top_pr: top_k_mean(&keys, &pr, 1),
        top5_pr: top_k_mean(&keys, &pr, 5),
        top_size: top_k_mean(&keys, &sizes, 1),
    })
}

/// Mean overlap score.
pub fn average_pr(overlaps: &[OverlapScore]) -> Option<f64> {
    (!overlaps.is_empty()).then(|| overlaps.iter().map(|o| o.score).sum::<f64>() / overlaps.len() as f64)
}
