//! Corpus statistics and the sampling-based validation harness.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One paper's detection outcome joined with its metadata, the unit the
/// statistics are aggregated from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaperStats {
    pub arxiv_id: String,
    pub year: Option<i32>,
    pub category: Option<String>,
    pub has_latex: bool,
    pub has_algorithm_tag: bool,
    pub has_keywords: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearlyCounts {
    pub scanned: usize,
    pub with_tag: usize,
    pub with_keywords: usize,
}

/// Aggregate corpus counts; `yearly` buckets a missing year under `None`.
#[derive(Debug, Clone, Default)]
pub struct CorpusStats {
    pub total_papers: usize,
    pub papers_with_latex: usize,
    pub papers_with_algorithm_tag: usize,
    pub papers_with_keywords: usize,
    pub yearly: BTreeMap<Option<i32>, YearlyCounts>,
    pub categories: BTreeMap<String, usize>,
}

impl CorpusStats {
    pub fn latex_fraction(&self) -> f64 {
        if self.total_papers == 0 {
            0.0
        } else {
            self.papers_with_latex as f64 / self.total_papers as f64
        }
    }
}

pub fn compute_stats(papers: &[PaperStats]) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for p in papers {
        stats.total_papers += 1;
        if p.has_latex {
            stats.papers_with_latex += 1;
        }
        if p.has_algorithm_tag {
            stats.papers_with_algorithm_tag += 1;
        }
        let entry = stats.yearly.entry(p.year).or_default();
        entry.scanned += 1;
        if p.has_algorithm_tag {
            entry.with_tag += 1;
        }
        if p.has_keywords {
            stats.papers_with_keywords += 1;
            entry.with_keywords += 1;
            let cat = p.category.clone().unwrap_or_else(|| "unknown".to_string());
            *stats.categories.entry(cat).or_insert(0) += 1;
        }
    }
    stats
}

/// One row of the per-year series; missing years appear as "unknown".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YearlyRow {
    pub year: String,
    pub scanned: usize,
    pub with_tag: usize,
    pub with_keywords: usize,
}

/// Per-year counts in ascending year order, the unknown bucket last.
pub fn yearly_counts(papers: &[PaperStats]) -> Vec<YearlyRow> {
    let stats = compute_stats(papers);
    let mut rows = Vec::new();
    let mut unknown: Option<YearlyCounts> = None;
    for (year, counts) in &stats.yearly {
        match year {
            Some(y) => rows.push(YearlyRow {
                year: y.to_string(),
                scanned: counts.scanned,
                with_tag: counts.with_tag,
                with_keywords: counts.with_keywords,
            }),
            None => unknown = Some(*counts),
        }
    }
    if let Some(counts) = unknown {
        rows.push(YearlyRow {
            year: "unknown".to_string(),
            scanned: counts.scanned,
            with_tag: counts.with_tag,
            with_keywords: counts.with_keywords,
        });
    }
    rows
}

/// Primary-category counts of papers with at least one keyword hit.
pub fn category_distribution(papers: &[PaperStats]) -> BTreeMap<String, usize> {
    compute_stats(papers).categories
}

/// Draws `n` distinct identifiers uniformly without replacement,
/// deterministically for a given seed. The result is sorted.
pub fn sample_uniform(ids: &[String], n: usize, seed: u64) -> Result<Vec<String>> {
    if n > ids.len() {
        return Err(Error::SampleTooLarge {
            requested: n,
            population: ids.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..ids.len()).collect();
    // partial Fisher-Yates: the first n slots end up uniform w/o replacement
    for i in 0..n {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    let mut picked: Vec<String> = indices[..n].iter().map(|&i| ids[i].clone()).collect();
    picked.sort();
    Ok(picked)
}

/// A human judgment for one sampled paper.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationLabel {
    pub arxiv_id: String,
    pub has_pseudocode: bool,
    pub notes: Option<String>,
}

/// Confusion counts against human labels. `fpr` is false flags over all
/// negative-labeled papers; `fnr` is misses over all positive-labeled ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub false_negatives: usize,
    pub fpr: f64,
    pub fnr: f64,
}

impl ValidationReport {
    /// Percentage rounded to one decimal, the form quoted in reports.
    pub fn fpr_percent(&self) -> f64 {
        (self.fpr * 1000.0).round() / 10.0
    }

    pub fn fnr_percent(&self) -> f64 {
        (self.fnr * 1000.0).round() / 10.0
    }
}

/// Crosses labels with a per-paper boolean prediction.
pub fn compute_confusion(
    labels: &[ValidationLabel],
    predictions: &BTreeMap<String, bool>,
) -> Result<ValidationReport> {
    let missing: Vec<String> = labels
        .iter()
        .filter(|l| !predictions.contains_key(&l.arxiv_id))
        .map(|l| l.arxiv_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPredictions { ids: missing });
    }

    let (mut tp, mut fp, mut tn, mut false_negatives) = (0usize, 0usize, 0usize, 0usize);
    for label in labels {
        let predicted = predictions[&label.arxiv_id];
        match (label.has_pseudocode, predicted) {
            (true, true) => tp += 1,
            (true, false) => false_negatives += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    Ok(ValidationReport {
        tp,
        fp,
        tn,
        false_negatives,
        fpr: ratio(fp, fp + tn),
        fnr: ratio(false_negatives, false_negatives + tp),
    })
}

/// Contingency of the human label against indicative-keyword presence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckTable {
    pub positive_with_keywords: usize,
    pub positive_without_keywords: usize,
    pub negative_with_keywords: usize,
    pub negative_without_keywords: usize,
}

impl CrosscheckTable {
    pub fn positives(&self) -> usize {
        self.positive_with_keywords + self.positive_without_keywords
    }

    pub fn negatives(&self) -> usize {
        self.negative_with_keywords + self.negative_without_keywords
    }
}

pub fn indicative_crosscheck(
    labels: &[ValidationLabel],
    keyword_presence: &BTreeMap<String, bool>,
) -> Result<CrosscheckTable> {
    let missing: Vec<String> = labels
        .iter()
        .filter(|l| !keyword_presence.contains_key(&l.arxiv_id))
        .map(|l| l.arxiv_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPredictions { ids: missing });
    }
    let mut table = CrosscheckTable::default();
    for label in labels {
        let hit = keyword_presence[&label.arxiv_id];
        match (label.has_pseudocode, hit) {
            (true, true) => table.positive_with_keywords += 1,
            (true, false) => table.positive_without_keywords += 1,
            (false, true) => table.negative_with_keywords += 1,
            (false, false) => table.negative_without_keywords += 1,
        }
    }
    Ok(table)
}
