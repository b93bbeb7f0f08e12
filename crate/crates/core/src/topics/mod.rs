//! Topic analysis over cleaned reference snippets: tokenization with
//! stop-word filtering and stemming, TF-IDF vectorization with
//! document-frequency thresholds, LDA by collapsed Gibbs sampling, and
//! per-year clustering runs.

pub mod porter;
pub mod stopwords;

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use porter::stem;

/// Tokenizer settings. Both word sets are lowercase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub stopwords: BTreeSet<String>,
    pub non_instructive: BTreeSet<String>,
    pub min_token_length: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            stopwords: stopwords::ENGLISH_STOPWORDS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            non_instructive: stopwords::NON_INSTRUCTIVE_WORDS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            min_token_length: 2,
        }
    }
}

/// Lowercases, drops stop words and non-instructive words, stems what
/// remains, and drops stems shorter than the minimum length. Tokens are
/// maximal alphabetic runs.
pub fn tokenize_and_filter(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut Vec<String>| {
        if word.is_empty() {
            return;
        }
        let lower = word.to_lowercase();
        word.clear();
        if cfg.stopwords.contains(&lower) || cfg.non_instructive.contains(&lower) {
            return;
        }
        let stemmed = porter::stem(&lower);
        if stemmed.chars().count() >= cfg.min_token_length {
            out.push(stemmed);
        }
    };
    for c in text.chars() {
        if c.is_alphabetic() {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
        }
    }
    flush(&mut word, &mut out);
    out
}

/// TF-IDF weighted document/term matrix over the retained vocabulary.
/// Raw term counts are kept alongside the weights because the topic model
/// consumes counts, not weights.
#[derive(Debug, Clone)]
pub struct DocumentTermMatrix {
    /// Retained stemmed terms, sorted lexicographically.
    pub vocabulary: Vec<String>,
    pub doc_ids: Vec<String>,
    /// Dense rows of L2-normalized tf-idf weights; all-zero rows permitted.
    pub weights: Vec<Vec<f64>>,
    /// Documents containing each retained term.
    pub doc_freq: Vec<usize>,
    /// Per-document sparse (term index, count), term indices ascending.
    pub counts: Vec<Vec<(usize, usize)>>,
}

impl DocumentTermMatrix {
    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn num_terms(&self) -> usize {
        self.vocabulary.len()
    }
}

/// Builds the matrix. Terms with document frequency strictly above `max_df`
/// or strictly below `min_df` (as fractions of the corpus) are disregarded;
/// both boundaries themselves are retained. Weights follow the smoothed
/// convention `tf * (ln((1+N)/(1+df)) + 1)` with per-document L2 norm.
pub fn build_dtm(
    docs: &[(String, Vec<String>)],
    max_df: f64,
    min_df: f64,
) -> Result<DocumentTermMatrix> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = docs.len();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, tokens) in docs {
        let unique: BTreeSet<&str> = tokens.iter().map(String::as_str).collect();
        for term in unique {
            *df.entry(term).or_insert(0) += 1;
        }
    }

    let mut vocabulary = Vec::new();
    let mut doc_freq = Vec::new();
    for (term, count) in &df {
        let frac = *count as f64 / n as f64;
        if frac >= min_df && frac <= max_df {
            vocabulary.push(term.to_string());
            doc_freq.push(*count);
        }
    }
    if vocabulary.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let index: BTreeMap<&str, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();

    let idf: Vec<f64> = doc_freq
        .iter()
        .map(|&d| ((1.0 + n as f64) / (1.0 + d as f64)).ln() + 1.0)
        .collect();

    let mut weights = Vec::with_capacity(n);
    let mut counts = Vec::with_capacity(n);
    let mut doc_ids = Vec::with_capacity(n);
    for (id, tokens) in docs {
        doc_ids.push(id.clone());
        let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
        for token in tokens {
            if let Some(&t) = index.get(token.as_str()) {
                *tf.entry(t).or_insert(0) += 1;
            }
        }
        let mut row = vec![0.0; vocabulary.len()];
        for (&t, &c) in &tf {
            row[t] = c as f64 * idf[t];
        }
        let norm = row.iter().map(|w| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for w in &mut row {
                *w /= norm;
            }
        }
        weights.push(row);
        counts.push(tf.into_iter().collect());
    }

    Ok(DocumentTermMatrix {
        vocabulary,
        doc_ids,
        weights,
        doc_freq,
        counts,
    })
}

/// Gibbs sampler settings. `alpha` defaults to `50/K` when unset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LdaParams {
    pub num_topics: usize,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
}

impl LdaParams {
    pub fn new(num_topics: usize, seed: u64) -> Self {
        LdaParams {
            num_topics,
            seed,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
        }
    }

    pub fn effective_alpha(&self) -> f64 {
        self.alpha.unwrap_or(50.0 / self.num_topics as f64)
    }
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams::new(10, 0)
    }
}

/// A fitted topic model with smoothed probability estimates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicModel {
    pub num_topics: usize,
    pub vocabulary: Vec<String>,
    /// K x V rows, each summing to one.
    pub topic_word: Vec<Vec<f64>>,
    /// D x K rows, each summing to one.
    pub doc_topic: Vec<Vec<f64>>,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
}

/// Fits LDA on raw term counts over the retained vocabulary by collapsed
/// Gibbs sampling: `iterations` full sweeps from a seed-determined
/// initialization, single-threaded and bit-reproducible for identical
/// inputs and parameters.
pub fn fit_lda(dtm: &DocumentTermMatrix, params: &LdaParams) -> Result<TopicModel> {
    let k = params.num_topics;
    if k < 2 {
        return Err(Error::TooFewTopics(k));
    }
    let d = dtm.num_docs();
    if d == 0 {
        return Err(Error::EmptyCorpus);
    }
    if k > d {
        log::warn!("fitting {k} topics on only {d} documents");
    }
    let v = dtm.num_terms();
    let alpha = params.effective_alpha();
    let beta = params.beta;

    // expand sparse counts into token streams, term indices ascending
    let docs: Vec<Vec<usize>> = dtm
        .counts
        .iter()
        .map(|doc| {
            doc.iter()
                .flat_map(|&(t, c)| std::iter::repeat_n(t, c))
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut z: Vec<Vec<usize>> = Vec::with_capacity(d);
    let mut ndk = vec![vec![0usize; k]; d];
    let mut nkv = vec![vec![0usize; v]; k];
    let mut nk = vec![0usize; k];
    for (di, doc) in docs.iter().enumerate() {
        let mut zd = Vec::with_capacity(doc.len());
        for &w in doc {
            let topic = rng.gen_range(0..k);
            zd.push(topic);
            ndk[di][topic] += 1;
            nkv[topic][w] += 1;
            nk[topic] += 1;
        }
        z.push(zd);
    }

    let vbeta = v as f64 * beta;
    let mut weights = vec![0.0f64; k];
    for _ in 0..params.iterations {
        for (di, doc) in docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = z[di][i];
                ndk[di][old] -= 1;
                nkv[old][w] -= 1;
                nk[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (ndk[di][t] as f64 + alpha) * (nkv[t][w] as f64 + beta)
                        / (nk[t] as f64 + vbeta);
                    weights[t] = p;
                    total += p;
                }
                let mut u = rng.gen::<f64>() * total;
                let mut new = k - 1;
                for (t, &p) in weights.iter().enumerate() {
                    if u < p {
                        new = t;
                        break;
                    }
                    u -= p;
                }

                z[di][i] = new;
                ndk[di][new] += 1;
                nkv[new][w] += 1;
                nk[new] += 1;
            }
        }
    }

    let kalpha = k as f64 * alpha;
    let topic_word: Vec<Vec<f64>> = (0..k)
        .map(|t| {
            (0..v)
                .map(|w| (nkv[t][w] as f64 + beta) / (nk[t] as f64 + vbeta))
                .collect()
        })
        .collect();
    let doc_topic: Vec<Vec<f64>> = (0..d)
        .map(|di| {
            let nd: usize = ndk[di].iter().sum();
            (0..k)
                .map(|t| (ndk[di][t] as f64 + alpha) / (nd as f64 + kalpha))
                .collect()
        })
        .collect();

    Ok(TopicModel {
        num_topics: k,
        vocabulary: dtm.vocabulary.clone(),
        topic_word,
        doc_topic,
        seed: params.seed,
        alpha,
        beta,
        iterations: params.iterations,
    })
}

/// The `k` highest-probability terms per topic, descending by probability
/// with ties broken by ascending lexicographic order.
pub fn top_words(model: &TopicModel, k: usize) -> Vec<Vec<String>> {
    model
        .topic_word
        .iter()
        .map(|row| {
            let mut order: Vec<usize> = (0..row.len()).collect();
            order.sort_by(|&a, &b| {
                row[b]
                    .partial_cmp(&row[a])
                    .expect("probabilities are finite")
                    .then_with(|| model.vocabulary[a].cmp(&model.vocabulary[b]))
            });
            order
                .into_iter()
                .take(k)
                .map(|i| model.vocabulary[i].clone())
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicTableRow {
    pub year: i32,
    pub cluster: usize,
    pub words: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ClusterParams {
    pub lda: LdaParams,
    pub tokenizer: TokenizerConfig,
    pub max_df: f64,
    pub min_df: f64,
    /// Snippets from years before this are excluded.
    pub min_year: i32,
    pub words_per_topic: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            lda: LdaParams::default(),
            tokenizer: TokenizerConfig::default(),
            max_df: 0.85,
            min_df: 0.0002,
            min_year: 2010,
            words_per_topic: 5,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct YearClustering {
    pub models: BTreeMap<i32, TopicModel>,
    pub table: Vec<TopicTableRow>,
    /// Years that could not be modeled, with the reason.
    pub skipped: Vec<(i32, String)>,
}

/// Runs one independent topic model per eligible year. Snippets without a
/// year or from before `min_year` are excluded; a year with fewer documents
/// than topics is skipped with a warning, as is a year whose vocabulary
/// filters to nothing.
pub fn cluster_by_year(
    snippets: &[(Option<i32>, String)],
    params: &ClusterParams,
) -> YearClustering {
    let mut by_year: BTreeMap<i32, Vec<&str>> = BTreeMap::new();
    for (year, text) in snippets {
        match year {
            Some(y) if *y >= params.min_year => {
                by_year.entry(*y).or_default().push(text.as_str());
            }
            _ => {}
        }
    }

    let mut out = YearClustering::default();
    for (year, texts) in by_year {
        if texts.len() < params.lda.num_topics {
            let reason = format!(
                "{} documents is fewer than {} topics",
                texts.len(),
                params.lda.num_topics
            );
            log::warn!("year {year} skipped: {reason}");
            out.skipped.push((year, reason));
            continue;
        }
        let docs: Vec<(String, Vec<String>)> = texts
            .iter()
            .enumerate()
            .map(|(i, text)| {
                (
                    format!("{year}-{i}"),
                    tokenize_and_filter(text, &params.tokenizer),
                )
            })
            .collect();
        let dtm = match build_dtm(&docs, params.max_df, params.min_df) {
            Ok(dtm) => dtm,
            Err(e) => {
                log::warn!("year {year} skipped: {e}");
                out.skipped.push((year, e.to_string()));
                continue;
            }
        };
        let model = match fit_lda(&dtm, &params.lda) {
            Ok(m) => m,
            Err(e) => {
                log::warn!("year {year} skipped: {e}");
                out.skipped.push((year, e.to_string()));
                continue;
            }
        };
        for (cluster, words) in top_words(&model, params.words_per_topic)
            .into_iter()
            .enumerate()
        {
            out.table.push(TopicTableRow {
                year,
                cluster,
                words,
            });
        }
        out.models.insert(year, model);
    }
    out
}
