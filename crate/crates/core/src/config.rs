//! Pipeline configuration: one human-editable TOML file whose defaults pin
//! every tunable constant; nothing is hard-coded at call sites.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cleaner::CleaningRules;
use crate::detector::KeywordClass;
use crate::error::{Error, Result};
use crate::references::SnippetConfig;
use crate::topics::{ClusterParams, LdaParams, TokenizerConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    /// Corpus root containing pdf_text/, sources/ and meta/.
    pub root: PathBuf,
    /// Directory all pipeline artifacts are written to.
    pub output: PathBuf,
    /// Archive nesting cap for in-place unpacking.
    pub max_unpack_depth: u32,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            root: PathBuf::from("corpus"),
            output: PathBuf::from("out"),
            max_unpack_depth: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnippetSection {
    pub span_chars: usize,
    pub boundary_window: usize,
    pub sentence_terminators: Vec<char>,
}

impl Default for SnippetSection {
    fn default() -> Self {
        SnippetSection {
            span_chars: 1200,
            boundary_window: 300,
            sentence_terminators: vec!['.', '!', '?'],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeywordSection {
    pub classes: Vec<KeywordClass>,
}

impl Default for KeywordSection {
    fn default() -> Self {
        KeywordSection {
            classes: KeywordClass::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerSection {
    /// When false, start from an empty stop list instead of the standard one.
    pub use_default_stopwords: bool,
    pub extra_stopwords: Vec<String>,
    pub non_instructive: Vec<String>,
    pub min_token_length: usize,
}

impl Default for TokenizerSection {
    fn default() -> Self {
        TokenizerSection {
            use_default_stopwords: true,
            extra_stopwords: Vec::new(),
            non_instructive: crate::topics::stopwords::NON_INSTRUCTIVE_WORDS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            min_token_length: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TfidfSection {
    pub max_df: f64,
    pub min_df: f64,
}

impl Default for TfidfSection {
    fn default() -> Self {
        TfidfSection {
            max_df: 0.85,
            min_df: 0.0002,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaSection {
    pub topics: usize,
    pub seed: u64,
    /// Per-topic prior; defaults to 50/topics when omitted.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    /// Snippets from years before this are excluded from clustering.
    pub min_year: i32,
    pub words_per_topic: usize,
}

impl Default for LdaSection {
    fn default() -> Self {
        LdaSection {
            topics: 10,
            seed: 42,
            alpha: None,
            beta: 0.01,
            iterations: 1000,
            min_year: 2010,
            words_per_topic: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub n: usize,
    pub seed: u64,
}

impl Default for SamplingSection {
    fn default() -> Self {
        SamplingSection { n: 1000, seed: 42 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationSection {
    /// Labels CSV; a relative path is resolved against the corpus root.
    pub labels: PathBuf,
}

impl Default for ValidationSection {
    fn default() -> Self {
        ValidationSection {
            labels: PathBuf::from("labels.csv"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Worker threads for per-paper stages.
    pub jobs: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { jobs: 1 }
    }
}

/// The full pipeline configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: CorpusSection,
    pub snippet: SnippetSection,
    pub keywords: KeywordSection,
    pub tokenizer: TokenizerSection,
    pub cleaner: CleaningRules,
    pub tfidf: TfidfSection,
    pub lda: LdaSection,
    pub sampling: SamplingSection,
    pub validation: ValidationSection,
    pub run: RunSection,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: PipelineConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            (self.snippet.span_chars, "snippet.span_chars"),
            (self.snippet.boundary_window, "snippet.boundary_window"),
            (self.lda.topics, "lda.topics"),
            (self.lda.iterations, "lda.iterations"),
            (self.lda.words_per_topic, "lda.words_per_topic"),
            (
                self.tokenizer.min_token_length,
                "tokenizer.min_token_length",
            ),
            (self.run.jobs, "run.jobs"),
            (
                self.corpus.max_unpack_depth as usize,
                "corpus.max_unpack_depth",
            ),
        ];
        for (value, name) in positive {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.snippet.boundary_window > self.snippet.span_chars {
            return Err(Error::Config(
                "snippet.boundary_window must not exceed snippet.span_chars".into(),
            ));
        }
        if self.lda.topics < 2 {
            return Err(Error::Config("lda.topics must be at least 2".into()));
        }
        for (value, name) in [
            (self.tfidf.max_df, "tfidf.max_df"),
            (self.tfidf.min_df, "tfidf.min_df"),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.tfidf.min_df > self.tfidf.max_df {
            return Err(Error::Config(
                "tfidf.min_df must not exceed tfidf.max_df".into(),
            ));
        }
        if let Some(alpha) = self.lda.alpha {
            if alpha <= 0.0 {
                return Err(Error::Config("lda.alpha must be positive".into()));
            }
        }
        if self.lda.beta <= 0.0 {
            return Err(Error::Config("lda.beta must be positive".into()));
        }
        if self.snippet.sentence_terminators.is_empty() {
            return Err(Error::Config(
                "snippet.sentence_terminators must be non-empty".into(),
            ));
        }
        Ok(())
    }

    pub fn snippet_config(&self) -> SnippetConfig {
        SnippetConfig {
            span_chars: self.snippet.span_chars,
            boundary_window: self.snippet.boundary_window,
            sentence_terminators: self.snippet.sentence_terminators.iter().copied().collect(),
        }
    }

    pub fn tokenizer_config(&self) -> TokenizerConfig {
        let mut stopwords: BTreeSet<String> = if self.tokenizer.use_default_stopwords {
            crate::topics::stopwords::ENGLISH_STOPWORDS
                .iter()
                .map(|s| s.to_string())
                .collect()
        } else {
            BTreeSet::new()
        };
        stopwords.extend(
            self.tokenizer
                .extra_stopwords
                .iter()
                .map(|s| s.to_lowercase()),
        );
        TokenizerConfig {
            stopwords,
            non_instructive: self
                .tokenizer
                .non_instructive
                .iter()
                .map(|s| s.to_lowercase())
                .collect(),
            min_token_length: self.tokenizer.min_token_length,
        }
    }

    pub fn lda_params(&self) -> LdaParams {
        LdaParams {
            num_topics: self.lda.topics,
            seed: self.lda.seed,
            alpha: self.lda.alpha,
            beta: self.lda.beta,
            iterations: self.lda.iterations,
        }
    }

    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams {
            lda: self.lda_params(),
            tokenizer: self.tokenizer_config(),
            max_df: self.tfidf.max_df,
            min_df: self.tfidf.min_df,
            min_year: self.lda.min_year,
            words_per_topic: self.lda.words_per_topic,
        }
    }

    pub fn labels_path(&self) -> PathBuf {
        if self.validation.labels.is_absolute() {
            self.validation.labels.clone()
        } else {
            self.corpus.root.join(&self.validation.labels)
        }
    }
}
