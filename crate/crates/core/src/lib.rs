//! Batch toolchain for mining pseudocode from corpora of scholarly-paper
//! source bundles (LaTeX sources plus pre-extracted PDF text).
//!
//! The pipeline discovers and pairs paper files into bundles, detects
//! `algorithm` environments, extracts them as JSON records together with
//! referenced supplementary content, locates cross-references corpus-wide
//! and cuts sentence-trimmed prose snippets around them, cleans the LaTeX
//! out of those snippets, clusters them per publication year with LDA over
//! TF-IDF-filtered vocabularies, and validates the detector against human
//! labels with false-positive/false-negative rates.

pub mod analytics;
pub mod cleaner;
pub mod config;
pub mod corpus;
pub mod detector;
pub mod error;
pub mod extractor;
pub mod latex;
pub mod pipeline;
pub mod references;
pub mod topics;

pub use error::{Error, Result};
