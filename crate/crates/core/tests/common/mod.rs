//! Shared helpers for the integration and acceptance suites: fixture corpus
//! locations, ground-truth schema, and temp-copy utilities (tests never
//! mutate the committed fixture in place).

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pseudomine::config::PipelineConfig;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn corpus_dir() -> PathBuf {
    fixtures_dir().join("corpus")
}

pub fn ground_truth_path() -> PathBuf {
    fixtures_dir().join("ground_truth.json")
}

/// One expected algorithm environment, char offsets into the decoded file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GtSpan {
    pub source_path: String,
    pub start: usize,
    pub end: usize,
    pub starred: bool,
    pub raw: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GtPaper {
    pub arxiv_id: String,
    pub year: Option<i32>,
    pub category: Option<String>,
    pub has_latex: bool,
    pub spans: Vec<GtSpan>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub total_spans: usize,
    pub papers: Vec<GtPaper>,
}

pub fn load_ground_truth() -> GroundTruth {
    let text = fs::read_to_string(ground_truth_path()).expect("ground truth committed");
    serde_json::from_str(&text).expect("ground truth parses")
}

pub fn copy_dir(src: &Path, dest: &Path) {
    fs::create_dir_all(dest).expect("create dest dir");
    for entry in walkdir::WalkDir::new(src) {
        let entry = entry.expect("walk fixture");
        let rel = entry.path().strip_prefix(src).expect("under src");
        let target = dest.join(rel);
        if entry.file_type().is_dir() {
            fs::create_dir_all(&target).expect("create dir");
        } else {
            fs::copy(entry.path(), &target).expect("copy file");
        }
    }
}

/// Copies the committed fixture corpus into a temp dir and returns a config
/// pointing at it, with fixture-scale sampling.
pub fn fixture_setup(tmp: &Path) -> PipelineConfig {
    let corpus_root = tmp.join("corpus");
    copy_dir(&corpus_dir(), &corpus_root);
    let mut cfg = PipelineConfig::default();
    cfg.corpus.root = corpus_root;
    cfg.corpus.output = tmp.join("out");
    cfg.sampling.n = 10;
    cfg.run.jobs = 2;
    cfg
}
