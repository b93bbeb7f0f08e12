//! Pseudocode extraction: tag-delimited span extraction, referenced-content
//! supplements, and JSON record emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{PaperBundle, PaperMetadata};
use crate::error::{Error, Result};
use crate::latex::{self, CharMap};
use crate::references::ReferenceSnippet;

/// One extracted algorithm environment. Offsets count Unicode scalar values
/// into the decoded source file; `raw` includes both delimiters, `body`
/// excludes them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudocodeSpan {
    pub source_path: String,
    pub start_offset: usize,
    pub end_offset: usize,
    pub body: String,
    pub raw: String,
    pub starred: bool,
    pub nesting_depth_seen: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractWarning {
    pub source_path: String,
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub spans: Vec<PseudocodeSpan>,
    pub warnings: Vec<ExtractWarning>,
}

/// Extracts every balanced outermost algorithm environment from one file, in
/// document order. Comment lines are ignored for tag matching but preserved
/// inside the extracted text. Dangling begins are dropped with a warning.
pub fn extract_pseudocode(source_path: &str, text: &str) -> Extraction {
    let chars: Vec<char> = text.chars().collect();
    let (raw_spans, tag_warnings) = latex::algorithm_spans(&chars);

    let spans = raw_spans
        .into_iter()
        .map(|s| PseudocodeSpan {
            source_path: source_path.to_string(),
            start_offset: s.start,
            end_offset: s.end,
            body: chars[s.body_start..s.body_end].iter().collect(),
            raw: chars[s.start..s.end].iter().collect(),
            starred: s.starred,
            nesting_depth_seen: s.max_depth,
        })
        .collect();
    let warnings = tag_warnings
        .into_iter()
        .map(|w| ExtractWarning {
            source_path: source_path.to_string(),
            offset: w.offset,
            message: w.message,
        })
        .collect();
    Extraction { spans, warnings }
}

/// Extracts spans from every LaTeX file of a bundle, in file order.
pub fn extract_bundle(bundle: &PaperBundle) -> Extraction {
    let mut out = Extraction::default();
    for (path, text) in &bundle.latex_files {
        let mut one = extract_pseudocode(path, text);
        out.spans.append(&mut one.spans);
        out.warnings.append(&mut one.warnings);
    }
    out
}

/// Referenced content pulled in alongside a pseudocode span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupplementRecord {
    pub label: String,
    pub environment: String,
    pub content: String,
    pub source_path: String,
}

fn ref_command_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // any \<letters>ref{...} command; the segment may be empty (\ref itself)
    RE.get_or_init(|| Regex::new(r"\\[a-zA-Z]*ref[ \t]*\{([^}]*)\}").expect("ref regex"))
}

fn label_command_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\\label[ \t]*\{([^}]*)\}").expect("label regex"))
}

/// Finds `\label{L}` for the given label anywhere in the bundle, skipping
/// commented occurrences. Returns (source_path, file text, char position).
fn find_label_definition<'a>(
    bundle: &'a PaperBundle,
    label: &str,
) -> Option<(&'a str, &'a str, usize)> {
    for (path, text) in &bundle.latex_files {
        let map = CharMap::new(text);
        let chars: Vec<char> = text.chars().collect();
        let mask = latex::comment_mask(&chars);
        for cap in label_command_regex().captures_iter(text) {
            let whole = cap.get(0).expect("group 0");
            let start = map.char_of_byte(whole.start());
            if mask[start] {
                continue;
            }
            if cap.get(1).expect("label content").as_str().trim() == label {
                return Some((path.as_str(), text.as_str(), start));
            }
        }
    }
    None
}

/// For each reference command inside the span body, locates the matching
/// `\label` anywhere in the bundle and returns the enclosing environment (or
/// paragraph) as supplementary content. Duplicate labels collapse to one
/// record; unresolved labels produce warnings.
pub fn extract_referenced_content(
    span: &PseudocodeSpan,
    bundle: &PaperBundle,
) -> (Vec<SupplementRecord>, Vec<String>) {
    let body = span.body.as_str();
    let map = CharMap::new(body);
    let chars: Vec<char> = body.chars().collect();
    let mask = latex::comment_mask(&chars);

    let mut labels: Vec<String> = Vec::new();
    for cap in ref_command_regex().captures_iter(body) {
        let start = map.char_of_byte(cap.get(0).expect("group 0").start());
        if mask[start] {
            continue;
        }
        let label = cap.get(1).expect("label").as_str().trim().to_string();
        if !label.is_empty() && !labels.contains(&label) {
            labels.push(label);
        }
    }

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for label in labels {
        let Some((path, text, pos)) = find_label_definition(bundle, &label) else {
            warnings.push(format!("label `{label}` not found in bundle"));
            continue;
        };
        let file_map = CharMap::new(text);
        let file_chars: Vec<char> = text.chars().collect();
        let record = match latex::innermost_environment(text, &file_map, pos) {
            Some(env) => SupplementRecord {
                label,
                environment: env.name.clone(),
                content: file_chars[env.start..env.end].iter().collect(),
                source_path: path.to_string(),
            },
            None => {
                let (s, e) = latex::paragraph_at(&file_chars, pos);
                SupplementRecord {
                    label,
                    environment: "paragraph".to_string(),
                    content: file_chars[s..e].iter().collect(),
                    source_path: path.to_string(),
                }
            }
        };
        records.push(record);
    }
    (records, warnings)
}

/// One extracted pseudocode block with provenance metadata; the in-memory
/// unit behind the on-disk record files.
#[derive(Debug, Clone)]
pub struct PseudocodeRecord {
    pub arxiv_id: String,
    pub year: Option<i32>,
    pub title: Option<String>,
    pub category: Option<String>,
    pub subcategory: Option<String>,
    pub pseudocode: String,
    pub supplements: Vec<SupplementRecord>,
    pub reference_snippets: Vec<ReferenceSnippet>,
    pub source_path: String,
    pub span: (usize, usize),
    pub starred: bool,
}

impl PseudocodeRecord {
    pub fn new(
        span: &PseudocodeSpan,
        supplements: Vec<SupplementRecord>,
        meta: &PaperMetadata,
    ) -> Self {
        PseudocodeRecord {
            arxiv_id: meta.arxiv_id.clone(),
            year: meta.year,
            title: meta.title.clone(),
            category: meta.category.clone(),
            subcategory: meta.subcategory.clone(),
            pseudocode: span.raw.clone(),
            supplements,
            reference_snippets: Vec::new(),
            source_path: span.source_path.clone(),
            span: (span.start_offset, span.end_offset),
            starred: span.starred,
        }
    }
}

/// The on-disk record schema. Snippets are stored as plain text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordFile {
    pub arxiv_id: String,
    pub year: Option<i32>,
    pub title: Option<String>,
    pub category: Option<String>,
    pub subcategory: Option<String>,
    pub pseudocode: String,
    pub supplements: Vec<SupplementRecord>,
    pub reference_snippets: Vec<String>,
    pub source_path: String,
    pub span: (usize, usize),
    pub starred: bool,
}

impl From<&PseudocodeRecord> for RecordFile {
    fn from(r: &PseudocodeRecord) -> Self {
        RecordFile {
            arxiv_id: r.arxiv_id.clone(),
            year: r.year,
            title: r.title.clone(),
            category: r.category.clone(),
            subcategory: r.subcategory.clone(),
            pseudocode: r.pseudocode.clone(),
            supplements: r.supplements.clone(),
            reference_snippets: r
                .reference_snippets
                .iter()
                .map(|s| s.text.clone())
                .collect(),
            source_path: r.source_path.clone(),
            span: r.span,
            starred: r.starred,
        }
    }
}

/// Atomically writes `bytes` to `path` via a temp file in the same directory.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Writes one record to `<out_dir>/<arxiv_id>/<ordinal>.json` atomically and
/// returns the path.
pub fn emit_record(record: &RecordFile, ordinal: usize, out_dir: &Path) -> Result<PathBuf> {
    let path = out_dir
        .join(&record.arxiv_id)
        .join(format!("{ordinal}.json"));
    let mut bytes = serde_json::to_vec_pretty(record).expect("record serializes");
    bytes.push(b'\n');
    atomic_write(&path, &bytes)?;
    Ok(path)
}

pub fn read_record(path: &Path) -> Result<RecordFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}
