//! Corpus discovery: recursive archive unpacking, bundle pairing by
//! identifier, and metadata sidecar parsing.
//!
//! Expected layout under a corpus root:
//!
//! ```text
//! <root>/pdf_text/<arxiv_id>.txt   pre-extracted PDF text
//! <root>/sources/<arxiv_id>/**     LaTeX sources (possibly zipped)
//! <root>/meta/<arxiv_id>.json      metadata sidecar
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};

/// Metadata for one paper, parsed from its JSON sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperMetadata {
    pub arxiv_id: String,
    pub version: Option<u32>,
    pub year: Option<i32>,
    pub title: Option<String>,
    pub abstract_text: Option<String>,
    pub category: Option<String>,
    pub subcategory: Option<String>,
    pub source_url: Option<String>,
}

impl PaperMetadata {
    pub fn stub(arxiv_id: impl Into<String>) -> Self {
        PaperMetadata {
            arxiv_id: arxiv_id.into(),
            version: None,
            year: None,
            title: None,
            abstract_text: None,
            category: None,
            subcategory: None,
            source_url: None,
        }
    }
}

/// One paper's files: LaTeX sources plus optional pre-extracted PDF text.
#[derive(Debug, Clone)]
pub struct PaperBundle {
    pub metadata: PaperMetadata,
    /// (relative path, decoded text), unique paths, sorted lexicographically.
    pub latex_files: Vec<(String, String)>,
    pub pdf_text: Option<String>,
    pub has_latex: bool,
}

impl PaperBundle {
    pub fn arxiv_id(&self) -> &str {
        &self.metadata.arxiv_id
    }

    pub fn latex_file(&self, path: &str) -> Option<&str> {
        self.latex_files
            .iter()
            .find(|(p, _)| p == path)
            .map(|(_, t)| t.as_str())
    }
}

/// Identifiers that appeared on only one side of the pairing.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct UnmatchedReport {
    pub pdf_only: Vec<String>,
    pub source_only: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct UnpackReport {
    pub archives_opened: usize,
    pub files_produced: usize,
    pub depth_reached: u32,
}

fn is_archive(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.eq_ignore_ascii_case("zip"))
        .unwrap_or(false)
}

/// Recursively extracts every archive under `root` in place, next to the
/// archive itself, until none remain. Successfully extracted archives are
/// deleted, which makes a second call a no-op. Corrupt archives are skipped
/// with a warning and left on disk. Nesting beyond `max_depth` is a hard
/// error (zip-bomb guard).
pub fn unpack_archives(root: &Path, max_depth: u32) -> Result<UnpackReport> {
    let mut report = UnpackReport::default();
    // archives found so far, with the nesting depth they appeared at
    let mut queue: Vec<(PathBuf, u32)> = Vec::new();

    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::io(root, e.into()))?;
        if entry.file_type().is_file() && is_archive(entry.path()) {
            queue.push((entry.path().to_path_buf(), 1));
        }
    }
    queue.sort();

    while let Some((archive_path, depth)) = queue.pop() {
        if depth > max_depth {
            return Err(Error::ArchiveDepth {
                path: archive_path,
                max_depth,
            });
        }
        let parent = archive_path
            .parent()
            .unwrap_or_else(|| Path::new(""))
            .to_path_buf();

        let file = match fs::File::open(&archive_path) {
            Ok(f) => f,
            Err(e) => {
                log::warn!(
                    "skipping unreadable archive {}: {e}",
                    archive_path.display()
                );
                continue;
            }
        };
        let mut zip = match zip::ZipArchive::new(file) {
            Ok(z) => z,
            Err(e) => {
                log::warn!("skipping corrupt archive {}: {e}", archive_path.display());
                continue;
            }
        };

        let mut produced_here: Vec<PathBuf> = Vec::new();
        let mut failed = false;
        for i in 0..zip.len() {
            let mut entry = match zip.by_index(i) {
                Ok(e) => e,
                Err(e) => {
                    log::warn!("skipping corrupt archive {}: {e}", archive_path.display());
                    failed = true;
                    break;
                }
            };
            let Some(rel) = entry.enclosed_name() else {
                log::warn!(
                    "archive {}: entry {:?} escapes the extraction root, skipped",
                    archive_path.display(),
                    entry.name()
                );
                continue;
            };
            let dest = parent.join(rel);
            if entry.is_dir() {
                fs::create_dir_all(&dest).map_err(|e| Error::io(&dest, e))?;
                continue;
            }
            if let Some(dir) = dest.parent() {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            let mut buf = Vec::new();
            if let Err(e) = entry.read_to_end(&mut buf) {
                log::warn!("skipping corrupt archive {}: {e}", archive_path.display());
                failed = true;
                break;
            }
            fs::write(&dest, &buf).map_err(|e| Error::io(&dest, e))?;
            produced_here.push(dest);
        }
        if failed {
            // leave partially extracted files behind; the archive stays put
            continue;
        }

        fs::remove_file(&archive_path).map_err(|e| Error::io(&archive_path, e))?;
        report.archives_opened += 1;
        report.depth_reached = report.depth_reached.max(depth);
        produced_here.sort();
        for path in produced_here {
            if is_archive(&path) {
                queue.push((path, depth + 1));
            } else {
                report.files_produced += 1;
            }
        }
        queue.sort();
    }

    Ok(report)
}

/// Decodes bytes as UTF-8 and falls back to a byte-preserving Latin-1 read
/// for pre-Unicode sources. Returns the text and the encoding name used.
pub fn decode_text(bytes: &[u8]) -> (String, &'static str) {
    match std::str::from_utf8(bytes) {
        Ok(s) => (s.to_string(), "utf-8"),
        Err(_) => (bytes.iter().map(|&b| b as char).collect(), "latin-1"),
    }
}

fn read_decoded(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (text, encoding) = decode_text(&bytes);
    if encoding != "utf-8" {
        log::debug!("decoded {} as {encoding}", path.display());
    }
    Ok(text)
}

fn is_latex_source(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some(e) if e.eq_ignore_ascii_case("tex") || e.eq_ignore_ascii_case("bbl")
    )
}

fn load_bundle(id: &str, pdf_text_dir: &Path, source_dir: &Path) -> Result<PaperBundle> {
    let paper_dir = source_dir.join(id);
    let mut latex_files = Vec::new();
    if paper_dir.is_dir() {
        for entry in WalkDir::new(&paper_dir).sort_by_file_name() {
            let entry = entry.map_err(|e| Error::io(&paper_dir, e.into()))?;
            if !entry.file_type().is_file() || !is_latex_source(entry.path()) {
                continue;
            }
            let rel = entry
                .path()
                .strip_prefix(&paper_dir)
                .expect("walkdir stays under its root")
                .to_string_lossy()
                .replace('\\', "/");
            latex_files.push((rel, read_decoded(entry.path())?));
        }
    }
    latex_files.sort_by(|a, b| a.0.cmp(&b.0));
    latex_files.dedup_by(|a, b| a.0 == b.0);

    let pdf_path = pdf_text_dir.join(format!("{id}.txt"));
    let pdf_text = if pdf_path.is_file() {
        Some(read_decoded(&pdf_path)?)
    } else {
        None
    };

    let has_latex = !latex_files.is_empty();
    Ok(PaperBundle {
        metadata: PaperMetadata::stub(id),
        latex_files,
        pdf_text,
        has_latex,
    })
}

/// Pairs PDF-text sidecars with source directories by identifier. Produces
/// one bundle per distinct identifier, sorted by identifier; identifiers
/// present on only one side are recorded in the unmatched report.
pub fn pair_by_identifier(
    pdf_text_dir: &Path,
    source_dir: &Path,
) -> Result<(Vec<PaperBundle>, UnmatchedReport)> {
    let mut pdf_ids = Vec::new();
    if pdf_text_dir.is_dir() {
        for entry in fs::read_dir(pdf_text_dir).map_err(|e| Error::io(pdf_text_dir, e))? {
            let entry = entry.map_err(|e| Error::io(pdf_text_dir, e))?;
            let path = entry.path();
            if path.is_file() && path.extension().and_then(|e| e.to_str()) == Some("txt") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    pdf_ids.push(stem.to_string());
                }
            }
        }
    }
    let mut source_ids = Vec::new();
    if source_dir.is_dir() {
        for entry in fs::read_dir(source_dir).map_err(|e| Error::io(source_dir, e))? {
            let entry = entry.map_err(|e| Error::io(source_dir, e))?;
            if entry.path().is_dir() {
                if let Some(name) = entry.file_name().to_str() {
                    source_ids.push(name.to_string());
                }
            }
        }
    }

    let mut all: Vec<String> = pdf_ids.iter().chain(source_ids.iter()).cloned().collect();
    all.sort();
    all.dedup();

    let mut report = UnmatchedReport::default();
    for id in &all {
        let in_pdf = pdf_ids.contains(id);
        let in_src = source_ids.contains(id);
        if in_pdf && !in_src {
            report.pdf_only.push(id.clone());
        } else if in_src && !in_pdf {
            report.source_only.push(id.clone());
        }
    }

    // bundle construction is pure per identifier; merge back in sorted order
    let mut bundles = all
        .par_iter()
        .map(|id| load_bundle(id, pdf_text_dir, source_dir))
        .collect::<Result<Vec<_>>>()?;
    bundles.sort_by(|a, b| a.metadata.arxiv_id.cmp(&b.metadata.arxiv_id));

    Ok((bundles, report))
}

fn current_year() -> i32 {
    use chrono::Datelike;
    chrono::Utc::now().year()
}

/// Parses a metadata sidecar. Only `id` is mandatory; a malformed or
/// out-of-range year is dropped with a warning rather than defaulted.
pub fn parse_metadata(path: &Path) -> Result<PaperMetadata> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;

    let obj = value.as_object().ok_or_else(|| Error::Json {
        path: path.to_path_buf(),
        source: serde::de::Error::custom("metadata sidecar must be a JSON object"),
    })?;

    let arxiv_id = obj
        .get("id")
        .and_then(|v| v.as_str())
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::MissingArxivId {
            path: path.to_path_buf(),
        })?
        .to_string();

    let get_str = |key: &str| obj.get(key).and_then(|v| v.as_str()).map(str::to_string);

    let year = match obj.get("year") {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => {
            let parsed = v
                .as_i64()
                .or_else(|| v.as_str().and_then(|s| s.parse::<i64>().ok()));
            match parsed {
                Some(y) if (1991..=i64::from(current_year())).contains(&y) => Some(y as i32),
                _ => {
                    log::warn!("{}: malformed year {v}, field dropped", path.display());
                    None
                }
            }
        }
    };

    let version = obj
        .get("version")
        .and_then(|v| v.as_u64())
        .and_then(|v| u32::try_from(v).ok());

    Ok(PaperMetadata {
        arxiv_id,
        version,
        year,
        title: get_str("title"),
        abstract_text: get_str("abstract"),
        category: get_str("category"),
        subcategory: get_str("subcategory"),
        source_url: get_str("url"),
    })
}

/// A per-paper problem encountered while loading a corpus; the pipeline logs
/// these and keeps going.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PaperIssue {
    pub arxiv_id: String,
    pub message: String,
}

/// Loads a full corpus: pairs bundles and enriches them from the `meta/`
/// sidecar directory when present.
pub fn load_corpus(root: &Path) -> Result<(Vec<PaperBundle>, UnmatchedReport, Vec<PaperIssue>)> {
    let (mut bundles, unmatched) =
        pair_by_identifier(&root.join("pdf_text"), &root.join("sources"))?;
    let meta_dir = root.join("meta");
    let mut issues = Vec::new();
    if meta_dir.is_dir() {
        let mut by_id: BTreeMap<String, PaperMetadata> = BTreeMap::new();
        for bundle in &bundles {
            let sidecar = meta_dir.join(format!("{}.json", bundle.arxiv_id()));
            if !sidecar.is_file() {
                continue;
            }
            match parse_metadata(&sidecar) {
                Ok(meta) => {
                    by_id.insert(bundle.arxiv_id().to_string(), meta);
                }
                Err(e) => issues.push(PaperIssue {
                    arxiv_id: bundle.arxiv_id().to_string(),
                    message: e.to_string(),
                }),
            }
        }
        for bundle in &mut bundles {
            if let Some(mut meta) = by_id.remove(bundle.arxiv_id()) {
                // the on-disk name is the identifier of record
                meta.arxiv_id = bundle.metadata.arxiv_id.clone();
                bundle.metadata = meta;
            }
        }
    }
    Ok((bundles, unmatched, issues))
}
