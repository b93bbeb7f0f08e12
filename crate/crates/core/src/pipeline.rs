//! Disk-to-disk pipeline stages. Every stage reads its inputs from the
//! corpus or from artifacts of earlier stages and writes its own artifacts
//! atomically, so `all` is exactly the stages run one after another and
//! re-running a stage on unchanged input rewrites outputs byte-identically.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{self, PaperStats, ValidationLabel};
use crate::cleaner;
use crate::config::PipelineConfig;
use crate::corpus::{self, PaperBundle, PaperIssue};
use crate::detector::{self, KeywordHit};
use crate::error::{Error, Result};
use crate::extractor::{self, atomic_write, PseudocodeRecord, RecordFile};
use crate::references::{self, RefMatch};
use crate::topics;

/// The pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Detect,
    Extract,
    Refs,
    Clean,
    Cluster,
    Stats,
    Sample,
    Validate,
    All,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Detect => "detect",
            Stage::Extract => "extract",
            Stage::Refs => "refs",
            Stage::Clean => "clean",
            Stage::Cluster => "cluster",
            Stage::Stats => "stats",
            Stage::Sample => "sample",
            Stage::Validate => "validate",
            Stage::All => "all",
        }
    }
}

impl std::str::FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ingest" => Ok(Stage::Ingest),
            "detect" => Ok(Stage::Detect),
            "extract" => Ok(Stage::Extract),
            "refs" => Ok(Stage::Refs),
            "clean" => Ok(Stage::Clean),
            "cluster" => Ok(Stage::Cluster),
            "stats" => Ok(Stage::Stats),
            "sample" => Ok(Stage::Sample),
            "validate" => Ok(Stage::Validate),
            "all" => Ok(Stage::All),
            other => Err(format!("unknown stage: {other}")),
        }
    }
}

/// What one stage did, plus any per-paper problems it tolerated.
#[derive(Debug, Clone, Serialize)]
pub struct StageOutcome {
    pub stage: &'static str,
    pub summary: String,
    pub paper_errors: Vec<PaperIssue>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub arxiv_id: String,
    pub has_latex: bool,
    pub latex_files: usize,
    pub has_pdf_text: bool,
    pub year: Option<i32>,
    pub category: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DetectionRow {
    arxiv_id: String,
    has_latex: bool,
    latex_tag_found: bool,
    tag_count: usize,
    keyword_hits: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KeywordHitRow {
    arxiv_id: String,
    class: String,
    matched_text: String,
    offset: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CleanedSnippet {
    pub arxiv_id: String,
    pub year: Option<i32>,
    pub text: String,
}

#[derive(Debug, Clone, Serialize)]
struct ReportWarning {
    arxiv_id: String,
    source_path: String,
    offset: Option<usize>,
    message: String,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable artifact");
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    let bytes = writer.into_inner().expect("csv buffer");
    atomic_write(path, &bytes)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })
}

fn load_corpus(
    cfg: &PipelineConfig,
) -> Result<(Vec<PaperBundle>, corpus::UnmatchedReport, Vec<PaperIssue>)> {
    corpus::load_corpus(&cfg.corpus.root)
}

fn stage_ingest(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let unpack = corpus::unpack_archives(&cfg.corpus.root, cfg.corpus.max_unpack_depth)?;
    write_json(&out.join("unpack.json"), &unpack)?;

    let (bundles, unmatched, issues) = load_corpus(cfg)?;
    let manifest: Vec<ManifestEntry> = bundles
        .iter()
        .map(|b| {
            log::info!(
                "ingest {}: latex_files={} pdf_text={}",
                b.arxiv_id(),
                b.latex_files.len(),
                b.pdf_text.is_some()
            );
            ManifestEntry {
                arxiv_id: b.arxiv_id().to_string(),
                has_latex: b.has_latex,
                latex_files: b.latex_files.len(),
                has_pdf_text: b.pdf_text.is_some(),
                year: b.metadata.year,
                category: b.metadata.category.clone(),
            }
        })
        .collect();
    write_json(&out.join("manifest.json"), &manifest)?;
    write_json(&out.join("unmatched.json"), &unmatched)?;

    Ok(StageOutcome {
        stage: "ingest",
        summary: format!(
            "{} bundles ({} archives unpacked, {} unmatched)",
            manifest.len(),
            unpack.archives_opened,
            unmatched.pdf_only.len() + unmatched.source_only.len()
        ),
        paper_errors: issues,
    })
}

fn stage_detect(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let (bundles, _, issues) = load_corpus(cfg)?;
    let classes = cfg.keywords.classes.clone();

    let mut per_paper: Vec<(DetectionRow, Vec<KeywordHit>)> = bundles
        .par_iter()
        .map(|bundle| {
            let detection = detector::detect_latex_algorithm(bundle);
            let hits = bundle
                .pdf_text
                .as_deref()
                .map(|text| detector::detect_indicative_keywords(text, &classes))
                .unwrap_or_default();
            log::info!(
                "detect {}: tags={} keywords={}",
                bundle.arxiv_id(),
                detection.tag_count,
                hits.len()
            );
            (
                DetectionRow {
                    arxiv_id: detection.arxiv_id,
                    has_latex: detection.has_latex,
                    latex_tag_found: detection.latex_tag_found,
                    tag_count: detection.tag_count,
                    keyword_hits: hits.len(),
                },
                hits,
            )
        })
        .collect();
    per_paper.sort_by(|a, b| a.0.arxiv_id.cmp(&b.0.arxiv_id));

    let rows: Vec<DetectionRow> = per_paper.iter().map(|(r, _)| r.clone()).collect();
    let hit_rows: Vec<KeywordHitRow> = per_paper
        .iter()
        .flat_map(|(r, hits)| {
            hits.iter().map(|h| KeywordHitRow {
                arxiv_id: r.arxiv_id.clone(),
                class: h.keyword_class.as_str().to_string(),
                matched_text: h.matched_text.clone(),
                offset: h.file_offset,
            })
        })
        .collect();
    write_csv(&out.join("detections.csv"), &rows)?;
    write_csv(&out.join("keyword_hits.csv"), &hit_rows)?;

    let tagged = rows.iter().filter(|r| r.latex_tag_found).count();
    Ok(StageOutcome {
        stage: "detect",
        summary: format!(
            "{} papers scanned, {} with algorithm tags",
            rows.len(),
            tagged
        ),
        paper_errors: issues,
    })
}

fn stage_extract(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let (bundles, _, issues) = load_corpus(cfg)?;
    let records_dir = out.join("records");
    if records_dir.exists() {
        fs::remove_dir_all(&records_dir).map_err(|e| Error::io(&records_dir, e))?;
    }

    let extracted: Vec<(String, Vec<RecordFile>, Vec<ReportWarning>)> = bundles
        .par_iter()
        .map(|bundle| {
            let extraction = extractor::extract_bundle(bundle);
            let mut warnings: Vec<ReportWarning> = extraction
                .warnings
                .iter()
                .map(|w| ReportWarning {
                    arxiv_id: bundle.arxiv_id().to_string(),
                    source_path: w.source_path.clone(),
                    offset: Some(w.offset),
                    message: w.message.clone(),
                })
                .collect();
            let mut records = Vec::new();
            for span in &extraction.spans {
                let (supplements, sup_warnings) =
                    extractor::extract_referenced_content(span, bundle);
                for message in sup_warnings {
                    warnings.push(ReportWarning {
                        arxiv_id: bundle.arxiv_id().to_string(),
                        source_path: span.source_path.clone(),
                        offset: Some(span.start_offset),
                        message,
                    });
                }
                let record = PseudocodeRecord::new(span, supplements, &bundle.metadata);
                records.push(RecordFile::from(&record));
            }
            log::info!("extract {}: {} records", bundle.arxiv_id(), records.len());
            (bundle.arxiv_id().to_string(), records, warnings)
        })
        .collect();

    let mut sorted = extracted;
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut total = 0usize;
    let mut all_warnings = Vec::new();
    for (_, records, warnings) in &sorted {
        for (ordinal, record) in records.iter().enumerate() {
            extractor::emit_record(record, ordinal, &records_dir)?;
            total += 1;
        }
        all_warnings.extend(warnings.iter().cloned());
    }

    write_json(
        &out.join("extract_report.json"),
        &serde_json::json!({ "records": total, "warnings": all_warnings }),
    )?;
    Ok(StageOutcome {
        stage: "extract",
        summary: format!("{total} records emitted"),
        paper_errors: issues,
    })
}

/// (paper id, ordinal-sorted record files) pairs.
type PaperRecordFiles = Vec<(String, Vec<(usize, PathBuf)>)>;

/// Record files for one paper, ordinal-sorted.
fn list_records(records_dir: &Path) -> Result<PaperRecordFiles> {
    let mut papers = Vec::new();
    if !records_dir.is_dir() {
        return Ok(papers);
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(records_dir)
        .map_err(|e| Error::io(records_dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    for dir in dirs {
        let id = dir
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        let mut files: Vec<(usize, PathBuf)> = fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter_map(|p| {
                let ordinal = p.file_stem()?.to_str()?.parse::<usize>().ok()?;
                Some((ordinal, p))
            })
            .collect();
        files.sort();
        papers.push((id, files));
    }
    Ok(papers)
}

fn stage_refs(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let (bundles, _, issues) = load_corpus(cfg)?;
    let by_id: BTreeMap<&str, &PaperBundle> = bundles.iter().map(|b| (b.arxiv_id(), b)).collect();
    let snippet_cfg = cfg.snippet_config();
    let records_dir = out.join("records");

    let mut total_snippets = 0usize;
    let mut warnings: Vec<ReportWarning> = Vec::new();
    for (arxiv_id, files) in list_records(&records_dir)? {
        let Some(bundle) = by_id.get(arxiv_id.as_str()) else {
            warnings.push(ReportWarning {
                arxiv_id: arxiv_id.clone(),
                source_path: String::new(),
                offset: None,
                message: "records exist but the paper is missing from the corpus".into(),
            });
            continue;
        };
        for (ordinal, path) in files {
            let mut record = extractor::read_record(&path)?;
            let labels = references::find_labels(&record.pseudocode);
            let mut unique = Vec::new();
            for label in labels {
                if !unique.contains(&label) {
                    unique.push(label);
                }
            }
            let mut matches: Vec<RefMatch> = Vec::new();
            for label in &unique {
                let matcher = references::generate_ref_patterns(label);
                matches.extend(references::locate_references(
                    &matcher,
                    bundle,
                    Some((record.source_path.as_str(), record.span.0..record.span.1)),
                ));
            }
            matches.sort_by(|a, b| (&a.source_path, a.offset).cmp(&(&b.source_path, b.offset)));
            let snippets: Vec<String> = matches
                .iter()
                .map(|m| {
                    let text = bundle
                        .latex_file(&m.source_path)
                        .expect("match from bundle");
                    references::extract_snippet(text, m, &snippet_cfg).text
                })
                .collect();
            total_snippets += snippets.len();
            record.reference_snippets = snippets;
            extractor::emit_record(&record, ordinal, &records_dir)?;
        }
        log::info!("refs {arxiv_id}: done");
    }

    write_json(
        &out.join("refs_report.json"),
        &serde_json::json!({ "snippets": total_snippets, "warnings": warnings }),
    )?;
    Ok(StageOutcome {
        stage: "refs",
        summary: format!("{total_snippets} reference snippets attached"),
        paper_errors: issues,
    })
}

fn stage_clean(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let mut lines = Vec::new();
    let mut count = 0usize;
    for (_, files) in list_records(&out.join("records"))? {
        for (_, path) in files {
            let record = extractor::read_record(&path)?;
            for snippet in &record.reference_snippets {
                let cleaned = cleaner::clean(snippet, &cfg.cleaner);
                let line = CleanedSnippet {
                    arxiv_id: record.arxiv_id.clone(),
                    year: record.year,
                    text: cleaned,
                };
                lines.push(serde_json::to_string(&line).expect("snippet line"));
                count += 1;
            }
        }
    }
    let mut bytes = lines.join("\n").into_bytes();
    if !bytes.is_empty() {
        bytes.push(b'\n');
    }
    atomic_write(&out.join("cleaned_snippets.jsonl"), &bytes)?;
    Ok(StageOutcome {
        stage: "clean",
        summary: format!("{count} snippets cleaned"),
        paper_errors: Vec::new(),
    })
}

fn read_cleaned_snippets(path: &Path) -> Result<Vec<CleanedSnippet>> {
    if !path.is_file() {
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|e| Error::Json {
                path: path.to_path_buf(),
                source: e,
            })
        })
        .collect()
}

fn stage_cluster(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let snippets = read_cleaned_snippets(&out.join("cleaned_snippets.jsonl"))?;
    let input: Vec<(Option<i32>, String)> =
        snippets.into_iter().map(|s| (s.year, s.text)).collect();
    let params = cfg.cluster_params();
    let clustering = topics::cluster_by_year(&input, &params);

    let topics_dir = out.join("topics");
    if topics_dir.exists() {
        fs::remove_dir_all(&topics_dir).map_err(|e| Error::io(&topics_dir, e))?;
    }
    fs::create_dir_all(&topics_dir).map_err(|e| Error::io(&topics_dir, e))?;

    // year,cluster,word1..wordN table mirroring the per-year cluster report
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["year".to_string(), "cluster".to_string()];
    for i in 1..=params.words_per_topic {
        header.push(format!("word{i}"));
    }
    writer.write_record(&header).map_err(|e| Error::Csv {
        path: topics_dir.join("topic_table.csv"),
        source: e,
    })?;
    for row in &clustering.table {
        let mut fields = vec![row.year.to_string(), row.cluster.to_string()];
        for i in 0..params.words_per_topic {
            fields.push(row.words.get(i).cloned().unwrap_or_default());
        }
        writer.write_record(&fields).map_err(|e| Error::Csv {
            path: topics_dir.join("topic_table.csv"),
            source: e,
        })?;
    }
    let bytes = writer.into_inner().expect("csv buffer");
    atomic_write(&topics_dir.join("topic_table.csv"), &bytes)?;

    for (year, model) in &clustering.models {
        write_json(&topics_dir.join(format!("model_{year}.json")), model)?;
    }
    write_json(
        &topics_dir.join("skipped.json"),
        &clustering
            .skipped
            .iter()
            .map(|(year, reason)| serde_json::json!({ "year": year, "reason": reason }))
            .collect::<Vec<_>>(),
    )?;

    Ok(StageOutcome {
        stage: "cluster",
        summary: format!(
            "{} year models, {} skipped",
            clustering.models.len(),
            clustering.skipped.len()
        ),
        paper_errors: Vec::new(),
    })
}

fn paper_stats_from_artifacts(cfg: &PipelineConfig) -> Result<Vec<PaperStats>> {
    let out = &cfg.corpus.output;
    let manifest: Vec<ManifestEntry> = read_json(&out.join("manifest.json"))?;
    let detections: Vec<DetectionRow> = read_csv(&out.join("detections.csv"))?;
    let by_id: BTreeMap<&str, &DetectionRow> = detections
        .iter()
        .map(|d| (d.arxiv_id.as_str(), d))
        .collect();
    Ok(manifest
        .iter()
        .map(|m| {
            let det = by_id.get(m.arxiv_id.as_str());
            PaperStats {
                arxiv_id: m.arxiv_id.clone(),
                year: m.year,
                category: m.category.clone(),
                has_latex: m.has_latex,
                has_algorithm_tag: det.map(|d| d.latex_tag_found).unwrap_or(false),
                has_keywords: det.map(|d| d.keyword_hits > 0).unwrap_or(false),
            }
        })
        .collect())
}

fn stage_stats(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let papers = paper_stats_from_artifacts(cfg)?;
    let stats = analytics::compute_stats(&papers);

    #[derive(Serialize)]
    struct MetricRow<'a> {
        metric: &'a str,
        value: String,
    }
    let rows = vec![
        MetricRow {
            metric: "total_papers",
            value: stats.total_papers.to_string(),
        },
        MetricRow {
            metric: "papers_with_latex",
            value: stats.papers_with_latex.to_string(),
        },
        MetricRow {
            metric: "papers_with_algorithm_tag",
            value: stats.papers_with_algorithm_tag.to_string(),
        },
        MetricRow {
            metric: "papers_with_keywords",
            value: stats.papers_with_keywords.to_string(),
        },
        MetricRow {
            metric: "latex_fraction",
            value: format!("{:.4}", stats.latex_fraction()),
        },
    ];
    write_csv(&out.join("stats.csv"), &rows)?;

    write_csv(&out.join("yearly.csv"), &analytics::yearly_counts(&papers))?;

    #[derive(Serialize)]
    struct CategoryRow {
        category: String,
        count: usize,
    }
    let categories: Vec<CategoryRow> = analytics::category_distribution(&papers)
        .into_iter()
        .map(|(category, count)| CategoryRow { category, count })
        .collect();
    write_csv(&out.join("categories.csv"), &categories)?;

    Ok(StageOutcome {
        stage: "stats",
        summary: format!(
            "{} papers, latex fraction {:.2}",
            stats.total_papers,
            stats.latex_fraction()
        ),
        paper_errors: Vec::new(),
    })
}

fn stage_sample(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let manifest: Vec<ManifestEntry> = read_json(&out.join("manifest.json"))?;
    let ids: Vec<String> = manifest.iter().map(|m| m.arxiv_id.clone()).collect();
    // a corpus smaller than the requested sample yields the whole corpus
    let n = cfg.sampling.n.min(ids.len());
    if n < cfg.sampling.n {
        log::warn!(
            "sample size {} clamped to corpus size {}",
            cfg.sampling.n,
            ids.len()
        );
    }
    let picked = analytics::sample_uniform(&ids, n, cfg.sampling.seed)?;

    // append-friendly labeling template
    #[derive(Serialize)]
    struct SampleRow<'a> {
        arxiv_id: &'a str,
        has_pseudocode: &'a str,
        notes: &'a str,
    }
    let rows: Vec<SampleRow> = picked
        .iter()
        .map(|id| SampleRow {
            arxiv_id: id,
            has_pseudocode: "",
            notes: "",
        })
        .collect();
    write_csv(&out.join("sample.csv"), &rows)?;

    Ok(StageOutcome {
        stage: "sample",
        summary: format!("{} ids sampled", picked.len()),
        paper_errors: Vec::new(),
    })
}

fn read_labels(path: &Path) -> Result<Vec<ValidationLabel>> {
    #[derive(Deserialize)]
    struct LabelRow {
        arxiv_id: String,
        has_pseudocode: bool,
        #[serde(default)]
        notes: Option<String>,
    }
    let rows: Vec<LabelRow> = read_csv(path)?;
    Ok(rows
        .into_iter()
        .map(|r| ValidationLabel {
            arxiv_id: r.arxiv_id,
            has_pseudocode: r.has_pseudocode,
            notes: r.notes.filter(|n| !n.is_empty()),
        })
        .collect())
}

fn stage_validate(cfg: &PipelineConfig) -> Result<StageOutcome> {
    let out = &cfg.corpus.output;
    let labels = read_labels(&cfg.labels_path())?;
    let detections: Vec<DetectionRow> = read_csv(&out.join("detections.csv"))?;
    let predictions: BTreeMap<String, bool> = detections
        .iter()
        .map(|d| (d.arxiv_id.clone(), d.latex_tag_found))
        .collect();
    let keyword_presence: BTreeMap<String, bool> = detections
        .iter()
        .map(|d| (d.arxiv_id.clone(), d.keyword_hits > 0))
        .collect();

    let report = analytics::compute_confusion(&labels, &predictions)?;
    write_json(&out.join("validation.json"), &report)?;

    let table = analytics::indicative_crosscheck(&labels, &keyword_presence)?;
    #[derive(Serialize)]
    struct CrossRow<'a> {
        has_pseudocode: &'a str,
        count: usize,
        with_keywords: usize,
    }
    let rows = vec![
        CrossRow {
            has_pseudocode: "yes",
            count: table.positives(),
            with_keywords: table.positive_with_keywords,
        },
        CrossRow {
            has_pseudocode: "no",
            count: table.negatives(),
            with_keywords: table.negative_with_keywords,
        },
    ];
    write_csv(&out.join("crosscheck.csv"), &rows)?;

    Ok(StageOutcome {
        stage: "validate",
        summary: format!(
            "fpr {:.1}% fnr {:.1}% over {} labels",
            report.fpr_percent(),
            report.fnr_percent(),
            labels.len()
        ),
        paper_errors: Vec::new(),
    })
}

/// Runs one stage (or the whole pipeline) against the given configuration.
/// Per-paper problems are collected into the outcomes and `errors.json`
/// rather than aborting the batch.
pub fn run(stage: Stage, cfg: &PipelineConfig) -> Result<Vec<StageOutcome>> {
    cfg.validate()?;
    let out = &cfg.corpus.output;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.jobs)
        .build()
        .map_err(|e| Error::Stage(format!("thread pool: {e}")))?;

    let outcomes = pool.install(|| -> Result<Vec<StageOutcome>> {
        let mut outcomes = Vec::new();
        match stage {
            Stage::Ingest => outcomes.push(stage_ingest(cfg)?),
            Stage::Detect => outcomes.push(stage_detect(cfg)?),
            Stage::Extract => outcomes.push(stage_extract(cfg)?),
            Stage::Refs => outcomes.push(stage_refs(cfg)?),
            Stage::Clean => outcomes.push(stage_clean(cfg)?),
            Stage::Cluster => outcomes.push(stage_cluster(cfg)?),
            Stage::Stats => outcomes.push(stage_stats(cfg)?),
            Stage::Sample => outcomes.push(stage_sample(cfg)?),
            Stage::Validate => outcomes.push(stage_validate(cfg)?),
            Stage::All => {
                outcomes.push(stage_ingest(cfg)?);
                outcomes.push(stage_detect(cfg)?);
                outcomes.push(stage_extract(cfg)?);
                outcomes.push(stage_refs(cfg)?);
                outcomes.push(stage_clean(cfg)?);
                outcomes.push(stage_cluster(cfg)?);
                outcomes.push(stage_stats(cfg)?);
                outcomes.push(stage_sample(cfg)?);
                if cfg.labels_path().is_file() {
                    outcomes.push(stage_validate(cfg)?);
                } else {
                    log::info!(
                        "validate skipped: no labels file at {}",
                        cfg.labels_path().display()
                    );
                }
            }
        }
        Ok(outcomes)
    })?;

    let all_errors: Vec<&PaperIssue> = outcomes.iter().flat_map(|o| &o.paper_errors).collect();
    write_json(&out.join("errors.json"), &all_errors)?;
    Ok(outcomes)
}
