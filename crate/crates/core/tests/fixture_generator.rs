//! Regenerates the committed fixture corpus and its ground-truth manifest.
//!
//! Run explicitly with:
//!
//! ```text
//! cargo test -p pseudomine --test fixture_generator -- --ignored regenerate
//! ```
//!
//! Generation is fully deterministic (fixed seed, fixed zip metadata), so a
//! regeneration run reproduces the committed tree bit for bit. The corpus
//! holds 50 synthetic papers with exactly 120 algorithm environments spread
//! over starred, nested, multi-file, zipped, latin-1 and commented-decoy
//! variants, plus pdf-text sidecars, metadata and a labels file.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use common::{GroundTruth, GtPaper, GtSpan};

const SEED: u64 = 2024091701;

const THEMES: &[&[&str]] = &[
    &[
        "graph",
        "node",
        "edge",
        "tree",
        "path",
        "vertex",
        "degree",
        "cycle",
        "component",
        "traversal",
        "spanning",
        "cut",
    ],
    &[
        "matrix",
        "gradient",
        "descent",
        "convergence",
        "iterate",
        "objective",
        "constraint",
        "convex",
        "solver",
        "step",
        "residual",
        "norm",
    ],
    &[
        "protocol",
        "message",
        "packet",
        "router",
        "channel",
        "latency",
        "broadcast",
        "handshake",
        "queue",
        "session",
        "relay",
        "timeout",
    ],
    &[
        "training",
        "feature",
        "label",
        "classifier",
        "layer",
        "weight",
        "epoch",
        "batch",
        "loss",
        "dataset",
        "embedding",
        "regularizer",
    ],
    &[
        "sample",
        "posterior",
        "particle",
        "filter",
        "likelihood",
        "distribution",
        "estimate",
        "variance",
        "prior",
        "density",
        "chain",
        "proposal",
    ],
    &[
        "token",
        "corpus",
        "parser",
        "grammar",
        "string",
        "prefix",
        "suffix",
        "automaton",
        "symbol",
        "alphabet",
        "stemming",
        "index",
    ],
];

const CONNECTIVES: &[&str] = &[
    "the", "we", "of", "a", "in", "for", "with", "and", "this", "that", "is", "are", "then",
    "each", "compute", "update", "derive", "refine", "propose", "analyze",
];

const CATEGORIES: &[&str] = &["cs.DS", "cs.LG", "cs.NI", "math.OC", "stat.ML"];

const UNICODE_FLAIR: &[&str] = &["naïve", "Erdős–Rényi", "α-approximation", "Poincaré"];

fn sentence(rng: &mut ChaCha8Rng, pool: &[&str]) -> String {
    let n = rng.gen_range(7..13);
    let mut words: Vec<&str> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.45) {
                CONNECTIVES[rng.gen_range(0..CONNECTIVES.len())]
            } else {
                pool[rng.gen_range(0..pool.len())]
            }
        })
        .collect();
    let first = words.remove(0);
    let mut out = first[..1].to_uppercase();
    out.push_str(&first[1..]);
    for w in words {
        out.push(' ');
        out.push_str(w);
    }
    out.push(match rng.gen_range(0..10) {
        0 => '!',
        1 => '?',
        _ => '.',
    });
    out
}

fn paragraph(rng: &mut ChaCha8Rng, pool: &[&str], sentences: usize) -> String {
    (0..sentences)
        .map(|_| sentence(rng, pool))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Accumulates one LaTeX file while tracking char offsets of embedded
/// algorithm environments.
#[derive(Default)]
struct FileBuilder {
    text: String,
    chars: usize,
    spans: Vec<GtSpan>,
}

impl FileBuilder {
    fn push(&mut self, piece: &str) {
        self.chars += piece.chars().count();
        self.text.push_str(piece);
    }

    fn push_env(&mut self, path: &str, raw: &str, starred: bool) {
        let start = self.chars;
        self.push(raw);
        self.spans.push(GtSpan {
            source_path: path.to_string(),
            start,
            end: self.chars,
            starred,
            raw: raw.to_string(),
        });
    }
}

fn env_label(paper: usize, index: usize) -> String {
    if paper == 17 && index == 0 {
        // exercises special-character escaping in reference matchers
        "alg:a+b17".to_string()
    } else {
        format!("alg:p{paper}-{index}")
    }
}

fn algorithm_env(
    paper: usize,
    index: usize,
    starred: bool,
    rng: &mut ChaCha8Rng,
    pool: &[&str],
) -> String {
    let star = if starred { "*" } else { "" };
    let spaced_begin = paper % 7 == 4 && index == 1;
    let begin_cmd = if spaced_begin {
        format!("\\begin {{algorithm{star}}}")
    } else {
        format!("\\begin{{algorithm{star}}}")
    };
    let option = match (paper + index) % 3 {
        0 => "[H]",
        1 => "[t]",
        _ => "",
    };
    let eq_label = if paper == 26 && index == 0 {
        "eq:ghost".to_string() // defined nowhere: unresolved-label path
    } else {
        format!("eq:p{paper}-{index}")
    };
    let label = env_label(paper, index);

    let mut body = String::new();
    body.push_str(&format!("{begin_cmd}{option}\n"));
    body.push_str(&format!(
        "\\caption{{{}}}\\label{{{label}}}\n",
        sentence(rng, pool)
    ));
    body.push_str("\\begin{algorithmic}[1]\n");
    body.push_str(&format!(
        "\\STATE initialize the state via \\eqref{{{eq_label}}}\n"
    ));
    body.push_str("\\FOR{$i = 1$ to $n$}\n");
    body.push_str(&format!("\\STATE {}\n", sentence(rng, pool)));
    if matches!(paper, 12 | 33) && index == 0 {
        body.push_str("% \\end{algorithm} draft cut, keep the loop below\n");
    }
    body.push_str("\\STATE $x_i \\gets x_{i-1} + \\alpha$\n");
    body.push_str("\\ENDFOR\n");
    body.push_str("\\end{algorithmic}\n");
    if matches!(paper, 10 | 25 | 37) && index == 0 {
        body.push_str("\\begin{algorithm}\n\\caption{inner refinement}\n");
        body.push_str(&format!("\\STATE {}\n", sentence(rng, pool)));
        body.push_str("\\end{algorithm}\n");
    }
    body.push_str(&format!("\\end{{algorithm{star}}}"));
    body
}

fn ref_command(label: &str, pick: usize) -> String {
    match pick % 4 {
        0 => format!("\\ref{{{label}}}"),
        1 => format!("\\Cref{{{label}}}"),
        2 => format!("\\autoref{{{label}}}"),
        _ => format!("\\algref{{{label}}}"),
    }
}

fn paper_year(idx: usize) -> i32 {
    match idx {
        0 | 1 | 4 | 5 => 2008,
        2 | 3 | 6 | 7 => 2009,
        8..=18 => 2010,
        19..=29 => 2011,
        30..=39 => 2012,
        _ => 2013,
    }
}

fn paper_id(idx: usize) -> String {
    let year = paper_year(idx);
    let month = 1 + (idx % 12);
    format!("{:02}{:02}.{:05}", year % 100, month, 10_000 + idx)
}

fn env_count(idx: usize) -> usize {
    if (8..44).contains(&idx) {
        3
    } else {
        2
    }
}

/// Which file hosts environment `e` of paper `idx`.
fn env_host(idx: usize, e: usize) -> &'static str {
    let last = env_count(idx) - 1;
    if idx == 20 && e == last {
        return "appendix.tex"; // delivered inside extra.zip
    }
    // paper 41's last env travels inside bundle.zip -> inner.zip; other
    // three-env papers on a multiple of 3 split plainly across files
    if (idx == 41 && e == last) || (env_count(idx) == 3 && idx.is_multiple_of(3) && e == 2) {
        return "methods.tex";
    }
    "main.tex"
}

struct BuiltPaper {
    /// plain files written under sources/<id>/
    files: Vec<(String, Vec<u8>)>,
    /// zip archives written under sources/<id>/
    zips: Vec<(String, Vec<u8>)>,
    spans: Vec<GtSpan>,
}

fn zip_bytes(entries: &[(&str, &str)]) -> Vec<u8> {
    let mut buf = Vec::new();
    {
        let mut zip = zip::ZipWriter::new(std::io::Cursor::new(&mut buf));
        let opts = zip::write::SimpleFileOptions::default()
            .compression_method(zip::CompressionMethod::Deflated)
            .last_modified_time(zip::DateTime::default());
        for (name, data) in entries {
            zip.start_file(*name, opts).expect("zip entry");
            zip.write_all(data.as_bytes()).expect("zip write");
        }
        zip.finish().expect("zip finish");
    }
    buf
}

fn nested_zip_bytes(inner_name: &str, entries: &[(&str, &str)]) -> Vec<u8> {
    let inner = zip_bytes(entries);
    let mut buf = Vec::new();
    {
        let mut zip = zip::ZipWriter::new(std::io::Cursor::new(&mut buf));
        let opts = zip::write::SimpleFileOptions::default()
            .compression_method(zip::CompressionMethod::Deflated)
            .last_modified_time(zip::DateTime::default());
        zip.start_file(inner_name, opts).expect("zip entry");
        zip.write_all(&inner).expect("zip write");
        zip.finish().expect("zip finish");
    }
    buf
}

fn latin1_bytes(text: &str) -> Vec<u8> {
    text.chars()
        .map(|c| {
            let code = c as u32;
            assert!(code < 256, "latin-1 fixture text must stay below U+0100");
            code as u8
        })
        .collect()
}

fn build_algorithm_paper(idx: usize, rng: &mut ChaCha8Rng) -> BuiltPaper {
    let pool = THEMES[idx % THEMES.len()];
    let n_envs = env_count(idx);
    let has_latin1_notes = idx == 35;

    let mut builders: BTreeMap<&str, FileBuilder> = BTreeMap::new();
    builders.insert("main.tex", FileBuilder::default());
    for e in 0..n_envs {
        let host = env_host(idx, e);
        builders.entry(host).or_default();
    }
    if has_latin1_notes {
        builders.insert("notes.tex", FileBuilder::default());
    }

    // headers
    {
        let title = sentence(rng, pool);
        let title = title.trim_end_matches(['.', '!', '?']);
        let main = builders.get_mut("main.tex").unwrap();
        main.push(&format!(
            "\\documentclass{{article}}\n\\usepackage{{algorithm}}\n\\usepackage{{algorithmic}}\n\\usepackage{{amsmath}}\n\\title{{{title}}}\n\\begin{{document}}\n\\maketitle\n"
        ));
        main.push("\\begin{abstract}\n");
        let abs = paragraph(rng, pool, 2);
        main.push(&abs);
        main.push("\n\\end{abstract}\n\n\\section{Introduction}\n");
        let flair = UNICODE_FLAIR[idx % UNICODE_FLAIR.len()];
        let intro = paragraph(rng, pool, 2);
        main.push(&format!(
            "A {flair} treatment of the problem follows. {intro}\n\n"
        ));
    }
    if let Some(methods) = builders.get_mut("methods.tex") {
        methods.push("% supplementary methods\n");
        let p = paragraph(rng, pool, 1);
        methods.push(&p);
        methods.push("\n\n");
    }
    if let Some(appendix) = builders.get_mut("appendix.tex") {
        appendix.push("% appendix material\n");
        let p = paragraph(rng, pool, 1);
        appendix.push(&p);
        appendix.push("\n\n");
    }
    if has_latin1_notes {
        let notes = builders.get_mut("notes.tex").unwrap();
        notes.push("% side notes, written at the caf\u{e9}\n");
        notes.push("These notes accompany the main text.\n\n");
        notes.push("\\begin{equation}\\label{eq:p35-0}\nh(x) = c x\n\\end{equation}\n\n");
    }

    // equations referenced from inside the algorithm bodies
    {
        let mut eq_block = String::new();
        for e in 0..n_envs {
            if has_latin1_notes && e == 0 {
                continue; // eq:p35-0 lives in notes.tex
            }
            if idx == 26 && e == 0 {
                continue; // env 0 references eq:ghost, defined nowhere
            }
            eq_block.push_str(&format!(
                "\\begin{{equation}}\\label{{eq:p{idx}-{e}}}\nf_{{{e}}}(x) = \\sum_i w_i x_i^{{{e}}}\n\\end{{equation}}\n"
            ));
            eq_block.push_str(&sentence(rng, pool));
            eq_block.push_str("\n\n");
        }
        let main = builders.get_mut("main.tex").unwrap();
        main.push(&eq_block);
        main.push("\\section{Method}\n");
        let p = paragraph(rng, pool, 2);
        main.push(&p);
        main.push("\n\n");
    }

    for e in 0..n_envs {
        let starred = idx % 5 == 3 && e == 0;
        let raw = algorithm_env(idx, e, starred, rng, pool);
        let host = env_host(idx, e);
        let lead = paragraph(rng, pool, 1);
        {
            let b = builders.get_mut(host).unwrap();
            b.push(&lead);
            b.push("\n");
            b.push_env(host, &raw, starred);
            b.push("\n\n");
        }
        // prose references to this algorithm, 1..=3 of them
        let n_refs = 1 + rng.gen_range(0..3usize);
        let label = env_label(idx, e);
        for r in 0..n_refs {
            let lead = paragraph(rng, pool, 1);
            let tail = paragraph(rng, pool, 1);
            let cmd = ref_command(&label, idx + e + r);
            let target = if has_latin1_notes && e == 0 {
                "notes.tex"
            } else if r == 1 && host != "main.tex" {
                "main.tex" // cross-file reference
            } else {
                host
            };
            let text = format!("{lead} As {cmd} details, {tail}\n\n");
            builders.get_mut(target).unwrap().push(&text);
        }
    }

    // decoys
    if idx % 4 == 1 {
        let main = builders.get_mut("main.tex").unwrap();
        main.push("% \\begin{algorithm} commented-out draft \\end{algorithm}\n");
        main.push("% \\begin{algorithm}\n% \\caption{abandoned}\n% \\end{algorithm}\n\n");
    }

    {
        let main = builders.get_mut("main.tex").unwrap();
        main.push("\\section{Discussion}\n");
        let p = paragraph(rng, pool, 2);
        main.push(&p);
        main.push("\n\\end{document}\n");
    }

    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut zips: Vec<(String, Vec<u8>)> = Vec::new();
    let mut spans: Vec<GtSpan> = Vec::new();

    for (name, builder) in builders {
        spans.extend(builder.spans.clone());
        match name {
            "appendix.tex" if idx == 20 => {
                zips.push((
                    "extra.zip".to_string(),
                    zip_bytes(&[("appendix.tex", &builder.text)]),
                ));
            }
            "methods.tex" if idx == 41 => {
                zips.push((
                    "bundle.zip".to_string(),
                    nested_zip_bytes("inner.zip", &[("methods.tex", &builder.text)]),
                ));
            }
            "notes.tex" => {
                files.push((name.to_string(), latin1_bytes(&builder.text)));
            }
            _ => {
                files.push((name.to_string(), builder.text.into_bytes()));
            }
        }
    }

    // extra decoy files
    if idx == 15 {
        let mut draft = String::from("% abandoned draft\n");
        draft.push_str(&paragraph(rng, pool, 1));
        draft.push_str("\n\\begin{algorithm}[H]\n\\caption{never finished}\nthis environment is never closed\n");
        files.push(("draft.tex".to_string(), draft.into_bytes()));
    }
    if idx == 28 {
        let mut stray = String::from("% stale include\n");
        stray.push_str("\\end{algorithm}\n");
        stray.push_str(&paragraph(rng, pool, 1));
        stray.push('\n');
        files.push(("stray.tex".to_string(), stray.into_bytes()));
    }
    if matches!(idx, 22 | 45) {
        let bbl = format!(
            "\\begin{{thebibliography}}{{9}}\n\\bibitem{{src}} A cited work. See \\ref{{{}}} for the procedure. Journal, 2019.\n\\end{{thebibliography}}\n",
            env_label(idx, 0)
        );
        files.push(("refs.bbl".to_string(), bbl.into_bytes()));
    }
    if idx == 30 {
        files.push((
            "macros.sty".to_string(),
            b"\\newcommand{\\dummy}{decoy style file, must be ignored}\n".to_vec(),
        ));
    }

    BuiltPaper { files, zips, spans }
}

fn build_enumerate_paper(idx: usize, rng: &mut ChaCha8Rng) -> BuiltPaper {
    let pool = THEMES[idx % THEMES.len()];
    let mut b = FileBuilder::default();
    let title = sentence(rng, pool);
    b.push(&format!(
        "\\documentclass{{article}}\n\\title{{{}}}\n\\begin{{document}}\n\\maketitle\n\\section{{Procedure}}\n",
        title.trim_end_matches(['.', '!', '?'])
    ));
    let p = paragraph(rng, pool, 2);
    b.push(&p);
    b.push("\n\nThe procedure runs as follows.\n\\begin{enumerate}\n");
    for _ in 0..4 {
        let s = sentence(rng, pool);
        b.push(&format!("\\item {s}\n"));
    }
    b.push("\\end{enumerate}\n\n");
    let p = paragraph(rng, pool, 2);
    b.push(&p);
    b.push("\n\\end{document}\n");
    BuiltPaper {
        files: vec![("main.tex".to_string(), b.text.into_bytes())],
        zips: Vec::new(),
        spans: Vec::new(),
    }
}

fn pdf_text_for(idx: usize, rng: &mut ChaCha8Rng) -> Option<String> {
    let pool = THEMES[idx % THEMES.len()];
    if idx >= 8 && idx % 6 == 2 {
        return None; // some papers come without extracted pdf text
    }
    let mut text = String::new();
    text.push_str(&paragraph(rng, pool, 3));
    text.push('\n');
    match idx % 4 {
        0 => {
            text.push_str("Algorithm 1 shows the main procedure in detail.\n");
            text.push_str(&paragraph(rng, pool, 2));
            text.push('\n');
            text.push_str("A naïve reading of algorithm 2 suffices here.\n");
        }
        1 => {
            text.push_str("The pseudocode appears in the appendix of the paper.\n");
            text.push_str("Pseudo-code conventions follow the usual style.\n");
        }
        2 => {
            text.push_str("An efficient algorithm exists for this problem class.\n");
            text.push_str("The algorithmic structure is rich but never spelled out.\n");
        }
        _ => {
            text.push_str("Algorithm: compute the fixed point, then rescale.\n");
            text.push_str(&paragraph(rng, pool, 1));
            text.push('\n');
        }
    }
    text.push_str(&paragraph(rng, pool, 2));
    text.push('\n');
    Some(text)
}

fn meta_json_for(idx: usize, id: &str) -> Option<String> {
    if idx == 5 {
        return None; // one paper ships without a metadata sidecar
    }
    let mut obj = serde_json::Map::new();
    obj.insert("id".into(), serde_json::Value::String(id.to_string()));
    if idx != 4 {
        obj.insert("year".into(), serde_json::Value::from(paper_year(idx)));
    }
    obj.insert(
        "title".into(),
        serde_json::Value::String(format!("Synthetic study {idx}")),
    );
    obj.insert(
        "abstract".into(),
        serde_json::Value::String("A synthetic abstract for pipeline fixtures.".to_string()),
    );
    obj.insert(
        "category".into(),
        serde_json::Value::String(CATEGORIES[idx % CATEGORIES.len()].to_string()),
    );
    if idx.is_multiple_of(2) {
        obj.insert(
            "subcategory".into(),
            serde_json::Value::String(format!("{}.sub", CATEGORIES[idx % CATEGORIES.len()])),
        );
    }
    obj.insert("version".into(), serde_json::Value::from(1));
    obj.insert(
        "url".into(),
        serde_json::Value::String(format!("https://example.org/abs/{id}")),
    );
    Some(serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("meta json"))
}

fn label_for(idx: usize) -> bool {
    match idx {
        0 | 1 => true,  // pdf-only papers that do contain pseudocode
        2 | 3 => false, // pdf-only papers without pseudocode
        _ => true,      // enumerate-style and algorithm papers
    }
}

fn write_file(path: &Path, bytes: &[u8]) {
    fs::create_dir_all(path.parent().unwrap()).expect("mkdir");
    fs::write(path, bytes).expect("write fixture file");
}

#[test]
#[ignore = "writes the committed fixture corpus; run explicitly to regenerate"]
fn regenerate_fixture_corpus() {
    let root = common::corpus_dir();
    if root.exists() {
        fs::remove_dir_all(&root).expect("clear old fixture");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut gt = GroundTruth {
        total_spans: 0,
        papers: Vec::new(),
    };
    let mut labels_csv = String::from("arxiv_id,has_pseudocode,notes\n");

    for idx in 0..50 {
        let id = paper_id(idx);
        let has_latex = idx >= 4;
        let built = if idx >= 8 {
            build_algorithm_paper(idx, &mut rng)
        } else if idx >= 4 {
            build_enumerate_paper(idx, &mut rng)
        } else {
            BuiltPaper {
                files: Vec::new(),
                zips: Vec::new(),
                spans: Vec::new(),
            }
        };

        for (name, bytes) in &built.files {
            write_file(&root.join("sources").join(&id).join(name), bytes);
        }
        for (name, bytes) in &built.zips {
            write_file(&root.join("sources").join(&id).join(name), bytes);
        }
        if has_latex && built.files.is_empty() && built.zips.is_empty() {
            panic!("latex paper {idx} produced no files");
        }

        if let Some(text) = pdf_text_for(idx, &mut rng) {
            write_file(
                &root.join("pdf_text").join(format!("{id}.txt")),
                text.as_bytes(),
            );
        } else if idx < 4 {
            panic!("pdf-only paper {idx} must have pdf text");
        }
        if let Some(meta) = meta_json_for(idx, &id) {
            write_file(
                &root.join("meta").join(format!("{id}.json")),
                meta.as_bytes(),
            );
        }

        let notes = if idx % 9 == 0 { "checked twice" } else { "" };
        labels_csv.push_str(&format!("{id},{},{notes}\n", label_for(idx)));

        gt.total_spans += built.spans.len();
        gt.papers.push(GtPaper {
            arxiv_id: id,
            year: if matches!(idx, 4 | 5) {
                None
            } else {
                Some(paper_year(idx))
            },
            category: if idx == 5 {
                None
            } else {
                Some(CATEGORIES[idx % CATEGORIES.len()].to_string())
            },
            has_latex,
            spans: built.spans,
        });
    }

    assert_eq!(
        gt.total_spans, 120,
        "fixture must hold exactly 120 environments"
    );
    let starred = gt
        .papers
        .iter()
        .flat_map(|p| &p.spans)
        .filter(|s| s.starred)
        .count();
    assert!(
        starred >= 5,
        "fixture needs starred environments, got {starred}"
    );

    write_file(&root.join("labels.csv"), labels_csv.as_bytes());
    let gt_json = serde_json::to_string_pretty(&gt).expect("ground truth json");
    write_file(&common::ground_truth_path(), gt_json.as_bytes());
}
