//! Reference detection: label discovery inside pseudocode, dynamic
//! generation of `\<seg>ref{...}` matchers, corpus-wide reference location,
//! and sentence-trimmed snippet extraction.

use std::collections::BTreeSet;
use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::PaperBundle;
use crate::latex::{self, CharMap};

/// Snippet window geometry. `span_chars` counts outward from each edge of
/// the matched reference command; `boundary_window` is the region just
/// inside each window edge that is scanned for a sentence terminator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetConfig {
    pub span_chars: usize,
    pub boundary_window: usize,
    pub sentence_terminators: BTreeSet<char>,
}

impl Default for SnippetConfig {
    fn default() -> Self {
        SnippetConfig {
            span_chars: 1200,
            boundary_window: 300,
            sentence_terminators: ['.', '!', '?'].into_iter().collect(),
        }
    }
}

/// A prose excerpt around one reference to a pseudocode label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceSnippet {
    pub text: String,
    pub source_path: String,
    /// Char offset of the matched reference command in its file.
    pub tag_offset: usize,
    pub trimmed_left: bool,
    pub trimmed_right: bool,
}

/// One located reference command (char offsets).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefMatch {
    pub source_path: String,
    pub offset: usize,
    pub length: usize,
}

fn label_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\\label[ \t]*\{([^}]*)\}").expect("label regex"))
}

/// Every `\label{L}` inside the text, whitespace-trimmed, duplicates kept in
/// order. Commented-out labels are skipped.
pub fn find_labels(body: &str) -> Vec<String> {
    let map = CharMap::new(body);
    let chars: Vec<char> = body.chars().collect();
    let mask = latex::comment_mask(&chars);
    label_regex()
        .captures_iter(body)
        .filter(|cap| !mask[map.char_of_byte(cap.get(0).expect("group 0").start())])
        .map(|cap| cap.get(1).expect("content").as_str().trim().to_string())
        .collect()
}

/// Matcher for every reference command pointing at one label: an alphabetic
/// (possibly empty) segment followed by `ref`, then the label in braces with
/// optional surrounding whitespace. Label characters match literally.
#[derive(Debug, Clone)]
pub struct RefMatcher {
    regex: Regex,
    label: String,
}

pub fn generate_ref_patterns(label: &str) -> RefMatcher {
    let pattern = format!(r"\\[a-zA-Z]*ref[ \t]*\{{\s*{}\s*\}}", regex::escape(label));
    RefMatcher {
        regex: Regex::new(&pattern).expect("ref matcher regex"),
        label: label.to_string(),
    }
}

impl RefMatcher {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.regex.is_match(text)
    }

    /// Char-offset matches within one text, commented positions skipped.
    pub fn find_in(&self, source_path: &str, text: &str) -> Vec<RefMatch> {
        let map = CharMap::new(text);
        let chars: Vec<char> = text.chars().collect();
        let mask = latex::comment_mask(&chars);
        self.regex
            .find_iter(text)
            .filter_map(|m| {
                let start = map.char_of_byte(m.start());
                if mask[start] {
                    return None;
                }
                Some(RefMatch {
                    source_path: source_path.to_string(),
                    offset: start,
                    length: map.char_of_byte(m.end()) - start,
                })
            })
            .collect()
    }
}

/// All matches across all LaTeX files of the bundle in (path, offset) order.
/// Matches inside the originating pseudocode span (given as its source path
/// and char range) are excluded.
pub fn locate_references(
    matcher: &RefMatcher,
    bundle: &PaperBundle,
    exclude: Option<(&str, Range<usize>)>,
) -> Vec<RefMatch> {
    let mut out = Vec::new();
    for (path, text) in &bundle.latex_files {
        for m in matcher.find_in(path, text) {
            if let Some((ex_path, ex_range)) = &exclude {
                if path == ex_path && ex_range.contains(&m.offset) {
                    continue;
                }
            }
            out.push(m);
        }
    }
    out
}

/// Cuts the snippet around one located reference.
///
/// The candidate window spans `span_chars` on each side of the match,
/// clipped to the file. The first `boundary_window` chars of the window are
/// scanned for a sentence terminator; if one occurs, the snippet starts just
/// after the last such terminator (and any following whitespace). The final
/// `boundary_window` chars are scanned likewise and the snippet ends at the
/// first terminator there, inclusive. With no terminator the raw window
/// boundary stands. Scan regions never overlap the match itself, so the
/// snippet always contains the full reference command. A terminator only
/// counts when followed by whitespace, a closing bracket, or the window end,
/// which keeps decimal points like `3.14` from ending a sentence.
pub fn extract_snippet(text: &str, m: &RefMatch, cfg: &SnippetConfig) -> ReferenceSnippet {
    let chars: Vec<char> = text.chars().collect();
    let len = chars.len();
    let match_start = m.offset.min(len);
    let match_end = (m.offset + m.length).min(len);

    let wstart = match_start.saturating_sub(cfg.span_chars);
    let wend = (match_end + cfg.span_chars).min(len);

    let is_terminator = |p: usize| -> bool {
        if !cfg.sentence_terminators.contains(&chars[p]) {
            return false;
        }
        if p + 1 >= wend {
            return true;
        }
        let next = chars[p + 1];
        next.is_whitespace() || matches!(next, ')' | ']' | '}')
    };

    let left_scan_end = (wstart + cfg.boundary_window).min(match_start);
    let mut start = wstart;
    let mut trimmed_left = false;
    if let Some(p) = (wstart..left_scan_end).rev().find(|&p| is_terminator(p)) {
        trimmed_left = true;
        start = p + 1;
        while start < match_start && chars[start].is_whitespace() {
            start += 1;
        }
    }

    let right_scan_start = wend.saturating_sub(cfg.boundary_window).max(match_end);
    let mut end = wend;
    let mut trimmed_right = false;
    if let Some(p) = (right_scan_start..wend).find(|&p| is_terminator(p)) {
        trimmed_right = true;
        end = p + 1;
    }

    ReferenceSnippet {
        text: chars[start..end].iter().collect(),
        source_path: m.source_path.clone(),
        tag_offset: m.offset,
        trimmed_left,
        trimmed_right,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PaperMetadata;

    fn cfg(span: usize, window: usize) -> SnippetConfig {
        SnippetConfig {
            span_chars: span,
            boundary_window: window,
            ..SnippetConfig::default()
        }
    }

    fn bundle_with(files: Vec<(&str, &str)>) -> PaperBundle {
        let latex_files: Vec<(String, String)> = files
            .into_iter()
            .map(|(p, t)| (p.to_string(), t.to_string()))
            .collect();
        PaperBundle {
            metadata: PaperMetadata::stub("t.0001"),
            has_latex: !latex_files.is_empty(),
            latex_files,
            pdf_text: None,
        }
    }

    #[test]
    fn labels_found_and_trimmed() {
        assert_eq!(find_labels(r"\label{alg:main}"), vec!["alg:main"]);
        assert_eq!(find_labels(r"\label{ alg:x }"), vec!["alg:x"]);
        assert!(find_labels("no labels here").is_empty());
        assert_eq!(
            find_labels(r"\label{a} mid \label{b} \label{a}"),
            vec!["a", "b", "a"]
        );
        assert!(find_labels("% \\label{ghost}").is_empty());
    }

    #[test]
    fn matcher_accepts_ref_families() {
        let m = generate_ref_patterns("alg:main");
        for text in [
            r"\ref{alg:main}",
            r"\algref{alg:main}",
            r"\eqref{alg:main}",
            r"\Cref{alg:main}",
            r"\autoref{ alg:main }",
        ] {
            assert!(m.is_match(text), "should match {text}");
        }
        assert!(!m.is_match(r"\ref{alg:main2}"));
        assert!(!m.is_match(r"\pref ix{alg:main}"));
        assert!(!m.is_match(r"\refstepcounter{alg:main}"));
    }

    #[test]
    fn matcher_escapes_special_characters() {
        let m = generate_ref_patterns("alg:a+b");
        assert!(m.is_match(r"\ref{alg:a+b}"));
        assert!(!m.is_match(r"\ref{alg:axb}"));
    }

    #[test]
    fn locate_across_files_ordered_and_excluded() {
        let bundle = bundle_with(vec![
            (
                "a.tex",
                r"\begin{algorithm}\label{alg:m}\end{algorithm} then \ref{alg:m} and \Cref{alg:m}",
            ),
            ("b.tex", r"see \ref{alg:m} in the other file"),
        ]);
        let m = generate_ref_patterns("alg:m");
        let all = locate_references(&m, &bundle, None);
        assert_eq!(all.len(), 3);
        assert!(all
            .windows(2)
            .all(|w| (w[0].source_path.as_str(), w[0].offset)
                <= (w[1].source_path.as_str(), w[1].offset)));

        // no matches for an unknown label
        let none = locate_references(&generate_ref_patterns("alg:zzz"), &bundle, None);
        assert!(none.is_empty());
    }

    #[test]
    fn originating_span_is_excluded() {
        let text =
            r"\begin{algorithm}\label{alg:m} self \ref{alg:m}\end{algorithm} outside \ref{alg:m}";
        let bundle = bundle_with(vec![("a.tex", text)]);
        let span_len = text.chars().count() - " outside \\ref{alg:m}".chars().count();
        let m = generate_ref_patterns("alg:m");
        let hits = locate_references(&m, &bundle, Some(("a.tex", 0..span_len)));
        assert_eq!(hits.len(), 1);
        assert!(hits[0].offset >= span_len);
    }

    #[test]
    fn snippet_hand_traced_example() {
        // both boundary windows contain a terminator, so both sides trim
        let text = "abcd. efghij REF klmno. pqrst";
        let m = RefMatch {
            source_path: "a.tex".into(),
            offset: 13,
            length: 3,
        };
        let snip = extract_snippet(text, &m, &cfg(10, 5));
        assert_eq!(snip.text, "efghij REF klmno.");
        assert!(snip.trimmed_left);
        assert!(snip.trimmed_right);
        assert_eq!(snip.tag_offset, 13);
    }

    #[test]
    fn snippet_without_terminators_is_raw_window() {
        let text = "aaaa bbbb REF cccc dddd";
        let m = RefMatch {
            source_path: "a.tex".into(),
            offset: 10,
            length: 3,
        };
        let snip = extract_snippet(text, &m, &cfg(5, 3));
        assert_eq!(snip.text, "bbbb REF cccc");
        assert!(!snip.trimmed_left);
        assert!(!snip.trimmed_right);
    }

    #[test]
    fn snippet_clips_at_file_start() {
        let text = "REF tail text here";
        let m = RefMatch {
            source_path: "a.tex".into(),
            offset: 0,
            length: 3,
        };
        let snip = extract_snippet(text, &m, &cfg(100, 10));
        assert!(snip.text.starts_with("REF"));
        assert_eq!(snip.text, text);
        assert!(!snip.trimmed_left);
    }

    #[test]
    fn decimal_point_does_not_terminate() {
        // the only "." in the right window sits inside 3.14, so no trim
        let text = "REF x 3.14aaaa";
        let m = RefMatch {
            source_path: "a.tex".into(),
            offset: 0,
            length: 3,
        };
        let snip = extract_snippet(text, &m, &cfg(20, 20));
        assert!(!snip.trimmed_right);
        assert_eq!(snip.text, text);
    }

    #[test]
    fn snippet_length_bound_holds() {
        let text = "x".repeat(40) + " REF " + &"y".repeat(40);
        let offset = text.find("REF").unwrap();
        let m = RefMatch {
            source_path: "a.tex".into(),
            offset,
            length: 3,
        };
        let c = cfg(12, 4);
        let snip = extract_snippet(&text, &m, &c);
        assert!(snip.text.chars().count() <= 2 * c.span_chars + m.length);
        assert!(snip.text.contains("REF"));
    }
}
