//! Pseudocode detection: `algorithm` tag search in LaTeX sources and
//! indicative-keyword search in extracted PDF text.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::PaperBundle;
use crate::latex::{self, CharMap};

/// Outcome of the LaTeX tag search for one bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionResult {
    pub arxiv_id: String,
    pub latex_tag_found: bool,
    /// Number of balanced outermost algorithm environments across all files.
    /// Matches the number of spans the extractor will produce, so nested
    /// environments count once and dangling begins not at all.
    pub tag_count: usize,
    pub has_latex: bool,
}

/// The two indicative-keyword families searched in PDF text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeywordClass {
    Pseudocode,
    Algorithm,
}

impl KeywordClass {
    pub const ALL: [KeywordClass; 2] = [KeywordClass::Pseudocode, KeywordClass::Algorithm];

    pub fn as_str(&self) -> &'static str {
        match self {
            KeywordClass::Pseudocode => "pseudocode",
            KeywordClass::Algorithm => "algorithm",
        }
    }
}

impl std::str::FromStr for KeywordClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pseudocode" => Ok(KeywordClass::Pseudocode),
            "algorithm" => Ok(KeywordClass::Algorithm),
            other => Err(format!("unknown keyword class: {other}")),
        }
    }
}

/// One indicative-keyword match in PDF text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordHit {
    pub keyword_class: KeywordClass,
    pub matched_text: String,
    /// Char index into the searched text.
    pub file_offset: usize,
}

fn pseudocode_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // surface forms: Pseudocode, pseudocode, Pseudo-code, pseudo-code
    RE.get_or_init(|| Regex::new(r"[Pp]seudo-?code").expect("pseudocode regex"))
}

fn algorithm_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // surface forms: Algorithm N / algorithm N / Algorithm-N / algorithm-N
    // with N one or more decimal digits, plus the literal Algorithm: forms
    RE.get_or_init(|| Regex::new(r"[Aa]lgorithm(?:[ \-][0-9]+|:)").expect("algorithm regex"))
}

fn class_regex(class: KeywordClass) -> &'static Regex {
    match class {
        KeywordClass::Pseudocode => pseudocode_regex(),
        KeywordClass::Algorithm => algorithm_regex(),
    }
}

/// Decides whether a bundle contains pseudocode by scanning every LaTeX file
/// for balanced `\begin{algorithm}`/`\end{algorithm}` environments (starred
/// accepted, comments stripped first).
pub fn detect_latex_algorithm(bundle: &PaperBundle) -> DetectionResult {
    let mut tag_count = 0;
    for (_, text) in &bundle.latex_files {
        let chars: Vec<char> = text.chars().collect();
        let (spans, _) = latex::algorithm_spans(&chars);
        tag_count += spans.len();
    }
    DetectionResult {
        arxiv_id: bundle.arxiv_id().to_string(),
        latex_tag_found: tag_count > 0,
        tag_count,
        has_latex: bundle.has_latex,
    }
}

/// Finds every non-overlapping indicative-keyword hit in document order.
pub fn detect_indicative_keywords(text: &str, classes: &[KeywordClass]) -> Vec<KeywordHit> {
    let map = CharMap::new(text);
    let mut hits = Vec::new();
    for &class in classes {
        for m in class_regex(class).find_iter(text) {
            hits.push(KeywordHit {
                keyword_class: class,
                matched_text: m.as_str().to_string(),
                file_offset: map.char_of_byte(m.start()),
            });
        }
    }
    hits.sort_by_key(|h| h.file_offset);
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PaperMetadata;

    fn bundle_with(files: Vec<(&str, &str)>) -> PaperBundle {
        let latex_files: Vec<(String, String)> = files
            .into_iter()
            .map(|(p, t)| (p.to_string(), t.to_string()))
            .collect();
        let has_latex = !latex_files.is_empty();
        PaperBundle {
            metadata: PaperMetadata::stub("t.0001"),
            latex_files,
            pdf_text: None,
            has_latex,
        }
    }

    #[test]
    fn tag_found_simple() {
        let b = bundle_with(vec![(
            "main.tex",
            r"intro \begin{algorithm}\end{algorithm} outro",
        )]);
        let r = detect_latex_algorithm(&b);
        assert!(r.latex_tag_found);
        assert_eq!(r.tag_count, 1);
        assert!(r.has_latex);
    }

    #[test]
    fn enumerate_only_is_negative() {
        let b = bundle_with(vec![(
            "main.tex",
            r"\begin{enumerate}\item step one\item step two\end{enumerate}",
        )]);
        let r = detect_latex_algorithm(&b);
        assert!(!r.latex_tag_found);
        assert_eq!(r.tag_count, 0);
    }

    #[test]
    fn commented_tag_is_negative() {
        let b = bundle_with(vec![(
            "main.tex",
            "text\n% \\begin{algorithm} old draft \\end{algorithm}\nmore",
        )]);
        let r = detect_latex_algorithm(&b);
        assert!(!r.latex_tag_found);
        assert_eq!(r.tag_count, 0);
    }

    #[test]
    fn empty_bundle_all_false() {
        let b = bundle_with(vec![]);
        let r = detect_latex_algorithm(&b);
        assert!(!r.latex_tag_found);
        assert!(!r.has_latex);
        assert_eq!(r.tag_count, 0);
    }

    #[test]
    fn counts_across_files() {
        let b = bundle_with(vec![
            ("a.tex", r"\begin{algorithm}x\end{algorithm}"),
            (
                "b.tex",
                r"\begin{algorithm*}y\end{algorithm*} and \begin{algorithm}z\end{algorithm}",
            ),
        ]);
        assert_eq!(detect_latex_algorithm(&b).tag_count, 3);
    }

    #[test]
    fn keyword_pseudocode_forms() {
        let hits =
            detect_indicative_keywords("we give pseudocode for the method", &KeywordClass::ALL);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].keyword_class, KeywordClass::Pseudocode);
        assert_eq!(hits[0].matched_text, "pseudocode");

        for form in ["Pseudocode", "Pseudo-code", "pseudo-code"] {
            let hits = detect_indicative_keywords(form, &[KeywordClass::Pseudocode]);
            assert_eq!(hits.len(), 1, "form {form}");
            assert_eq!(hits[0].matched_text, form);
        }
    }

    #[test]
    fn keyword_algorithm_forms() {
        let hits =
            detect_indicative_keywords("Algorithm 1 shows the procedure", &KeywordClass::ALL);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].keyword_class, KeywordClass::Algorithm);
        assert_eq!(hits[0].matched_text, "Algorithm 1");

        for (text, expect) in [
            ("see algorithm 12 here", Some("algorithm 12")),
            ("see Algorithm-3 here", Some("Algorithm-3")),
            ("Algorithm: compute", Some("Algorithm:")),
            ("algorithm: compute", Some("algorithm:")),
            ("an efficient algorithm exists", None),
            ("the algorithmic view", None),
            ("algorithm  7 double space", None),
        ] {
            let hits = detect_indicative_keywords(text, &[KeywordClass::Algorithm]);
            match expect {
                Some(m) => {
                    assert_eq!(hits.len(), 1, "text {text:?}");
                    assert_eq!(hits[0].matched_text, m);
                }
                None => assert!(hits.is_empty(), "text {text:?}"),
            }
        }
    }

    #[test]
    fn hits_in_document_order_with_char_offsets() {
        let text = "naïve pseudocode, then Algorithm 2";
        let hits = detect_indicative_keywords(text, &KeywordClass::ALL);
        assert_eq!(hits.len(), 2);
        assert!(hits[0].file_offset < hits[1].file_offset);
        // offsets count chars, not bytes
        assert_eq!(hits[0].file_offset, 6);
        let chars: Vec<char> = text.chars().collect();
        let got: String = chars
            [hits[1].file_offset..hits[1].file_offset + hits[1].matched_text.chars().count()]
            .iter()
            .collect();
        assert_eq!(got, "Algorithm 2");
    }

    #[test]
    fn doubling_text_doubles_hits() {
        let t = "pseudocode and Algorithm 4 in prose. ";
        let single = detect_indicative_keywords(t, &KeywordClass::ALL).len();
        let double = detect_indicative_keywords(&format!("{t}{t}"), &KeywordClass::ALL).len();
        assert_eq!(double, 2 * single);
    }
}
