//! Shared LaTeX text utilities: comment masking, byte/char offset mapping,
//! `algorithm` environment scanning, and enclosing-environment lookup.
//!
//! All offsets handed out by this module count Unicode scalar values, not
//! bytes, so they stay stable across input encodings.

use std::sync::OnceLock;

use regex::Regex;

/// Maps between byte offsets (as produced by `regex`) and char offsets.
#[derive(Debug)]
pub struct CharMap {
    // byte offset of each char, plus a trailing sentinel equal to text.len()
    byte_of_char: Vec<usize>,
}

impl CharMap {
    pub fn new(text: &str) -> Self {
        let mut byte_of_char: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        byte_of_char.push(text.len());
        CharMap { byte_of_char }
    }

    pub fn char_len(&self) -> usize {
        self.byte_of_char.len() - 1
    }

    /// Char index of a byte offset that lies on a char boundary.
    pub fn char_of_byte(&self, byte: usize) -> usize {
        match self.byte_of_char.binary_search(&byte) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn byte_of_char(&self, ch: usize) -> usize {
        self.byte_of_char[ch]
    }

    /// Slice `text` by char range.
    pub fn slice<'a>(&self, text: &'a str, start: usize, end: usize) -> &'a str {
        &text[self.byte_of_char[start]..self.byte_of_char[end]]
    }
}

/// Per-char mask marking positions that sit inside a `%` comment.
///
/// `\%` escapes the percent sign; `\\` is consumed as a unit so a `%` right
/// after a line break command still opens a comment. The newline ending a
/// comment is not itself masked.
pub fn comment_mask(chars: &[char]) -> Vec<bool> {
    let mut mask = vec![false; chars.len()];
    let mut in_comment = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if in_comment {
            if c == '\n' {
                in_comment = false;
            } else {
                mask[i] = true;
            }
            i += 1;
        } else {
            match c {
                '\\' => i += 2,
                '%' => {
                    mask[i] = true;
                    in_comment = true;
                    i += 1;
                }
                _ => i += 1,
            }
        }
    }
    mask
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagKind {
    Begin,
    End,
}

/// One `\begin{algorithm}` / `\end{algorithm}` token (starred or not).
#[derive(Debug, Clone, Copy)]
pub struct AlgToken {
    pub kind: TagKind,
    /// Char offset of the leading backslash.
    pub start: usize,
    /// Char offset one past the closing brace.
    pub end: usize,
    pub starred: bool,
}

fn eat_word(chars: &[char], i: &mut usize, word: &str) -> bool {
    let mut j = *i;
    for w in word.chars() {
        if j >= chars.len() || chars[j] != w {
            return false;
        }
        j += 1;
    }
    *i = j;
    true
}

fn match_alg_token(chars: &[char], start: usize) -> Option<AlgToken> {
    let mut i = start + 1;
    let kind = if eat_word(chars, &mut i, "begin") {
        TagKind::Begin
    } else if eat_word(chars, &mut i, "end") {
        TagKind::End
    } else {
        return None;
    };
    // spaces/tabs between the command and its brace are legal LaTeX
    while i < chars.len() && (chars[i] == ' ' || chars[i] == '\t') {
        i += 1;
    }
    if i >= chars.len() || chars[i] != '{' {
        return None;
    }
    i += 1;
    if !eat_word(chars, &mut i, "algorithm") {
        return None;
    }
    let starred = if i < chars.len() && chars[i] == '*' {
        i += 1;
        true
    } else {
        false
    };
    if i >= chars.len() || chars[i] != '}' {
        return None;
    }
    Some(AlgToken {
        kind,
        start,
        end: i + 1,
        starred,
    })
}

/// All uncommented algorithm begin/end tokens in document order.
pub fn algorithm_tokens(chars: &[char], mask: &[bool]) -> Vec<AlgToken> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\\' && !mask[i] {
            if let Some(tok) = match_alg_token(chars, i) {
                i = tok.end;
                out.push(tok);
                continue;
            }
        }
        i += 1;
    }
    out
}

/// A balanced outermost algorithm environment found by depth counting.
#[derive(Debug, Clone)]
pub struct RawSpan {
    /// Char offset of the begin token's backslash.
    pub start: usize,
    /// Char offset one past the end token's closing brace.
    pub end: usize,
    /// Char offset just past the begin token (body start).
    pub body_start: usize,
    /// Char offset of the end token's backslash (body end).
    pub body_end: usize,
    pub starred: bool,
    pub max_depth: usize,
}

#[derive(Debug, Clone)]
pub struct TagWarning {
    /// Char offset of the offending token.
    pub offset: usize,
    pub message: String,
}

/// Scans a file for outermost `algorithm` environments. Nested environments
/// are folded into their outermost span via depth counting; commented-out
/// tokens are ignored entirely. A begin without a matching end yields a
/// warning and no span, as does a stray end.
pub fn algorithm_spans(chars: &[char]) -> (Vec<RawSpan>, Vec<TagWarning>) {
    let mask = comment_mask(chars);
    let tokens = algorithm_tokens(chars, &mask);

    let mut spans = Vec::new();
    let mut warnings = Vec::new();
    let mut depth = 0usize;
    let mut max_depth = 0usize;
    let mut current: Option<(usize, usize, bool)> = None; // (start, body_start, starred)

    for tok in tokens {
        match tok.kind {
            TagKind::Begin => {
                if depth == 0 {
                    current = Some((tok.start, tok.end, tok.starred));
                    max_depth = 0;
                }
                depth += 1;
                max_depth = max_depth.max(depth);
            }
            TagKind::End => {
                if depth == 0 {
                    warnings.push(TagWarning {
                        offset: tok.start,
                        message: "\\end{algorithm} without matching \\begin{algorithm}".into(),
                    });
                } else if depth == 1 {
                    let (start, body_start, starred) = current.take().expect("open span");
                    spans.push(RawSpan {
                        start,
                        end: tok.end,
                        body_start,
                        body_end: tok.start,
                        starred,
                        max_depth,
                    });
                    depth = 0;
                } else {
                    depth -= 1;
                }
            }
        }
    }
    if let Some((start, _, _)) = current {
        warnings.push(TagWarning {
            offset: start,
            message: "\\begin{algorithm} without matching \\end{algorithm}; span dropped".into(),
        });
    }
    (spans, warnings)
}

/// A generic `\begin{name}...\end{name}` region, char offsets inclusive of
/// both delimiters.
#[derive(Debug, Clone)]
pub struct EnvSpan {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

fn env_token_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\\(begin|end)[ \t]*\{([A-Za-z]+\*?)\}").expect("env regex"))
}

/// Innermost environment enclosing char position `pos`, excluding the
/// `document` environment (a label there sits in plain prose).
pub fn innermost_environment(text: &str, map: &CharMap, pos: usize) -> Option<EnvSpan> {
    let chars: Vec<char> = text.chars().collect();
    let mask = comment_mask(&chars);

    let mut stack: Vec<(String, usize)> = Vec::new();
    let mut best: Option<EnvSpan> = None;
    for cap in env_token_regex().captures_iter(text) {
        let whole = cap.get(0).expect("group 0");
        let start = map.char_of_byte(whole.start());
        if mask[start] {
            continue;
        }
        let name = cap.get(2).expect("env name").as_str();
        match cap.get(1).expect("kind").as_str() {
            "begin" => stack.push((name.to_string(), start)),
            _ => {
                if stack.last().map(|(n, _)| n.as_str()) == Some(name) {
                    let (name, begin) = stack.pop().expect("nonempty stack");
                    let end = map.char_of_byte(whole.end());
                    if name != "document" && begin <= pos && pos < end {
                        let deeper = best.as_ref().map(|b| begin > b.start).unwrap_or(true);
                        if deeper {
                            best = Some(EnvSpan {
                                name,
                                start: begin,
                                end,
                            });
                        }
                    }
                }
                // an end that does not match the open environment is ignored
            }
        }
    }
    best
}

/// Maximal run of non-blank lines around char position `pos`. A blank line is
/// empty or whitespace-only. Returns a char range not including the trailing
/// newline of the last line.
pub fn paragraph_at(chars: &[char], pos: usize) -> (usize, usize) {
    let len = chars.len();
    let pos = pos.min(len.saturating_sub(1));

    let line_start = |p: usize| -> usize {
        let mut s = p;
        while s > 0 && chars[s - 1] != '\n' {
            s -= 1;
        }
        s
    };
    let line_end = |p: usize| -> usize {
        let mut e = p;
        while e < len && chars[e] != '\n' {
            e += 1;
        }
        e
    };
    let is_blank = |s: usize, e: usize| chars[s..e].iter().all(|c| c.is_whitespace());

    let mut start = line_start(pos);
    loop {
        if start == 0 {
            break;
        }
        let prev_end = start - 1; // the '\n' terminating the previous line
        let prev_start = line_start(prev_end);
        if is_blank(prev_start, prev_end) {
            break;
        }
        start = prev_start;
    }

    let mut end = line_end(pos);
    loop {
        if end >= len {
            break;
        }
        // chars[end] == '\n'; peek at the next line
        let ns = end + 1;
        let ne = line_end(ns);
        if ns >= len || is_blank(ns, ne) {
            break;
        }
        end = ne;
    }

    (start, end)
}
