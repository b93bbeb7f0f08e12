//! LaTeX stripping for reference snippets: comments, math, commands, small
//! underscore tokens, whitespace. The output is plain prose suitable for
//! topic modeling, and cleaning is idempotent under the default rules.

use serde::{Deserialize, Serialize};

/// Toggles for the individual removal passes. All default to true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningRules {
    pub remove_commands: bool,
    pub remove_comments: bool,
    pub remove_math: bool,
    pub remove_underscore_tokens: bool,
    pub collapse_whitespace: bool,
}

impl Default for CleaningRules {
    fn default() -> Self {
        CleaningRules {
            remove_commands: true,
            remove_comments: true,
            remove_math: true,
            remove_underscore_tokens: true,
            collapse_whitespace: true,
        }
    }
}

/// Drops unescaped `%` through end of line. Escaped percents are replaced by
/// a space rather than kept literal: a bare `%` in the output would read as a
/// comment on a second pass, and cleaning must be idempotent.
fn strip_comments(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        match chars[i] {
            '\\' if i + 1 < chars.len() && chars[i + 1] == '%' => {
                out.push(' ');
                i += 2;
            }
            '\\' if i + 1 < chars.len() && chars[i + 1] == '\\' => {
                out.push('\\');
                out.push('\\');
                i += 2;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}

/// Replaces math segments (`$...$`, `$$...$$`, `\(...\)`, `\[...\]`) with a
/// single space. An unclosed opener swallows everything to the end of the
/// snippet, since truncation can split a formula. Escaped dollars are
/// dropped to a space for the same idempotence reason as escaped percents.
fn strip_math(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let len = chars.len();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;

    // scan for a closing delimiter, honoring backslash escapes
    let find_close = |from: usize, close: &[char]| -> Option<usize> {
        let mut j = from;
        while j < len {
            if chars[j..].starts_with(close) {
                return Some(j);
            }
            if chars[j] == '\\' {
                j += 2;
            } else {
                j += 1;
            }
        }
        None
    };

    while i < len {
        match chars[i] {
            '\\' if i + 1 < len && chars[i + 1] == '$' => {
                out.push(' ');
                i += 2;
            }
            '\\' if i + 1 < len && chars[i + 1] == '\\' => {
                out.push('\\');
                out.push('\\');
                i += 2;
            }
            '\\' if i + 1 < len && (chars[i + 1] == '(' || chars[i + 1] == '[') => {
                let close = if chars[i + 1] == '(' { [')'] } else { [']'] };
                out.push(' ');
                match find_close(i + 2, &['\\', close[0]]) {
                    Some(j) => i = j + 2,
                    None => break,
                }
            }
            '$' => {
                out.push(' ');
                let display = i + 1 < len && chars[i + 1] == '$';
                let (close, from): (&[char], usize) = if display {
                    (&['$', '$'], i + 2)
                } else {
                    (&['$'], i + 1)
                };
                match find_close(from, close) {
                    Some(j) => i = j + close.len(),
                    None => break,
                }
            }
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}

/// Removes command tokens (`\word`, optional star, optional `[...]`
/// argument) and lone backslashes, each replaced by a space. All braces are
/// dropped so command argument content survives bare.
fn strip_commands(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let len = chars.len();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < len {
        match chars[i] {
            '\\' => {
                i += 1;
                if i < len && chars[i].is_ascii_alphabetic() {
                    while i < len && chars[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    if i < len && chars[i] == '*' {
                        i += 1;
                    }
                    let mut j = i;
                    while j < len && (chars[j] == ' ' || chars[j] == '\t') {
                        j += 1;
                    }
                    if j < len && chars[j] == '[' {
                        if let Some(close) = (j + 1..len).find(|&k| chars[k] == ']') {
                            i = close + 1;
                        }
                    }
                }
                out.push(' ');
            }
            '{' | '}' => i += 1,
            c => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}

fn is_underscore_token(token: &[char]) -> bool {
    match token.len() {
        1 => token[0] == '_',
        2 => token[0] == '_' || token[1] == '_',
        3 => token[1] == '_',
        _ => false,
    }
}

/// Drops whitespace-delimited tokens shaped `X_Y`, `X_`, `_Y`, or `_` with
/// single-character sides. Larger tokens such as `file_name` survive.
/// Whitespace runs pass through untouched.
fn strip_underscore_tokens(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut token: Vec<char> = Vec::new();
    let flush = |out: &mut String, token: &mut Vec<char>| {
        if !is_underscore_token(token) {
            out.extend(token.iter());
        }
        token.clear();
    };
    for c in text.chars() {
        if c.is_whitespace() {
            flush(&mut out, &mut token);
            out.push(c);
        } else {
            token.push(c);
        }
    }
    flush(&mut out, &mut token);
    out
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Applies the enabled removal passes in order: comments, math, commands,
/// underscore tokens, whitespace collapse. Total for any input.
pub fn clean(text: &str, rules: &CleaningRules) -> String {
    let mut s = text.to_string();
    if rules.remove_comments {
        s = strip_comments(&s);
    }
    if rules.remove_math {
        s = strip_math(&s);
    }
    if rules.remove_commands {
        s = strip_commands(&s);
    }
    if rules.remove_underscore_tokens {
        s = strip_underscore_tokens(&s);
    }
    if rules.collapse_whitespace {
        s = collapse_whitespace(&s);
    }
    s
}
