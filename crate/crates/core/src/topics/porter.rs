//! Classic Porter stemming, transcribed from the reference implementation
//! (including its two documented departures: `bli` -> `ble` and
//! `logi` -> `log` in step 2, and the skip for words of length <= 2).
//! The rule tables keep the reference layout even where branches repeat.

#![allow(clippy::if_same_then_else, clippy::collapsible_match)]

struct Stemmer {
    b: Vec<u8>,
    /// live length of the word
    len: usize,
    /// stem length set by the most recent successful `ends`
    stem_len: usize,
}

impl Stemmer {
    fn new(word: &str) -> Self {
        Stemmer {
            b: word.as_bytes().to_vec(),
            len: word.len(),
            stem_len: 0,
        }
    }

    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => {
                if i == 0 {
                    true
                } else {
                    !self.cons(i - 1)
                }
            }
            _ => true,
        }
    }

    /// Number of consonant-vowel-consonant sequences in the current stem.
    fn m(&self) -> usize {
        let j = self.stem_len;
        let mut n = 0;
        let mut i = 0;
        loop {
            if i >= j {
                return n;
            }
            if !self.cons(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i >= j {
                    return n;
                }
                if self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i >= j {
                    return n;
                }
                if !self.cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..self.stem_len).any(|i| !self.cons(i))
    }

    /// Double consonant ending at inclusive index `i`.
    fn doublec(&self, i: usize) -> bool {
        i >= 1 && self.b[i] == self.b[i - 1] && self.cons(i)
    }

    /// consonant - vowel - consonant ending at inclusive index `i`, where the
    /// final consonant is not w, x or y.
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    fn ends(&mut self, s: &str) -> bool {
        let s = s.as_bytes();
        if s.len() > self.len || &self.b[self.len - s.len()..self.len] != s {
            return false;
        }
        self.stem_len = self.len - s.len();
        true
    }

    fn set_to(&mut self, s: &str) {
        self.b.truncate(self.stem_len);
        self.b.extend_from_slice(s.as_bytes());
        self.len = self.b.len();
    }

    fn replace_if_measure(&mut self, s: &str) {
        if self.m() > 0 {
            self.set_to(s);
        }
    }

    fn last(&self) -> u8 {
        self.b[self.len - 1]
    }

    fn step1ab(&mut self) {
        if self.last() == b's' {
            if self.ends("sses") {
                self.len -= 2;
            } else if self.ends("ies") {
                self.set_to("i");
            } else if self.len >= 2 && self.b[self.len - 2] != b's' {
                self.len -= 1;
            }
        }
        if self.ends("eed") {
            if self.m() > 0 {
                self.len -= 1;
            }
        } else if (self.ends("ed") || self.ends("ing")) && self.vowel_in_stem() {
            self.len = self.stem_len;
            self.b.truncate(self.len);
            if self.ends("at") {
                self.set_to("ate");
            } else if self.ends("bl") {
                self.set_to("ble");
            } else if self.ends("iz") {
                self.set_to("ize");
            } else if self.len >= 1 && self.doublec(self.len - 1) {
                if !matches!(self.last(), b'l' | b's' | b'z') {
                    self.len -= 1;
                }
            } else {
                self.stem_len = self.len;
                if self.m() == 1 && self.len >= 1 && self.cvc(self.len - 1) {
                    self.set_to("e");
                }
            }
        }
        self.b.truncate(self.len);
    }

    fn step1c(&mut self) {
        if self.ends("y") && self.vowel_in_stem() {
            self.b[self.len - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        if self.len < 2 {
            return;
        }
        match self.b[self.len - 2] {
            b'a' => {
                if self.ends("ational") {
                    self.replace_if_measure("ate");
                } else if self.ends("tional") {
                    self.replace_if_measure("tion");
                }
            }
            b'c' => {
                if self.ends("enci") {
                    self.replace_if_measure("ence");
                } else if self.ends("anci") {
                    self.replace_if_measure("ance");
                }
            }
            b'e' => {
                if self.ends("izer") {
                    self.replace_if_measure("ize");
                }
            }
            b'l' => {
                if self.ends("bli") {
                    self.replace_if_measure("ble");
                } else if self.ends("alli") {
                    self.replace_if_measure("al");
                } else if self.ends("entli") {
                    self.replace_if_measure("ent");
                } else if self.ends("eli") {
                    self.replace_if_measure("e");
                } else if self.ends("ousli") {
                    self.replace_if_measure("ous");
                }
            }
            b'o' => {
                if self.ends("ization") {
                    self.replace_if_measure("ize");
                } else if self.ends("ation") {
                    self.replace_if_measure("ate");
                } else if self.ends("ator") {
                    self.replace_if_measure("ate");
                }
            }
            b's' => {
                if self.ends("alism") {
                    self.replace_if_measure("al");
                } else if self.ends("iveness") {
                    self.replace_if_measure("ive");
                } else if self.ends("fulness") {
                    self.replace_if_measure("ful");
                } else if self.ends("ousness") {
                    self.replace_if_measure("ous");
                }
            }
            b't' => {
                if self.ends("aliti") {
                    self.replace_if_measure("al");
                } else if self.ends("iviti") {
                    self.replace_if_measure("ive");
                } else if self.ends("biliti") {
                    self.replace_if_measure("ble");
                }
            }
            b'g' => {
                if self.ends("logi") {
                    self.replace_if_measure("log");
                }
            }
            _ => {}
        }
    }

    fn step3(&mut self) {
        match self.last() {
            b'e' => {
                if self.ends("icate") {
                    self.replace_if_measure("ic");
                } else if self.ends("ative") {
                    self.replace_if_measure("");
                } else if self.ends("alize") {
                    self.replace_if_measure("al");
                }
            }
            b'i' => {
                if self.ends("iciti") {
                    self.replace_if_measure("ic");
                }
            }
            b'l' => {
                if self.ends("ical") {
                    self.replace_if_measure("ic");
                } else if self.ends("ful") {
                    self.replace_if_measure("");
                }
            }
            b's' => {
                if self.ends("ness") {
                    self.replace_if_measure("");
                }
            }
            _ => {}
        }
    }

    fn step4(&mut self) {
        if self.len < 2 {
            return;
        }
        let matched = match self.b[self.len - 2] {
            b'a' => self.ends("al"),
            b'c' => self.ends("ance") || self.ends("ence"),
            b'e' => self.ends("er"),
            b'i' => self.ends("ic"),
            b'l' => self.ends("able") || self.ends("ible"),
            b'n' => self.ends("ant") || self.ends("ement") || self.ends("ment") || self.ends("ent"),
            b'o' => {
                (self.ends("ion")
                    && self.stem_len >= 1
                    && matches!(self.b[self.stem_len - 1], b's' | b't'))
                    || self.ends("ou")
            }
            b's' => self.ends("ism"),
            b't' => self.ends("ate") || self.ends("iti"),
            b'u' => self.ends("ous"),
            b'v' => self.ends("ive"),
            b'z' => self.ends("ize"),
            _ => false,
        };
        if matched && self.m() > 1 {
            self.len = self.stem_len;
            self.b.truncate(self.len);
        }
    }

    fn step5(&mut self) {
        self.stem_len = self.len;
        if self.last() == b'e' {
            let a = self.m();
            if a > 1 || (a == 1 && !self.cvc(self.len - 2)) {
                self.len -= 1;
            }
        }
        self.b.truncate(self.len);
        if self.last() == b'l' && self.doublec(self.len - 1) && self.m() > 1 {
            self.len -= 1;
        }
        self.b.truncate(self.len);
    }
}

/// Stems one lowercase word. Words shorter than three characters and words
/// containing anything outside ASCII letters are returned unchanged.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut s = Stemmer::new(word);
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    s.b.truncate(s.len);
    String::from_utf8(s.b).expect("ascii stays ascii")
}
