//! Porter (1980) stemming algorithm.
//!
//! Follows the canonical reference implementation, including its two
//! documented departures from the original 1980 algorithm description:
//! words of length <= 2 are returned unchanged, and step 2 maps
//! `logi` -> `log`.

/// Stems a lowercase word.
pub fn porter_stem(word: &str) -> String {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() <= 2 {
        return word.to_string();
    }
    let mut s = Stemmer {
        w: chars,
        end: word.chars().count() - 1,
        j: 0,
    };
    s.step1ab();
    if s.end > 0 {
        s.step1c();
        s.step2();
        s.step3();
        s.step4();
        s.step5();
    }
    s.w[..=s.end].iter().collect()
}

struct Stemmer {
    /// Working buffer; only `w[0..=end]` is live.
    w: Vec<char>,
    end: usize,
    /// End of the candidate stem after a successful `ends` match; -1 when
    /// the matched suffix was the whole word, as in the reference code.
    j: isize,
}

impl Stemmer {
    fn is_cons(&self, i: usize) -> bool {
        match self.w[i] {
            'a' | 'e' | 'i' | 'o' | 'u' => false,
            'y' => i == 0 || !self.is_cons(i - 1),
            _ => true,
        }
    }

    /// Number of vowel-consonant sequences in `w[0..=j]`.
    fn measure(&self) -> usize {
        if self.j < 0 {
            return 0;
        }
        let j = self.j as usize;
        let mut n = 0;
        let mut i = 0;
        loop {
            if i > j {
                return n;
            }
            if !self.is_cons(i) {
                break;
            }
            i += 1;
        }
        i += 1;
        loop {
            loop {
                if i > j {
                    return n;
                }
                if self.is_cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
            n += 1;
            loop {
                if i > j {
                    return n;
                }
                if !self.is_cons(i) {
                    break;
                }
                i += 1;
            }
            i += 1;
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.is_cons(i as usize))
    }

    fn double_cons(&self, i: usize) -> bool {
        i >= 1 && self.w[i] == self.w[i - 1] && self.is_cons(i)
    }

    /// consonant-vowel-consonant ending at `i`, where the final consonant
    /// is not w, x or y.
    fn cvc(&self, i: usize) -> bool {
        if i < 2 || !self.is_cons(i) || self.is_cons(i - 1) || !self.is_cons(i - 2) {
            return false;
        }
        !matches!(self.w[i], 'w' | 'x' | 'y')
    }

    fn ends(&mut self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        if n > self.end + 1 {
            return false;
        }
        let start = self.end + 1 - n;
        if self.w[start..=self.end].iter().copied().eq(suffix.chars()) {
            self.j = self.end as isize - n as isize;
            true
        } else {
            false
        }
    }

    fn set_to(&mut self, s: &str) {
        self.w.truncate((self.j + 1) as usize);
        self.w.extend(s.chars());
        self.end = (self.j + s.chars().count() as isize) as usize;
    }

    fn replace(&mut self, s: &str) {
        if self.measure() > 0 {
            self.set_to(s);
        }
    }

    /// Plural removal and -ed/-ing stripping.
    fn step1ab(&mut self) {
        if self.w[self.end] == 's' {
            if self.ends("sses") {
                self.end -= 2;
            } else if self.ends("ies") {
                self.set_to("i");
            } else if self.w[self.end - 1] != 's' {
                self.end -= 1;
            }
        }
        if self.ends("eed") {
            if self.measure() > 0 {
                self.end -= 1;
            }
        } else if (self.ends("ed") || self.ends("ing")) && self.vowel_in_stem() {
            self.end = self.j as usize;
            if self.ends("at") {
                self.set_to("ate");
            } else if self.ends("bl") {
                self.set_to("ble");
            } else if self.ends("iz") {
                self.set_to("ize");
            } else if self.double_cons(self.end) {
                self.end -= 1;
                if matches!(self.w[self.end], 'l' | 's' | 'z') {
                    self.end += 1;
                }
            } else if self.measure() == 1 && self.cvc(self.end) {
                self.set_to("e");
            }
        }
    }

    /// Terminal y -> i when there is another vowel in the stem.
    fn step1c(&mut self) {
        if self.ends("y") && self.vowel_in_stem() {
            self.w[self.end] = 'i';
        }
    }

    fn step2(&mut self) {
        let rules: &[(&str, &str)] = match self.w[self.end - 1] {
            'a' => &[("ational", "ate"), ("tional", "tion")],
            'c' => &[("enci", "ence"), ("anci", "ance")],
            'e' => &[("izer", "ize")],
            'l' => &[
                ("bli", "ble"),
                ("alli", "al"),
                ("entli", "ent"),
                ("eli", "e"),
                ("ousli", "ous"),
            ],
            'o' => &[("ization", "ize"), ("ation", "ate"), ("ator", "ate")],
            's' => &[
                ("alism", "al"),
                ("iveness", "ive"),
                ("fulness", "ful"),
                ("ousness", "ous"),
            ],
            't' => &[("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")],
            'g' => &[("logi", "log")],
            _ => return,
        };
        for (suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace(replacement);
                return;
            }
        }
    }

    fn step3(&mut self) {
        let rules: &[(&str, &str)] = match self.w[self.end] {
            'e' => &[("icate", "ic"), ("ative", ""), ("alize", "al")],
            'i' => &[("iciti", "ic")],
            'l' => &[("ical", "ic"), ("ful", "")],
            's' => &[("ness", "")],
            _ => return,
        };
        for (suffix, replacement) in rules {
            if self.ends(suffix) {
                self.replace(replacement);
                return;
            }
        }
    }

    /// Drops residual suffixes when the measure of what remains exceeds 1.
    fn step4(&mut self) {
        let matched = match self.w[self.end - 1] {
            'a' => self.ends("al"),
            'c' => self.ends("ance") || self.ends("ence"),
            'e' => self.ends("er"),
            'i' => self.ends("ic"),
            'l' => self.ends("able") || self.ends("ible"),
            'n' => {
                self.ends("ant") || self.ends("ement") || self.ends("ment") || self.ends("ent")
            }
            'o' => {
                (self.ends("ion")
                    && self.j >= 0
                    && matches!(self.w[self.j as usize], 's' | 't'))
                    || self.ends("ou")
            }
            's' => self.ends("ism"),
            't' => self.ends("ate") || self.ends("iti"),
            'u' => self.ends("ous"),
            'v' => self.ends("ive"),
            'z' => self.ends("ize"),
            _ => false,
        };
        if matched && self.measure() > 1 {
            self.end = self.j as usize;
        }
    }

    /// Removes a final -e and reduces -ll under measure conditions.
    fn step5(&mut self) {
        self.j = self.end as isize;
        if self.w[self.end] == 'e' {
            let m = self.measure();
            if m > 1 || (m == 1 && !self.cvc(self.end - 1)) {
                self.end -= 1;
            }
        }
        if self.w[self.end] == 'l' && self.double_cons(self.end) && self.measure() > 1 {
            self.end -= 1;
        }
    }
}
