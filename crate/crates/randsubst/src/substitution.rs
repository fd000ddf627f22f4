//! Random substitutions, their plain-text format, and the substitution matrix.
//!
//! A random substitution maps each letter to a finite, non-empty set of
//! words. The only semantic requirement imposed here is *semi-compatibility*:
//! all words in one image share the same letter counts, so the substitution
//! matrix is well defined column by column. Primitivity is a property of
//! that matrix and is checked via explicit powers capped at the Wielandt
//! bound (n-1)^2 + 1.

use crate::error::{Error, Result};
use crate::words::{abelianise, Alphabet, Word, WordSet};

/// A primitive random substitution candidate: alphabet plus one image set per letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSubstitution {
    alphabet: Alphabet,
    images: Vec<WordSet>,
}

/// One semi-compatibility violation, rendered with display glyphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub letter: char,
    pub first: String,
    pub second: String,
    pub reason: String,
}

/// Outcome of `validate`: `ok` holds exactly when `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl RandomSubstitution {
    /// Build from parts, enforcing the structural rules (one non-empty image
    /// per letter, no empty words, letter indices in range). Semi-compatibility
    /// is *not* enforced here — that is `validate`'s job, so that callers can
    /// inspect a violating input instead of merely failing to construct it.
    pub fn new(alphabet: Alphabet, images: Vec<WordSet>) -> Result<RandomSubstitution> {
        if images.len() != alphabet.size() {
            return Err(Error::Invalid(format!(
                "{} images for an alphabet of {} letters",
                images.len(),
                alphabet.size()
            )));
        }
        for (i, set) in images.iter().enumerate() {
            let glyph = alphabet.glyph(i as u8);
            if set.is_empty() {
                return Err(Error::Invalid(format!("empty image for letter '{glyph}'")));
            }
            for w in set.iter() {
                if w.is_empty() {
                    return Err(Error::Invalid(format!(
                        "image of letter '{glyph}' contains the empty word"
                    )));
                }
                if let Some(&ix) = w.letters().iter().find(|&&ix| ix as usize >= alphabet.size()) {
                    return Err(Error::Invalid(format!(
                        "image of letter '{glyph}' uses letter index {ix}, out of range"
                    )));
                }
            }
        }
        Ok(RandomSubstitution { alphabet, images })
    }

    /// Parse the plain-text rule format:
    ///
    /// ```text
    /// # lines starting anywhere with '#' are comments
    /// alphabet = a b
    /// a -> ab | ba
    /// b -> a
    /// ```
    ///
    /// The alphabet line comes first; every letter then needs exactly one
    /// rule line. Image words are glyph strings separated by `|`.
    pub fn parse(text: &str) -> Result<RandomSubstitution> {
        let mut alphabet: Option<Alphabet> = None;
        let mut images: Vec<Option<Vec<Word>>> = Vec::new();

        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }

            let Some(alpha) = alphabet.as_ref() else {
                let rest = content.strip_prefix("alphabet").ok_or_else(|| Error::Parse {
                    line,
                    message: "expected 'alphabet = <glyphs>' before any rule".into(),
                })?;
                let rest = rest.trim_start().strip_prefix('=').ok_or_else(|| Error::Parse {
                    line,
                    message: "expected '=' after 'alphabet'".into(),
                })?;
                let mut glyphs = Vec::new();
                for token in rest.split_whitespace() {
                    let mut chars = token.chars();
                    let (Some(g), None) = (chars.next(), chars.next()) else {
                        return Err(Error::Parse {
                            line,
                            message: format!("alphabet glyphs are single characters, got '{token}'"),
                        });
                    };
                    glyphs.push(g);
                }
                let alpha = Alphabet::new(glyphs).map_err(|e| Error::Parse {
                    line,
                    message: e.to_string(),
                })?;
                images = vec![None; alpha.size()];
                alphabet = Some(alpha);
                continue;
            };

            let (head, tail) = content.split_once("->").ok_or_else(|| Error::Parse {
                line,
                message: "expected a rule of the form '<letter> -> <word> | <word>'".into(),
            })?;
            let head = head.trim();
            let mut head_chars = head.chars();
            let (Some(glyph), None) = (head_chars.next(), head_chars.next()) else {
                return Err(Error::Parse {
                    line,
                    message: format!("rule head must be a single letter, got '{head}'"),
                });
            };
            let Some(ix) = alpha.index_of(glyph) else {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown letter '{glyph}' in rule head"),
                });
            };
            if images[ix as usize].is_some() {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate rule for letter '{glyph}'"),
                });
            }

            let mut words = Vec::new();
            for piece in tail.split('|') {
                let piece = piece.trim();
                if piece.is_empty() {
                    return Err(Error::Parse {
                        line,
                        message: format!("empty image word for letter '{glyph}'"),
                    });
                }
                if piece.chars().any(char::is_whitespace) {
                    return Err(Error::Parse {
                        line,
                        message: format!("image word '{piece}' contains whitespace"),
                    });
                }
                let word = alpha.parse_word(piece).map_err(|_| Error::Parse {
                    line,
                    message: format!("unknown letter in image word '{piece}'"),
                })?;
                words.push(word);
            }
            images[ix as usize] = Some(words);
        }

        let alphabet = alphabet.ok_or_else(|| Error::Parse {
            line: 1,
            message: "file declares no alphabet".into(),
        })?;
        let mut sets = Vec::with_capacity(alphabet.size());
        for (i, slot) in images.into_iter().enumerate() {
            match slot {
                // Duplicate image words collapse silently inside WordSet.
                Some(words) => sets.push(WordSet::from_words(words)),
                None => {
                    return Err(Error::MissingRule {
                        glyph: alphabet.glyph(i as u8),
                    })
                }
            }
        }
        RandomSubstitution::new(alphabet, sets)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn image(&self, letter: u8) -> &WordSet {
        &self.images[letter as usize]
    }

    pub fn images(&self) -> &[WordSet] {
        &self.images
    }

    /// Check semi-compatibility letter by letter. Witness pairs are reported
    /// against the first word of the offending image.
    pub fn validate(&self) -> ValidationReport {
        let n = self.alphabet.size();
        let mut violations = Vec::new();
        for (i, set) in self.images.iter().enumerate() {
            let glyph = self.alphabet.glyph(i as u8);
            let mut words = set.iter();
            let Some(first) = words.next() else { continue };
            let reference = abelianise(first, n);
            for w in words {
                let counts = abelianise(w, n);
                if counts != reference {
                    violations.push(Violation {
                        letter: glyph,
                        first: self.alphabet.format_word(first),
                        second: self.alphabet.format_word(w),
                        reason: format!(
                            "letter counts {:?} vs {:?}",
                            reference.entries(),
                            counts.entries()
                        ),
                    });
                }
            }
        }
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().ok
    }

    /// Like `validate`, but as a `Result` whose error carries the first
    /// witness pair — the form the analysis pipeline and the CLI want.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Invalid(format!(
                "letter '{}' is not semi-compatible: {} vs {} ({})",
                v.letter, v.first, v.second, v.reason
            ))),
        }
    }

    /// The substitution matrix: column j holds the letter counts shared by
    /// every word in the image of letter j. Requires a valid substitution.
    pub fn matrix(&self) -> Result<SubstitutionMatrix> {
        self.ensure_valid()?;
        let n = self.alphabet.size();
        let mut entries = vec![0u64; n * n];
        for (j, set) in self.images.iter().enumerate() {
            let column = abelianise(&set.words()[0], n);
            for (i, &count) in column.entries().iter().enumerate() {
                entries[i * n + j] = count;
            }
        }
        Ok(SubstitutionMatrix { n, entries })
    }

    /// The shared image length when *all* letters inflate to the same length.
    pub fn constant_length(&self) -> Option<usize> {
        let mut lengths = self.images.iter().map(WordSet::common_length);
        let first = lengths.next()??;
        lengths.all(|l| l == Some(first)).then_some(first)
    }

    /// Render the rules in the same shape the parser accepts.
    pub fn render_rules(&self) -> String {
        let mut out = String::from("alphabet =");
        for &g in self.alphabet.glyphs() {
            out.push(' ');
            out.push(g);
        }
        out.push('\n');
        for (i, set) in self.images.iter().enumerate() {
            let words: Vec<String> = set.iter().map(|w| self.alphabet.format_word(w)).collect();
            out.push_str(&format!(
                "{} -> {}\n",
                self.alphabet.glyph(i as u8),
                words.join(" | ")
            ));
        }
        out
    }
}

/// Non-negative integer matrix `M[i][j] = |u|_i for u in image(j)`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    n: usize,
    entries: Vec<u64>,
}

impl SubstitutionMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<SubstitutionMatrix> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix must be square and non-empty".into()));
        }
        Ok(SubstitutionMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.n).map(|i| self.entry(i, j)).collect()
    }

    /// Column sums, i.e. the common image length of each letter.
    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.entry(i, j)).sum())
            .collect()
    }

    fn saturating_mul(&self, other: &SubstitutionMatrix) -> SubstitutionMatrix {
        let n = self.n;
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let prod = a.saturating_mul(other.entry(k, j));
                    let cell = &mut entries[i * n + j];
                    *cell = cell.saturating_add(prod);
                }
            }
        }
        SubstitutionMatrix { n, entries }
    }

    fn is_positive(&self) -> bool {
        self.entries.iter().all(|&e| e > 0)
    }

    /// Smallest k with M^k strictly positive, if one exists at or below the
    /// Wielandt bound (n-1)^2 + 1. Saturating arithmetic keeps the powers
    /// honest about positivity even when the entries themselves overflow.
    pub fn primitivity_exponent(&self) -> Option<u32> {
        let bound = (self.n as u32 - 1).pow(2) + 1;
        let mut power = self.clone();
        for k in 1..=bound {
            if power.is_positive() {
                return Some(k);
            }
            if k < bound {
                power = power.saturating_mul(self);
            }
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_exponent().is_some()
    }
}
