//! Letters, words, and finite word sets over a fixed alphabet.
//!
//! Words are stored as compact letter-index sequences (`u8` per letter), so
//! an alphabet holds at most 256 letters — far beyond anything the entropy
//! machinery will meet in practice. Word sets keep their members sorted in
//! lexicographic index order and deduplicated; that single canonical layout
//! is what makes every enumeration in this crate deterministic.

use crate::error::{Error, Result};

/// A letter paired with the glyph it is displayed as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Letter {
    pub index: usize,
    pub glyph: char,
}

/// A finite word over letter indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn from_indices(indices: Vec<u8>) -> Self {
        Word(indices)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word(self.0.repeat(times))
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_suffix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[other.0.len() - self.0.len()..] == self.0[..]
    }

    /// The factor of length `len` starting at `start` (0-based).
    pub fn subword(&self, start: usize, len: usize) -> Word {
        Word(self.0[start..start + len].to_vec())
    }
}

/// Letter-count vector of a word: entry `i` counts occurrences of letter `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianVector(pub Vec<u64>);

impl AbelianVector {
    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn add(&self, other: &AbelianVector) -> AbelianVector {
        AbelianVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// Count each letter of `u` over an alphabet of `alphabet_size` letters.
pub fn abelianise(u: &Word, alphabet_size: usize) -> AbelianVector {
    let mut counts = vec![0u64; alphabet_size];
    for &ix in u.letters() {
        counts[ix as usize] += 1;
    }
    AbelianVector(counts)
}

/// All length-`len` factors of `u`, as a set. Errors when
/// `len` is zero or exceeds `|u|`.
pub fn subwords_of_length(u: &Word, len: usize) -> Result<WordSet> {
    if len == 0 || len > u.len() {
        return Err(Error::SubwordLength {
            requested: len,
            available: u.len(),
        });
    }
    let words = (0..=u.len() - len).map(|k| u.subword(k, len)).collect();
    Ok(WordSet::from_words(words))
}

/// A deduplicated word set in canonical (lexicographic) order.
///
/// `common_length` is populated exactly when every member has the same
/// length, which for images of a semi-compatible substitution is always.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSet {
    words: Vec<Word>,
    common_length: Option<usize>,
}

impl WordSet {
    pub fn empty() -> WordSet {
        WordSet {
            words: Vec::new(),
            common_length: None,
        }
    }

    pub fn singleton(w: Word) -> WordSet {
        let len = w.len();
        WordSet {
            words: vec![w],
            common_length: Some(len),
        }
    }

    /// Normalise an arbitrary collection: sort, deduplicate, detect a shared length.
    pub fn from_words(mut words: Vec<Word>) -> WordSet {
        words.sort_unstable();
        words.dedup();
        let common_length = match words.first() {
            None => None,
            Some(first) => {
                let len = first.len();
                words.iter().all(|w| w.len() == len).then_some(len)
            }
        };
        WordSet {
            words,
            common_length,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Word> {
        self.words.iter()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.binary_search(w).is_ok()
    }

    pub fn common_length(&self) -> Option<usize> {
        self.common_length
    }

    /// Total letters stored, the unit the memory cap is measured in.
    pub fn total_letters(&self) -> usize {
        self.words.iter().map(Word::len).sum()
    }

    /// Element-wise concatenation `{ uv : u in self, v in other }`.
    pub fn concat(&self, other: &WordSet) -> WordSet {
        let mut out = Vec::with_capacity(self.len() * other.len());
        for u in &self.words {
            for v in &other.words {
                out.push(u.concat(v));
            }
        }
        WordSet::from_words(out)
    }

    pub fn union(&self, other: &WordSet) -> WordSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.words);
        out.extend_from_slice(&other.words);
        WordSet::from_words(out)
    }

    /// Merge walk over the two sorted member lists.
    pub fn intersection(&self, other: &WordSet) -> WordSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.words.len() && j < other.words.len() {
            match self.words[i].cmp(&other.words[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.words[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        // Already sorted and unique; from_words just re-derives the length marker.
        WordSet::from_words(out)
    }

    pub fn is_subset_of(&self, other: &WordSet) -> bool {
        self.words.iter().all(|w| other.contains(w))
    }
}

/// An ordered alphabet of display glyphs; the letter index is the position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    glyphs: Vec<char>,
}

impl Alphabet {
    pub fn new(glyphs: Vec<char>) -> Result<Alphabet> {
        if glyphs.is_empty() {
            return Err(Error::Invalid("alphabet is empty".into()));
        }
        if glyphs.len() > 256 {
            return Err(Error::Invalid(format!(
                "alphabet has {} letters; at most 256 are supported",
                glyphs.len()
            )));
        }
        for (k, &g) in glyphs.iter().enumerate() {
            if !g.is_ascii_graphic() {
                return Err(Error::Invalid(format!(
                    "glyph {:?} is not printable ASCII",
                    g
                )));
            }
            if glyphs[..k].contains(&g) {
                return Err(Error::Invalid(format!("duplicate glyph '{}'", g)));
            }
        }
        Ok(Alphabet { glyphs })
    }

    pub fn size(&self) -> usize {
        self.glyphs.len()
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.glyphs
            .iter()
            .enumerate()
            .map(|(index, &glyph)| Letter { index, glyph })
            .collect()
    }

    pub fn glyph(&self, index: u8) -> char {
        self.glyphs[index as usize]
    }

    pub fn glyphs(&self) -> &[char] {
        &self.glyphs
    }

    pub fn index_of(&self, glyph: char) -> Option<u8> {
        self.glyphs.iter().position(|&g| g == glyph).map(|i| i as u8)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut indices = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match self.index_of(ch) {
                Some(ix) => indices.push(ix),
                None => return Err(Error::UnknownGlyph { glyph: ch }),
            }
        }
        Ok(Word::from_indices(indices))
    }

    pub fn format_word(&self, w: &Word) -> String {
        w.letters().iter().map(|&ix| self.glyph(ix)).collect()
    }
}
