//! Level-m inflation word sets, their cardinalities, and the two exactness
//! conditions (identical images / disjoint images) that collapse the entropy
//! bounds to closed forms.
//!
//! Enumeration is strictly level-by-level: level m+1 is built by inflating
//! the stored level-m sets once, never by re-deriving from the letters. All
//! set construction funnels through `WordSet::from_words`, so output order
//! is canonical and runs are reproducible. A letter budget (default 1e7
//! stored letters per level) guards against exponential blow-up; projected
//! sizes are computed *before* any allocation happens.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::substitution::RandomSubstitution;
use crate::words::{Word, WordSet};

/// Default cap on the total letters stored across one level's word sets.
pub const DEFAULT_LETTER_CAP: usize = 10_000_000;

/// The per-letter inflation word sets at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSets {
    pub level: u32,
    sets: Vec<WordSet>,
}

impl LevelSets {
    pub fn set(&self, letter: u8) -> &WordSet {
        &self.sets[letter as usize]
    }

    pub fn sets(&self) -> &[WordSet] {
        &self.sets
    }

    pub fn total_letters(&self) -> usize {
        self.sets.iter().map(WordSet::total_letters).sum()
    }

    pub fn counts(&self) -> CardinalityVector {
        CardinalityVector {
            level: self.level,
            counts: self.sets.iter().map(|s| BigUint::from(s.len())).collect(),
        }
    }
}

/// Exact per-letter cardinalities `#image^m(letter)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityVector {
    pub level: u32,
    pub counts: Vec<BigUint>,
}

impl CardinalityVector {
    pub fn q_vector(&self) -> QVector {
        QVector {
            level: self.level,
            entries: self.counts.iter().map(ln_biguint).collect(),
        }
    }
}

/// Natural logs of the cardinalities.
#[derive(Debug, Clone, PartialEq)]
pub struct QVector {
    pub level: u32,
    pub entries: Vec<f64>,
}

impl QVector {
    /// Weighted sum against a real vector (usually the right eigenvector).
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.entries.iter().zip(weights).map(|(q, w)| q * w).sum()
    }
}

/// Natural log of a big natural number via its top 53 bits; exact as a
/// double for anything that fits one, and ~1 ulp otherwise.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap_or(0.0).max(1.0).ln().max(0.0);
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn projected_letters(th: &RandomSubstitution, set: &WordSet) -> u128 {
    // Every word of an image shares its length, so the projection is exact
    // pre-deduplication: count choices per position, multiply, weigh by the
    // inflated length.
    let image_counts: Vec<u128> = th.images().iter().map(|s| s.len() as u128).collect();
    let image_lengths: Vec<u128> = th
        .images()
        .iter()
        .map(|s| s.common_length().unwrap_or(0) as u128)
        .collect();
    let mut total: u128 = 0;
    for u in set.iter() {
        let mut count: u128 = 1;
        let mut length: u128 = 0;
        for &ix in u.letters() {
            count = count.saturating_mul(image_counts[ix as usize]);
            length = length.saturating_add(image_lengths[ix as usize]);
        }
        total = total.saturating_add(count.saturating_mul(length));
    }
    total
}

fn inflate_word_unchecked(th: &RandomSubstitution, u: &Word, out: &mut Vec<Word>) {
    // Odometer over one image choice per position.
    let positions: Vec<&WordSet> = u.letters().iter().map(|&ix| th.image(ix)).collect();
    let mut choice = vec![0usize; positions.len()];
    loop {
        let mut letters = Vec::new();
        for (set, &c) in positions.iter().zip(&choice) {
            letters.extend_from_slice(set.words()[c].letters());
        }
        out.push(Word::from_indices(letters));

        let mut pos = positions.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < positions[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Inflate every word of `set` once and take the union.
pub fn inflate_set(th: &RandomSubstitution, set: &WordSet, letter_cap: usize) -> Result<WordSet> {
    th.ensure_valid()?;
    let projected = projected_letters(th, set);
    if projected > letter_cap as u128 {
        return Err(Error::Capacity {
            projected,
            cap: letter_cap,
        });
    }
    let mut out = Vec::new();
    for u in set.iter() {
        inflate_word_unchecked(th, u, &mut out);
    }
    Ok(WordSet::from_words(out))
}

/// The set of inflations of a single word, `image^1(u)`.
pub fn inflate_word(th: &RandomSubstitution, u: &Word, letter_cap: usize) -> Result<WordSet> {
    inflate_set(th, &WordSet::singleton(u.clone()), letter_cap)
}

/// Stateful level-by-level enumerator. Each call to `advance` inflates the
/// stored level once; capacity errors name the last completed level.
pub struct LevelEnumerator<'a> {
    th: &'a RandomSubstitution,
    letter_cap: usize,
    current: Option<LevelSets>,
}

impl<'a> LevelEnumerator<'a> {
    pub fn new(th: &'a RandomSubstitution, letter_cap: usize) -> Result<LevelEnumerator<'a>> {
        th.ensure_valid()?;
        Ok(LevelEnumerator {
            th,
            letter_cap,
            current: None,
        })
    }

    pub fn current(&self) -> Option<&LevelSets> {
        self.current.as_ref()
    }

    pub fn advance(&mut self) -> Result<&LevelSets> {
        match self.current.take() {
            None => {
                let sets: Vec<WordSet> = self.th.images().to_vec();
                let total: usize = sets.iter().map(WordSet::total_letters).sum();
                if total > self.letter_cap {
                    return Err(Error::LevelCapacity {
                        level: 1,
                        completed: 0,
                        projected: total as u128,
                        cap: self.letter_cap,
                    });
                }
                self.current = Some(LevelSets { level: 1, sets });
            }
            Some(prev) => {
                let next_level = prev.level + 1;
                let projected: u128 = prev
                    .sets
                    .iter()
                    .map(|s| projected_letters(self.th, s))
                    .fold(0u128, u128::saturating_add);
                if projected > self.letter_cap as u128 {
                    self.current = Some(prev); // keep the completed level usable
                    return Err(Error::LevelCapacity {
                        level: next_level,
                        completed: next_level - 1,
                        projected,
                        cap: self.letter_cap,
                    });
                }
                let mut sets = Vec::with_capacity(prev.sets.len());
                for s in &prev.sets {
                    sets.push(inflate_set(self.th, s, self.letter_cap)?);
                }
                self.current = Some(LevelSets {
                    level: next_level,
                    sets,
                });
            }
        }
        Ok(self.current.as_ref().unwrap())
    }

    /// Advance until `level` is the stored level and return it.
    pub fn at_level(&mut self, level: u32) -> Result<&LevelSets> {
        if level == 0 {
            return Err(Error::LevelZero);
        }
        while self.current.as_ref().map_or(0, |c| c.level) < level {
            self.advance()?;
        }
        let current = self.current.as_ref().unwrap();
        debug_assert_eq!(current.level, level, "enumerator only moves forward");
        Ok(current)
    }
}

/// The per-letter word sets at `level`.
pub fn level_sets(th: &RandomSubstitution, level: u32, letter_cap: usize) -> Result<LevelSets> {
    let mut walker = LevelEnumerator::new(th, letter_cap)?;
    Ok(walker.at_level(level)?.clone())
}

/// Exact cardinalities and their logs at `level`, by enumeration.
pub fn q_vector(
    th: &RandomSubstitution,
    level: u32,
    letter_cap: usize,
) -> Result<(CardinalityVector, QVector)> {
    let mut walker = LevelEnumerator::new(th, letter_cap)?;
    let sets = walker.at_level(level)?;
    let counts = sets.counts();
    let q = counts.q_vector();
    Ok((counts, q))
}

/// Iterate the substitution on itself: the images of `power(th, k)` are the
/// level-k sets of `th`.
pub fn power_substitution(
    th: &RandomSubstitution,
    k: u32,
    letter_cap: usize,
) -> Result<RandomSubstitution> {
    let sets = level_sets(th, k, letter_cap)?;
    RandomSubstitution::new(th.alphabet().clone(), sets.sets().to_vec())
}

// ---------------------------------------------------------------------------
// Exactness conditions
// ---------------------------------------------------------------------------

/// Which condition a report speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    Identical,
    Disjoint,
}

/// The sufficient criterion that fired for a `Guaranteed` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuaranteeKind {
    /// Every image is a single word, so the condition holds vacuously.
    SingletonImages,
    /// All letters share one image set.
    EqualImages,
    /// Constant length with pairwise disjoint letter images.
    ConstantLength,
    /// No image word is a prefix of another image word, across all letters.
    NoPrefix,
    /// No image word is a suffix of another image word, across all letters.
    NoSuffix,
}

impl GuaranteeKind {
    pub fn label(&self) -> &'static str {
        match self {
            GuaranteeKind::SingletonImages => "singleton-images",
            GuaranteeKind::EqualImages => "equal-images",
            GuaranteeKind::ConstantLength => "constant-length",
            GuaranteeKind::NoPrefix => "no-prefix",
            GuaranteeKind::NoSuffix => "no-suffix",
        }
    }
}

/// A concrete counterexample found by bounded enumeration; words are rendered
/// with the substitution's glyphs so the witness can be replayed by hand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefutationWitness {
    pub letter: char,
    pub level: u32,
    pub pair: (String, String),
    /// For disjointness refutations: a word in both inflation sets.
    pub common: Option<String>,
}

/// Three-valued outcome of a condition check. `Unverified` is an honest
/// "searched this far, found nothing" — the conditions quantify over all
/// levels, so bounded enumeration can refute but never affirm them.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Guaranteed(GuaranteeKind),
    Refuted(RefutationWitness),
    Unverified {
        max_level_checked: u32,
        note: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    pub verdict: Verdict,
}

impl ConditionReport {
    pub fn is_guaranteed(&self) -> bool {
        matches!(self.verdict, Verdict::Guaranteed(_))
    }
}

/// Letter-indexed pairs of distinct image words, the raw material for both
/// refutation searches.
fn image_pairs(th: &RandomSubstitution) -> Vec<(char, Word, Word)> {
    let mut pairs = Vec::new();
    for (i, set) in th.images().iter().enumerate() {
        let glyph = th.alphabet().glyph(i as u8);
        let words = set.words();
        for x in 0..words.len() {
            for y in x + 1..words.len() {
                pairs.push((glyph, words[x].clone(), words[y].clone()));
            }
        }
    }
    pairs
}

/// Run the per-pair level-by-level search, applying `test` to the two
/// inflation sets at each level. Capacity exhaustion downgrades to
/// `Unverified` at the deepest level actually completed.
fn refutation_search(
    th: &RandomSubstitution,
    m_max: u32,
    letter_cap: usize,
    test: impl Fn(&WordSet, &WordSet) -> Option<Option<Word>>,
) -> Result<Verdict> {
    let mut states: Vec<(char, Word, Word, WordSet, WordSet)> = image_pairs(th)
        .into_iter()
        .map(|(g, u, v)| {
            let su = WordSet::singleton(u.clone());
            let sv = WordSet::singleton(v.clone());
            (g, u, v, su, sv)
        })
        .collect();

    for m in 1..=m_max {
        for (glyph, u, v, set_u, set_v) in states.iter_mut() {
            let next_u = match inflate_set(th, set_u, letter_cap) {
                Ok(s) => s,
                Err(Error::Capacity { projected, cap }) => {
                    return Ok(Verdict::Unverified {
                        max_level_checked: m - 1,
                        note: Some(format!(
                            "level {m} pair sets need about {projected} letters, over the cap of {cap}"
                        )),
                    });
                }
                Err(e) => return Err(e),
            };
            let next_v = match inflate_set(th, set_v, letter_cap) {
                Ok(s) => s,
                Err(Error::Capacity { projected, cap }) => {
                    return Ok(Verdict::Unverified {
                        max_level_checked: m - 1,
                        note: Some(format!(
                            "level {m} pair sets need about {projected} letters, over the cap of {cap}"
                        )),
                    });
                }
                Err(e) => return Err(e),
            };
            *set_u = next_u;
            *set_v = next_v;
            if let Some(common) = test(set_u, set_v) {
                let alphabet = th.alphabet();
                return Ok(Verdict::Refuted(RefutationWitness {
                    letter: *glyph,
                    level: m,
                    pair: (alphabet.format_word(u), alphabet.format_word(v)),
                    common: common.map(|w| alphabet.format_word(&w)),
                }));
            }
        }
    }
    Ok(Verdict::Unverified {
        max_level_checked: m_max,
        note: None,
    })
}

/// Check the identical-images condition: every pair of words in one image
/// must inflate to the same set at every level.
pub fn check_identical(
    th: &RandomSubstitution,
    m_max: u32,
    letter_cap: usize,
) -> Result<ConditionReport> {
    th.ensure_valid()?;

    let verdict = if th.images().iter().all(|s| s.len() == 1) {
        Verdict::Guaranteed(GuaranteeKind::SingletonImages)
    } else if th.images().windows(2).all(|w| w[0] == w[1]) {
        Verdict::Guaranteed(GuaranteeKind::EqualImages)
    } else {
        refutation_search(th, m_max, letter_cap, |su, sv| {
            (su != sv).then_some(None)
        })?
    };
    Ok(ConditionReport {
        condition: ConditionKind::Identical,
        verdict,
    })
}

/// Check the disjoint-images condition: distinct words in one image must
/// inflate to disjoint sets at every level.
pub fn check_disjoint(
    th: &RandomSubstitution,
    m_max: u32,
    letter_cap: usize,
) -> Result<ConditionReport> {
    th.ensure_valid()?;

    // Constant length with pairwise disjoint letter images settles it.
    let constant_disjoint = th.constant_length().is_some() && {
        let images = th.images();
        (0..images.len()).all(|i| {
            (i + 1..images.len()).all(|j| images[i].intersection(&images[j]).is_empty())
        })
    };
    if constant_disjoint {
        return Ok(ConditionReport {
            condition: ConditionKind::Disjoint,
            verdict: Verdict::Guaranteed(GuaranteeKind::ConstantLength),
        });
    }

    // Prefix/suffix test over all (letter, word) occurrences. Image sets are
    // deduplicated, so distinct occurrences are distinct pairs; a word that
    // appears under two letters counts as a prefix (and suffix) of itself.
    let occurrences: Vec<&Word> = th.images().iter().flat_map(WordSet::iter).collect();
    let relation_free = |related: fn(&Word, &Word) -> bool| {
        occurrences.iter().enumerate().all(|(x, u)| {
            occurrences
                .iter()
                .enumerate()
                .all(|(y, v)| x == y || !related(u, v))
        })
    };
    if relation_free(Word::is_prefix_of) {
        return Ok(ConditionReport {
            condition: ConditionKind::Disjoint,
            verdict: Verdict::Guaranteed(GuaranteeKind::NoPrefix),
        });
    }
    if relation_free(Word::is_suffix_of) {
        return Ok(ConditionReport {
            condition: ConditionKind::Disjoint,
            verdict: Verdict::Guaranteed(GuaranteeKind::NoSuffix),
        });
    }

    let verdict = refutation_search(th, m_max, letter_cap, |su, sv| {
        let common = su.intersection(sv);
        common.words().first().cloned().map(Some)
    })?;
    Ok(ConditionReport {
        condition: ConditionKind::Disjoint,
        verdict,
    })
}
