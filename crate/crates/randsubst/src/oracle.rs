//! Brute-force language oracle: enumerate inflation words level by level and
//! collect their fixed-length subwords. Everything upstream (bounds, closed
//! forms, growth diagnostics) can be cross-checked against these sets on
//! desk-scale inputs — that is their whole purpose; they are far too slow to
//! compute entropy themselves.

use crate::error::{Error, Result};
use crate::inflation::LevelEnumerator;
use crate::spectral::{perron_data, DEFAULT_TOLERANCE};
use crate::substitution::RandomSubstitution;
use crate::words::{Word, WordSet};

/// Default deepest inflation level the oracle will enumerate.
pub const DEFAULT_ORACLE_LEVEL_CAP: u32 = 12;

/// All legal words of one length, with the metadata needed to judge how
/// trustworthy the enumeration is.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageSlice {
    pub length: usize,
    pub words: WordSet,
    /// Deepest inflation level that was enumerated.
    pub levels_used: u32,
    /// True when the set survived `window` informative levels unchanged.
    /// Membership in `words` is always sound; only exhaustiveness is
    /// heuristic, and this flag is the heuristic's verdict.
    pub converged: bool,
    pub window: u32,
}

/// Collect every length-`length` subword of level-m inflation words, m
/// increasing, until the set is stable for `window` consecutive informative
/// levels (levels whose longest word is shorter than `length` cannot
/// contribute and do not count) or until `m_cap`.
///
/// The window defaults to the primitivity exponent: whatever shows up at
/// level m occurs again inside every letter's level-(m + k₀) words, so k₀
/// quiet levels in a row are the natural "nothing new is coming" signal.
pub fn legal_words(
    th: &RandomSubstitution,
    length: usize,
    window: Option<u32>,
    m_cap: u32,
    letter_cap: usize,
) -> Result<LanguageSlice> {
    th.ensure_valid()?;
    if length == 0 {
        return Err(Error::Invalid("legal-word length must be at least 1".into()));
    }
    let matrix = th.matrix()?;
    let exponent = matrix.primitivity_exponent().ok_or(Error::NotPrimitive)?;
    let window = window.unwrap_or(exponent).max(1);

    let mut walker = LevelEnumerator::new(th, letter_cap)?;
    let mut words = WordSet::empty();
    let mut streak = 0u32;
    let mut levels_used = 0u32;
    let mut converged = false;

    while levels_used < m_cap {
        let sets = walker.advance()?;
        levels_used = sets.level;

        let mut informative = false;
        let mut fresh: Vec<Word> = Vec::new();
        for set in sets.sets() {
            for w in set.iter() {
                if w.len() < length {
                    continue;
                }
                informative = true;
                for start in 0..=(w.len() - length) {
                    fresh.push(w.subword(start, length));
                }
            }
        }
        if !informative {
            continue;
        }

        let merged = words.union(&WordSet::from_words(fresh));
        if merged.len() == words.len() {
            streak += 1;
        } else {
            streak = 0;
        }
        words = merged;
        if streak >= window {
            converged = true;
            break;
        }
    }

    Ok(LanguageSlice {
        length,
        words,
        levels_used,
        converged,
        window,
    })
}

/// One length's worth of complexity data.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub length: usize,
    pub count: usize,
    /// Finite-size entropy quotient (1/ℓ)·log #L_ℓ — diagnostic only, the
    /// finite quotients need not bracket the entropy.
    pub quotient: f64,
    /// Worst letter-frequency deviation from the right eigenvector over the
    /// slice: max over words of max_i |freq_i − R_i|.
    pub max_frequency_deviation: f64,
    pub converged: bool,
}

/// Per-length legal-word counts up to `max_length`, with the finite-size
/// quotient and a letter-frequency diagnostic.
pub fn complexity_profile(
    th: &RandomSubstitution,
    max_length: usize,
    m_cap: u32,
    letter_cap: usize,
) -> Result<Vec<ComplexityRow>> {
    th.ensure_valid()?;
    let perron = perron_data(&th.matrix()?, DEFAULT_TOLERANCE)?;
    let n = th.alphabet().size();
    let mut rows = Vec::with_capacity(max_length);
    for length in 1..=max_length {
        let slice = legal_words(th, length, None, m_cap, letter_cap)?;
        let mut deviation = 0f64;
        for w in slice.words.iter() {
            let mut counts = vec![0usize; n];
            for &ix in w.letters() {
                counts[ix as usize] += 1;
            }
            for (i, &c) in counts.iter().enumerate() {
                let diff = (c as f64 / length as f64 - perron.right[i]).abs();
                deviation = deviation.max(diff);
            }
        }
        rows.push(ComplexityRow {
            length,
            count: slice.words.len(),
            quotient: (slice.words.len() as f64).ln() / length as f64,
            max_frequency_deviation: deviation,
            converged: slice.converged,
        });
    }
    Ok(rows)
}

/// Outcome of the bounded periodicity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeriodicityVerdict {
    /// u^N was legal for every N up to the bound — a necessary condition
    /// for periodicity, never a proof.
    Consistent,
    /// u^n is missing from the enumerated language; `missing` is u^n itself.
    Refuted { n: u32, missing: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicityCertificate {
    pub word: String,
    pub n_checked: u32,
    pub verdict: PeriodicityVerdict,
    /// Whether every language slice consulted had converged. A refutation
    /// from an unconverged slice may merely mean the oracle did not dig
    /// deep enough.
    pub oracle_converged: bool,
}

/// Check the necessary condition u, u², …, u^n_max ∈ L by oracle lookup.
pub fn is_periodic_bounded(
    th: &RandomSubstitution,
    u: &Word,
    n_max: u32,
    m_cap: u32,
    letter_cap: usize,
) -> Result<PeriodicityCertificate> {
    th.ensure_valid()?;
    if u.is_empty() {
        return Err(Error::Invalid("periodicity seed must be non-empty".into()));
    }
    let rendered = th.alphabet().format_word(u);
    let mut oracle_converged = true;
    for n in 1..=n_max {
        let power = u.repeat(n as usize);
        let slice = legal_words(th, power.len(), None, m_cap, letter_cap)?;
        oracle_converged &= slice.converged;
        if !slice.words.contains(&power) {
            return Ok(PeriodicityCertificate {
                word: rendered,
                n_checked: n,
                verdict: PeriodicityVerdict::Refuted {
                    n,
                    missing: th.alphabet().format_word(&power),
                },
                oracle_converged,
            });
        }
    }
    Ok(PeriodicityCertificate {
        word: rendered,
        n_checked: n_max,
        verdict: PeriodicityVerdict::Consistent,
        oracle_converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inflation::DEFAULT_LETTER_CAP;

    const RF: &str = "alphabet = a b\na -> ab | ba\nb -> a\n";
    const RTM: &str = "alphabet = a b\na -> ab | ba\nb -> ba\n";
    const DET_FIB: &str = "alphabet = a b\na -> ab\nb -> a\n";

    fn parse(text: &str) -> RandomSubstitution {
        RandomSubstitution::parse(text).unwrap()
    }

    fn rendered(th: &RandomSubstitution, slice: &LanguageSlice) -> Vec<String> {
        slice
            .words
            .iter()
            .map(|w| th.alphabet().format_word(w))
            .collect()
    }

    #[test]
    fn fibonacci_short_slices_are_full() {
        let th = parse(RF);
        let s1 = legal_words(&th, 1, None, 12, DEFAULT_LETTER_CAP).unwrap();
        assert_eq!(rendered(&th, &s1), vec!["a", "b"]);
        assert!(s1.converged);

        // bb arises from ab·ba inside an inflation of aa, and aa from b·aa
        // one level up: the random Fibonacci language has all four pairs.
        let s2 = legal_words(&th, 2, None, 12, DEFAULT_LETTER_CAP).unwrap();
        assert_eq!(rendered(&th, &s2), vec!["aa", "ab", "ba", "bb"]);
        assert!(s2.converged);
    }

    #[test]
    fn thue_morse_pairs_are_full() {
        let th = parse(RTM);
        let s2 = legal_words(&th, 2, None, 12, DEFAULT_LETTER_CAP).unwrap();
        assert_eq!(rendered(&th, &s2), vec!["aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn deterministic_fibonacci_has_sturmian_counts() {
        let th = parse(DET_FIB);
        let profile = complexity_profile(&th, 4, 12, DEFAULT_LETTER_CAP).unwrap();
        let counts: Vec<usize> = profile.iter().map(|r| r.count).collect();
        assert_eq!(counts, vec![2, 3, 4, 5]);
        for row in &profile {
            assert!(row.converged);
            assert!((row.quotient - (row.count as f64).ln() / row.length as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn frequency_deviation_shrinks_with_length_for_deterministic_fibonacci() {
        let th = parse(DET_FIB);
        let profile = complexity_profile(&th, 8, 14, DEFAULT_LETTER_CAP).unwrap();
        // Sturmian words have letter counts within 1 of ℓ·R_i, so the
        // deviation is bounded by 1/ℓ.
        for row in &profile {
            assert!(row.max_frequency_deviation <= 1.0 / row.length as f64 + 1e-12);
        }
    }

    #[test]
    fn single_letters_converge_for_every_substitution() {
        for text in [RF, RTM, DET_FIB] {
            let th = parse(text);
            let slice = legal_words(&th, 1, None, 12, DEFAULT_LETTER_CAP).unwrap();
            assert_eq!(slice.words.len(), th.alphabet().size());
        }
    }

    #[test]
    fn window_override_and_level_cap_are_respected() {
        let th = parse(RF);
        let slice = legal_words(&th, 3, Some(3), 2, DEFAULT_LETTER_CAP).unwrap();
        assert!(!slice.converged);
        assert_eq!(slice.levels_used, 2);
        assert_eq!(slice.window, 3);
    }

    #[test]
    fn periodicity_refuted_for_the_deterministic_fibonacci_letter_b() {
        let th = parse(DET_FIB);
        let u = th.alphabet().parse_word("b").unwrap();
        let cert = is_periodic_bounded(&th, &u, 3, 12, DEFAULT_LETTER_CAP).unwrap();
        assert_eq!(
            cert.verdict,
            PeriodicityVerdict::Refuted {
                n: 2,
                missing: "bb".into()
            }
        );
        assert_eq!(cert.n_checked, 2);
        assert!(cert.oracle_converged);
    }

    #[test]
    fn periodicity_consistent_for_equal_images_alternation() {
        let th = parse("alphabet = a b\na -> ab | ba\nb -> ab | ba\n");
        let u = th.alphabet().parse_word("ab").unwrap();
        let cert = is_periodic_bounded(&th, &u, 3, 12, DEFAULT_LETTER_CAP).unwrap();
        assert_eq!(cert.verdict, PeriodicityVerdict::Consistent);
    }

    #[test]
    fn any_single_legal_letter_is_consistent_at_depth_one() {
        let th = parse(RTM);
        let u = th.alphabet().parse_word("b").unwrap();
        let cert = is_periodic_bounded(&th, &u, 1, 12, DEFAULT_LETTER_CAP).unwrap();
        assert_eq!(cert.verdict, PeriodicityVerdict::Consistent);
    }

    #[test]
    fn zero_length_slice_is_rejected() {
        let th = parse(RF);
        assert!(matches!(
            legal_words(&th, 0, None, 12, DEFAULT_LETTER_CAP),
            Err(Error::Invalid(_))
        ));
    }
}
