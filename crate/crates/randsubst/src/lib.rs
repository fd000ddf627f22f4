//! Topological entropy of primitive random substitutions.
//!
//! A random substitution maps each letter of a finite alphabet to a *set* of
//! candidate words. When every image set shares a letter-count vector
//! (semi-compatibility) and the induced matrix is primitive, the associated
//! subshift has a topological entropy that can be squeezed between explicit
//! bounds built from the per-letter inflation counts:
//!
//! ```text
//!     q_m·R / λ^m   ≤   s   ≤   q_m·R / (λ^m − 1)
//! ```
//!
//! with λ and R the dominant eigenvalue and right eigenvector of the
//! substitution matrix and `q_m` the vector of log-cardinalities of the
//! level-m inflation sets. Two structural conditions collapse the bounds to
//! closed forms; everything else is handled by running the bracket upward
//! and, for two classic examples, by exact count recurrences that go far
//! beyond what enumeration can store.
//!
//! The crate ships:
//!
//! - parsing/validation of substitution rule files ([`substitution`]),
//! - exact level enumeration with capacity accounting ([`inflation`]),
//! - Perron–Frobenius data via power iteration ([`spectral`]),
//! - the bound sequences, estimator, geometric rescaling, and periodic-word
//!   growth diagnostic ([`entropy`]),
//! - a brute-force language oracle for independent verification ([`oracle`]),
//! - named examples with known values ([`catalogue`]),
//! - deterministic JSON/CSV/text reports ([`report`]),
//! - a `randsubst` CLI wrapping the above.
//!
//! ```
//! use randsubst::{estimate_entropy, EstimateOptions, RandomSubstitution};
//!
//! let th = RandomSubstitution::parse("alphabet = a b\na -> ab | ba\nb -> aa\n").unwrap();
//! let est = estimate_entropy(&th, &EstimateOptions::default()).unwrap();
//! assert!((est.value - 2.0 / 3.0 * 2f64.ln()).abs() < 1e-12);
//! ```

pub mod catalogue;
pub mod entropy;
pub mod error;
pub mod inflation;
pub mod oracle;
pub mod report;
pub mod spectral;
pub mod substitution;
pub mod words;

pub use catalogue::{
    get_example, names, random_fibonacci_count, random_thue_morse_counts, CatalogueEntry,
    KnownEntropy, Recurrence, RecurrenceCounts,
};
pub use entropy::{
    bounds_table, bounds_table_enumerated, estimate_entropy, estimate_entropy_with,
    geometric_entropy, periodic_growth, BoundsRow, BoundsTable, Certificate, CertificateKind,
    EntropyEstimate, EnumeratedCounts, EstimateOptions, GeometricConfig, QSource, Truncation,
};
pub use error::{Error, Result};
pub use inflation::{
    check_disjoint, check_identical, inflate_set, inflate_word, level_sets, power_substitution,
    q_vector, CardinalityVector, ConditionKind, ConditionReport, GuaranteeKind, LevelEnumerator,
    LevelSets, QVector, RefutationWitness, Verdict, DEFAULT_LETTER_CAP,
};
pub use oracle::{
    complexity_profile, is_periodic_bounded, legal_words, ComplexityRow, LanguageSlice,
    PeriodicityCertificate, PeriodicityVerdict, DEFAULT_ORACLE_LEVEL_CAP,
};
pub use report::{
    analyze, analyze_catalogue, analyze_with, format_sig, to_csv, to_json, to_json_value, to_text,
    Analysis, AnalysisOptions, GeometricResult,
};
pub use spectral::{length_vector, perron_data, LengthVector, PerronData, DEFAULT_TOLERANCE};
pub use substitution::{RandomSubstitution, SubstitutionMatrix, ValidationReport, Violation};
pub use words::{abelianise, subwords_of_length, AbelianVector, Alphabet, Letter, Word, WordSet};
