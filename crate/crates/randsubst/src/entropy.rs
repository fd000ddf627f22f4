//! Entropy bound sequences and the estimator built on them.
//!
//! For a primitive semi-compatible substitution with inflation factor λ and
//! right eigenvector R, the per-level log-cardinality vector q_m brackets the
//! topological entropy:
//!
//! ```text
//!     q_m·R / λ^m   ≤   s   ≤   q_m·R / (λ^m − 1)
//! ```
//!
//! The lower sequence is non-decreasing and both sides share the limit, so
//! running levels upward squeezes the value. Two structural conditions skip
//! the squeeze entirely: identical images give s = q₁·R/λ, disjoint images
//! give s = q₁·R/(λ−1).

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::inflation::{
    check_disjoint, check_identical, CardinalityVector, ConditionReport, GuaranteeKind,
    LevelEnumerator, QVector, DEFAULT_LETTER_CAP,
};
use crate::spectral::{length_vector, perron_data, PerronData, DEFAULT_TOLERANCE};
use crate::substitution::RandomSubstitution;
use crate::words::{abelianise, Word};

/// A provider of exact level cardinalities. Enumeration is the universal
/// implementation; catalogue entries with a combinatorial recurrence plug in
/// here to reach levels enumeration cannot.
pub trait QSource {
    fn counts(&mut self, level: u32) -> Result<CardinalityVector>;
    /// Source tag recorded in reports, e.g. `enumeration`.
    fn label(&self) -> String;
}

/// Cardinalities by exhaustive level enumeration, cached per level.
pub struct EnumeratedCounts<'a> {
    walker: LevelEnumerator<'a>,
    cache: Vec<CardinalityVector>,
}

impl<'a> EnumeratedCounts<'a> {
    pub fn new(th: &'a RandomSubstitution, letter_cap: usize) -> Result<EnumeratedCounts<'a>> {
        Ok(EnumeratedCounts {
            walker: LevelEnumerator::new(th, letter_cap)?,
            cache: Vec::new(),
        })
    }
}

impl QSource for EnumeratedCounts<'_> {
    fn counts(&mut self, level: u32) -> Result<CardinalityVector> {
        if level == 0 {
            return Err(Error::LevelZero);
        }
        while self.cache.len() < level as usize {
            let sets = self.walker.advance()?;
            self.cache.push(sets.counts());
        }
        Ok(self.cache[level as usize - 1].clone())
    }

    fn label(&self) -> String {
        "enumeration".into()
    }
}

/// One level of the bound bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub level: u32,
    pub counts: Vec<BigUint>,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
}

/// Why a table stops short of the requested level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncation {
    pub requested: u32,
    pub completed: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsTable {
    pub rows: Vec<BoundsRow>,
    pub q_source: String,
    pub truncation: Option<Truncation>,
}

impl BoundsTable {
    pub fn last(&self) -> Option<&BoundsRow> {
        self.rows.last()
    }
}

fn bounds_row(perron: &PerronData, counts: CardinalityVector) -> BoundsRow {
    let q: QVector = counts.q_vector();
    let weighted = q.dot(&perron.right);
    let lambda_m = perron.lambda.powi(counts.level as i32);
    let lower = weighted / lambda_m;
    let upper = weighted / (lambda_m - 1.0);
    BoundsRow {
        level: counts.level,
        counts: counts.counts,
        lower,
        upper,
        gap: upper - lower,
    }
}

/// Bracket rows for levels 1..=max_level. Running out of letter budget stops
/// the table early and flags it; every other error aborts.
pub fn bounds_table(
    perron: &PerronData,
    source: &mut dyn QSource,
    max_level: u32,
) -> Result<BoundsTable> {
    let mut rows = Vec::new();
    let mut truncation = None;
    for level in 1..=max_level {
        match source.counts(level) {
            Ok(counts) => rows.push(bounds_row(perron, counts)),
            Err(
                err @ (Error::Capacity { .. }
                | Error::LevelCapacity { .. }
                | Error::RecurrenceDepth { .. }),
            ) => {
                truncation = Some(Truncation {
                    requested: max_level,
                    completed: level - 1,
                    reason: err.to_string(),
                });
                break;
            }
            Err(err) => return Err(err),
        }
    }
    Ok(BoundsTable {
        rows,
        q_source: source.label(),
        truncation,
    })
}

/// Bracket rows with counts taken from exhaustive enumeration.
pub fn bounds_table_enumerated(
    th: &RandomSubstitution,
    max_level: u32,
    letter_cap: usize,
) -> Result<BoundsTable> {
    let perron = perron_data(&th.matrix()?, DEFAULT_TOLERANCE)?;
    let mut source = EnumeratedCounts::new(th, letter_cap)?;
    bounds_table(&perron, &mut source, max_level)
}

/// How an estimate was certified.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Identical-images condition: the value is q₁·R/λ exactly.
    ClosedFormIdentical { criterion: GuaranteeKind },
    /// Disjoint-images condition: the value is q₁·R/(λ−1) exactly.
    ClosedFormDisjoint { criterion: GuaranteeKind },
    /// Squeezed between the best computed bounds; `gap` is their distance.
    Sandwich { level: u32, gap: f64 },
}

/// Certificate discriminant, for comparing against catalogue expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateKind {
    ClosedFormIdentical,
    ClosedFormDisjoint,
    Sandwich,
}

impl Certificate {
    pub fn kind(&self) -> CertificateKind {
        match self {
            Certificate::ClosedFormIdentical { .. } => CertificateKind::ClosedFormIdentical,
            Certificate::ClosedFormDisjoint { .. } => CertificateKind::ClosedFormDisjoint,
            Certificate::Sandwich { .. } => CertificateKind::Sandwich,
        }
    }

    pub fn kind_label(&self) -> &'static str {
        match self.kind() {
            CertificateKind::ClosedFormIdentical => "closed-form-identical",
            CertificateKind::ClosedFormDisjoint => "closed-form-disjoint",
            CertificateKind::Sandwich => "sandwich",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub certificate: Certificate,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct EstimateOptions {
    /// Stop the sandwich once upper − lower drops below this.
    pub tolerance: f64,
    /// Deepest level the sandwich may enumerate.
    pub max_level: u32,
    /// Search depth for refuting the two structural conditions.
    pub condition_levels: u32,
    pub letter_cap: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            tolerance: 0.01,
            max_level: 5,
            condition_levels: 3,
            letter_cap: DEFAULT_LETTER_CAP,
        }
    }
}

/// Estimate the entropy, running the condition checks internally.
pub fn estimate_entropy(
    th: &RandomSubstitution,
    options: &EstimateOptions,
) -> Result<EntropyEstimate> {
    let perron = perron_data(&th.matrix()?, DEFAULT_TOLERANCE)?;
    let identical = check_identical(th, options.condition_levels, options.letter_cap)?;
    let disjoint = check_disjoint(th, options.condition_levels, options.letter_cap)?;
    let mut source = EnumeratedCounts::new(th, options.letter_cap)?;
    estimate_entropy_with(&perron, &identical, &disjoint, &mut source, options)
}

/// Estimate with pre-computed Perron data, condition reports, and a pluggable
/// count provider — closed forms first, sandwich otherwise.
pub fn estimate_entropy_with(
    perron: &PerronData,
    identical: &ConditionReport,
    disjoint: &ConditionReport,
    source: &mut dyn QSource,
    options: &EstimateOptions,
) -> Result<EntropyEstimate> {
    if identical.is_guaranteed() || disjoint.is_guaranteed() {
        let q1 = source.counts(1)?.q_vector();
        let weighted = q1.dot(&perron.right);
        let (value, certificate) = if identical.is_guaranteed() {
            let criterion = guaranteed_kind(identical);
            (weighted / perron.lambda, Certificate::ClosedFormIdentical { criterion })
        } else {
            let criterion = guaranteed_kind(disjoint);
            (
                weighted / (perron.lambda - 1.0),
                Certificate::ClosedFormDisjoint { criterion },
            )
        };
        return Ok(EntropyEstimate {
            value,
            lower_bound: value,
            upper_bound: value,
            certificate,
            warnings: Vec::new(),
        });
    }

    let mut warnings = Vec::new();
    let mut best: Option<(u32, f64, f64)> = None; // (level, best lower, best upper)
    for level in 1..=options.max_level {
        let counts = match source.counts(level) {
            Ok(c) => c,
            Err(
                err @ (Error::Capacity { .. }
                | Error::LevelCapacity { .. }
                | Error::RecurrenceDepth { .. }),
            ) => {
                if best.is_none() {
                    return Err(err);
                }
                warnings.push(format!("bounds stopped early: {err}"));
                break;
            }
            Err(err) => return Err(err),
        };
        let row = bounds_row(perron, counts);
        best = Some(match best {
            None => (row.level, row.lower, row.upper),
            Some((_, lo, up)) => (row.level, lo.max(row.lower), up.min(row.upper)),
        });
        let (_, lo, up) = best.unwrap();
        if up - lo < options.tolerance {
            break;
        }
    }

    let (level, lower, upper) = best.expect("max_level >= 1 guarantees one row");
    let gap = upper - lower;
    if gap >= options.tolerance {
        warnings.push(format!(
            "bracket gap {gap:.6} still above tolerance {} after level {level}",
            options.tolerance
        ));
    }
    Ok(EntropyEstimate {
        value: (lower + upper) / 2.0,
        lower_bound: lower,
        upper_bound: upper,
        certificate: Certificate::Sandwich { level, gap },
        warnings,
    })
}

fn guaranteed_kind(report: &ConditionReport) -> GuaranteeKind {
    match &report.verdict {
        crate::inflation::Verdict::Guaranteed(kind) => *kind,
        other => unreachable!("caller checked is_guaranteed, got {other:?}"),
    }
}

/// Per-tile lengths ψ and the induced scale factor ϱ = 1/(ψ·R).
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricConfig {
    pub psi: Vec<f64>,
    pub rho: f64,
}

impl GeometricConfig {
    pub fn new(psi: Vec<f64>, perron: &PerronData) -> Result<GeometricConfig> {
        if psi.len() != perron.right.len() {
            return Err(Error::WeightLength {
                expected: perron.right.len(),
                got: psi.len(),
            });
        }
        for (index, &value) in psi.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        let scale: f64 = psi.iter().zip(&perron.right).map(|(p, r)| p * r).sum();
        Ok(GeometricConfig {
            psi,
            rho: scale.recip(),
        })
    }

    /// Natural tile lengths: the left eigenvector. With L·R = 1 this makes
    /// ϱ = 1, so the geometric entropy coincides with the symbolic one.
    pub fn natural(perron: &PerronData) -> GeometricConfig {
        GeometricConfig::new(perron.left.clone(), perron)
            .expect("left eigenvector entries are positive")
    }
}

/// Entropy per unit geometric length: ϱ · s.
pub fn geometric_entropy(config: &GeometricConfig, estimate: &EntropyEstimate) -> f64 {
    config.rho * estimate.value
}

/// Growth diagnostic for a periodic seed word: at each level, the log-count
/// of its inflations per inflated letter, computed through the product law
/// #image^m(u) = ∏_i (#image^m(a_i))^{Φ(u)_i} — no inflation of `u` itself.
///
/// Legality and periodicity of `u` are the caller's certificate to supply
/// (see the language oracle); this only reports the growth numbers.
pub fn periodic_growth(
    th: &RandomSubstitution,
    u: &Word,
    max_level: u32,
    letter_cap: usize,
) -> Result<Vec<(u32, f64)>> {
    th.ensure_valid()?;
    if u.is_empty() {
        return Err(Error::Invalid("growth seed must be non-empty".into()));
    }
    let matrix = th.matrix()?;
    let phi = abelianise(u, th.alphabet().size());
    let mut source = EnumeratedCounts::new(th, letter_cap)?;
    let mut values = Vec::new();
    for level in 1..=max_level {
        let q = source.counts(level)?.q_vector();
        let lengths = length_vector(&matrix, level)?;
        let log_count: f64 = phi
            .entries()
            .iter()
            .zip(&q.entries)
            .map(|(&c, e)| c as f64 * e)
            .sum();
        let total_length: u64 = phi
            .entries()
            .iter()
            .zip(&lengths.entries)
            .map(|(&c, &l)| c * l)
            .sum();
        values.push((level, log_count / total_length as f64));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::RandomSubstitution;

    const RTM: &str = "alphabet = a b\na -> ab | ba\nb -> ba\n";
    const RF: &str = "alphabet = a b\na -> ab | ba\nb -> a\n";
    const RPD: &str = "alphabet = a b\na -> ab | ba\nb -> aa\n";
    const EQUAL: &str = "alphabet = a b\na -> ab | ba\nb -> ab | ba\n";

    fn parse(text: &str) -> RandomSubstitution {
        RandomSubstitution::parse(text).unwrap()
    }

    #[test]
    fn thue_morse_row_five_matches_the_frozen_bracket() {
        let th = parse(RTM);
        let table = bounds_table_enumerated(&th, 5, DEFAULT_LETTER_CAP).unwrap();
        assert_eq!(table.rows.len(), 5);
        assert!(table.truncation.is_none());
        let row = table.last().unwrap();
        assert_eq!(row.level, 5);
        assert_eq!(row.counts, vec![BigUint::from(3456u32), BigUint::from(2880u32)]);
        let product = 9_953_280f64;
        assert!((row.lower - product.ln() / 64.0).abs() < 1e-12);
        assert!((row.upper - product.ln() / 62.0).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_row_one_is_the_known_pair() {
        let th = parse(RF);
        let table = bounds_table_enumerated(&th, 1, DEFAULT_LETTER_CAP).unwrap();
        let row = table.last().unwrap();
        let tau = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((row.lower - 2f64.ln() / (tau * tau)).abs() < 1e-12);
        assert!((row.upper - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn capacity_truncation_is_flagged_not_fatal() {
        let th = parse(RF);
        let table = bounds_table_enumerated(&th, 8, 10_000).unwrap();
        let trunc = table.truncation.expect("must truncate under a tiny cap");
        assert_eq!(trunc.requested, 8);
        assert_eq!(trunc.completed as usize, table.rows.len());
        assert!(trunc.completed < 8);
    }

    #[test]
    fn period_doubling_collapses_to_the_disjoint_closed_form() {
        let th = parse(RPD);
        let est = estimate_entropy(&th, &EstimateOptions::default()).unwrap();
        assert!(matches!(
            est.certificate,
            Certificate::ClosedFormDisjoint {
                criterion: GuaranteeKind::ConstantLength
            }
        ));
        assert!((est.value - 2.0 / 3.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(est.value, est.lower_bound);
        assert_eq!(est.value, est.upper_bound);
        assert!(est.warnings.is_empty());
    }

    #[test]
    fn equal_images_collapse_to_the_identical_closed_form() {
        let th = parse(EQUAL);
        let est = estimate_entropy(&th, &EstimateOptions::default()).unwrap();
        assert!(matches!(
            est.certificate,
            Certificate::ClosedFormIdentical {
                criterion: GuaranteeKind::EqualImages
            }
        ));
        assert!((est.value - 0.5 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn thue_morse_sandwich_meets_the_default_tolerance_at_level_five() {
        let th = parse(RTM);
        let est = estimate_entropy(&th, &EstimateOptions::default()).unwrap();
        match est.certificate {
            Certificate::Sandwich { level, gap } => {
                assert_eq!(level, 5);
                assert!(gap < 0.01);
                assert!((gap - (est.upper_bound - est.lower_bound)).abs() < 1e-15);
            }
            other => panic!("expected a sandwich, got {other:?}"),
        }
        assert!(est.lower_bound <= 0.253917 && 0.253917 <= est.upper_bound);
        assert!((est.value - 0.2558329).abs() < 1e-6);
        assert!(est.warnings.is_empty());
    }

    #[test]
    fn fibonacci_sandwich_warns_when_the_gap_stays_wide() {
        let th = parse(RF);
        let est = estimate_entropy(&th, &EstimateOptions::default()).unwrap();
        match est.certificate {
            Certificate::Sandwich { level, gap } => {
                assert_eq!(level, 5);
                assert!(gap > 0.01);
            }
            other => panic!("expected a sandwich, got {other:?}"),
        }
        assert!(est.warnings.iter().any(|w| w.contains("tolerance")));
        assert!(est.lower_bound <= 0.444399 && 0.444399 <= est.upper_bound);
    }

    #[test]
    fn geometric_entropy_with_natural_lengths_reproduces_the_value() {
        let th = parse(RTM);
        let perron = perron_data(&th.matrix().unwrap(), DEFAULT_TOLERANCE).unwrap();
        let est = estimate_entropy(&th, &EstimateOptions::default()).unwrap();
        let natural = GeometricConfig::natural(&perron);
        assert!((geometric_entropy(&natural, &est) - est.value).abs() < 1e-9);
    }

    #[test]
    fn geometric_entropy_rescales_by_the_weighted_tile_length() {
        let th = parse(RPD);
        let perron = perron_data(&th.matrix().unwrap(), DEFAULT_TOLERANCE).unwrap();
        let est = estimate_entropy(&th, &EstimateOptions::default()).unwrap();
        let config = GeometricConfig::new(vec![1.0, 2.0], &perron).unwrap();
        assert!((config.rho - 3.0 / 4.0).abs() < 1e-12);
        assert!((geometric_entropy(&config, &est) - 0.5 * 2f64.ln()).abs() < 1e-10);

        let uniform = GeometricConfig::new(vec![2.0, 2.0], &perron).unwrap();
        assert!((geometric_entropy(&uniform, &est) - est.value / 2.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_config_rejects_bad_weights() {
        let th = parse(RPD);
        let perron = perron_data(&th.matrix().unwrap(), DEFAULT_TOLERANCE).unwrap();
        assert!(matches!(
            GeometricConfig::new(vec![1.0], &perron),
            Err(Error::WeightLength { expected: 2, got: 1 })
        ));
        assert!(matches!(
            GeometricConfig::new(vec![1.0, -3.0], &perron),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
    }

    #[test]
    fn periodic_growth_hits_the_closed_form_immediately_for_equal_images() {
        let th = parse(EQUAL);
        let u = th.alphabet().parse_word("ab").unwrap();
        let rows = periodic_growth(&th, &u, 3, DEFAULT_LETTER_CAP).unwrap();
        // #image(ab) = 2·2 over length 4, and the identical condition keeps
        // every later level at the same value.
        for (_, value) in rows {
            assert!((value - 0.5 * 2f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_growth_is_zero_for_deterministic_substitutions() {
        let th = parse("alphabet = a b\na -> ab\nb -> a\n");
        let u = th.alphabet().parse_word("a").unwrap();
        for (_, value) in periodic_growth(&th, &u, 4, DEFAULT_LETTER_CAP).unwrap() {
            assert_eq!(value, 0.0);
        }
    }
}
