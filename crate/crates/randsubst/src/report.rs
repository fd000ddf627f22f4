//! End-to-end analysis plumbing and deterministic report rendering.
//!
//! A report is a pure function of the input and the flags: no timestamps, no
//! machine identifiers, canonical key order, and floats printed to exactly
//! 12 significant digits (6 in the text format). The JSON renderer feeds its
//! own float literals back through the parser, so emitted documents
//! round-trip byte-identically.

use num_bigint::BigUint;
use serde_json::{Map, Number, Value};

use crate::catalogue::{CatalogueEntry, KnownEntropy, RecurrenceCounts};
use crate::entropy::{
    bounds_table, estimate_entropy_with, BoundsTable, Certificate, EntropyEstimate,
    EnumeratedCounts, EstimateOptions, GeometricConfig, QSource,
};
use crate::error::Result;
use crate::inflation::{check_disjoint, check_identical, ConditionReport, Verdict, DEFAULT_LETTER_CAP};
use crate::oracle::{legal_words, LanguageSlice, DEFAULT_ORACLE_LEVEL_CAP};
use crate::spectral::{perron_data, PerronData, DEFAULT_TOLERANCE};
use crate::substitution::{RandomSubstitution, SubstitutionMatrix, ValidationReport};

/// Everything an analysis run can be asked to do.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub max_level: u32,
    pub tolerance: f64,
    pub condition_levels: u32,
    pub letter_cap: usize,
    /// Tile lengths for the geometric rescaling; absent means skip it.
    pub psi: Option<Vec<f64>>,
    /// Legal-word length for the language oracle; absent means skip it.
    pub language_length: Option<usize>,
    /// Deepest inflation level the language oracle may enumerate.
    pub oracle_level_cap: u32,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            max_level: 5,
            tolerance: 0.01,
            condition_levels: 3,
            letter_cap: DEFAULT_LETTER_CAP,
            psi: None,
            language_length: None,
            oracle_level_cap: DEFAULT_ORACLE_LEVEL_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeometricResult {
    pub config: GeometricConfig,
    pub value: f64,
}

/// A full analysis, ready for rendering in any format.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub source: String,
    pub options: AnalysisOptions,
    pub substitution: RandomSubstitution,
    pub validation: ValidationReport,
    pub matrix: SubstitutionMatrix,
    pub perron: PerronData,
    pub identical: ConditionReport,
    pub disjoint: ConditionReport,
    pub bounds: BoundsTable,
    pub estimate: EntropyEstimate,
    /// Externally known value the estimate is reported against, if any.
    pub reference: Option<KnownEntropy>,
    pub geometric: Option<GeometricResult>,
    pub language: Option<LanguageSlice>,
    pub warnings: Vec<String>,
}

/// Run the full pipeline with counts from exhaustive enumeration.
pub fn analyze(
    th: &RandomSubstitution,
    source: &str,
    options: &AnalysisOptions,
) -> Result<Analysis> {
    analyze_with(th, source, options, None, None)
}

/// Run the full pipeline for a catalogue entry, preferring its exact count
/// recurrence over enumeration when it has one.
pub fn analyze_catalogue(entry: &CatalogueEntry, options: &AnalysisOptions) -> Result<Analysis> {
    let mut recurrence = entry.recurrence.map(RecurrenceCounts::new);
    analyze_with(
        &entry.substitution,
        &format!("catalogue:{}", entry.name),
        options,
        recurrence.as_mut().map(|r| r as &mut dyn QSource),
        entry.known_entropy.clone(),
    )
}

/// The general pipeline: validation, spectral data, condition checks, bounds,
/// estimate, then the optional geometric and language extras.
pub fn analyze_with(
    th: &RandomSubstitution,
    source: &str,
    options: &AnalysisOptions,
    counts: Option<&mut dyn QSource>,
    reference: Option<KnownEntropy>,
) -> Result<Analysis> {
    th.ensure_valid()?;
    let validation = th.validate();
    let matrix = th.matrix()?;
    let perron = perron_data(&matrix, DEFAULT_TOLERANCE)?;

    let identical = check_identical(th, options.condition_levels, options.letter_cap)?;
    let disjoint = check_disjoint(th, options.condition_levels, options.letter_cap)?;

    let mut fallback;
    let counts: &mut dyn QSource = match counts {
        Some(source) => source,
        None => {
            fallback = EnumeratedCounts::new(th, options.letter_cap)?;
            &mut fallback
        }
    };
    let bounds = bounds_table(&perron, counts, options.max_level)?;
    let estimate_options = EstimateOptions {
        tolerance: options.tolerance,
        max_level: options.max_level,
        condition_levels: options.condition_levels,
        letter_cap: options.letter_cap,
    };
    let estimate = estimate_entropy_with(&perron, &identical, &disjoint, counts, &estimate_options)?;

    let geometric = match &options.psi {
        Some(psi) => {
            let config = GeometricConfig::new(psi.clone(), &perron)?;
            let value = config.rho * estimate.value;
            Some(GeometricResult { config, value })
        }
        None => None,
    };

    let language = match options.language_length {
        Some(length) => Some(legal_words(
            th,
            length,
            None,
            options.oracle_level_cap,
            options.letter_cap,
        )?),
        None => None,
    };

    let mut warnings = Vec::new();
    if let Some(t) = &bounds.truncation {
        warnings.push(format!(
            "bounds table stopped at level {} of {}: {}",
            t.completed, t.requested, t.reason
        ));
    }
    warnings.extend(estimate.warnings.iter().cloned());
    for (name, report) in [("identical-images", &identical), ("disjoint-images", &disjoint)] {
        if let Verdict::Unverified {
            max_level_checked,
            note,
        } = &report.verdict
        {
            let mut text = format!(
                "{name} condition unrefuted but unverified up to level {max_level_checked}"
            );
            if let Some(note) = note {
                text.push_str(&format!(" ({note})"));
            }
            warnings.push(text);
        }
    }
    if let Some(slice) = &language {
        if !slice.converged {
            warnings.push(format!(
                "language slice at length {} did not stabilise within {} levels",
                slice.length, slice.levels_used
            ));
        }
    }

    Ok(Analysis {
        source: source.into(),
        options: options.clone(),
        substitution: th.clone(),
        validation,
        matrix,
        perron,
        identical,
        disjoint,
        bounds,
        estimate,
        reference,
        geometric,
        language,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Float formatting
// ---------------------------------------------------------------------------

/// Format with exactly `sig` significant digits, trailing zeros kept.
/// Decimal notation while the exponent is moderate, scientific outside
/// — the same literal every run, which is what golden files need.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return if sig == 1 { "0".into() } else { format!("{:.*}", sig - 1, 0.0) };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let scientific = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = scientific.split_once('e').expect("float in scientific form");
    let exponent: i32 = exponent.parse().expect("exponent is an integer");
    if exponent < -4 || exponent >= sig as i32 {
        return scientific;
    }

    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if exponent < 0 {
        let zeros = "0".repeat((-exponent - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let split = exponent as usize + 1;
    if split >= digits.len() {
        return format!("{sign}{digits}");
    }
    format!("{sign}{}.{}", &digits[..split], &digits[split..])
}

fn number(x: f64) -> Value {
    let literal = format_sig(x, 12);
    Value::Number(
        serde_json::from_str::<Number>(&literal).expect("formatted float is a JSON number"),
    )
}

fn big_number(x: &BigUint) -> Value {
    Value::Number(
        serde_json::from_str::<Number>(&x.to_string()).expect("decimal digits are a JSON number"),
    )
}

fn object(pairs: Vec<(&str, Value)>) -> Value {
    let mut map = Map::new();
    for (key, value) in pairs {
        map.insert(key.into(), value);
    }
    Value::Object(map)
}

// ---------------------------------------------------------------------------
// JSON rendering
// ---------------------------------------------------------------------------

fn condition_json(report: &ConditionReport) -> Value {
    match &report.verdict {
        Verdict::Guaranteed(kind) => object(vec![
            ("verdict", "guaranteed".into()),
            ("criterion", kind.label().into()),
        ]),
        Verdict::Refuted(witness) => object(vec![
            ("verdict", "refuted".into()),
            (
                "witness",
                object(vec![
                    ("letter", witness.letter.to_string().into()),
                    ("level", witness.level.into()),
                    (
                        "pair",
                        Value::Array(vec![
                            witness.pair.0.clone().into(),
                            witness.pair.1.clone().into(),
                        ]),
                    ),
                    (
                        "common",
                        witness
                            .common
                            .clone()
                            .map(Value::String)
                            .unwrap_or(Value::Null),
                    ),
                ]),
            ),
        ]),
        Verdict::Unverified {
            max_level_checked,
            note,
        } => object(vec![
            ("verdict", "unverified".into()),
            ("max_level_checked", (*max_level_checked).into()),
            (
                "note",
                note.clone().map(Value::String).unwrap_or(Value::Null),
            ),
        ]),
    }
}

fn certificate_json(certificate: &Certificate) -> Value {
    match certificate {
        Certificate::ClosedFormIdentical { criterion } => object(vec![
            ("kind", certificate.kind_label().into()),
            ("criterion", criterion.label().into()),
        ]),
        Certificate::ClosedFormDisjoint { criterion } => object(vec![
            ("kind", certificate.kind_label().into()),
            ("criterion", criterion.label().into()),
        ]),
        Certificate::Sandwich { level, gap } => object(vec![
            ("kind", certificate.kind_label().into()),
            ("level", (*level).into()),
            ("gap", number(*gap)),
        ]),
    }
}

/// The analysis as a JSON value with canonical key order.
pub fn to_json_value(analysis: &Analysis) -> Value {
    let alphabet = analysis.substitution.alphabet();
    let mut rules = Map::new();
    for letter in alphabet.letters() {
        let image = analysis.substitution.image(letter.index as u8);
        rules.insert(
            letter.glyph.to_string(),
            Value::Array(
                image
                    .iter()
                    .map(|w| Value::String(alphabet.format_word(w)))
                    .collect(),
            ),
        );
    }

    let options = object(vec![
        ("max_level", analysis.options.max_level.into()),
        ("tolerance", number(analysis.options.tolerance)),
        ("condition_levels", analysis.options.condition_levels.into()),
        ("letter_cap", analysis.options.letter_cap.into()),
    ]);
    let input = object(vec![
        ("source", analysis.source.clone().into()),
        (
            "alphabet",
            Value::Array(
                alphabet
                    .glyphs()
                    .iter()
                    .map(|g| Value::String(g.to_string()))
                    .collect(),
            ),
        ),
        ("rules", Value::Object(rules)),
        ("options", options),
    ]);

    let validation = object(vec![
        ("ok", analysis.validation.ok.into()),
        (
            "violations",
            Value::Array(
                analysis
                    .validation
                    .violations
                    .iter()
                    .map(|v| {
                        object(vec![
                            ("letter", v.letter.to_string().into()),
                            ("first", v.first.clone().into()),
                            ("second", v.second.clone().into()),
                            ("reason", v.reason.clone().into()),
                        ])
                    })
                    .collect(),
            ),
        ),
    ]);

    let matrix = object(vec![
        ("size", analysis.matrix.size().into()),
        (
            "entries",
            Value::Array(
                analysis
                    .matrix
                    .rows()
                    .into_iter()
                    .map(|row| Value::Array(row.into_iter().map(Value::from).collect()))
                    .collect(),
            ),
        ),
        ("primitive", analysis.matrix.is_primitive().into()),
        (
            "primitivity_exponent",
            analysis
                .matrix
                .primitivity_exponent()
                .map(Value::from)
                .unwrap_or(Value::Null),
        ),
        (
            "constant_length",
            analysis
                .substitution
                .constant_length()
                .map(Value::from)
                .unwrap_or(Value::Null),
        ),
    ]);

    let perron = object(vec![
        ("lambda", number(analysis.perron.lambda)),
        (
            "right",
            Value::Array(analysis.perron.right.iter().map(|&x| number(x)).collect()),
        ),
        (
            "left",
            Value::Array(analysis.perron.left.iter().map(|&x| number(x)).collect()),
        ),
        ("residual", number(analysis.perron.residual)),
        ("iterations", analysis.perron.iterations.into()),
        ("tolerance", number(analysis.perron.tolerance)),
    ]);

    let conditions = object(vec![
        ("levels_checked", analysis.options.condition_levels.into()),
        ("identical", condition_json(&analysis.identical)),
        ("disjoint", condition_json(&analysis.disjoint)),
    ]);

    let bounds = object(vec![
        ("q_source", analysis.bounds.q_source.clone().into()),
        ("max_level", analysis.options.max_level.into()),
        (
            "rows",
            Value::Array(
                analysis
                    .bounds
                    .rows
                    .iter()
                    .map(|row| {
                        object(vec![
                            ("level", row.level.into()),
                            (
                                "counts",
                                Value::Array(row.counts.iter().map(big_number).collect()),
                            ),
                            ("lower", number(row.lower)),
                            ("upper", number(row.upper)),
                            ("gap", number(row.gap)),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("truncated", analysis.bounds.truncation.is_some().into()),
        (
            "truncation",
            analysis
                .bounds
                .truncation
                .as_ref()
                .map(|t| {
                    object(vec![
                        ("requested", t.requested.into()),
                        ("completed", t.completed.into()),
                        ("reason", t.reason.clone().into()),
                    ])
                })
                .unwrap_or(Value::Null),
        ),
    ]);

    let entropy = object(vec![
        ("value", number(analysis.estimate.value)),
        ("lower_bound", number(analysis.estimate.lower_bound)),
        ("upper_bound", number(analysis.estimate.upper_bound)),
        ("tolerance", number(analysis.options.tolerance)),
        ("certificate", certificate_json(&analysis.estimate.certificate)),
        (
            "reference",
            analysis
                .reference
                .as_ref()
                .map(|r| {
                    object(vec![
                        ("value", number(r.value)),
                        ("tolerance", number(r.tolerance)),
                        ("note", r.note.into()),
                    ])
                })
                .unwrap_or(Value::Null),
        ),
    ]);

    let geometric = analysis
        .geometric
        .as_ref()
        .map(|g| {
            object(vec![
                (
                    "psi",
                    Value::Array(g.config.psi.iter().map(|&x| number(x)).collect()),
                ),
                ("rho", number(g.config.rho)),
                ("value", number(g.value)),
            ])
        })
        .unwrap_or(Value::Null);

    let language = analysis
        .language
        .as_ref()
        .map(|slice| {
            object(vec![
                ("length", slice.length.into()),
                ("count", slice.words.len().into()),
                (
                    "quotient",
                    number((slice.words.len() as f64).ln() / slice.length as f64),
                ),
                ("levels_used", slice.levels_used.into()),
                ("converged", slice.converged.into()),
                ("window", slice.window.into()),
                (
                    "words",
                    Value::Array(
                        slice
                            .words
                            .iter()
                            .map(|w| Value::String(alphabet.format_word(w)))
                            .collect(),
                    ),
                ),
            ])
        })
        .unwrap_or(Value::Null);

    object(vec![
        ("input", input),
        ("validation", validation),
        ("matrix", matrix),
        ("perron", perron),
        ("conditions", conditions),
        ("bounds", bounds),
        ("entropy", entropy),
        ("geometric", geometric),
        ("language", language),
        (
            "warnings",
            Value::Array(
                analysis
                    .warnings
                    .iter()
                    .map(|w| Value::String(w.clone()))
                    .collect(),
            ),
        ),
    ])
}

/// Pretty-printed JSON report.
pub fn to_json(analysis: &Analysis) -> String {
    serde_json::to_string_pretty(&to_json_value(analysis)).expect("report value serialises")
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

fn sig6(x: f64) -> String {
    format_sig(x, 6)
}

/// Human-oriented plain-text report (6 significant digits).
pub fn to_text(analysis: &Analysis) -> String {
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };

    push(&mut out, format!("source: {}", analysis.source));
    push(&mut out, "rules:".into());
    for line in analysis.substitution.render_rules().lines() {
        push(&mut out, format!("  {line}"));
    }
    push(
        &mut out,
        format!(
            "validation: {}",
            if analysis.validation.ok {
                "semi-compatible".into()
            } else {
                format!("{} violation(s)", analysis.validation.violations.len())
            }
        ),
    );
    let exponent = analysis
        .matrix
        .primitivity_exponent()
        .map(|k| format!("primitive, exponent {k}"))
        .unwrap_or_else(|| "not primitive".into());
    push(
        &mut out,
        format!("matrix: {:?} ({exponent})", analysis.matrix.rows()),
    );
    push(
        &mut out,
        format!(
            "perron: lambda {} right [{}] left [{}] residual {}",
            sig6(analysis.perron.lambda),
            analysis.perron.right.iter().map(|&x| sig6(x)).collect::<Vec<_>>().join(", "),
            analysis.perron.left.iter().map(|&x| sig6(x)).collect::<Vec<_>>().join(", "),
            format_sig(analysis.perron.residual, 3),
        ),
    );

    for (name, report) in [
        ("identical-images", &analysis.identical),
        ("disjoint-images", &analysis.disjoint),
    ] {
        let line = match &report.verdict {
            Verdict::Guaranteed(kind) => format!("guaranteed ({})", kind.label()),
            Verdict::Refuted(w) => {
                let common = w
                    .common
                    .as_ref()
                    .map(|c| format!(", common inflation {c}"))
                    .unwrap_or_default();
                format!(
                    "refuted at level {} (letter {}, images {} / {}{common})",
                    w.level, w.letter, w.pair.0, w.pair.1
                )
            }
            Verdict::Unverified {
                max_level_checked, ..
            } => format!("unverified up to level {max_level_checked}"),
        };
        push(&mut out, format!("{name}: {line}"));
    }

    push(
        &mut out,
        format!("bounds (counts from {}):", analysis.bounds.q_source),
    );
    push(
        &mut out,
        format!("  {:>5}  {:<24} {:<12} {:<12} {}", "level", "counts", "lower", "upper", "gap"),
    );
    for row in &analysis.bounds.rows {
        let counts = row
            .counts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        push(
            &mut out,
            format!(
                "  {:>5}  {:<24} {:<12} {:<12} {}",
                row.level,
                counts,
                sig6(row.lower),
                sig6(row.upper),
                sig6(row.gap)
            ),
        );
    }
    if let Some(t) = &analysis.bounds.truncation {
        push(
            &mut out,
            format!("  (stopped at level {} of {}: {})", t.completed, t.requested, t.reason),
        );
    }

    let certificate = match &analysis.estimate.certificate {
        Certificate::ClosedFormIdentical { criterion } => {
            format!("closed-form-identical via {}", criterion.label())
        }
        Certificate::ClosedFormDisjoint { criterion } => {
            format!("closed-form-disjoint via {}", criterion.label())
        }
        Certificate::Sandwich { level, gap } => {
            format!("sandwich at level {level}, gap {}", sig6(*gap))
        }
    };
    push(
        &mut out,
        format!(
            "entropy: {} in [{}, {}] ({certificate})",
            sig6(analysis.estimate.value),
            sig6(analysis.estimate.lower_bound),
            sig6(analysis.estimate.upper_bound)
        ),
    );
    if let Some(reference) = &analysis.reference {
        push(
            &mut out,
            format!("reference: {} ({})", sig6(reference.value), reference.note),
        );
    }
    if let Some(g) = &analysis.geometric {
        push(
            &mut out,
            format!(
                "geometric: value {} (psi [{}], rho {})",
                sig6(g.value),
                g.config.psi.iter().map(|&x| sig6(x)).collect::<Vec<_>>().join(", "),
                sig6(g.config.rho)
            ),
        );
    }
    if let Some(slice) = &analysis.language {
        let alphabet = analysis.substitution.alphabet();
        push(
            &mut out,
            format!(
                "language: {} word(s) of length {} (levels {}, {})",
                slice.words.len(),
                slice.length,
                slice.levels_used,
                if slice.converged { "stable" } else { "not stabilised" }
            ),
        );
        let rendered: Vec<String> = slice
            .words
            .iter()
            .map(|w| alphabet.format_word(w))
            .collect();
        push(&mut out, format!("  {}", rendered.join(" ")));
    }
    for warning in &analysis.warnings {
        push(&mut out, format!("warning: {warning}"));
    }
    out
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

/// Bounds table as CSV: one row per level, counts flattened per letter.
pub fn to_csv(analysis: &Analysis) -> String {
    let alphabet = analysis.substitution.alphabet();
    let mut out = String::new();
    let count_headers: Vec<String> = alphabet
        .glyphs()
        .iter()
        .map(|g| format!("count_{g}"))
        .collect();
    out.push_str(&format!("level,{},lower,upper,gap\n", count_headers.join(",")));
    for row in &analysis.bounds.rows {
        let counts = row
            .counts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.level,
            counts,
            format_sig(row.lower, 12),
            format_sig(row.upper, 12),
            format_sig(row.gap, 12)
        ));
    }
    out
}
