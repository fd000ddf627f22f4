//! Python bindings: a single `Substitution` class wrapping the core types,
//! plus module-level access to the example catalogue. Values cross the
//! boundary as plain dicts, lists, strings, and arbitrary-precision ints, so
//! the Python side needs no companion types.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use randsubst::{
    analyze, bounds_table, bounds_table_enumerated, check_disjoint, check_identical,
    estimate_entropy, geometric_entropy, get_example, is_periodic_bounded, legal_words, names,
    perron_data, to_json, AnalysisOptions, BoundsTable, Certificate, ConditionReport, Error,
    EstimateOptions, GeometricConfig, LevelEnumerator, PerronData, PeriodicityVerdict,
    RandomSubstitution, RecurrenceCounts, SubstitutionMatrix, Verdict, DEFAULT_LETTER_CAP,
    DEFAULT_ORACLE_LEVEL_CAP, DEFAULT_TOLERANCE,
};

/// Input mistakes become ValueError; resource exhaustion and numerical
/// trouble become RuntimeError.
fn err(e: Error) -> PyErr {
    match &e {
        Error::Parse { .. }
        | Error::MissingRule { .. }
        | Error::UnknownGlyph { .. }
        | Error::Invalid(_)
        | Error::UnknownExample(_)
        | Error::NotPrimitive
        | Error::DegenerateInflation { .. }
        | Error::WeightLength { .. }
        | Error::NonPositiveWeight { .. }
        | Error::SubwordLength { .. }
        | Error::LevelZero => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn condition_dict<'py>(py: Python<'py>, report: &ConditionReport) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    match &report.verdict {
        Verdict::Guaranteed(kind) => {
            dict.set_item("verdict", "guaranteed")?;
            dict.set_item("criterion", kind.label())?;
        }
        Verdict::Refuted(witness) => {
            dict.set_item("verdict", "refuted")?;
            let w = PyDict::new(py);
            w.set_item("letter", witness.letter.to_string())?;
            w.set_item("level", witness.level)?;
            w.set_item("pair", (witness.pair.0.clone(), witness.pair.1.clone()))?;
            w.set_item("common", witness.common.clone())?;
            dict.set_item("witness", w)?;
        }
        Verdict::Unverified {
            max_level_checked,
            note,
        } => {
            dict.set_item("verdict", "unverified")?;
            dict.set_item("max_level_checked", *max_level_checked)?;
            dict.set_item("note", note.clone())?;
        }
    }
    Ok(dict)
}

fn certificate_dict<'py>(py: Python<'py>, certificate: &Certificate) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("kind", certificate.kind_label())?;
    match certificate {
        Certificate::ClosedFormIdentical { criterion }
        | Certificate::ClosedFormDisjoint { criterion } => {
            dict.set_item("criterion", criterion.label())?;
        }
        Certificate::Sandwich { level, gap } => {
            dict.set_item("level", *level)?;
            dict.set_item("gap", *gap)?;
        }
    }
    Ok(dict)
}

fn table_dict<'py>(py: Python<'py>, table: &BoundsTable) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("q_source", &table.q_source)?;
    let rows = PyList::empty(py);
    for row in &table.rows {
        let r = PyDict::new(py);
        r.set_item("level", row.level)?;
        r.set_item("counts", row.counts.clone())?;
        r.set_item("lower", row.lower)?;
        r.set_item("upper", row.upper)?;
        r.set_item("gap", row.gap)?;
        rows.append(r)?;
    }
    dict.set_item("rows", rows)?;
    dict.set_item("truncated", table.truncation.is_some())?;
    dict.set_item(
        "truncation_reason",
        table.truncation.as_ref().map(|t| t.reason.clone()),
    )?;
    Ok(dict)
}

/// A random substitution: each letter maps to a finite set of words sharing
/// one letter-count vector.
#[pyclass(module = "randsubst_py")]
struct Substitution {
    inner: RandomSubstitution,
}

impl Substitution {
    fn eigen(&self) -> PyResult<(SubstitutionMatrix, PerronData)> {
        let matrix = self.inner.matrix().map_err(err)?;
        let perron = perron_data(&matrix, DEFAULT_TOLERANCE).map_err(err)?;
        Ok((matrix, perron))
    }
}

#[pymethods]
impl Substitution {
    /// Parse rule text, e.g. "alphabet = a b\na -> ab | ba\nb -> aa".
    #[new]
    fn new(rules: &str) -> PyResult<Self> {
        Ok(Substitution {
            inner: RandomSubstitution::parse(rules).map_err(err)?,
        })
    }

    /// Load a built-in example by name (see `catalogue_names()`).
    #[staticmethod]
    fn from_catalogue(name: &str) -> PyResult<Self> {
        Ok(Substitution {
            inner: get_example(name).map_err(err)?.substitution,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Substitution({:?})",
            self.inner.render_rules().replace('\n', "; "),
        )
    }

    /// The rule text in canonical form.
    fn rules(&self) -> String {
        self.inner.render_rules()
    }

    /// Alphabet glyphs in order.
    fn alphabet(&self) -> Vec<String> {
        self.inner
            .alphabet()
            .glyphs()
            .iter()
            .map(|c| c.to_string())
            .collect()
    }

    /// Semi-compatibility report: {"ok": bool, "violations": [...]}.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = self.inner.validate();
        let dict = PyDict::new(py);
        dict.set_item("ok", report.ok)?;
        let violations = PyList::empty(py);
        for v in &report.violations {
            let entry = PyDict::new(py);
            entry.set_item("letter", v.letter.to_string())?;
            entry.set_item("first", &v.first)?;
            entry.set_item("second", &v.second)?;
            entry.set_item("reason", &v.reason)?;
            violations.append(entry)?;
        }
        dict.set_item("violations", violations)?;
        Ok(dict)
    }

    /// The substitution matrix as a row-major list of lists.
    fn matrix(&self) -> PyResult<Vec<Vec<u64>>> {
        let matrix = self.inner.matrix().map_err(err)?;
        let n = matrix.size();
        Ok((0..n)
            .map(|i| (0..n).map(|j| matrix.entry(i, j)).collect())
            .collect())
    }

    fn is_primitive(&self) -> PyResult<bool> {
        Ok(self.inner.matrix().map_err(err)?.is_primitive())
    }

    fn primitivity_exponent(&self) -> PyResult<Option<u32>> {
        Ok(self.inner.matrix().map_err(err)?.primitivity_exponent())
    }

    /// Dominant eigendata: λ, both eigenvectors, and the iteration residual.
    fn perron<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let (_, perron) = self.eigen()?;
        let dict = PyDict::new(py);
        dict.set_item("lambda", perron.lambda)?;
        dict.set_item("right", perron.right.clone())?;
        dict.set_item("left", perron.left.clone())?;
        dict.set_item("residual", perron.residual)?;
        dict.set_item("iterations", perron.iterations)?;
        Ok(dict)
    }

    /// Exact per-letter inflation-set cardinalities at one level.
    #[pyo3(signature = (level, letter_cap=None))]
    fn level_counts(&self, level: u32, letter_cap: Option<usize>) -> PyResult<Vec<BigUint>> {
        let cap = letter_cap.unwrap_or(DEFAULT_LETTER_CAP);
        let mut walker = LevelEnumerator::new(&self.inner, cap).map_err(err)?;
        Ok(walker.at_level(level).map_err(err)?.counts().counts)
    }

    /// All level-`level` inflation words of one letter.
    #[pyo3(signature = (letter, level, letter_cap=None))]
    fn level_set(&self, letter: &str, level: u32, letter_cap: Option<usize>) -> PyResult<Vec<String>> {
        let glyph = letter
            .chars()
            .next()
            .filter(|_| letter.chars().count() == 1)
            .ok_or_else(|| PyValueError::new_err("letter must be a single character"))?;
        let index = self
            .inner
            .alphabet()
            .index_of(glyph)
            .ok_or_else(|| PyValueError::new_err(format!("unknown letter '{glyph}'")))?;
        let cap = letter_cap.unwrap_or(DEFAULT_LETTER_CAP);
        let mut walker = LevelEnumerator::new(&self.inner, cap).map_err(err)?;
        let sets = walker.at_level(level).map_err(err)?;
        Ok(sets
            .set(index)
            .iter()
            .map(|w| self.inner.alphabet().format_word(w))
            .collect())
    }

    /// Bound rows for levels 1..=max_level. Uses the exact count recurrence
    /// when the substitution is one of the two catalogue entries that have
    /// one and `recurrence` is not disabled; enumerates otherwise.
    #[pyo3(signature = (max_level=5, letter_cap=None, recurrence=None))]
    fn bounds<'py>(
        &self,
        py: Python<'py>,
        max_level: u32,
        letter_cap: Option<usize>,
        recurrence: Option<&str>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let cap = letter_cap.unwrap_or(DEFAULT_LETTER_CAP);
        let table = match recurrence {
            None => bounds_table_enumerated(&self.inner, max_level, cap).map_err(err)?,
            Some(name) => {
                let entry = get_example(name).map_err(err)?;
                let rec = entry.recurrence.ok_or_else(|| {
                    PyValueError::new_err(format!("'{name}' has no count recurrence"))
                })?;
                if entry.substitution.render_rules() != self.inner.render_rules() {
                    return Err(PyValueError::new_err(format!(
                        "this substitution is not the catalogue entry '{name}'"
                    )));
                }
                let (_, perron) = self.eigen()?;
                let mut source = RecurrenceCounts::new(rec);
                bounds_table(&perron, &mut source, max_level).map_err(err)?
            }
        };
        table_dict(py, &table)
    }

    /// Three-valued identical-images / disjoint-images reports.
    #[pyo3(signature = (levels=3, letter_cap=None))]
    fn conditions<'py>(
        &self,
        py: Python<'py>,
        levels: u32,
        letter_cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let cap = letter_cap.unwrap_or(DEFAULT_LETTER_CAP);
        let identical = check_identical(&self.inner, levels, cap).map_err(err)?;
        let disjoint = check_disjoint(&self.inner, levels, cap).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("identical", condition_dict(py, &identical)?)?;
        dict.set_item("disjoint", condition_dict(py, &disjoint)?)?;
        Ok(dict)
    }

    /// Entropy estimate with its certificate and bracket.
    #[pyo3(signature = (tol=0.01, max_level=5, condition_levels=3, letter_cap=None))]
    fn estimate<'py>(
        &self,
        py: Python<'py>,
        tol: f64,
        max_level: u32,
        condition_levels: u32,
        letter_cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(PyValueError::new_err("tol must be strictly positive"));
        }
        let options = EstimateOptions {
            tolerance: tol,
            max_level,
            condition_levels,
            letter_cap: letter_cap.unwrap_or(DEFAULT_LETTER_CAP),
        };
        let estimate = estimate_entropy(&self.inner, &options).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("value", estimate.value)?;
        dict.set_item("lower_bound", estimate.lower_bound)?;
        dict.set_item("upper_bound", estimate.upper_bound)?;
        dict.set_item("certificate", certificate_dict(py, &estimate.certificate)?)?;
        dict.set_item("warnings", estimate.warnings.clone())?;
        Ok(dict)
    }

    /// Entropy per unit length for tiles of lengths `psi` (natural lengths —
    /// the left eigenvector — when omitted).
    #[pyo3(signature = (psi=None, tol=0.01, max_level=5))]
    fn geometric(&self, psi: Option<Vec<f64>>, tol: f64, max_level: u32) -> PyResult<f64> {
        let (_, perron) = self.eigen()?;
        let config = match psi {
            Some(lengths) => GeometricConfig::new(lengths, &perron).map_err(err)?,
            None => GeometricConfig::natural(&perron),
        };
        let options = EstimateOptions {
            tolerance: tol,
            max_level,
            ..EstimateOptions::default()
        };
        let estimate = estimate_entropy(&self.inner, &options).map_err(err)?;
        Ok(geometric_entropy(&config, &estimate))
    }

    /// The legal words of one length, by brute-force oracle.
    #[pyo3(signature = (length, m_cap=DEFAULT_ORACLE_LEVEL_CAP, letter_cap=None))]
    fn legal_words<'py>(
        &self,
        py: Python<'py>,
        length: usize,
        m_cap: u32,
        letter_cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let cap = letter_cap.unwrap_or(DEFAULT_LETTER_CAP);
        let slice = legal_words(&self.inner, length, None, m_cap, cap).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item(
            "words",
            slice
                .words
                .iter()
                .map(|w| self.inner.alphabet().format_word(w))
                .collect::<Vec<_>>(),
        )?;
        dict.set_item("levels_used", slice.levels_used)?;
        dict.set_item("converged", slice.converged)?;
        dict.set_item("window", slice.window)?;
        Ok(dict)
    }

    /// Necessary-condition periodicity check: u, u², …, u^n_max all legal?
    #[pyo3(signature = (word, n_max=4, m_cap=DEFAULT_ORACLE_LEVEL_CAP, letter_cap=None))]
    fn is_periodic<'py>(
        &self,
        py: Python<'py>,
        word: &str,
        n_max: u32,
        m_cap: u32,
        letter_cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let seed = self.inner.alphabet().parse_word(word).map_err(err)?;
        let cap = letter_cap.unwrap_or(DEFAULT_LETTER_CAP);
        let certificate = is_periodic_bounded(&self.inner, &seed, n_max, m_cap, cap).map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("word", &certificate.word)?;
        dict.set_item("n_checked", certificate.n_checked)?;
        dict.set_item("oracle_converged", certificate.oracle_converged)?;
        match &certificate.verdict {
            PeriodicityVerdict::Consistent => dict.set_item("verdict", "consistent")?,
            PeriodicityVerdict::Refuted { n, missing } => {
                dict.set_item("verdict", "refuted")?;
                dict.set_item("n", *n)?;
                dict.set_item("missing", missing)?;
            }
        }
        Ok(dict)
    }

    /// The full analysis as the same deterministic JSON document the CLI
    /// prints.
    #[pyo3(signature = (max_level=5, tol=0.01, psi=None, language_length=None))]
    fn analyze_json(
        &self,
        max_level: u32,
        tol: f64,
        psi: Option<Vec<f64>>,
        language_length: Option<usize>,
    ) -> PyResult<String> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(PyValueError::new_err("tol must be strictly positive"));
        }
        let options = AnalysisOptions {
            max_level,
            tolerance: tol,
            psi,
            language_length,
            ..AnalysisOptions::default()
        };
        let analysis = analyze(&self.inner, "python", &options).map_err(err)?;
        Ok(to_json(&analysis))
    }
}

/// The names of the built-in examples.
#[pyfunction]
fn catalogue_names() -> Vec<&'static str> {
    names()
}

/// Everything the catalogue records about one example.
#[pyfunction]
fn catalogue_entry<'py>(py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyDict>> {
    let entry = get_example(name).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("name", entry.name)?;
    dict.set_item("rules", entry.substitution.render_rules())?;
    match &entry.known_entropy {
        Some(known) => {
            let k = PyDict::new(py);
            k.set_item("value", known.value)?;
            k.set_item("tolerance", known.tolerance)?;
            k.set_item("note", known.note)?;
            dict.set_item("known_entropy", k)?;
        }
        None => dict.set_item("known_entropy", py.None())?,
    }
    dict.set_item(
        "recurrence_max_level",
        entry.recurrence.map(|r| r.max_level()),
    )?;
    Ok(dict)
}

/// Exact level counts from a catalogue entry's recurrence, far past what
/// enumeration can store.
#[pyfunction]
fn recurrence_counts(name: &str, level: u32) -> PyResult<Vec<BigUint>> {
    let entry = get_example(name).map_err(err)?;
    let recurrence = entry
        .recurrence
        .ok_or_else(|| PyValueError::new_err(format!("'{name}' has no count recurrence")))?;
    recurrence.counts(level).map_err(err)
}

#[pymodule]
fn randsubst_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Substitution>()?;
    m.add_function(wrap_pyfunction!(catalogue_names, m)?)?;
    m.add_function(wrap_pyfunction!(catalogue_entry, m)?)?;
    m.add_function(wrap_pyfunction!(recurrence_counts, m)?)?;
    Ok(())
}
