//! Python bindings: queries, corpora, search, libraries, curation and
//! citation metrics. Built as the `_native` extension of the `livebib`
//! Python package; records and reports cross the boundary as plain dicts.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use livebib::corpus::{explain_match, load_corpus, load_corpus_file, LibraryResolver, NoLibraries};
use livebib::curation::{DecisionLog, DecisionSource};
use livebib::metrics::{render_report, ReportFormat};
use livebib::presets::Preset;
use livebib::{
    build_index, citation_table, evaluate, normalize, parse, serialize, validate, BibRecord,
    CurationLibraries, DecisionInput, QueryNode, RubricTag, SetOp, Verdict,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyTuple};

create_exception!(
    _native,
    LivebibError,
    PyException,
    "Raised for any failed livebib operation."
);

fn err(e: impl std::fmt::Display) -> PyErr {
    LivebibError::new_err(e.to_string())
}

/// Converts any serializable value into nested Python dicts and lists.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(err)?;
    json_to_py(py, &v)
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (None, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

/// A parsed query.
#[pyclass(frozen, eq, skip_from_py_object, module = "livebib")]
#[derive(Clone, PartialEq)]
pub struct Query {
    node: QueryNode,
}

#[pymethods]
impl Query {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse(text).map(|node| Query { node }).map_err(err)
    }

    /// One of the shipped presets: `strict` or `broad`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let p = Preset::from_name(name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name}")))?;
        Ok(Query {
            node: p.query().map_err(err)?,
        })
    }

    fn normalize(&self) -> Query {
        Query {
            node: normalize(&self.node),
        }
    }

    /// Structural problems, as short descriptions.
    fn validate(&self) -> Vec<String> {
        validate(&self.node)
            .into_iter()
            .map(|i| format!("{:?}: {:?}", i.severity, i.kind))
            .collect()
    }

    /// Library keys referenced by `docs(library/KEY)`.
    fn library_keys(&self) -> Vec<String> {
        self.node
            .docs_refs()
            .into_iter()
            .map(String::from)
            .collect()
    }

    fn restrict_years(&self, first: u16, last: u16) -> Query {
        Query {
            node: self.node.clone().restrict_years(first, last),
        }
    }

    fn __str__(&self) -> String {
        serialize(&self.node)
    }

    fn __repr__(&self) -> String {
        format!("Query({:?})", serialize(&self.node))
    }
}

/// An immutable set of bibliographic records.
#[pyclass(frozen, module = "livebib")]
pub struct Corpus {
    inner: livebib::Corpus,
}

#[pymethods]
impl Corpus {
    /// Reads a JSON-lines file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        load_corpus_file(path)
            .map(|inner| Corpus { inner })
            .map_err(err)
    }

    /// Parses JSON-lines text.
    #[staticmethod]
    fn from_jsonl(text: &str) -> PyResult<Self> {
        load_corpus(text.as_bytes())
            .map(|inner| Corpus { inner })
            .map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, bibcode: &str) -> bool {
        self.inner.contains(bibcode)
    }

    fn bibcodes(&self) -> Vec<String> {
        self.inner
            .records()
            .iter()
            .map(|r| r.bibcode.clone())
            .collect()
    }

    /// The record as a dict, or None.
    fn get<'py>(&self, py: Python<'py>, bibcode: &str) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.inner.get(bibcode).map(|r| to_py(py, r)).transpose()
    }

    fn warnings(&self) -> Vec<String> {
        self.inner.warnings().to_vec()
    }
}

/// Search index over a copy of a corpus.
#[pyclass(frozen, module = "livebib")]
pub struct Index {
    inner: Arc<livebib::Index>,
}

fn with_resolver<T>(
    catalog: Option<PyRef<'_, Catalog>>,
    f: impl FnOnce(&dyn LibraryResolver) -> T,
) -> T {
    match catalog {
        Some(c) => f(&c.inner),
        None => f(&NoLibraries),
    }
}

#[pymethods]
impl Index {
    #[new]
    fn new(corpus: &Corpus) -> Self {
        Index {
            inner: Arc::new(build_index(corpus.inner.clone())),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Matching bibcodes, newest first. `docs(...)` and `bibgroup:`
    /// terms resolve against `catalog`.
    #[pyo3(signature = (query, catalog=None))]
    fn search(&self, query: &Query, catalog: Option<PyRef<'_, Catalog>>) -> PyResult<Vec<String>> {
        with_resolver(catalog, |r| evaluate(&query.node, &self.inner, r))
            .map(|res| res.hits)
            .map_err(err)
    }

    /// Token occurrences that made `bibcode` a hit, as dicts.
    #[pyo3(signature = (bibcode, query, catalog=None))]
    fn explain<'py>(
        &self,
        py: Python<'py>,
        bibcode: &str,
        query: &Query,
        catalog: Option<PyRef<'_, Catalog>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let why = with_resolver(catalog, |r| {
            explain_match(bibcode, &query.node, &self.inner, r)
        })
        .map_err(err)?;
        to_py(py, &why)
    }
}

/// Named sets of bibcodes with an audit trail.
#[pyclass(skip_from_py_object, module = "livebib")]
#[derive(Clone)]
pub struct Catalog {
    inner: livebib::Catalog,
}

#[pymethods]
impl Catalog {
    #[new]
    fn new() -> Self {
        Catalog {
            inner: livebib::Catalog::new(),
        }
    }

    /// Creates a library and returns its key.
    #[pyo3(signature = (name, key=None, description=""))]
    fn create_library(
        &mut self,
        name: &str,
        key: Option<&str>,
        description: &str,
    ) -> PyResult<String> {
        match key {
            Some(k) => self
                .inner
                .create_library_with_key(k, name, description)
                .map(|_| k.to_string())
                .map_err(err),
            None => self.inner.create_library(name, description).map_err(err),
        }
    }

    fn add_members(&mut self, key: &str, bibcodes: Vec<String>) -> PyResult<usize> {
        self.inner.add_members(key, bibcodes).map_err(err)
    }

    fn remove_members(&mut self, key: &str, bibcodes: Vec<String>) -> PyResult<usize> {
        self.inner.remove_members(key, bibcodes).map_err(err)
    }

    fn members(&self, key: &str) -> PyResult<BTreeSet<String>> {
        self.inner.members(key).cloned().map_err(err)
    }

    /// `union`, `intersection` or `difference`.
    fn set_op(&self, op: &str, a: &str, b: &str) -> PyResult<BTreeSet<String>> {
        let op = SetOp::parse(op)
            .ok_or_else(|| PyValueError::new_err(format!("unknown set operation {op}")))?;
        self.inner.set_op(op, a, b).map_err(err)
    }

    fn set_exclusive(&mut self, a: &str, b: &str) -> PyResult<()> {
        self.inner.set_exclusive(a, b).map_err(err)
    }

    /// `(key, name, size)` for every library.
    fn libraries(&self) -> Vec<(String, String, usize)> {
        self.inner
            .libraries()
            .map(|l| (l.key.clone(), l.name.clone(), l.members.len()))
            .collect()
    }

    fn audit_len(&self) -> usize {
        self.inner.audit().len()
    }

    fn to_json(&self) -> String {
        self.inner.to_snapshot_string()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        livebib::Catalog::from_snapshot_str(text)
            .map(|inner| Catalog { inner })
            .map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.snapshot(path).map_err(err)
    }

    #[staticmethod]
    fn restore(path: PathBuf) -> PyResult<Self> {
        livebib::Catalog::restore(path)
            .map(|inner| Catalog { inner })
            .map_err(err)
    }
}

fn verdict(s: &str) -> PyResult<Verdict> {
    s.parse()
        .map_err(|_| PyValueError::new_err(format!("unknown verdict {s}")))
}

fn decision_input(bibcode: &str, v: &str, tags: &[String], note: &str) -> PyResult<DecisionInput> {
    let mut input = DecisionInput::new(bibcode, verdict(v)?).note(note);
    for t in tags {
        let tag: RubricTag = t
            .parse()
            .map_err(|_| PyValueError::new_err(format!("unknown rubric tag {t}")))?;
        input = input.tag(tag);
    }
    Ok(input)
}

/// Adapts a Python callable to a decision source. The callable receives
/// the record dict and returns None, a verdict string, or a
/// `(verdict, tags, note)` tuple.
struct PySource<'py> {
    py: Python<'py>,
    labeler: Bound<'py, PyAny>,
    error: Option<PyErr>,
}

impl PySource<'_> {
    fn ask(&self, record: &BibRecord) -> PyResult<Option<DecisionInput>> {
        let answer = self.labeler.call1((to_py(self.py, record)?,))?;
        if answer.is_none() {
            return Ok(None);
        }
        if let Ok(v) = answer.extract::<String>() {
            return decision_input(&record.bibcode, &v, &[], "").map(Some);
        }
        let t = answer.cast::<PyTuple>()?;
        let (v, tags, note): (String, Vec<String>, String) = t.extract()?;
        decision_input(&record.bibcode, &v, &tags, &note).map(Some)
    }
}

impl DecisionSource for PySource<'_> {
    fn decide(&mut self, record: &BibRecord) -> Option<DecisionInput> {
        if self.error.is_some() {
            return None;
        }
        match self.ask(record) {
            Ok(d) => d,
            Err(e) => {
                self.error = Some(e);
                None
            }
        }
    }
}

/// The relevant/irrelevant curation of one catalog.
#[pyclass(module = "livebib")]
pub struct Curation {
    inner: livebib::Curation,
}

#[pymethods]
impl Curation {
    /// Copies `catalog`; decisions are appended to `log_path` when given.
    #[new]
    #[pyo3(signature = (catalog, relevant, irrelevant, curator="python", log_path=None))]
    fn new(
        catalog: &Catalog,
        relevant: &str,
        irrelevant: &str,
        curator: &str,
        log_path: Option<PathBuf>,
    ) -> PyResult<Self> {
        let log = match log_path {
            Some(p) => DecisionLog::open(p).map_err(err)?,
            None => DecisionLog::in_memory(),
        };
        let libs = CurationLibraries {
            relevant: relevant.into(),
            irrelevant: irrelevant.into(),
            staging: None,
        };
        livebib::Curation::new(catalog.inner.clone(), log, libs, curator)
            .map(|inner| Curation { inner })
            .map_err(err)
    }

    /// Records a verdict and returns the new sequence number.
    #[pyo3(signature = (bibcode, verdict, tags=Vec::new(), note=""))]
    fn decide(
        &mut self,
        bibcode: &str,
        verdict: &str,
        tags: Vec<String>,
        note: &str,
    ) -> PyResult<u64> {
        let input = decision_input(bibcode, verdict, &tags, note)?;
        self.inner.decide(input).map_err(err)
    }

    fn undo(&mut self, bibcode: &str) -> PyResult<u64> {
        self.inner.undo(bibcode).map_err(err)
    }

    fn seq(&self) -> u64 {
        self.inner.seq()
    }

    fn relevant(&self) -> BTreeSet<String> {
        self.inner.relevant_members().clone()
    }

    fn irrelevant(&self) -> BTreeSet<String> {
        self.inner.irrelevant_members().clone()
    }

    /// A copy of the current catalog.
    fn catalog(&self) -> Catalog {
        Catalog {
            inner: self.inner.catalog().clone(),
        }
    }

    /// Hits of `query` not yet classified.
    fn residual(&self, query: &Query, index: &Index) -> PyResult<Vec<String>> {
        self.inner.residual(&query.node, &index.inner).map_err(err)
    }

    /// Classifies hits with `labeler` until nothing new appears; returns
    /// the cycle report as a dict.
    fn run_update_cycle<'py>(
        &mut self,
        py: Python<'py>,
        query: &Query,
        index: &Index,
        labeler: Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut source = PySource {
            py,
            labeler,
            error: None,
        };
        let result = self
            .inner
            .run_update_cycle(&query.node, &index.inner, &mut source);
        if let Some(e) = source.error {
            return Err(e);
        }
        to_py(py, &result.map_err(err)?)
    }
}

fn bibcode_set(members: &Bound<'_, PyAny>) -> PyResult<BTreeSet<String>> {
    members
        .try_iter()?
        .map(|b| b?.extract::<String>())
        .collect()
}

/// The citation table of `members` as a dict with `totals` and `refereed`.
#[pyfunction(name = "citation_table")]
fn py_citation_table<'py>(
    py: Python<'py>,
    members: &Bound<'py, PyAny>,
    corpus: &Corpus,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &citation_table(&bibcode_set(members)?, &corpus.inner))
}

/// The citation table rendered as `markdown`, `csv` or `json`.
#[pyfunction(name = "render_report")]
#[pyo3(signature = (members, corpus, format="markdown"))]
fn py_render_report(members: &Bound<'_, PyAny>, corpus: &Corpus, format: &str) -> PyResult<String> {
    let f = ReportFormat::parse(format)
        .ok_or_else(|| PyValueError::new_err(format!("unknown format {format}")))?;
    Ok(render_report(
        &citation_table(&bibcode_set(members)?, &corpus.inner),
        f,
    ))
}

/// Index tokens of `text`, including joined hyphen forms.
#[pyfunction(name = "tokenize")]
fn py_tokenize(text: &str) -> Vec<String> {
    livebib::tokenize(text)
        .into_iter()
        .map(|t| t.text)
        .collect()
}

/// Acronyms a non-exact phrase also matches.
#[pyfunction(name = "acronyms")]
fn py_acronyms(phrase: &str) -> Vec<String> {
    livebib::corpus::acronyms(&livebib::corpus::parts(phrase))
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LivebibError", m.py().get_type::<LivebibError>())?;
    m.add_class::<Query>()?;
    m.add_class::<Corpus>()?;
    m.add_class::<Index>()?;
    m.add_class::<Catalog>()?;
    m.add_class::<Curation>()?;
    m.add_function(wrap_pyfunction!(py_citation_table, m)?)?;
    m.add_function(wrap_pyfunction!(py_render_report, m)?)?;
    m.add_function(wrap_pyfunction!(py_tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(py_acronyms, m)?)?;
    m.add("PRESET_STRICT", livebib::presets::PRESET_STRICT)?;
    m.add("PRESET_BROAD", livebib::presets::PRESET_BROAD)?;
    Ok(())
}
