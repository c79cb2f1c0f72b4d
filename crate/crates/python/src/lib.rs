//! Python bindings for `funcspace-core`.

use std::path::PathBuf;

use funcspace_core::cli::export_vectors;
use funcspace_core::compose::{self, Composed, CompositionKind, EventRecord};
use funcspace_core::corpus::{self, GroupSchema, RawTuple, TupleDataset, Vocabulary};
use funcspace_core::eval;
use funcspace_core::model::{Checkpoint, FrozenModel, TrainConfig, Trainer};
use funcspace_core::Error;
use ndarray::Array1;
use pyo3::exceptions::{PyKeyError, PyOSError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Lookup { .. } | Error::UnknownGroup(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn kind(name: &str) -> PyResult<CompositionKind> {
    name.parse().map_err(py_err)
}

#[derive(IntoPyObject)]
enum ComposedOut {
    Vector(Vec<f64>),
    Scalar(f64),
}

impl From<Composed> for ComposedOut {
    fn from(c: Composed) -> Self {
        match c {
            Composed::Vector(v) => ComposedOut::Vector(v.to_vec()),
            Composed::Scalar(s) => ComposedOut::Scalar(s),
        }
    }
}

/// A trained function-specific space plus its optimizer state.
#[pyclass(name = "Model", module = "funcspace")]
struct PyModel {
    trainer: Trainer,
    frozen: FrozenModel,
}

impl PyModel {
    fn new(trainer: Trainer) -> Self {
        let frozen = trainer.model.frozen();
        Self { trainer, frozen }
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    dim: usize,
    epochs: u64,
    batch_size: usize,
    learning_rate: f64,
    schedule: &str,
    sharing: &str,
    seed: u64,
) -> PyResult<TrainConfig> {
    let c = TrainConfig {
        dim,
        epochs,
        batch_size,
        learning_rate,
        schedule: schedule.parse().map_err(py_err)?,
        sharing: sharing.parse().map_err(py_err)?,
        seed,
        ..TrainConfig::default()
    };
    c.validate().map_err(py_err)?;
    Ok(c)
}

#[pymethods]
impl PyModel {
    /// Trains on in-memory tuples, one word per group plus an optional count.
    #[staticmethod]
    #[pyo3(signature = (tuples, groups = "S,V,O", dim = 25, epochs = 10, batch_size = 128, learning_rate = 0.001, schedule = "sync", sharing = "shared", seed = 1, min_count = 1))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        tuples: Vec<Vec<String>>,
        groups: &str,
        dim: usize,
        epochs: u64,
        batch_size: usize,
        learning_rate: f64,
        schedule: &str,
        sharing: &str,
        seed: u64,
        min_count: u64,
    ) -> PyResult<Self> {
        let schema = GroupSchema::parse(groups).map_err(py_err)?;
        let n = schema.arity();
        let mut raw = Vec::with_capacity(tuples.len());
        for t in tuples {
            let count = match t.len() {
                l if l == n => 1,
                l if l == n + 1 => t[n]
                    .parse()
                    .map_err(|_| PyValueError::new_err(format!("bad count {:?}", t[n])))?,
                l => return Err(PyValueError::new_err(format!("expected {n} or {} fields, got {l}", n + 1))),
            };
            raw.push(RawTuple::new(t.into_iter().take(n), count));
        }
        let vocab = Vocabulary::build(&schema, &raw, min_count).map_err(py_err)?;
        let dataset = TupleDataset::encode(&raw, &vocab);
        let cfg = config(dim, epochs, batch_size, learning_rate, schedule, sharing, seed)?;
        let mut trainer = Trainer::new(vocab, cfg).map_err(py_err)?;
        trainer.run(&dataset).map_err(py_err)?;
        Ok(Self::new(trainer))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self::new(Checkpoint::load(&path).map_err(py_err)?))
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        Checkpoint::save(&self.trainer, &path).map_err(py_err)
    }

    /// Writes one text vector file per group into `directory`.
    fn export(&self, directory: PathBuf) -> PyResult<Vec<PathBuf>> {
        export_vectors(&self.frozen, &directory).map_err(py_err)
    }

    #[getter]
    fn groups(&self) -> Vec<String> {
        self.frozen.schema().names().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.frozen.dim()
    }

    #[getter]
    fn epochs_completed(&self) -> u64 {
        self.trainer.epochs_completed
    }

    /// Include bias terms in plausibility scores.
    #[getter]
    fn use_bias(&self) -> bool {
        self.frozen.use_bias
    }

    #[setter]
    fn set_use_bias(&mut self, value: bool) {
        self.frozen.use_bias = value;
    }

    fn vocab(&self, group: &str) -> PyResult<Vec<String>> {
        let g = self.frozen.schema().index_of(group).map_err(py_err)?;
        Ok(self.frozen.vocab().group(g).words().to_vec())
    }

    fn vector(&self, group: &str, word: &str) -> PyResult<Vec<f64>> {
        Ok(self.frozen.vector_of(group, word).map_err(py_err)?.to_vec())
    }

    fn pair_logit(&self, group_i: &str, word_i: &str, group_j: &str, word_j: &str) -> PyResult<f64> {
        self.frozen
            .pair_logit_words(group_i, word_i, group_j, word_j)
            .map_err(py_err)
    }

    fn plausibility(&self, s: &str, v: &str, o: &str) -> PyResult<f64> {
        self.frozen.triplet_plausibility(s, v, o).map_err(py_err)
    }

    /// `(word, group, cosine)` triples, most similar first.
    #[pyo3(signature = (word, group, targets = None, k = 10))]
    fn nearest(&self, word: &str, group: &str, targets: Option<Vec<String>>, k: usize) -> PyResult<Vec<(String, String, f64)>> {
        let targets = targets.unwrap_or_else(|| vec![group.to_string()]);
        let refs: Vec<&str> = targets.iter().map(String::as_str).collect();
        let found = eval::nearest_neighbors_multi(&self.frozen, word, group, &refs, k).map_err(py_err)?;
        Ok(found.into_iter().map(|n| (n.word, n.group, n.score)).collect())
    }

    /// A composed event: a list for vector kinds, a float for `network`.
    fn compose(&self, s: &str, v: &str, o: &str, kind_name: &str) -> PyResult<ComposedOut> {
        let event = EventRecord::new(s, v, o);
        Ok(compose::compose_event(&self.frozen, &event, kind(kind_name)?)
            .map_err(py_err)?
            .into())
    }

    fn event_similarity(&self, a: (String, String, String), b: (String, String, String), kind_name: &str) -> PyResult<f64> {
        let a = EventRecord::new(a.0, a.1, a.2);
        let b = EventRecord::new(b.0, b.1, b.2);
        compose::event_similarity_score(&self.frozen, &a, &b, kind(kind_name)?).map_err(py_err)
    }

    /// Accuracy of scoring each tuple above one corruption per listed group.
    #[pyo3(signature = (tuples, corrupt = None, seed = 1))]
    fn pseudo_disambiguation(&self, tuples: Vec<Vec<String>>, corrupt: Option<Vec<String>>, seed: u64) -> PyResult<f64> {
        let schema = self.frozen.schema();
        let raw: Vec<RawTuple> = tuples.into_iter().map(|t| RawTuple::new(t, 1)).collect();
        if let Some(bad) = raw.iter().find(|t| t.words.len() != schema.arity()) {
            return Err(PyValueError::new_err(format!("expected {} words, got {:?}", schema.arity(), bad.words)));
        }
        let test = TupleDataset::encode(&raw, self.frozen.vocab());
        let roles = match corrupt {
            None => (0..schema.arity()).collect(),
            Some(labels) => labels
                .iter()
                .map(|l| schema.index_of(l))
                .collect::<Result<Vec<_>, _>>()
                .map_err(py_err)?,
        };
        Ok(eval::pseudo_disambiguation(&self.frozen, &test, &roles, seed)
            .map_err(py_err)?
            .value)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(groups={}, dim={}, sharing={}, epochs={})",
            self.frozen.schema(),
            self.frozen.dim(),
            self.trainer.model.sharing(),
            self.trainer.epochs_completed
        )
    }
}

/// Spearman's rho with average ranks for ties.
#[pyfunction]
fn spearman(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    eval::spearman(&x, &y).map_err(py_err)
}

#[pyfunction]
fn cosine(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    if u.len() != v.len() {
        return Err(PyValueError::new_err("vectors differ in length"));
    }
    Ok(eval::cosine(Array1::from(u).view(), Array1::from(v).view()))
}

/// Composes raw S, V, O vectors; `network` is not available here.
#[pyfunction]
fn compose_vectors(s: Vec<f64>, v: Vec<f64>, o: Vec<f64>, kind_name: &str) -> PyResult<Vec<f64>> {
    if s.len() != v.len() || v.len() != o.len() {
        return Err(PyValueError::new_err("vectors differ in length"));
    }
    let (s, v, o) = (Array1::from(s), Array1::from(v), Array1::from(o));
    compose::compose_vectors(s.view(), v.view(), o.view(), kind(kind_name)?)
        .map(|x| x.to_vec())
        .ok_or_else(|| PyValueError::new_err("network composition needs a model"))
}

/// Synthetic S/V/O tuples `[s, v, o, count]` and the oracle's verdict for
/// every word triple is available through `plausible`.
#[pyclass(name = "SyntheticSvo", module = "funcspace")]
struct PySyntheticSvo {
    inner: corpus::SyntheticSvo,
}

#[pymethods]
impl PySyntheticSvo {
    #[getter]
    fn tuples(&self) -> Vec<(String, String, String, u64)> {
        self.inner
            .tuples
            .iter()
            .map(|t| (t.words[0].clone(), t.words[1].clone(), t.words[2].clone(), t.count))
            .collect()
    }

    fn plausible(&self, s: &str, v: &str, o: &str) -> bool {
        self.inner.oracle.plausible(s, v, o)
    }
}

#[pyfunction]
fn gen_synthetic_svo(n_s: usize, n_v: usize, n_o: usize, k: usize, n_records: usize, seed: u64) -> PyResult<PySyntheticSvo> {
    Ok(PySyntheticSvo {
        inner: corpus::gen_synthetic_svo(n_s, n_v, n_o, k, n_records, seed).map_err(py_err)?,
    })
}

/// `(item_words, cluster_of_each_item)` for an n:1 assignment.
#[pyfunction]
fn gen_synthetic_assignment(n_items: usize, k_clusters: usize, seed: u64) -> PyResult<(Vec<String>, Vec<usize>)> {
    let a = corpus::gen_synthetic_assignment(n_items, k_clusters, seed, corpus::AssignmentMode::Uniform)
        .map_err(py_err)?;
    Ok((a.item_words, a.assignment))
}

#[pymodule]
fn funcspace(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PySyntheticSvo>()?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(compose_vectors, m)?)?;
    m.add_function(wrap_pyfunction!(gen_synthetic_svo, m)?)?;
    m.add_function(wrap_pyfunction!(gen_synthetic_assignment, m)?)?;
    m.add(
        "COMPOSITIONS",
        CompositionKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>(),
    )?;
    Ok(())
}
