//! JSON checkpoints.
//!
//! A checkpoint stores the format tag and version, the group schema, every
//! group vocabulary, the training configuration (including regime flags), the
//! parameters as row-major arrays and the Adam state. Floats are written in
//! shortest round-trip form, so loading reproduces every value bit for bit.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{AdamState, JointModel, Params, Sharing, TrainConfig, Trainer};
use crate::corpus::{GroupSchema, Vocabulary};
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "funcspace-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Stored {
    format: String,
    version: u32,
    schema: GroupSchema,
    dim: usize,
    sharing: Sharing,
    epochs_completed: u64,
    config: TrainConfig,
    vocab: Vocabulary,
    params: StoredParams,
    adam: StoredAdam,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredParams {
    embeddings: Vec<StoredMatrix>,
    biases: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredAdam {
    t: u64,
    m: StoredParams,
    v: StoredParams,
}

impl From<&Params> for StoredParams {
    fn from(p: &Params) -> Self {
        Self {
            embeddings: p
                .embeddings
                .iter()
                .map(|e| StoredMatrix {
                    rows: e.nrows(),
                    cols: e.ncols(),
                    data: e.iter().copied().collect(),
                })
                .collect(),
            biases: p.biases.iter().map(|b| b.to_vec()).collect(),
        }
    }
}

impl TryFrom<StoredParams> for Params {
    type Error = Error;

    fn try_from(s: StoredParams) -> Result<Self> {
        let embeddings = s
            .embeddings
            .into_iter()
            .map(|m| {
                Array2::from_shape_vec((m.rows, m.cols), m.data)
                    .map_err(|e| Error::Checkpoint(format!("bad matrix shape: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Params {
            embeddings,
            biases: s.biases.into_iter().map(Array1::from).collect(),
        })
    }
}

pub struct Checkpoint;

impl Checkpoint {
    pub fn to_json(trainer: &Trainer) -> String {
        let stored = Stored {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            schema: trainer.model.schema().clone(),
            dim: trainer.model.dim(),
            sharing: trainer.model.sharing(),
            epochs_completed: trainer.epochs_completed,
            config: trainer.config.clone(),
            vocab: trainer.model.vocab().clone(),
            params: trainer.model.params().into(),
            adam: StoredAdam {
                t: trainer.adam.t,
                m: (&trainer.adam.m).into(),
                v: (&trainer.adam.v).into(),
            },
        };
        serde_json::to_string(&stored).expect("parameters are finite")
    }

    pub fn from_json(text: &str) -> Result<Trainer> {
        let s: Stored = serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if s.format != CHECKPOINT_FORMAT {
            return Err(Error::Checkpoint(format!("unknown format {:?}", s.format)));
        }
        if s.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "version {} is not supported (expected {CHECKPOINT_VERSION})",
                s.version
            )));
        }
        if &s.schema != s.vocab.schema() {
            return Err(Error::Checkpoint(format!(
                "schema {} does not match vocabulary schema {}",
                s.schema,
                s.vocab.schema()
            )));
        }
        if s.dim != s.config.dim || s.sharing != s.config.sharing {
            return Err(Error::Checkpoint(format!(
                "stored d = {} / {} disagrees with config d = {} / {}",
                s.dim, s.sharing, s.config.dim, s.config.sharing
            )));
        }
        let params = Params::try_from(s.params)?;
        let model = JointModel::from_parts(s.vocab, s.dim, s.sharing, params)?;
        let adam = AdamState {
            m: s.adam.m.try_into()?,
            v: s.adam.v.try_into()?,
            t: s.adam.t,
        };
        if !adam.m.same_shape(model.params()) || !adam.v.same_shape(model.params()) {
            return Err(Error::Checkpoint("optimizer state does not match parameters".into()));
        }
        Ok(Trainer {
            model,
            adam,
            config: s.config,
            epochs_completed: s.epochs_completed,
        })
    }

    pub fn save(trainer: &Trainer, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(path, Self::to_json(trainer)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Trainer> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Loads and checks that schema and dimensionality agree with `expected`.
    pub fn load_expecting(path: &Path, schema: &GroupSchema, dim: usize) -> Result<Trainer> {
        let t = Self::load(path)?;
        if t.model.schema() != schema {
            return Err(Error::Checkpoint(format!(
                "checkpoint schema {} differs from expected {schema}",
                t.model.schema()
            )));
        }
        if t.model.dim() != dim {
            return Err(Error::Checkpoint(format!(
                "checkpoint has d = {}, expected {dim}",
                t.model.dim()
            )));
        }
        Ok(t)
    }
}
