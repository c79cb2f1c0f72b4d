//! Tuple corpora: loading, vocabularies, encoded datasets and synthetic data.
//!
//! A corpus file holds one record per line, `N` tab-separated words followed
//! by an optional integer multiplicity:
//!
//! ```text
//! people	have	place	12
//! cat	eat	food
//! ```

mod dataset;
mod load;
mod synthetic;
mod vocab;

pub use dataset::{corrupt, Batch, Batches, TupleDataset};
pub use load::{load_tuples, parse_tuples, LoadedTuples, RawTuple, Rejection};
pub use synthetic::{
    gen_synthetic_assignment, gen_synthetic_svo, AssignmentMode, CompatibilityTable,
    PlausibilityOracle, SvoGenerator, SyntheticAssignment, SyntheticSvo,
};
pub use vocab::{GroupVocab, Vocabulary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered group labels, e.g. `["S", "V", "O"]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSchema {
    names: Vec<String>,
}

impl GroupSchema {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(Error::Config(format!(
                "a schema needs at least two groups, got {}",
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::Config("group labels must be non-empty".into()));
            }
            if names[..i].contains(name) {
                return Err(Error::Config(format!("duplicate group label {name:?}")));
            }
        }
        Ok(Self { names })
    }

    /// Parses a comma-separated list such as `S,V,O`.
    pub fn parse(list: &str) -> Result<Self> {
        Self::new(list.split(',').map(str::trim))
    }

    pub fn arity(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, group: usize) -> &str {
        &self.names[group]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == label)
            .ok_or_else(|| Error::UnknownGroup(label.to_string()))
    }
}

impl std::fmt::Display for GroupSchema {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schema_rejects_duplicates_and_empties() {
        assert!(GroupSchema::parse("S,V,O").is_ok());
        assert!(GroupSchema::parse("S,S").is_err());
        assert!(GroupSchema::parse("S,,O").is_err());
        assert!(GroupSchema::parse("S").is_err());
    }

    #[test]
    fn schema_lookup() {
        let schema = GroupSchema::parse("S,V,O,iO").unwrap();
        assert_eq!(schema.arity(), 4);
        assert_eq!(schema.index_of("iO").unwrap(), 3);
        assert!(matches!(schema.index_of("X"), Err(Error::UnknownGroup(_))));
        assert_eq!(schema.to_string(), "S,V,O,iO");
    }
}
