use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{GroupSchema, RawTuple};
use crate::error::{Error, Result};

/// Word/index map for a single group.
///
/// Indices are dense and ordered by descending count, ties broken
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupVocabRepr", into = "GroupVocabRepr")]
pub struct GroupVocab {
    label: String,
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct GroupVocabRepr {
    label: String,
    words: Vec<String>,
    counts: Vec<u64>,
}

impl TryFrom<GroupVocabRepr> for GroupVocab {
    type Error = String;

    fn try_from(r: GroupVocabRepr) -> std::result::Result<Self, String> {
        if r.words.len() != r.counts.len() {
            return Err(format!("group {}: words and counts differ in length", r.label));
        }
        GroupVocab::from_sorted(r.label, r.words, r.counts).map_err(|e| e.to_string())
    }
}

impl From<GroupVocab> for GroupVocabRepr {
    fn from(v: GroupVocab) -> Self {
        Self {
            label: v.label,
            words: v.words,
            counts: v.counts,
        }
    }
}

impl GroupVocab {
    /// Builds from `(word, count)` pairs, sorting them into index order.
    pub fn from_counts(label: impl Into<String>, mut entries: Vec<(String, u64)>) -> Result<Self> {
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (words, counts) = entries.into_iter().unzip();
        Self::from_sorted(label.into(), words, counts)
    }

    fn from_sorted(label: String, words: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Config(format!("group {label}: duplicate word {w:?}")));
            }
        }
        Ok(Self {
            label,
            words,
            counts,
            index,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn lookup(&self, word: &str) -> Result<usize> {
        self.get(word).ok_or_else(|| Error::Lookup {
            word: word.to_string(),
            group: self.label.clone(),
        })
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Per-group vocabularies. The same surface form may appear in several
/// groups; each occurrence has its own independent index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    schema: GroupSchema,
    groups: Vec<GroupVocab>,
    min_count: u64,
}

impl Vocabulary {
    /// Counts words per group (weighted by tuple multiplicity) and keeps
    /// those seen at least `min_count` times.
    pub fn build(schema: &GroupSchema, tuples: &[RawTuple], min_count: u64) -> Result<Self> {
        if min_count == 0 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }
        let mut tallies: Vec<HashMap<&str, u64>> = vec![HashMap::new(); schema.arity()];
        for t in tuples {
            if t.words.len() != schema.arity() {
                return Err(Error::Config(format!(
                    "tuple {:?} does not match schema {schema}",
                    t.words
                )));
            }
            for (tally, w) in tallies.iter_mut().zip(&t.words) {
                *tally.entry(w.as_str()).or_default() += t.count;
            }
        }

        let mut groups = Vec::with_capacity(schema.arity());
        for (g, tally) in tallies.into_iter().enumerate() {
            let kept: Vec<(String, u64)> = tally
                .into_iter()
                .filter(|&(_, c)| c >= min_count)
                .map(|(w, c)| (w.to_string(), c))
                .collect();
            if kept.is_empty() {
                return Err(Error::EmptyVocabulary {
                    group: schema.name(g).to_string(),
                });
            }
            groups.push(GroupVocab::from_counts(schema.name(g), kept)?);
        }
        Ok(Self {
            schema: schema.clone(),
            groups,
            min_count,
        })
    }

    pub fn from_groups(schema: GroupSchema, groups: Vec<GroupVocab>, min_count: u64) -> Result<Self> {
        if groups.len() != schema.arity() {
            return Err(Error::Config(format!(
                "{} group vocabularies for schema {schema}",
                groups.len()
            )));
        }
        for (g, v) in groups.iter().enumerate() {
            if v.label() != schema.name(g) {
                return Err(Error::Config(format!(
                    "vocabulary {} in slot of group {}",
                    v.label(),
                    schema.name(g)
                )));
            }
            if v.is_empty() {
                return Err(Error::EmptyVocabulary {
                    group: v.label().to_string(),
                });
            }
        }
        Ok(Self {
            schema,
            groups,
            min_count,
        })
    }

    pub fn schema(&self) -> &GroupSchema {
        &self.schema
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn group(&self, g: usize) -> &GroupVocab {
        &self.groups[g]
    }

    pub fn group_by_label(&self, label: &str) -> Result<&GroupVocab> {
        Ok(&self.groups[self.schema.index_of(label)?])
    }

    pub fn groups(&self) -> &[GroupVocab] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(GroupVocab::len).collect()
    }

    /// Writes `<dir>/<label>.vocab.tsv` for every group, one `word<TAB>count`
    /// line per entry in index order.
    pub fn write_dump(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths = Vec::new();
        for v in &self.groups {
            let path = dir.join(format!("{}.vocab.tsv", v.label()));
            let mut buf = Vec::new();
            for (w, c) in v.words.iter().zip(&v.counts) {
                writeln!(buf, "{w}\t{c}").expect("write to Vec");
            }
            fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
            paths.push(path);
        }
        Ok(paths)
    }
}
