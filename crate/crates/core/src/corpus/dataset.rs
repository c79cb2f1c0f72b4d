use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{GroupSchema, RawTuple, Vocabulary};
use crate::error::{Error, Result};
use crate::{seeded_rng, Rng};

/// Encoded tuples. Each record holds one vocabulary index per group.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleDataset {
    schema: GroupSchema,
    records: Vec<usize>,
    counts: Vec<u64>,
    dropped: usize,
}

impl TupleDataset {
    /// Encodes raw tuples, dropping (and counting) any tuple with a word
    /// missing from its group's vocabulary.
    pub fn encode(tuples: &[RawTuple], vocab: &Vocabulary) -> Self {
        let arity = vocab.schema().arity();
        let mut records = Vec::with_capacity(tuples.len() * arity);
        let mut counts = Vec::with_capacity(tuples.len());
        let mut dropped = 0;
        let mut row = Vec::with_capacity(arity);
        for t in tuples {
            row.clear();
            let ok = t.words.len() == arity
                && t.words.iter().enumerate().all(|(g, w)| match vocab.group(g).get(w) {
                    Some(i) => {
                        row.push(i);
                        true
                    }
                    None => false,
                });
            if ok {
                records.extend_from_slice(&row);
                counts.push(t.count);
            } else {
                dropped += 1;
            }
        }
        Self {
            schema: vocab.schema().clone(),
            records,
            counts,
            dropped,
        }
    }

    /// Builds a dataset from already-encoded rows, checking every index.
    pub fn from_records(vocab: &Vocabulary, rows: &[Vec<usize>]) -> Result<Self> {
        let schema = vocab.schema().clone();
        let mut records = Vec::with_capacity(rows.len() * schema.arity());
        for row in rows {
            if row.len() != schema.arity() {
                return Err(Error::Config(format!(
                    "record of length {} for schema {schema}",
                    row.len()
                )));
            }
            for (g, &i) in row.iter().enumerate() {
                let size = vocab.group(g).len();
                if i >= size {
                    return Err(Error::IndexOutOfRange {
                        group: schema.name(g).to_string(),
                        index: i,
                        size,
                    });
                }
            }
            records.extend_from_slice(row);
        }
        Ok(Self {
            schema,
            records,
            counts: vec![1; rows.len()],
            dropped: 0,
        })
    }

    pub fn schema(&self) -> &GroupSchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Tuples discarded during encoding.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn record(&self, i: usize) -> &[usize] {
        let n = self.schema.arity();
        &self.records[i * n..(i + 1) * n]
    }

    pub fn records(&self) -> impl Iterator<Item = &[usize]> {
        self.records.chunks_exact(self.schema.arity())
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    fn is_weighted(&self) -> bool {
        self.counts.iter().any(|&c| c != 1)
    }

    fn subset(&self, ids: &[usize]) -> Self {
        let mut records = Vec::with_capacity(ids.len() * self.schema.arity());
        let mut counts = Vec::with_capacity(ids.len());
        for &i in ids {
            records.extend_from_slice(self.record(i));
            counts.push(self.counts[i]);
        }
        Self {
            schema: self.schema.clone(),
            records,
            counts,
            dropped: 0,
        }
    }

    /// Seeded split into `(train, held_out)`; `held_out_fraction` of the
    /// records (rounded down) go to the second part.
    pub fn split(&self, held_out_fraction: f64, seed: u64) -> (Self, Self) {
        let mut ids: Vec<usize> = (0..self.len()).collect();
        ids.shuffle(&mut seeded_rng(seed, u64::MAX));
        let n_test = ((self.len() as f64) * held_out_fraction.clamp(0.0, 1.0)) as usize;
        let (test, train) = ids.split_at(n_test);
        (self.subset(train), self.subset(test))
    }

    /// Record ids visited in `epoch`.
    ///
    /// Unit multiplicities give a seeded permutation of all records. With
    /// multiplicities present, `len()` ids are drawn with replacement,
    /// proportionally to each record's count.
    pub fn epoch_order(&self, seed: u64, epoch: u64) -> Vec<usize> {
        let mut rng = seeded_rng(seed, epoch);
        if self.is_weighted() {
            let dist = WeightedIndex::new(&self.counts).expect("counts are positive");
            (0..self.len()).map(|_| dist.sample(&mut rng)).collect()
        } else {
            let mut ids: Vec<usize> = (0..self.len()).collect();
            ids.shuffle(&mut rng);
            ids
        }
    }

    /// Batches for one epoch. The final batch may be smaller than
    /// `batch_size`.
    pub fn batches(&self, batch_size: usize, seed: u64, epoch: u64) -> Batches<'_> {
        assert!(batch_size >= 1, "batch_size must be at least 1");
        Batches {
            dataset: self,
            order: self.epoch_order(seed, epoch),
            pos: 0,
            batch_size,
        }
    }

    /// The whole dataset as one batch, in storage order.
    pub fn as_batch(&self) -> Batch {
        Batch {
            arity: self.schema.arity(),
            rows: self.records.clone(),
        }
    }
}

/// A batch of full records, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    arity: usize,
    rows: Vec<usize>,
}

impl Batch {
    pub fn new(arity: usize, rows: Vec<usize>) -> Self {
        assert!(arity > 0 && rows.len() % arity == 0);
        Self { arity, rows }
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Self {
        let arity = rows.first().map_or(1, Vec::len);
        Self::new(arity, rows.concat())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r * self.arity..(r + 1) * self.arity]
    }

    pub fn column(&self, group: usize) -> Vec<usize> {
        self.rows.chunks_exact(self.arity).map(|r| r[group]).collect()
    }
}

pub struct Batches<'a> {
    dataset: &'a TupleDataset,
    order: Vec<usize>,
    pos: usize,
    batch_size: usize,
}

impl Iterator for Batches<'_> {
    type Item = Batch;

    fn next(&mut self) -> Option<Batch> {
        if self.pos >= self.order.len() {
            return None;
        }
        let end = (self.pos + self.batch_size).min(self.order.len());
        let arity = self.dataset.schema.arity();
        let mut rows = Vec::with_capacity((end - self.pos) * arity);
        for &i in &self.order[self.pos..end] {
            rows.extend_from_slice(self.dataset.record(i));
        }
        self.pos = end;
        Some(Batch { arity, rows })
    }
}

/// Replaces the `group` slot of `record` with a different index drawn
/// uniformly from that group's vocabulary.
pub fn corrupt(record: &[usize], group: usize, vocab: &Vocabulary, rng: &mut Rng) -> Result<Vec<usize>> {
    let schema = vocab.schema();
    if group >= schema.arity() {
        return Err(Error::UnknownGroup(format!("#{group}")));
    }
    let size = vocab.group(group).len();
    if size < 2 {
        return Err(Error::CannotCorrupt {
            group: schema.name(group).to_string(),
        });
    }
    let original = record[group];
    let mut draw = rng.random_range(0..size - 1);
    if draw >= original {
        draw += 1;
    }
    let mut out = record.to_vec();
    out[group] = draw;
    Ok(out)
}
