//! Synthetic corpora with known latent structure.
//!
//! Two generators live here. The assignment generator produces an `n:1`
//! pair corpus (every item belongs to exactly one cluster) for the
//! directionality experiment. The SVO generator produces triples from latent
//! word classes with a known compatibility table, so tests can check
//! plausibility judgements against ground truth.

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{GroupSchema, RawTuple, TupleDataset, Vocabulary};
use crate::error::{Error, Result};
use crate::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignmentMode {
    /// Each item picks a cluster uniformly at random.
    #[default]
    Uniform,
    /// Items are shuffled and dealt round-robin, so cluster sizes differ by
    /// at most one.
    Balanced,
}

#[derive(Debug, Clone)]
pub struct SyntheticAssignment {
    pub n_items: usize,
    pub k_clusters: usize,
    /// `assignment[item]` is the item's cluster.
    pub assignment: Vec<usize>,
    pub item_words: Vec<String>,
    pub cluster_words: Vec<String>,
}

impl SyntheticAssignment {
    pub fn schema() -> GroupSchema {
        GroupSchema::parse("A,B").expect("static schema")
    }

    /// One `(item, cluster)` pair per item.
    pub fn records(&self) -> Vec<RawTuple> {
        self.assignment
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                RawTuple::new([self.item_words[i].clone(), self.cluster_words[c].clone()], 1)
            })
            .collect()
    }

    /// Vocabulary (min count 1) and encoded dataset of the pair records.
    pub fn encode(&self) -> Result<(Vocabulary, TupleDataset)> {
        let records = self.records();
        let vocab = Vocabulary::build(&Self::schema(), &records, 1)?;
        let dataset = TupleDataset::encode(&records, &vocab);
        Ok((vocab, dataset))
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k_clusters];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

pub fn gen_synthetic_assignment(
    n_items: usize,
    k_clusters: usize,
    seed: u64,
    mode: AssignmentMode,
) -> Result<SyntheticAssignment> {
    if k_clusters < 2 || n_items < k_clusters {
        return Err(Error::Config(format!(
            "need n_items >= k_clusters >= 2, got n={n_items} k={k_clusters}"
        )));
    }
    let mut rng = seeded_rng(seed, 0);
    let assignment = match mode {
        AssignmentMode::Uniform => (0..n_items).map(|_| rng.random_range(0..k_clusters)).collect(),
        AssignmentMode::Balanced => {
            let mut items: Vec<usize> = (0..n_items).collect();
            items.shuffle(&mut rng);
            let mut a = vec![0; n_items];
            for (pos, item) in items.into_iter().enumerate() {
                a[item] = pos % k_clusters;
            }
            a
        }
    };
    let width = digits(n_items - 1);
    Ok(SyntheticAssignment {
        n_items,
        k_clusters,
        assignment,
        item_words: (0..n_items).map(|i| format!("item{i:0width$}")).collect(),
        cluster_words: (0..k_clusters).map(|c| format!("cluster{c}")).collect(),
    })
}

fn digits(mut n: usize) -> usize {
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}

/// Which latent class triples `(s, v, o)` are plausible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityTable {
    k: usize,
    allowed: Vec<bool>,
}

impl CompatibilityTable {
    /// Only same-class triples `(c, c, c)` are compatible.
    pub fn diagonal(k: usize) -> Self {
        let mut allowed = vec![false; k * k * k];
        for c in 0..k {
            allowed[(c * k + c) * k + c] = true;
        }
        Self { k, allowed }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_compatible(&self, s: usize, v: usize, o: usize) -> bool {
        self.allowed[(s * self.k + v) * self.k + o]
    }

    pub fn compatible_triples(&self) -> Vec<[usize; 3]> {
        let k = self.k;
        let mut out = Vec::new();
        for s in 0..k {
            for v in 0..k {
                for o in 0..k {
                    if self.is_compatible(s, v, o) {
                        out.push([s, v, o]);
                    }
                }
            }
        }
        out
    }
}

/// Ground-truth plausibility for a generated SVO corpus.
#[derive(Debug, Clone)]
pub struct PlausibilityOracle {
    classes: [HashMap<String, usize>; 3],
    table: CompatibilityTable,
}

impl PlausibilityOracle {
    pub fn table(&self) -> &CompatibilityTable {
        &self.table
    }

    /// Latent class of `word` in slot `group` (0 = S, 1 = V, 2 = O).
    pub fn class_of(&self, group: usize, word: &str) -> Option<usize> {
        self.classes.get(group)?.get(word).copied()
    }

    pub fn plausible(&self, s: &str, v: &str, o: &str) -> bool {
        match (self.class_of(0, s), self.class_of(1, v), self.class_of(2, o)) {
            (Some(a), Some(b), Some(c)) => self.table.is_compatible(a, b, c),
            _ => false,
        }
    }

    pub fn plausible_encoded(&self, vocab: &Vocabulary, record: &[usize]) -> bool {
        self.plausible(
            vocab.group(0).word(record[0]),
            vocab.group(1).word(record[1]),
            vocab.group(2).word(record[2]),
        )
    }
}

/// Parameters of the latent-class SVO generator.
///
/// Words are dealt into `k_latent` classes per group. Each record picks a
/// compatible class triple uniformly, then one word per slot from inside
/// that class. Within a class, the word of rank `r` (1-based) is drawn with
/// weight `r^-zipf_exponent`, giving the skewed frequencies of a real corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SvoGenerator {
    pub n_s: usize,
    pub n_v: usize,
    pub n_o: usize,
    pub k_latent: usize,
    pub n_records: usize,
    pub seed: u64,
    pub zipf_exponent: f64,
}

impl SvoGenerator {
    pub const DEFAULT_ZIPF_EXPONENT: f64 = 2.0;

    pub fn new(n_s: usize, n_v: usize, n_o: usize, k_latent: usize, n_records: usize, seed: u64) -> Self {
        Self {
            n_s,
            n_v,
            n_o,
            k_latent,
            n_records,
            seed,
            zipf_exponent: Self::DEFAULT_ZIPF_EXPONENT,
        }
    }

    pub fn generate(&self) -> Result<SyntheticSvo> {
        let k = self.k_latent;
        let sizes = [self.n_s, self.n_v, self.n_o];
        if k == 0 || sizes.iter().any(|&n| n < k) {
            return Err(Error::Config(format!(
                "need every group size >= k_latent >= 1, got sizes {sizes:?} k={k}"
            )));
        }
        if !(self.zipf_exponent >= 0.0 && self.zipf_exponent.is_finite()) {
            return Err(Error::Config("zipf_exponent must be finite and >= 0".into()));
        }
        let mut rng = seeded_rng(self.seed, 0);
        let prefixes = ["s", "v", "o"];

        // members[g][c]: word ids of class c in group g, in rank order
        let mut names: Vec<Vec<String>> = Vec::with_capacity(3);
        let mut members: Vec<Vec<Vec<usize>>> = Vec::with_capacity(3);
        let mut classes: [HashMap<String, usize>; 3] = Default::default();
        for (g, &n) in sizes.iter().enumerate() {
            let width = digits(n - 1);
            let words: Vec<String> = (0..n).map(|i| format!("{}{i:0width$}", prefixes[g])).collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut by_class = vec![Vec::new(); k];
            for (pos, w) in order.into_iter().enumerate() {
                by_class[pos % k].push(w);
                classes[g].insert(words[w].clone(), pos % k);
            }
            names.push(words);
            members.push(by_class);
        }

        let samplers: Vec<Vec<WeightedIndex<f64>>> = members
            .iter()
            .map(|by_class| {
                by_class
                    .iter()
                    .map(|m| {
                        let w = (1..=m.len()).map(|r| (r as f64).powf(-self.zipf_exponent));
                        WeightedIndex::new(w).expect("non-empty class")
                    })
                    .collect()
            })
            .collect();

        let table = CompatibilityTable::diagonal(k);
        let triples = table.compatible_triples();
        let mut tuples = Vec::with_capacity(self.n_records);
        for _ in 0..self.n_records {
            let classes_of = triples[rng.random_range(0..triples.len())];
            let words = (0..3).map(|g| {
                let c = classes_of[g];
                let pick = samplers[g][c].sample(&mut rng);
                names[g][members[g][c][pick]].clone()
            });
            tuples.push(RawTuple::new(words, 1));
        }

        let schema = GroupSchema::parse("S,V,O").expect("static schema");
        let vocab = Vocabulary::build(&schema, &tuples, 1)?;
        let dataset = TupleDataset::encode(&tuples, &vocab);
        Ok(SyntheticSvo {
            tuples,
            vocab,
            dataset,
            oracle: PlausibilityOracle { classes, table },
        })
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSvo {
    pub tuples: Vec<RawTuple>,
    pub vocab: Vocabulary,
    pub dataset: TupleDataset,
    pub oracle: PlausibilityOracle,
}

/// Latent-class SVO corpus with the default frequency skew.
pub fn gen_synthetic_svo(
    n_s: usize,
    n_v: usize,
    n_o: usize,
    k_latent: usize,
    n_records: usize,
    seed: u64,
) -> Result<SyntheticSvo> {
    SvoGenerator::new(n_s, n_v, n_o, k_latent, n_records, seed).generate()
}
