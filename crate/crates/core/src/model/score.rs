use ndarray::{Array1, Array2, ArrayView1};

use super::JointModel;
use crate::corpus::{GroupSchema, Vocabulary};
use crate::error::{Error, Result};

/// One group's read-out vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    pub label: String,
    pub matrix: Array2<f64>,
}

/// Read-only view of a trained model used for scoring and evaluation.
///
/// In `sep` mode the per-sub-network copies are averaged once here, so every
/// query sees the merged vectors.
#[derive(Debug, Clone)]
pub struct FrozenModel {
    vocab: Vocabulary,
    spaces: Vec<EmbeddingSpace>,
    /// `biases[from][to]`, empty on the diagonal
    biases: Vec<Vec<Array1<f64>>>,
    /// Whether scores include the directional bias terms.
    pub use_bias: bool,
}

impl JointModel {
    pub fn frozen(&self) -> FrozenModel {
        let n = self.schema().arity();
        let spaces = (0..n)
            .map(|g| EmbeddingSpace {
                label: self.schema().name(g).to_string(),
                matrix: self.group_matrix(g),
            })
            .collect();
        let mut biases = vec![vec![Array1::zeros(0); n]; n];
        for (mu, d) in self.directions().iter().enumerate() {
            biases[d.from][d.to] = self.bias(mu).clone();
        }
        FrozenModel {
            vocab: self.vocab().clone(),
            spaces,
            biases,
            use_bias: true,
        }
    }

    /// See [`FrozenModel::pair_logit`].
    pub fn pair_logit(&self, gi: &str, wi: &str, gj: &str, wj: &str) -> Result<f64> {
        self.frozen().pair_logit_words(gi, wi, gj, wj)
    }

    /// See [`FrozenModel::triplet_plausibility`].
    pub fn triplet_plausibility(&self, s: &str, v: &str, o: &str) -> Result<f64> {
        self.frozen().triplet_plausibility(s, v, o)
    }
}

impl FrozenModel {
    pub fn without_bias(mut self) -> Self {
        self.use_bias = false;
        self
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn schema(&self) -> &GroupSchema {
        self.vocab.schema()
    }

    pub fn dim(&self) -> usize {
        self.spaces[0].matrix.ncols()
    }

    pub fn space(&self, g: usize) -> &EmbeddingSpace {
        &self.spaces[g]
    }

    pub fn vector(&self, g: usize, index: usize) -> ArrayView1<'_, f64> {
        self.spaces[g].matrix.row(index)
    }

    /// Vector of `word` in the group labelled `group`.
    pub fn vector_of(&self, group: &str, word: &str) -> Result<ArrayView1<'_, f64>> {
        let g = self.schema().index_of(group)?;
        let i = self.vocab.group(g).lookup(word)?;
        Ok(self.vector(g, i))
    }

    /// `E_i[wi] . E_j[wj] + b_ij[wj] + b_ji[wi]`, by index.
    pub fn pair_logit(&self, gi: usize, wi: usize, gj: usize, wj: usize) -> f64 {
        let mut s = self.vector(gi, wi).dot(&self.vector(gj, wj));
        if self.use_bias {
            s += self.biases[gi][gj][wj] + self.biases[gj][gi][wi];
        }
        s
    }

    pub fn pair_logit_words(&self, gi: &str, wi: &str, gj: &str, wj: &str) -> Result<f64> {
        let (a, b) = (self.schema().index_of(gi)?, self.schema().index_of(gj)?);
        if a == b {
            return Err(Error::Unsupported(format!("pair score within one group ({gi})")));
        }
        let ia = self.vocab.group(a).lookup(wi)?;
        let ib = self.vocab.group(b).lookup(wj)?;
        Ok(self.pair_logit(a, ia, b, ib))
    }

    /// Sum of pair logits over every unordered pair of the given
    /// `(group, index)` slots.
    pub fn plausibility(&self, slots: &[(usize, usize)]) -> f64 {
        let mut total = 0.0;
        for (a, &(ga, wa)) in slots.iter().enumerate() {
            for &(gb, wb) in &slots[a + 1..] {
                total += self.pair_logit(ga, wa, gb, wb);
            }
        }
        total
    }

    /// Plausibility of a full encoded record (all groups).
    pub fn record_plausibility(&self, record: &[usize]) -> f64 {
        let slots: Vec<(usize, usize)> = record.iter().copied().enumerate().collect();
        self.plausibility(&slots)
    }

    /// `pair(S,V) + pair(V,O) + pair(S,O)` over groups labelled `S`, `V`, `O`.
    pub fn triplet_plausibility(&self, s: &str, v: &str, o: &str) -> Result<f64> {
        let slots = self.svo_slots(s, v, o)?;
        Ok(self.plausibility(&slots))
    }

    pub(crate) fn svo_slots(&self, s: &str, v: &str, o: &str) -> Result<[(usize, usize); 3]> {
        let mut out = [(0, 0); 3];
        for (slot, (label, word)) in out.iter_mut().zip([("S", s), ("V", v), ("O", o)]) {
            let g = self.schema().index_of(label)?;
            *slot = (g, self.vocab.group(g).lookup(word)?);
        }
        Ok(out)
    }
}
