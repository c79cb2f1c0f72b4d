use ndarray::{Array1, Array2, Axis};
use rand::distr::{Distribution, Uniform};

use super::{Direction, Params, Sharing};
use crate::corpus::{Batch, GroupSchema, Vocabulary};
use crate::error::{Error, Result};
use crate::seeded_rng;

/// Predictions are clamped to `[PROB_EPS, 1 - PROB_EPS]` before taking logs.
pub const PROB_EPS: f64 = 1e-7;

const INIT_STREAM: u64 = u64::MAX - 1;

/// Per-sub-network losses on one batch and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct LossBreakdown {
    pub terms: Vec<(Direction, f64)>,
    pub total: f64,
}

impl LossBreakdown {
    fn from_terms(terms: Vec<(Direction, f64)>) -> Self {
        let total = terms.iter().map(|t| t.1).sum();
        Self { terms, total }
    }
}

/// Embedding matrices plus directional biases over a fixed vocabulary.
///
/// Parameter storage is addressed through slots. With [`Sharing::Shared`]
/// slot `g` is group `g`'s only matrix, used on both the input and target
/// side of every sub-network. With [`Sharing::Sep`] each sub-network owns
/// two private slots (input copy, target copy).
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    vocab: Vocabulary,
    dim: usize,
    sharing: Sharing,
    directions: Vec<Direction>,
    /// `(input slot, target slot)` per direction
    slots: Vec<(usize, usize)>,
    slot_groups: Vec<usize>,
    params: Params,
}

impl JointModel {
    /// Embeddings uniform in `[-0.5/dim, 0.5/dim]`, biases zero.
    pub fn init(vocab: Vocabulary, dim: usize, sharing: Sharing, seed: u64) -> Result<Self> {
        let mut model = Self::zeros(vocab, dim, sharing)?;
        let half = 0.5 / dim as f64;
        let dist = Uniform::new_inclusive(-half, half).expect("finite bounds");
        let mut rng = seeded_rng(seed, INIT_STREAM);
        for e in &mut model.params.embeddings {
            e.iter_mut().for_each(|x| *x = dist.sample(&mut rng));
        }
        Ok(model)
    }

    /// All parameters zero.
    pub fn zeros(vocab: Vocabulary, dim: usize, sharing: Sharing) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dimensionality must be at least 1".into()));
        }
        let n = vocab.schema().arity();
        let directions = Direction::enumerate(n);
        let (slots, slot_groups) = match sharing {
            Sharing::Shared => (
                directions.iter().map(|d| (d.from, d.to)).collect(),
                (0..n).collect::<Vec<_>>(),
            ),
            Sharing::Sep => (
                (0..directions.len()).map(|mu| (2 * mu, 2 * mu + 1)).collect(),
                directions.iter().flat_map(|d| [d.from, d.to]).collect(),
            ),
        };
        let sizes = vocab.sizes();
        let params = Params {
            embeddings: slot_groups.iter().map(|&g| Array2::zeros((sizes[g], dim))).collect(),
            biases: directions.iter().map(|d| Array1::zeros(sizes[d.to])).collect(),
        };
        Ok(Self {
            vocab,
            dim,
            sharing,
            directions,
            slots,
            slot_groups,
            params,
        })
    }

    /// Reassembles a model from stored parameters, checking every shape.
    pub fn from_parts(vocab: Vocabulary, dim: usize, sharing: Sharing, params: Params) -> Result<Self> {
        let mut model = Self::zeros(vocab, dim, sharing)?;
        if !model.params.same_shape(&params) {
            return Err(Error::Checkpoint(format!(
                "parameter shapes do not match vocabulary sizes {:?} with d = {dim}",
                model.vocab.sizes()
            )));
        }
        if !params.all_finite() {
            return Err(Error::Checkpoint("non-finite parameter".into()));
        }
        model.params = params;
        Ok(model)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn schema(&self) -> &GroupSchema {
        self.vocab.schema()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sharing(&self) -> Sharing {
        self.sharing
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn subnet_index(&self, from: usize, to: usize) -> Option<usize> {
        self.directions.iter().position(|d| d.from == from && d.to == to)
    }

    pub fn subnet_label(&self, subnet: usize) -> String {
        self.directions[subnet].label(self.schema())
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut Params {
        &mut self.params
    }

    /// `(input slot, target slot)` of a sub-network.
    pub fn subnet_slots(&self, subnet: usize) -> (usize, usize) {
        self.slots[subnet]
    }

    pub fn slot_group(&self, slot: usize) -> usize {
        self.slot_groups[slot]
    }

    pub fn bias(&self, subnet: usize) -> &Array1<f64> {
        &self.params.biases[subnet]
    }

    /// Group `g`'s read-out matrix: the single shared matrix, or the
    /// unweighted mean of all private copies.
    pub fn group_matrix(&self, g: usize) -> Array2<f64> {
        let copies: Vec<&Array2<f64>> = self
            .slot_groups
            .iter()
            .zip(&self.params.embeddings)
            .filter(|(&sg, _)| sg == g)
            .map(|(_, e)| e)
            .collect();
        let mut sum = copies[0].clone();
        for c in &copies[1..] {
            sum += *c;
        }
        if copies.len() > 1 {
            sum /= copies.len() as f64;
        }
        sum
    }

    fn check_indices(&self, group: usize, indices: &[usize]) -> Result<()> {
        let size = self.vocab.group(group).len();
        match indices.iter().find(|&&i| i >= size) {
            Some(&index) => Err(Error::IndexOutOfRange {
                group: self.schema().name(group).to_string(),
                index,
                size,
            }),
            None => Ok(()),
        }
    }

    fn check_batch(&self, batch: &Batch) -> Result<()> {
        let n = self.schema().arity();
        if batch.arity() != n {
            return Err(Error::Config(format!(
                "batch has {} slots, schema {} has {n}",
                batch.arity(),
                self.schema()
            )));
        }
        for g in 0..n {
            self.check_indices(g, &batch.column(g))?;
        }
        Ok(())
    }

    fn logits(&self, subnet: usize, inputs: &[usize]) -> (Array2<f64>, Array2<f64>) {
        let (src, tgt) = self.slots[subnet];
        let x = self.params.embeddings[src].select(Axis(0), inputs);
        let mut z = x.dot(&self.params.embeddings[tgt].t());
        z += &self.params.biases[subnet];
        (x, z)
    }

    /// Sigmoid predictions over the whole target vocabulary, one row per input.
    pub fn forward(&self, subnet: usize, inputs: &[usize]) -> Result<Array2<f64>> {
        let d = self.directions[subnet];
        self.check_indices(d.from, inputs)?;
        let (_, z) = self.logits(subnet, inputs);
        Ok(z.mapv(sigmoid))
    }

    /// Sum of all sub-network losses on `batch`.
    pub fn joint_loss(&self, batch: &Batch) -> Result<LossBreakdown> {
        self.check_batch(batch)?;
        let mut terms = Vec::with_capacity(self.directions.len());
        for (mu, d) in self.directions.iter().enumerate() {
            let (_, z) = self.logits(mu, &batch.column(d.from));
            let p = z.mapv(sigmoid);
            let loss = bce(&p, &batch.column(d.to)).ok_or_else(|| self.numeric(mu))?;
            terms.push((*d, loss));
        }
        Ok(LossBreakdown::from_terms(terms))
    }

    /// Analytic gradient of the joint loss over all sub-networks.
    pub fn compute_grads(&self, batch: &Batch) -> Result<(LossBreakdown, Params)> {
        let all: Vec<usize> = (0..self.directions.len()).collect();
        self.loss_and_grads(batch, &all)
    }

    /// Loss terms and gradient of their sum, restricted to `subnets`.
    ///
    /// For the sigmoid/BCE head the derivative with respect to each logit is
    /// `(p - y) / batch_len`; it flows into the bias, the target matrix, and
    /// the input rows of the batch.
    pub fn loss_and_grads(&self, batch: &Batch, subnets: &[usize]) -> Result<(LossBreakdown, Params)> {
        self.check_batch(batch)?;
        let mut grads = Params::zeros_like(&self.params);
        let mut terms = Vec::with_capacity(subnets.len());
        let rows = batch.len() as f64;
        for &mu in subnets {
            let d = self.directions[mu];
            let (src, tgt) = self.slots[mu];
            let inputs = batch.column(d.from);
            let targets = batch.column(d.to);
            let (x, z) = self.logits(mu, &inputs);
            let mut g = z.mapv(sigmoid);
            let loss = bce(&g, &targets).ok_or_else(|| self.numeric(mu))?;
            terms.push((d, loss));

            for (r, &t) in targets.iter().enumerate() {
                g[[r, t]] -= 1.0;
            }
            g /= rows;

            grads.biases[mu] += &g.sum_axis(Axis(0));
            grads.embeddings[tgt] += &g.t().dot(&x);
            let dx = g.dot(&self.params.embeddings[tgt]);
            let input_grad = &mut grads.embeddings[src];
            for (r, &i) in inputs.iter().enumerate() {
                let mut row = input_grad.row_mut(i);
                row += &dx.row(r);
            }
        }
        Ok((LossBreakdown::from_terms(terms), grads))
    }

    fn numeric(&self, subnet: usize) -> Error {
        Error::Numeric {
            subnet: self.subnet_label(subnet),
            detail: "NaN in predictions".into(),
        }
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean over rows of the full-vocabulary binary cross-entropy against a
/// one-hot target; `None` if any prediction is NaN.
fn bce(pred: &Array2<f64>, targets: &[usize]) -> Option<f64> {
    let mut total = 0.0;
    for (row, &t) in pred.rows().into_iter().zip(targets) {
        for (k, &p) in row.iter().enumerate() {
            if p.is_nan() {
                return None;
            }
            let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
            total -= if k == t { p.ln() } else { (1.0 - p).ln() };
        }
    }
    Some(total / targets.len() as f64)
}

/// Binary cross-entropy of a prediction matrix against one target index per
/// row, summed over the vocabulary axis and averaged over rows.
pub fn subnet_loss(pred: &Array2<f64>, targets: &[usize]) -> Result<f64> {
    if pred.nrows() != targets.len() || targets.is_empty() {
        return Err(Error::Config(format!(
            "{} prediction rows for {} targets",
            pred.nrows(),
            targets.len()
        )));
    }
    if let Some(&t) = targets.iter().find(|&&t| t >= pred.ncols()) {
        return Err(Error::IndexOutOfRange {
            group: "target".into(),
            index: t,
            size: pred.ncols(),
        });
    }
    bce(pred, targets).ok_or_else(|| Error::Numeric {
        subnet: "prediction".into(),
        detail: "NaN in predictions".into(),
    })
}
