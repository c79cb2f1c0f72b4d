use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{clip_global_norm, AdamConfig, AdamState, Direction, JointModel, LossBreakdown, Regime, Schedule, Sharing};
use crate::corpus::{Batch, TupleDataset, Vocabulary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub clip_norm: f64,
    pub dim: usize,
    pub epochs: u64,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub schedule: Schedule,
    pub sharing: Sharing,
    /// Sub-networks to train, as `A->B`; empty means all of them.
    pub directions: Vec<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let adam = AdamConfig::default();
        Self {
            batch_size: 128,
            learning_rate: 0.001,
            clip_norm: 5.0,
            dim: 25,
            epochs: 10,
            seed: 1,
            beta1: adam.beta1,
            beta2: adam.beta2,
            eps: adam.eps,
            schedule: Schedule::Sync,
            sharing: Sharing::Shared,
            directions: Vec::new(),
        }
    }
}

impl TrainConfig {
    pub fn regime(&self) -> Regime {
        Regime::new(self.schedule, self.sharing)
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.schedule = regime.schedule;
        self.sharing = regime.sharing;
        self
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            beta1: self.beta1,
            beta2: self.beta2,
            eps: self.eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("{what} must be positive")));
        if self.batch_size == 0 {
            return bad("batch_size");
        }
        if self.dim == 0 {
            return bad("dim");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate");
        }
        if !(self.clip_norm > 0.0 && self.clip_norm.is_finite()) {
            return bad("clip_norm");
        }
        if !(self.eps > 0.0) {
            return bad("eps");
        }
        if !((0.0..1.0).contains(&self.beta1) && (0.0..1.0).contains(&self.beta2)) {
            return Err(Error::Config("Adam betas must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Mean losses over one epoch's batches.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochLoss {
    pub epoch: u64,
    pub subnets: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LossTrace {
    pub labels: Vec<String>,
    pub epochs: Vec<EpochLoss>,
}

impl LossTrace {
    pub fn totals(&self) -> Vec<f64> {
        self.epochs.iter().map(|e| e.total).collect()
    }

    /// CSV with header `epoch,subnet,loss,total`, one row per epoch and
    /// sub-network.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,subnet,loss,total\n");
        for e in &self.epochs {
            for (label, loss) in self.labels.iter().zip(&e.subnets) {
                writeln!(out, "{},{},{},{}", e.epoch, label, loss, e.total).expect("write to String");
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// A model, its optimizer state and the configuration that drives both.
///
/// Epoch `e` shuffles with generator stream `e`, so a trainer restored from a
/// checkpoint continues exactly where an uninterrupted run would be.
#[derive(Debug, Clone, PartialEq)]
pub struct Trainer {
    pub model: JointModel,
    pub adam: AdamState,
    pub config: TrainConfig,
    pub epochs_completed: u64,
}

impl Trainer {
    pub fn new(vocab: Vocabulary, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let model = JointModel::init(vocab, config.dim, config.sharing, config.seed)?;
        Ok(Self::from_model(model, config))
    }

    pub fn from_model(model: JointModel, config: TrainConfig) -> Self {
        let adam = AdamState::new(model.params());
        Self {
            model,
            adam,
            config,
            epochs_completed: 0,
        }
    }

    /// Indices of the sub-networks selected by `config.directions`.
    pub fn active_subnets(&self) -> Result<Vec<usize>> {
        if self.config.directions.is_empty() {
            return Ok((0..self.model.directions().len()).collect());
        }
        self.config
            .directions
            .iter()
            .map(|text| {
                let d = Direction::parse(text, self.model.schema())?;
                Ok(self.model.subnet_index(d.from, d.to).expect("every direction exists"))
            })
            .collect()
    }

    /// Trains `config.epochs` epochs.
    pub fn run(&mut self, dataset: &TupleDataset) -> Result<LossTrace> {
        self.run_epochs(dataset, self.config.epochs)
    }

    pub fn run_epochs(&mut self, dataset: &TupleDataset, epochs: u64) -> Result<LossTrace> {
        self.config.validate()?;
        if dataset.schema() != self.model.schema() {
            return Err(Error::Config(format!(
                "dataset schema {} does not match model schema {}",
                dataset.schema(),
                self.model.schema()
            )));
        }
        let active = self.active_subnets()?;
        let mut trace = LossTrace {
            labels: active.iter().map(|&mu| self.model.subnet_label(mu)).collect(),
            epochs: Vec::new(),
        };
        for _ in 0..epochs {
            let epoch = self.epochs_completed;
            let mut sums = vec![0.0; active.len()];
            let mut total = 0.0;
            let mut n_batches = 0usize;
            for batch in dataset.batches(self.config.batch_size, self.config.seed, epoch) {
                let losses = self.step(&batch, &active)?;
                for (s, (_, l)) in sums.iter_mut().zip(&losses.terms) {
                    *s += l;
                }
                total += losses.total;
                n_batches += 1;
            }
            let n = n_batches.max(1) as f64;
            let record = EpochLoss {
                epoch,
                subnets: sums.iter().map(|s| s / n).collect(),
                total: total / n,
            };
            log::info!("epoch {epoch}: mean joint loss {:.6}", record.total);
            trace.epochs.push(record);
            self.epochs_completed += 1;
        }
        Ok(trace)
    }

    /// One batch under the configured schedule.
    ///
    /// `sync`: a single joint loss, clip and Adam step. `async`: every
    /// active sub-network in order takes its own forward, backward, clip and
    /// step, each seeing the updates of the ones before it.
    pub fn step(&mut self, batch: &Batch, active: &[usize]) -> Result<LossBreakdown> {
        let adam_cfg = self.config.adam();
        match self.config.schedule {
            Schedule::Sync => {
                let (losses, mut grads) = self.model.loss_and_grads(batch, active)?;
                self.check_finite(&losses)?;
                clip_global_norm(&mut grads, self.config.clip_norm);
                self.adam
                    .step(self.model.params_mut(), &grads, self.config.learning_rate, &adam_cfg);
                Ok(losses)
            }
            Schedule::Async => {
                let mut terms = Vec::with_capacity(active.len());
                for &mu in active {
                    let (losses, mut grads) = self.model.loss_and_grads(batch, &[mu])?;
                    self.check_finite(&losses)?;
                    clip_global_norm(&mut grads, self.config.clip_norm);
                    self.adam
                        .step(self.model.params_mut(), &grads, self.config.learning_rate, &adam_cfg);
                    terms.extend(losses.terms);
                }
                let total = terms.iter().map(|t| t.1).sum();
                Ok(LossBreakdown { terms, total })
            }
        }
    }

    fn check_finite(&self, losses: &LossBreakdown) -> Result<()> {
        match losses.terms.iter().find(|(_, l)| !l.is_finite()) {
            Some((d, l)) => Err(Error::Numeric {
                subnet: d.label(self.model.schema()),
                detail: format!("loss is {l}"),
            }),
            None => Ok(()),
        }
    }
}

/// Trains `model` from fresh optimizer state for `config.epochs` epochs.
pub fn train(model: JointModel, dataset: &TupleDataset, config: &TrainConfig) -> Result<(JointModel, LossTrace)> {
    if model.sharing() != config.sharing || model.dim() != config.dim {
        return Err(Error::Config(format!(
            "model (d = {}, {}) does not match config (d = {}, {})",
            model.dim(),
            model.sharing(),
            config.dim,
            config.sharing
        )));
    }
    let mut trainer = Trainer::from_model(model, config.clone());
    let trace = trainer.run(dataset)?;
    Ok((trainer.model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::gen_synthetic_svo;

    fn small_config() -> TrainConfig {
        TrainConfig {
            dim: 8,
            batch_size: 32,
            learning_rate: 0.01,
            epochs: 3,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn defaults() {
        let c = TrainConfig::default();
        assert_eq!(c.batch_size, 128);
        assert_eq!(c.learning_rate, 0.001);
        assert_eq!(c.clip_norm, 5.0);
        assert_eq!(c.dim, 25);
        assert_eq!((c.beta1, c.beta2, c.eps), (0.9, 0.999, 1e-8));
        assert_eq!(c.regime(), Regime::new(Schedule::Sync, Sharing::Shared));
    }

    #[test]
    fn validation() {
        let bad = TrainConfig {
            clip_norm: 0.0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_epochs_leave_the_model_untouched() {
        let svo = gen_synthetic_svo(10, 5, 8, 2, 200, 3).unwrap();
        let cfg = TrainConfig {
            epochs: 0,
            ..small_config()
        };
        let model = JointModel::init(svo.vocab.clone(), cfg.dim, cfg.sharing, cfg.seed).unwrap();
        let (trained, trace) = train(model.clone(), &svo.dataset, &cfg).unwrap();
        assert_eq!(trained, model);
        assert!(trace.epochs.is_empty());
    }

    #[test]
    fn trace_has_one_row_per_epoch_and_subnet() {
        let svo = gen_synthetic_svo(10, 5, 8, 2, 200, 3).unwrap();
        let mut t = Trainer::new(svo.vocab.clone(), small_config()).unwrap();
        let trace = t.run(&svo.dataset).unwrap();
        let csv = trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "epoch,subnet,loss,total");
        assert_eq!(lines.len(), 1 + 3 * 6);
        assert!(lines[1].starts_with("0,S->V,"));
        for e in &trace.epochs {
            let sum: f64 = e.subnets.iter().sum();
            assert!((sum - e.total).abs() <= 1e-9 * e.total.abs());
        }
    }

    #[test]
    fn direction_subset_only_trains_those_biases() {
        let svo = gen_synthetic_svo(10, 5, 8, 2, 200, 3).unwrap();
        let cfg = TrainConfig {
            directions: vec!["S->V".into()],
            ..small_config()
        };
        let mut t = Trainer::new(svo.vocab.clone(), cfg).unwrap();
        t.run(&svo.dataset).unwrap();
        let sv = t.model.subnet_index(0, 1).unwrap();
        for mu in 0..6 {
            let moved = t.model.bias(mu).iter().any(|&b| b != 0.0);
            assert_eq!(moved, mu == sv, "subnet {mu}");
        }
        // O is never touched by S->V
        let init = JointModel::init(svo.vocab.clone(), 8, Sharing::Shared, 1).unwrap();
        assert_eq!(t.model.params().embeddings[2], init.params().embeddings[2]);
    }

    #[test]
    fn async_steps_the_optimizer_per_subnet() {
        let svo = gen_synthetic_svo(10, 5, 8, 2, 64, 3).unwrap();
        let cfg = TrainConfig {
            schedule: Schedule::Async,
            epochs: 1,
            ..small_config()
        };
        let mut t = Trainer::new(svo.vocab.clone(), cfg).unwrap();
        t.run(&svo.dataset).unwrap();
        assert_eq!(t.adam.t, 2 * 6);
    }

    #[test]
    fn dataset_schema_must_match() {
        let svo = gen_synthetic_svo(10, 5, 8, 2, 64, 3).unwrap();
        let other = crate::corpus::gen_synthetic_assignment(10, 2, 1, Default::default()).unwrap();
        let (vocab, _) = other.encode().unwrap();
        let mut t = Trainer::new(vocab, small_config()).unwrap();
        assert!(t.run(&svo.dataset).is_err());
    }
}
