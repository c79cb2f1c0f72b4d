use std::fmt::Write as _;

use super::{pseudo_disambiguation, EvalReport};
use crate::corpus::{TupleDataset, Vocabulary};
use crate::error::Result;
use crate::model::{Regime, TrainConfig, Trainer};

/// One cell of the regime grid. A failed cell keeps its error message and no
/// report.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub regime: Regime,
    pub final_loss: Option<f64>,
    pub report: std::result::Result<EvalReport, String>,
}

fn run_cell(
    train: &TupleDataset,
    test: &TupleDataset,
    vocab: &Vocabulary,
    config: TrainConfig,
    roles: &[usize],
    eval_seed: u64,
) -> Result<(Option<f64>, EvalReport)> {
    let mut trainer = Trainer::new(vocab.clone(), config)?;
    let trace = trainer.run(train)?;
    let report = pseudo_disambiguation(&trainer.model.frozen(), test, roles, eval_seed)?;
    Ok((trace.totals().last().copied(), report))
}

/// Trains one model per regime in `grid` from the same data, initial seed and
/// shuffles, then scores each by pseudo-disambiguation on `test`. A cell that
/// fails is recorded and the grid carries on.
pub fn ablate(
    train: &TupleDataset,
    test: &TupleDataset,
    vocab: &Vocabulary,
    base: &TrainConfig,
    grid: &[Regime],
    roles: &[usize],
    eval_seed: u64,
) -> Vec<AblationRow> {
    grid.iter()
        .map(|&regime| {
            log::info!("ablation cell {regime}");
            match run_cell(train, test, vocab, base.clone().with_regime(regime), roles, eval_seed) {
                Ok((final_loss, report)) => AblationRow {
                    regime,
                    final_loss,
                    report: Ok(report),
                },
                Err(e) => {
                    log::error!("ablation cell {regime} failed: {e}");
                    AblationRow {
                        regime,
                        final_loss: None,
                        report: Err(e.to_string()),
                    }
                }
            }
        })
        .collect()
}

/// CSV with header `regime,metric,value,items,final_loss,error`.
pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("regime,metric,value,items,final_loss,error\n");
    for row in rows {
        let loss = row.final_loss.map(|l| l.to_string()).unwrap_or_default();
        match &row.report {
            Ok(r) => writeln!(out, "{},{},{},{},{},", row.regime, r.metric, r.value, r.items, loss),
            Err(e) => writeln!(out, "{},,,,{},\"{}\"", row.regime, loss, e.replace('"', "'")),
        }
        .expect("write to String");
    }
    out
}
