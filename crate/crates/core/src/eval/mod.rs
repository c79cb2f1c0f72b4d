//! Evaluation protocols over a frozen model.

mod ablate;
mod datasets;
mod neighbors;
mod stats;
mod tasks;

pub use ablate::{ablate, ablation_csv, AblationRow};
pub use datasets::{Role, SimilarityDataset, SimilarityItem, ThematicFitDataset, ThematicItem};
pub use neighbors::{cluster_purity, cluster_purity_of, nearest_neighbors, nearest_neighbors_multi, Neighbor};
pub use stats::{average_ranks, cosine, cosine_checked, pearson, spearman};
pub use tasks::{event_similarity_eval, pseudo_disambiguation, thematic_fit_eval};

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// One evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub dataset: String,
    pub metric: String,
    pub value: f64,
    /// Items that were scored.
    pub items: usize,
    /// Items skipped because a word was out of vocabulary.
    pub skipped: usize,
    /// Cosines forced to 0 by a zero-norm vector.
    pub degenerate: usize,
}

impl EvalReport {
    pub fn coverage(&self) -> f64 {
        let total = self.items + self.skipped;
        if total == 0 {
            0.0
        } else {
            self.items as f64 / total as f64
        }
    }
}

pub const REPORT_HEADER: &str = "dataset,metric,value,items,skipped,coverage";

/// Report rows as CSV with header `dataset,metric,value,items,skipped,coverage`.
pub fn reports_csv(reports: &[EvalReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.dataset,
            r.metric,
            r.value,
            r.items,
            r.skipped,
            r.coverage()
        )
        .expect("write to String");
    }
    out
}

pub fn write_reports(reports: &[EvalReport], path: &Path) -> Result<()> {
    std::fs::write(path, reports_csv(reports)).map_err(|e| Error::io(path, e))
}
