use super::{spearman, EvalReport, SimilarityDataset, ThematicFitDataset};
use crate::compose::{event_similarity_detailed, CompositionKind};
use crate::corpus::{corrupt, TupleDataset};
use crate::error::{Error, Result};
use crate::eval::cosine_checked;
use crate::model::FrozenModel;
use crate::seeded_rng;

/// Accuracy at scoring each held-out record strictly above one corruption
/// per `(record, role)`. Ties count as failures.
///
/// Records are scored by summing pair logits over all group pairs: one pair
/// for a 2-group model, the S/V/O triplet score for three groups.
pub fn pseudo_disambiguation(
    model: &FrozenModel,
    test: &TupleDataset,
    roles: &[usize],
    seed: u64,
) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::InsufficientItems { needed: 1, got: 0 });
    }
    if roles.is_empty() {
        return Err(Error::Config("no roles to corrupt".into()));
    }
    if test.schema() != model.schema() {
        return Err(Error::Config(format!(
            "test schema {} does not match model schema {}",
            test.schema(),
            model.schema()
        )));
    }
    let mut rng = seeded_rng(seed, 0);
    let mut correct = 0usize;
    let mut items = 0usize;
    for record in test.records() {
        let truth = model.record_plausibility(record);
        for &g in roles {
            let corrupted = corrupt(record, g, model.vocab(), &mut rng)?;
            if truth > model.record_plausibility(&corrupted) {
                correct += 1;
            }
            items += 1;
        }
    }
    let labels: Vec<&str> = roles.iter().map(|&g| model.schema().name(g)).collect();
    Ok(EvalReport {
        dataset: format!("pseudo-disambiguation[{}]", labels.join("")),
        metric: "accuracy".into(),
        value: correct as f64 / items as f64,
        items,
        skipped: 0,
        degenerate: 0,
    })
}

/// Spearman correlation between composed-event similarities and human
/// ratings. Items with out-of-vocabulary words are skipped and counted.
pub fn event_similarity_eval(
    model: &FrozenModel,
    dataset: &SimilarityDataset,
    kind: CompositionKind,
) -> Result<EvalReport> {
    let mut ours = Vec::with_capacity(dataset.items.len());
    let mut human = Vec::with_capacity(dataset.items.len());
    let (mut skipped, mut degenerate) = (0, 0);
    for item in &dataset.items {
        match event_similarity_detailed(model, &item.a, &item.b, kind) {
            Ok((score, zero)) => {
                ours.push(score);
                human.push(item.score);
                degenerate += usize::from(zero);
            }
            Err(Error::Lookup { .. }) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if ours.len() < 2 {
        return Err(Error::InsufficientItems {
            needed: 2,
            got: ours.len(),
        });
    }
    if degenerate > 0 {
        log::warn!("{degenerate} zero-norm event vectors in {}", dataset.name);
    }
    Ok(EvalReport {
        dataset: format!("{}[{}]", dataset.name, kind),
        metric: "spearman".into(),
        value: spearman(&ours, &human)?,
        items: ours.len(),
        skipped,
        degenerate,
    })
}

/// Spearman correlation between `cos(verb, noun)` and human fit ratings. The
/// verb comes from the `V` space, the noun from `S` for agents and `O` for
/// patients. Items that cannot be resolved (missing word or missing role
/// group) are skipped and counted.
pub fn thematic_fit_eval(model: &FrozenModel, dataset: &ThematicFitDataset) -> Result<EvalReport> {
    let mut ours = Vec::with_capacity(dataset.items.len());
    let mut human = Vec::with_capacity(dataset.items.len());
    let (mut skipped, mut degenerate) = (0, 0);
    for item in &dataset.items {
        let vectors = model
            .vector_of("V", &item.verb)
            .and_then(|v| Ok((v, model.vector_of(item.role.group_label(), &item.noun)?)));
        match vectors {
            Ok((v, n)) => {
                let (c, zero) = cosine_checked(v, n);
                ours.push(c);
                human.push(item.score);
                degenerate += usize::from(zero);
            }
            Err(Error::Lookup { .. } | Error::UnknownGroup(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if ours.len() < 2 {
        return Err(Error::InsufficientItems {
            needed: 2,
            got: ours.len(),
        });
    }
    Ok(EvalReport {
        dataset: dataset.name.clone(),
        metric: "spearman".into(),
        value: spearman(&ours, &human)?,
        items: ours.len(),
        skipped,
        degenerate,
    })
}
