//! Shared oracles for the integration and acceptance tests.

#![allow(dead_code)]

use funcspace_core::corpus::{Batch, GroupSchema, RawTuple, Vocabulary};
use funcspace_core::model::{JointModel, Sharing};
use funcspace_core::seeded_rng;
use rand::Rng;

pub const H: f64 = 1e-4;
pub const TOLERANCE: f64 = 1e-4;
pub const FLOOR: f64 = 1e-6;

pub fn naive_loss(model: &JointModel, rows: &[Vec<usize>]) -> f64 {
    let p = model.params();
    let mut total = 0.0;
    for mu in 0..model.directions().len() {
        let dir = model.directions()[mu];
        let (in_slot, tgt_slot) = model.subnet_slots(mu);
        let (e_in, e_tgt, bias) = (&p.embeddings[in_slot], &p.embeddings[tgt_slot], &p.biases[mu]);
        let mut sum = 0.0;
        for row in rows {
            let a = row[dir.from];
            for w in 0..e_tgt.nrows() {
                let mut z = bias[w];
                for k in 0..e_in.ncols() {
                    z += e_in[[a, k]] * e_tgt[[w, k]];
                }
                let prob = (1.0 / (1.0 + (-z).exp())).clamp(1e-7, 1.0 - 1e-7);
                let y = if w == row[dir.to] { 1.0 } else { 0.0 };
                sum -= y * prob.ln() + (1.0 - y) * (1.0 - prob).ln();
            }
        }
        total += sum / rows.len() as f64;
    }
    total
}

pub fn random_case(labels: &str, dim: usize, sharing: Sharing, seed: u64) -> (JointModel, Vec<Vec<usize>>) {
    let schema = GroupSchema::parse(labels).unwrap();
    let mut rng = seeded_rng(seed, 0);
    let sizes: Vec<usize> = (0..schema.arity()).map(|_| rng.random_range(2..=5)).collect();
    // one tuple per rank so every word of every group is present
    let max = *sizes.iter().max().unwrap();
    let tuples: Vec<RawTuple> = (0..max)
        .map(|i| RawTuple::new((0..schema.arity()).map(|g| format!("w{}", i.min(sizes[g] - 1))), 1))
        .collect();
    let vocab = Vocabulary::build(&schema, &tuples, 1).unwrap();
    assert_eq!(vocab.sizes(), sizes);
    let mut model = JointModel::zeros(vocab, dim, sharing).unwrap();
    model.params_mut().for_each_mut(|x| *x = rng.random_range(-0.8..0.8));
    let n_rows = rng.random_range(1..=6);
    let rows = (0..n_rows)
        .map(|_| sizes.iter().map(|&n| rng.random_range(0..n)).collect())
        .collect();
    (model, rows)
}

pub fn max_relative_error(model: &JointModel, rows: &[Vec<usize>]) -> f64 {
    let (losses, grads) = model.compute_grads(&Batch::from_rows(rows)).unwrap();
    assert!((losses.total - naive_loss(model, rows)).abs() < 1e-10);
    let analytic: Vec<f64> = grads.values().collect();
    let mut worst = 0.0f64;
    let mut probe = model.clone();
    let mut idx = 0;
    let n = analytic.len();
    while idx < n {
        let mut original = 0.0;
        let mut k = 0;
        probe.params_mut().for_each_mut(|x| {
            if k == idx {
                original = *x;
                *x = original + H;
            }
            k += 1;
        });
        let plus = naive_loss(&probe, rows);
        set_value(&mut probe, idx, original - H);
        let minus = naive_loss(&probe, rows);
        set_value(&mut probe, idx, original);
        let numeric = (plus - minus) / (2.0 * H);
        let a = analytic[idx];
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FLOOR);
        worst = worst.max(err);
        idx += 1;
    }
    worst
}

pub fn set_value(model: &mut JointModel, idx: usize, value: f64) {
    let mut k = 0;
    model.params_mut().for_each_mut(|x| {
        if k == idx {
            *x = value;
        }
        k += 1;
    });
}
