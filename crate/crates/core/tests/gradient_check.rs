//! Analytic gradients against central finite differences of an independent,
//! loop-based implementation of the joint loss.

mod common;

use std::time::Instant;

use common::{max_relative_error, random_case, TOLERANCE};
use funcspace_core::corpus::Batch;
use funcspace_core::model::Sharing;

#[test]
fn values_and_for_each_mut_agree_on_order() {
    let (mut model, _) = random_case("S,V,O", 2, Sharing::Sep, 1);
    let mut k = 0.0;
    model.params_mut().for_each_mut(|x| {
        *x = k;
        k += 1.0;
    });
    let v: Vec<f64> = model.params().values().collect();
    assert!(v.iter().enumerate().all(|(i, &x)| x == i as f64));
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let start = Instant::now();
    let mut cases = 0;
    let mut seed = 100;
    for labels in ["A,B", "S,V,O"] {
        for dim in [2, 3, 5] {
            for sharing in [Sharing::Shared, Sharing::Sep] {
                for _ in 0..2 {
                    seed += 1;
                    let (model, rows) = random_case(labels, dim, sharing, seed);
                    let err = max_relative_error(&model, &rows);
                    assert!(
                        err < TOLERANCE,
                        "{labels} d={dim} {sharing} seed={seed}: relative error {err:e}"
                    );
                    cases += 1;
                }
            }
        }
    }
    assert!(cases >= 20);
    assert!(start.elapsed().as_secs() < 30, "took {:?}", start.elapsed());
}

#[test]
fn subset_gradients_cover_only_their_subnets() {
    let (model, rows) = random_case("S,V,O", 3, Sharing::Sep, 7);
    let batch = Batch::from_rows(&rows);
    let (_, all) = model.compute_grads(&batch).unwrap();
    let mut sum = None;
    for mu in 0..model.directions().len() {
        let (_, g) = model.loss_and_grads(&batch, &[mu]).unwrap();
        match sum.as_mut() {
            None => sum = Some(g),
            Some(s) => s.accumulate(&g),
        }
    }
    let sum = sum.unwrap();
    for (a, b) in all.values().zip(sum.values()) {
        assert!((a - b).abs() < 1e-12);
    }
}
