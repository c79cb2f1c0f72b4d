use funcspace_core::corpus::{gen_synthetic_svo, TupleDataset};
use funcspace_core::eval::pseudo_disambiguation;
use funcspace_core::model::{Checkpoint, Regime, Schedule, Sharing, TrainConfig, Trainer};

fn config(epochs: u64) -> TrainConfig {
    TrainConfig {
        dim: 8,
        batch_size: 64,
        learning_rate: 0.01,
        epochs,
        ..TrainConfig::default()
    }
}

fn small() -> (funcspace_core::corpus::Vocabulary, TupleDataset) {
    let data = gen_synthetic_svo(12, 5, 10, 2, 800, 4).unwrap();
    (data.vocab, data.dataset)
}

#[test]
fn loss_decreases_over_first_epochs() {
    let data = gen_synthetic_svo(50, 10, 40, 3, 5000, 13).unwrap();
    let config = TrainConfig {
        epochs: 10,
        ..TrainConfig::default()
    };
    let mut trainer = Trainer::new(data.vocab, config).unwrap();
    let totals = trainer.run(&data.dataset).unwrap().totals();
    assert_eq!(totals.len(), 10);
    assert!(totals[1] < totals[0] && totals[2] < totals[1], "{totals:?}");
}

#[test]
fn identical_configs_train_identical_models() {
    let (vocab, ds) = small();
    let mut a = Trainer::new(vocab.clone(), config(3)).unwrap();
    let mut b = Trainer::new(vocab, config(3)).unwrap();
    a.run(&ds).unwrap();
    b.run(&ds).unwrap();
    assert_eq!(Checkpoint::to_json(&a), Checkpoint::to_json(&b));
}

#[test]
fn different_seeds_train_different_models() {
    let (vocab, ds) = small();
    let mut a = Trainer::new(vocab.clone(), config(1)).unwrap();
    let mut b = Trainer::new(vocab, TrainConfig { seed: 2, ..config(1) }).unwrap();
    a.run(&ds).unwrap();
    b.run(&ds).unwrap();
    assert_ne!(a.model.params(), b.model.params());
}

#[test]
fn resuming_from_a_checkpoint_matches_an_uninterrupted_run() {
    let (vocab, ds) = small();
    for regime in Regime::ALL {
        let cfg = config(4).with_regime(regime);
        let mut straight = Trainer::new(vocab.clone(), cfg.clone()).unwrap();
        straight.run(&ds).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ckpt.json");
        let mut first = Trainer::new(vocab.clone(), cfg).unwrap();
        first.run_epochs(&ds, 2).unwrap();
        Checkpoint::save(&first, &path).unwrap();
        let mut resumed = Checkpoint::load(&path).unwrap();
        resumed.run_epochs(&ds, 2).unwrap();

        assert_eq!(resumed.epochs_completed, 4);
        assert_eq!(resumed.model.params(), straight.model.params(), "{regime}");
        assert_eq!(resumed.adam, straight.adam, "{regime}");
    }
}

#[test]
fn sync_and_async_take_different_paths() {
    let (vocab, ds) = small();
    let mut sync = Trainer::new(vocab.clone(), config(1)).unwrap();
    let mut asyn = Trainer::new(
        vocab,
        TrainConfig {
            schedule: Schedule::Async,
            ..config(1)
        },
    )
    .unwrap();
    sync.run(&ds).unwrap();
    asyn.run(&ds).unwrap();
    assert_ne!(sync.model.params(), asyn.model.params());
    assert_eq!(asyn.adam.t, sync.adam.t * 6);
}

#[test]
fn sep_keeps_two_copies_per_subnet() {
    let (vocab, _) = small();
    let shared = Trainer::new(vocab.clone(), config(0)).unwrap();
    let sep = Trainer::new(
        vocab,
        TrainConfig {
            sharing: Sharing::Sep,
            ..config(0)
        },
    )
    .unwrap();
    assert_eq!(shared.model.params().embeddings.len(), 3);
    assert_eq!(sep.model.params().embeddings.len(), 12);
}

#[test]
fn evaluation_leaves_the_model_untouched() {
    let (vocab, ds) = small();
    let mut trainer = Trainer::new(vocab, config(1)).unwrap();
    trainer.run(&ds).unwrap();
    let before = Checkpoint::to_json(&trainer);
    let frozen = trainer.model.frozen();
    let report = pseudo_disambiguation(&frozen, &ds, &[0, 1, 2], 3).unwrap();
    assert!((0.0..=1.0).contains(&report.value));
    assert_eq!(Checkpoint::to_json(&trainer), before);
}
