//! Function-specific word vector spaces.
//!
//! Words from `N` interrelated groups (for example subjects, verbs and
//! objects) each get their own embedding matrix. Every ordered pair of groups
//! forms a directional sub-network that predicts target-group words from an
//! input-group word, and all sub-networks are trained together against one
//! joint loss over shared matrices.
//!
//! The crate is split into:
//!
//! * [`corpus`]: tuple ingestion, vocabularies, batching, corruption sampling
//!   and synthetic data generators.
//! * [`model`]: the joint model, its loss and hand-derived gradients, Adam
//!   with global-norm clipping, the training regimes and checkpoints.
//! * [`compose`]: event representations built from S/V/O vectors.
//! * [`eval`]: pseudo-disambiguation, event similarity, thematic fit,
//!   nearest neighbours, cluster purity and the ablation harness.
//! * [`cli`]: configuration handling and the `funcspace` command line.

pub mod cli;
pub mod compose;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod model;

pub use error::{Error, Result};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere randomness is needed.
pub type Rng = ChaCha8Rng;

/// A generator seeded from `seed` on stream `stream`.
///
/// Distinct streams give independent sequences for the same seed, which lets
/// per-epoch shuffles be reproduced without replaying earlier epochs.
pub fn seeded_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
