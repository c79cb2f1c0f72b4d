//! The joint multidirectional model.
//!
//! An `N`-group model owns one embedding matrix per group and one
//! directional sub-network per ordered group pair `i -> j`. A sub-network
//! scores every target word `k` for an input word `a` as
//! `sigmoid(E_i[a] . E_j[k] + b_ij[k])` and is trained with binary
//! cross-entropy against the one-hot target. The joint loss is the sum of the
//! `N(N-1)` sub-network losses.

mod checkpoint;
mod joint;
mod params;
mod score;
mod train;

pub use checkpoint::{Checkpoint, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use joint::{subnet_loss, JointModel, LossBreakdown, PROB_EPS};
pub use params::{clip_global_norm, AdamConfig, AdamState, Params};
pub use score::{EmbeddingSpace, FrozenModel};
pub use train::{train, EpochLoss, LossTrace, TrainConfig, Trainer};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::GroupSchema;
use crate::error::{Error, Result};

/// One sub-network: predicts words of group `to` from a word of group `from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub from: usize,
    pub to: usize,
}

impl Direction {
    /// All `N(N-1)` directions in training order.
    ///
    /// Pairs are visited by increasing group distance, then by first group,
    /// each forward then backward. For `S,V,O` this is
    /// `S->V, V->S, V->O, O->V, S->O, O->S`.
    pub fn enumerate(n_groups: usize) -> Vec<Direction> {
        let mut out = Vec::with_capacity(n_groups * n_groups.saturating_sub(1));
        for gap in 1..n_groups {
            for i in 0..n_groups - gap {
                let j = i + gap;
                out.push(Direction { from: i, to: j });
                out.push(Direction { from: j, to: i });
            }
        }
        out
    }

    pub fn label(&self, schema: &GroupSchema) -> String {
        format!("{}->{}", schema.name(self.from), schema.name(self.to))
    }

    /// Parses `S->V` (or `S>V`) against a schema.
    pub fn parse(text: &str, schema: &GroupSchema) -> Result<Self> {
        let (a, b) = text
            .split_once("->")
            .or_else(|| text.split_once('>'))
            .ok_or_else(|| Error::Config(format!("direction {text:?} is not of the form A->B")))?;
        let from = schema.index_of(a.trim())?;
        let to = schema.index_of(b.trim())?;
        if from == to {
            return Err(Error::Config(format!("direction {text:?} maps a group onto itself")));
        }
        Ok(Self { from, to })
    }
}

/// How sub-network losses are turned into updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// One joint loss, one backward pass, one optimizer step per batch.
    #[default]
    Sync,
    /// Each sub-network takes its own step in turn.
    Async,
}

/// Whether sub-networks share one matrix per group or keep private copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sharing {
    #[default]
    Shared,
    /// Private copies per sub-network, averaged when vectors are read out.
    Sep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Regime {
    pub schedule: Schedule,
    pub sharing: Sharing,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::new(Schedule::Async, Sharing::Sep),
        Regime::new(Schedule::Async, Sharing::Shared),
        Regime::new(Schedule::Sync, Sharing::Sep),
        Regime::new(Schedule::Sync, Sharing::Shared),
    ];

    pub const fn new(schedule: Schedule, sharing: Sharing) -> Self {
        Self { schedule, sharing }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Sync => "sync",
            Schedule::Async => "async",
        })
    }
}

impl fmt::Display for Sharing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sharing::Shared => "shared",
            Sharing::Sep => "sep",
        })
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.schedule, self.sharing)
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sync" => Ok(Schedule::Sync),
            "async" => Ok(Schedule::Async),
            _ => Err(Error::Config(format!("unknown schedule {s:?} (sync, async)"))),
        }
    }
}

impl FromStr for Sharing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared" => Ok(Sharing::Shared),
            "sep" => Ok(Sharing::Sep),
            _ => Err(Error::Config(format!("unknown sharing {s:?} (shared, sep)"))),
        }
    }
}

impl FromStr for Regime {
    type Err = Error;

    /// Parses `sync+shared` style names.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('+')
            .ok_or_else(|| Error::Config(format!("regime {s:?} is not of the form schedule+sharing")))?;
        Ok(Regime::new(a.parse()?, b.parse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svo_direction_order() {
        let schema = GroupSchema::parse("S,V,O").unwrap();
        let labels: Vec<String> = Direction::enumerate(3).iter().map(|d| d.label(&schema)).collect();
        assert_eq!(labels, ["S->V", "V->S", "V->O", "O->V", "S->O", "O->S"]);
    }

    #[test]
    fn direction_counts() {
        assert_eq!(Direction::enumerate(2).len(), 2);
        assert_eq!(Direction::enumerate(3).len(), 6);
        assert_eq!(Direction::enumerate(4).len(), 12);
        let all = Direction::enumerate(5);
        let mut uniq = all.clone();
        uniq.sort_by_key(|d| (d.from, d.to));
        uniq.dedup();
        assert_eq!(uniq.len(), 20);
    }

    #[test]
    fn parse_directions_and_regimes() {
        let schema = GroupSchema::parse("A,B").unwrap();
        assert_eq!(Direction::parse("A->B", &schema).unwrap(), Direction { from: 0, to: 1 });
        assert_eq!(Direction::parse("B>A", &schema).unwrap(), Direction { from: 1, to: 0 });
        assert!(Direction::parse("A->A", &schema).is_err());
        assert!(Direction::parse("A-B", &schema).is_err());
        let r: Regime = "async+sep".parse().unwrap();
        assert_eq!(r, Regime::new(Schedule::Async, Sharing::Sep));
        assert_eq!(r.to_string(), "async+sep");
        assert!("sync".parse::<Regime>().is_err());
    }
}
