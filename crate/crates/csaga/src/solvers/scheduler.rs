//! Component-selection orders: deterministic cyclic sweeps, per-epoch
//! random permutations, and IID uniform sampling.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, STREAM_SCHEDULER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    Cyclic,
    RandomPermutation,
    Iid,
}

impl SchedulerKind {
    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Cyclic => "cyclic",
            SchedulerKind::RandomPermutation => "random_permutation",
            SchedulerKind::Iid => "iid",
        }
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(SchedulerKind::Cyclic),
            "random_permutation" | "random-permutation" | "rp" => {
                Ok(SchedulerKind::RandomPermutation)
            }
            "iid" => Ok(SchedulerKind::Iid),
            other => Err(Error::InvalidArgument(format!(
                "unknown scheduler '{other}' (expected cyclic, random_permutation, or iid)"
            ))),
        }
    }
}

impl std::fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Stateful index source. A cyclic scheduler visits `0, 1, …, n−1`
/// forever; a random-permutation scheduler reshuffles at every epoch
/// boundary; an IID scheduler draws uniformly each step. All draws come
/// from a dedicated seeded stream, so a `(kind, n, seed)` triple fixes
/// the whole sequence.
#[derive(Clone, Debug)]
pub struct Scheduler {
    kind: SchedulerKind,
    n: usize,
    rng: ChaCha8Rng,
    perm: Vec<usize>,
    pos: usize,
}

impl Scheduler {
    pub fn new(kind: SchedulerKind, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("scheduler needs n >= 1".into()));
        }
        let mut rng = stream_rng(seed, STREAM_SCHEDULER);
        let mut perm: Vec<usize> = (0..n).collect();
        if kind == SchedulerKind::RandomPermutation {
            perm.shuffle(&mut rng);
        }
        Ok(Scheduler {
            kind,
            n,
            rng,
            perm,
            pos: 0,
        })
    }

    pub fn kind(&self) -> SchedulerKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn next_index(&mut self) -> usize {
        match self.kind {
            SchedulerKind::Cyclic => {
                let i = self.pos;
                self.pos = (self.pos + 1) % self.n;
                i
            }
            SchedulerKind::RandomPermutation => {
                if self.pos == self.n {
                    self.perm.shuffle(&mut self.rng);
                    self.pos = 0;
                }
                let i = self.perm[self.pos];
                self.pos += 1;
                i
            }
            SchedulerKind::Iid => self.rng.gen_range(0..self.n),
        }
    }
}
