//! SA values at run boundaries and the predecessor maps behind φ and φ⁻¹.

use crate::error::{Error, Result};
use crate::pfp_builder::Pair;

use super::rlbwt::RunLengthBwt;

/// Which sampled SA values key the φ⁻¹ predecessor map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryFamily {
    RunStarts,
    RunEnds,
}

impl BoundaryFamily {
    pub fn flag(self) -> u8 {
        match self {
            BoundaryFamily::RunStarts => 0,
            BoundaryFamily::RunEnds => 1,
        }
    }

    pub fn from_flag(flag: u8) -> Option<Self> {
        match flag {
            0 => Some(BoundaryFamily::RunStarts),
            1 => Some(BoundaryFamily::RunEnds),
            _ => None,
        }
    }
}

const NONE: u64 = u64::MAX;

/// Sorted keys with satellites; `pred(x)` is the entry with the largest key
/// not above `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredMap {
    keys: Vec<u64>,
    sat: Vec<u64>,
}

impl PredMap {
    /// `sat = None` marks keys with no successor (φ⁻¹) or predecessor (φ).
    pub fn new(mut entries: Vec<(u64, Option<u64>)>) -> Result<Self> {
        entries.sort_unstable_by_key(|e| e.0);
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Structural(format!(
                "SA value {} sampled twice",
                w[0].0
            )));
        }
        let (keys, sat) = entries
            .into_iter()
            .map(|(k, s)| (k, s.unwrap_or(NONE)))
            .unzip();
        Ok(PredMap { keys, sat })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    /// `(key, satellite)` of the predecessor of `x`; the satellite is `None`
    /// where the map records no neighbour.
    pub fn pred(&self, x: u64) -> Option<(u64, Option<u64>)> {
        let j = self.keys.partition_point(|&k| k <= x).checked_sub(1)?;
        let s = self.sat[j];
        Some((self.keys[j], (s != NONE).then_some(s)))
    }

    /// Maps `x` through the neighbour relation, shifted by the distance to
    /// its predecessor key.
    pub fn apply(&self, x: u64) -> Option<u64> {
        let (key, sat) = self.pred(x)?;
        sat.map(|s| s + (x - key))
    }
}

/// SA values at every run start and run end, indexed by run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaSample {
    start_sa: Vec<u64>,
    end_sa: Vec<u64>,
    /// φ⁻¹: SA[h] ↦ SA[h+1].
    inverse: PredMap,
    /// φ: SA[h] ↦ SA[h-1].
    forward: PredMap,
}

impl SaSample {
    /// Validates the boundary pairs against the runs of `bwt`. Errors name
    /// the first run whose sample does not line up.
    pub fn new(bwt: &RunLengthBwt, ssa: &[Pair], esa: &[Pair]) -> Result<Self> {
        let r = bwt.runs();
        let n = bwt.len();
        for (family, pairs) in [("start", ssa), ("end", esa)] {
            if let Some(k) = (0..r.max(pairs.len())).find(|&k| {
                let expect = if family == "start" {
                    bwt.run_start(k.min(r - 1))
                } else {
                    bwt.run_end(k.min(r - 1))
                };
                k >= r || k >= pairs.len() || pairs[k].0 != expect || pairs[k].1 >= n
            }) {
                return Err(Error::Structural(format!(
                    "run-{family} sample does not match run {k} ({} runs, {} pairs)",
                    r,
                    pairs.len()
                )));
            }
        }
        let start_sa: Vec<u64> = ssa.iter().map(|p| p.1).collect();
        let end_sa: Vec<u64> = esa.iter().map(|p| p.1).collect();
        Self::from_values(start_sa, end_sa)
    }

    pub(crate) fn from_values(start_sa: Vec<u64>, end_sa: Vec<u64>) -> Result<Self> {
        let r = start_sa.len();
        let inverse = PredMap::new(
            (0..r)
                .map(|k| (end_sa[k], start_sa.get(k + 1).copied()))
                .collect(),
        )?;
        let forward = PredMap::new(
            (0..r)
                .map(|k| (start_sa[k], k.checked_sub(1).map(|p| end_sa[p])))
                .collect(),
        )?;
        Ok(SaSample {
            start_sa,
            end_sa,
            inverse,
            forward,
        })
    }

    pub fn start_sa(&self, k: usize) -> u64 {
        self.start_sa[k]
    }

    pub fn end_sa(&self, k: usize) -> u64 {
        self.end_sa[k]
    }

    pub fn ssa_pairs<'a>(&'a self, bwt: &'a RunLengthBwt) -> impl Iterator<Item = Pair> + 'a {
        self.start_sa
            .iter()
            .enumerate()
            .map(|(k, &v)| (bwt.run_start(k), v))
    }

    pub fn esa_pairs<'a>(&'a self, bwt: &'a RunLengthBwt) -> impl Iterator<Item = Pair> + 'a {
        self.end_sa
            .iter()
            .enumerate()
            .map(|(k, &v)| (bwt.run_end(k), v))
    }

    pub fn phi_inverse_map(&self) -> &PredMap {
        &self.inverse
    }

    pub fn phi_map(&self) -> &PredMap {
        &self.forward
    }
}
