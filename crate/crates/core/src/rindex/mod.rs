//! The r-index: run-length BWT plus SA samples at run boundaries.
//!
//! Backward search keeps one exact SA value (the toehold) for an end of the
//! current interval. Once the pattern is matched, the remaining occurrences
//! follow by repeated φ⁻¹ (or φ when anchored at the bottom), each costing a
//! single predecessor query.

mod io;
mod rlbwt;
mod sample;

use std::io::Read;

use rand::{Rng, SeedableRng};

pub use io::{load, save, FORMAT_VERSION, MAGIC};
pub use rlbwt::{RunLengthBuilder, RunLengthBwt};
pub use sample::{BoundaryFamily, PredMap, SaSample};

use crate::error::{Error, Result};
use crate::pfp_builder::Pair;
use crate::suffix_kernel::sa_naive;
use crate::text_ingest::MIN_CONTENT_BYTE;

/// Key family of the φ⁻¹ predecessor map. Checked against the suffix array
/// oracle by [`select_phi_inverse_family`].
pub const PHI_INVERSE_FAMILY: BoundaryFamily = BoundaryFamily::RunEnds;

/// Which interval end the toehold belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Top,
    Bottom,
}

/// Backward-search state over the BWT interval `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchState {
    pub lo: u64,
    pub hi: u64,
    /// SA value at `lo` (top anchor) or `hi` (bottom anchor).
    pub toehold: u64,
    pub anchor: Anchor,
    pub matched_len: usize,
}

impl MatchState {
    pub fn size(&self) -> u64 {
        self.hi - self.lo + 1
    }

    pub fn anchored_row(&self) -> u64 {
        match self.anchor {
            Anchor::Top => self.lo,
            Anchor::Bottom => self.hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RIndex {
    bwt: RunLengthBwt,
    sample: SaSample,
    last_sa: u64,
}

/// Assembles an index from a BWT byte stream and its boundary samples.
pub fn build_rindex<R: Read>(bwt: R, ssa: &[Pair], esa: &[Pair]) -> Result<RIndex> {
    RIndex::from_parts(RunLengthBwt::from_reader(bwt)?, ssa, esa)
}

impl RIndex {
    pub fn from_bwt(bwt: &[u8], ssa: &[Pair], esa: &[Pair]) -> Result<Self> {
        Self::from_parts(RunLengthBwt::from_bytes(bwt)?, ssa, esa)
    }

    pub fn from_parts(bwt: RunLengthBwt, ssa: &[Pair], esa: &[Pair]) -> Result<Self> {
        let sample = SaSample::new(&bwt, ssa, esa)?;
        let last_sa = sample.end_sa(bwt.runs() - 1);
        Ok(RIndex {
            bwt,
            sample,
            last_sa,
        })
    }

    pub fn len(&self) -> u64 {
        self.bwt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bwt.is_empty()
    }

    pub fn runs(&self) -> usize {
        self.bwt.runs()
    }

    pub fn bwt(&self) -> &RunLengthBwt {
        &self.bwt
    }

    pub fn sample(&self) -> &SaSample {
        &self.sample
    }

    /// SA value of the last BWT row.
    pub fn last_sa(&self) -> u64 {
        self.last_sa
    }

    /// Empty-suffix state anchored at row 0.
    pub fn initial_state(&self) -> MatchState {
        MatchState {
            lo: 0,
            hi: self.len() - 1,
            toehold: self.sample.start_sa(0),
            anchor: Anchor::Top,
            matched_len: 0,
        }
    }

    /// Empty-suffix state anchored at row n-1.
    pub fn initial_state_bottom(&self) -> MatchState {
        MatchState {
            toehold: self.last_sa,
            anchor: Anchor::Bottom,
            ..self.initial_state()
        }
    }

    // SA value of the row LF maps a row with SA value `v` to.
    fn prev_text_pos(&self, v: u64) -> u64 {
        if v == 0 {
            self.len() - 1
        } else {
            v - 1
        }
    }

    /// Extends the match by `c` on the left. `None` means `c·Q` does not occur.
    pub fn backward_step(&self, st: &MatchState, c: u8) -> Option<MatchState> {
        let base = self.bwt.c(c);
        let before = self.bwt.rank(c, st.lo);
        let through = self.bwt.rank(c, st.hi + 1);
        if through == before {
            return None;
        }
        let toehold = match st.anchor {
            Anchor::Top => {
                let k = self.bwt.run_of(st.lo);
                if self.bwt.head(k) == c {
                    st.toehold
                } else {
                    // The first c inside the interval starts a run.
                    self.sample.start_sa(self.bwt.next_run_of(c, k)?)
                }
            }
            Anchor::Bottom => {
                let k = self.bwt.run_of(st.hi);
                if self.bwt.head(k) == c {
                    st.toehold
                } else {
                    self.sample.end_sa(self.bwt.prev_run_of(c, k)?)
                }
            }
        };
        Some(MatchState {
            lo: base + before,
            hi: base + through - 1,
            toehold: self.prev_text_pos(toehold),
            anchor: st.anchor,
            matched_len: st.matched_len + 1,
        })
    }

    /// Final state of backward search for `pattern`, or `None` if absent.
    pub fn find(&self, pattern: &[u8]) -> Result<Option<MatchState>> {
        check_pattern(pattern)?;
        let mut st = self.initial_state();
        for &c in pattern.iter().rev() {
            match self.backward_step(&st, c) {
                Some(next) => st = next,
                None => return Ok(None),
            }
        }
        Ok(Some(st))
    }

    pub fn count(&self, pattern: &[u8]) -> Result<u64> {
        Ok(self.find(pattern)?.map_or(0, |st| st.size()))
    }

    /// Up to `max_hits` occurrence positions (all if `None`), in SA order.
    pub fn locate_all(&self, pattern: &[u8], max_hits: Option<usize>) -> Result<Vec<u64>> {
        Ok(match self.find(pattern)? {
            Some(st) => self.locate_state(&st, max_hits),
            None => Vec::new(),
        })
    }

    /// Lists SA values of a matched interval starting from its toehold.
    pub fn locate_state(&self, st: &MatchState, max_hits: Option<usize>) -> Vec<u64> {
        let want = max_hits.map_or(st.size(), |m| st.size().min(m as u64)) as usize;
        let mut out = Vec::with_capacity(want);
        let mut v = st.toehold;
        for i in 0..want {
            if i > 0 {
                let next = match st.anchor {
                    Anchor::Top => self.phi_inverse(v),
                    Anchor::Bottom => self.phi(v),
                };
                v = next.expect("interval extends past the end of the suffix array");
            }
            out.push(v);
        }
        out
    }

    /// `SA[h+1]` given `SA[h]`; `None` for the last row.
    pub fn phi_inverse(&self, sa_val: u64) -> Option<u64> {
        self.sample.phi_inverse_map().apply(sa_val)
    }

    /// `SA[h-1]` given `SA[h]`; `None` for row 0.
    pub fn phi(&self, sa_val: u64) -> Option<u64> {
        self.sample.phi_map().apply(sa_val)
    }
}

/// Query patterns use content bytes only.
pub fn check_pattern(pattern: &[u8]) -> Result<()> {
    if pattern.is_empty() {
        return Err(Error::InvalidPattern("empty pattern".into()));
    }
    if let Some(i) = pattern.iter().position(|&b| b < MIN_CONTENT_BYTE) {
        return Err(Error::InvalidPattern(format!(
            "reserved byte {:#04x} at offset {i}",
            pattern[i]
        )));
    }
    Ok(())
}

/// Tries both key families for φ⁻¹ on random small texts, with satellites
/// read from the oracle suffix array, and returns the one that reproduces
/// `SA[h+1]` for every row. Run starts carry `SA[s+1]`, run ends `SA[e+1]`.
pub fn select_phi_inverse_family(seed: u64, trials: usize) -> Option<BoundaryFamily> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let families = [BoundaryFamily::RunStarts, BoundaryFamily::RunEnds];
    let mut ok = [true; 2];
    for _ in 0..trials {
        let len = rng.gen_range(1..200);
        let sigma = rng.gen_range(1..5u8);
        let mut text: Vec<u8> = (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
        text.push(0);
        let sa: Vec<u64> = sa_naive(&text)
            .entries()
            .iter()
            .map(|&v| v as u64)
            .collect();
        let n = sa.len();
        let bwt: Vec<u8> = sa.iter().map(|&v| text[(v as usize + n - 1) % n]).collect();
        for (f, family) in families.iter().enumerate() {
            let rows = (0..n).filter(|&h| match family {
                BoundaryFamily::RunStarts => h == 0 || bwt[h] != bwt[h - 1],
                BoundaryFamily::RunEnds => h == n - 1 || bwt[h] != bwt[h + 1],
            });
            let map = PredMap::new(rows.map(|h| (sa[h], sa.get(h + 1).copied())).collect())
                .expect("SA values are distinct");
            ok[f] &= (0..n - 1).all(|h| map.apply(sa[h]) == Some(sa[h + 1]));
        }
    }
    match ok {
        [false, true] => Some(BoundaryFamily::RunEnds),
        [true, false] => Some(BoundaryFamily::RunStarts),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suffix_kernel::RunBoundarySample;

    fn index_of(content: &[u8]) -> (RIndex, Vec<u8>, Vec<u64>) {
        let mut text = content.to_vec();
        text.push(0);
        let sa: Vec<usize> = sa_naive(&text).into_vec();
        let bwt = crate::suffix_kernel::bwt_from_sa(
            &text,
            &crate::suffix_kernel::SuffixArray::new(sa.clone()),
        );
        let s = RunBoundarySample::from_bwt_and_sa(&bwt, &sa);
        let idx = RIndex::from_bwt(&bwt, &s.ssa, &s.esa).unwrap();
        (idx, text, sa.iter().map(|&v| v as u64).collect())
    }

    fn naive(text: &[u8], pat: &[u8]) -> Vec<u64> {
        (0..text.len().saturating_sub(pat.len() - 1))
            .filter(|&i| text[i..].starts_with(pat))
            .map(|i| i as u64)
            .collect()
    }

    #[test]
    fn abracadabra_queries() {
        let (idx, _, _) = index_of(b"abracadabra");
        assert_eq!(idx.runs(), 8);
        assert_eq!(idx.count(b"abra").unwrap(), 2);
        let mut hits = idx.locate_all(b"abra", None).unwrap();
        hits.sort();
        assert_eq!(hits, [0, 7]);
        assert_eq!(idx.count(b"abracadabra").unwrap(), 1);
        assert_eq!(idx.count(b"zzz").unwrap(), 0);
        assert_eq!(idx.locate_all(b"a", Some(2)).unwrap().len(), 2);
        assert!(idx.locate_all(b"a", Some(0)).unwrap().is_empty());
        assert!(matches!(idx.count(b""), Err(Error::InvalidPattern(_))));
        assert!(matches!(idx.count(b"a\x01"), Err(Error::InvalidPattern(_))));
    }

    #[test]
    fn phi_sweeps() {
        for content in [&b"abracadabra"[..], b"a", b"mississippi", b"aaaaaa"] {
            let (idx, _, sa) = index_of(content);
            for h in 0..sa.len() - 1 {
                assert_eq!(idx.phi_inverse(sa[h]), Some(sa[h + 1]), "h={h}");
                assert_eq!(idx.phi(sa[h + 1]), Some(sa[h]));
            }
            assert_eq!(idx.phi_inverse(idx.last_sa()), None);
            assert_eq!(idx.phi(sa[0]), None);
        }
    }

    #[test]
    fn toehold_is_exact_both_anchors() {
        let (idx, text, sa) = index_of(b"abracadabracadabraabra");
        let content = &text[..text.len() - 1];
        for start in 0..content.len() {
            for init in [idx.initial_state(), idx.initial_state_bottom()] {
                let mut st = init;
                for &c in content[start..].iter().rev() {
                    st = idx.backward_step(&st, c).unwrap();
                    assert_eq!(st.toehold, sa[st.anchored_row() as usize]);
                }
            }
        }
        let st = idx.find(b"abra").unwrap().unwrap();
        let bottom = {
            let mut s = idx.initial_state_bottom();
            for &c in b"abra".iter().rev() {
                s = idx.backward_step(&s, c).unwrap();
            }
            s
        };
        let mut a = idx.locate_state(&st, None);
        let mut b = idx.locate_state(&bottom, None);
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(a, naive(&text, b"abra"));
    }

    #[test]
    fn full_text_walk_gives_singletons() {
        let (idx, text, _) = index_of(b"banana");
        let mut st = idx.initial_state();
        for (i, &c) in text[..text.len() - 1].iter().rev().enumerate() {
            st = idx.backward_step(&st, c).unwrap();
            assert_eq!(st.matched_len, i + 1);
        }
        assert_eq!(st.size(), 1);
        assert_eq!(st.toehold, 0);
    }

    #[test]
    fn self_check_picks_run_ends() {
        assert_eq!(select_phi_inverse_family(7, 200), Some(PHI_INVERSE_FAMILY));
    }

    #[test]
    fn two_byte_text() {
        let (idx, _, sa) = index_of(b"a");
        assert_eq!(idx.phi_inverse(sa[0]), Some(sa[1]));
        assert_eq!(idx.phi_inverse(sa[1]), None);
    }
}
